#include "spinorsurf/scenario.hpp"

#include "spinorsurf/io.hpp"

#include <fstream>
#include <limits>
#include <numbers>
#include <set>

namespace spinorsurf {

namespace {

using nlohmann::json;
constexpr double pi = std::numbers::pi;

const std::array<std::pair<Family, const char *>, 6> kFamilies = {{
    {Family::Plane, "plane"},
    {Family::SphereOffset, "sphere_offset"},
    {Family::Enneper, "enneper"},
    {Family::Cylinder, "cylinder"},
    {Family::TorusOfRevolution, "torus_of_revolution"},
    {Family::CustomSpinorFile, "custom_spinor_file"},
}};

Scenario defaults(Family f)
{
    Scenario s;
    s.family = f;
    s.name = family_name(f);
    switch (f) {
    case Family::Plane:
        s.nx = s.ny = 64;
        s.offset = {0, 0, 1};
        s.oracle = "hand integration: r = (-y, -x, 1), inverted potential -1/(x^2+y^2+1)";
        break;
    case Family::SphereOffset:
        s.x_min = s.y_min = -2;
        s.x_max = s.y_max = 2;
        s.offset = {0, 0, 2};
        s.oracle = "stereographic projection; Moebius image-sphere of radius R/(|c|^2-R^2)";
        break;
    case Family::Enneper:
        s.x_min = s.y_min = -0.8;
        s.x_max = s.y_max = 0.8;
        s.offset = {0, 0, 1};
        s.oracle = "closed-form polynomial immersion";
        break;
    case Family::Cylinder:
        s.nx = 64;
        s.ny = 33;
        s.oracle = "separable V: constant potential -1/(4 radius), V = 0";
        break;
    case Family::TorusOfRevolution:
        s.oracle = "spin structure: multipliers (-1, -1), U = -(a + 2 cos v)/4";
        break;
    case Family::CustomSpinorFile:
        s.oracle = "none";
        break;
    }
    return s;
}

double torus_period(double a) { return 2 * pi / std::sqrt(a * a - 1); }

// conformal coordinate w to the meridian angle v, continuous in w
double torus_v(double a, double w)
{
    const double phi = std::sqrt(a * a - 1) * w / 2;
    const double m = std::floor(phi / pi + 0.5);
    const double p = phi - m * pi;
    return 2 * (std::atan(std::sqrt((a + 1) / (a - 1)) * std::tan(p)) + m * pi);
}

template <class T> T get_as(const json &j, const char *key, const T &fallback)
{
    if (!j.contains(key))
        return fallback;
    return j.at(key).get<T>();
}

void check_keys(const json &j, const std::set<std::string> &allowed, const std::string &where)
{
    if (!j.is_object())
        throw ConfigParseError(where + " must be an object");
    for (const auto &[k, v] : j.items())
        if (!allowed.count(k))
            throw ConfigParseError("unknown key '" + k + "' in " + where);
}

Vec3 vec3_of(const json &j)
{
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 3)
        throw ConfigParseError("offset needs three components");
    return {v[0], v[1], v[2]};
}

Realization realize_custom(const Scenario &sc)
{
    std::ifstream in(sc.spinor_file);
    if (!in)
        throw ValidationError("cannot open spinor file " + sc.spinor_file);
    const auto rows = read_csv_rows(in);
    const Grid2D g = scenario_grid(sc);
    if (rows.size() != g.size())
        throw ValidationError("spinor file has " + std::to_string(rows.size()) + " rows, grid needs " +
                              std::to_string(g.size()));
    Realization r;
    r.grid = g;
    r.psi = SpinorField(g);
    const double tol = 1e-9 * (1 + std::max(std::abs(sc.x_max), std::abs(sc.y_max)));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto &row = rows[k];
        if (row.size() != 6)
            throw ValidationError("spinor file rows need x,y,re1,im1,re2,im2");
        const int i = int(k % g.nx()), j = int(k / g.nx());
        if (std::abs(row[0] - g.x(i)) > tol || std::abs(row[1] - g.y(j)) > tol)
            throw ValidationError("spinor file nodes do not match the grid");
        r.psi[k] = {{row[2], row[3]}, {row[4], row[5]}};
    }
    r.base = sc.base.value_or(g.center_node());
    const Spinor pb = r.psi(r.base.i, r.base.j);
    if (std::norm(pb.s1) + std::norm(pb.s2) < kBranchThreshold)
        throw SingularityError("spinor vanishes at the base node");
    r.x0 = sc.offset;
    const SurfaceFrame f = integrate_surface(r.psi, r.base, r.x0);
    r.U = potential_from_geometry(f);
    return r;
}

} // namespace

std::string family_name(Family f)
{
    for (const auto &[k, n] : kFamilies)
        if (k == f)
            return n;
    return "unknown";
}

Family parse_family(const std::string &s)
{
    for (const auto &[k, n] : kFamilies)
        if (s == n)
            return k;
    throw ConfigParseError("unknown family '" + s + "'");
}

nlohmann::json Scenario::to_json() const
{
    json j;
    j["name"] = name;
    j["family"] = family_name(family);
    j["grid"] = {{"nx", nx}, {"ny", ny}, {"x_range", {x_min, x_max}}, {"y_range", {y_min, y_max}}};
    j["params"] = {{"radius", radius}, {"offset", {offset[0], offset[1], offset[2]}}, {"a", torus_a}};
    if (base)
        j["base"] = {base->i, base->j};
    j["tolerances"] = {{"fd", tol.fd},
                       {"spectral", tol.spectral},
                       {"algebraic", tol.algebraic},
                       {"floquet", tol.floquet},
                       {"scale", tol.scale}};
    j["evolve"] = {{"steps", evolve.steps}, {"dt", evolve.dt}, {"snapshot_every", evolve.snapshot_every}};
    j["output_dir"] = output_dir;
    if (!spinor_file.empty())
        j["spinor_file"] = spinor_file;
    j["oracle"] = oracle;
    return j;
}

Scenario parse_scenario(const nlohmann::json &j, const std::filesystem::path &config_dir)
{
    Scenario s;
    try {
        check_keys(j, {"name", "family", "grid", "params", "base", "tolerances", "output_dir", "spinor_file",
                       "evolve", "oracle"},
                   "scenario");
        if (!j.contains("family"))
            throw ConfigParseError("missing key 'family'");
        s = defaults(parse_family(j.at("family").get<std::string>()));
        s.name = get_as(j, "name", s.name);
        s.oracle = get_as(j, "oracle", s.oracle);
        s.output_dir = get_as(j, "output_dir", s.output_dir);
        if (j.contains("grid")) {
            const json &g = j.at("grid");
            check_keys(g, {"nx", "ny", "x_range", "y_range"}, "grid");
            s.nx = get_as(g, "nx", s.nx);
            s.ny = get_as(g, "ny", s.ny);
            if (g.contains("x_range")) {
                const auto r = g.at("x_range").get<std::array<double, 2>>();
                s.x_min = r[0];
                s.x_max = r[1];
            }
            if (g.contains("y_range")) {
                const auto r = g.at("y_range").get<std::array<double, 2>>();
                s.y_min = r[0];
                s.y_max = r[1];
            }
        }
        if (j.contains("params")) {
            const json &p = j.at("params");
            check_keys(p, {"radius", "offset", "a"}, "params");
            s.radius = get_as(p, "radius", s.radius);
            s.torus_a = get_as(p, "a", s.torus_a);
            if (p.contains("offset"))
                s.offset = vec3_of(p.at("offset"));
        }
        if (j.contains("base")) {
            const auto b = j.at("base").get<std::array<int, 2>>();
            s.base = Node{b[0], b[1]};
        }
        if (j.contains("tolerances")) {
            const json &t = j.at("tolerances");
            check_keys(t, {"fd", "spectral", "algebraic", "floquet", "scale"}, "tolerances");
            s.tol.fd = get_as(t, "fd", s.tol.fd);
            s.tol.spectral = get_as(t, "spectral", s.tol.spectral);
            s.tol.algebraic = get_as(t, "algebraic", s.tol.algebraic);
            s.tol.floquet = get_as(t, "floquet", s.tol.floquet);
            s.tol.scale = get_as(t, "scale", s.tol.scale);
        }
        if (j.contains("evolve")) {
            const json &e = j.at("evolve");
            check_keys(e, {"steps", "dt", "snapshot_every"}, "evolve");
            s.evolve.steps = get_as(e, "steps", s.evolve.steps);
            s.evolve.dt = get_as(e, "dt", s.evolve.dt);
            s.evolve.snapshot_every = get_as(e, "snapshot_every", s.evolve.snapshot_every);
        }
        if (j.contains("spinor_file")) {
            std::filesystem::path p = j.at("spinor_file").get<std::string>();
            if (p.is_relative() && !config_dir.empty())
                p = config_dir / p;
            s.spinor_file = p.string();
        }
    } catch (const json::exception &e) {
        throw ConfigParseError(std::string("malformed scenario: ") + e.what());
    }
    validate(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigParseError("cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception &e) {
        throw ConfigParseError(path.string() + ": " + e.what());
    }
    return parse_scenario(j, path.parent_path());
}

void validate(const Scenario &s)
{
    if (s.nx < 8 || s.ny < 8)
        throw ValidationError("grid needs at least 8 nodes per axis");
    const bool own_x = s.family != Family::TorusOfRevolution && s.family != Family::Cylinder;
    const bool own_y = s.family != Family::TorusOfRevolution;
    if ((own_x && !(s.x_max > s.x_min)) || (own_y && !(s.y_max > s.y_min)))
        throw ValidationError("empty coordinate range");
    if (!(s.radius > 0))
        throw ValidationError("radius must be positive");
    if (s.family == Family::TorusOfRevolution && !(s.torus_a > 1))
        throw ValidationError("torus needs a > 1");
    for (double t : {s.tol.fd, s.tol.spectral, s.tol.algebraic, s.tol.floquet, s.tol.scale})
        if (!(t > 0))
            throw ValidationError("tolerances must be positive");
    if (s.evolve.steps < 0 || s.evolve.snapshot_every < 1 || s.evolve.dt < 0)
        throw ValidationError("bad evolve settings");
    if (s.base && (s.base->i < 0 || s.base->i >= s.nx || s.base->j < 0 || s.base->j >= s.ny))
        throw ValidationError("base node outside the grid");
    if (s.family == Family::CustomSpinorFile && s.spinor_file.empty())
        throw ValidationError("custom_spinor_file needs spinor_file");
}

std::vector<Scenario> builtin_scenarios()
{
    std::vector<Scenario> out;
    for (Family f : {Family::Plane, Family::SphereOffset, Family::Enneper, Family::Cylinder,
                     Family::TorusOfRevolution})
        out.push_back(defaults(f));
    out[4].name = "torus";
    out[1].name = "sphere";
    return out;
}

Scenario builtin_scenario(const std::string &name)
{
    for (const Scenario &s : builtin_scenarios())
        if (s.name == name || family_name(s.family) == name)
            return s;
    throw ValidationError("no built-in scenario '" + name + "'");
}

Grid2D scenario_grid(const Scenario &sc)
{
    switch (sc.family) {
    case Family::TorusOfRevolution:
        return Grid2D::periodic(2 * pi, torus_period(sc.torus_a), sc.nx, sc.ny);
    case Family::Cylinder:
        return Grid2D(Axis{sc.nx, 0.0, 2 * pi * sc.radius, true}, Axis{sc.ny, sc.y_min, sc.y_max - sc.y_min, false});
    default:
        return Grid2D::box(sc.x_min, sc.x_max, sc.y_min, sc.y_max, sc.nx, sc.ny);
    }
}

Realization realize(const Scenario &sc)
{
    validate(sc);
    if (sc.family == Family::CustomSpinorFile)
        return realize_custom(sc);
    Realization r;
    r.grid = scenario_grid(sc);
    const Vec3 off = sc.offset;
    const double rho = sc.radius;
    std::array<cplx, 2> wrap{1.0, 1.0};
    std::function<double(cplx)> U;
    switch (sc.family) {
    case Family::Plane:
        r.psi_exact = [](cplx) { return Spinor{1.0, 0.0}; };
        U = [](cplx) { return 0.0; };
        r.r_exact = [off](cplx z) { return Vec3{-z.imag(), -z.real(), 0} + off; };
        r.companion = [](cplx z) { return Spinor{z * z + 0.5 * z + 0.3, 0.4 * std::conj(z) - 0.2}; };
        break;
    case Family::Enneper:
        r.psi_exact = [](cplx z) { return Spinor{1.0, std::conj(z)}; };
        U = [](cplx) { return 0.0; };
        r.r_exact = [off](cplx z) {
            const cplx z3 = z * z * z / 3.0;
            return Vec3{std::real(I * (z + z3)), std::real(z3 - z), std::real(z * z)} + off;
        };
        r.companion = [](cplx z) { return Spinor{z * z + 0.5 * z + 0.3, 0.4 * std::conj(z) - 0.2}; };
        break;
    case Family::SphereOffset: {
        const double s = std::sqrt(rho);
        auto sphere = [s](cplx z) {
            const double q = 1 + std::norm(z);
            return Spinor{s * (1.0 + I) * std::conj(z) / q, s * (1.0 + I) / q};
        };
        r.psi_exact = sphere;
        U = [](cplx z) { return 1.0 / (1 + std::norm(z)); };
        r.r_exact = [off, rho](cplx z) {
            const double q = 1 + std::norm(z);
            return rho * Vec3{2 * z.real() / q, 2 * z.imag() / q, (std::norm(z) - 1) / q} + off;
        };
        // a rotation of the sphere realised as an SU(2) Moebius change of chart
        const cplx al = std::cos(0.3) * std::exp(0.2 * I), be = std::sin(0.3) * std::exp(-0.5 * I);
        r.companion = [sphere, al, be](cplx w) {
            const cplx den = -std::conj(be) * w + std::conj(al);
            const cplx g = 1.0 / den;
            const Spinor p = sphere((al * w + be) / den);
            return Spinor{p.s1 * g, p.s2 * std::conj(g)};
        };
        break;
    }
    case Family::Cylinder: {
        const double c = 1 / std::sqrt(2.0);
        r.psi_exact = [rho, c](cplx z) {
            const cplx e = std::exp(-I * z.real() / (2 * rho));
            return Spinor{I * c * e, -c * e};
        };
        const double u0 = -1 / (4 * rho);
        U = [u0](cplx) { return u0; };
        r.r_exact = [off, rho](cplx z) {
            return Vec3{rho * std::cos(z.real() / rho), rho * std::sin(z.real() / rho), z.imag()} + off;
        };
        wrap = {-1.0, 1.0};
        // plane wave e^{ipx − sy} with p = 3/(2ρ), p² − s² = 4U²
        const double p = 3 / (2 * rho), s = std::sqrt(p * p - 4 * u0 * u0);
        r.companion = [p, s, u0](cplx z) {
            const cplx e = std::exp(I * p * z.real() - s * z.imag());
            return Spinor{e, I * (p - s) / (2 * u0) * e};
        };
        r.companion_wrap = {-1.0, 1.0};
        break;
    }
    case Family::TorusOfRevolution: {
        const double a = sc.torus_a;
        auto v_of = [a](cplx z) { return torus_v(a, z.imag()); };
        r.psi_exact = [v_of, a](cplx z) {
            const double v = v_of(z), rr = a + std::cos(v), s = std::sqrt(rr / 2);
            const cplx e = std::exp(-0.5 * I * z.real());
            const cplx p1 = I * s * (std::cos(v / 2) - std::sin(v / 2)) * e;
            const cplx p2bar = -s * (std::cos(v / 2) + std::sin(v / 2)) * std::conj(e);
            return Spinor{p1, std::conj(p2bar)};
        };
        U = [v_of, a](cplx z) { return -(a + 2 * std::cos(v_of(z))) / 4; };
        r.r_exact = [v_of, a, off](cplx z) {
            const double v = v_of(z), rr = a + std::cos(v);
            return Vec3{rr * std::cos(z.real()), rr * std::sin(z.real()), std::sin(v)} + off;
        };
        wrap = {-1.0, -1.0};
        r.companion = [v_of, a](cplx z) {
            const cplx e = std::exp(I * (v_of(z) - a * z.imag() / 2));
            return Spinor{e, e};
        };
        r.companion_wrap = {1.0, std::exp(-0.5 * I * a * torus_period(a))};
        break;
    }
    case Family::CustomSpinorFile:
        break;
    }
    r.psi = SpinorField::sample(r.grid, r.psi_exact, wrap);
    r.U = ScalarField::sample(r.grid, U);
    r.base = sc.base.value_or(r.grid.center_node());
    r.x0 = r.r_exact(r.grid.z(r.base));
    return r;
}

Scenario refined(const Scenario &sc, int level)
{
    Scenario s = sc;
    s.nx = sc.nx << level;
    s.ny = sc.ny << level;
    if (s.base)
        s.base = Node{sc.base->i << level, sc.base->j << level};
    return s;
}

double min_radius(const Vec3Field &r)
{
    double m = std::numeric_limits<double>::infinity();
    for (const Vec3 &v : r.values())
        m = std::min(m, norm(v));
    return m;
}

} // namespace spinorsurf
