#include "spinorsurf/pipelines.hpp"

#include "spinorsurf/floquet.hpp"
#include "spinorsurf/io.hpp"
#include "spinorsurf/mnv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>

namespace spinorsurf {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const char *relation_name(Relation r)
{
    switch (r) {
    case Relation::AtMost:
        return "<=";
    case Relation::AtLeast:
        return ">=";
    case Relation::Within:
        return "in";
    }
    return "?";
}

// tolerances of one run, tolerance scale already applied
struct Tol {
    double C, spectral, algebraic, floquet;
    explicit Tol(const Scenario &sc)
        : C(sc.tol.fd * sc.tol.scale), spectral(sc.tol.spectral * sc.tol.scale),
          algebraic(sc.tol.algebraic * sc.tol.scale), floquet(sc.tol.floquet * sc.tol.scale)
    {
    }
};

struct Ctx {
    const Scenario &sc;
    Tol tol;
    fs::path out;
    bool artifacts;
    Report &rep;
};

double spacing(const Grid2D &g) { return std::max(g.hx(), g.hy()); }

fs::path fields_dir(const Ctx &c) { return c.out / "fields"; }

template <class Fn> double max_over_nodes(const Grid2D &g, Fn &&fn)
{
    double m = 0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            m = std::max(m, fn(i, j));
    return m;
}

double min_of(const ScalarField &f)
{
    double m = std::numeric_limits<double>::infinity();
    for (double v : f.values())
        m = std::min(m, v);
    return m;
}

double path_quadrature_bound(const Realization &R, Scheme s, const SurfaceFrame &f)
{
    const SurfaceFrame g = integrate_surface(R.psi, R.base, R.x0, PathOrder::YThenX, s);
    return max_over_nodes(f.r.grid(), [&](int i, int j) { return norm(f.r(i, j) - g.r(i, j)); });
}

void require_away_from_origin(const Scenario &sc, const Vec3Field &r)
{
    double m = min_radius(r);
    // whole sphere for the sphere family
    if (sc.family == Family::SphereOffset)
        m = std::min(m, std::abs(norm(sc.offset) - sc.radius));
    if (m < 0.05)
        throw ValidationError("surface comes within " + std::to_string(m) + " of the origin (needs >= 0.05)");
}

void dump_scalar(const Ctx &c, const std::string &stem, const ScalarField &f)
{
    if (c.artifacts)
        dump_field(fields_dir(c) / stem, f);
}

void surface_level(Ctx &c)
{
    Report &rep = c.rep;
    const Realization R = realize(c.sc);
    const Grid2D &g = R.grid;
    const double h = spacing(g), h2 = h * h;
    const Scheme s = default_scheme(g);
    const bool spec = s == Scheme::Spectral;
    const Tol &t = c.tol;

    const SurfaceFrame f = integrate_surface(R.psi, R.base, R.x0, PathOrder::XThenY, s);
    const double quad = path_quadrature_bound(R, s, f);
    const double emax = max_norm(f.e_alpha), emin = min_of(f.e_alpha);
    const double rscale = std::max(1.0, max_norm(f.r));

    if (R.r_exact) {
        const double err = max_over_nodes(g, [&](int i, int j) { return norm(f.r(i, j) - R.r_exact(g.z(i, j))); });
        rep.at_most("surface.r_error", err, spec ? t.spectral * rscale : t.C * h2);
    }
    const double nu = max_over_nodes(g, [&](int i, int j) {
        return f.branch[g.index(i, j)] ? 0.0 : std::abs(norm(f.n(i, j)) - 1.0);
    });
    rep.at_most("surface.normal_unit", nu, t.algebraic);

    const double res = max_norm(dirac_residual(R.psi, R.U, s));
    rep.at_most("surface.dirac_residual", res,
                spec ? t.spectral * max_norm(R.psi) : t.C * h2 * third_derivative_scale(R.psi));

    const ScalarField met = metric_from_immersion(f.r, s);
    const double dm = max_over_nodes(g, [&](int i, int j) {
        const double e = f.e_alpha(i, j);
        return std::abs(met(i, j) - e * e);
    });
    rep.at_most("surface.metric_consistency", dm,
                spec ? t.spectral * emax * emax : t.C * h2 * third_derivative_scale(f.r) * emax);

    // Laplacian-based quantities; curvature scale floored at the unit length
    const double uscale = std::max(1.0, max_norm(R.U));
    const double lap_bound = spec ? t.spectral * uscale : 2 * t.C * h2 * uscale;
    const ScalarField Hff = mean_curvature_fundamental_forms(f, s);
    const double d6 = max_over_nodes(g, [&](int i, int j) {
        return f.branch[g.index(i, j)] ? 0.0 : std::abs(f.e_alpha(i, j) * Hff(i, j) / 2 - f.U(i, j));
    });
    rep.at_most("surface.potential_consistency", d6, lap_bound);
    if (c.sc.family != Family::CustomSpinorFile)
        rep.at_most("surface.potential_vs_scenario", max_diff(f.U, R.U), lap_bound);

    const SpinorRecovery rec = spinor_from_surface(f, R.base, {s});
    const SpinorField neg = map_field<Spinor>(R.psi, [](const Spinor &v) { return -v; });
    const double drec = std::min(max_diff(rec.psi, R.psi), max_diff(rec.psi, neg));
    rep.at_most("surface.spinor_round_trip", drec,
                spec ? t.spectral * max_norm(R.psi)
                     : t.C * h2 * third_derivative_scale(f.r) / std::sqrt(std::max(emin, 1e-300)));

    double closed = 0;
    for (const auto &form : weierstrass_forms(R.psi))
        closed = std::max(closed, closedness_defect(form).max());
    std::size_t nbranch = 0;
    for (bool b : f.branch)
        nbranch += b;
    rep.data["h"] = h;
    rep.data["grid"] = grid_json(g);
    rep.data["path_quadrature_bound"] = quad;
    rep.data["closedness_defect"] = closed;
    rep.data["e_alpha_range"] = {emin, emax};
    rep.data["branch_nodes"] = nbranch;
    rep.data["conformality_residual"] = rec.conformality_residual;
    rep.data["warnings"] = f.warnings;

    if (c.artifacts) {
        dump_field(fields_dir(c) / "r", f.r);
        dump_field(fields_dir(c) / "psi", R.psi);
        dump_scalar(c, "e_alpha", f.e_alpha);
        dump_scalar(c, "U_geometric", f.U);
        write_surface_obj(c.out / "mesh_surface.obj", f);
    }
}

// Möbius image of the sphere |x − c| = R under x ↦ −x/|x|²
std::pair<Vec3, double> image_sphere(const Vec3 &c, double R)
{
    const double d = norm2(c) - R * R;
    return {-1.0 / d * c, R / std::abs(d)};
}

struct InversionData {
    Realization R;
    Scheme s;
    SurfaceFrame f;
    InversionReport inv_rep;
    QuatField P0, S;
    double quad, umax;
};

InversionData inversion_data(const Scenario &sc)
{
    InversionData d{realize(sc), Scheme::FiniteDifference, {}, {}, {}, {}, 0, 0};
    d.s = default_scheme(d.R.grid);
    d.f = with_potential(integrate_surface(d.R.psi, d.R.base, d.R.x0, PathOrder::XThenY, d.s), d.R.U);
    require_away_from_origin(sc, d.f.r);
    d.quad = path_quadrature_bound(d.R, d.s, d.f);
    d.inv_rep = inversion_report(d.f, 0, d.s);
    d.P0 = matrix_solution(d.R.psi);
    d.S = s_matrix_surface(d.P0, d.R.base, d.R.x0);
    d.umax = std::max(max_norm(d.R.U), max_norm(d.inv_rep.U_formula));
    return d;
}

void plane_closed_form(Ctx &c, const InversionData &d, const std::string &name, const ScalarField &U, double bound)
{
    if (c.sc.family != Family::Plane)
        return;
    const Grid2D &g = d.R.grid;
    const double c3 = c.sc.offset[2];
    const double err = max_over_nodes(g, [&](int i, int j) {
        const Vec3 r = d.R.r_exact(g.z(i, j));
        return std::abs(U(i, j) + c3 / norm2(r));
    });
    c.rep.at_most(name, err, bound);
}

void invert_level(Ctx &c)
{
    Report &rep = c.rep;
    const InversionData d = inversion_data(c.sc);
    const Grid2D &g = d.R.grid;
    const double h = spacing(g), h2 = h * h;
    const bool spec = d.s == Scheme::Spectral;
    const Tol &t = c.tol;
    const double combined = (spec ? t.spectral : 2 * t.C * h2) * d.umax + d.quad;

    rep.at_most("invert.dual_path", d.inv_rep.max_discrepancy, (spec ? t.spectral : 2 * t.C * h2) * d.umax);

    double imag = 0;
    const ScalarField U_mat = inverted_potential_matrix(d.P0, d.S, d.R.U, &imag);
    rep.at_most("invert.matrix_potential_imag", imag, t.spectral * std::max(1.0, max_norm(U_mat)));
    const InvertedSpinor inv = inverted_spinor(d.P0, d.S);
    rep.at_most("invert.inverted_spinor_residual", dirac_residual_matrix(inv.psi, U_mat, d.s),
                spec ? t.spectral * max_norm(inv.psi) : t.C * h2 * third_derivative_scale(inv.psi));
    rep.at_most("invert.matrix_vs_geometric_potential", max_diff(U_mat, d.inv_rep.U_formula), combined);

    const MoutardData md = moutard_potential(d.R.U, d.P0, d.S);
    rep.at_most("invert.moutard_vs_inversion", max_diff(md.U_tilde, d.inv_rep.U_formula), combined);

    const ScalarField ea = conformal_factor(columns(inv.psi)[0]);
    double ratio_scale = 0;
    const double dr = max_over_nodes(g, [&](int i, int j) {
        const double want = d.f.e_alpha(i, j) / norm2(d.f.r(i, j));
        ratio_scale = std::max(ratio_scale, want);
        return std::abs(ea(i, j) - want);
    });
    rep.at_most("invert.conformal_ratio", dr, t.algebraic * std::max(1.0, ratio_scale));

    plane_closed_form(c, d, "invert.plane_closed_form", d.inv_rep.U_formula, combined);
    if (c.sc.family == Family::SphereOffset) {
        const auto [ctr, rad] = image_sphere(c.sc.offset, c.sc.radius);
        const Vec3Field &rt = d.inv_rep.surface_out.r;
        const double dev = max_over_nodes(g, [&](int i, int j) { return std::abs(norm(rt(i, j) - ctr) - rad); });
        const double rmin = min_radius(d.f.r);
        rep.at_most("invert.image_sphere", dev, t.C * h2 / (rmin * rmin));
    }

    rep.data["h"] = h;
    rep.data["grid"] = grid_json(g);
    rep.data["path_quadrature_bound"] = d.quad;
    rep.data["scale_max_abs_U"] = d.umax;
    rep.data["min_radius"] = min_radius(d.f.r);
    rep.data["inversion"] = d.inv_rep.to_json();

    if (c.artifacts) {
        write_surface_obj(c.out / "mesh_surface.obj", d.f);
        write_obj(c.out / "mesh_inverted.obj", d.inv_rep.surface_out.r, d.inv_rep.surface_out.branch);
        dump_scalar(c, "U_tilde_geometric", d.inv_rep.U_formula);
        dump_scalar(c, "U_tilde_geometric", d.inv_rep.U_geometric);
        dump_scalar(c, "U_tilde_matrix", U_mat);
    }
}

// residual of transformed solutions against their bound
double transform_residual_ratio(const QuatField &Pt, const ScalarField &Ut, Scheme s, double C, double h2,
                                double spectral)
{
    const double res = dirac_residual_matrix(Pt, Ut, s);
    const double bound = s == Scheme::Spectral ? spectral * max_norm(Pt) : C * h2 * third_derivative_scale(Pt);
    return res / bound;
}

void moutard_level(Ctx &c)
{
    Report &rep = c.rep;
    const InversionData d = inversion_data(c.sc);
    const Grid2D &g = d.R.grid;
    const double h = spacing(g), h2 = h * h;
    const bool spec = d.s == Scheme::Spectral;
    const Tol &t = c.tol;
    const double combined = (spec ? t.spectral : 2 * t.C * h2) * d.umax + d.quad;

    const MoutardData md = moutard_potential(d.R.U, d.P0, d.S);
    rep.at_most("moutard.moutard_vs_inversion", max_diff(md.U_tilde, d.inv_rep.U_formula), combined);
    plane_closed_form(c, d, "moutard.plane_closed_form", md.U_tilde, combined);
    rep.at_most("moutard.w_imag", md.max_imag_W, t.spectral * std::max(1.0, max_norm(md.U_tilde)));
    rep.at_most("moutard.k_shape", md.shape_defect, t.algebraic * std::max(1.0, max_norm(md.K)));
    if (d.R.r_exact) {
        const double gs = max_over_nodes(g, [&](int i, int j) {
            return norm(su2_extract(d.S(i, j)) - d.R.r_exact(g.z(i, j)));
        });
        rep.at_most("moutard.s_gauge", gs, spec ? t.spectral * std::max(1.0, max_norm(d.f.r)) : t.C * h2);
    }
    // Ψ = Ψ₀ with the surface constant maps to zero
    const InvertedSpinor inv = inverted_spinor(d.P0, d.S);
    const QuatField self = moutard_transform_tilde(d.P0, inv.psi, d.S);
    rep.at_most("moutard.self_transform", max_norm(self), t.algebraic * std::max(1.0, max_norm(d.P0)));

    const bool box = !g.periodic_x() && !g.periodic_y();
    if (box && d.R.companion) {
        const QuatField Pc = matrix_solution(SpinorField::sample(g, d.R.companion, d.R.companion_wrap));
        const QuatField Pt = moutard_transform(Pc, d.P0, d.S, d.R.base);
        const double res = dirac_residual_matrix(Pt, md.U_tilde, d.s);
        rep.at_most("moutard.companion_residual", res, t.C * h2 * third_derivative_scale(Pt));
        std::mt19937_64 rng(20240611);
        std::normal_distribution<double> nd;
        double worst = 0;
        for (int k = 0; k < 10; ++k) {
            const Quat A({nd(rng), nd(rng)}, {nd(rng), nd(rng)});
            QuatField shifted = Pt;
            for (std::size_t n = 0; n < shifted.size(); ++n)
                shifted[n] = Pt[n] + inv.psi[n] * A;
            worst = std::max(worst, transform_residual_ratio(shifted, md.U_tilde, d.s, t.C, h2, t.spectral));
        }
        rep.at_most("moutard.companion_gauge_shifts", worst, 1.0);
        if (c.artifacts)
            write_surface_obj(c.out / "mesh_companion_transform.obj",
                              integrate_surface(columns(Pt)[0], d.R.base, Vec3{}, PathOrder::XThenY, d.s));
    } else {
        rep.data["companion"] = box ? "no companion solution for this scenario"
                                : "skipped on periodic axes: the transform is not quasi-periodic, see floquet";
    }

    json w;
    w["min"] = min_of(md.W);
    w["max"] = max_norm(md.W);
    w["max_imag"] = md.max_imag_W;
    rep.data["W"] = w;
    rep.data["h"] = h;
    rep.data["grid"] = grid_json(g);
    rep.data["path_quadrature_bound"] = d.quad;
    rep.data["scale_max_abs_U"] = d.umax;

    if (c.artifacts) {
        write_surface_obj(c.out / "mesh_surface.obj", d.f);
        write_obj(c.out / "mesh_transformed.obj", d.inv_rep.surface_out.r, d.inv_rep.surface_out.branch);
        dump_scalar(c, "W", md.W);
        dump_scalar(c, "U_tilde", md.U_tilde);
    }
}

void require_doubly_periodic(const Grid2D &g, const std::string &what)
{
    if (!g.doubly_periodic())
        throw ValidationError(what + " needs a doubly periodic scenario");
}

double distance_to_sign(cplx mu) { return std::min(std::abs(mu - 1.0), std::abs(mu + 1.0)); }

json mu_json(const FloquetData &d)
{
    return {{"mu1", {d.mu1.real(), d.mu1.imag()}}, {"mu2", {d.mu2.real(), d.mu2.imag()}}};
}

void floquet_level(Ctx &c)
{
    Report &rep = c.rep;
    const Realization R = realize(c.sc);
    const Grid2D &g = R.grid;
    require_doubly_periodic(g, "floquet");
    const Tol &t = c.tol;

    const FloquetData in = estimate_multipliers(floquet_sample(g, R.psi_exact));
    rep.at_most("floquet.input_defect", in.defect, t.floquet);
    rep.at_most("floquet.input_sign_pattern", std::max(distance_to_sign(in.mu1), distance_to_sign(in.mu2)), t.floquet);

    const QuatField P0 = matrix_solution(R.psi);
    const QuatField S = s_matrix_surface(P0, R.base, R.x0);
    const MoutardData md = moutard_potential(R.U, P0, S);

    // Ψ₀q: the image is a gauge element, the family is degenerate
    const SpinorField trivial = columns(right_multiply(P0, Quat({0.3, 0.1}, {-0.2, 0.5})))[0];
    const FloquetFamily ft = moutard_floquet_family(trivial, P0, R.base, R.x0);
    const FloquetFix fx = fix_floquet_representative(ft, in);
    rep.at_most("floquet.pattern_defect", fx.defect, t.floquet);
    rep.at_most("floquet.pattern_multipliers",
                std::max(std::abs(fx.multipliers.mu1 - in.mu1), std::abs(fx.multipliers.mu2 - in.mu2)), t.floquet);

    json cj;
    if (R.companion) {
        const FloquetData cin = estimate_multipliers(floquet_sample(g, R.companion));
        rep.at_most("floquet.companion_input_defect", cin.defect, t.floquet);
        const SpinorField comp = SpinorField::sample(g, R.companion, R.companion_wrap);
        const FloquetFamily fam = moutard_floquet_family(comp, P0, R.base, R.x0);
        const FloquetFix cf = fix_floquet_representative(fam, cin);
        rep.at_most("floquet.companion_defect", cf.defect, t.floquet);
        rep.at_most("floquet.companion_multipliers",
                    std::max(std::abs(cf.multipliers.mu1 - cin.mu1), std::abs(cf.multipliers.mu2 - cin.mu2)),
                    t.floquet);
        // any other first column breaks the Floquet property
        double probe = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 4; ++k) {
            auto v = cf.v;
            v[k / 2] += (k % 2 ? I : cplx(1.0)) * 1e-3;
            probe = std::min(probe, floquet_defect(apply_gauge(fam, v), cin.mu1, cin.mu2));
        }
        rep.at_least("floquet.companion_uniqueness", probe, 10 * t.floquet);
        SpinorField rep_psi = cf.representative.values;
        rep_psi.set_wrap({cin.mu1, cin.mu2});
        const double res = max_norm(dirac_residual(rep_psi, md.U_tilde, Scheme::Spectral));
        rep.at_most("floquet.companion_dirac_residual", res, 10 * t.floquet * max_norm(rep_psi));
        cj["input"] = mu_json(cin);
        cj["fixed"] = mu_json(cf.multipliers);
        cj["A"] = {{cf.A.a().real(), cf.A.a().imag()}, {cf.A.b().real(), cf.A.b().imag()}};
        cj["degenerate"] = cf.degenerate;
        cj["probe_defect"] = probe;
        if (c.artifacts)
            dump_field(fields_dir(c) / "companion_representative", rep_psi);
    }
    rep.data["input"] = mu_json(in);
    rep.data["pattern"] = {{"fixed", mu_json(fx.multipliers)}, {"degenerate", fx.degenerate}};
    rep.data["companion"] = cj;
    rep.data["lambda"] = {{g.lambda1().real(), g.lambda1().imag()}, {g.lambda2().real(), g.lambda2().imag()}};
    rep.data["grid"] = grid_json(g);
    if (c.artifacts)
        dump_scalar(c, "U_tilde", md.U_tilde);
}

// 𝒜ψ for U = cos x, V = ½cos 2x, ψ = (e^{ix}, e^{−ix}), in powers of t = e^{ix}
Spinor a_oracle(double x)
{
    const cplx t = std::exp(I * x);
    const cplx a1 = 0.75 * I * std::pow(t, 3) + 0.375 * t * t - 0.25 * I * t + 0.75 / (t * t) + 0.375 / std::pow(t, 4);
    const cplx a2 = -0.375 * std::pow(t, 4) - 0.75 * t * t + 0.25 * I / t - 0.375 / (t * t) - 0.75 * I / std::pow(t, 3);
    return {a1, a2};
}

void mnv_check_level(Ctx &c)
{
    Report &rep = c.rep;
    const Realization R = realize(c.sc);
    const Grid2D &g = R.grid;
    require_doubly_periodic(g, "mnv-check");
    const Tol &t = c.tol;
    constexpr double pi = 3.14159265358979323846;

    const Grid2D pg = Grid2D::periodic(2 * pi, 2 * pi, g.nx(), g.ny());
    const ScalarField Uc = ScalarField::sample(pg, [](cplx z) { return std::cos(z.real()); });
    const MnvState st = make_state(Uc);
    const double dv = max_over_nodes(pg, [&](int i, int j) { return std::abs(st.V(i, j) - 0.5 * std::cos(2 * pg.x(i))); });
    rep.at_most("mnv.solve_v_cos", dv, t.spectral);
    double imag = 0;
    const ScalarField Ut = mnv_rhs(st, &imag);
    rep.at_most("mnv.rhs_imag", imag, t.spectral);
    const double dr = max_over_nodes(pg, [&](int i, int j) {
        const double x = pg.x(i);
        return std::abs(Ut(i, j) - (0.25 * std::sin(x) - 1.5 * std::sin(3 * x)));
    });
    rep.at_most("mnv.rhs_oracle", dr, t.spectral);

    const SpinorField ps =
        SpinorField::sample(pg, [](cplx z) { return Spinor{std::exp(I * z.real()), std::exp(-I * z.real())}; });
    const SpinorField Ap = a_apply(ps, st, Scheme::Spectral);
    const double da = max_over_nodes(pg, [&](int i, int j) { return max_abs(Ap(i, j) - a_oracle(pg.x(i))); });
    rep.at_most("mnv.a_apply_oracle", da, t.spectral);

    const double man = manakov_residual(st, Ut, ps);
    const double man_p = manakov_residual(st, map_field<double>(Ut, [](double v) { return v + 0.1; }), ps);
    rep.at_most("mnv.manakov_cos", man, 100 * t.spectral);
    rep.at_least("mnv.manakov_perturbed_ratio", man_p / std::max(man, 1e-300), 10.0);

    const SpinorField lhs = dirac_apply(ps, Uc, Scheme::Spectral);
    const Mat2 G = gamma().matrix();
    const SpinorField rhs = l_apply(map_field<Spinor>(ps, [&](const Spinor &v) { return G * v; }), Uc, Scheme::Spectral);
    rep.at_most("mnv.dirac_equals_l_gamma", max_diff(lhs, rhs), 1e-2 * t.algebraic);

    // the scenario's own potential
    const MnvState ts = make_state(R.U);
    rep.at_most("mnv.scenario_constraint", constraint_residual(ts.U, ts.V), t.spectral * std::max(1.0, max_norm(ts.U)));
    const ScalarField Uts = mnv_rhs(ts);
    rep.at_most("mnv.scenario_manakov", manakov_residual(ts, Uts, R.psi), 100 * t.spectral);
    const QuatField P0 = matrix_solution(R.psi);
    const TimeForm tf = omega_hat_form(P0, P0, ts, Scheme::Spectral);
    const MatrixField tz = omega_hat_dt_z(P0, P0, ts, Scheme::Spectral);
    rep.at_most("mnv.omega_hat_dual_display", max_diff(tf.dt, tz), t.spectral * std::max(1.0, max_norm(tz)));
    const QuatField S = s_matrix_surface(P0, R.base, R.x0);
    const ExtendedMoutardData em = extended_moutard(ts, P0, S);
    rep.at_most("mnv.extended_constraint", em.constraint, 1e4 * t.spectral);
    rep.at_most("mnv.k_shape", em.K_shape, t.spectral);
    rep.at_most("mnv.m_shape", em.M_shape, t.spectral);

    rep.data["stability_constant"] = kStabilityConstant;
    rep.data["stable_dt"] = stable_dt(g);
    rep.data["grid"] = grid_json(g);
    rep.data["U_tilde_range"] = {min_of(em.U_tilde), max_norm(em.U_tilde)};
    if (c.artifacts) {
        dump_scalar(c, "U_t", Uts);
        dump_field(fields_dir(c) / "V", ts.V);
        dump_scalar(c, "U_tilde", em.U_tilde);
        dump_field(fields_dir(c) / "V_tilde", em.V_tilde);
    }
}

// sup|Ũ| of the inverted torus as the surface is slid toward the origin
json blowup_probe(const Scenario &sc)
{
    json rows = json::array();
    const double a = sc.torus_a;
    for (double gap : {0.8, 0.4, 0.2, 0.1}) {
        Scenario s = sc;
        s.offset = Vec3{-(a - 1) + gap, 0, 0} + sc.offset;
        const Realization R = realize(s);
        const Scheme sch = default_scheme(R.grid);
        const SurfaceFrame f = with_potential(integrate_surface(R.psi, R.base, R.x0, PathOrder::XThenY, sch), R.U);
        const ScalarField Ut = inverted_potential(f);
        rows.push_back({{"min_radius", min_radius(f.r)}, {"sup_abs_U_tilde", max_norm(Ut)}});
    }
    return rows;
}

void mnv_evolve_level(Ctx &c)
{
    Report &rep = c.rep;
    const Realization R = realize(c.sc);
    const Grid2D &g = R.grid;
    require_doubly_periodic(g, "mnv-evolve");
    const Tol &t = c.tol;
    const double dt = c.sc.evolve.dt > 0 ? c.sc.evolve.dt : stable_dt(g);
    if (dt > stable_dt(g))
        throw ValidationError("evolve dt " + std::to_string(dt) + " exceeds the stability bound " +
                              std::to_string(stable_dt(g)));
    MnvState st = make_state(R.U);
    const double u0 = max_norm(st.U);
    double worst = constraint_residual(st.U, st.V);
    json series = json::array();
    series.push_back({{"step", 0}, {"t", st.t}, {"sup_abs_U", u0}});
    if (c.artifacts)
        dump_scalar(c, "U_step_00000", st.U);
    for (int k = 1; k <= c.sc.evolve.steps; ++k) {
        st = mnv_step(st, dt);
        worst = std::max(worst, constraint_residual(st.U, st.V));
        if (k % c.sc.evolve.snapshot_every == 0 || k == c.sc.evolve.steps) {
            series.push_back({{"step", k}, {"t", st.t}, {"sup_abs_U", max_norm(st.U)}});
            if (c.artifacts) {
                char name[32];
                std::snprintf(name, sizeof name, "U_step_%05d", k);
                dump_scalar(c, name, st.U);
            }
        }
    }
    rep.at_most("mnv_evolve.constraint", worst, t.spectral * std::max(1.0, u0));
    rep.at_most("mnv_evolve.growth", max_norm(st.U) / std::max(u0, 1e-300), 10.0);
    rep.data["dt"] = dt;
    rep.data["stability_constant"] = kStabilityConstant;
    rep.data["series"] = series;
    rep.data["grid"] = grid_json(g);
    if (c.sc.family == Family::TorusOfRevolution)
        rep.data["blowup_probe"] = blowup_probe(c.sc);
}

using LevelFn = std::function<void(Ctx &)>;

struct PipelineSpec {
    LevelFn fn;
    std::set<std::string> order_checks; // studied under refinement
};

const std::map<std::string, PipelineSpec> &pipelines()
{
    static const std::map<std::string, PipelineSpec> m = {
        {"surface", {surface_level, {"surface.r_error", "surface.dirac_residual", "surface.spinor_round_trip"}}},
        {"invert", {invert_level, {"invert.dual_path", "invert.inverted_spinor_residual"}}},
        {"moutard", {moutard_level, {"moutard.companion_residual"}}},
        {"floquet", {floquet_level, {}}},
        {"mnv-check", {mnv_check_level, {}}},
        {"mnv-evolve", {mnv_evolve_level, {}}},
    };
    return m;
}

} // namespace

nlohmann::json Check::to_json() const
{
    json j;
    j["name"] = name;
    j["value"] = value;
    j["relation"] = relation_name(relation);
    if (relation == Relation::Within)
        j["threshold"] = {threshold, threshold_hi};
    else
        j["threshold"] = threshold;
    j["pass"] = pass;
    return j;
}

void Report::add(Check c)
{
    if (find(c.name))
        throw std::logic_error("duplicate check " + c.name);
    switch (c.relation) {
    case Relation::AtMost:
        c.pass = c.value <= c.threshold;
        break;
    case Relation::AtLeast:
        c.pass = c.value >= c.threshold;
        break;
    case Relation::Within:
        c.pass = c.value >= c.threshold && c.value <= c.threshold_hi;
        break;
    }
    checks.push_back(std::move(c));
}

void Report::at_most(const std::string &name, double value, double threshold)
{
    add({name, value, threshold, 0, Relation::AtMost});
}

void Report::at_least(const std::string &name, double value, double threshold)
{
    add({name, value, threshold, 0, Relation::AtLeast});
}

void Report::within(const std::string &name, double value, double lo, double hi)
{
    add({name, value, lo, hi, Relation::Within});
}

const Check *Report::find(const std::string &name) const
{
    for (const Check &c : checks)
        if (c.name == name)
            return &c;
    return nullptr;
}

bool Report::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.pass; });
}

nlohmann::json Report::to_json() const
{
    json j;
    j["command"] = command;
    j["scenario"] = scenario.to_json();
    json cs = json::array();
    for (const Check &c : checks)
        cs.push_back(c.to_json());
    j["checks"] = cs;
    j["passed"] = passed();
    j["data"] = data;
    return j;
}

const std::vector<std::string> &pipeline_names()
{
    static const std::vector<std::string> names = {"surface", "invert", "moutard", "mnv-check", "mnv-evolve", "floquet"};
    return names;
}

Report run_pipeline(const std::string &command, const Scenario &scenario, const RunOptions &opt)
{
    const auto it = pipelines().find(command);
    if (it == pipelines().end())
        throw ValidationError("unknown pipeline '" + command + "'");
    if (opt.refine < 1)
        throw ValidationError("refine needs at least one level");
    Scenario sc = scenario;
    if (opt.tolerance_scale)
        sc.tol.scale = *opt.tolerance_scale;
    validate(sc);
    const fs::path out = opt.out ? *opt.out : fs::path(sc.output_dir);

    Report base;
    json table = json::array();
    std::vector<std::pair<double, Report>> levels;
    for (int l = 0; l < opt.refine; ++l) {
        const Scenario s = refined(sc, l);
        Report r;
        r.command = command;
        r.scenario = s;
        Ctx ctx{s, Tol(s), out, opt.write_artifacts && l == 0, r};
        it->second.fn(ctx);
        const double h = spacing(scenario_grid(s));
        json row;
        row["nx"] = s.nx;
        row["ny"] = s.ny;
        row["h"] = h;
        json vals;
        for (const Check &c : r.checks)
            vals[c.name] = {{"value", c.value}, {"pass", c.pass}};
        row["checks"] = vals;
        table.push_back(row);
        levels.emplace_back(h, std::move(r));
    }
    Report rep = levels.front().second;
    rep.scenario = sc;
    if (opt.refine > 1) {
        rep.data["convergence"] = table;
        const auto &[h0, r0] = levels[levels.size() - 2];
        const auto &[h1, r1] = levels.back();
        for (const std::string &name : it->second.order_checks) {
            const Check *a = r0.find(name), *b = r1.find(name);
            if (!a || !b)
                continue;
            // errors at rounding level carry no order information
            if (a->value <= 1e-10 * std::max(1.0, a->threshold / (h0 * h0)))
                continue;
            rep.within(name + ".order", std::log(a->value / b->value) / std::log(h0 / h1), 1.7, 2.3);
        }
    }
    return rep;
}

void write_report(const fs::path &dir, const Report &r, const nlohmann::json &metadata)
{
    fs::create_directories(dir);
    std::ofstream(dir / "report.json") << r.to_json().dump(2) << "\n";
    std::ofstream(dir / "metadata.json") << metadata.dump(2) << "\n";
}

nlohmann::json list_scenarios_json()
{
    json out = json::array();
    for (const Scenario &s : builtin_scenarios()) {
        json j = s.to_json();
        const Grid2D g = scenario_grid(s);
        j["periodic"] = {g.periodic_x(), g.periodic_y()};
        j["lambda1"] = {g.lambda1().real(), g.lambda1().imag()};
        j["lambda2"] = {g.lambda2().real(), g.lambda2().imag()};
        out.push_back(j);
    }
    return out;
}

int exit_code_for(const Report &r) { return r.passed() ? 0 : 1; }

int exit_code_for(const std::exception &e)
{
    if (dynamic_cast<const ConfigParseError *>(&e))
        return 2;
    if (dynamic_cast<const ValidationError *>(&e) || dynamic_cast<const UnsupportedGridError *>(&e))
        return 3;
    if (dynamic_cast<const SingularityError *>(&e) || dynamic_cast<const InstabilityError *>(&e))
        return 4;
    return 1;
}

} // namespace spinorsurf
