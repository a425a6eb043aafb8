#include "spinorsurf/weierstrass.hpp"
#include "spinorsurf/io.hpp"

namespace spinorsurf {

SpinorField dirac_residual(const SpinorField &psi, const ScalarField &U, Scheme s)
{
    if (!(psi.grid() == U.grid()))
        throw DomainError("spinor and potential live on different grids");
    const SpinorField dz = d_z(psi, s), dzb = d_zbar(psi, s);
    SpinorField out(psi.grid(), Spinor{}, psi.wrap());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].s1 = dz[k].s2 + U[k] * psi[k].s1;
        out[k].s2 = -dzb[k].s1 + U[k] * psi[k].s2;
    }
    return out;
}

SpinorField dirac_residual(const DiracData &d, Scheme s) { return dirac_residual(d.psi, d.U, s); }

ScalarField conformal_factor(const SpinorField &psi)
{
    return map_field<double>(psi, [](const Spinor &v) { return std::norm(v.s1) + std::norm(v.s2); }, {1.0, 1.0});
}

NormalField unit_normal(const SpinorField &psi, double threshold)
{
    NormalField out{Vec3Field(psi.grid()), std::vector<bool>(psi.size(), false)};
    for (std::size_t k = 0; k < psi.size(); ++k) {
        const cplx p1 = psi[k].s1, p2 = psi[k].s2;
        const double ea = std::norm(p1) + std::norm(p2);
        if (!(ea >= threshold)) {
            out.branch[k] = true;
            continue;
        }
        const cplx w = p1 * p2;
        out.n[k] = Vec3{-2.0 * w.imag(), -2.0 * w.real(), std::norm(p2) - std::norm(p1)} / ea;
    }
    return out;
}

std::array<FormField<cplx>, 3> weierstrass_forms(const SpinorField &psi)
{
    const auto w = psi.wrap();
    std::array<cplx, 2> wq{}, wm{};
    for (int a = 0; a < 2; ++a) {
        wq[a] = w[a] * w[a];
        if (std::abs(wq[a] - std::conj(wq[a])) > 1e-12 || std::abs(std::abs(w[a]) - 1.0) > 1e-12)
            throw UnsupportedGridError("spinor multipliers do not give quasi-periodic Weierstrass forms");
        wq[a] = wq[a].real();
        wm[a] = 1.0;
    }
    std::array<FormField<cplx>, 3> f;
    for (auto &x : f)
        x = {ComplexField(psi.grid(), 0.0, wq), ComplexField(psi.grid(), 0.0, wq)};
    f[2].P.set_wrap(wm);
    f[2].Q.set_wrap(wm);
    for (std::size_t k = 0; k < psi.size(); ++k) {
        const cplx a = psi[k].s1 * psi[k].s1, b = std::conj(psi[k].s2) * std::conj(psi[k].s2);
        const cplx P[3] = {0.5 * I * (a + b), 0.5 * (b - a), psi[k].s1 * std::conj(psi[k].s2)};
        for (int c = 0; c < 3; ++c) {
            f[c].P[k] = P[c];
            f[c].Q[k] = std::conj(P[c]);
        }
    }
    return f;
}

std::array<ComplexField, 3> split(const Vec3Field &r)
{
    std::array<ComplexField, 3> out;
    for (int c = 0; c < 3; ++c)
        out[c] = map_field<cplx>(r, [c](const Vec3 &v) { return cplx(v[c]); }, r.wrap());
    return out;
}

SurfaceFrame integrate_surface(const SpinorField &psi, Node base, const Vec3 &x0, PathOrder order, Scheme s)
{
    const Grid2D &g = psi.grid();
    SurfaceFrame f;
    const auto forms = weierstrass_forms(psi);
    f.r = Vec3Field(g);
    double imag = 0;
    for (int c = 0; c < 3; ++c) {
        const ComplexField xc = integrate_canonical(forms[c], base, order);
        for (std::size_t k = 0; k < xc.size(); ++k) {
            f.r[k][c] = xc[k].real() + x0[c];
            imag = std::max(imag, std::abs(xc[k].imag()));
        }
    }
    if (imag > 1e-10 * std::max(1.0, max_norm(f.r)))
        f.warnings.push_back("coordinate integrals have imaginary parts up to " + std::to_string(imag));
    {
        // closed forms have loop defects far below h²·|ψ|² per cell
        const double psi2 = std::pow(max_norm(psi), 2);
        double d = 0;
        for (const auto &fm : forms)
            d = std::max(d, closedness_defect(fm).max());
        if (psi2 > 0 && d > 0.1 * psi2 * g.hx() * g.hy())
            f.warnings.push_back("Weierstrass forms are not closed: cell defect " + std::to_string(d));
    }
    f.e_alpha = conformal_factor(psi);
    auto nf = unit_normal(psi);
    f.n = std::move(nf.n);
    f.branch = std::move(nf.branch);
    f.U = potential_from_geometry(f, s);
    f.H_mean = ScalarField(g);
    for (std::size_t k = 0; k < f.U.size(); ++k)
        if (!f.branch[k])
            f.H_mean[k] = 2.0 * f.U[k] / f.e_alpha[k];
    return f;
}

ScalarField potential_from_geometry(const SurfaceFrame &s, Scheme sch)
{
    const Grid2D &g = s.r.grid();
    const auto comps = split(s.r);
    std::array<ComplexField, 3> lap;
    for (int c = 0; c < 3; ++c)
        lap[c] = wirtinger(comps[c], 1, 1, sch);
    ScalarField U(g);
    for (std::size_t k = 0; k < U.size(); ++k) {
        if (!s.branch.empty() && s.branch[k])
            continue;
        const Vec3 rzz{lap[0][k].real(), lap[1][k].real(), lap[2][k].real()};
        U[k] = dot(rzz, s.n[k]) / s.e_alpha[k];
    }
    return U;
}

SurfaceFrame with_potential(SurfaceFrame s, const ScalarField &U)
{
    s.U = U;
    for (std::size_t k = 0; k < U.size(); ++k)
        s.H_mean[k] = (!s.branch.empty() && s.branch[k]) ? 0.0 : 2.0 * U[k] / s.e_alpha[k];
    return s;
}

ScalarField mean_curvature_fundamental_forms(const SurfaceFrame &s, Scheme sch)
{
    const Vec3Field rx = partial(s.r, 1, 0, sch), ry = partial(s.r, 0, 1, sch);
    const Vec3Field rxx = partial(s.r, 2, 0, sch), rxy = partial(s.r, 1, 1, sch), ryy = partial(s.r, 0, 2, sch);
    ScalarField H(s.r.grid());
    for (std::size_t k = 0; k < H.size(); ++k) {
        if (!s.branch.empty() && s.branch[k])
            continue;
        const double E = dot(rx[k], rx[k]), F = dot(rx[k], ry[k]), G = dot(ry[k], ry[k]);
        const double L = dot(rxx[k], s.n[k]), M = dot(rxy[k], s.n[k]), N = dot(ryy[k], s.n[k]);
        H[k] = (E * N - 2.0 * F * M + G * L) / (2.0 * (E * G - F * F));
    }
    return H;
}

ScalarField metric_from_immersion(const Vec3Field &r, Scheme sch)
{
    const auto comps = split(r);
    std::array<ComplexField, 3> rz;
    for (int c = 0; c < 3; ++c)
        rz[c] = d_z(comps[c], sch);
    ScalarField m(r.grid());
    for (std::size_t k = 0; k < m.size(); ++k)
        m[k] = 2.0 * (std::norm(rz[0][k]) + std::norm(rz[1][k]) + std::norm(rz[2][k]));
    return m;
}

SurfaceFrame frame_from_immersion(const Vec3Field &r, Scheme sch)
{
    const Grid2D &g = r.grid();
    SurfaceFrame f;
    f.r = r;
    const ScalarField e2 = metric_from_immersion(r, sch);
    const Vec3Field rx = partial(r, 1, 0, sch), ry = partial(r, 0, 1, sch);
    f.e_alpha = ScalarField(g);
    f.n = Vec3Field(g);
    f.branch.assign(g.size(), false);
    for (std::size_t k = 0; k < f.e_alpha.size(); ++k) {
        f.e_alpha[k] = std::sqrt(std::max(e2[k], 0.0));
        const Vec3 c = cross(rx[k], ry[k]);
        if (f.e_alpha[k] < kBranchThreshold || norm(c) == 0.0) {
            f.branch[k] = true;
            continue;
        }
        f.n[k] = c / norm(c);
    }
    f.U = potential_from_geometry(f, sch);
    f.H_mean = ScalarField(g);
    for (std::size_t k = 0; k < f.U.size(); ++k)
        if (!f.branch[k])
            f.H_mean[k] = 2.0 * f.U[k] / f.e_alpha[k];
    return f;
}

namespace {

using Pair = std::array<cplx, 2>; // (ψ₁, ψ̄₂)

double dist2(const Pair &a, const Pair &b) { return std::norm(a[0] - b[0]) + std::norm(a[1] - b[1]); }

Pair candidate(cplx A, cplx B, cplx C)
{
    if (std::abs(A) >= std::abs(B)) {
        const cplx p = std::sqrt(A);
        return {p, p == cplx(0) ? std::sqrt(B) : C / p};
    }
    const cplx q = std::sqrt(B);
    return {C / q, q};
}

Pair align(const Pair &c, const Pair &pred)
{
    const Pair m{-c[0], -c[1]};
    return dist2(c, pred) <= dist2(m, pred) ? c : m;
}

Pair extrapolate(const Pair &a, const Pair &b) // a = previous, b = one before
{
    return {2.0 * a[0] - b[0], 2.0 * a[1] - b[1]};
}

} // namespace

SpinorRecovery spinor_from_surface(const SurfaceFrame &s, Node base, RecoveryOptions opt)
{
    const Grid2D &g = s.r.grid();
    if (!g.contains(base))
        throw DomainError("base node outside grid");
    const auto comps = split(s.r);
    std::array<ComplexField, 3> rz;
    for (int c = 0; c < 3; ++c)
        rz[c] = d_z(comps[c], opt.scheme);

    double tol = opt.conformality_tol;
    if (tol < 0) {
        const double h = std::max(g.hx(), g.hy());
        tol = opt.scheme == Scheme::Spectral ? 1e-6 : std::max(1e-6, 5.0 * h * h);
    }

    SpinorRecovery out;
    out.branch.assign(g.size(), false);
    std::vector<Pair> cand(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const cplx x1 = rz[0][k], x2 = rz[1][k], x3 = rz[2][k];
        const double e2 = 2.0 * (std::norm(x1) + std::norm(x2) + std::norm(x3));
        if (e2 < kBranchThreshold * kBranchThreshold) {
            out.branch[k] = true;
            continue;
        }
        out.conformality_residual = std::max(out.conformality_residual, std::abs(x1 * x1 + x2 * x2 + x3 * x3) / e2);
        cand[k] = candidate(-I * x1 - x2, -I * x1 + x2, x3);
    }
    if (out.conformality_residual > tol)
        throw ConformalityError("immersion is not conformal: residual " + std::to_string(out.conformality_residual));

    std::vector<Pair> val(g.size());
    std::vector<bool> done(g.size(), false);
    auto fix = [&](int i, int j, const Pair &pred) {
        const std::size_t k = g.index(i, j);
        val[k] = out.branch[k] ? Pair{0.0, 0.0} : align(cand[k], pred);
        done[k] = true;
    };
    auto predict = [&](std::size_t a, std::size_t b, bool have_b) {
        if (have_b && !out.branch[a] && !out.branch[b])
            return extrapolate(val[a], val[b]);
        return val[a];
    };

    // base node: principal root of the larger component
    {
        const std::size_t k = g.index(base.i, base.j);
        if (out.branch[k])
            throw SingularityError("base node is a branch point");
        val[k] = cand[k];
        done[k] = true;
    }
    // base row, both directions
    for (int dir : {1, -1})
        for (int i = base.i + dir; i >= 0 && i < g.nx(); i += dir) {
            const std::size_t a = g.index(i - dir, base.j);
            const bool hb = (i - 2 * dir) >= 0 && (i - 2 * dir) < g.nx();
            const std::size_t b = hb ? g.index(i - 2 * dir, base.j) : a;
            fix(i, base.j, predict(a, b, hb));
        }
    // columns
    for (int i = 0; i < g.nx(); ++i)
        for (int dir : {1, -1})
            for (int j = base.j + dir; j >= 0 && j < g.ny(); j += dir) {
                const std::size_t a = g.index(i, j - dir);
                const bool hb = (j - 2 * dir) >= 0 && (j - 2 * dir) < g.ny();
                const std::size_t b = hb ? g.index(i, j - 2 * dir) : a;
                fix(i, j, predict(a, b, hb));
            }

    // wrap signs across periodic seams
    std::array<cplx, 2> wrap{1.0, 1.0};
    if (g.periodic_x()) {
        const Pair pred = extrapolate(val[g.index(g.nx() - 1, base.j)], val[g.index(g.nx() - 2, base.j)]);
        const Pair v0 = val[g.index(0, base.j)];
        wrap[0] = dist2(v0, pred) <= dist2({-v0[0], -v0[1]}, pred) ? 1.0 : -1.0;
    }
    if (g.periodic_y()) {
        const Pair pred = extrapolate(val[g.index(base.i, g.ny() - 1)], val[g.index(base.i, g.ny() - 2)]);
        const Pair v0 = val[g.index(base.i, 0)];
        wrap[1] = dist2(v0, pred) <= dist2({-v0[0], -v0[1]}, pred) ? 1.0 : -1.0;
    }
    out.psi = SpinorField(g, Spinor{}, wrap);
    for (std::size_t k = 0; k < g.size(); ++k)
        out.psi[k] = {val[k][0], std::conj(val[k][1])};
    return out;
}

void write_surface_obj(const std::filesystem::path &path, const SurfaceFrame &s)
{
    write_obj(path, s.r, s.branch);
}

} // namespace spinorsurf
