#include "spinorsurf/moebius.hpp"

namespace spinorsurf {

Vec3 invert_point(const Vec3 &v)
{
    const double r2 = norm2(v);
    if (!(r2 > 0))
        throw SingularityError("inversion of the origin");
    return -v / r2;
}

Vec3 invert_tangent(const Vec3 &x, const Vec3 &u)
{
    const double r2 = norm2(x);
    if (!(r2 > 0))
        throw SingularityError("inversion differential at the origin");
    return -u / r2 + (2.0 * dot(x, u) / (r2 * r2)) * x;
}

InvertedSurface invert_surface(const SurfaceFrame &s, Scheme sch)
{
    const Grid2D &g = s.r.grid();
    InvertedSurface out;
    SurfaceFrame &f = out.frame;
    f.r = Vec3Field(g);
    f.e_alpha = ScalarField(g);
    f.n = Vec3Field(g);
    f.branch.assign(g.size(), false);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const std::size_t k = g.index(i, j);
            const Vec3 r = s.r[k];
            const double r2 = norm2(r);
            if (std::sqrt(r2) < kOriginExclusion) {
                f.branch[k] = true;
                out.singular.push_back({i, j});
                continue;
            }
            f.r[k] = -r / r2;
            if (!s.branch.empty() && s.branch[k]) {
                f.branch[k] = true;
                continue;
            }
            f.e_alpha[k] = s.e_alpha[k] / r2;
            f.n[k] = -s.n[k] + (2.0 * dot(r, s.n[k]) / r2) * r;
        }
    f.U = potential_from_geometry(f, sch);
    f.H_mean = ScalarField(g);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (!f.branch[k])
            f.H_mean[k] = 2.0 * f.U[k] / f.e_alpha[k];
    return out;
}

ScalarField inverted_potential(const SurfaceFrame &s, std::vector<Node> *singular)
{
    const Grid2D &g = s.r.grid();
    ScalarField out(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const std::size_t k = g.index(i, j);
            const double r2 = norm2(s.r[k]);
            if (std::sqrt(r2) < kOriginExclusion || (!s.branch.empty() && s.branch[k])) {
                if (singular)
                    singular->push_back({i, j});
                continue;
            }
            out[k] = s.U[k] + s.e_alpha[k] * dot(s.r[k], s.n[k]) / r2;
        }
    return out;
}

InvertedSpinor inverted_spinor(const QuatField &psi0, const QuatField &S)
{
    if (!(psi0.grid() == S.grid()))
        throw DomainError("fields live on different grids");
    InvertedSpinor out{QuatField(psi0.grid(), Quat{}, psi0.wrap()), std::vector<bool>(psi0.size(), false)};
    for (std::size_t k = 0; k < psi0.size(); ++k) {
        try {
            out.psi[k] = psi0[k] * quat_inverse(S[k]);
        } catch (const SingularityError &) {
            out.singular[k] = true;
        }
    }
    return out;
}

ScalarField inverted_potential_matrix(const QuatField &psi0, const QuatField &S, const ScalarField &U,
                                      double *max_imag)
{
    if (!(psi0.grid() == S.grid()) || !(U.grid() == S.grid()))
        throw DomainError("fields live on different grids");
    const Mat2 G0 = gamma().matrix();
    ScalarField out(U.grid());
    double im = 0;
    for (std::size_t k = 0; k < U.size(); ++k) {
        const Mat2 P = psi0[k].matrix();
        const Mat2 G = P * S[k].matrix().inverse() * G0 * P.transpose();
        const cplx v = U[k] - I * G(1, 0);
        im = std::max(im, std::abs(v.imag()));
        out[k] = v.real();
    }
    if (max_imag)
        *max_imag = im;
    if (im > 1e-8 * std::max(1.0, max_norm(out)))
        throw ConstraintError("matrix form of the inverted potential is not real");
    return out;
}

InversionReport inversion_report(const SurfaceFrame &s, int margin, Scheme sch)
{
    InversionReport rep;
    rep.surface_in = s;
    InvertedSurface inv = invert_surface(s, sch);
    rep.surface_out = inv.frame;
    rep.singular = inv.singular;
    rep.U_formula = inverted_potential(s);
    rep.U_geometric = rep.surface_out.U;
    const Grid2D &g = s.r.grid();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (!g.periodic_x() && (i < margin || i >= g.nx() - margin))
                continue;
            if (!g.periodic_y() && (j < margin || j >= g.ny() - margin))
                continue;
            const std::size_t k = g.index(i, j);
            if (rep.surface_out.branch[k])
                continue;
            rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(rep.U_formula[k] - rep.U_geometric[k]));
        }
    return rep;
}

nlohmann::json InversionReport::to_json() const
{
    nlohmann::json j;
    j["max_discrepancy"] = max_discrepancy;
    j["max_abs_U_formula"] = max_norm(U_formula);
    j["max_abs_U_geometric"] = max_norm(U_geometric);
    nlohmann::json sing = nlohmann::json::array();
    for (const Node &p : singular)
        sing.push_back({p.i, p.j});
    j["singular_nodes"] = sing;
    return j;
}

} // namespace spinorsurf
