#include "spinorsurf/floquet.hpp"

#include <Eigen/Dense>

namespace spinorsurf {

FloquetSample floquet_sample(const SpinorField &psi)
{
    const Grid2D &g = psi.grid();
    if (!g.doubly_periodic())
        throw UnsupportedGridError("Floquet data needs a doubly periodic grid");
    FloquetSample s{psi, SpinorField(g), SpinorField(g)};
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            s.shifted1(i, j) = psi.at(i + g.nx(), j);
            s.shifted2(i, j) = psi.at(i, j + g.ny());
        }
    return s;
}

namespace {

double median(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    double hi = v[m];
    if (v.size() % 2 == 1)
        return hi;
    return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + m));
}

cplx median_ratio(const SpinorField &base, const SpinorField &shifted, double floor)
{
    std::vector<double> re, im;
    for (std::size_t k = 0; k < base.size(); ++k)
        for (int c = 0; c < 2; ++c) {
            const cplx a = ValueTraits<Spinor>::get(base[k], c);
            if (std::abs(a) < floor)
                continue;
            const cplx r = ValueTraits<Spinor>::get(shifted[k], c) / a;
            re.push_back(r.real());
            im.push_back(r.imag());
        }
    if (re.empty())
        throw NotFloquetError("spinor vanishes identically");
    return {median(re), median(im)};
}

} // namespace

double floquet_defect(const FloquetSample &s, cplx mu1, cplx mu2)
{
    const double scale = max_norm(s.values);
    if (scale == 0.0)
        return 0.0;
    double d = 0;
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        d = std::max(d, max_abs(s.shifted1[k] - mu1 * s.values[k]));
        d = std::max(d, max_abs(s.shifted2[k] - mu2 * s.values[k]));
    }
    return d / scale;
}

FloquetData estimate_multipliers(const FloquetSample &s)
{
    const Grid2D &g = s.values.grid();
    const double floor = 1e-3 * max_norm(s.values);
    FloquetData d;
    d.lambda1 = g.lambda1();
    d.lambda2 = g.lambda2();
    d.mu1 = median_ratio(s.values, s.shifted1, floor);
    d.mu2 = median_ratio(s.values, s.shifted2, floor);
    d.defect = floquet_defect(s, d.mu1, d.mu2);
    return d;
}

FloquetData floquet_multipliers(const FloquetSample &s)
{
    FloquetData d = estimate_multipliers(s);
    if (d.defect > kFloquetDefectThreshold)
        throw NotFloquetError("not a Floquet function: defect " + std::to_string(d.defect));
    return d;
}

FloquetData floquet_multipliers(const SpinorField &psi) { return floquet_multipliers(floquet_sample(psi)); }

FloquetFamily moutard_floquet_family(const SpinorField &psi, const QuatField &psi0, Node base, const Vec3 &x0)
{
    const Grid2D &g = psi.grid();
    if (!g.doubly_periodic())
        throw UnsupportedGridError("Floquet data needs a doubly periodic grid");
    const Quat C = su2_embed(x0).quat();
    const QuatField S = s_matrix(psi0, psi0, base, C);
    const std::array<QuatField, 2> Ss{s_matrix_shifted(psi0, psi0, base, 0, C),
                                      s_matrix_shifted(psi0, psi0, base, 1, C)};
    const SpinorField s = s_column(psi0, psi, base);
    const std::array<SpinorField, 2> ss{s_column_shifted(psi0, psi, base, 0), s_column_shifted(psi0, psi, base, 1)};

    FloquetFamily fam;
    const FloquetSample in = floquet_sample(psi);
    fam.particular = {SpinorField(g), SpinorField(g), SpinorField(g)};
    for (auto &q : fam.gauge)
        q = QuatField(g);
    const auto w0 = psi0.wrap();
    for (std::size_t k = 0; k < g.size(); ++k) {
        fam.gauge[0][k] = psi0[k] * quat_inverse(S[k]);
        fam.particular.values[k] = in.values[k] - fam.gauge[0][k].matrix() * s[k];
        for (int a = 0; a < 2; ++a) {
            fam.gauge[a + 1][k] = (w0[a].real() * psi0[k]) * quat_inverse(Ss[a][k]);
            const Spinor shifted = a == 0 ? in.shifted1[k] : in.shifted2[k];
            (a == 0 ? fam.particular.shifted1 : fam.particular.shifted2)[k] =
                shifted - fam.gauge[a + 1][k].matrix() * ss[a][k];
        }
    }
    return fam;
}

FloquetSample apply_gauge(const FloquetFamily &fam, const std::array<cplx, 2> &v)
{
    FloquetSample out = fam.particular;
    const Spinor col{v[0], v[1]};
    for (std::size_t k = 0; k < out.values.size(); ++k) {
        out.values[k] += fam.gauge[0][k].matrix() * col;
        out.shifted1[k] += fam.gauge[1][k].matrix() * col;
        out.shifted2[k] += fam.gauge[2][k].matrix() * col;
    }
    return out;
}

FloquetFix fix_floquet_representative(const FloquetFamily &fam, const FloquetData &target)
{
    const std::size_t n = fam.particular.values.size();
    Eigen::MatrixXcd M(4 * n, 2);
    Eigen::VectorXcd rhs(4 * n);
    const cplx mu[2] = {target.mu1, target.mu2};
    const SpinorField *sh[2] = {&fam.particular.shifted1, &fam.particular.shifted2};
    double gscale = 0;
    for (std::size_t k = 0; k < n; ++k)
        gscale = std::max(gscale, fam.gauge[0][k].frobenius());
    for (int a = 0; a < 2; ++a)
        for (std::size_t k = 0; k < n; ++k) {
            const Mat2 G = fam.gauge[a + 1][k].matrix() - mu[a] * fam.gauge[0][k].matrix();
            const Spinor r = (*sh[a])[k] - mu[a] * fam.particular.values[k];
            const std::size_t row = 4 * k + 2 * a;
            M(row, 0) = G(0, 0);
            M(row, 1) = G(0, 1);
            M(row + 1, 0) = G(1, 0);
            M(row + 1, 1) = G(1, 1);
            rhs(row) = -r.s1;
            rhs(row + 1) = -r.s2;
        }
    FloquetFix fix;
    // rows vanish when the gauge matrix already carries the target multipliers
    const double mmax = M.cwiseAbs().maxCoeff();
    if (mmax <= 1e-9 * std::max(gscale, 1e-300)) {
        fix.degenerate = true;
        fix.v = {0.0, 0.0};
    } else {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(M);
        cod.setThreshold(1e-9);
        const Eigen::VectorXcd v = cod.solve(rhs);
        fix.v = {v(0), v(1)};
        fix.degenerate = cod.rank() < 2;
    }
    fix.A = Quat(fix.v[0], -std::conj(fix.v[1]));
    fix.representative = apply_gauge(fam, fix.v);
    fix.defect = floquet_defect(fix.representative, target.mu1, target.mu2);
    fix.multipliers = estimate_multipliers(fix.representative);
    fix.accepted = fix.defect <= kFloquetDefectThreshold;
    return fix;
}

} // namespace spinorsurf
