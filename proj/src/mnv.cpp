#include "spinorsurf/mnv.hpp"

namespace spinorsurf {

Scheme default_scheme(const Grid2D &g) { return g.doubly_periodic() ? Scheme::Spectral : Scheme::FiniteDifference; }

namespace {

void require_periodic(const Grid2D &g)
{
    if (!g.doubly_periodic())
        throw UnsupportedGridError("the mNV layer needs a doubly periodic grid");
}

ComplexField square(const ScalarField &U)
{
    return map_field<cplx>(U, [](double u) { return cplx(u * u); });
}

ComplexField conj_field(const ComplexField &f)
{
    return map_field<cplx>(f, [](cplx v) { return std::conj(v); }, {std::conj(f.wrap()[0]), std::conj(f.wrap()[1])});
}

// coefficients shared by 𝒜 and ℬ
struct Coeffs {
    ComplexField U, V, Vb, Uz, Uzb, Uzz, Uzbzb, Vz, Vbzb;
};

Coeffs coefficients(const MnvState &st, Scheme s)
{
    Coeffs c;
    c.U = to_complex(st.U);
    c.V = st.V;
    c.Vb = conj_field(st.V);
    c.Uz = d_z(c.U, s);
    c.Uzb = d_zbar(c.U, s);
    c.Uzz = wirtinger(c.U, 2, 0, s);
    c.Uzbzb = wirtinger(c.U, 0, 2, s);
    c.Vz = d_z(c.V, s);
    c.Vbzb = d_zbar(c.Vb, s);
    return c;
}

template <class F> MatrixField columnwise(const MatrixField &psi, F &&apply)
{
    SpinorField c0(psi.grid(), Spinor{}, psi.wrap()), c1(psi.grid(), Spinor{}, psi.wrap());
    for (std::size_t k = 0; k < psi.size(); ++k) {
        c0[k] = {psi[k](0, 0), psi[k](1, 0)};
        c1[k] = {psi[k](0, 1), psi[k](1, 1)};
    }
    const SpinorField r0 = apply(c0), r1 = apply(c1);
    MatrixField out(psi.grid(), Mat2{}, psi.wrap());
    for (std::size_t k = 0; k < psi.size(); ++k)
        out[k] = Mat2(r0[k].s1, r1[k].s1, r0[k].s2, r1[k].s2);
    return out;
}

} // namespace

ComplexField solve_v(const ScalarField &U)
{
    require_periodic(U.grid());
    return solve_dbar(d_z(square(U), Scheme::Spectral));
}

MnvState make_state(const ScalarField &U, double t) { return {U, solve_v(U), t}; }

double constraint_residual(const ScalarField &U, const ComplexField &V, Scheme s)
{
    return max_diff(d_zbar(V, s), d_z(square(U), s));
}

ScalarField mnv_rhs(const MnvState &st, double *max_imag, double tol)
{
    const Grid2D &g = st.U.grid();
    require_periodic(g);
    const Scheme s = Scheme::Spectral;
    const double scale = std::max(1.0, max_norm(d_z(square(st.U), s)));
    const double res = constraint_residual(st.U, st.V, s);
    if (res > tol * scale)
        throw ConstraintError("V constraint violated: residual " + std::to_string(res));
    const ComplexField U = to_complex(st.U), Vb = conj_field(st.V);
    const ComplexField Uzzz = wirtinger(U, 3, 0, s), Uz = d_z(U, s), Vz = d_z(st.V, s);
    const ComplexField Ubbb = wirtinger(U, 0, 3, s), Ub = d_zbar(U, s), Vbb = d_zbar(Vb, s);
    ScalarField out(g);
    double im = 0;
    for (std::size_t k = 0; k < out.size(); ++k) {
        const cplx g1 = Uzzz[k] + 3.0 * Uz[k] * st.V[k] + 1.5 * U[k] * Vz[k];
        const cplx g2 = Ubbb[k] + 3.0 * Ub[k] * Vb[k] + 1.5 * U[k] * Vbb[k];
        const cplx v = g1 + g2;
        im = std::max(im, std::abs(v.imag()));
        out[k] = v.real();
    }
    if (max_imag)
        *max_imag = im;
    return out;
}

SpinorField a_apply(const SpinorField &psi, const MnvState &st, Scheme s)
{
    const Coeffs c = coefficients(st, s);
    const SpinorField d3 = wirtinger(psi, 3, 0, s), db3 = wirtinger(psi, 0, 3, s);
    const SpinorField dz = d_z(psi, s), dzb = d_zbar(psi, s);
    SpinorField out(psi.grid(), Spinor{}, psi.wrap());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const Spinor &p = psi[k], &a = dz[k], &b = dzb[k];
        const cplx U = c.U[k], V = c.V[k], Vb = c.Vb[k];
        Spinor r = d3[k] + db3[k];
        r.s1 += 3.0 * (V * a.s1) + 3.0 * (-c.Uzb[k] * b.s2) + 1.5 * (c.Vz[k] * p.s1 + 2.0 * U * Vb * p.s2);
        r.s2 += 3.0 * (c.Uz[k] * a.s1) + 3.0 * (Vb * b.s2) + 1.5 * (-2.0 * U * V * p.s1 + c.Vbzb[k] * p.s2);
        out[k] = r;
    }
    return out;
}

SpinorField b_apply(const SpinorField &psi, const MnvState &st, Scheme s)
{
    const Coeffs c = coefficients(st, s);
    const SpinorField dz = d_z(psi, s), dzb = d_zbar(psi, s);
    SpinorField out(psi.grid(), Spinor{}, psi.wrap());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const Spinor &p = psi[k], &a = dz[k], &b = dzb[k];
        const cplx V = c.V[k], Vb = c.Vb[k];
        Spinor r;
        r.s1 = 3.0 * (-V * a.s1) + 3.0 * (Vb * b.s1 + 2.0 * c.Uzb[k] * b.s2) +
               1.5 * ((c.Vbzb[k] - c.Vz[k]) * p.s1 + 2.0 * c.Uzbzb[k] * p.s2);
        r.s2 = 3.0 * (-2.0 * c.Uz[k] * a.s1 + V * a.s2) + 3.0 * (-Vb * b.s2) +
               1.5 * (-2.0 * c.Uzz[k] * p.s1 + (c.Vz[k] - c.Vbzb[k]) * p.s2);
        out[k] = r;
    }
    return out;
}

MatrixField a_apply(const MatrixField &psi, const MnvState &st, Scheme s)
{
    return columnwise(psi, [&](const SpinorField &c) { return a_apply(c, st, s); });
}

MatrixField b_apply(const MatrixField &psi, const MnvState &st, Scheme s)
{
    return columnwise(psi, [&](const SpinorField &c) { return b_apply(c, st, s); });
}

SpinorField a_apply(const SpinorField &psi, const MnvState &st) { return a_apply(psi, st, default_scheme(psi.grid())); }
SpinorField b_apply(const SpinorField &psi, const MnvState &st) { return b_apply(psi, st, default_scheme(psi.grid())); }

SpinorField dirac_apply(const SpinorField &psi, const ScalarField &U, Scheme s) { return dirac_residual(psi, U, s); }

SpinorField l_apply(const SpinorField &psi, const ScalarField &U, Scheme s)
{
    const SpinorField dz = d_z(psi, s), dzb = d_zbar(psi, s);
    SpinorField out(psi.grid(), Spinor{}, psi.wrap());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].s1 = dz[k].s1 - U[k] * psi[k].s2;
        out[k].s2 = U[k] * psi[k].s1 + dzb[k].s2;
    }
    return out;
}

double manakov_residual(const MnvState &st, const ScalarField &U_t, const SpinorField &psi)
{
    const Scheme s = default_scheme(psi.grid());
    const SpinorField Dpsi = dirac_apply(psi, st.U, s);
    const SpinorField DA = dirac_apply(a_apply(psi, st, s), st.U, s);
    const SpinorField AD = a_apply(Dpsi, st, s);
    const SpinorField BD = b_apply(Dpsi, st, s);
    double r = 0;
    for (std::size_t k = 0; k < psi.size(); ++k)
        r = std::max(r, max_abs(U_t[k] * psi[k] + DA[k] - AD[k] - BD[k]));
    return r;
}

namespace {

MatrixField as_matrix(const QuatField &q)
{
    return map_field<Mat2>(q, [](const Quat &v) { return v.matrix(); });
}

Mat2 T(const Mat2 &m) { return m.transpose(); }

Mat2 potential_block(cplx U, cplx V, cplx Ux)
{
    return {I * U * U - 3.0 * I * V, -I * Ux, -I * Ux, -I * U * U + 3.0 * I * std::conj(V)};
}

} // namespace

TimeForm omega_hat_form(const QuatField &Phi, const QuatField &Psi, const MnvState &st, Scheme s)
{
    TimeForm out;
    out.spatial = omega_form(Phi, Psi);
    const MatrixField F = as_matrix(Phi), P = as_matrix(Psi);
    const MatrixField Fy = partial(F, 0, 1, s), Fyy = partial(F, 0, 2, s);
    const MatrixField Py = partial(P, 0, 1, s), Pyy = partial(P, 0, 2, s);
    const ScalarField Ux = partial(st.U, 1, 0, s);
    const Mat2 s2 = pauli(2), s3 = pauli(3);
    const std::array<cplx, 2> w{F.wrap()[0] * P.wrap()[0], F.wrap()[1] * P.wrap()[1]};
    out.dt = MatrixField(F.grid(), Mat2{}, w);
    for (std::size_t k = 0; k < F.size(); ++k) {
        const double U = st.U[k];
        Mat2 m = I * (T(Fyy[k]) * s3 * P[k] + T(F[k]) * s3 * Pyy[k] - T(Fy[k]) * s3 * Py[k]);
        m += (2.0 * I * U) * (T(Fy[k]) * s2 * P[k] - T(F[k]) * s2 * Py[k]);
        m += T(F[k]) * potential_block(U, st.V[k], Ux[k]) * P[k];
        out.dt[k] = m;
    }
    return out;
}

MatrixField omega_hat_dt_z(const QuatField &Phi, const QuatField &Psi, const MnvState &st, Scheme s)
{
    const MatrixField F = as_matrix(Phi), P = as_matrix(Psi);
    const MatrixField Fz = d_z(F, s), Fb = d_zbar(F, s), Pz = d_z(P, s), Pb = d_zbar(P, s);
    const MatrixField Fzz = wirtinger(F, 2, 0, s), Fbb = wirtinger(F, 0, 2, s), Fzb = wirtinger(F, 1, 1, s);
    const MatrixField Pzz = wirtinger(P, 2, 0, s), Pbb = wirtinger(P, 0, 2, s), Pzb = wirtinger(P, 1, 1, s);
    const ComplexField U = to_complex(st.U);
    const ComplexField Uz = d_z(U, s), Ub = d_zbar(U, s);
    const Mat2 s2 = pauli(2), s3 = pauli(3);
    const std::array<cplx, 2> w{F.wrap()[0] * P.wrap()[0], F.wrap()[1] * P.wrap()[1]};
    MatrixField out(F.grid(), Mat2{}, w);
    for (std::size_t k = 0; k < F.size(); ++k) {
        const Mat2 Fd = T(Fz[k] - Fb[k]), Pd = Pz[k] - Pb[k];
        Mat2 m = (-I) * (T(Fzz[k] + Fbb[k] - 2.0 * Fzb[k]) * s3 * P[k] +
                         T(F[k]) * s3 * (Pzz[k] + Pbb[k] - 2.0 * Pzb[k]) - Fd * s3 * Pd);
        m -= (2.0 * st.U[k]) * (Fd * s2 * P[k] - T(F[k]) * s2 * Pd);
        m += T(F[k]) * potential_block(st.U[k], st.V[k], Uz[k] + Ub[k]) * P[k];
        out[k] = m;
    }
    return out;
}

QuatField m_matrix(const QuatField &psi0, Scheme s)
{
    const QuatField Py = partial(psi0, 0, 1, s);
    const Quat G = gamma(), Gi = gamma_inverse();
    QuatField out(psi0.grid());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = G * Py[k] * quat_inverse(psi0[k]) * Gi;
    return out;
}

MatrixField m_matrix_z(const QuatField &psi0, Scheme s)
{
    const MatrixField P = as_matrix(psi0);
    const MatrixField Pz = d_z(P, s), Pb = d_zbar(P, s);
    const Mat2 G = gamma().matrix(), Gi = gamma_inverse().matrix();
    MatrixField out(psi0.grid());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = I * (G * (Pz[k] - Pb[k]) * P[k].inverse() * Gi);
    return out;
}

ComplexField extended_moutard_v(const MnvState &st, const ScalarField &W, const ComplexField &a,
                                const ComplexField &b, const ComplexField &c)
{
    ComplexField out(st.V.grid());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = st.V[k] + 2.0 * st.U[k] * W[k] + a[k] * a[k] +
                 2.0 * (a[k] * std::conj(b[k]) - I * std::conj(c[k]) * W[k]);
    return out;
}

ExtendedMoutardData extended_moutard(const MnvState &st, const QuatField &psi0, const QuatField &S00)
{
    const Grid2D &g = st.U.grid();
    const Scheme s = default_scheme(g);
    ExtendedMoutardData d;
    const MoutardData md = moutard_potential(st.U, psi0, S00);
    d.W = md.W;
    d.U_tilde = md.U_tilde;
    d.K_shape = md.shape_defect;
    const MatrixField M = m_matrix_z(psi0, s);
    d.a = ComplexField(g);
    d.b = ComplexField(g);
    d.c = ComplexField(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        d.a[k] = md.K[k](0, 1);
        d.b[k] = M[k](0, 0);
        d.c[k] = M[k](0, 1);
        d.M_shape = std::max({d.M_shape, std::abs(M[k](1, 1) - std::conj(M[k](0, 0))),
                              std::abs(M[k](1, 0) + std::conj(M[k](0, 1)))});
    }
    d.V_tilde = extended_moutard_v(st, d.W, d.a, d.b, d.c);
    d.constraint = constraint_residual(d.U_tilde, d.V_tilde, s);
    return d;
}

double stable_dt(const Grid2D &g)
{
    const double h = std::min(g.hx(), g.hy());
    return kStabilityConstant * h * h * h;
}

MnvState mnv_step(const MnvState &st, double dt)
{
    const Grid2D &g = st.U.grid();
    require_periodic(g);
    if (std::abs(dt) > stable_dt(g) * (1 + 1e-12))
        throw DomainError("time step exceeds the stability bound " + std::to_string(stable_dt(g)));
    auto rhs = [](const ScalarField &U) { return mnv_rhs(make_state(U)); };
    auto axpy = [](const ScalarField &U, double a, const ScalarField &K) {
        ScalarField r = U;
        for (std::size_t k = 0; k < r.size(); ++k)
            r[k] += a * K[k];
        return r;
    };
    const ScalarField k1 = mnv_rhs(st);
    const ScalarField k2 = rhs(axpy(st.U, 0.5 * dt, k1));
    const ScalarField k3 = rhs(axpy(st.U, 0.5 * dt, k2));
    const ScalarField k4 = rhs(axpy(st.U, dt, k3));
    ScalarField U = st.U;
    for (std::size_t k = 0; k < U.size(); ++k) {
        U[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
        if (!std::isfinite(U[k]))
            throw InstabilityError("non-finite value after time step");
    }
    const double before = max_norm(st.U), after = max_norm(U);
    if (after > 10.0 * std::max(before, 1e-300) && after > 1e-12)
        throw InstabilityError("norm grew more than tenfold in one step");
    return make_state(U, st.t + dt);
}

} // namespace spinorsurf
