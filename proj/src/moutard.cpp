#include "spinorsurf/moutard.hpp"

namespace spinorsurf {

namespace {

double real_wrap(cplx w)
{
    if (std::abs(w.imag()) > 1e-14)
        throw DomainError("matrix solutions need real multipliers; use the column form");
    return w.real();
}

const Mat2 &sigma3()
{
    static const Mat2 s = pauli(3);
    return s;
}

} // namespace

QuatField matrix_solution(const SpinorField &psi)
{
    const auto w = psi.wrap();
    QuatField out(psi.grid(), Quat{}, {real_wrap(w[0]), real_wrap(w[1])});
    for (std::size_t k = 0; k < psi.size(); ++k)
        out[k] = Quat(psi[k].s1, -std::conj(psi[k].s2));
    return out;
}

std::array<SpinorField, 2> columns(const QuatField &psi)
{
    std::array<SpinorField, 2> out{SpinorField(psi.grid(), Spinor{}, psi.wrap()),
                                   SpinorField(psi.grid(), Spinor{}, psi.wrap())};
    for (std::size_t k = 0; k < psi.size(); ++k) {
        const Quat &q = psi[k];
        out[0][k] = {q.a(), -std::conj(q.b())};
        out[1][k] = {q.b(), std::conj(q.a())};
    }
    return out;
}

double dirac_residual_matrix(const QuatField &psi, const ScalarField &U, Scheme s)
{
    const auto cols = columns(psi);
    return std::max(max_norm(dirac_residual(cols[0], U, s)), max_norm(dirac_residual(cols[1], U, s)));
}

FormField<Mat2> omega_form(const QuatField &Phi, const QuatField &Psi)
{
    if (!(Phi.grid() == Psi.grid()))
        throw DomainError("fields live on different grids");
    const std::array<cplx, 2> w{Phi.wrap()[0] * Psi.wrap()[0], Phi.wrap()[1] * Psi.wrap()[1]};
    FormField<Mat2> f{MatrixField(Phi.grid(), Mat2{}, w), MatrixField(Phi.grid(), Mat2{}, w)};
    for (std::size_t k = 0; k < Phi.size(); ++k) {
        const Mat2 Pt = Phi[k].matrix().transpose(), Q = Psi[k].matrix();
        const Mat2 a = Pt * sigma3() * Q, b = Pt * Q;
        f.P[k] = (-0.5 * I) * (a + b);
        f.Q[k] = (-0.5 * I) * (a - b);
    }
    return f;
}

FormField<Spinor> omega_form(const QuatField &Phi, const SpinorField &psi)
{
    if (!(Phi.grid() == psi.grid()))
        throw DomainError("fields live on different grids");
    const std::array<cplx, 2> w{Phi.wrap()[0] * psi.wrap()[0], Phi.wrap()[1] * psi.wrap()[1]};
    FormField<Spinor> f{SpinorField(Phi.grid(), Spinor{}, w), SpinorField(Phi.grid(), Spinor{}, w)};
    for (std::size_t k = 0; k < Phi.size(); ++k) {
        const Mat2 Pt = Phi[k].matrix().transpose();
        const Spinor a = Pt * (sigma3() * psi[k]), b = Pt * psi[k];
        f.P[k] = (-0.5 * I) * (a + b);
        f.Q[k] = (-0.5 * I) * (a - b);
    }
    return f;
}

namespace {

QuatField gamma_times(const MatrixField &F, const Quat &constant)
{
    const Mat2 G = gamma().matrix();
    QuatField S(F.grid());
    for (std::size_t k = 0; k < F.size(); ++k)
        S[k] = Quat::project(G * F[k]) + constant;
    return S;
}

SpinorField gamma_times(const SpinorField &F)
{
    const Mat2 G = gamma().matrix();
    SpinorField S(F.grid());
    for (std::size_t k = 0; k < F.size(); ++k)
        S[k] = G * F[k];
    return S;
}

} // namespace

QuatField s_matrix(const QuatField &Phi, const QuatField &Psi, Node base, const Quat &constant, double *closedness)
{
    const auto w = omega_form(Phi, Psi);
    if (closedness)
        *closedness = closedness_defect(w).max();
    return gamma_times(integrate_canonical(w, base), constant);
}

QuatField s_matrix_shifted(const QuatField &Phi, const QuatField &Psi, Node base, int axis, const Quat &constant)
{
    return gamma_times(integrate_canonical_shifted(omega_form(Phi, Psi), base, axis), constant);
}

SpinorField s_column(const QuatField &Phi, const SpinorField &psi, Node base)
{
    return gamma_times(integrate_canonical(omega_form(Phi, psi), base));
}

SpinorField s_column_shifted(const QuatField &Phi, const SpinorField &psi, Node base, int axis)
{
    return gamma_times(integrate_canonical_shifted(omega_form(Phi, psi), base, axis));
}

QuatField s_matrix_surface(const QuatField &psi0, Node base, const Vec3 &x0, double *closedness)
{
    return s_matrix(psi0, psi0, base, su2_embed(x0).quat(), closedness);
}

MatrixField k_matrix(const QuatField &psi0, const QuatField &S00)
{
    if (!(psi0.grid() == S00.grid()))
        throw DomainError("fields live on different grids");
    const Mat2 G = gamma().matrix(), Gi = gamma_inverse().matrix();
    MatrixField K(psi0.grid());
    for (std::size_t k = 0; k < K.size(); ++k) {
        const Mat2 P = psi0[k].matrix();
        K[k] = P * S00[k].matrix().inverse() * G * P.transpose() * Gi;
    }
    return K;
}

MoutardData moutard_potential(const ScalarField &U, const QuatField &psi0, const QuatField &S00)
{
    MoutardData d;
    d.psi0 = psi0;
    d.S00 = S00;
    d.K = k_matrix(psi0, S00);
    d.W = ScalarField(U.grid());
    d.U_tilde = ScalarField(U.grid());
    for (std::size_t k = 0; k < U.size(); ++k) {
        const Mat2 &K = d.K[k];
        const cplx W = -I * K(0, 0);
        d.max_imag_W = std::max(d.max_imag_W, std::abs(W.imag()));
        d.shape_defect = std::max({d.shape_defect, std::abs(K(1, 1) + K(0, 0)), std::abs(K(1, 0) + std::conj(K(0, 1)))});
        d.W[k] = W.real();
        d.U_tilde[k] = U[k] + W.real();
    }
    if (d.max_imag_W > 1e-8 * std::max(1.0, max_norm(d.U_tilde)))
        throw ConstraintError("Moutard potential is not real");
    return d;
}

QuatField moutard_transform(const QuatField &Psi, const QuatField &psi0, const QuatField &S00, Node base)
{
    const QuatField S0Psi = s_matrix(psi0, Psi, base);
    QuatField out(Psi.grid());
    for (std::size_t k = 0; k < Psi.size(); ++k)
        out[k] = Psi[k] - psi0[k] * (quat_inverse(S00[k]) * S0Psi[k]);
    return out;
}

QuatField moutard_transform_tilde(const QuatField &Psi, const QuatField &psi0_tilde, const QuatField &S0Psi)
{
    QuatField out(Psi.grid());
    for (std::size_t k = 0; k < Psi.size(); ++k)
        out[k] = Psi[k] - psi0_tilde[k] * S0Psi[k];
    return out;
}

SpinorField moutard_transform_column(const SpinorField &psi, const QuatField &psi0, const QuatField &S00, Node base)
{
    const SpinorField s = s_column(psi0, psi, base);
    SpinorField out(psi.grid());
    for (std::size_t k = 0; k < psi.size(); ++k)
        out[k] = psi[k] - (psi0[k] * quat_inverse(S00[k])).matrix() * s[k];
    return out;
}

QuatField right_multiply(const QuatField &Psi, const Quat &A)
{
    QuatField out(Psi.grid(), Quat{}, Psi.wrap());
    for (std::size_t k = 0; k < Psi.size(); ++k)
        out[k] = Psi[k] * A;
    return out;
}

} // namespace spinorsurf
