#pragma once

#include "spinorsurf/moutard.hpp"

namespace spinorsurf {

struct MnvState {
    ScalarField U;
    ComplexField V;
    double t = 0;
};

inline constexpr double kStabilityConstant = 0.1;

// spectral on doubly periodic grids, FD otherwise
Scheme default_scheme(const Grid2D &g);

// V = solve_dbar((U²)_z); doubly periodic grids only
ComplexField solve_v(const ScalarField &U);
MnvState make_state(const ScalarField &U, double t = 0);
// max |V_z̄ − (U²)_z|
double constraint_residual(const ScalarField &U, const ComplexField &V, Scheme s = Scheme::Spectral);

// (U_zzz + 3U_zV + (3/2)UV_z) + (U_z̄z̄z̄ + 3U_z̄V̄ + (3/2)UV̄_z̄); throws
// ConstraintError if the V-constraint residual exceeds tol·max(1, |(U²)_z|)
ScalarField mnv_rhs(const MnvState &st, double *max_imag = nullptr, double tol = 1e-8);

SpinorField a_apply(const SpinorField &psi, const MnvState &st, Scheme s);
SpinorField b_apply(const SpinorField &psi, const MnvState &st, Scheme s);
MatrixField a_apply(const MatrixField &psi, const MnvState &st, Scheme s);
MatrixField b_apply(const MatrixField &psi, const MnvState &st, Scheme s);
SpinorField a_apply(const SpinorField &psi, const MnvState &st);
SpinorField b_apply(const SpinorField &psi, const MnvState &st);

// [[U, ∂], [−∂̄, U]] ψ and [[∂, −U], [U, ∂̄]] ψ
SpinorField dirac_apply(const SpinorField &psi, const ScalarField &U, Scheme s);
SpinorField l_apply(const SpinorField &psi, const ScalarField &U, Scheme s);

// sup-norm of (𝒟_t + 𝒟𝒜 − 𝒜𝒟 − ℬ𝒟)ψ with 𝒟_t = U_t·id
double manakov_residual(const MnvState &st, const ScalarField &U_t, const SpinorField &psi);

struct TimeForm {
    FormField<Mat2> spatial; // ω(Φ,Ψ)
    MatrixField dt;          // dt coefficient
};
// dt coefficient written with y-derivatives
TimeForm omega_hat_form(const QuatField &Phi, const QuatField &Psi, const MnvState &st, Scheme s);
// dt coefficient written with Wirtinger derivatives
MatrixField omega_hat_dt_z(const QuatField &Phi, const QuatField &Psi, const MnvState &st, Scheme s);

// ΓΨ_yΨ⁻¹Γ⁻¹
QuatField m_matrix(const QuatField &psi0, Scheme s);
// iΓ(Ψ_z − Ψ_z̄)Ψ⁻¹Γ⁻¹ in unconstrained arithmetic
MatrixField m_matrix_z(const QuatField &psi0, Scheme s);

// V + 2UW + a² + 2(a b̄ − i c̄ W)
ComplexField extended_moutard_v(const MnvState &st, const ScalarField &W, const ComplexField &a,
                                const ComplexField &b, const ComplexField &c);

struct ExtendedMoutardData {
    ScalarField W, U_tilde;
    ComplexField a, b, c, V_tilde;
    double K_shape = 0, M_shape = 0;
    double constraint = 0; // ‖Ṽ_z̄ − (Ũ²)_z‖
};
ExtendedMoutardData extended_moutard(const MnvState &st, const QuatField &psi0, const QuatField &S00);

double stable_dt(const Grid2D &g);
// classical RK4 for U, V re-solved at every stage; throws DomainError above
// the stability bound and InstabilityError on growth > 10× or non-finite values
MnvState mnv_step(const MnvState &st, double dt);

} // namespace spinorsurf
