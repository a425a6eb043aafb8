#pragma once

#include "spinorsurf/moebius.hpp"

namespace spinorsurf {

// [[ψ₁, −ψ̄₂], [ψ₂, ψ̄₁]]; needs real multipliers
QuatField matrix_solution(const SpinorField &psi);
// the two columns as spinor fields
std::array<SpinorField, 2> columns(const QuatField &psi);
// max residual over both columns
double dirac_residual_matrix(const QuatField &psi, const ScalarField &U, Scheme s = Scheme::FiniteDifference);

// ω(Φ,Ψ) = −(i/2)(Φᵀσ₃Ψ + ΦᵀΨ) dz − (i/2)(Φᵀσ₃Ψ − ΦᵀΨ) dz̄
FormField<Mat2> omega_form(const QuatField &Phi, const QuatField &Psi);
// same with Ψ replaced by a single column
FormField<Spinor> omega_form(const QuatField &Phi, const SpinorField &psi);

// Γ∫ω + C along canonical paths from base; optional cell defect output
QuatField s_matrix(const QuatField &Phi, const QuatField &Psi, Node base, const Quat &constant = {},
                   double *closedness = nullptr);
// continued to z + λ_axis
QuatField s_matrix_shifted(const QuatField &Phi, const QuatField &Psi, Node base, int axis,
                           const Quat &constant = {});
// S(Ψ₀, ψ) for a single column, zero constant at base
SpinorField s_column(const QuatField &Phi, const SpinorField &psi, Node base);
SpinorField s_column_shifted(const QuatField &Phi, const SpinorField &psi, Node base, int axis);
// S(Ψ₀,Ψ₀) with constant su2_embed(x0), i.e. the surface gauge
QuatField s_matrix_surface(const QuatField &psi0, Node base, const Vec3 &x0, double *closedness = nullptr);

// ΨS⁻¹ΓΨᵀΓ⁻¹ in unconstrained matrix arithmetic
MatrixField k_matrix(const QuatField &psi0, const QuatField &S00);

struct MoutardData {
    QuatField psi0, S00;
    MatrixField K;
    ScalarField W, U_tilde;
    double max_imag_W = 0;
    double shape_defect = 0; // max(|K₂₂ + K₁₁|, |K₂₁ + conj K₁₂|)
};
// W = −i·K₁₁, Ũ = U + W; throws ConstraintError if Im W > 1e−8·max(1, |Ũ|)
MoutardData moutard_potential(const ScalarField &U, const QuatField &psi0, const QuatField &S00);

// Ψ − Ψ₀S⁻¹(Ψ₀,Ψ₀)S(Ψ₀,Ψ)
QuatField moutard_transform(const QuatField &Psi, const QuatField &psi0, const QuatField &S00, Node base);
// Ψ − Ψ̃₀·S(Ψ₀,Ψ), Ψ̃₀ = Ψ₀S⁻¹
QuatField moutard_transform_tilde(const QuatField &Psi, const QuatField &psi0_tilde, const QuatField &S0Psi);
SpinorField moutard_transform_column(const SpinorField &psi, const QuatField &psi0, const QuatField &S00, Node base);

// Ψ·A for constant A
QuatField right_multiply(const QuatField &Psi, const Quat &A);

} // namespace spinorsurf
