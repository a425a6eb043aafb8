#pragma once

#include "spinorsurf/grid.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace spinorsurf {

struct DiracData {
    SpinorField psi;
    ScalarField U;
};

struct SurfaceFrame {
    Vec3Field r;
    ScalarField e_alpha;
    Vec3Field n;
    ScalarField U;
    ScalarField H_mean;
    std::vector<bool> branch; // e_alpha below threshold; n, U, H unset there
    std::vector<std::string> warnings;
};

inline constexpr double kBranchThreshold = 1e-12;

// (∂ψ₂ + Uψ₁, −∂̄ψ₁ + Uψ₂)
SpinorField dirac_residual(const SpinorField &psi, const ScalarField &U, Scheme s = Scheme::FiniteDifference);
SpinorField dirac_residual(const DiracData &d, Scheme s = Scheme::FiniteDifference);

ScalarField conformal_factor(const SpinorField &psi);

struct NormalField {
    Vec3Field n;
    std::vector<bool> branch;
};
NormalField unit_normal(const SpinorField &psi, double threshold = kBranchThreshold);

// the three forms P_k dz + conj(P_k) dz̄ whose integrals are x¹, x², x³
std::array<FormField<cplx>, 3> weierstrass_forms(const SpinorField &psi);

SurfaceFrame integrate_surface(const SpinorField &psi, Node base, const Vec3 &x0,
                               PathOrder order = PathOrder::XThenY, Scheme s = Scheme::FiniteDifference);

// e^{−α}⟨r_zz̄, n⟩, branch nodes set to 0
ScalarField potential_from_geometry(const SurfaceFrame &s, Scheme sch = Scheme::FiniteDifference);
// frame with U (and H = 2U/eᵅ) taken from given Dirac potential
SurfaceFrame with_potential(SurfaceFrame s, const ScalarField &U);

// H from the first and second fundamental forms of r, oriented by s.n
ScalarField mean_curvature_fundamental_forms(const SurfaceFrame &s, Scheme sch = Scheme::FiniteDifference);

// frame filled from an immersion alone: e_alpha from 2⟨r_z, r_z̄⟩, n from r_x × r_y
SurfaceFrame frame_from_immersion(const Vec3Field &r, Scheme sch = Scheme::FiniteDifference);

struct RecoveryOptions {
    Scheme scheme = Scheme::FiniteDifference;
    double conformality_tol = -1; // <0: 1e−6 (spectral) or max(1e−6, 5h²) (FD)
};
struct SpinorRecovery {
    SpinorField psi;
    std::vector<bool> branch;
    double conformality_residual = 0; // max |Σ(x^k_z)²| / e^{2α}
};
// square roots of ψ₁² = −i x¹_z − x²_z, ψ̄₂² = −i x¹_z + x²_z with ψ₁ψ̄₂ = x³_z;
// global sign fixed at base (principal root of the larger component) and
// continued along the canonical scan
SpinorRecovery spinor_from_surface(const SurfaceFrame &s, Node base, RecoveryOptions opt = {});

// 2⟨r_z, r_z̄⟩
ScalarField metric_from_immersion(const Vec3Field &r, Scheme sch = Scheme::FiniteDifference);

void write_surface_obj(const std::filesystem::path &path, const SurfaceFrame &s);

// components of a real vector field as complex scalar fields
std::array<ComplexField, 3> split(const Vec3Field &r);

// ½(max|f_xxx| + max|f_yyy|) over components; truncation scale of the
// centered stencils
template <class T> double third_derivative_scale(const Field<T> &f)
{
    const double a = max_norm(partial(f, 3, 0)), b = max_norm(partial(f, 0, 3));
    return 0.5 * (a + b);
}

} // namespace spinorsurf
