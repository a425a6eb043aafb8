#pragma once

#include "spinorsurf/weierstrass.hpp"

#include <json.hpp>

namespace spinorsurf {

inline constexpr double kOriginExclusion = 1e-8;

// T(x) = −x/|x|²
Vec3 invert_point(const Vec3 &v);
// differential of T at x applied to u
Vec3 invert_tangent(const Vec3 &x, const Vec3 &u);

struct InvertedSurface {
    SurfaceFrame frame;        // U recomputed geometrically on the image
    std::vector<Node> singular; // nodes with |r| < 1e−8, flagged as branch
};
InvertedSurface invert_surface(const SurfaceFrame &s, Scheme sch = Scheme::FiniteDifference);

// U + eᵅ⟨r, n⟩/|r|²; nodes near the origin get 0 and are listed
ScalarField inverted_potential(const SurfaceFrame &s, std::vector<Node> *singular = nullptr);

struct InvertedSpinor {
    QuatField psi;
    std::vector<bool> singular;
};
// Ψ₀S⁻¹
InvertedSpinor inverted_spinor(const QuatField &psi0, const QuatField &S);

// U − i·G₂₁ with G = Ψ₀S⁻¹ΓΨ₀ᵀ; throws ConstraintError if the imaginary
// part exceeds 1e−8·max(1, ‖U‖)
ScalarField inverted_potential_matrix(const QuatField &psi0, const QuatField &S, const ScalarField &U,
                                      double *max_imag = nullptr);

struct InversionReport {
    SurfaceFrame surface_in, surface_out;
    ScalarField U_formula, U_geometric;
    double max_discrepancy = 0;
    std::vector<Node> singular;

    nlohmann::json to_json() const;
};
// compares the closed-form inverted potential with the geometric one of the image, over nodes
// at least `margin` nodes away from non-periodic edges
InversionReport inversion_report(const SurfaceFrame &s, int margin = 0, Scheme sch = Scheme::FiniteDifference);

} // namespace spinorsurf
