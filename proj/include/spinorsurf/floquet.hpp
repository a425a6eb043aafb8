#pragma once

#include "spinorsurf/moutard.hpp"

namespace spinorsurf {

// a spinor on one fundamental domain together with its values at z + λ₁, z + λ₂
struct FloquetSample {
    SpinorField values, shifted1, shifted2;
};

// continuation by the field's own wrap law
FloquetSample floquet_sample(const SpinorField &psi);

// direct evaluation of fn at z, z + λ₁, z + λ₂
template <class Fn> FloquetSample floquet_sample(const Grid2D &g, Fn &&fn)
{
    if (!g.doubly_periodic())
        throw UnsupportedGridError("Floquet data needs a doubly periodic grid");
    FloquetSample s{SpinorField(g), SpinorField(g), SpinorField(g)};
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const cplx z = g.z(i, j);
            s.values(i, j) = fn(z);
            s.shifted1(i, j) = fn(z + g.lambda1());
            s.shifted2(i, j) = fn(z + g.lambda2());
        }
    return s;
}

struct FloquetData {
    cplx mu1 = 1.0, mu2 = 1.0;
    cplx lambda1 = 0.0, lambda2 = 0.0;
    double defect = 0; // max |ψ(z+λ_k) − μ_kψ(z)| / max|ψ|
};

inline constexpr double kFloquetDefectThreshold = 1e-6;

// componentwise median of ψ(z+λ_k)/ψ(z) over nodes with |ψ| ≥ 1e−3·max|ψ|
FloquetData estimate_multipliers(const FloquetSample &s);
// as estimate_multipliers, throws NotFloquetError when defect > 1e−6
FloquetData floquet_multipliers(const FloquetSample &s);
FloquetData floquet_multipliers(const SpinorField &psi);
// defect against prescribed multipliers
double floquet_defect(const FloquetSample &s, cplx mu1, cplx mu2);

// first column of the Moutard image and the gauge matrix Ψ̃₀ = Ψ₀S⁻¹, both
// with values continued to z + λ₁, z + λ₂ by extending the path integrals
struct FloquetFamily {
    FloquetSample particular;
    std::array<QuatField, 3> gauge; // at z, z+λ₁, z+λ₂
};
FloquetFamily moutard_floquet_family(const SpinorField &psi, const QuatField &psi0, Node base, const Vec3 &x0);

struct FloquetFix {
    FloquetSample representative;
    Quat A;                 // representative = particular + first column of Ψ̃₀·A
    std::array<cplx, 2> v{}; // first column of A
    double defect = 0;
    FloquetData multipliers;
    bool accepted = false;
    bool degenerate = false; // Ψ̃₀ itself already has the target multipliers
};
FloquetFix fix_floquet_representative(const FloquetFamily &family, const FloquetData &target);
// representative for an arbitrary first column v, for probing
FloquetSample apply_gauge(const FloquetFamily &family, const std::array<cplx, 2> &v);

} // namespace spinorsurf
