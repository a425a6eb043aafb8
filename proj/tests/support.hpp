#pragma once

#include "spinorsurf/algebra.hpp"
#include "spinorsurf/grid.hpp"

#include <cstdint>
#include <random>

namespace testgen {

using spinorsurf::cplx;

// seeded generator; every suite gets its own fixed stream
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double real(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    cplx complex(double s = 1.0) { return {real(-s, s), real(-s, s)}; }

    spinorsurf::Vec3 vec3(double s = 1.0) { return {real(-s, s), real(-s, s), real(-s, s)}; }
    spinorsurf::Vec3 nonzero_vec3(double s = 1.0)
    {
        for (;;) {
            const auto v = vec3(s);
            if (spinorsurf::norm(v) > 1e-3 * s)
                return v;
        }
    }
    spinorsurf::Quat quat(double s = 1.0) { return {complex(s), complex(s)}; }
    spinorsurf::Mat2 mat2(double s = 1.0) { return {complex(s), complex(s), complex(s), complex(s)}; }
    spinorsurf::Spinor spinor(double s = 1.0) { return {complex(s), complex(s)}; }

    // small integer-valued coordinates, so products are exact in floating point
    spinorsurf::Vec3 lattice_vec3(int r = 9)
    {
        return {double(integer(-r, r)), double(integer(-r, r)), double(integer(-r, r))};
    }

private:
    std::mt19937_64 rng_;
};

inline double rel(double a, double b) { return std::abs(a - b) / std::max({1e-300, std::abs(a), std::abs(b)}); }

inline double vdist(const spinorsurf::Vec3 &a, const spinorsurf::Vec3 &b) { return spinorsurf::norm(a - b); }

inline double sdist(const spinorsurf::Spinor &a, const spinorsurf::Spinor &b)
{
    return spinorsurf::max_abs(a - b);
}

// interior maximum of a field, skipping `m` nodes at non-periodic edges
template <class T> double interior_max(const spinorsurf::Field<T> &f, int m)
{
    const auto &g = f.grid();
    double r = 0;
    for (int j = g.periodic_y() ? 0 : m; j < (g.periodic_y() ? g.ny() : g.ny() - m); ++j)
        for (int i = g.periodic_x() ? 0 : m; i < (g.periodic_x() ? g.nx() : g.nx() - m); ++i)
            r = std::max(r, spinorsurf::value_norm(f(i, j)));
    return r;
}

inline int levi_civita(int a, int b, int c)
{
    if (a == b || b == c || a == c)
        return 0;
    return ((a == 1 && b == 2) || (a == 2 && b == 3) || (a == 3 && b == 1)) ? 1 : -1;
}

inline bool in_h(const spinorsurf::Mat2 &x, double tol)
{
    return std::abs(x(1, 0) + std::conj(x(0, 1))) <= tol && std::abs(x(1, 1) - std::conj(x(0, 0))) <= tol;
}

} // namespace testgen
