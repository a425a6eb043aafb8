#include "spinorsurf/algebra.hpp"
#include "spinorsurf/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace spinorsurf {

double Mat2::frobenius() const
{
    double s = 0;
    for (const auto &v : m)
        s += std::norm(v);
    return std::sqrt(s);
}

Mat2 Mat2::inverse() const
{
    const cplx d = det();
    const double f = frobenius();
    if (!(std::abs(d) > kSingularRelThreshold * f * f))
        throw SingularityError("singular 2x2 matrix");
    return Mat2{m[3], -m[1], -m[2], m[0]} * (1.0 / d);
}

double max_abs_diff(const Mat2 &a, const Mat2 &b)
{
    double r = 0;
    for (int k = 0; k < 4; ++k)
        r = std::max(r, std::abs(a.m[k] - b.m[k]));
    return r;
}

Quat Quat::from_matrix(const Mat2 &m, double tol)
{
    const double dev = std::max(std::abs(m(1, 0) + std::conj(m(0, 1))),
                                std::abs(m(1, 1) - std::conj(m(0, 0))));
    if (dev > tol * std::max(1.0, m.frobenius()))
        throw DomainError("matrix is not in the quaternionic algebra");
    return {m(0, 0), m(0, 1)};
}

Quat Quat::project(const Mat2 &m)
{
    return {0.5 * (m(0, 0) + std::conj(m(1, 1))), 0.5 * (m(0, 1) - std::conj(m(1, 0)))};
}

cplx Quat::operator()(int r, int c) const
{
    if (r == 0)
        return c == 0 ? a_ : b_;
    return c == 0 ? -std::conj(b_) : std::conj(a_);
}

Su2::Su2(const Quat &q, double tol) : q_(q)
{
    if (std::abs(q.a().real()) > tol * std::max(1.0, q.frobenius()))
        throw DomainError("matrix is not trace-free");
}

Su2 su2_embed(const Vec3 &v)
{
    return Su2(Quat(cplx(0.0, v.x3), cplx(-v.x1, -v.x2)));
}

Vec3 su2_extract(const Su2 &x)
{
    const Quat &q = x.quat();
    return {-q.b().real(), -q.b().imag(), q.a().imag()};
}

Vec3 su2_extract(const Quat &x, double tol)
{
    return su2_extract(Su2(x, tol));
}

Quat quat_inverse(const Quat &m)
{
    const double d = m.det();
    const double f2 = 2.0 * d;
    if (!(d > kSingularRelThreshold * f2) || d == 0.0)
        throw SingularityError("singular quaternionic matrix");
    return Quat(std::conj(m.a()) / d, -m.b() / d);
}

Mat2 pauli(int k)
{
    switch (k) {
    case 0: return {1.0, 0.0, 0.0, 1.0};
    case 1: return {0.0, 1.0, 1.0, 0.0};
    case 2: return {0.0, -I, I, 0.0};
    case 3: return {1.0, 0.0, 0.0, -1.0};
    default: throw std::out_of_range("pauli index must be 0..3");
    }
}

Quat gamma() { return {0.0, 1.0}; }
Quat gamma_inverse() { return {0.0, -1.0}; }

} // namespace spinorsurf
