#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace spinorsurf {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

struct Vec3 {
    double x1 = 0, x2 = 0, x3 = 0;

    Vec3 &operator+=(const Vec3 &o) { x1 += o.x1; x2 += o.x2; x3 += o.x3; return *this; }
    Vec3 &operator-=(const Vec3 &o) { x1 -= o.x1; x2 -= o.x2; x3 -= o.x3; return *this; }
    Vec3 &operator*=(double s) { x1 *= s; x2 *= s; x3 *= s; return *this; }
    double operator[](int k) const { return k == 0 ? x1 : (k == 1 ? x2 : x3); }
    double &operator[](int k) { return k == 0 ? x1 : (k == 1 ? x2 : x3); }
    bool operator==(const Vec3 &) const = default;
};

inline Vec3 operator+(Vec3 a, const Vec3 &b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3 &b) { return a -= b; }
inline Vec3 operator-(const Vec3 &a) { return {-a.x1, -a.x2, -a.x3}; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }
inline Vec3 operator*(Vec3 a, double s) { return a *= s; }
inline Vec3 operator/(Vec3 a, double s) { return a *= 1.0 / s; }
inline double dot(const Vec3 &a, const Vec3 &b) { return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3; }
inline double norm2(const Vec3 &a) { return dot(a, a); }
inline double norm(const Vec3 &a) { return std::sqrt(norm2(a)); }
inline Vec3 cross(const Vec3 &a, const Vec3 &b)
{
    return {a.x2 * b.x3 - a.x3 * b.x2, a.x3 * b.x1 - a.x1 * b.x3, a.x1 * b.x2 - a.x2 * b.x1};
}

// Unconstrained 2x2 complex matrix, row-major.
struct Mat2 {
    std::array<cplx, 4> m{};

    Mat2() = default;
    Mat2(cplx m00, cplx m01, cplx m10, cplx m11) : m{m00, m01, m10, m11} {}

    cplx &operator()(int r, int c) { return m[2 * r + c]; }
    const cplx &operator()(int r, int c) const { return m[2 * r + c]; }

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }

    Mat2 &operator+=(const Mat2 &o) { for (int k = 0; k < 4; ++k) m[k] += o.m[k]; return *this; }
    Mat2 &operator-=(const Mat2 &o) { for (int k = 0; k < 4; ++k) m[k] -= o.m[k]; return *this; }
    Mat2 &operator*=(cplx s) { for (auto &v : m) v *= s; return *this; }

    cplx det() const { return m[0] * m[3] - m[1] * m[2]; }
    cplx trace() const { return m[0] + m[3]; }
    Mat2 transpose() const { return {m[0], m[2], m[1], m[3]}; }
    Mat2 adjoint() const { return {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}; }
    double frobenius() const;
    // throws SingularityError below the scale-invariant threshold
    Mat2 inverse() const;
    bool operator==(const Mat2 &) const = default;
};

inline Mat2 operator+(Mat2 a, const Mat2 &b) { return a += b; }
inline Mat2 operator-(Mat2 a, const Mat2 &b) { return a -= b; }
inline Mat2 operator-(Mat2 a) { return a *= -1.0; }
inline Mat2 operator*(cplx s, Mat2 a) { return a *= s; }
inline Mat2 operator*(Mat2 a, cplx s) { return a *= s; }
inline Mat2 operator*(double s, Mat2 a) { return a *= s; }
inline Mat2 operator*(const Mat2 &a, const Mat2 &b)
{
    return {a.m[0] * b.m[0] + a.m[1] * b.m[2], a.m[0] * b.m[1] + a.m[1] * b.m[3],
            a.m[2] * b.m[0] + a.m[3] * b.m[2], a.m[2] * b.m[1] + a.m[3] * b.m[3]};
}
double max_abs_diff(const Mat2 &a, const Mat2 &b);

// Element of H: [[a, b], [-conj(b), conj(a)]].
class Quat {
public:
    Quat() = default;
    Quat(cplx a, cplx b) : a_(a), b_(b) {}

    static Quat identity() { return {1.0, 0.0}; }
    static Quat zero() { return {}; }
    // throws DomainError when m is not in H to within tol (relative)
    static Quat from_matrix(const Mat2 &m, double tol = 1e-10);
    // nearest element of H (orthogonal projection)
    static Quat project(const Mat2 &m);

    cplx a() const { return a_; }
    cplx b() const { return b_; }
    Mat2 matrix() const { return {a_, b_, -std::conj(b_), std::conj(a_)}; }
    cplx operator()(int r, int c) const;

    double det() const { return std::norm(a_) + std::norm(b_); }
    double frobenius() const { return std::sqrt(2.0 * det()); }
    // plain transpose; H is closed under it
    Quat transpose() const { return {a_, -std::conj(b_)}; }
    Quat adjoint() const { return {std::conj(a_), -b_}; }

    Quat &operator+=(const Quat &o) { a_ += o.a_; b_ += o.b_; return *this; }
    Quat &operator-=(const Quat &o) { a_ -= o.a_; b_ -= o.b_; return *this; }
    Quat &operator*=(double s) { a_ *= s; b_ *= s; return *this; }
    bool operator==(const Quat &) const = default;

private:
    cplx a_{}, b_{};
};

inline Quat operator+(Quat p, const Quat &q) { return p += q; }
inline Quat operator-(Quat p, const Quat &q) { return p -= q; }
inline Quat operator-(const Quat &p) { return {-p.a(), -p.b()}; }
inline Quat operator*(double s, Quat p) { return p *= s; }
inline Quat operator*(Quat p, double s) { return p *= s; }
inline Quat operator*(const Quat &p, const Quat &q)
{
    return {p.a() * q.a() - p.b() * std::conj(q.b()), p.a() * q.b() + p.b() * std::conj(q.a())};
}
inline Mat2 operator*(const Quat &p, const Mat2 &m) { return p.matrix() * m; }
inline Mat2 operator*(const Mat2 &m, const Quat &p) { return m * p.matrix(); }

// Trace-free element of H, i.e. a point of R^3.
class Su2 {
public:
    Su2() = default;
    // throws DomainError if q is not trace-free within tol·|q|
    explicit Su2(const Quat &q, double tol = 1e-12);
    const Quat &quat() const { return q_; }
    Mat2 matrix() const { return q_.matrix(); }

private:
    Quat q_;
};

Su2 su2_embed(const Vec3 &v);
Vec3 su2_extract(const Su2 &x);
// throws DomainError if not trace-free
Vec3 su2_extract(const Quat &x, double tol = 1e-12);

// throws SingularityError when det < 1e-14·‖M‖_F²
Quat quat_inverse(const Quat &m);

// sigma_0..sigma_3; throws std::out_of_range otherwise
Mat2 pauli(int k);
// i·sigma_2
Quat gamma();
Quat gamma_inverse();

inline constexpr double kSingularRelThreshold = 1e-14;

} // namespace spinorsurf
