#pragma once

#include "spinorsurf/algebra.hpp"
#include "spinorsurf/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace spinorsurf {

struct Spinor {
    cplx s1{}, s2{};

    Spinor &operator+=(const Spinor &o) { s1 += o.s1; s2 += o.s2; return *this; }
    Spinor &operator-=(const Spinor &o) { s1 -= o.s1; s2 -= o.s2; return *this; }
    Spinor &operator*=(cplx s) { s1 *= s; s2 *= s; return *this; }
    bool operator==(const Spinor &) const = default;
};
inline Spinor operator+(Spinor a, const Spinor &b) { return a += b; }
inline Spinor operator-(Spinor a, const Spinor &b) { return a -= b; }
inline Spinor operator-(Spinor a) { return a *= -1.0; }
inline Spinor operator*(cplx s, Spinor a) { return a *= s; }
inline Spinor operator*(double s, Spinor a) { return a *= s; }
inline Spinor operator*(const Mat2 &m, const Spinor &v)
{
    return {m(0, 0) * v.s1 + m(0, 1) * v.s2, m(1, 0) * v.s1 + m(1, 1) * v.s2};
}
inline double max_abs(const Spinor &v) { return std::max(std::abs(v.s1), std::abs(v.s2)); }

// Per-type access to complex components, used by spectral transforms,
// exact summation and dumps. Real types expose real components only.
template <class T> struct ValueTraits;

template <> struct ValueTraits<double> {
    static constexpr int n = 1;
    static constexpr bool complex_valued = false;
    static cplx get(const double &v, int) { return v; }
    static void set(double &v, int, cplx c) { v = c.real(); }
    static double scale(double v, cplx w) { return v * w.real(); }
};
template <> struct ValueTraits<cplx> {
    static constexpr int n = 1;
    static constexpr bool complex_valued = true;
    static cplx get(const cplx &v, int) { return v; }
    static void set(cplx &v, int, cplx c) { v = c; }
    static cplx scale(cplx v, cplx w) { return v * w; }
};
template <> struct ValueTraits<Spinor> {
    static constexpr int n = 2;
    static constexpr bool complex_valued = true;
    static cplx get(const Spinor &v, int k) { return k == 0 ? v.s1 : v.s2; }
    static void set(Spinor &v, int k, cplx c) { (k == 0 ? v.s1 : v.s2) = c; }
    static Spinor scale(Spinor v, cplx w) { return w * v; }
};
template <> struct ValueTraits<Mat2> {
    static constexpr int n = 4;
    static constexpr bool complex_valued = true;
    static cplx get(const Mat2 &v, int k) { return v.m[k]; }
    static void set(Mat2 &v, int k, cplx c) { v.m[k] = c; }
    static Mat2 scale(Mat2 v, cplx w) { return w * v; }
};
template <> struct ValueTraits<Vec3> {
    static constexpr int n = 3;
    static constexpr bool complex_valued = false;
    static cplx get(const Vec3 &v, int k) { return v[k]; }
    static void set(Vec3 &v, int k, cplx c) { v[k] = c.real(); }
    static Vec3 scale(Vec3 v, cplx w) { return w.real() * v; }
};
// H is only a real vector space: components (a, b) are complex but the
// admissible scalars and wraps are real.
template <> struct ValueTraits<Quat> {
    static constexpr int n = 2;
    static constexpr bool complex_valued = false;
    static cplx get(const Quat &v, int k) { return k == 0 ? v.a() : v.b(); }
    static void set(Quat &v, int k, cplx c) { v = k == 0 ? Quat(c, v.b()) : Quat(v.a(), c); }
    static Quat scale(Quat v, cplx w) { return w.real() * v; }
};

template <class T> double value_norm(const T &v)
{
    double s = 0;
    for (int k = 0; k < ValueTraits<T>::n; ++k)
        s = std::max(s, std::abs(ValueTraits<T>::get(v, k)));
    return s;
}

struct Node {
    int i = 0, j = 0;
    bool operator==(const Node &) const = default;
};

struct Axis {
    int n = 8;
    double start = 0;
    double length = 1;
    bool periodic = false;
};

class Grid2D {
public:
    Grid2D() = default;
    // throws DomainError on n < 8 or non-positive length
    Grid2D(Axis x, Axis y);

    static Grid2D box(double x0, double x1, double y0, double y1, int nx, int ny);
    static Grid2D periodic(double lx, double ly, int nx, int ny, cplx origin = 0.0);

    int nx() const { return ax_.n; }
    int ny() const { return ay_.n; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    cplx origin() const { return {ax_.start, ay_.start}; }
    bool periodic_x() const { return ax_.periodic; }
    bool periodic_y() const { return ay_.periodic; }
    bool periodic(int axis) const { return axis == 0 ? ax_.periodic : ay_.periodic; }
    bool doubly_periodic() const { return ax_.periodic && ay_.periodic; }
    const Axis &axis(int a) const { return a == 0 ? ax_ : ay_; }
    int count(int axis) const { return axis == 0 ? ax_.n : ay_.n; }
    double spacing(int axis) const { return axis == 0 ? hx_ : hy_; }
    // lattice generators; zero for non-periodic axes
    cplx lambda1() const { return ax_.periodic ? cplx(ax_.length, 0) : cplx(0); }
    cplx lambda2() const { return ay_.periodic ? cplx(0, ay_.length) : cplx(0); }

    std::size_t size() const { return std::size_t(ax_.n) * std::size_t(ay_.n); }
    std::size_t index(int i, int j) const { return std::size_t(j) * ax_.n + i; }
    double x(int i) const { return ax_.start + i * hx_; }
    double y(int j) const { return ay_.start + j * hy_; }
    cplx z(int i, int j) const { return {x(i), y(j)}; }
    cplx z(Node p) const { return z(p.i, p.j); }
    bool contains(Node p) const { return p.i >= 0 && p.i < ax_.n && p.j >= 0 && p.j < ay_.n; }
    Node center_node() const;

    bool operator==(const Grid2D &o) const
    {
        return ax_.n == o.ax_.n && ay_.n == o.ay_.n && ax_.start == o.ax_.start &&
               ay_.start == o.ay_.start && ax_.length == o.ax_.length &&
               ay_.length == o.ay_.length && ax_.periodic == o.ax_.periodic &&
               ay_.periodic == o.ay_.periodic;
    }

private:
    Axis ax_, ay_;
    double hx_ = 0, hy_ = 0;
};

// Node values on one fundamental domain. On periodic axes the field is
// continued by f(z + λ_k) = wrap[k]·f(z).
template <class T> class Field {
public:
    Field() = default;
    explicit Field(const Grid2D &g, T fill = T{}, std::array<cplx, 2> wrap = {1.0, 1.0})
        : grid_(g), v_(g.size(), fill), wrap_(wrap)
    {
        check_wrap();
    }
    Field(const Grid2D &g, std::vector<T> values, std::array<cplx, 2> wrap = {1.0, 1.0})
        : grid_(g), v_(std::move(values)), wrap_(wrap)
    {
        if (v_.size() != g.size())
            throw DomainError("field size does not match grid");
        check_wrap();
    }
    template <class Fn> static Field sample(const Grid2D &g, Fn &&fn, std::array<cplx, 2> wrap = {1.0, 1.0})
    {
        Field f(g, T{}, wrap);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i)
                f(i, j) = fn(g.z(i, j));
        return f;
    }

    const Grid2D &grid() const { return grid_; }
    std::array<cplx, 2> wrap() const { return wrap_; }
    void set_wrap(std::array<cplx, 2> w) { wrap_ = w; check_wrap(); }
    std::size_t size() const { return v_.size(); }
    T &operator()(int i, int j) { return v_[grid_.index(i, j)]; }
    const T &operator()(int i, int j) const { return v_[grid_.index(i, j)]; }
    T &operator[](std::size_t k) { return v_[k]; }
    const T &operator[](std::size_t k) const { return v_[k]; }
    std::vector<T> &values() { return v_; }
    const std::vector<T> &values() const { return v_; }

    // value at unwrapped indices; out-of-range on a non-periodic axis throws
    T at(int i, int j) const
    {
        cplx w = 1.0;
        i = reduce(i, 0, w);
        j = reduce(j, 1, w);
        const T &v = v_[grid_.index(i, j)];
        return w == cplx(1.0) ? v : ValueTraits<T>::scale(v, w);
    }

private:
    int reduce(int k, int axis, cplx &w) const
    {
        const int n = grid_.count(axis);
        if (k >= 0 && k < n)
            return k;
        if (!grid_.periodic(axis))
            throw DomainError("index leaves non-periodic grid");
        int q = (k >= 0) ? k / n : -((-k + n - 1) / n);
        w *= std::pow(wrap_[axis], q);
        return k - q * n;
    }
    void check_wrap() const
    {
        if constexpr (!ValueTraits<T>::complex_valued) {
            if (wrap_[0].imag() != 0.0 || wrap_[1].imag() != 0.0)
                throw DomainError("real-linear field needs a real wrap factor");
        }
    }

    Grid2D grid_;
    std::vector<T> v_;
    std::array<cplx, 2> wrap_{1.0, 1.0};
};

using ScalarField = Field<double>;
using ComplexField = Field<cplx>;
using SpinorField = Field<Spinor>;
using MatrixField = Field<Mat2>;
using QuatField = Field<Quat>;
using Vec3Field = Field<Vec3>;

template <class R, class T, class Fn>
Field<R> map_field(const Field<T> &f, Fn &&fn, std::array<cplx, 2> wrap)
{
    Field<R> out(f.grid(), R{}, wrap);
    for (std::size_t k = 0; k < f.size(); ++k)
        out[k] = fn(f[k]);
    return out;
}
template <class R, class T, class Fn> Field<R> map_field(const Field<T> &f, Fn &&fn)
{
    return map_field<R>(f, std::forward<Fn>(fn), f.wrap());
}
template <class R, class A, class B, class Fn>
Field<R> zip_field(const Field<A> &a, const Field<B> &b, Fn &&fn, std::array<cplx, 2> wrap)
{
    if (!(a.grid() == b.grid()))
        throw DomainError("fields live on different grids");
    Field<R> out(a.grid(), R{}, wrap);
    for (std::size_t k = 0; k < a.size(); ++k)
        out[k] = fn(a[k], b[k]);
    return out;
}

ComplexField to_complex(const ScalarField &f);
ScalarField real_part(const ComplexField &f);
ScalarField imag_part(const ComplexField &f);

template <class T> double max_norm(const Field<T> &f)
{
    double m = 0;
    for (const auto &v : f.values())
        m = std::max(m, value_norm(v));
    return m;
}
template <class T> double max_diff(const Field<T> &a, const Field<T> &b)
{
    double m = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
        m = std::max(m, value_norm(T(a[k] - b[k])));
    return m;
}

// ---------------------------------------------------------------- derivatives

enum class Scheme { FiniteDifference, Spectral };

// finite-difference weights for derivative `order` at 0 from the given offsets
std::vector<double> fd_weights(int order, const std::vector<int> &offsets);

// FD derivative of order m along axis 0 (x) or 1 (y). Centered in the interior
// and on periodic axes, one-sided near non-periodic edges.
template <class T> Field<T> diff_axis(const Field<T> &f, int axis, int m);

// ∂^p ∂̄^q by composing 1-D stencils (FD) or by Fourier symbols (spectral)
template <class T> Field<T> wirtinger(const Field<T> &f, int p, int q, Scheme s = Scheme::FiniteDifference);
template <class T> Field<T> d_z(const Field<T> &f, Scheme s = Scheme::FiniteDifference) { return wirtinger(f, 1, 0, s); }
template <class T> Field<T> d_zbar(const Field<T> &f, Scheme s = Scheme::FiniteDifference) { return wirtinger(f, 0, 1, s); }
// ∂x^px ∂y^py; spectral on doubly periodic grids
template <class T> Field<T> partial(const Field<T> &f, int px, int py, Scheme s = Scheme::FiniteDifference);

// ∂̄F = g on a doubly periodic grid, zero-mean gauge
ComplexField solve_dbar(const ComplexField &g);

// ---------------------------------------------------------------- quadrature

// P dz + Q dz̄
template <class T> struct FormField {
    Field<T> P, Q;
};

struct GridPath {
    std::vector<Node> nodes; // unwrapped indices; consecutive nodes differ by one axis step

    static GridPath straight(Node a, Node b);
    static GridPath canonical(Node base, Node target);
    static GridPath rectangle(Node lo, Node hi);
    GridPath reversed() const;
    GridPath concat(const GridPath &o) const;
};

// correctly rounded sum (Shewchuk partials)
class ExactSum {
public:
    void add(double x);
    double value() const;

private:
    std::vector<double> partials_;
};

template <class T> T path_integrate(const FormField<T> &form, const GridPath &path);

enum class PathOrder { XThenY, YThenX };

// ∫ from base to every node along the canonical path; periodic axes use a
// spectral quasi-periodic antiderivative, others the trapezoid rule
template <class T>
Field<T> integrate_canonical(const FormField<T> &form, Node base, PathOrder order = PathOrder::XThenY);
// same integral continued to node + λ_axis (doubly/singly periodic grids)
template <class T> Field<T> integrate_canonical_shifted(const FormField<T> &form, Node base, int axis);

struct CellField {
    int nx = 0, ny = 0;
    std::vector<double> values;
    double max() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }
};
template <class T> CellField closedness_defect(const FormField<T> &form);

// 1-D antiderivative helpers exposed for testing
struct LineIntegral {
    std::vector<cplx> values;  // F(x_k) - F(x_base)
    std::vector<cplx> shifted; // F(x_k + L) - F(x_base)
};
LineIntegral spectral_antiderivative(const std::vector<cplx> &g, double h, cplx multiplier, int base);
LineIntegral trapezoid_antiderivative(const std::vector<cplx> &g, double h, int base);

} // namespace spinorsurf

#include "spinorsurf/grid_impl.hpp"
