#pragma once

// template bodies for grid.hpp

#include <map>
#include <utility>

namespace spinorsurf {

namespace detail {

int centered_width(int m);
int boundary_width(int m);

// applies a Fourier symbol s(a, b), a = κx + i·kx, b = κy + i·ky, to one
// complex component stored row-major on a doubly periodic grid
void apply_symbol(std::vector<cplx> &data, const Grid2D &g, std::array<cplx, 2> wrap,
                  const std::function<cplx(cplx, cplx)> &symbol);

// coefficients c[α][β] of 2^{-(p+q)} (X − iY)^p (X + iY)^q
std::vector<std::vector<cplx>> wirtinger_expansion(int p, int q);

template <class T> Field<T> scaled(const Field<T> &f, cplx c)
{
    Field<T> out(f.grid(), T{}, f.wrap());
    for (std::size_t k = 0; k < f.size(); ++k)
        out[k] = ValueTraits<T>::scale(f[k], c);
    return out;
}

template <class T> void accumulate(Field<T> &acc, const Field<T> &f, cplx c)
{
    for (std::size_t k = 0; k < f.size(); ++k)
        acc[k] = acc[k] + ValueTraits<T>::scale(f[k], c);
}

template <class T>
Field<T> spectral_apply(const Field<T> &f, const std::function<cplx(cplx, cplx)> &symbol)
{
    const Grid2D &g = f.grid();
    if (!g.doubly_periodic())
        throw UnsupportedGridError("spectral derivatives need a doubly periodic grid");
    Field<T> out = f;
    std::vector<cplx> buf(f.size());
    for (int c = 0; c < ValueTraits<T>::n; ++c) {
        for (std::size_t k = 0; k < f.size(); ++k)
            buf[k] = ValueTraits<T>::get(f[k], c);
        apply_symbol(buf, g, f.wrap(), symbol);
        for (std::size_t k = 0; k < f.size(); ++k)
            ValueTraits<T>::set(out[k], c, buf[k]);
    }
    return out;
}

} // namespace detail

template <class T> Field<T> diff_axis(const Field<T> &f, int axis, int m)
{
    if (m == 0)
        return f;
    const Grid2D &g = f.grid();
    const int n = g.count(axis);
    const double h = g.spacing(axis);
    const double scale = 1.0 / std::pow(h, m);
    const int wc = detail::centered_width(m), half = wc / 2;
    const int wb = detail::boundary_width(m);
    if (n < std::max(wc, wb))
        throw DomainError("too few nodes for the stencil");

    std::vector<int> coff(wc);
    for (int k = 0; k < wc; ++k)
        coff[k] = k - half;
    const std::vector<double> cw = fd_weights(m, coff);

    // stencil table per line position
    std::vector<std::pair<std::vector<int>, std::vector<double>>> table(n);
    for (int t = 0; t < n; ++t) {
        if (g.periodic(axis) || (t - half >= 0 && t + half <= n - 1)) {
            table[t] = {coff, cw};
        } else {
            int start = std::clamp(t - wb / 2, 0, n - wb);
            std::vector<int> off(wb);
            for (int k = 0; k < wb; ++k)
                off[k] = start + k - t;
            table[t] = {off, fd_weights(m, off)};
        }
    }

    Field<T> out(g, T{}, f.wrap());
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const int t = axis == 0 ? i : j;
            const auto &[off, w] = table[t];
            T acc{};
            for (std::size_t k = 0; k < off.size(); ++k) {
                const T v = axis == 0 ? f.at(i + off[k], j) : f.at(i, j + off[k]);
                acc = acc + (w[k] * scale) * v;
            }
            out(i, j) = acc;
        }
    return out;
}

template <class T> Field<T> partial(const Field<T> &f, int px, int py, Scheme s)
{
    if (s == Scheme::Spectral) {
        return detail::spectral_apply(f, [px, py](cplx a, cplx b) {
            return std::pow(a, px) * std::pow(b, py);
        });
    }
    return diff_axis(diff_axis(f, 1, py), 0, px);
}

template <class T> Field<T> wirtinger(const Field<T> &f, int p, int q, Scheme s)
{
    static_assert(ValueTraits<T>::complex_valued, "Wirtinger derivatives need complex-valued fields");
    if (p == 0 && q == 0)
        return f;
    if (s == Scheme::Spectral) {
        return detail::spectral_apply(f, [p, q](cplx a, cplx b) {
            return std::pow(0.5 * (a - I * b), p) * std::pow(0.5 * (a + I * b), q);
        });
    }
    const auto c = detail::wirtinger_expansion(p, q);
    Field<T> acc(f.grid(), T{}, f.wrap());
    for (std::size_t beta = 0; beta < c[0].size(); ++beta) {
        bool any = false;
        for (std::size_t alpha = 0; alpha < c.size(); ++alpha)
            any = any || c[alpha][beta] != cplx(0);
        if (!any)
            continue;
        const Field<T> fy = diff_axis(f, 1, int(beta));
        for (std::size_t alpha = 0; alpha < c.size(); ++alpha)
            if (c[alpha][beta] != cplx(0))
                detail::accumulate(acc, diff_axis(fy, 0, int(alpha)), c[alpha][beta]);
    }
    return acc;
}

template <class T> T path_integrate(const FormField<T> &form, const GridPath &path)
{
    const Grid2D &g = form.P.grid();
    if (!(form.Q.grid() == g))
        throw DomainError("form components live on different grids");
    constexpr int nc = ValueTraits<T>::n;
    std::vector<ExactSum> re(nc), im(nc);
    auto add = [&](const T &v, cplx d) {
        for (int c = 0; c < nc; ++c) {
            const cplx t = 0.5 * ValueTraits<T>::get(v, c) * d;
            re[c].add(t.real());
            im[c].add(t.imag());
        }
    };
    for (std::size_t s = 0; s + 1 < path.nodes.size(); ++s) {
        const Node a = path.nodes[s], b = path.nodes[s + 1];
        const int di = b.i - a.i, dj = b.j - a.j;
        if (std::abs(di) + std::abs(dj) != 1)
            throw DomainError("path nodes are not adjacent");
        for (Node p : {a, b}) {
            if ((!g.periodic_x() && (p.i < 0 || p.i >= g.nx())) ||
                (!g.periodic_y() && (p.j < 0 || p.j >= g.ny())))
                throw DomainError("path leaves the grid");
        }
        cplx dz, dzb;
        if (di != 0) {
            dz = dzb = double(di) * g.hx();
        } else {
            dz = I * (double(dj) * g.hy());
            dzb = -dz;
        }
        add(form.P.at(a.i, a.j), dz);
        add(form.P.at(b.i, b.j), dz);
        add(form.Q.at(a.i, a.j), dzb);
        add(form.Q.at(b.i, b.j), dzb);
    }
    T out{};
    for (int c = 0; c < nc; ++c)
        ValueTraits<T>::set(out, c, cplx(re[c].value(), im[c].value()));
    return out;
}

namespace detail {

template <class T> std::pair<Field<T>, Field<T>> dx_dy_coefficients(const FormField<T> &form)
{
    if (!(form.Q.grid() == form.P.grid()))
        throw DomainError("form components live on different grids");
    Field<T> A(form.P.grid(), T{}, form.P.wrap()), B(form.P.grid(), T{}, form.P.wrap());
    for (std::size_t k = 0; k < A.size(); ++k) {
        A[k] = form.P[k] + form.Q[k];
        B[k] = ValueTraits<T>::scale(T(form.P[k] - form.Q[k]), I);
    }
    return {A, B};
}

inline LineIntegral line_integral(const std::vector<cplx> &g, double h, bool periodic, cplx mult, int base)
{
    return periodic ? spectral_antiderivative(g, h, mult, base) : trapezoid_antiderivative(g, h, base);
}

// legs[c] for each component; returns leg integrals along one axis for
// every line of the other axis
template <class T>
void integrate_lines(const Field<T> &coef, int axis, int base, int line_index_fixed, bool all_lines,
                     std::vector<std::vector<LineIntegral>> &out)
{
    const Grid2D &g = coef.grid();
    constexpr int nc = ValueTraits<T>::n;
    const int n = g.count(axis), m = g.count(1 - axis);
    out.assign(nc, {});
    const int first = all_lines ? 0 : line_index_fixed;
    const int last = all_lines ? m : line_index_fixed + 1;
    std::vector<cplx> line(n);
    for (int c = 0; c < nc; ++c) {
        out[c].resize(m);
        for (int l = first; l < last; ++l) {
            for (int t = 0; t < n; ++t) {
                const T &v = axis == 0 ? coef(t, l) : coef(l, t);
                line[t] = ValueTraits<T>::get(v, c);
            }
            out[c][l] = line_integral(line, g.spacing(axis), g.periodic(axis), coef.wrap()[axis], base);
        }
    }
}

// mode: 0 plain, 1 shifted by λ1, 2 shifted by λ2
template <class T> Field<T> canonical_impl(const FormField<T> &form, Node base, PathOrder order, int mode)
{
    const Grid2D &g = form.P.grid();
    if (!g.contains(base))
        throw DomainError("base node outside grid");
    if ((mode == 1 && !g.periodic_x()) || (mode == 2 && !g.periodic_y()))
        throw DomainError("shift along a non-periodic axis");
    auto [A, B] = dx_dy_coefficients(form);
    constexpr int nc = ValueTraits<T>::n;
    const auto wrap = form.P.wrap();
    Field<T> out(g, T{}, {1.0, 1.0});
    std::vector<std::vector<LineIntegral>> first, second;
    if (order == PathOrder::XThenY) {
        integrate_lines(A, 0, base.i, base.j, false, first);  // first[c][base.j]
        integrate_lines(B, 1, base.j, 0, true, second);       // second[c][i]
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                T v{};
                for (int c = 0; c < nc; ++c) {
                    const auto &X = first[c][base.j];
                    const auto &Y = second[c][i];
                    cplx val;
                    if (mode == 0)
                        val = X.values[i] + Y.values[j];
                    else if (mode == 1)
                        val = X.shifted[i] + wrap[0] * Y.values[j];
                    else
                        val = X.values[i] + Y.shifted[j];
                    ValueTraits<T>::set(v, c, val);
                }
                out(i, j) = v;
            }
    } else {
        if (mode != 0)
            throw DomainError("shifted integration uses the x-then-y path");
        integrate_lines(B, 1, base.j, base.i, false, first);
        integrate_lines(A, 0, base.i, 0, true, second);
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                T v{};
                for (int c = 0; c < nc; ++c)
                    ValueTraits<T>::set(v, c, first[c][base.i].values[j] + second[c][j].values[i]);
                out(i, j) = v;
            }
    }
    return out;
}

} // namespace detail

template <class T> Field<T> integrate_canonical(const FormField<T> &form, Node base, PathOrder order)
{
    return detail::canonical_impl(form, base, order, 0);
}

template <class T> Field<T> integrate_canonical_shifted(const FormField<T> &form, Node base, int axis)
{
    return detail::canonical_impl(form, base, PathOrder::XThenY, axis + 1);
}

template <class T> CellField closedness_defect(const FormField<T> &form)
{
    const Grid2D &g = form.P.grid();
    auto [A, B] = detail::dx_dy_coefficients(form);
    CellField out;
    out.nx = g.periodic_x() ? g.nx() : g.nx() - 1;
    out.ny = g.periodic_y() ? g.ny() : g.ny() - 1;
    out.values.resize(std::size_t(out.nx) * out.ny);
    const double hx = g.hx(), hy = g.hy();
    for (int j = 0; j < out.ny; ++j)
        for (int i = 0; i < out.nx; ++i) {
            const T a00 = A.at(i, j), a01 = A.at(i, j + 1), a10 = A.at(i + 1, j), a11 = A.at(i + 1, j + 1);
            const T b00 = B.at(i, j), b01 = B.at(i, j + 1), b10 = B.at(i + 1, j), b11 = B.at(i + 1, j + 1);
            const T loop = (0.5 * hx) * (a00 + a10 - a11 - a01) + (0.5 * hy) * (b10 + b11 - b01 - b00);
            double s = 0;
            for (int c = 0; c < ValueTraits<T>::n; ++c)
                s += std::norm(ValueTraits<T>::get(loop, c));
            out.values[std::size_t(j) * out.nx + i] = std::sqrt(s);
        }
    return out;
}

} // namespace spinorsurf
