#include "spinorsurf/grid.hpp"

#include <fftw3.h>

#include <mutex>
#include <numbers>
#include <tuple>

namespace spinorsurf {

Grid2D::Grid2D(Axis x, Axis y) : ax_(x), ay_(y)
{
    if (x.n < 8 || y.n < 8)
        throw DomainError("grid needs at least 8 nodes per axis");
    if (!(x.length > 0) || !(y.length > 0))
        throw DomainError("grid lengths must be positive");
    hx_ = x.periodic ? x.length / x.n : x.length / (x.n - 1);
    hy_ = y.periodic ? y.length / y.n : y.length / (y.n - 1);
}

Grid2D Grid2D::box(double x0, double x1, double y0, double y1, int nx, int ny)
{
    return Grid2D({nx, x0, x1 - x0, false}, {ny, y0, y1 - y0, false});
}

Grid2D Grid2D::periodic(double lx, double ly, int nx, int ny, cplx origin)
{
    return Grid2D({nx, origin.real(), lx, true}, {ny, origin.imag(), ly, true});
}

Node Grid2D::center_node() const
{
    auto mid = [](const Axis &a, double h) {
        const double c = a.start + 0.5 * a.length;
        int k = int(std::lround((c - a.start) / h));
        return std::clamp(k, 0, a.n - 1);
    };
    return {mid(ax_, hx_), mid(ay_, hy_)};
}

ComplexField to_complex(const ScalarField &f)
{
    return map_field<cplx>(f, [](double v) { return cplx(v); });
}

ScalarField real_part(const ComplexField &f)
{
    return map_field<double>(f, [](cplx v) { return v.real(); }, {1.0, 1.0});
}

ScalarField imag_part(const ComplexField &f)
{
    return map_field<double>(f, [](cplx v) { return v.imag(); }, {1.0, 1.0});
}

std::vector<double> fd_weights(int m, const std::vector<int> &offsets)
{
    const int n = int(offsets.size());
    if (n <= m)
        throw DomainError("stencil too small for derivative order");
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = offsets[0];
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = offsets[i];
        for (int j = 0; j < i; ++j) {
            const double c3 = double(offsets[i]) - offsets[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = c[i][m];
    return w;
}

namespace detail {

int centered_width(int m) { return 2 * ((m + 1) / 2) + 1; }
// second order one-sided, third order for even orders
int boundary_width(int m) { return m % 2 == 0 ? m + 3 : m + 2; }

namespace {

std::mutex &plan_mutex()
{
    static std::mutex m;
    return m;
}

// cached plans, FFTW_UNALIGNED so they run on any buffer
fftw_plan get_plan(int n0, int n1, int sign)
{
    static std::map<std::tuple<int, int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    auto key = std::make_tuple(n0, n1, sign);
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;
    const std::size_t total = std::size_t(n0) * std::max(n1, 1);
    fftw_complex *buf = fftw_alloc_complex(total);
    fftw_plan p = n1 > 0 ? fftw_plan_dft_2d(n0, n1, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
                         : fftw_plan_dft_1d(n0, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    cache.emplace(key, p);
    return p;
}

void fft(std::vector<cplx> &data, int n0, int n1, int sign)
{
    fftw_plan p = get_plan(n0, n1, sign);
    auto *ptr = reinterpret_cast<fftw_complex *>(data.data());
    fftw_execute_dft(p, ptr, ptr);
}

int signed_freq(int p, int n) { return p <= (n - 1) / 2 ? p : p - n; }
bool is_nyquist(int p, int n) { return n % 2 == 0 && p == n / 2; }

cplx kappa_of(cplx wrap, double length)
{
    if (wrap == cplx(1.0))
        return 0.0;
    if (wrap == cplx(0.0))
        throw DomainError("zero wrap factor");
    return std::log(wrap) / length;
}

} // namespace

void apply_symbol(std::vector<cplx> &data, const Grid2D &g, std::array<cplx, 2> wrap,
                  const std::function<cplx(cplx, cplx)> &symbol)
{
    const int nx = g.nx(), ny = g.ny();
    const double lx = g.axis(0).length, ly = g.axis(1).length;
    const cplx kx0 = kappa_of(wrap[0], lx), ky0 = kappa_of(wrap[1], ly);
    const bool shifted = kx0 != cplx(0) || ky0 != cplx(0);
    std::vector<cplx> ex(nx), ey(ny);
    for (int i = 0; i < nx; ++i)
        ex[i] = std::exp(kx0 * (i * g.hx()));
    for (int j = 0; j < ny; ++j)
        ey[j] = std::exp(ky0 * (j * g.hy()));
    if (shifted)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                data[g.index(i, j)] /= ex[i] * ey[j];

    fft(data, ny, nx, FFTW_FORWARD);

    auto candidates = [](int p, int n, double len, cplx kap) {
        std::vector<cplx> out;
        const double w = 2.0 * std::numbers::pi / len;
        if (is_nyquist(p, n)) {
            out.push_back(kap + I * (w * (n / 2)));
            out.push_back(kap - I * (w * (n / 2)));
        } else {
            out.push_back(kap + I * (w * signed_freq(p, n)));
        }
        return out;
    };
    std::vector<std::vector<cplx>> ax(nx), ay(ny);
    for (int p = 0; p < nx; ++p)
        ax[p] = candidates(p, nx, lx, kx0);
    for (int q = 0; q < ny; ++q)
        ay[q] = candidates(q, ny, ly, ky0);

    const double norm = 1.0 / (double(nx) * ny);
    for (int q = 0; q < ny; ++q)
        for (int p = 0; p < nx; ++p) {
            cplx s = 0;
            for (cplx a : ax[p])
                for (cplx b : ay[q])
                    s += symbol(a, b);
            s /= double(ax[p].size() * ay[q].size());
            data[g.index(p, q)] *= s * norm;
        }

    fft(data, ny, nx, FFTW_BACKWARD);
    if (shifted)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                data[g.index(i, j)] *= ex[i] * ey[j];
}

std::vector<std::vector<cplx>> wirtinger_expansion(int p, int q)
{
    // polynomial in (X, Y): c[α][β] X^α Y^β
    std::vector<std::vector<cplx>> c(1, std::vector<cplx>(1, 1.0));
    auto mul = [&](cplx cy) {
        const std::size_t d = c.size();
        std::vector<std::vector<cplx>> r(d + 1, std::vector<cplx>(d + 1, 0.0));
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                r[a + 1][b] += 0.5 * c[a][b];
                r[a][b + 1] += 0.5 * cy * c[a][b];
            }
        c = std::move(r);
    };
    for (int k = 0; k < p; ++k)
        mul(-I);
    for (int k = 0; k < q; ++k)
        mul(I);
    return c;
}

} // namespace detail

ComplexField solve_dbar(const ComplexField &g)
{
    const Grid2D &grid = g.grid();
    if (!grid.doubly_periodic())
        throw UnsupportedGridError("solve_dbar needs a doubly periodic grid");
    if (g.wrap()[0] != cplx(1.0) || g.wrap()[1] != cplx(1.0))
        throw UnsupportedGridError("solve_dbar needs a periodic right-hand side");
    cplx mean = 0;
    for (const auto &v : g.values())
        mean += v;
    mean /= double(g.size());
    const double scale = max_norm(g);
    if (std::abs(mean) > 1e-10 * scale)
        throw IncompatibilityError("right-hand side of the dbar equation has nonzero mean");

    const int nx = grid.nx(), ny = grid.ny();
    const double wx = 2.0 * std::numbers::pi / grid.axis(0).length, wy = 2.0 * std::numbers::pi / grid.axis(1).length;
    std::vector<cplx> data = g.values();
    detail::fft(data, ny, nx, FFTW_FORWARD);
    const double norm = 1.0 / (double(nx) * ny);
    for (int q = 0; q < ny; ++q)
        for (int p = 0; p < nx; ++p) {
            cplx &v = data[grid.index(p, q)];
            const bool nyq = detail::is_nyquist(p, nx) || detail::is_nyquist(q, ny);
            if ((p == 0 && q == 0) || nyq) {
                v = 0;
                continue;
            }
            const double kx = wx * detail::signed_freq(p, nx), ky = wy * detail::signed_freq(q, ny);
            v *= norm / (0.5 * cplx(-ky, kx));
        }
    detail::fft(data, ny, nx, FFTW_BACKWARD);
    return ComplexField(grid, std::move(data));
}

LineIntegral spectral_antiderivative(const std::vector<cplx> &g, double h, cplx mult, int base)
{
    const int n = int(g.size());
    if (base < 0 || base >= n)
        throw DomainError("base index outside line");
    const double len = n * h;
    const cplx kap = detail::kappa_of(mult, len);
    std::vector<cplx> e(n), data(n);
    for (int t = 0; t < n; ++t) {
        e[t] = std::exp(kap * (t * h));
        data[t] = g[t] / e[t];
    }
    detail::fft(data, n, 0, FFTW_FORWARD);
    const double w = 2.0 * std::numbers::pi / len;
    cplx lin = 0;
    for (int p = 0; p < n; ++p) {
        cplx c = data[p] / double(n);
        if (detail::is_nyquist(p, n)) {
            const cplx sp = kap + I * (w * (n / 2)), sm = kap - I * (w * (n / 2));
            data[p] = 0.5 * c * (1.0 / sp + 1.0 / sm);
            continue;
        }
        const cplx s = kap + I * (w * detail::signed_freq(p, n));
        if (s == cplx(0)) {
            lin = c;
            data[p] = 0;
        } else {
            data[p] = c / s;
        }
    }
    detail::fft(data, n, 0, FFTW_BACKWARD);
    LineIntegral out;
    out.values.resize(n);
    out.shifted.resize(n);
    const cplx gb = e[base] * data[base] + lin * (base * h);
    for (int t = 0; t < n; ++t) {
        out.values[t] = e[t] * data[t] + lin * (t * h) - gb;
        out.shifted[t] = mult * e[t] * data[t] + lin * (t * h + len) - gb;
    }
    return out;
}

LineIntegral trapezoid_antiderivative(const std::vector<cplx> &g, double h, int base)
{
    const int n = int(g.size());
    if (base < 0 || base >= n)
        throw DomainError("base index outside line");
    LineIntegral out;
    out.values.assign(n, 0.0);
    for (int t = base + 1; t < n; ++t)
        out.values[t] = out.values[t - 1] + 0.5 * h * (g[t - 1] + g[t]);
    for (int t = base - 1; t >= 0; --t)
        out.values[t] = out.values[t + 1] - 0.5 * h * (g[t] + g[t + 1]);
    return out;
}

GridPath GridPath::straight(Node a, Node b)
{
    if (a.i != b.i && a.j != b.j)
        throw DomainError("straight path must be axis aligned");
    GridPath p;
    Node c = a;
    p.nodes.push_back(c);
    while (!(c == b)) {
        if (c.i != b.i)
            c.i += b.i > c.i ? 1 : -1;
        else
            c.j += b.j > c.j ? 1 : -1;
        p.nodes.push_back(c);
    }
    return p;
}

GridPath GridPath::canonical(Node base, Node target)
{
    return straight(base, {target.i, base.j}).concat(straight({target.i, base.j}, target));
}

GridPath GridPath::rectangle(Node lo, Node hi)
{
    const Node c1{hi.i, lo.j}, c3{lo.i, hi.j};
    return straight(lo, c1).concat(straight(c1, hi)).concat(straight(hi, c3)).concat(straight(c3, lo));
}

GridPath GridPath::reversed() const
{
    GridPath p = *this;
    std::reverse(p.nodes.begin(), p.nodes.end());
    return p;
}

GridPath GridPath::concat(const GridPath &o) const
{
    if (nodes.empty())
        return o;
    if (o.nodes.empty())
        return *this;
    if (!(nodes.back() == o.nodes.front()))
        throw DomainError("paths do not join");
    GridPath p = *this;
    p.nodes.insert(p.nodes.end(), o.nodes.begin() + 1, o.nodes.end());
    return p;
}

void ExactSum::add(double x)
{
    std::size_t k = 0;
    for (double y : partials_) {
        if (std::abs(x) < std::abs(y))
            std::swap(x, y);
        const double hi = x + y;
        const double lo = y - (hi - x);
        if (lo != 0.0)
            partials_[k++] = lo;
        x = hi;
    }
    partials_.resize(k);
    partials_.push_back(x);
}

double ExactSum::value() const
{
    // round-half-even correction as in Python's math.fsum
    if (partials_.empty())
        return 0.0;
    std::ptrdiff_t n = std::ptrdiff_t(partials_.size()) - 1;
    double hi = partials_[n], lo = 0.0;
    while (n > 0) {
        const double x = hi;
        const double y = partials_[--n];
        hi = x + y;
        const double yr = hi - x;
        lo = y - yr;
        if (lo != 0.0)
            break;
    }
    if (n > 0 && ((lo < 0 && partials_[n - 1] < 0) || (lo > 0 && partials_[n - 1] > 0))) {
        const double y = lo * 2.0;
        const double x = hi + y;
        const double yr = x - hi;
        if (y == yr)
            hi = x;
    }
    return hi;
}

} // namespace spinorsurf
