#include "support.hpp"

#include "spinorsurf/grid.hpp"

#include <doctest.h>

#include <numbers>

using namespace spinorsurf;
using testgen::Gen;
using testgen::interior_max;

namespace {

constexpr double pi = std::numbers::pi;

Grid2D unit_box(int n) { return Grid2D::box(-1, 1, -1, 1, n, n); }

ComplexField sample(const Grid2D &g, cplx (*fn)(cplx)) { return ComplexField::sample(g, fn); }

// random trigonometric polynomial with zero mean, band-limited well below Nyquist
ComplexField random_trig(const Grid2D &g, Gen &gen)
{
    struct Mode {
        int p, q;
        cplx c;
    };
    std::vector<Mode> modes;
    for (int k = 0; k < 6; ++k) {
        int p = gen.integer(-4, 4), q = gen.integer(-4, 4);
        if (p == 0 && q == 0)
            p = 1;
        modes.push_back({p, q, gen.complex()});
    }
    const double wx = 2 * pi / g.axis(0).length, wy = 2 * pi / g.axis(1).length;
    return ComplexField::sample(g, [&](cplx z) {
        cplx s = 0;
        for (const Mode &m : modes)
            s += m.c * std::exp(I * (wx * m.p * z.real() + wy * m.q * z.imag()));
        return s;
    });
}

FormField<cplx> form(const Grid2D &g, cplx (*P)(cplx), cplx (*Q)(cplx)) { return {sample(g, P), sample(g, Q)}; }

} // namespace

TEST_SUITE("grid")
{
    TEST_CASE("grid construction")
    {
        const Grid2D g = unit_box(21);
        CHECK(g.hx() == doctest::Approx(0.1));
        CHECK(g.z(0, 0) == cplx(-1, -1));
        CHECK(g.z(20, 20).real() == doctest::Approx(1.0));
        CHECK(g.lambda1() == cplx(0));
        CHECK(g.center_node() == Node{10, 10});

        const Grid2D p = Grid2D::periodic(2 * pi, 3.0, 16, 12);
        CHECK(p.doubly_periodic());
        CHECK(p.hx() * p.nx() == doctest::Approx(2 * pi));
        CHECK(p.lambda1() == cplx(2 * pi, 0));
        CHECK(p.lambda2() == cplx(0, 3.0));

        CHECK_THROWS_AS(Grid2D::box(0, 1, 0, 1, 7, 8), DomainError);
        CHECK_THROWS_AS(Grid2D::box(0, 0, 0, 1, 8, 8), DomainError);
    }

    TEST_CASE("field continuation by wrap factors")
    {
        const Grid2D g = Grid2D::periodic(1, 1, 8, 8);
        ComplexField f = ComplexField::sample(g, [](cplx z) { return z; }, {-1.0, I});
        CHECK(f.at(8 + 3, 2) == -f(3, 2));
        CHECK(f.at(-1, 0) == -f(7, 0));
        CHECK(f.at(1, 8) == I * f(1, 0));
        CHECK(f.at(1, -16) == std::pow(I, -2) * f(1, 0));
        CHECK_THROWS_AS(ScalarField(g, 0.0, {I, 1.0}), DomainError);

        const ComplexField b(unit_box(8));
        CHECK_THROWS_AS(b.at(8, 0), DomainError);
    }

    TEST_CASE("fd weights")
    {
        const auto w = fd_weights(1, {-1, 0, 1});
        CHECK(w[0] == doctest::Approx(-0.5));
        CHECK(w[1] == doctest::Approx(0.0));
        CHECK(w[2] == doctest::Approx(0.5));
        const auto w2 = fd_weights(2, {-1, 0, 1});
        CHECK(w2[1] == doctest::Approx(-2.0));
        const auto wb = fd_weights(1, {0, 1, 2});
        CHECK(wb[0] == doctest::Approx(-1.5));
        CHECK(wb[2] == doctest::Approx(-0.5));
    }

    TEST_CASE("d_z examples")
    {
        const Grid2D g = unit_box(17);
        const ComplexField one = d_z(sample(g, [](cplx z) { return z; }));
        for (const cplx v : one.values())
            CHECK(std::abs(v - 1.0) <= 1e-13);

        // centered and one-sided second-order stencils are exact on quadratics
        const ComplexField zz = d_z(sample(g, [](cplx z) { return z * std::conj(z); }));
        CHECK(max_diff(zz, sample(g, [](cplx z) { return std::conj(z); })) <= 1e-13);

        for (int n : {32, 64}) {
            const Grid2D p = Grid2D::periodic(2 * pi, 2 * pi, n, 8);
            const ComplexField f = d_z(sample(p, [](cplx z) { return cplx(std::sin(z.real())); }));
            const double err = max_diff(f, sample(p, [](cplx z) { return cplx(0.5 * std::cos(z.real())); }));
            CHECK(err <= p.hx() * p.hx() / 6.0);
            CHECK(err > 0);
        }
    }

    TEST_CASE("d_zbar examples")
    {
        const Grid2D g = unit_box(17);
        CHECK(max_norm(d_zbar(sample(g, [](cplx z) { return z; }))) <= 1e-13);
        CHECK(max_diff(d_zbar(sample(g, [](cplx z) { return std::conj(z); })), ComplexField(g, 1.0)) <= 1e-13);

        double prev = 0;
        for (int n : {32, 64}) {
            const Grid2D p = Grid2D::periodic(2 * pi, 2 * pi, n, 8);
            const ComplexField f = d_zbar(sample(p, [](cplx z) { return cplx(std::sin(z.real())); }));
            const double err = max_diff(f, sample(p, [](cplx z) { return cplx(0.5 * std::cos(z.real())); }));
            CHECK(err <= p.hx() * p.hx() / 6.0);
            if (prev > 0)
                CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.05));
            prev = err;
        }
    }

    TEST_CASE("spectral derivatives on periodic grids")
    {
        const Grid2D p = Grid2D::periodic(2 * pi, 2 * pi, 32, 32);
        const ComplexField f = sample(p, [](cplx z) { return std::exp(I * (2.0 * z.real() - 3.0 * z.imag())); });
        const ComplexField dz = d_z(f, Scheme::Spectral);
        // ∂ e^{i(2x-3y)} = ½(2i - 3) e^{...}
        const ComplexField expect = ComplexField::sample(p, [](cplx z) {
            return 0.5 * cplx(-3.0, 2.0) * std::exp(I * (2.0 * z.real() - 3.0 * z.imag()));
        });
        CHECK(max_diff(dz, expect) <= 1e-12);
        const ComplexField f3 = partial(f, 3, 0, Scheme::Spectral);
        CHECK(max_diff(f3, ComplexField::sample(p, [](cplx z) {
                           return -8.0 * I * std::exp(I * (2.0 * z.real() - 3.0 * z.imag()));
                       })) <= 1e-11);
    }

    TEST_CASE("d_z + d_zbar is the x-derivative")
    {
        Gen gen(21);
        const Grid2D g = unit_box(12);
        ComplexField f(g);
        for (auto &v : f.values())
            v = gen.complex();
        const ComplexField sum = zip_field<cplx>(d_z(f), d_zbar(f), [](cplx a, cplx b) { return a + b; }, f.wrap());
        CHECK(max_diff(sum, diff_axis(f, 0, 1)) <= 1e-13);
    }

    TEST_CASE("conjugate symmetry for real fields")
    {
        Gen gen(22);
        for (const Grid2D &g : {unit_box(12), Grid2D::periodic(1, 2, 10, 12)}) {
            ScalarField f(g);
            for (auto &v : f.values())
                v = gen.real();
            const ComplexField c = to_complex(f);
            const ComplexField a = d_z(c), b = d_zbar(c);
            for (std::size_t k = 0; k < a.size(); ++k)
                CHECK(std::conj(a[k]) == b[k]);
        }
    }

    TEST_CASE("path_integrate examples")
    {
        const Grid2D g = Grid2D::box(0, 1, 0, 1, 11, 11);
        const auto one = form(g, [](cplx) { return cplx(1); }, [](cplx) { return cplx(0); });
        const GridPath seg = GridPath::canonical({2, 1}, {9, 7});
        CHECK(std::abs(path_integrate(one, seg) - (g.z(9, 7) - g.z(2, 1))) <= 1e-15);

        const auto zf = form(g, [](cplx z) { return z; }, [](cplx) { return cplx(0); });
        CHECK(std::abs(path_integrate(zf, GridPath::straight({0, 0}, {10, 0})) - 0.5) <= 1e-15);

        // Green: ∮ z̄ dz = 2i·Area counterclockwise
        const auto zb = form(g, [](cplx z) { return std::conj(z); }, [](cplx) { return cplx(0); });
        const cplx loop = path_integrate(zb, GridPath::rectangle({1, 2}, {8, 6}));
        const double area = 7 * g.hx() * 4 * g.hy();
        CHECK(std::abs(loop - 2.0 * I * area) <= 1e-14);

        CHECK_THROWS_AS(path_integrate(one, GridPath::straight({9, 0}, {11, 0})), DomainError);
        GridPath jump;
        jump.nodes = {{0, 0}, {2, 0}};
        CHECK_THROWS_AS(path_integrate(one, jump), DomainError);
        CHECK_THROWS_AS(GridPath::straight({0, 0}, {1, 1}), DomainError);
    }

    TEST_CASE("paths wrap on periodic axes")
    {
        const Grid2D p = Grid2D::periodic(1, 1, 10, 10);
        const auto one = form(p, [](cplx) { return cplx(1); }, [](cplx) { return cplx(0); });
        CHECK(std::abs(path_integrate(one, GridPath::straight({8, 0}, {13, 0})) - 0.5) <= 1e-15);
    }

    TEST_CASE("path reversal cancels exactly")
    {
        Gen gen(23);
        const Grid2D g = unit_box(16);
        for (int k = 0; k < 50; ++k) {
            ComplexField P(g), Q(g);
            for (auto &v : P.values())
                v = gen.complex(10);
            for (auto &v : Q.values())
                v = gen.complex(10);
            const FormField<cplx> f{P, Q};
            const Node a{gen.integer(0, 15), gen.integer(0, 15)}, b{gen.integer(0, 15), gen.integer(0, 15)};
            const GridPath path = GridPath::canonical(a, b).concat(GridPath::canonical(b, a).reversed().reversed());
            const cplx fwd = path_integrate(f, path), back = path_integrate(f, path.reversed());
            CHECK(fwd + back == cplx(0));
            CHECK(fwd == -back);
        }
    }

    TEST_CASE("path concatenation is additive")
    {
        Gen gen(24);
        const Grid2D g = unit_box(16);
        for (int k = 0; k < 50; ++k) {
            ComplexField P(g), Q(g);
            for (auto &v : P.values())
                v = gen.complex(10);
            for (auto &v : Q.values())
                v = gen.complex(10);
            const FormField<cplx> f{P, Q};
            auto node = [&] { return Node{gen.integer(0, 15), gen.integer(0, 15)}; };
            const Node a = node(), b = node(), c = node();
            const GridPath ab = GridPath::canonical(a, b), bc = GridPath::canonical(b, c);
            const cplx sum = path_integrate(f, ab) + path_integrate(f, bc);
            const cplx whole = path_integrate(f, ab.concat(bc));
            const double mag = std::max(1.0, std::abs(whole));
            // each side is correctly rounded, so they differ by final roundings only
            CHECK(std::abs(sum - whole) <= 4 * std::numeric_limits<double>::epsilon() * mag);
        }
    }

    TEST_CASE("exact summation")
    {
        ExactSum s;
        for (double x : {1e100, 1.0, -1e100, 1e-100})
            s.add(x);
        CHECK(s.value() == 1.0);
        ExactSum t;
        for (int k = 0; k < 10; ++k)
            t.add(0.1);
        CHECK(t.value() == 1.0);
    }

    TEST_CASE("closedness defect")
    {
        const Grid2D g = unit_box(17);
        const auto exact = form(g, [](cplx z) { return 2.0 * z; }, [](cplx) { return cplx(0); });
        CHECK(closedness_defect(exact).max() <= 1e-12);

        const auto zb = form(g, [](cplx z) { return std::conj(z); }, [](cplx) { return cplx(0); });
        const CellField d = closedness_defect(zb);
        CHECK(d.nx == 16);
        CHECK(d.ny == 16);
        const double cell = g.hx() * g.hy();
        for (double v : d.values)
            CHECK(v == doctest::Approx(2 * cell));
    }

    TEST_CASE("canonical integration of an exact form")
    {
        const Grid2D g = unit_box(17);
        const auto exact = form(g, [](cplx z) { return 2.0 * z; }, [](cplx) { return cplx(0); });
        const Node base = g.center_node();
        for (PathOrder o : {PathOrder::XThenY, PathOrder::YThenX}) {
            const ComplexField F = integrate_canonical(exact, base, o);
            const cplx zb = g.z(base);
            CHECK(max_diff(F, ComplexField::sample(g, [&](cplx z) { return z * z - zb * zb; })) <= 1e-12);
        }
    }

    TEST_CASE("line antiderivatives")
    {
        const int n = 32;
        const double L = 2 * pi, h = L / n;
        std::vector<cplx> g(n);
        for (int k = 0; k < n; ++k)
            g[k] = std::cos(k * h);
        const LineIntegral s = spectral_antiderivative(g, h, 1.0, 0);
        for (int k = 0; k < n; ++k)
            CHECK(std::abs(s.values[k] - std::sin(k * h)) <= 1e-13);
        for (int k = 0; k < n; ++k)
            CHECK(std::abs(s.shifted[k] - std::sin(k * h)) <= 1e-13);

        std::vector<cplx> lin(11);
        for (int k = 0; k < 11; ++k)
            lin[k] = double(k);
        const LineIntegral t = trapezoid_antiderivative(lin, 1.0, 5);
        for (int k = 0; k < 11; ++k)
            CHECK(std::abs(t.values[k] - 0.5 * (k * k - 25.0)) <= 1e-13);
    }

    TEST_CASE("solve_dbar examples")
    {
        const Grid2D p = Grid2D::periodic(2 * pi, 2 * pi, 32, 32);
        CHECK(max_norm(solve_dbar(ComplexField(p))) == 0.0);

        const ComplexField g1 = sample(p, [](cplx z) { return 0.5 * I * std::exp(I * z.real()); });
        CHECK(max_diff(solve_dbar(g1), sample(p, [](cplx z) { return std::exp(I * z.real()); })) <= 1e-10);

        const ComplexField g2 = sample(p, [](cplx z) { return cplx(-0.5 * std::sin(2 * z.real())); });
        CHECK(max_diff(solve_dbar(g2), sample(p, [](cplx z) { return cplx(0.5 * std::cos(2 * z.real())); })) <= 1e-10);

        CHECK_THROWS_AS(solve_dbar(ComplexField(p, 1.0)), IncompatibilityError);
        CHECK_THROWS_AS(solve_dbar(ComplexField(unit_box(16))), UnsupportedGridError);
    }

    TEST_CASE("solve_dbar inverts d_zbar on zero-mean fields")
    {
        Gen gen(25);
        for (int k = 0; k < 20; ++k) {
            const Grid2D p = Grid2D::periodic(gen.real(1, 7), gen.real(1, 7), 32, 32);
            const ComplexField g = random_trig(p, gen);
            const ComplexField back = d_zbar(solve_dbar(g), Scheme::Spectral);
            CHECK(max_diff(back, g) <= 1e-10 * max_norm(g));
        }
    }
}
