#include "support.hpp"

#include "spinorsurf/moebius.hpp"
#include "spinorsurf/moutard.hpp"

#include <doctest.h>

using namespace spinorsurf;
using testgen::Gen;
using testgen::vdist;

namespace {

Spinor sphere_psi(cplx z)
{
    const double q = 1 + std::norm(z);
    return {(1.0 + I) * std::conj(z) / q, (1.0 + I) / q};
}

struct Case {
    Grid2D g;
    SpinorField psi;
    Node base;
    Vec3 x0;
    SurfaceFrame f;
};

Case sphere_case(int n, Vec3 center)
{
    Case c{Grid2D::box(-2, 2, -2, 2, n, n), {}, {}, {}, {}};
    c.psi = SpinorField::sample(c.g, sphere_psi);
    c.base = c.g.center_node();
    c.x0 = Vec3{0, 0, -1} + center; // stereographic image of z = 0
    c.f = integrate_surface(c.psi, c.base, c.x0);
    return c;
}

Case plane_case(int n)
{
    Case c{Grid2D::box(-1, 1, -1, 1, n, n), {}, {}, {0, 0, 1}, {}};
    c.psi = SpinorField(c.g, {1.0, 0.0});
    c.base = c.g.center_node();
    c.f = integrate_surface(c.psi, c.base, c.x0);
    return c;
}

Case enneper_case(int n)
{
    Case c{Grid2D::box(-0.8, 0.8, -0.8, 0.8, n, n), {}, {}, {0, 0, 1}, {}};
    c.psi = SpinorField::sample(c.g, [](cplx z) { return Spinor{1.0, std::conj(z)}; });
    c.base = c.g.center_node();
    c.f = integrate_surface(c.psi, c.base, c.x0);
    return c;
}

double plane_inverted_U(cplx z) { return -1 / (std::norm(z) + 1); }

double diff(const ScalarField &a, const ScalarField &b) { return max_diff(a, b); }

double scale_of(const ScalarField &a, const ScalarField &b) { return std::max(max_norm(a), max_norm(b)); }

} // namespace

TEST_SUITE("moebius")
{
    TEST_CASE("invert_point examples")
    {
        CHECK(invert_point({1, 0, 0}) == Vec3{-1, 0, 0});
        CHECK(invert_point({0, 2, 0}) == Vec3{0, -0.5, 0});
        CHECK_THROWS_AS(invert_point({0, 0, 0}), SingularityError);
        Gen g(31);
        for (int k = 0; k < 1000; ++k) {
            const Vec3 v = g.nonzero_vec3(5);
            CHECK(vdist(invert_point(invert_point(v)), v) <= 1e-14 * std::max(1.0, norm(v)));
        }
    }

    TEST_CASE("invert_tangent examples")
    {
        CHECK(invert_tangent({0, 0, 1}, {1, 0, 0}) == Vec3{-1, 0, 0});
        CHECK(invert_tangent({0, 0, 1}, {0, 0, 1}) == Vec3{0, 0, 1});
        CHECK_THROWS_AS(invert_tangent({0, 0, 0}, {1, 0, 0}), SingularityError);
    }

    TEST_CASE("invert_tangent is the differential of invert_point")
    {
        Gen g(32);
        for (int k = 0; k < 200; ++k) {
            const Vec3 x = g.nonzero_vec3(2) + Vec3{0, 0, 3};
            const Vec3 u = g.vec3();
            const double h = 1e-5;
            const Vec3 fd = (invert_point(x + h * u) - invert_point(x - h * u)) / (2 * h);
            CHECK(vdist(invert_tangent(x, u), fd) <= 1e-8);
        }
    }

    TEST_CASE("inversion is conformal")
    {
        Gen g(33);
        for (int k = 0; k < 1000; ++k) {
            const Vec3 x = g.nonzero_vec3(3), u = g.vec3(), v = g.vec3();
            const double r4 = norm2(x) * norm2(x);
            const double lhs = dot(invert_tangent(x, u), invert_tangent(x, v)) * r4;
            CHECK(std::abs(lhs - dot(u, v)) <= 1e-12 * std::max(1.0, norm(u) * norm(v)));
            CHECK(testgen::rel(norm2(invert_tangent(x, u)) * r4, norm2(u)) <= 1e-12);
        }
    }

    TEST_CASE("image of an offset sphere is a sphere")
    {
        // antipodal points (0,0,1) and (0,0,3) fix the image sphere
        const Vec3 p = invert_point({0, 0, 1}), q = invert_point({0, 0, 3});
        const Vec3 center = 0.5 * (p + q);
        const double radius = 0.5 * norm(p - q);
        CHECK(vdist(center, {0, 0, -2.0 / 3}) <= 1e-15);
        CHECK(radius == doctest::Approx(1.0 / 3));

        double prev = 0;
        for (int n : {65, 129}) {
            const Case c = sphere_case(n, {0, 0, 2});
            const InvertedSurface inv = invert_surface(c.f);
            CHECK(inv.singular.empty());
            double dev = 0;
            for (const Vec3 &r : inv.frame.r.values())
                dev = std::max(dev, std::abs(norm(r - center) - radius));
            const double h = c.g.hx();
            CHECK(dev <= 5 * h * h);
            if (prev > 0)
                CHECK(std::log2(prev / dev) == doctest::Approx(2.0).epsilon(0.15));
            prev = dev;
        }
    }

    TEST_CASE("image of the plane x3 = 1 is a sphere through the origin")
    {
        // three non-collinear points of the plane and the image circle through them
        const Vec3 a = invert_point({0, 0, 1}), b = invert_point({1, 0, 1}), d = invert_point({0, 1, 1});
        CHECK(vdist(a, {0, 0, -1}) == 0.0);
        const Vec3 center{0, 0, -0.5};
        CHECK(norm(b - center) == doctest::Approx(0.5));
        CHECK(norm(d - center) == doctest::Approx(0.5));

        const Case c = plane_case(33);
        const InvertedSurface inv = invert_surface(c.f);
        for (const Vec3 &r : inv.frame.r.values())
            CHECK(std::abs(norm(r - center) - 0.5) <= 1e-14);
    }

    TEST_CASE("surface inversion is an involution")
    {
        const Case c = sphere_case(65, {0.3, -0.2, 2});
        const InvertedSurface once = invert_surface(c.f);
        const InvertedSurface twice = invert_surface(once.frame);
        CHECK(max_diff(twice.frame.r, c.f.r) <= 1e-10);
        CHECK(max_diff(twice.frame.n, c.f.n) <= 1e-10);
        CHECK(max_diff(twice.frame.e_alpha, c.f.e_alpha) <= 1e-10);
    }

    TEST_CASE("inverted normal is the normal of the image sphere")
    {
        const Vec3 center{0, 0, -2.0 / 3};
        const double radius = 1.0 / 3;
        double prev = 0;
        for (int n : {65, 129}) {
            const Case c = sphere_case(n, {0, 0, 2});
            const InvertedSurface inv = invert_surface(c.f);
            double worst = 0;
            for (std::size_t k = 0; k < c.g.size(); ++k) {
                const Vec3 n = inv.frame.n[k];
                CHECK(std::abs(norm(n) - 1) <= 1e-12);
                const Vec3 radial = (inv.frame.r[k] - center) / radius;
                worst = std::max(worst, std::min(norm(n - radial), norm(n + radial)));
            }
            // the error is inherited from r, magnified by 1/|r|² ≤ 1
            CHECK(worst <= 5 * c.g.hx() * c.g.hx() / (radius * radius));
            if (prev > 0)
                CHECK(std::log2(prev / worst) == doctest::Approx(2.0).epsilon(0.15));
            prev = worst;
        }
    }

    TEST_CASE("inverted_potential examples")
    {
        const Case p = plane_case(33);
        const ScalarField up = inverted_potential(p.f);
        CHECK(diff(up, ScalarField::sample(p.g, plane_inverted_U)) <= 1e-12);

        // nodes with r ⊥ n keep their potential
        const Grid2D g = Grid2D::box(0, 1, 0, 1, 8, 8);
        SurfaceFrame s;
        s.r = Vec3Field(g, {1, 2, 0});
        s.n = Vec3Field(g, {0, 0, 1});
        s.e_alpha = ScalarField(g, 3.0);
        s.U = ScalarField(g, 0.7);
        CHECK(diff(inverted_potential(s), s.U) == 0.0);

        // the origin is excluded and reported
        s.r(2, 3) = Vec3{};
        std::vector<Node> sing;
        const ScalarField u = inverted_potential(s, &sing);
        REQUIRE(sing.size() == 1);
        CHECK(sing[0] == Node{2, 3});
        CHECK(u(2, 3) == 0.0);
    }

    TEST_CASE("unit sphere about the origin")
    {
        const Case c = sphere_case(129, {0, 0, 0});
        const ScalarField u_geo = inverted_potential(c.f);
        // inward normal: ⟨r, n⟩ = −1 and Ũ = U − eᵅ = −1/(1+|z|²)
        const ScalarField expect = ScalarField::sample(c.g, [](cplx z) { return -1 / (1 + std::norm(z)); });
        const double h2 = c.g.hx() * c.g.hx();
        CHECK(diff(u_geo, expect) <= 5 * h2);
        const InversionReport rep = inversion_report(c.f, 2);
        CHECK(rep.max_discrepancy <= 10 * h2 * scale_of(rep.U_formula, c.f.U));
    }

    TEST_CASE("dual path for the inverted potential")
    {
        struct Named {
            const char *name;
            Case (*make)(int);
        };
        const Named cases[] = {{"plane", plane_case},
                               {"sphere", [](int n) { return sphere_case(n, {0, 0, 2}); }},
                               {"enneper", enneper_case}};
        for (const Named &nc : cases) {
            CAPTURE(nc.name);
            double prev = 0;
            for (int n : {65, 129}) {
                const Case c = nc.make(n);
                const InversionReport rep = inversion_report(c.f);
                const double h2 = c.g.hx() * c.g.hx();
                CHECK(rep.max_discrepancy <= 10 * h2 * scale_of(rep.U_formula, c.f.U));
                if (prev > 0)
                    CHECK(std::log2(prev / rep.max_discrepancy) == doctest::Approx(2.0).epsilon(0.15));
                prev = rep.max_discrepancy;
            }
        }
    }

    TEST_CASE("inversion report json")
    {
        const Case c = plane_case(17);
        const auto j = inversion_report(c.f).to_json();
        CHECK(j.contains("max_discrepancy"));
        CHECK(j["singular_nodes"].empty());
    }

    TEST_CASE("inverted spinor solves the inverted Dirac equation")
    {
        for (bool sphere : {false, true}) {
            CAPTURE(sphere);
            double prev = 0;
            for (int n : {65, 129}) {
                const Case c = sphere ? sphere_case(n, {0, 0, 2}) : plane_case(n);
                const QuatField P0 = matrix_solution(c.psi);
                const QuatField S = s_matrix_surface(P0, c.base, c.x0);
                const InvertedSpinor inv = inverted_spinor(P0, S);
                for (bool b : inv.singular)
                    CHECK_FALSE(b);
                const ScalarField U = sphere ? ScalarField::sample(c.g, [](cplx z) { return 1 / (1 + std::norm(z)); })
                                             : ScalarField(c.g);
                const ScalarField U_mat = inverted_potential_matrix(P0, S, U);
                const double res = dirac_residual_matrix(inv.psi, U_mat);
                CHECK(res <= 5 * c.g.hx() * c.g.hx() * third_derivative_scale(inv.psi));
                if (prev > 0)
                    CHECK(std::log2(prev / res) == doctest::Approx(2.0).epsilon(0.15));
                prev = res;
            }
        }
    }

    TEST_CASE("conformal factor of the inverted spinor")
    {
        const Case c = sphere_case(129, {0, 0, 2});
        const QuatField P0 = matrix_solution(c.psi);
        const QuatField S = s_matrix_surface(P0, c.base, c.x0);
        const InvertedSpinor inv = inverted_spinor(P0, S);
        const ScalarField e = conformal_factor(columns(inv.psi)[0]);
        const ScalarField ratio = zip_field<double>(c.f.e_alpha, c.f.r, [](double a, const Vec3 &r) {
            return a / norm2(r);
        }, c.f.e_alpha.wrap());
        CHECK(diff(e, ratio) <= 5 * c.g.hx() * c.g.hx());
    }

    TEST_CASE("the spinor sign does not change the surface")
    {
        const Case c = sphere_case(33, {0, 0, 2});
        const QuatField P0 = matrix_solution(c.psi);
        const QuatField S = s_matrix_surface(P0, c.base, c.x0);
        const InvertedSpinor inv = inverted_spinor(P0, S);
        const SpinorField col = columns(inv.psi)[0];
        const SpinorField neg = map_field<Spinor>(col, [](const Spinor &s) { return -s; });
        const Vec3 y0 = invert_point(c.x0);
        const SurfaceFrame a = integrate_surface(col, c.base, y0), b = integrate_surface(neg, c.base, y0);
        CHECK(max_diff(a.r, b.r) == 0.0);
        CHECK(max_diff(a.n, b.n) == 0.0);
    }

    TEST_CASE("matrix form of the inverted potential")
    {
        const Case p = plane_case(65);
        const QuatField P0 = matrix_solution(p.psi);
        const QuatField S = s_matrix_surface(P0, p.base, p.x0);
        double im = 1;
        const ScalarField u19 = inverted_potential_matrix(P0, S, ScalarField(p.g), &im);
        CHECK(im <= 1e-12);
        CHECK(diff(u19, ScalarField::sample(p.g, plane_inverted_U)) <= 1e-12);

        const Case s = sphere_case(129, {0, 0, 2});
        const QuatField Q0 = matrix_solution(s.psi);
        const QuatField T = s_matrix_surface(Q0, s.base, s.x0);
        const ScalarField U = ScalarField::sample(s.g, [](cplx z) { return 1 / (1 + std::norm(z)); });
        const ScalarField a = inverted_potential_matrix(Q0, T, U);
        const ScalarField b = inverted_potential(s.f);
        const double quad = max_diff(s.f.r, integrate_surface(s.psi, s.base, s.x0, PathOrder::YThenX).r);
        const double h2 = s.g.hx() * s.g.hx();
        CHECK(diff(a, b) <= 10 * h2 * scale_of(a, U) + quad);

        // a matrix field unrelated to the surface makes the formula complex
        Gen gen(34);
        QuatField junk(s.g);
        for (auto &q : junk.values())
            q = gen.quat() + Quat(3.0, 0.0);
        CHECK_THROWS_AS(inverted_potential_matrix(Q0, junk, U), ConstraintError);
    }

    TEST_CASE("pipeline is deterministic")
    {
        const Case a = sphere_case(33, {0, 0, 2}), b = sphere_case(33, {0, 0, 2});
        const InversionReport ra = inversion_report(a.f), rb = inversion_report(b.f);
        CHECK(ra.U_geometric.values() == rb.U_geometric.values());
        CHECK(ra.max_discrepancy == rb.max_discrepancy);
    }
}
