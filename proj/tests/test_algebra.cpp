#include "support.hpp"

#include "spinorsurf/algebra.hpp"
#include "spinorsurf/errors.hpp"

#include <doctest.h>

using namespace spinorsurf;
using testgen::Gen;
using testgen::in_h;
using testgen::levi_civita;

namespace {

Mat2 m(cplx a, cplx b, cplx c, cplx d) { return {a, b, c, d}; }

} // namespace

TEST_SUITE("algebra")
{
    TEST_CASE("su2_embed examples")
    {
        CHECK(su2_embed({0, 0, 1}).matrix() == m(I, 0.0, 0.0, -I));
        CHECK(su2_embed({0, 0, 0}).matrix() == Mat2::zero());
        CHECK(su2_embed({1, 2, 3}).matrix() == m(3.0 * I, cplx(-1, -2), cplx(1, -2), -3.0 * I));
    }

    TEST_CASE("su2_extract inverts su2_embed")
    {
        CHECK(su2_extract(Quat(I, 0.0)) == Vec3{0, 0, 1});
        CHECK(su2_extract(Quat()) == Vec3{0, 0, 0});
        CHECK(su2_extract(Quat(3.0 * I, cplx(-1, -2))) == Vec3{1, 2, 3});

        Gen g(11);
        for (int k = 0; k < 1000; ++k) {
            const Vec3 v = g.vec3(10);
            CHECK(su2_extract(su2_embed(v)) == v);
        }
    }

    TEST_CASE("su2_extract rejects a trace")
    {
        CHECK_THROWS_AS(su2_extract(Quat(cplx(1, 1), 0.0)), DomainError);
        CHECK_THROWS_AS(Su2(Quat(0.5, 1.0)), DomainError);
    }

    TEST_CASE("quat_inverse examples")
    {
        CHECK(quat_inverse(su2_embed({0, 0, 1}).quat()) == su2_embed({0, 0, -1}).quat());
        CHECK(quat_inverse(Quat::identity()) == Quat::identity());
        const Quat inv = quat_inverse(su2_embed({2, 0, 0}).quat());
        CHECK(testgen::vdist(su2_extract(inv), {-0.5, 0, 0}) == 0.0);
    }

    TEST_CASE("quat_inverse singular threshold")
    {
        CHECK_THROWS_AS(quat_inverse(Quat()), SingularityError);
        // det scales quadratically, so the cutoff is scale invariant
        CHECK_NOTHROW(quat_inverse(Quat(1e-150, 0.0)));
        CHECK_THROWS_AS(Mat2(1.0, 1.0, 1.0, 1.0).inverse(), SingularityError);
        CHECK_THROWS_AS(Mat2(1.0, 1.0, 1.0, 1.0 + 1e-16).inverse(), SingularityError);
    }

    TEST_CASE("quat_inverse is a two-sided inverse")
    {
        Gen g(12);
        for (int k = 0; k < 1000; ++k) {
            const Quat q = g.quat(3);
            const Quat qi = quat_inverse(q);
            CHECK(max_abs_diff((q * qi).matrix(), Mat2::identity()) <= 1e-13);
            CHECK(max_abs_diff((qi * q).matrix(), Mat2::identity()) <= 1e-13);
        }
    }

    TEST_CASE("pauli matrices")
    {
        CHECK(pauli(2) == m(0.0, -I, I, 0.0));
        CHECK(pauli(1) * pauli(2) == I * pauli(3));
        CHECK((gamma() * gamma()).matrix() == -Mat2::identity());
        CHECK(gamma().matrix() == I * pauli(2));
        CHECK((gamma() * gamma_inverse()) == Quat::identity());
        CHECK_THROWS_AS(pauli(4), std::out_of_range);
        CHECK_THROWS_AS(pauli(-1), std::out_of_range);
    }

    TEST_CASE("pauli relations for all nine pairs")
    {
        for (int a = 1; a <= 3; ++a)
            for (int b = 1; b <= 3; ++b) {
                Mat2 rhs = a == b ? pauli(0) : Mat2::zero();
                for (int c = 1; c <= 3; ++c)
                    rhs += (I * double(levi_civita(a, b, c))) * pauli(c);
                CAPTURE(a);
                CAPTURE(b);
                CHECK(pauli(a) * pauli(b) == rhs);
            }
    }

    TEST_CASE("H is closed under sums and products")
    {
        Gen g(13);
        for (int k = 0; k < 1000; ++k) {
            const Quat p = g.quat(), q = g.quat();
            CHECK(in_h(p.matrix() * q.matrix(), 1e-15));
            CHECK(in_h(p.matrix() + q.matrix(), 0.0));
            CHECK(max_abs_diff((p * q).matrix(), p.matrix() * q.matrix()) <= 1e-15);
            CHECK((p + q).matrix() == p.matrix() + q.matrix());
        }
    }

    TEST_CASE("det is multiplicative")
    {
        Gen g(14);
        for (int k = 0; k < 1000; ++k) {
            const Quat p = g.quat(2), q = g.quat(2);
            CHECK(testgen::rel((p * q).det(), p.det() * q.det()) <= 1e-12);
            const Mat2 a = g.mat2(), b = g.mat2();
            CHECK(std::abs((a * b).det() - a.det() * b.det()) <= 1e-12 * std::max(1.0, std::abs(a.det() * b.det())));
        }
    }

    TEST_CASE("det of an embedded point is its squared length")
    {
        Gen g(15);
        for (int k = 0; k < 1000; ++k) {
            const Vec3 v = g.lattice_vec3();
            CHECK(su2_embed(v).quat().det() == norm2(v));
            CHECK(su2_embed(v).matrix().det() == cplx(norm2(v)));
        }
    }

    TEST_CASE("matrix inversion is point inversion")
    {
        Gen g(16);
        for (int k = 0; k < 1000; ++k) {
            const Vec3 v = g.nonzero_vec3(5);
            const Vec3 w = su2_extract(quat_inverse(su2_embed(v).quat()));
            const Vec3 t = -v / norm2(v);
            CHECK(testgen::vdist(w, t) <= 1e-12 * norm(t));
        }
    }

    TEST_CASE("quaternion from matrix")
    {
        CHECK(Quat::from_matrix(gamma().matrix()) == gamma());
        CHECK_THROWS_AS(Quat::from_matrix(pauli(1)), DomainError);
        Gen g(17);
        for (int k = 0; k < 100; ++k) {
            const Mat2 x = g.mat2();
            const Quat p = Quat::project(x);
            CHECK(in_h(p.matrix(), 0.0));
            // projection is idempotent
            CHECK(Quat::project(p.matrix()) == p);
        }
    }

    TEST_CASE("transpose and adjoint stay in H")
    {
        Gen g(18);
        for (int k = 0; k < 100; ++k) {
            const Quat q = g.quat();
            CHECK(q.transpose().matrix() == q.matrix().transpose());
            CHECK(q.adjoint().matrix() == q.matrix().adjoint());
            CHECK(testgen::rel(q.frobenius(), q.matrix().frobenius()) <= 1e-15);
        }
    }
}
