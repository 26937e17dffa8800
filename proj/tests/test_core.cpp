#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cusp/core.hpp"

using namespace cusp;
using Catch::Approx;

TEST_CASE("fast field of the principal part", "[core]") {
    const A3System sys = A3System::principal_part();

    SECTION("vanishes at the origin") {
        const Vec4 v = eval_fast(sys, {0, 0, 0, 0});
        for (double x : v) REQUIRE(x == 0.0);
    }
    SECTION("on the slow manifold only the a-component moves") {
        // z^3 + b z + a = 1 + 0 - 1 = 0 at (-1, 0, 1)
        const Vec4 v = eval_fast(sys, {-1, 0, 1, 0.1});
        REQUIRE(v[0] == Approx(0.1));
        REQUIRE(v[1] == 0.0);
        REQUIRE(v[2] == Approx(0.0).margin(1e-15));
        REQUIRE(v[3] == 0.0);
    }
    SECTION("fast contraction off the manifold") {
        // -(8 - 2 + 0) = -6
        const Vec4 v = eval_fast(sys, {0, -1, 2, 0});
        REQUIRE(v[2] == Approx(-6.0));
    }
}

TEST_CASE("slow field is the fast field over eps", "[core]") {
    const A3System sys = A3System::principal_part();

    REQUIRE(eval_slow(sys, {-1, 0, 1, 0.1})[0] == Approx(1.0));
    const Vec4 v = eval_slow(sys, {0, 0, 1, 0.5});
    REQUIRE(v[0] == Approx(1.0));
    REQUIRE(v[2] == Approx(-2.0));
    REQUIRE_THROWS_AS(eval_slow(sys, {0, 0, 1, 0.0}), DomainError);

    SECTION("eps * eval_slow == eval_fast componentwise") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        std::uniform_real_distribution<double> ue(1e-4, 1.0);
        for (int i = 0; i < 200; ++i) {
            const StatePoint p{u(rng), u(rng), u(rng), ue(rng)};
            const Vec4 f = eval_fast(sys, p);
            const Vec4 s = eval_slow(sys, p);
            for (int k = 0; k < 4; ++k) REQUIRE(s[k] * p.eps == Approx(f[k]).margin(1e-14));
        }
    }
}

TEST_CASE("layer field freezes the slow variables", "[core]") {
    const A3System sys = A3System::principal_part();
    REQUIRE(layer_field(sys, {0, 0, 0, 0.3}) == Vec4{0, 0, 0, 0});
    REQUIRE(layer_field(sys, {-1, 0, 0, 0.3})[2] == Approx(1.0));
    REQUIRE(layer_field(sys, {0, -1, 1, 0})[2] == Approx(0.0).margin(1e-15));
}

TEST_CASE("perturbation evaluation errors name the component", "[core]") {
    auto bad = [](const StatePoint&) { return std::numeric_limits<double>::quiet_NaN(); };
    auto good = [](const StatePoint&) { return 0.0; };
    const A3System sys = A3System::perturbed(good, bad, good);
    REQUIRE_THROWS_WITH(eval_fast(sys, {0, 0, 0, 0.1}),
                        Catch::Matchers::ContainsSubstring("f2"));
}

TEST_CASE("critical branches: examples", "[core]") {
    SECTION("triple root at the cusp") {
        const CubicRoots r = critical_branches(0, 0);
        REQUIRE(r.count() == 1);
        REQUIRE(r.roots[0] == 0.0);
        REQUIRE(r.multiplicity[0] == 3);
    }
    SECTION("z(z^2-1)") {
        const CubicRoots r = critical_branches(0, -1);
        REQUIRE(r.count() == 3);
        REQUIRE(r.roots[0] == Approx(-1.0));
        REQUIRE(r.roots[1] == Approx(0.0).margin(1e-15));
        REQUIRE(r.roots[2] == Approx(1.0));
    }
    SECTION("z^3 = 1 has one real root") {
        const CubicRoots r = critical_branches(-1, 0);
        REQUIRE(r.count() == 1);
        REQUIRE(r.roots[0] == Approx(1.0));
        REQUIRE(std::abs(std::pow(r.roots[0], 3) - 1.0) < 1e-12);
    }
    SECTION("double root case (z-2)(z+1)^2") {
        // z^3 - 3 z - 2 = (z - 2)(z + 1)^2
        const CubicRoots r = critical_branches(-2, -3);
        REQUIRE(r.count() == 2);
        REQUIRE(r.roots[0] == Approx(-1.0));
        REQUIRE(r.roots[1] == Approx(2.0));
        REQUIRE(r.multiplicity[0] == 2);
        REQUIRE(r.multiplicity[1] == 1);
    }
}

TEST_CASE("critical branches: residual and count properties", "[core]") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 5000; ++i) {
        const double a = u(rng), b = u(rng);
        const CubicRoots r = critical_branches(a, b);
        const double disc = -4 * b * b * b - 27 * a * a;
        if (disc > 0)
            REQUIRE(r.count() == 3);
        else if (disc < 0)
            REQUIRE(r.count() == 1);
        double prev = -1e300;
        for (double z : r.roots) {
            REQUIRE(std::abs(z * z * z + b * z + a) < 1e-12 * std::max(1.0, std::abs(a) + std::abs(b)));
            REQUIRE(z >= prev);
            prev = z;
        }
    }
    // tight absolute residual on the unit-scale working range
    std::uniform_real_distribution<double> v(-2.0, 2.0);
    for (int i = 0; i < 5000; ++i) {
        const double a = v(rng), b = v(rng);
        for (double z : critical_branches(a, b).roots)
            REQUIRE(std::abs(z * z * z + b * z + a) < 1e-12);
    }
}

TEST_CASE("point classification", "[core]") {
    REQUIRE(classify_point(0, 0, 0) == PointClass::Cusp);
    // on Delta via x2 = -3 z^2, x1 = 2 z^3 at z = 1: both defining equations hold
    REQUIRE(std::abs(1.0 - 3.0 + 2.0) == 0.0);
    REQUIRE(classify_point(2, -3, 1) == PointClass::Fold);
    REQUIRE(classify_point(-1, 0, 1) == PointClass::Regular);
    REQUIRE(classify_point(5, 0, 1) == PointClass::OffManifold);

    SECTION("fold curve parametrization lands on Fold away from z=0") {
        for (double z : {-1.5, -0.3, 0.2, 0.8, 2.0}) {
            auto [a, b] = fold_curve_param(z);
            REQUIRE(std::abs(z * z * z + b * z + a) < 1e-13);
            REQUIRE(std::abs(3 * z * z + b) < 1e-13);
            REQUIRE(classify_point(a, b, z) == PointClass::Fold);
        }
        auto [a0, b0] = fold_curve_param(0.0);
        REQUIRE(a0 == 0.0);
        REQUIRE(b0 == 0.0);
        REQUIRE(classify_point(a0, b0, 0.0) == PointClass::Cusp);
    }
}

TEST_CASE("potential and its z-derivative", "[core]") {
    REQUIRE(potential(0, 0, 0) == 0.0);
    REQUIRE(potential(0, 0, 1) == Approx(0.25));
    REQUIRE(potential(1, -2, 1) == Approx(0.25));

    SECTION("dV/dz equals the cubic by central differences on a grid") {
        const double h = 1e-5;
        for (int ia = 0; ia < 10; ++ia)
            for (int ib = 0; ib < 10; ++ib)
                for (int iz = 0; iz < 10; ++iz) {
                    const double a = -2.0 + 4.0 * ia / 9.0;
                    const double b = -2.0 + 4.0 * ib / 9.0;
                    const double z = -2.0 + 4.0 * iz / 9.0;
                    const double fd =
                        (potential(a, b, z + h) - potential(a, b, z - h)) / (2 * h);
                    REQUIRE(fd == Approx(z * z * z + b * z + a).margin(1e-8));
                }
    }
}

TEST_CASE("quasihomogeneous grading", "[core]") {
    REQUIRE(quasihomogeneous_order({1, 1, 0, 0, 1.0}) == 5);   // x1 x2
    REQUIRE(quasihomogeneous_order({0, 0, 1, 1, 1.0}) == 6);   // eps z
    REQUIRE(quasihomogeneous_order({0, 0, 0, 0, 1.0}) == 0);   // constant

    SECTION("additive under monomial multiplication") {
        std::mt19937_64 rng(7);
        std::uniform_int_distribution<int> e(0, 5);
        for (int i = 0; i < 200; ++i) {
            const Monomial m1{e(rng), e(rng), e(rng), e(rng), 1.0};
            const Monomial m2{e(rng), e(rng), e(rng), e(rng), 1.0};
            const Monomial prod{m1.alpha + m2.alpha, m1.beta + m2.beta, m1.gamma + m2.gamma,
                                m1.delta + m2.delta, 1.0};
            REQUIRE(quasihomogeneous_order(prod) ==
                    quasihomogeneous_order(m1) + quasihomogeneous_order(m2));
        }
    }
}

TEST_CASE("normal-form admissibility condition", "[core]") {
    // k=3, i=1: bound 2*3-1+1 = 6; eps*x1 has order 8
    REQUIRE(check_nf_condition({{1, 0, 0, 1, 1.0}}, 1, 3));
    // k=3, i=3: bound 4; eps has order 5
    REQUIRE(check_nf_condition({{0, 0, 0, 1, 1.0}}, 3, 3));
    // x1 carries no eps: violates condition 1
    REQUIRE_FALSE(check_nf_condition({{1, 0, 0, 0, 1.0}}, 1, 3));
    // eps*z has order 6 < 7 = 2*4-2+1
    REQUIRE_FALSE(check_nf_condition({{0, 0, 1, 1, 1.0}}, 2, 4));
    REQUIRE_THROWS_AS(check_nf_condition({}, 1, 1), DomainError);
    REQUIRE_THROWS_AS(check_nf_condition({}, 4, 3), DomainError);
}

TEST_CASE("stock flat perturbations", "[core]") {
    SECTION("radial bump is flat at the origin") {
        REQUIRE(flat_radial_bump({0, 0, 0, 0}) == 0.0);
        const double s = 1e-2;  // |p|^2 = 3e-4
        REQUIRE(flat_radial_bump({s, s, s, 0}) < 1e-100);
        // grows toward exp(-1/s) away from the origin
        REQUIRE(flat_radial_bump({1, 1, 1, 0}) == Approx(std::exp(-1.0 / 3.0)));
    }
    SECTION("eps bump is flat along eps = 0") {
        REQUIRE(flat_eps_bump({1, 1, 1, 0.0}) == 0.0);
        REQUIRE(flat_eps_bump({0, 0, 0, 1e-3}) == Approx(std::exp(-std::pow(1e-3, -0.4))));
        // decays faster than any power of eps
        double prev_ratio = 1.0;
        for (double eps : {1e-2, 5e-3, 2.5e-3, 1.25e-3}) {
            const double ratio = flat_eps_bump({0, 0, 0, eps}) / (eps * eps);
            REQUIRE(ratio < prev_ratio);
            prev_ratio = ratio;
        }
    }
    SECTION("amplitude zero evaluates bit-for-bit like the principal part") {
        const A3System flat0 = stock_flat_system(0.0);
        const A3System prin = A3System::principal_part();
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int i = 0; i < 100; ++i) {
            const StatePoint p{u(rng), u(rng), u(rng), std::abs(u(rng)) / 2};
            const Vec4 vf = eval_fast(flat0, p);
            const Vec4 vp = eval_fast(prin, p);
            for (int k = 0; k < 4; ++k) REQUIRE(vf[k] == vp[k]);
        }
    }
}
