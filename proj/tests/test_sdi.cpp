#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cusp/sdi.hpp"

using namespace cusp;
using namespace cusp::sdi;
using Catch::Approx;

TEST_CASE("slow field on a branch", "[sdi]") {
    REQUIRE(slow_field_on_branch({0.0, 1.0}) == Approx(-1.0 / 3.0));
    REQUIRE(slow_field_on_branch({1.0, 0.0}) == Approx(-1.0));
    REQUIRE_THROWS_AS(slow_field_on_branch({-3.0, 1.0}), FoldSingularityError);

    SECTION("matches the chord slope of neighbouring critical roots") {
        // branch through (b, z) = (0, 1): a = -z^3, z(a) = (-a)^{1/3}
        const double h = 1e-6;
        const BranchPoint p{0.0, 1.0};
        const double a0 = p.a();
        auto z_of_a = [&](double a) {
            // attracting positive root of z^3 + 0*z + a = 0
            return std::cbrt(-a);
        };
        const double chord = (z_of_a(a0 + h) - z_of_a(a0 - h)) / (2 * h);
        REQUIRE(slow_field_on_branch(p) == Approx(chord).margin(1e-6));
    }
}

TEST_CASE("closed-form slow divergence integral", "[sdi]") {
    REQUIRE(sdi_closed(0.0, 1.0, -1.0) == Approx(-3.6));
    REQUIRE(sdi_closed(0.0, 1.0, 1.0) == 0.0);
    REQUIRE(sdi_closed(1.0, 1.0, 0.0) == Approx(-24.0 / 5.0));
    REQUIRE_THROWS_AS(sdi_closed(-3.0, 1.0, -2.0), FoldSingularityError);

    SECTION("antiderivative differentiates to the divergence integrand") {
        const double h = 1e-5;
        for (double b : {-1.0, -0.25, 0.0, 0.5, 1.0})
            for (double z = -2.0; z <= 2.01; z += 0.21) {
                const double fd =
                    (sdi_antiderivative(b, z + h) - sdi_antiderivative(b, z - h)) / (2 * h);
                const double d = 3 * z * z + b;
                REQUIRE(fd == Approx(d * d).margin(1e-7));
            }
    }
}

TEST_CASE("quadrature oracle agrees with the closed form", "[sdi]") {
    REQUIRE(sdi_quadrature(0.0, 1.0, -1.0) == Approx(-3.6).margin(1e-10));
    REQUIRE(sdi_quadrature(0.0, 1.0, 1.0) == 0.0);
    REQUIRE_THROWS_AS(sdi_quadrature(-3.0, 1.5, -1.5), FoldSingularityError);

    SECTION("200-case grid, 1e-9 absolute") {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> ub(-1.0, 1.0);
        std::uniform_real_distribution<double> uen(0.5, 2.0);
        std::uniform_real_distribution<double> uex(-2.0, -0.5);
        int done = 0;
        while (done < 200) {
            const double b = ub(rng), zen = uen(rng), zex = uex(rng);
            if (b < 0.0 && (3 * zen * zen + b < 0.1 || 3 * zex * zex + b < 0.1)) continue;
            if (b < 0.0) continue;   // attracting-only paths for the grid
            REQUIRE(sdi_closed(b, zen, zex) ==
                    Approx(sdi_quadrature(b, zen, zex, 1e-11)).margin(1e-9));
            ++done;
        }
    }
    SECTION("negative-b attracting segments away from the fold") {
        for (double b : {-1.0, -0.5, -0.2}) {
            const double zf = std::sqrt(-b / 3.0);
            const double zen = zf + 0.4, zex = zf + 0.1;
            REQUIRE(sdi_closed(b, zen, zex) ==
                    Approx(sdi_quadrature(b, zen, zex, 1e-11)).margin(1e-9));
        }
    }
}

TEST_CASE("I is negative along attracting paths", "[sdi]") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ub(0.0, 1.0);
    std::uniform_real_distribution<double> uen(0.3, 2.0);
    for (int i = 0; i < 100; ++i) {
        const double b = ub(rng);
        const double zen = uen(rng);
        const double zex = -uen(rng);
        REQUIRE(sdi_closed(b, zen, zex) < 0.0);
    }
}

TEST_CASE("endpoints from the sections", "[sdi]") {
    {
        auto [zen, zex] = endpoints_for_sections(1.0, 1.0, 0.0);
        REQUIRE(zen == Approx(1.0));
        REQUIRE(zex == Approx(-1.0));
    }
    {
        // z^3 - 3z - 2 = (z-2)(z+1)^2: entry root with z>0 is 2
        auto [zen, zex] = endpoints_for_sections(2.0, 2.0, -3.0);
        REQUIRE(zen == Approx(2.0));
        REQUIRE(zex == Approx(-2.0));
    }
    {
        auto [zen, zex] = endpoints_for_sections(8.0, 1.0, 0.0);
        REQUIRE(zen == Approx(2.0));
        (void)zex;
    }
    REQUIRE_THROWS_AS(endpoints_for_sections(-1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("flow oracle cross-validates at low precision", "[sdi][slow]") {
    const double closed = sdi_closed(0.0, 1.0, -1.0);
    const double flow = sdi_flow_oracle(0.0, 1.0, -1.0, 1e-5);
    REQUIRE(flow == Approx(closed).margin(1e-3));
}
