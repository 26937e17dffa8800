#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "cusp/core.hpp"
#include "cusp/odeflow.hpp"

using namespace cusp;
using namespace cusp::ode;
using Catch::Approx;

namespace {

Field decay_field() {
    // u' = -u in slot 0, everything else frozen
    return [](const Vec4& y) { return Vec4{-y[0], 0, 0, 0}; };
}

// the regular normal form: U' = eps, Z' = -Z (state = (U, ., Z, eps))
Field normal_form_field() {
    return [](const Vec4& y) { return Vec4{y[3], 0, -y[2], 0}; };
}

Field fast_field(const A3System& sys) {
    return [sys](const Vec4& y) { return eval_fast(sys, StatePoint::from_vec(y)); };
}

} // namespace

TEST_CASE("integrate: linear decay hits e^{-1}", "[odeflow]") {
    const Trajectory tr = integrate(decay_field(), {1, 0, 0, 0}, {0.0, 1.0});
    REQUIRE(tr.samples.back().y[0] == Approx(std::exp(-1.0)).epsilon(1e-8));

    SECTION("dense output tracks the exact solution mid-step") {
        const Tolerances tol{};
        for (size_t i = 0; i + 1 < tr.samples.size(); ++i) {
            const double tm = 0.5 * (tr.samples[i].t + tr.samples[i + 1].t);
            REQUIRE(std::abs(tr.at(tm)[0] - std::exp(-tm)) < 10.0 * tol.rtol);
        }
    }
    SECTION("interpolant matches samples at the nodes") {
        for (const auto& s : tr.samples)
            REQUIRE(tr.at(s.t)[0] == Approx(s.y[0]).margin(1e-12));
    }
    SECTION("times strictly increasing") {
        for (size_t i = 0; i + 1 < tr.samples.size(); ++i)
            REQUIRE(tr.samples[i].t < tr.samples[i + 1].t);
    }
}

TEST_CASE("integrate: layer equation relaxes to the root of z^3 - 1", "[odeflow]") {
    const A3System sys = A3System::principal_part();
    Field layer = [sys](const Vec4& y) { return layer_field(sys, StatePoint::from_vec(y)); };
    const Trajectory tr = integrate(layer, {-1, 0, 0, 0}, {0.0, 10.0});
    REQUIRE(std::abs(tr.samples.back().y[2] - 1.0) < 1e-6);
    // monotone approach from below
    for (size_t i = 0; i + 1 < tr.samples.size(); ++i)
        REQUIRE(tr.samples[i].y[2] <= tr.samples[i + 1].y[2] + 1e-14);
}

TEST_CASE("integrate: normal form contraction matches closed form", "[odeflow]") {
    // from (U,Z) = (0, Z0), eps = 0.1, until U = 1: Z = Z0 e^{-10}
    const double z0 = 0.7;
    const SectionHit hit = integrate_to_section(normal_form_field(), {0, 0, z0, 0.1},
                                                {Axis::a, 1.0, 0}, +1, {}, 100.0);
    REQUIRE(hit.state[2] == Approx(z0 * std::exp(-10.0)).epsilon(1e-8));
    REQUIRE(hit.t_hit == Approx(10.0).epsilon(1e-9));
    REQUIRE(hit.residual < 1e-10);
}

TEST_CASE("integrate: errors", "[odeflow]") {
    SECTION("blow-up is loud") {
        Field quad = [](const Vec4& y) { return Vec4{y[0] * y[0], 0, 0, 0}; };
        REQUIRE_THROWS_AS(integrate(quad, {1, 0, 0, 0}, {0.0, 10.0}), BlowupError);
    }
    SECTION("bad tolerances rejected") {
        REQUIRE_THROWS_AS(integrate(decay_field(), {1, 0, 0, 0}, {0, 1}, {0.0, 1e-12}),
                          ConfigError);
    }
}

TEST_CASE("integrate_to_section: first crossing, direction, z_sign", "[odeflow]") {
    const A3System sys = A3System::principal_part();

    SECTION("cusp transition exits with z < 0") {
        const SectionHit hit = integrate_to_section(fast_field(sys), {-1, 0, 2, 0.01},
                                                    {Axis::a, 1.0, -1}, +1, {}, 1e5);
        REQUIRE(hit.state[2] < 0.0);
        REQUIRE(std::abs(hit.state[0] - 1.0) < 1e-10);
    }
    SECTION("linear clock hits U=1 at t=10") {
        const SectionHit hit = integrate_to_section(normal_form_field(), {0, 0, 1, 0.1},
                                                    {Axis::a, 1.0, 0}, +1, {}, 100.0);
        REQUIRE(hit.t_hit == Approx(10.0).epsilon(1e-10));
    }
    SECTION("never-crossed section times out with final state") {
        Field layer = [sys](const Vec4& y) {
            return layer_field(sys, StatePoint::from_vec(y));
        };
        try {
            integrate_to_section(layer, {0, 0, 0.5, 0}, {Axis::a, 1.0, 0}, +1, {}, 5.0);
            FAIL("expected timeout");
        } catch (const SectionTimeoutError& e) {
            REQUIRE(e.last_time == Approx(5.0));
            REQUIRE(e.last_state[0] == 0.0);
        }
    }
    SECTION("starting on the section is rejected") {
        REQUIRE_THROWS_AS(integrate_to_section(normal_form_field(), {1, 0, 1, 0.1},
                                               {Axis::a, 1.0, 0}, +1, {}, 10.0),
                          DomainError);
    }
    SECTION("direction filter skips the wrong-way crossing") {
        // harmonic oscillator in (a, z): a' = z, z' = -a, start at angle 0
        Field osc = [](const Vec4& y) { return Vec4{y[2], 0, -y[0], 0}; };
        const SectionHit hit =
            integrate_to_section(osc, {1.0, 0, 0.0, 0}, {Axis::a, 0.5, 0}, +1, {}, 50.0);
        // first decreasing crossing is at t = acos(1/2); increasing at 2pi - acos(1/2)
        REQUIRE(hit.t_hit == Approx(2 * std::acos(-1.0) - std::acos(0.5)).epsilon(1e-8));
    }
}

TEST_CASE("fast/slow time consistency through a section", "[odeflow]") {
    const A3System sys = A3System::principal_part();
    const double eps = 0.05;
    const Vec4 start{-1, 0.2, 1.5, eps};
    Field slow = [sys](const Vec4& y) { return eval_slow(sys, StatePoint::from_vec(y)); };

    const SectionHit hf =
        integrate_to_section(fast_field(sys), start, {Axis::a, 1.0, 0}, +1, {}, 1e6);
    const SectionHit hs = integrate_to_section(slow, start, {Axis::a, 1.0, 0}, +1, {}, 1e6);

    for (int k = 0; k < 4; ++k) REQUIRE(hs.state[k] == Approx(hf.state[k]).margin(1e-6));
    REQUIRE(hs.t_hit == Approx(eps * hf.t_hit).epsilon(1e-6));
}

TEST_CASE("fiber derivative: linear flows are exact", "[odeflow]") {
    SECTION("rate 1, eps 0.1 -> e^{-10}") {
        const double d = fiber_derivative(normal_form_field(), {0, 0, 0.5, 0.1},
                                          {Axis::a, 1.0, 0}, 1e-4);
        REQUIRE(d == Approx(std::exp(-10.0)).epsilon(1e-6));
    }
    SECTION("rate 2, eps 0.5 -> e^{-4}") {
        Field f2 = [](const Vec4& y) { return Vec4{y[3], 0, -2.0 * y[2], 0}; };
        const double d = fiber_derivative(f2, {0, 0, 1.0, 0.5}, {Axis::a, 1.0, 0}, 1e-4);
        REQUIRE(d == Approx(std::exp(-4.0)).epsilon(1e-6));
    }
    SECTION("independent of the base z for linear flows") {
        const FiberDerivative d1 = fiber_derivative_log(normal_form_field(), {0, 0, 0.2, 0.1},
                                                        {Axis::a, 1.0, 0}, +1, 1e-4, {}, 1e4);
        const FiberDerivative d2 = fiber_derivative_log(normal_form_field(), {0, 0, 1.7, 0.1},
                                                        {Axis::a, 1.0, 0}, +1, 1e-4, {}, 1e4);
        REQUIRE(d1.log_abs == Approx(d2.log_abs).margin(1e-8));
    }
}

TEST_CASE("fiber derivative: exponentially small contractions stay measurable",
          "[odeflow]") {
    // contraction e^{-1000}: far below double underflow of the direct difference
    Field f = [](const Vec4& y) { return Vec4{1.0, 0, -1000.0 * (y[2] - 0.5), 0}; };
    const FiberDerivative d =
        fiber_derivative_log(f, {0, 0, 1.3, 0}, {Axis::a, 1.0, 0}, +1, 1e-4, {}, 1e4);
    REQUIRE(d.log_abs == Approx(-1000.0).epsilon(1e-6));
    REQUIRE(d.value == 0.0);   // underflows as a plain double, spec allows rounding to 0
    REQUIRE(d.legs > 1);
}

TEST_CASE("trajectory CSV export", "[odeflow]") {
    const Trajectory tr = integrate(decay_field(), {1, 0, 0.25, 0}, {0.0, 0.5});
    std::ostringstream os;
    tr.write_csv(os);
    const std::string csv = os.str();
    REQUIRE(csv.rfind("t,a,b,z,eps\n", 0) == 0);
    REQUIRE(csv.find("0.25") != std::string::npos);
    // every row has exactly four commas
    size_t pos = csv.find('\n') + 1;
    while (pos < csv.size()) {
        const size_t end = csv.find('\n', pos);
        const std::string row = csv.substr(pos, end - pos);
        REQUIRE(std::count(row.begin(), row.end(), ',') == 4);
        pos = end + 1;
    }
}
