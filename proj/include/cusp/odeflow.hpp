#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cusp/errors.hpp"

namespace cusp::ode {

using Field = std::function<Vec4(const Vec4&)>;

enum class Axis : int { a = 0, b = 1, z = 2, eps = 3 };

// Hyperplane section {state[axis] == value}, optionally constrained to a sign
// of z at the crossing (+1, -1; 0 = unconstrained).
struct Section {
    Axis axis = Axis::a;
    double value = 0.0;
    int z_sign = 0;
};

struct Tolerances {
    double rtol = 1e-10;
    double atol = 1e-12;
};

// Dense-output segment of one accepted Dormand-Prince step on [t0, t0+h].
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    Vec4 r1{}, r2{}, r3{}, r4{}, r5{};
    Vec4 eval(double t) const;
};

class Trajectory {
public:
    struct Sample {
        double t;
        Vec4 y;
    };

    std::vector<Sample> samples;     // accepted steps, strictly monotone in t
    std::vector<DenseStep> steps;    // samples.size() - 1 segments
    std::string field_id;

    double t_front() const { return samples.front().t; }
    double t_back() const { return samples.back().t; }

    // Dense-output evaluation anywhere inside [t_front, t_back].
    Vec4 at(double t) const;

    // header t,a,b,z,eps; one row per accepted step; shortest round-trip floats
    void write_csv(std::ostream& os) const;
};

Trajectory integrate(const Field& field, const Vec4& initial,
                     std::pair<double, double> t_span, const Tolerances& tol = {},
                     const std::string& field_id = "");

struct SectionHit {
    Vec4 state{};
    double t_hit = 0.0;
    double residual = 0.0;   // |state[axis] - value| after polishing
    Trajectory trajectory;
};

// First crossing of `sec` in the given direction (+1: coordinate increasing
// through value, -1: decreasing) starting from `initial` at t = 0.
SectionHit integrate_to_section(const Field& field, const Vec4& initial,
                                const Section& sec, int direction,
                                const Tolerances& tol, double t_max,
                                bool keep_trajectory = false);

// Generic scalar-event integration: stops at the first zero crossing of
// event(t, y) in the requested direction (sign of d(event)/dt at the root;
// 0 = either). Used by integrate_to_section and by manifold locators.
struct EventHit {
    bool hit = false;
    Vec4 state{};
    double t = 0.0;
};
EventHit integrate_until_event(const Field& field, const Vec4& initial,
                               double t_limit,
                               const std::function<double(double, const Vec4&)>& event,
                               int direction, const Tolerances& tol);

// d(Pi_z)/dz of the section map at `base`, central differences over dz0 and
// dz0/2 combined by Richardson extrapolation. The log-form variant chains
// the derivative across sub-sections so exponentially small contractions stay
// measurable; `value` underflows to 0 when exp(log_abs) does.
struct FiberDerivative {
    double value = 0.0;
    double log_abs = 0.0;
    int legs = 1;
};

FiberDerivative fiber_derivative_log(const Field& field, const Vec4& base,
                                     const Section& sec, int direction, double dz0,
                                     const Tolerances& tol, double t_max);

double fiber_derivative(const Field& field, const Vec4& base, const Section& sec,
                        double dz0, const Tolerances& tol = {}, double t_max = 1e6,
                        int direction = +1);

// Shortest decimal representation that round-trips to the same double.
std::string shortest_roundtrip(double x);

} // namespace cusp::ode
