#include "cusp/odeflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>

namespace cusp::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;

constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

Vec4 axpy(const Vec4& y, double h, const Vec4& k) {
    return {y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2], y[3] + h * k[3]};
}

bool finite(const Vec4& y) {
    return std::isfinite(y[0]) && std::isfinite(y[1]) && std::isfinite(y[2]) &&
           std::isfinite(y[3]);
}

struct StepResult {
    Vec4 y1{};
    Vec4 k7{};      // FSAL derivative at y1
    double err = 0.0;
    DenseStep dense{};
};

StepResult attempt_step(const Field& f, double t, const Vec4& y, const Vec4& k1, double h,
                        const Tolerances& tol) {
    Vec4 k2 = f(axpy(y, h * a21, k1));
    Vec4 y3{}, y4{}, y5{}, y6{}, y7{};
    for (int i = 0; i < 4; ++i) y3[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    Vec4 k3 = f(y3);
    for (int i = 0; i < 4; ++i) y4[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    Vec4 k4 = f(y4);
    for (int i = 0; i < 4; ++i)
        y5[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    Vec4 k5 = f(y5);
    for (int i = 0; i < 4; ++i)
        y6[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    Vec4 k6 = f(y6);
    for (int i = 0; i < 4; ++i)
        y7[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    Vec4 k7 = f(y7);

    StepResult r;
    r.y1 = y7;
    r.k7 = k7;

    double err2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double est =
            h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = tol.atol + tol.rtol * std::max(std::abs(y[i]), std::abs(y7[i]));
        const double q = est / sc;
        err2 += q * q;
    }
    r.err = std::sqrt(err2 / 4.0);

    r.dense.t0 = t;
    r.dense.h = h;
    for (int i = 0; i < 4; ++i) {
        const double ydiff = y7[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        r.dense.r1[i] = y[i];
        r.dense.r2[i] = ydiff;
        r.dense.r3[i] = bspl;
        r.dense.r4[i] = ydiff - h * k7[i] - bspl;
        r.dense.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                             d7 * k7[i]);
    }
    return r;
}

double initial_step(const Field& f, const Vec4& y0, const Vec4& k1, double dir,
                    const Tolerances& tol) {
    double dnf = 0.0, dny = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double sc = tol.atol + tol.rtol * std::abs(y0[i]);
        dnf += (k1[i] / sc) * (k1[i] / sc);
        dny += (y0[i] / sc) * (y0[i] / sc);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
    h *= dir;
    // one explicit Euler probe to bound the second derivative
    Vec4 y1 = axpy(y0, h, k1);
    Vec4 k2 = f(y1);
    double der2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double sc = tol.atol + tol.rtol * std::abs(y0[i]);
        const double d = (k2[i] - k1[i]) / sc;
        der2 += d * d;
    }
    der2 = std::sqrt(der2) / std::abs(h);
    const double der12 = std::max(der2, std::sqrt(dnf));
    double h1 = (der12 <= 1e-15) ? std::max(1e-6, std::abs(h) * 1e-3)
                                 : std::pow(0.01 / der12, 0.2);
    return dir * std::min(100.0 * std::abs(h), h1);
}

// Driver shared by all entry points: advances the solution, hands each
// accepted step to `on_step`, stops when it returns false.
void drive(const Field& field, const Vec4& initial, double t0, double t1,
           const Tolerances& tol,
           const std::function<bool(double, const DenseStep&, const Vec4&, const Vec4&)>& on_step) {
    if (!(tol.rtol > 0.0) || !(tol.atol > 0.0))
        throw ConfigError("integrate: tolerances must be positive");
    if (!finite(initial)) throw BlowupError("integrate: initial state non-finite", initial, t0);
    if (t1 == t0) return;

    const double dir = (t1 > t0) ? 1.0 : -1.0;
    Vec4 y = initial;
    Vec4 k1 = field(y);
    if (!finite(k1)) throw BlowupError("integrate: field non-finite at initial state", y, t0);
    double t = t0;
    double h = initial_step(field, y, k1, dir, tol);
    h = dir * std::min(std::abs(h), std::abs(t1 - t0));

    const double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    double facold = 1e-4;
    const double hfloor = 1e-14;

    while (dir * (t1 - t) > 0.0) {
        if (dir * (t + h - t1) > 0.0) h = t1 - t;
        if (std::abs(h) < hfloor || t + h == t)
            throw StiffnessError("integrate: step size underflow", y, t);

        StepResult s = attempt_step(field, t, y, k1, h, tol);
        if (!finite(s.y1) || !std::isfinite(s.err))
            throw BlowupError("integrate: state non-finite", y, t);

        const double fac11 = std::pow(std::max(s.err, 1e-32), expo1);
        if (s.err <= 1.0) {
            facold = std::max(s.err, 1e-4);
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(0.1, std::min(10.0, fac / safe));
            const double hnew = h / fac;
            const double tnew = t + h;
            if (!on_step(tnew, s.dense, s.y1, s.k7)) return;
            t = tnew;
            y = s.y1;
            k1 = s.k7;
            h = hnew;
        } else {
            h /= std::min(10.0, fac11 / safe);
        }
    }
}

} // namespace

Vec4 DenseStep::eval(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    Vec4 y;
    for (int i = 0; i < 4; ++i)
        y[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
    return y;
}

Vec4 Trajectory::at(double t) const {
    if (steps.empty()) return samples.front().y;
    const bool fwd = samples.back().t >= samples.front().t;
    // binary search for the segment containing t
    size_t lo = 0, hi = steps.size() - 1;
    while (lo < hi) {
        const size_t mid = (lo + hi) / 2;
        const double tend = samples[mid + 1].t;
        if (fwd ? (t <= tend) : (t >= tend))
            hi = mid;
        else
            lo = mid + 1;
    }
    return steps[lo].eval(t);
}

void Trajectory::write_csv(std::ostream& os) const {
    os << "t,a,b,z,eps\n";
    for (const Sample& s : samples) {
        os << shortest_roundtrip(s.t) << ',' << shortest_roundtrip(s.y[0]) << ','
           << shortest_roundtrip(s.y[1]) << ',' << shortest_roundtrip(s.y[2]) << ','
           << shortest_roundtrip(s.y[3]) << '\n';
    }
}

Trajectory integrate(const Field& field, const Vec4& initial,
                     std::pair<double, double> t_span, const Tolerances& tol,
                     const std::string& field_id) {
    Trajectory tr;
    tr.field_id = field_id;
    tr.samples.push_back({t_span.first, initial});
    drive(field, initial, t_span.first, t_span.second, tol,
          [&](double t, const DenseStep& d, const Vec4& y, const Vec4&) {
              tr.steps.push_back(d);
              tr.samples.push_back({t, y});
              return true;
          });
    return tr;
}

EventHit integrate_until_event(const Field& field, const Vec4& initial, double t_limit,
                               const std::function<double(double, const Vec4&)>& event,
                               int direction, const Tolerances& tol) {
    EventHit hit;
    double g_prev = event(0.0, initial);
    double t_prev = 0.0;

    auto locate = [&](const DenseStep& d, double ta, double ga, double tb,
                      double gb) -> bool {
        // ga, gb bracket a sign change (or gb == 0); bisect on dense output
        if (ga == 0.0) ga = std::copysign(1e-300, -gb);
        for (int it = 0; it < 200 && tb != ta; ++it) {
            const double tm = 0.5 * (ta + tb);
            if (tm == ta || tm == tb) break;
            const double gm = event(tm, d.eval(tm));
            if ((gm < 0.0) == (ga < 0.0)) {
                ta = tm;
                ga = gm;
            } else {
                tb = tm;
                gb = gm;
            }
        }
        const double t_root = tb;
        const Vec4 y_root = d.eval(t_root);
        if (direction != 0) {
            // slope of the event function across the bracket endpoints
            const double slope = gb - ga;
            if (direction > 0 && !(slope > 0.0)) return false;
            if (direction < 0 && !(slope < 0.0)) return false;
        }
        hit.hit = true;
        hit.t = t_root;
        hit.state = y_root;
        return true;
    };

    drive(field, initial, 0.0, t_limit, tol,
          [&](double t, const DenseStep& d, const Vec4& y, const Vec4&) {
              // scan the step in subintervals for the first admissible crossing
              constexpr int kScan = 16;
              double ta = t_prev, ga = g_prev;
              for (int s = 1; s <= kScan; ++s) {
                  const double tb = t_prev + (t - t_prev) * s / kScan;
                  const Vec4 yb = (s == kScan) ? y : d.eval(tb);
                  const double gb = event(tb, yb);
                  if (ga == 0.0 ? (gb != 0.0) : (gb == 0.0 || (gb < 0.0) != (ga < 0.0))) {
                      if (locate(d, ta, ga, tb, gb)) return false;
                  }
                  ta = tb;
                  ga = gb;
              }
              t_prev = t;
              g_prev = ga;
              return true;
          });
    return hit;
}

SectionHit integrate_to_section(const Field& field, const Vec4& initial, const Section& sec,
                                int direction, const Tolerances& tol, double t_max,
                                bool keep_trajectory) {
    const int ax = static_cast<int>(sec.axis);
    if (!(t_max > 0.0)) throw ConfigError("integrate_to_section: t_max must be positive");
    if (initial[ax] == sec.value)
        throw DomainError("integrate_to_section: initial state lies on the section");

    SectionHit out;
    Trajectory* tr = nullptr;
    if (keep_trajectory) {
        out.trajectory.samples.push_back({0.0, initial});
        tr = &out.trajectory;
    }

    bool found = false;
    double g_prev = initial[ax] - sec.value;
    double t_prev = 0.0;
    Vec4 last_state = initial;
    double last_t = 0.0;

    auto admissible = [&](double t_root, const Vec4& y_root, double slope) {
        if (direction > 0 && !(slope > 0.0)) return false;
        if (direction < 0 && !(slope < 0.0)) return false;
        if (sec.z_sign > 0 && !(y_root[2] > 0.0)) return false;
        if (sec.z_sign < 0 && !(y_root[2] < 0.0)) return false;
        (void)t_root;
        return true;
    };

    auto locate = [&](const DenseStep& d, double ta, double ga, double tb, double gb) -> bool {
        if (ga == 0.0) ga = std::copysign(1e-300, -gb);
        for (int it = 0; it < 200 && tb != ta; ++it) {
            const double tm = 0.5 * (ta + tb);
            if (tm == ta || tm == tb) break;
            const double gm = d.eval(tm)[ax] - sec.value;
            if ((gm < 0.0) == (ga < 0.0)) {
                ta = tm;
                ga = gm;
            } else {
                tb = tm;
                gb = gm;
            }
        }
        double t_root = tb;
        Vec4 y_root = d.eval(t_root);
        // one Newton polish in t using the field slope
        const Vec4 f_root = field(y_root);
        if (f_root[ax] != 0.0) {
            const double tn = t_root - (y_root[ax] - sec.value) / f_root[ax];
            if (tn > std::min(d.t0, d.t0 + d.h) && tn < std::max(d.t0, d.t0 + d.h)) {
                const Vec4 yn = d.eval(tn);
                if (std::abs(yn[ax] - sec.value) <= std::abs(y_root[ax] - sec.value)) {
                    t_root = tn;
                    y_root = yn;
                }
            }
        }
        if (!admissible(t_root, y_root, gb - ga)) return false;
        out.state = y_root;
        out.t_hit = t_root;
        out.residual = std::abs(y_root[ax] - sec.value);
        found = true;
        return true;
    };

    drive(field, initial, 0.0, t_max, tol,
          [&](double t, const DenseStep& d, const Vec4& y, const Vec4&) {
              constexpr int kScan = 16;
              double ta = t_prev, ga = g_prev;
              bool stop = false;
              for (int s = 1; s <= kScan && !stop; ++s) {
                  const double tb = t_prev + (t - t_prev) * s / kScan;
                  const Vec4 yb = (s == kScan) ? y : d.eval(tb);
                  const double gb = yb[ax] - sec.value;
                  if (gb == 0.0 || (gb < 0.0) != (ga < 0.0)) {
                      if (locate(d, ta, ga, tb, gb)) stop = true;
                  }
                  ta = tb;
                  ga = gb;
              }
              if (tr && !stop) {
                  tr->steps.push_back(d);
                  tr->samples.push_back({t, y});
              }
              t_prev = t;
              g_prev = ga;
              last_state = y;
              last_t = t;
              return !stop;
          });

    if (!found)
        throw SectionTimeoutError("integrate_to_section: no crossing before t_max", last_state,
                                  last_t);
    if (tr) {
        // close the trajectory at the hit
        tr->samples.push_back({out.t_hit, out.state});
    }
    return out;
}

namespace {

struct LegResult {
    double deriv = 0.0;      // Richardson-combined central difference
    double diff_scale = 0.0; // smallest raw exit-z difference entering the quotient
    Vec4 base_exit{};
};

// Central difference of the z-component section map, Richardson over h, h/2.
LegResult leg_derivative(const Field& field, const Vec4& base, const Section& sec,
                         int direction, double h, const Tolerances& tol, double t_max) {
    auto shoot = [&](double dz) {
        Vec4 y = base;
        y[2] += dz;
        return integrate_to_section(field, y, sec, direction, tol, t_max).state;
    };
    LegResult r;
    r.base_exit = shoot(0.0);
    const Vec4 ep = shoot(h), em = shoot(-h);
    const Vec4 ep2 = shoot(0.5 * h), em2 = shoot(-0.5 * h);
    const double dh = (ep[2] - em[2]) / (2.0 * h);
    const double dh2 = (ep2[2] - em2[2]) / h;
    r.deriv = (4.0 * dh2 - dh) / 3.0;
    r.diff_scale = std::min(std::abs(ep[2] - em[2]), std::abs(ep2[2] - em2[2]));
    if (!std::isfinite(r.deriv))
        throw DegenerateFiberError("fiber_derivative: non-finite difference quotient");
    return r;
}

} // namespace

FiberDerivative fiber_derivative_log(const Field& field, const Vec4& base, const Section& sec,
                                     int direction, double dz0, const Tolerances& tol,
                                     double t_max) {
    if (!(dz0 > 0.0)) throw ConfigError("fiber_derivative: dz0 must be positive");
    const int ax = static_cast<int>(sec.axis);

    const double v_start = base[ax];
    const double v_end = sec.value;
    if (v_end == v_start) throw DomainError("fiber_derivative: base lies on the section");

    // March toward the section in sub-legs sized so that each leg's contraction
    // stays well above floating-point resolution; chain the logs.
    const double target_log = 15.0;
    FiberDerivative out;
    out.legs = 0;
    double frac = 1.0;               // fraction of the remaining span to attempt
    double L = 0.0;
    Vec4 cur = base;
    double v_cur = v_start;
    int guard = 0;

    for (;;) {
        if (++guard > 100000) throw DegenerateFiberError("fiber_derivative: leg limit exceeded");
        const bool final_leg = frac >= 1.0;
        double v_next = final_leg ? v_end : v_cur + (v_end - v_cur) * frac;
        if (v_next == v_cur) v_next = v_end;
        const Section leg_sec{sec.axis, v_next, (v_next == v_end) ? sec.z_sign : 0};

        const LegResult leg = leg_derivative(field, cur, leg_sec, direction, dz0, tol, t_max);
        const double scale =
            2048.0 * std::numeric_limits<double>::epsilon() *
            std::max(1.0, std::abs(leg.base_exit[2]));

        const bool resolvable = leg.diff_scale > scale && leg.deriv != 0.0;
        if (!resolvable) {
            if (frac > 1e-7) {
                frac *= 0.25;
                continue;
            }
            if (leg.diff_scale == 0.0) {
                // the map forgets its entry z below any resolvable leg
                out.value = 0.0;
                out.log_abs = -std::numeric_limits<double>::infinity();
                out.legs += 1;
                return out;
            }
            throw DegenerateFiberError("fiber_derivative: contraction below resolution");
        }
        if (leg.deriv < 0.0)
            throw DegenerateFiberError("fiber_derivative: fiber map not orientation-preserving");

        const double ld = std::log(leg.deriv);
        if (ld < -25.0 && frac > 1e-7) {
            // precision of the quotient degrades; shrink and retry this leg
            frac *= std::max(0.05, target_log / std::abs(ld));
            continue;
        }

        L += ld;
        out.legs += 1;
        cur = leg.base_exit;
        v_cur = cur[ax];
        if (v_next == v_end) break;
        if (std::abs(ld) > 1e-12)
            frac = std::min(1.0, frac * std::clamp(target_log / std::abs(ld), 0.25, 4.0));
        else
            frac = 1.0;
    }

    out.log_abs = L;
    out.value = std::exp(L);
    return out;
}

double fiber_derivative(const Field& field, const Vec4& base, const Section& sec, double dz0,
                        const Tolerances& tol, double t_max, int direction) {
    return fiber_derivative_log(field, base, sec, direction, dz0, tol, t_max).value;
}

std::string shortest_roundtrip(double x) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace cusp::ode
