#include "cusp/transition.hpp"

#include <chrono>
#include <cmath>

#include "cusp/sdi.hpp"

namespace cusp::lab {

namespace {

ode::Field fast_field(const A3System& sys) {
    return [sys](const Vec4& y) { return eval_fast(sys, StatePoint::from_vec(y)); };
}

double attracting_root(double a, double b, int want_sign) {
    const CubicRoots r = critical_branches(a, b);
    double best = 0.0;
    int n = 0;
    for (size_t i = 0; i < r.roots.size(); ++i) {
        const double z = r.roots[i];
        if (want_sign > 0 && !(z > 0.0)) continue;
        if (want_sign < 0 && !(z < 0.0)) continue;
        if (!(3.0 * z * z + b > 0.0)) continue;
        best = z;
        ++n;
    }
    if (n != 1)
        throw GeometryError("attracting_root: expected one attracting root, found " +
                            std::to_string(n));
    return best;
}

double transit_time_budget(double a_minus, double a_plus, double eps) {
    return 4.0 * (a_minus + a_plus) / eps + 1000.0;
}

} // namespace

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = std::min(x.size(), y.size());
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double d = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / d;
}

double locate_fiber_base(const A3System& sys, double a0, double b0, double eps,
                         const ode::Tolerances& tol) {
    if (!(eps > 0.0)) throw DomainError("locate_fiber_base: eps must be positive");
    const double z_ref = attracting_root(a0, b0, +1);
    const ode::Field field = fast_field(sys);

    const double escape = 0.4;
    const double tau_back = std::min(150.0, 0.45 / eps);

    // escape direction under backward integration: +1 up, -1 down, 0 none
    auto probe = [&](double z) -> int {
        const Vec4 y0{a0, b0, z, eps};
        auto event = [&](double, const Vec4& y) {
            return (y[2] - z_ref) * (y[2] - z_ref) - escape * escape;
        };
        const ode::EventHit hit =
            ode::integrate_until_event(field, y0, -tau_back, event, 0, tol);
        if (!hit.hit) return 0;
        return (hit.state[2] > z_ref) ? +1 : -1;
    };

    double lo = z_ref - 0.3, hi = z_ref + 0.3;
    int slo = probe(lo), shi = probe(hi);
    for (int widen = 0; (slo >= 0 || shi <= 0) && widen < 6; ++widen) {
        // widen until the bracket escapes both ways
        if (slo >= 0) {
            lo -= 0.3;
            slo = probe(lo);
        }
        if (shi <= 0) {
            hi += 0.3;
            shi = probe(hi);
        }
    }
    if (slo >= 0 || shi <= 0)
        throw GeometryError("locate_fiber_base: could not bracket the invariant manifold");

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const int s = probe(mid);
        if (s < 0)
            lo = mid;
        else if (s > 0)
            hi = mid;
        else
            return mid;   // no escape within the window: on the manifold
    }
    return 0.5 * (lo + hi);
}

TransitionEstimate estimate_transition(const A3System& sys, double b0, double z0, double eps,
                                       double a_minus, double a_plus,
                                       const EstimateOptions& opts) {
    if (!(eps > 0.0)) throw DomainError("estimate_transition: eps must be positive");
    if (!(z0 > 0.0))
        throw DomainError("estimate_transition: entry requires z0 > 0 on Sigma^-");
    if (!(a_minus > 0.0) || !(a_plus > 0.0))
        throw DomainError("estimate_transition: section offsets must be positive");

    const auto t_start = std::chrono::steady_clock::now();
    auto with_context = [&](const std::string& what) {
        return what + " [b0=" + std::to_string(b0) + ", eps=" + std::to_string(eps) + "]";
    };

    try {
        const ode::Field field = fast_field(sys);
        const ode::Section exit_sec{ode::Axis::a, a_plus, -1};
        const double t_max = transit_time_budget(a_minus, a_plus, eps);

        TransitionEstimate est;
        est.b = b0;
        est.eps = eps;
        est.base_offset = opts.base_offset;

        est.z_manifold_entry = locate_fiber_base(sys, -a_minus, b0, eps, opts.tol);

        const Vec4 start_main{-a_minus, b0, z0, eps};
        const ode::SectionHit main_hit =
            ode::integrate_to_section(field, start_main, exit_sec, +1, opts.tol, t_max);
        est.z_exit = main_hit.state[2];
        est.z_exit_sign = (est.z_exit > 0) - (est.z_exit < 0);
        est.hit_residual_main = main_hit.residual;

        const Vec4 start_comp{-a_minus, b0, est.z_manifold_entry, eps};
        const ode::SectionHit comp_hit =
            ode::integrate_to_section(field, start_comp, exit_sec, +1, opts.tol, t_max);
        est.z_exit_companion = comp_hit.state[2];
        est.hit_residual_companion = comp_hit.residual;
        est.shift_num =
            comp_hit.state[2] - attracting_root(a_plus, comp_hit.state[1], -1);

        const Vec4 fiber_base{-a_minus, b0, est.z_manifold_entry + opts.base_offset, eps};
        const ode::FiberDerivative fd = ode::fiber_derivative_log(
            field, fiber_base, exit_sec, +1, opts.dz0, opts.tol, t_max);
        est.log_fiber_deriv = fd.log_abs;
        est.fiber_legs = fd.legs;
        est.rate_num = -eps * fd.log_abs;
        if (!std::isfinite(est.rate_num) || !(est.rate_num > 0.0))
            throw NonContractiveError("estimate_transition: measured rate not positive");

        est.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        return est;
    } catch (const SectionTimeoutError& e) {
        throw SectionTimeoutError(with_context(e.what()), e.last_state, e.last_time);
    } catch (const StiffnessError& e) {
        throw StiffnessError(with_context(e.what()), e.last_state, e.last_time);
    } catch (const BlowupError& e) {
        throw BlowupError(with_context(e.what()), e.last_state, e.last_time);
    } catch (const NonContractiveError& e) {
        throw NonContractiveError(with_context(e.what()));
    } catch (const DegenerateFiberError& e) {
        throw DegenerateFiberError(with_context(e.what()));
    }
}

SweepReport sweep_eps(const A3System& sys, double b0, const std::vector<double>& eps_list,
                      double a_minus, double a_plus, const EstimateOptions& opts) {
    if (eps_list.empty()) throw SweepError("sweep_eps: empty eps list");
    for (size_t i = 0; i + 1 < eps_list.size(); ++i)
        if (!(eps_list[i] > eps_list[i + 1]))
            throw DomainError("sweep_eps: eps list must be strictly descending");
    for (double e : eps_list)
        if (!(e > 0.0)) throw DomainError("sweep_eps: eps values must be positive");

    SweepReport rep;
    rep.b0 = b0;
    rep.a_minus = a_minus;
    rep.a_plus = a_plus;
    const auto [z_en, z_ex] = sdi::endpoints_for_sections(a_minus, a_plus, b0);
    rep.target_I = sdi::sdi_closed(b0, z_en, z_ex);

    size_t failures = 0;
    for (double eps : eps_list) {
        SweepRow row;
        row.eps = eps;
        try {
            row.estimate =
                estimate_transition(sys, b0, attracting_root(-a_minus, b0, +1) + 1.0, eps,
                                    a_minus, a_plus, opts);
            row.deviation = std::abs(row.estimate->rate_num + rep.target_I);
        } catch (const Error& e) {
            row.error = e.what();
            ++failures;
        }
        rep.rows.push_back(std::move(row));
    }
    if (failures == rep.rows.size()) throw SweepError("sweep_eps: every row failed");

    std::vector<double> lx_el, lx_plain, ly;
    rep.deviations_strictly_decreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    for (const SweepRow& row : rep.rows) {
        if (!row.estimate) continue;
        if (!(row.deviation < prev)) rep.deviations_strictly_decreasing = false;
        prev = row.deviation;
        if (row.deviation > 0.0) {
            lx_el.push_back(std::log(row.eps * std::log(1.0 / row.eps)));
            lx_plain.push_back(std::log(row.eps));
            ly.push_back(std::log(row.deviation));
        }
    }
    rep.fit_slope_eps_log = least_squares_slope(lx_el, ly);
    rep.fit_slope_plain = least_squares_slope(lx_plain, ly);
    return rep;
}

LayerStudy layer_study(const A3System& sys, double eps, const std::vector<double>& mu_list,
                       double L, double M, double a_minus, double a_plus,
                       const EstimateOptions& opts) {
    if (!(eps > 0.0)) throw DomainError("layer_study: eps must be positive");
    if (!(0.0 < L && L < M)) throw ConfigError("layer_study: need 0 < L < M");

    LayerStudy study;
    study.eps = eps;
    study.L = L;
    study.M = M;
    study.delta = 1.0;

    const double scale = std::pow(eps, 0.4);
    const double a_cross = -std::pow(eps / study.delta, 0.6);
    const ode::Field field = fast_field(sys);

    for (double mu : mu_list) {
        LayerRow row;
        row.mu = mu;
        row.b0 = mu * scale;
        try {
            row.label = atlas::classify_entry(row.b0, eps, L, M);
        } catch (const Error& e) {
            row.error = e.what();
            study.rows.push_back(std::move(row));
            continue;
        }
        row.escaped = !row.label.inner;
        try {
            const double z0 = attracting_root(-a_minus, row.b0, +1) + 1.0;
            // b measured where the trajectory crosses the chart-exit surface
            const ode::SectionHit mid = ode::integrate_to_section(
                field, {-a_minus, row.b0, z0, eps}, {ode::Axis::a, a_cross, 0}, +1, opts.tol,
                transit_time_budget(a_minus, a_plus, eps));
            row.b1_exit = mid.state[1] * std::pow(study.delta / eps, 0.4);
            row.estimate = estimate_transition(sys, row.b0, z0, eps, a_minus, a_plus, opts);
        } catch (const Error& e) {
            row.error = e.what();
        }
        study.rows.push_back(std::move(row));
    }
    return study;
}

FoldFit fold_exponent_fit(const std::vector<double>& eps_list, double A0, double Z2_ex,
                          const ode::Tolerances& tol) {
    if (eps_list.size() < 2)
        throw DomainError("fold_exponent_fit: need at least two eps values");
    double lo = eps_list.front(), hi = eps_list.front();
    for (double e : eps_list) {
        if (!(e > 0.0)) throw DomainError("fold_exponent_fit: eps values must be positive");
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    if (std::log10(hi / lo) < 1.5)
        throw DomainError("fold_exponent_fit: eps list must span at least 1.5 decades");

    FoldFit fit;
    fit.fold_a = 2.0 / (3.0 * std::sqrt(3.0));
    fit.fold_z = 1.0 / std::sqrt(3.0);
    if (!(A0 > fit.fold_a))
        throw ConfigError("fold_exponent_fit: A0 must exceed the fold position");

    // K_{-b} restricted model: a2' = eps2, z2' = -(z2^3 - z2 + a2)
    const ode::Field field = [](const Vec4& y) {
        return Vec4{y[3], 0.0, -(y[2] * y[2] * y[2] - y[2] + y[0]), 0.0};
    };

    std::vector<double> lx, ly;
    for (double eps : eps_list) {
        // attracting upper branch of z^3 - z + a = 0 at a = -A0
        const double z_start = attracting_root(-A0, -1.0, +1);
        const Vec4 start{-A0, 0.0, z_start, eps};
        const double t_max = (2.0 * A0 + 1.0) / eps;

        FoldPoint pt;
        pt.eps = eps;
        try {
            const ode::SectionHit at_fold = ode::integrate_to_section(
                field, start, {ode::Axis::z, fit.fold_z, 0}, -1, tol, t_max);
            pt.a_jump = at_fold.state[0];
            const ode::SectionHit at_exit = ode::integrate_to_section(
                field, at_fold.state, {ode::Axis::z, -Z2_ex, 0}, -1, tol, t_max);
            pt.a_exit = at_exit.state[0];
        } catch (const SectionTimeoutError& e) {
            throw FoldDetectionError(
                "fold_exponent_fit: trajectory failed to jump before a2 = A0 (eps2 = " +
                std::to_string(eps) + "): " + e.what());
        }
        if (pt.a_exit >= A0)
            throw FoldDetectionError("fold_exponent_fit: no jump before a2 = A0");
        pt.offset = pt.a_exit - fit.fold_a;
        if (!(pt.offset > 0.0))
            throw FoldDetectionError("fold_exponent_fit: exit offset not positive");
        fit.points.push_back(pt);
        lx.push_back(std::log(eps));
        ly.push_back(std::log(pt.offset));
    }
    fit.slope = least_squares_slope(lx, ly);
    return fit;
}

FlatnessReport flatness_robustness(const A3System& flat_sys, double b0,
                                   const std::vector<double>& eps_list, double a_minus,
                                   double a_plus, const EstimateOptions& opts) {
    const SweepReport flat = sweep_eps(flat_sys, b0, eps_list, a_minus, a_plus, opts);
    const SweepReport prin =
        sweep_eps(A3System::principal_part(), b0, eps_list, a_minus, a_plus, opts);

    FlatnessReport rep;
    for (size_t i = 0; i < flat.rows.size(); ++i) {
        if (!flat.rows[i].estimate || !prin.rows[i].estimate) continue;
        FlatnessRow row;
        row.eps = flat.rows[i].eps;
        row.rate_flat = flat.rows[i].estimate->rate_num;
        row.rate_principal = prin.rows[i].estimate->rate_num;
        row.diff = std::abs(row.rate_flat - row.rate_principal);
        row.ratio_to_eps2 = row.diff / (row.eps * row.eps);
        rep.rows.push_back(row);
    }
    for (size_t i = 0; i + 1 < rep.rows.size(); ++i)
        rep.shrink_factors.push_back(rep.rows[i].diff /
                                     std::max(rep.rows[i + 1].diff, 1e-300));
    return rep;
}

TransitionEstimate reflected_estimate(const A3System& sys, double b0, double z0, double eps,
                                      double a_minus, double a_plus,
                                      const EstimateOptions& opts) {
    // pull the perturbations back through T: (a, z) -> (-a, -z); the principal
    // cubic is T-odd, so the reflected problem is again an A3 system with the
    // sections swapped
    A3System refl;
    if (sys.principal) {
        refl = A3System::principal_part();
    } else {
        auto pull = [](const ScalarField& f) {
            return [f](const StatePoint& p) {
                return f ? f(StatePoint{-p.a, p.b, -p.z, p.eps}) : 0.0;
            };
        };
        refl = A3System::perturbed(pull(sys.f1),
                                   [g = pull(sys.f2)](const StatePoint& p) { return -g(p); },
                                   [g = pull(sys.f3)](const StatePoint& p) { return -g(p); });
    }
    return estimate_transition(refl, b0, z0, eps, a_plus, a_minus, opts);
}

} // namespace cusp::lab
