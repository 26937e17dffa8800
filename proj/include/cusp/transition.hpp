#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cusp/core.hpp"
#include "cusp/blowup.hpp"
#include "cusp/odeflow.hpp"

namespace cusp::lab {

struct EstimateOptions {
    ode::Tolerances tol{};
    double base_offset = 0.5;   // fiber-derivative base sits this far above the manifold
    double dz0 = 1e-4;          // finite-difference probe for the fiber derivative
};

// One measured transition Sigma^- -> Sigma^+ at fixed (b, eps).
struct TransitionEstimate {
    double b = 0.0;
    double eps = 0.0;
    double shift_num = 0.0;       // companion exit z relative to the critical branch
    double rate_num = 0.0;        // -eps log d(Pi_z)/dZ
    double log_fiber_deriv = 0.0;
    double z_exit = 0.0;
    int z_exit_sign = 0;
    double z_manifold_entry = 0.0;   // located fiber base on Sigma^-
    double z_exit_companion = 0.0;
    double base_offset = 0.0;
    double hit_residual_main = 0.0;
    double hit_residual_companion = 0.0;
    int fiber_legs = 0;
    double wall_time = 0.0;       // seconds
};

// Backward-stability bisection for the invariant-manifold fiber base at
// a = a0 (entry section): candidates off S_eps separate exponentially under
// backward integration; the bisection pins the non-escaping z.
double locate_fiber_base(const A3System& sys, double a0, double b0, double eps,
                         const ode::Tolerances& tol = {});

TransitionEstimate estimate_transition(const A3System& sys, double b0, double z0, double eps,
                                       double a_minus, double a_plus,
                                       const EstimateOptions& opts = {});

struct SweepRow {
    double eps = 0.0;
    std::optional<TransitionEstimate> estimate;
    std::string error;            // non-empty when the row failed
    double deviation = 0.0;       // |rate_num + target_I|, valid when estimate is set
};

struct SweepReport {
    double b0 = 0.0;
    double a_minus = 1.0;
    double a_plus = 1.0;
    double target_I = 0.0;        // slow divergence integral between the sections
    std::vector<SweepRow> rows;   // sorted by decreasing eps (input order)
    double fit_slope_eps_log = 0.0;   // slope of log(dev) vs log(eps ln(1/eps))
    double fit_slope_plain = 0.0;     // slope of log(dev) vs log(eps)
    bool deviations_strictly_decreasing = false;
};

SweepReport sweep_eps(const A3System& sys, double b0, const std::vector<double>& eps_list,
                      double a_minus, double a_plus, const EstimateOptions& opts = {});

struct LayerRow {
    double mu = 0.0;
    double b0 = 0.0;
    atlas::LayerLabel label;
    double b1_exit = 0.0;         // K_en chart coordinate at the eps1 = delta surface
    bool escaped = false;         // not inner: chart coordinate grows unboundedly
    std::optional<TransitionEstimate> estimate;
    std::string error;
};

struct LayerStudy {
    double eps = 0.0;
    double L = 0.5, M = 1.0;
    double delta = 1.0;           // chart exit surface eps1 = delta
    std::vector<LayerRow> rows;
};

LayerStudy layer_study(const A3System& sys, double eps, const std::vector<double>& mu_list,
                       double L, double M, double a_minus = 1.0, double a_plus = 1.0,
                       const EstimateOptions& opts = {});

struct FoldPoint {
    double eps = 0.0;
    double a_jump = 0.0;          // a2 where z2 falls through the fold level 1/sqrt(3)
    double a_exit = 0.0;          // a2 where z2 drops past -Z2_ex
    double offset = 0.0;          // a_exit - 2/(3 sqrt 3)
};

struct FoldFit {
    double slope = 0.0;           // d log(offset) / d log(eps)
    std::vector<FoldPoint> points;
    double fold_a = 0.0;          // 2/(3 sqrt 3)
    double fold_z = 0.0;          // 1/sqrt(3)
};

FoldFit fold_exponent_fit(const std::vector<double>& eps_list, double A0 = 0.6,
                          double Z2_ex = 0.2, const ode::Tolerances& tol = {});

struct FlatnessRow {
    double eps = 0.0;
    double rate_flat = 0.0;
    double rate_principal = 0.0;
    double diff = 0.0;
    double ratio_to_eps2 = 0.0;
};

struct FlatnessReport {
    std::vector<FlatnessRow> rows;
    std::vector<double> shrink_factors;   // diff[i] / diff[i+1]
};

FlatnessReport flatness_robustness(const A3System& flat_sys, double b0,
                                   const std::vector<double>& eps_list, double a_minus = 1.0,
                                   double a_plus = 1.0, const EstimateOptions& opts = {});

// The transition re-posed in the reflected coordinates (a, z) -> (-a, -z):
// sections swap and the perturbations are pulled back through the reflection.
// For the principal part at symmetric sections this reproduces the forward
// problem exactly.
TransitionEstimate reflected_estimate(const A3System& sys, double b0, double z0, double eps,
                                      double a_minus, double a_plus,
                                      const EstimateOptions& opts = {});

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace cusp::lab
