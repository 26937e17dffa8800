#pragma once

#include <array>
#include <functional>
#include <variant>
#include <vector>

#include "cusp/errors.hpp"

namespace cusp::xmap {

// Exponential-type function D(V,Z,eps) = B(V,eps) + Z exp(-(A+Phi)/eps),
// stored by its components. Contracts: A > 0 on the domain, B(V,0) = 0,
// Phi(V,Z,0) = 0 and Phi(V,0,eps) = 0 (canonical representation).
struct ExpTypeMap {
    std::function<double(double V, double eps)> shift;                 // B
    std::function<double(double V, double eps)> rate;                  // A
    std::function<double(double V, double Z, double eps)> correction;  // Phi
    bool no_shift = false;
    bool linear = false;

    double B(double V, double eps) const { return no_shift ? 0.0 : shift(V, eps); }
    double A(double V, double eps) const { return rate(V, eps); }
    double Phi(double V, double Z, double eps) const {
        return correction ? correction(V, Z, eps) : 0.0;
    }
};

// Convenience constructors.
ExpTypeMap pure_exponential(double A);                  // Z e^{-A/eps}
ExpTypeMap make_no_shift(std::function<double(double, double)> rate,
                         std::function<double(double, double, double)> correction,
                         bool linear = false);

struct EvalParts {
    double value = 0.0;     // B + Z exp(-(A+Phi)/eps); tail may round to 0
    double log_tail = 0.0;  // log|Z| - (A+Phi)/eps  (log|value - B|)
    int tail_sign = 0;      // sign of Z
};

EvalParts eval_parts(const ExpTypeMap& D, double V, double Z, double eps);
double eval(const ExpTypeMap& D, double V, double Z, double eps);

// Component extraction per the representation-uniqueness remark:
//   B = D(V,0,eps), A = lim_{Z->0} -eps ln((D-B)/Z), Richardson over
//   z_probe, z_probe/2, z_probe/4.
struct Components {
    double B = 0.0;
    double A = 0.0;
    double phi_at_probe = 0.0;
};

using PointMap = std::function<double(double V, double Z, double eps)>;

Components extract_components(const PointMap& D, double V, double eps, double z_probe);

// Same extraction driven through the stored components (log-space), immune to
// underflow of the exponential tail.
Components extract_components(const ExpTypeMap& D, double V, double eps, double z_probe);

// (V,eps)-family of one-dimensional diffeomorphisms y -> Psi(y; V, eps).
struct DiffeoFamily {
    std::function<double(double y, double V, double eps)> value;
    double operator()(double y, double V, double eps) const { return value(y, V, eps); }
};

DiffeoFamily identity_diffeo();

ExpTypeMap compose_left(const DiffeoFamily& Psi, const ExpTypeMap& D);
ExpTypeMap compose_right(const ExpTypeMap& D, const DiffeoFamily& Psi);

// Composition through a no-shift inner map (corollary 1 closure).
ExpTypeMap compose_exp(const ExpTypeMap& outer, const ExpTypeMap& inner_no_shift);

// Five-map chain: roles no-shift linear / no-shift / diffeo-or-exp-type /
// no-shift / no-shift linear, composed left to right (maps[0] applied first).
using ChainLink = std::variant<ExpTypeMap, DiffeoFamily>;
ExpTypeMap compose_chain(const std::array<ChainLink, 5>& maps);

// --- closed-form model transitions ------------------------------------------

struct RegularTransition {
    double V = 0.0;
    double Z = 0.0;
    double eps = 0.0;
    double log_contraction = 0.0;   // -(U_f - U_i)/eps
};

RegularTransition regular_transition(double U_i, double U_f, double eps, double V, double Z);

struct Saddle1Transition {
    double u = 0.0;                  // u (w/w_out)^{1/gamma}
    std::vector<double> v;           // v_i (w_out/w)^{beta_i/gamma}
    double w = 0.0;                  // = w_out
    double Z = 0.0;                  // leading G=0 image of Z
    double log_contraction = 0.0;    // -(Lambda/(gamma w))(1 - w/w_out)
};

Saddle1Transition saddle1_transition(const std::vector<double>& beta, double gamma,
                                     double Lambda, double u, const std::vector<double>& v,
                                     double w, double w_out, double Z);

struct Saddle2Transition {
    double u = 0.0;                  // = u_out
    std::vector<double> v;           // v_i (u/u_out)^{beta_i}
    double w = 0.0;                  // w (u/u_out)^{gamma}
    double Z = 0.0;
    double log_contraction = 0.0;    // -(Lambda/(gamma w))((u_out/u)^gamma - 1)
};

Saddle2Transition saddle2_transition(const std::vector<double>& beta, double gamma,
                                     double Lambda, double u, double u_out,
                                     const std::vector<double>& v, double w, double Z);

} // namespace cusp::xmap
