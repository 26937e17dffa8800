#pragma once

#include <utility>

#include "cusp/errors.hpp"

namespace cusp::sdi {

// A point of the critical manifold S addressed by (b, z); a = -z^3 - b z.
struct BranchPoint {
    double b = 0.0;
    double z = 0.0;
    double a() const { return -(z * z * z + b * z); }
    bool attracting() const { return 3.0 * z * z + b > 0.0; }
};

// dz/da of the slow flow on S under a-dot = 1 (implicit differentiation).
double slow_field_on_branch(const BranchPoint& p);

// Antiderivative of the divergence integrand along S:
//   I_tilde(b, zeta) = (9/5) zeta^5 + 2 zeta^3 b + b^2 zeta,
//   d I_tilde / d zeta = (3 zeta^2 + b)^2.
double sdi_antiderivative(double b, double zeta);

// Slow divergence integral in closed form: I = I_tilde(b, z_ex) - I_tilde(b, z_en).
double sdi_closed(double b, double z_en, double z_ex);

// Independent oracle: adaptive quadrature of (3 z^2 + b)^2 over [z_en, z_ex].
double sdi_quadrature(double b, double z_en, double z_ex, double tol = 1e-10);

// Second, fully independent cross-check: integrate the slow flow of the
// principal part near the critical fiber at small eps and accumulate
// div X_0 dt along the numerical orbit. Low precision by construction.
double sdi_flow_oracle(double b, double z_en, double z_ex, double eps = 1e-5);

// Entry/exit roots on S cut out by the sections a = -a_minus and a = +a_plus.
std::pair<double, double> endpoints_for_sections(double a_minus, double a_plus, double b);

} // namespace cusp::sdi
