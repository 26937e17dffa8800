#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cusp/errors.hpp"

namespace cusp {

// A point (a, b, z, eps) of the extended phase space R^4.
// a, b are the slow coordinates, z the fast one, eps the singular parameter.
struct StatePoint {
    double a = 0.0;
    double b = 0.0;
    double z = 0.0;
    double eps = 0.0;

    Vec4 to_vec() const { return {a, b, z, eps}; }
    static StatePoint from_vec(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
    bool finite() const;
};

using ScalarField = std::function<double(const StatePoint&)>;

// The cusp slow-fast vector field
//   a' = eps (1 + f1),  b' = eps f2,  z' = -(z^3 + b z + a + eps f3),  eps' = 0
// with user-supplied smooth perturbations f1, f2, f3. `principal` short-circuits
// all perturbations to exactly zero.
struct A3System {
    ScalarField f1, f2, f3;
    bool principal = true;

    static A3System principal_part() { return A3System{}; }
    static A3System perturbed(ScalarField f1, ScalarField f2, ScalarField f3);

    // Evaluates f_i (i in 1..3); throws EvalError naming the component if the
    // result is non-finite.
    double eval_f(int i, const StatePoint& p) const;
};

Vec4 eval_fast(const A3System& sys, const StatePoint& p);
Vec4 eval_slow(const A3System& sys, const StatePoint& p);
Vec4 layer_field(const A3System& sys, const StatePoint& p);

// Real roots of z^3 + b z + a, ascending, with multiplicities.
struct CubicRoots {
    std::vector<double> roots;        // ascending
    std::vector<int> multiplicity;    // parallel to roots
    double discriminant = 0.0;        // -4 b^3 - 27 a^2
    int count() const { return static_cast<int>(roots.size()); }
};

CubicRoots critical_branches(double a, double b);

enum class PointClass { OffManifold, Regular, Fold, Cusp };

struct ClassifyTols {
    double tol_S = 1e-9;
    double tol_Delta = 1e-9;
};

PointClass classify_point(double a, double b, double z, const ClassifyTols& tols = {});
const char* to_string(PointClass c);

// Parametrization of the fold curve Delta: z -> (a, b) = (2 z^3, -3 z^2).
std::pair<double, double> fold_curve_param(double z);

// Cusp-catastrophe potential V = z^4/4 + b z^2/2 + a z; dV/dz = z^3 + b z + a.
double potential(double a, double b, double z);

// Monomial a^alpha b^beta z^gamma eps^delta with a real coefficient.
struct Monomial {
    int alpha = 0;
    int beta = 0;
    int gamma = 0;
    int delta = 0;
    double coeff = 1.0;
};

// Quasihomogeneous order under the blow-up grading (3, 2, 1, 5).
int quasihomogeneous_order(const Monomial& m);

// Normal-form admissibility of a perturbation component P_i for the A_k
// hierarchy: every monomial must carry a factor of eps and have order
// >= 2k - i + 1.
bool check_nf_condition(const std::vector<Monomial>& P_i, int i, int k);

// --- stock flat perturbations (test library) -------------------------------

// exp(-1/s) with s = a^2 + b^2 + z^2 + eps^2; flat at the origin of R^4.
double flat_radial_bump(const StatePoint& p);

// exp(-kappa / eps^{2/5}) for eps > 0, 0 otherwise; flat along {eps = 0}.
double flat_eps_bump(const StatePoint& p, double kappa = 1.0);

// The robustness probe: f_i = amplitude * exp(-kappa/eps^{2/5}) * g_i(a,b,z)
// with bounded smooth g_i. Perturbs all three components.
A3System stock_flat_system(double amplitude, double kappa = 1.5);

} // namespace cusp
