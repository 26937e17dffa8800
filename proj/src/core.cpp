#include "cusp/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cusp {

bool StatePoint::finite() const {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(z) && std::isfinite(eps);
}

A3System A3System::perturbed(ScalarField g1, ScalarField g2, ScalarField g3) {
    A3System sys;
    sys.f1 = std::move(g1);
    sys.f2 = std::move(g2);
    sys.f3 = std::move(g3);
    sys.principal = false;
    return sys;
}

double A3System::eval_f(int i, const StatePoint& p) const {
    if (principal) return 0.0;
    const ScalarField* f = nullptr;
    switch (i) {
        case 1: f = &f1; break;
        case 2: f = &f2; break;
        case 3: f = &f3; break;
        default: throw Error("eval_f: component index must be 1, 2 or 3");
    }
    if (!*f) return 0.0;
    const double v = (*f)(p);
    if (!std::isfinite(v)) {
        throw EvalError("perturbation f" + std::to_string(i) + " evaluated non-finite at (a=" +
                        std::to_string(p.a) + ", b=" + std::to_string(p.b) + ", z=" +
                        std::to_string(p.z) + ", eps=" + std::to_string(p.eps) + ")");
    }
    return v;
}

Vec4 eval_fast(const A3System& sys, const StatePoint& p) {
    const double g1 = sys.eval_f(1, p);
    const double g2 = sys.eval_f(2, p);
    const double g3 = sys.eval_f(3, p);
    return {p.eps * (1.0 + g1),
            p.eps * g2,
            -(p.z * p.z * p.z + p.b * p.z + p.a + p.eps * g3),
            0.0};
}

Vec4 eval_slow(const A3System& sys, const StatePoint& p) {
    if (!(p.eps > 0.0)) throw DomainError("slow-time field undefined at eps=0");
    Vec4 v = eval_fast(sys, p);
    for (double& x : v) x /= p.eps;
    return v;
}

Vec4 layer_field(const A3System& /*sys*/, const StatePoint& p) {
    // slow variables frozen, eps forced to 0 inside g: the eps*f3 term drops.
    return {0.0, 0.0, -(p.z * p.z * p.z + p.b * p.z + p.a), 0.0};
}

namespace {

double cubic_residual(double a, double b, double z) {
    return z * z * z + b * z + a;
}

// One guarded Newton step on z^3 + b z + a.
double polish_root(double a, double b, double z) {
    const double f = cubic_residual(a, b, z);
    const double df = 3.0 * z * z + b;
    if (std::abs(df) > 1e-8 * std::max(1.0, z * z)) {
        const double zn = z - f / df;
        if (std::abs(cubic_residual(a, b, zn)) <= std::abs(f)) return zn;
    }
    return z;
}

} // namespace

CubicRoots critical_branches(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw DomainError("critical_branches: coefficients must be finite");

    CubicRoots out;
    out.discriminant = -4.0 * b * b * b - 27.0 * a * a;

    if (a == 0.0 && b == 0.0) {
        out.roots = {0.0};
        out.multiplicity = {3};
        return out;
    }

    if (out.discriminant > 0.0) {
        // three distinct real roots: trigonometric form (b < 0 here)
        const double m = 2.0 * std::sqrt(-b / 3.0);
        double arg = 3.0 * a / (b * m);   // = cos(3 theta)
        arg = std::clamp(arg, -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            const double z = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
            out.roots.push_back(polish_root(a, b, z));
            out.multiplicity.push_back(1);
        }
        std::sort(out.roots.begin(), out.roots.end());
    } else if (out.discriminant < 0.0) {
        // one real root: Cardano with cancellation-safe branch
        const double q = a, p = b;
        const double D = q * q / 4.0 + p * p * p / 27.0;   // > 0 here
        const double s = std::sqrt(D);
        const double u = std::cbrt(-q / 2.0 - std::copysign(s, q));
        const double z = (u == 0.0) ? 0.0 : u - p / (3.0 * u);
        out.roots.push_back(polish_root(a, b, z));
        out.multiplicity.push_back(1);
    } else {
        // repeated root, not the triple-root origin: b != 0 here
        const double zd = -3.0 * a / (2.0 * b);   // double root
        const double zs = 3.0 * a / b;            // simple root
        if (zs < zd) {
            out.roots = {zs, zd};
            out.multiplicity = {1, 2};
        } else {
            out.roots = {zd, zs};
            out.multiplicity = {2, 1};
        }
    }
    return out;
}

PointClass classify_point(double a, double b, double z, const ClassifyTols& tols) {
    if (std::abs(cubic_residual(a, b, z)) > tols.tol_S) return PointClass::OffManifold;
    if (std::max({std::abs(a), std::abs(b), std::abs(z)}) <= tols.tol_Delta) return PointClass::Cusp;
    if (std::abs(3.0 * z * z + b) < tols.tol_Delta) return PointClass::Fold;
    return PointClass::Regular;
}

const char* to_string(PointClass c) {
    switch (c) {
        case PointClass::OffManifold: return "OffManifold";
        case PointClass::Regular: return "Regular";
        case PointClass::Fold: return "Fold";
        case PointClass::Cusp: return "Cusp";
    }
    return "?";
}

std::pair<double, double> fold_curve_param(double z) {
    return {2.0 * z * z * z, -3.0 * z * z};
}

double potential(double a, double b, double z) {
    return 0.25 * z * z * z * z + 0.5 * b * z * z + a * z;
}

int quasihomogeneous_order(const Monomial& m) {
    if (m.alpha < 0 || m.beta < 0 || m.gamma < 0 || m.delta < 0)
        throw DomainError("quasihomogeneous_order: exponents must be non-negative");
    return 3 * m.alpha + 2 * m.beta + m.gamma + 5 * m.delta;
}

bool check_nf_condition(const std::vector<Monomial>& P_i, int i, int k) {
    if (k < 2) throw DomainError("check_nf_condition: k must be >= 2");
    if (i < 1 || i > k) throw DomainError("check_nf_condition: need 1 <= i <= k");
    const int bound = 2 * k - i + 1;
    for (const Monomial& m : P_i) {
        if (m.delta < 1) return false;                    // P_i(...,0) = 0
        if (quasihomogeneous_order(m) < bound) return false;
    }
    return true;
}

double flat_radial_bump(const StatePoint& p) {
    const double s = p.a * p.a + p.b * p.b + p.z * p.z + p.eps * p.eps;
    if (s <= 0.0) return 0.0;
    return std::exp(-1.0 / s);
}

double flat_eps_bump(const StatePoint& p, double kappa) {
    if (p.eps <= 0.0) return 0.0;
    return std::exp(-kappa / std::pow(p.eps, 0.4));
}

A3System stock_flat_system(double amplitude, double kappa) {
    auto f1 = [amplitude, kappa](const StatePoint& p) {
        return amplitude * flat_eps_bump(p, kappa) * std::cos(p.a - p.z);
    };
    auto f2 = [amplitude, kappa](const StatePoint& p) {
        return 0.5 * amplitude * flat_eps_bump(p, kappa) * std::sin(p.b + p.z);
    };
    auto f3 = [amplitude, kappa](const StatePoint& p) {
        return 0.5 * amplitude * flat_eps_bump(p, kappa) * (p.a + p.z) / (1.0 + p.a * p.a);
    };
    return A3System::perturbed(f1, f2, f3);
}

} // namespace cusp
