#include "cusp/sdi.hpp"

#include <cmath>
#include <functional>

#include "cusp/core.hpp"
#include "cusp/odeflow.hpp"

namespace cusp::sdi {

namespace {

constexpr double kFoldTol = 1e-12;

double integrand(double b, double z) {
    const double d = 3.0 * z * z + b;
    return d * d;
}

// True if the open z-interval between lo and hi contains a fold point.
bool crosses_fold(double b, double lo, double hi) {
    if (b >= 0.0) return false;
    if (lo > hi) std::swap(lo, hi);
    const double zf = std::sqrt(-b / 3.0);
    return (lo < zf && zf < hi) || (lo < -zf && -zf < hi);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

} // namespace

double slow_field_on_branch(const BranchPoint& p) {
    const double d = 3.0 * p.z * p.z + p.b;
    if (std::abs(d) < kFoldTol)
        throw FoldSingularityError("slow_field_on_branch: point lies on the fold curve");
    return -1.0 / d;
}

double sdi_antiderivative(double b, double zeta) {
    return 1.8 * std::pow(zeta, 5) + 2.0 * zeta * zeta * zeta * b + b * b * zeta;
}

double sdi_closed(double b, double z_en, double z_ex) {
    if (std::abs(3.0 * z_en * z_en + b) < kFoldTol ||
        std::abs(3.0 * z_ex * z_ex + b) < kFoldTol)
        throw FoldSingularityError("sdi_closed: endpoint lies on the fold curve");
    return sdi_antiderivative(b, z_ex) - sdi_antiderivative(b, z_en);
}

double sdi_quadrature(double b, double z_en, double z_ex, double tol) {
    if (crosses_fold(b, z_en, z_ex) || std::abs(3.0 * z_en * z_en + b) < kFoldTol ||
        std::abs(3.0 * z_ex * z_ex + b) < kFoldTol)
        throw FoldSingularityError("sdi_quadrature: path touches the fold curve");
    if (z_en == z_ex) return 0.0;
    auto f = [b](double z) { return integrand(b, z); };
    const double m = 0.5 * (z_en + z_ex);
    const double fa = f(z_en), fm = f(m), fb = f(z_ex);
    const double whole = (z_ex - z_en) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, z_en, z_ex, fa, fm, fb, whole, tol, 48);
}

double sdi_flow_oracle(double b, double z_en, double z_ex, double eps) {
    if (crosses_fold(b, z_en, z_ex))
        throw FoldSingularityError("sdi_flow_oracle: path touches the fold curve");
    const A3System sys = A3System::principal_part();
    ode::Field slow = [sys](const Vec4& y) {
        return eval_slow(sys, StatePoint::from_vec(y));
    };
    const double a_en = -(z_en * z_en * z_en + b * z_en);
    const Vec4 start{a_en, b, z_en, eps};

    // accumulate div X_0 dt = -(3 z^2 + b) dt with 5-point Gauss on each
    // accepted step of the slow-time orbit
    static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
    static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};

    const int dir = (z_ex < z_en) ? -1 : +1;
    const ode::SectionHit hit = ode::integrate_to_section(
        slow, start, {ode::Axis::z, z_ex, 0}, dir, {1e-10, 1e-12}, 1e9, /*keep=*/true);

    double acc = 0.0;
    const auto& tr = hit.trajectory;
    for (size_t i = 0; i + 1 < tr.samples.size(); ++i) {
        const double t0 = tr.samples[i].t, t1 = tr.samples[i + 1].t;
        const double half = 0.5 * (t1 - t0), mid = 0.5 * (t0 + t1);
        for (int g = 0; g < 5; ++g) {
            const Vec4 y = tr.at(mid + half * gx[g]);
            acc += gw[g] * half * (-(3.0 * y[2] * y[2] + y[1]));
        }
    }
    return acc;
}

std::pair<double, double> endpoints_for_sections(double a_minus, double a_plus, double b) {
    if (!(a_minus > 0.0) || !(a_plus > 0.0))
        throw DomainError("endpoints_for_sections: section offsets must be positive");

    // entry: z > 0 attracting root of z^3 + b z - a_minus = 0
    const CubicRoots en = critical_branches(-a_minus, b);
    double z_en = 0.0;
    int n_en = 0;
    for (double z : en.roots)
        if (z > 0.0 && 3.0 * z * z + b > 0.0) {
            z_en = z;
            ++n_en;
        }

    // exit: z < 0 attracting root of z^3 + b z + a_plus = 0
    const CubicRoots ex = critical_branches(a_plus, b);
    double z_ex = 0.0;
    int n_ex = 0;
    for (double z : ex.roots)
        if (z < 0.0 && 3.0 * z * z + b > 0.0) {
            z_ex = z;
            ++n_ex;
        }

    if (n_en != 1 || n_ex != 1)
        throw GeometryError("endpoints_for_sections: expected exactly one attracting root per "
                            "section, found " +
                            std::to_string(n_en) + " at entry, " + std::to_string(n_ex) +
                            " at exit");
    return {z_en, z_ex};
}

} // namespace cusp::sdi
