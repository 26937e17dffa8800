#include "cusp/expmaps.hpp"

#include <cmath>
#include <limits>

namespace cusp::xmap {

namespace {

constexpr double kLogFloor = -700.0;   // below this exp() underflows

double safe_exp(double x) { return (x < kLogFloor) ? 0.0 : std::exp(x); }

int sign_of(double x) { return (x > 0) - (x < 0); }

// central finite-difference derivative of a diffeomorphism sample
double diffeo_derivative(const DiffeoFamily& Psi, double y, double V, double eps) {
    const double h = 1e-6 * std::max(1.0, std::abs(y));
    return (Psi(y + h, V, eps) - Psi(y - h, V, eps)) / (2.0 * h);
}

} // namespace

ExpTypeMap pure_exponential(double A) {
    ExpTypeMap m;
    m.rate = [A](double, double) { return A; };
    m.no_shift = true;
    m.linear = true;
    return m;
}

ExpTypeMap make_no_shift(std::function<double(double, double)> rate,
                         std::function<double(double, double, double)> correction,
                         bool linear) {
    ExpTypeMap m;
    m.rate = std::move(rate);
    m.correction = std::move(correction);
    m.no_shift = true;
    m.linear = linear;
    return m;
}

EvalParts eval_parts(const ExpTypeMap& D, double V, double Z, double eps) {
    if (!(eps > 0.0)) throw DomainError("exponential-type eval: eps must be positive");
    EvalParts out;
    const double B = D.B(V, eps);
    const double exponent = -(D.A(V, eps) + D.Phi(V, Z, eps)) / eps;
    out.tail_sign = sign_of(Z);
    out.log_tail = (Z == 0.0) ? -std::numeric_limits<double>::infinity()
                              : std::log(std::abs(Z)) + exponent;
    out.value = B + Z * safe_exp(exponent);
    return out;
}

double eval(const ExpTypeMap& D, double V, double Z, double eps) {
    return eval_parts(D, V, Z, eps).value;
}

namespace {

Components extract_from_g(const std::function<double(double)>& g, double z_probe) {
    const double g1 = g(z_probe);
    const double g2 = g(z_probe / 2.0);
    const double g3 = g(z_probe / 4.0);
    Components c;
    c.A = (8.0 * g3 - 6.0 * g2 + g1) / 3.0;
    if (!(c.A > 0.0))
        throw NonContractiveError("extract_components: extracted rate A <= 0, map is not of "
                                  "exponential type here");
    c.phi_at_probe = g1 - c.A;
    return c;
}

} // namespace

Components extract_components(const PointMap& D, double V, double eps, double z_probe) {
    if (!(eps > 0.0)) throw DomainError("extract_components: eps must be positive");
    if (!(z_probe > 0.0)) throw ConfigError("extract_components: z_probe must be positive");
    const double B = D(V, 0.0, eps);
    auto g = [&](double h) {
        const double q = (D(V, h, eps) - B) / h;
        if (!(q > 0.0))
            throw NonContractiveError("extract_components: (D - B)/Z <= 0, map is not of "
                                      "exponential type here");
        return -eps * std::log(q);
    };
    Components c = extract_from_g(g, z_probe);
    c.B = B;
    return c;
}

Components extract_components(const ExpTypeMap& D, double V, double eps, double z_probe) {
    if (!(eps > 0.0)) throw DomainError("extract_components: eps must be positive");
    if (!(z_probe > 0.0)) throw ConfigError("extract_components: z_probe must be positive");
    auto g = [&](double h) {
        const EvalParts p = eval_parts(D, V, h, eps);
        if (p.tail_sign <= 0)
            throw NonContractiveError("extract_components: tail sign violation");
        return -eps * (p.log_tail - std::log(h));
    };
    Components c = extract_from_g(g, z_probe);
    c.B = D.B(V, eps);
    return c;
}

ExpTypeMap compose_left(const DiffeoFamily& Psi, const ExpTypeMap& D) {
    if (!Psi.value) throw ConfigError("compose_left: empty diffeomorphism");
    ExpTypeMap out;
    out.no_shift = false;
    out.linear = false;
    out.shift = [Psi, D](double V, double eps) { return Psi(D.B(V, eps), V, eps); };
    out.rate = [D](double V, double eps) { return D.A(V, eps); };
    out.correction = [Psi, D](double V, double Z, double eps) {
        const double B = D.B(V, eps);
        const EvalParts p = eval_parts(D, V, Z, eps);
        const double T = p.value - B;
        double C_eff;
        if (T != 0.0) {
            C_eff = (Psi(B + T, V, eps) - Psi(B, V, eps)) / T;
        } else {
            C_eff = diffeo_derivative(Psi, B, V, eps);
        }
        if (!(C_eff > 0.0))
            throw DiffeomorphismError("compose_left: derivative sign change detected in Psi");
        return D.Phi(V, Z, eps) - eps * std::log(C_eff);
    };
    return out;
}

ExpTypeMap compose_right(const ExpTypeMap& D, const DiffeoFamily& Psi) {
    if (!Psi.value) throw ConfigError("compose_right: empty diffeomorphism");
    // eager probe of the no-shift requirement at a reference parameter point
    if (std::abs(Psi(0.0, 0.0, 0.1)) > 1e-14)
        throw ShiftViolationError("compose_right: Psi(0) != 0, exponential structure is not "
                                  "preserved");
    ExpTypeMap out;
    out.no_shift = D.no_shift;
    out.linear = false;
    out.shift = [D](double V, double eps) { return D.B(V, eps); };
    out.rate = [D](double V, double eps) { return D.A(V, eps); };
    out.correction = [Psi, D](double V, double Z, double eps) {
        const double psi0 = Psi(0.0, V, eps);
        if (std::abs(psi0) > 1e-14)
            throw ShiftViolationError("compose_right: Psi(0) != 0 at this parameter point");
        if (Z == 0.0) {
            const double C0 = diffeo_derivative(Psi, 0.0, V, eps);
            if (!(C0 > 0.0))
                throw DiffeomorphismError("compose_right: derivative sign change at 0");
            return D.Phi(V, 0.0, eps) - eps * std::log(C0);
        }
        const double W = Psi(Z, V, eps);
        const double ratio = W / Z;
        if (!(ratio > 0.0))
            throw DiffeomorphismError("compose_right: derivative sign change detected in Psi");
        return D.Phi(V, W, eps) - eps * std::log(ratio);
    };
    return out;
}

ExpTypeMap compose_exp(const ExpTypeMap& outer, const ExpTypeMap& inner) {
    if (!inner.no_shift)
        throw ChainStructureError("compose_exp: inner map must be of exponential type with no "
                                  "shift");
    ExpTypeMap out;
    out.no_shift = outer.no_shift;
    out.linear = outer.linear && inner.linear;
    out.shift = [outer](double V, double eps) { return outer.B(V, eps); };
    out.rate = [outer, inner](double V, double eps) {
        return outer.A(V, eps) + inner.A(V, eps);
    };
    out.correction = [outer, inner](double V, double Z, double eps) {
        const double T = eval(inner, V, Z, eps);   // underflow -> 0, a valid limit point
        return inner.Phi(V, Z, eps) + outer.Phi(V, T, eps);
    };
    return out;
}

namespace {

struct ChainRoles {
    const ExpTypeMap* m0;
    const ExpTypeMap* m1;
    const ExpTypeMap* m3;
    const ExpTypeMap* m4;
};

ChainRoles validate_chain(const std::array<ChainLink, 5>& maps) {
    auto expect = [&](int i, bool need_linear) -> const ExpTypeMap* {
        const ExpTypeMap* m = std::get_if<ExpTypeMap>(&maps[i]);
        if (!m)
            throw ChainStructureError("compose_chain: map " + std::to_string(i + 1) +
                                      " must be of exponential type");
        if (!m->no_shift)
            throw ChainStructureError("compose_chain: map " + std::to_string(i + 1) +
                                      " must have no shift");
        if (need_linear && !m->linear)
            throw ChainStructureError("compose_chain: map " + std::to_string(i + 1) +
                                      " must be linear");
        return m;
    };
    ChainRoles r;
    r.m0 = expect(0, true);
    r.m1 = expect(1, false);
    r.m3 = expect(3, false);
    r.m4 = expect(4, true);
    if (const ExpTypeMap* mid = std::get_if<ExpTypeMap>(&maps[2])) {
        (void)mid;   // any exponential-type middle map is admissible
    }
    return r;
}

// Sum of two signed log-space quantities: s1 e^{l1} + s2 e^{l2}.
struct SignedLog {
    double log = -std::numeric_limits<double>::infinity();
    int sign = 0;
};

SignedLog signed_log_add(SignedLog x, SignedLog y) {
    if (x.sign == 0 || x.log == -std::numeric_limits<double>::infinity()) return y;
    if (y.sign == 0 || y.log == -std::numeric_limits<double>::infinity()) return x;
    const double M = std::max(x.log, y.log);
    const double s = x.sign * std::exp(x.log - M) + y.sign * std::exp(y.log - M);
    if (s == 0.0) return {};
    return {M + std::log(std::abs(s)), sign_of(s)};
}

} // namespace

ExpTypeMap compose_chain(const std::array<ChainLink, 5>& maps) {
    const ChainRoles r = validate_chain(maps);

    const ExpTypeMap d21 = compose_exp(*r.m1, *r.m0);
    const ExpTypeMap d54 = compose_exp(*r.m4, *r.m3);

    ExpTypeMap mid;
    if (const ExpTypeMap* m2 = std::get_if<ExpTypeMap>(&maps[2])) {
        mid = compose_exp(*m2, d21);
    } else {
        mid = compose_left(std::get<DiffeoFamily>(maps[2]), d21);
    }

    // final stage: outer no-shift map over a (possibly shifted) inner map
    ExpTypeMap out;
    out.no_shift = mid.no_shift;
    out.linear = mid.linear && d54.linear && mid.no_shift;
    out.shift = [d54, mid](double V, double eps) {
        return eval(d54, V, mid.B(V, eps), eps);
    };
    out.rate = [d54, mid](double V, double eps) {
        return mid.A(V, eps) + d54.A(V, eps);
    };
    out.correction = [d54, mid](double V, double Z, double eps) {
        if (!(eps > 0.0)) throw DomainError("compose_chain: eps must be positive");
        const double B_E = mid.B(V, eps);
        const EvalParts pe = eval_parts(mid, V, Z, eps);
        const double p1 = d54.Phi(V, pe.value, eps);
        const double p0 = d54.Phi(V, B_E, eps);

        // F(Z) - F(0) = e^{-A54/eps} [ T e^{-p1/eps} + B_E e^{-p0/eps} expm1(-(p1-p0)/eps) ]
        SignedLog t1{pe.log_tail - p1 / eps, pe.tail_sign};
        SignedLog t2{};
        const double m2 = B_E * std::expm1(-(p1 - p0) / eps);
        if (m2 != 0.0) t2 = {std::log(std::abs(m2)) - p0 / eps, sign_of(m2)};
        const SignedLog bracket = signed_log_add(t1, t2);
        if (bracket.sign * sign_of(Z) <= 0)
            throw NonContractiveError("compose_chain: composed increment not aligned with Z");
        // Phi = -eps (log|F - F0| - log|Z|) - (A_E + A54); the A54/eps factor cancels
        return -eps * (bracket.log - std::log(std::abs(Z))) - mid.A(V, eps);
    };
    return out;
}

RegularTransition regular_transition(double U_i, double U_f, double eps, double V, double Z) {
    if (!(eps > 0.0)) throw DomainError("regular_transition: eps must be positive");
    if (U_f < U_i) throw DomainError("regular_transition: requires U_f >= U_i");
    RegularTransition t;
    t.V = V;
    t.eps = eps;
    t.log_contraction = -(U_f - U_i) / eps;
    t.Z = Z * safe_exp(t.log_contraction);
    return t;
}

Saddle1Transition saddle1_transition(const std::vector<double>& beta, double gamma,
                                     double Lambda, double u, const std::vector<double>& v,
                                     double w, double w_out, double Z) {
    if (beta.size() != v.size())
        throw ConfigError("saddle1_transition: beta and v must have equal length");
    if (!(gamma > 0.0) || !(Lambda > 0.0))
        throw DomainError("saddle1_transition: gamma and Lambda must be positive");
    if (!(0.0 < w && w < w_out))
        throw DomainError("saddle1_transition: ordering violation, need 0 < w < w_out");
    for (size_t i = 0; i < v.size(); ++i) {
        if (!(beta[i] > 0.0)) throw DomainError("saddle1_transition: beta_i must be positive");
        if (std::abs(v[i]) > 10.0 * std::pow(w, beta[i] / gamma))
            throw DomainError("saddle1_transition: v_" + std::to_string(i + 1) +
                              " violates the O(w^{beta/gamma}) envelope");
    }
    Saddle1Transition t;
    t.u = u * std::pow(w / w_out, 1.0 / gamma);
    t.v.reserve(v.size());
    for (size_t i = 0; i < v.size(); ++i)
        t.v.push_back(v[i] * std::pow(w_out / w, beta[i] / gamma));
    t.w = w_out;
    t.log_contraction = -(Lambda / (gamma * w)) * (1.0 - w / w_out);
    t.Z = Z * safe_exp(t.log_contraction);
    return t;
}

Saddle2Transition saddle2_transition(const std::vector<double>& beta, double gamma,
                                     double Lambda, double u, double u_out,
                                     const std::vector<double>& v, double w, double Z) {
    if (beta.size() != v.size())
        throw ConfigError("saddle2_transition: beta and v must have equal length");
    if (!(gamma > 0.0) || !(Lambda > 0.0))
        throw DomainError("saddle2_transition: gamma and Lambda must be positive");
    if (!(0.0 < u && u < u_out))
        throw DomainError("saddle2_transition: ordering violation, need 0 < u < u_out");
    if (!(w > 0.0)) throw DomainError("saddle2_transition: w must be positive");
    Saddle2Transition t;
    t.u = u_out;
    t.v.reserve(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        if (!(beta[i] > 0.0)) throw DomainError("saddle2_transition: beta_i must be positive");
        t.v.push_back(v[i] * std::pow(u / u_out, beta[i]));
    }
    t.w = w * std::pow(u / u_out, gamma);
    t.log_contraction = -(Lambda / (gamma * w)) * (std::pow(u_out / u, gamma) - 1.0);
    t.Z = Z * safe_exp(t.log_contraction);
    return t;
}

DiffeoFamily identity_diffeo() {
    return {[](double y, double, double) { return y; }};
}

} // namespace cusp::xmap
