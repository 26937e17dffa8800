#include "cusp/blowup.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace cusp::atlas {

const char* chart_name(ChartId id) {
    switch (id) {
        case ChartId::En: return "en";
        case ChartId::Ex: return "ex";
        case ChartId::Eps: return "eps";
        case ChartId::BPlus: return "b+";
        case ChartId::BMinus: return "b-";
    }
    return "?";
}

ChartId parse_chart_name(const std::string& name) {
    std::string s;
    for (char ch : name) s.push_back(static_cast<char>(std::tolower(ch)));
    if (s == "en") return ChartId::En;
    if (s == "ex") return ChartId::Ex;
    if (s == "eps") return ChartId::Eps;
    if (s == "b+") return ChartId::BPlus;
    if (s == "b-") return ChartId::BMinus;
    throw ConfigError("unknown chart '" + name + "' (expected en, ex, eps, b+, b-)");
}

StatePoint blow_down(const ChartPoint& p) {
    const double r = p.r;
    const double r2 = r * r, r3 = r2 * r, r5 = r3 * r2;
    switch (p.chart) {
        case ChartId::En:
            return {-r3, r2 * p.c[0], r * p.c[1], r5 * p.c[2]};
        case ChartId::Ex:
            return {r3, r2 * p.c[0], r * p.c[1], r5 * p.c[2]};
        case ChartId::Eps:
            return {r3 * p.c[0], r2 * p.c[1], r * p.c[2], r5};
        case ChartId::BPlus:
            return {r3 * p.c[0], r2, r * p.c[1], r5 * p.c[2]};
        case ChartId::BMinus:
            return {r3 * p.c[0], -r2, r * p.c[1], r5 * p.c[2]};
    }
    throw Error("blow_down: bad chart");
}

ChartPoint blow_up(ChartId chart, const StatePoint& s) {
    ChartPoint p;
    p.chart = chart;
    switch (chart) {
        case ChartId::En: {
            if (!(s.a < 0.0)) throw ChartDomainError("blow_up(en): requires a < 0");
            const double r = std::cbrt(-s.a);
            p.r = r;
            p.c = {s.b / (r * r), s.z / r, s.eps / std::pow(r, 5)};
            return p;
        }
        case ChartId::Ex: {
            if (!(s.a > 0.0)) throw ChartDomainError("blow_up(ex): requires a > 0");
            const double r = std::cbrt(s.a);
            p.r = r;
            p.c = {s.b / (r * r), s.z / r, s.eps / std::pow(r, 5)};
            return p;
        }
        case ChartId::Eps: {
            if (!(s.eps > 0.0)) throw ChartDomainError("blow_up(eps): requires eps > 0");
            const double r = std::pow(s.eps, 0.2);
            p.r = r;
            p.c = {s.a / (r * r * r), s.b / (r * r), s.z / r};
            return p;
        }
        case ChartId::BPlus: {
            if (!(s.b > 0.0)) throw ChartDomainError("blow_up(b+): requires b > 0");
            const double r = std::sqrt(s.b);
            p.r = r;
            p.c = {s.a / (r * r * r), s.z / r, s.eps / std::pow(r, 5)};
            return p;
        }
        case ChartId::BMinus: {
            if (!(s.b < 0.0)) throw ChartDomainError("blow_up(b-): requires b < 0");
            const double r = std::sqrt(-s.b);
            p.r = r;
            p.c = {s.a / (r * r * r), s.z / r, s.eps / std::pow(r, 5)};
            return p;
        }
    }
    throw Error("blow_up: bad chart");
}

ChartPoint matching_map(ChartId from, ChartId to, const ChartPoint& p) {
    if (p.chart != from) throw ChartDomainError("matching_map: point not in the source chart");
    return blow_up(to, blow_down(p));
}

double desing_kappa(ChartId chart) {
    return (chart == ChartId::En || chart == ChartId::Ex) ? 3.0 : 1.0;
}

Vec4 ChartField::operator()(const Vec4& rc) const {
    const double r = rc[0];
    const double r2 = r * r;

    switch (chart_) {
        case ChartId::En: {
            const double b1 = rc[1], z1 = rc[2], e1 = rc[3];
            const StatePoint s = blow_down({chart_, r, {b1, z1, e1}});
            const double f1 = sys_.eval_f(1, s), f2 = sys_.eval_f(2, s),
                         f3 = sys_.eval_f(3, s);
            return {-e1 * r * (1.0 + f1),
                    2.0 * e1 * b1 * (1.0 + f1) + 3.0 * r * e1 * f2,
                    -3.0 * (z1 * z1 * z1 + b1 * z1 - 1.0) + e1 * z1 * (1.0 + f1) -
                        3.0 * r2 * e1 * f3,
                    5.0 * e1 * e1 * (1.0 + f1)};
        }
        case ChartId::Ex: {
            const double b3 = rc[1], z3 = rc[2], e3 = rc[3];
            const StatePoint s = blow_down({chart_, r, {b3, z3, e3}});
            const double f1 = sys_.eval_f(1, s), f2 = sys_.eval_f(2, s),
                         f3 = sys_.eval_f(3, s);
            return {e3 * r * (1.0 + f1),
                    -2.0 * e3 * b3 * (1.0 + f1) + 3.0 * r * e3 * f2,
                    -3.0 * (z3 * z3 * z3 + b3 * z3 + 1.0) - e3 * z3 * (1.0 + f1) -
                        3.0 * r2 * e3 * f3,
                    -5.0 * e3 * e3 * (1.0 + f1)};
        }
        case ChartId::Eps: {
            const double a2 = rc[1], b2 = rc[2], z2 = rc[3];
            const StatePoint s = blow_down({chart_, r, {a2, b2, z2}});
            const double f1 = sys_.eval_f(1, s), f2 = sys_.eval_f(2, s),
                         f3 = sys_.eval_f(3, s);
            return {0.0,
                    1.0 + f1,
                    r * f2,
                    -(z2 * z2 * z2 + b2 * z2 + a2) - r2 * f3};
        }
        case ChartId::BPlus: {
            const double a2 = rc[1], z2 = rc[2], e2 = rc[3];
            const StatePoint s = blow_down({chart_, r, {a2, z2, e2}});
            const double f1 = sys_.eval_f(1, s), f2 = sys_.eval_f(2, s),
                         f3 = sys_.eval_f(3, s);
            return {0.5 * r2 * e2 * f2,
                    e2 * (1.0 + f1) - 1.5 * r * e2 * f2 * a2,
                    -(z2 * z2 * z2 + z2 + a2) - r2 * e2 * f3 - 0.5 * r * e2 * f2 * z2,
                    -2.5 * r * e2 * e2 * f2};
        }
        case ChartId::BMinus: {
            const double a2 = rc[1], z2 = rc[2], e2 = rc[3];
            const StatePoint s = blow_down({chart_, r, {a2, z2, e2}});
            const double f1 = sys_.eval_f(1, s), f2 = sys_.eval_f(2, s),
                         f3 = sys_.eval_f(3, s);
            return {-0.5 * r2 * e2 * f2,
                    e2 * (1.0 + f1) + 1.5 * r * e2 * f2 * a2,
                    -(z2 * z2 * z2 - z2 + a2) - r2 * e2 * f3 + 0.5 * r * e2 * f2 * z2,
                    2.5 * r * e2 * e2 * f2};
        }
    }
    throw Error("chart_field: bad chart");
}

Vec4 ChartField::operator()(const ChartPoint& p) const {
    return (*this)(Vec4{p.r, p.c[0], p.c[1], p.c[2]});
}

ChartField chart_field(ChartId chart, const A3System& system) {
    return ChartField(chart, system);
}

LayerLabel classify_entry(double b, double eps, double L, double M) {
    if (!(0.0 < L && L < M)) throw ConfigError("classify_entry: need 0 < L < M");
    if (!(eps > 0.0)) throw DomainError("classify_entry: eps must be positive");
    const double scale = std::pow(eps, 0.4);
    LayerLabel lab;
    lab.inner = std::abs(b) < M * scale;
    lab.plus_lateral = b > L * scale;
    lab.minus_lateral = -b > L * scale;
    return lab;
}

} // namespace cusp::atlas
