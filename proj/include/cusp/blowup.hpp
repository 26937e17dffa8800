#pragma once

#include <array>
#include <string>

#include "cusp/core.hpp"

namespace cusp::atlas {

// Directional charts of the quasihomogeneous blow-up with weights (3,2,1,5):
//   En:  a = -r^3            Ex:  a = r^3           Eps: eps = r^5
//   BPlus: b = r^2           BMinus: b = -r^2
enum class ChartId { En, Ex, Eps, BPlus, BMinus };

const char* chart_name(ChartId id);                  // "en", "ex", "eps", "b+", "b-"
ChartId parse_chart_name(const std::string& name);   // case-insensitive

// Chart coordinates: En/Ex carry (b_i, z_i, eps_i); Eps carries (a2, b2, z2);
// BPlus/BMinus carry (a2, z2, eps2).
struct ChartPoint {
    ChartId chart = ChartId::En;
    double r = 0.0;
    std::array<double, 3> c{};
};

StatePoint blow_down(const ChartPoint& p);
ChartPoint blow_up(ChartId chart, const StatePoint& s);
ChartPoint matching_map(ChartId from, ChartId to, const ChartPoint& p);

// Desingularized chart vector field (time rescaled by 3/r^2 on En/Ex and by
// 1/r^2 elsewhere). Exact pushforward of the blown-down system, so the
// user's perturbations enter without any flatness assumption.
class ChartField {
public:
    ChartField(ChartId chart, A3System system)
        : chart_(chart), sys_(std::move(system)) {}

    Vec4 operator()(const ChartPoint& p) const;
    Vec4 operator()(const Vec4& rc) const;   // state = (r, c0, c1, c2)

    ChartId chart() const { return chart_; }

private:
    ChartId chart_;
    A3System sys_;
};

ChartField chart_field(ChartId chart, const A3System& system);

// Desingularization factor kappa r^{-2}: kappa = 3 on En/Ex, 1 elsewhere.
double desing_kappa(ChartId chart);

// Entry-section layer flags per the inner / lateral cover of Sigma^-.
struct LayerLabel {
    bool inner = false;
    bool plus_lateral = false;
    bool minus_lateral = false;
};

LayerLabel classify_entry(double b, double eps, double L, double M);

} // namespace cusp::atlas
