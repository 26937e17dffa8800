#pragma once

#include <string>

#include <json.hpp>

#include "cusp/transition.hpp"

namespace cusp::report {

// Effective run settings echoed into every report.
struct Meta {
    double rtol = 1e-10;
    double atol = 1e-12;
    double a_minus = 1.0;
    double a_plus = 1.0;
    double L = 0.5;
    double M = 1.0;
    uint64_t seed = 0;
    nlohmann::json config_echo;
};

nlohmann::json meta_json(const Meta& meta);
std::string build_id();

// CSV with header b,eps,rate_num,shift_num,target_I,deviation,wall_time
std::string sweep_csv(const lab::SweepReport& rep);
nlohmann::json sweep_json(const lab::SweepReport& rep, const Meta& meta);

std::string layer_csv(const lab::LayerStudy& study);
nlohmann::json layer_json(const lab::LayerStudy& study, const Meta& meta);

std::string fold_csv(const lab::FoldFit& fit);
nlohmann::json fold_json(const lab::FoldFit& fit, const Meta& meta);

void write_file(const std::string& path, const std::string& content);

} // namespace cusp::report
