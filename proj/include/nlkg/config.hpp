#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "nlkg/flow.hpp"
#include "nlkg/mobile_metric.hpp"

namespace nlkg {

// Flat key=value configuration ('#' comments). Unknown keys are errors so
// typos never pass silently.
struct Config {
    Grid grid{30.0, 1024};
    Nonlinearity nonlin = Nonlinearity::monomial(3.0);
    FlowParams flow;
    MobileParams mobile;
    FrameOptions frame;
    std::uint64_t seed = 20240101;
    std::vector<std::string> experiments;
    std::vector<double> eta_ladder{1e-3, 1e-4, 1e-5, 1e-6};
    std::string out_dir = "out";

    // canonical sorted key=value text; the config hash is FNV-1a 64 of it
    std::string canonical() const;
    std::uint64_t hash() const;
    std::string hash_hex() const;
};

Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

// Names every suite entry that run_suite understands.
const std::vector<std::string>& all_experiments();

}  // namespace nlkg
