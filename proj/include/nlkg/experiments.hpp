#pragma once
#include <string>
#include <utility>
#include <vector>

#include "nlkg/config.hpp"
#include "nlkg/manifold.hpp"
#include "nlkg/rng.hpp"

namespace nlkg {

// Shared fixture: ground state + spectral frame at the configured grid.
struct Lab {
    Config cfg;
    SpectralFrame frame;
    std::vector<std::string> warnings;

    const SolitonFamily& family() const { return frame.family(); }
    const Grid& grid() const { return frame.grid(); }
};

Lab build_lab(const Config& cfg);

struct Series {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct ExperimentRecord {
    std::string config_hash;
    std::string provenance;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<Series> series;
    std::vector<std::string> warnings;
    double wall_clock_sec = 0.0;  // written to the timing sidecar, not the record

    void put(const std::string& key, double value);
    bool has(const std::string& key) const;
    double get(const std::string& key) const;
    std::string to_json() const;  // deterministic: ordered keys, %.17g floats
};

// Runs the experiments named in cfg.experiments (all metrics land in one
// record). Unknown names were rejected at config parse time.
ExperimentRecord run_suite(Lab& lab);

void write_record(const ExperimentRecord& rec, const std::string& out_dir);
// One CSV per figure-worthy series plus a .schema.json sidecar per file.
void emit_plotdata(const ExperimentRecord& rec, const std::string& out_dir);

void exp_spectrum(Lab& lab, SplitMix64& rng, ExperimentRecord& rec);
void exp_conservation(Lab& lab, SplitMix64& rng, ExperimentRecord& rec);
void exp_mobile(Lab& lab, SplitMix64& rng, ExperimentRecord& rec);
void exp_lipschitz(Lab& lab, SplitMix64& rng, ExperimentRecord& rec);
void exp_graph(Lab& lab, SplitMix64& rng, ExperimentRecord& rec);
void exp_contraction(Lab& lab, SplitMix64& rng, ExperimentRecord& rec);
void exp_dichotomy(Lab& lab, SplitMix64& rng, ExperimentRecord& rec);
void exp_unstable(Lab& lab, SplitMix64& rng, ExperimentRecord& rec);
void exp_restriction(Lab& lab, SplitMix64& rng, ExperimentRecord& rec);
void exp_energy_expansion(Lab& lab, SplitMix64& rng, ExperimentRecord& rec);
void exp_lorentz(Lab& lab, SplitMix64& rng, ExperimentRecord& rec);

// Deterministic random states (band-limited mode sums, optionally localized
// by a Gaussian envelope), normalized in the H norm.
State random_smooth_state(const Grid& g, SplitMix64& rng, double h_norm, int max_mode = 24);
State random_localized_state(const Grid& g, SplitMix64& rng, double h_norm);

// least-squares slope of y against x
double fit_line_slope(const std::vector<double>& x, const std::vector<double>& y);

// Removes the translation-block coordinates and then adjusts the J grad Q
// coefficient so both constraints of the zero-momentum section hold.
State project_to_hperp(const SpectralFrame& frame, State v);

}  // namespace nlkg
