#pragma once

#include <cstdint>
#include <string>

#include "catune/dp.hpp"
#include "catune/dqn.hpp"
#include "catune/policy_viz.hpp"
#include "catune/tuner.hpp"

namespace catune {

// Everything a run needs, assembled from one JSON document. Unset keys take
// the documented defaults; unknown keys are rejected with their path.
struct RunConfig {
    std::uint64_t master_seed = 0;
    int workers = 1;
    EncounterConfig encounter;           // includes dynamics
    LookaheadConfig lookahead;           // disabled by default (as during tuning)
    RewardParams reward;                 // untuned baseline costs
    DqnConfig dqn;                       // reward/seed filled from this config at use
    struct DpSection {
        GridMode mode = GridMode::Horizontal;
        std::array<int, 3> bins = {15, 15, 12};
        double tol = 1e-9;
        int max_sweeps = 100000;
        int samples_per_cell = 50;
        double nominal_speed = 250.0;
        double nominal_alt = 5000.0;
        double gamma = 0.95;
    } dp;
    struct EvaluatorSection {
        MetricTargets targets;
        ObjectiveWeights weights;
        double stability_threshold = 0.01;
    } evaluator;
    struct TunerSection {
        int init_points = 5;
        int budget = 15;
        GpConfig gp;
        int candidate_count = 1000;
    } tuner;
    PlotSpec plot;

    GridSpec dp_grid() const;
    DqnConfig dqn_for_seed(std::uint64_t seed) const;
    TuneConfig tune_config(const std::string& ledger_path) const;
    void validate() const;
};

// Parse from JSON text with full validation. The empty object "{}" yields
// the complete default configuration.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

// Canonical full-document form; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);

inline constexpr std::uint32_t kConfigFormatVersion = 1;

}  // namespace catune
