#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "catune/simulator.hpp"

namespace catune {

// Per-encounter incidence rates over an evaluation set. An encounter counts
// once per metric no matter how many in-encounter events fired.
struct EvalMetrics {
    double p_nmac = 0.0;
    double p_alert = 0.0;
    double p_reversal = 0.0;
    long long encounter_count = 0;
    long long nmac_count = 0;
    long long alert_count = 0;
    long long reversal_count = 0;
};

struct MetricTargets {
    double p_nmac = 9.8268e-4;
    double p_alert = 0.1946;
    double p_reversal = 0.00290;

    void validate() const;
};

struct ObjectiveWeights {
    double nmac = 0.05;
    double alert = 0.80;
    double reversal = 0.15;

    void validate() const;
};

struct MetricScore {
    double ratio = 0.0;  // R = M / M_target
    double score = 0.0;  // S = R^2 / 2 - 1/2
};

// Quadratic scoring: zero at the target, superlinear penalty past it, at
// most 1/2 reward under it.
MetricScore metric_score(double m, double m_target);

struct ObjectiveTerm {
    double metric = 0.0;
    double target = 0.0;
    double weight = 0.0;
    double ratio = 0.0;
    double score = 0.0;
    double contribution = 0.0;  // weight * score
};

struct ObjectiveReport {
    ObjectiveTerm nmac;
    ObjectiveTerm alert;
    ObjectiveTerm reversal;
    double value = 0.0;  // V, lower is better
};

ObjectiveReport objective(const EvalMetrics& metrics, const MetricTargets& targets,
                          const ObjectiveWeights& weights);

// Batch evaluation, order- and shard-independent: each encounter derives its
// outcome in isolation and only integer counts are reduced.
EvalMetrics evaluate(const PolicyFn& policy, const EncounterSet& set,
                     const RewardParams& params, const LookaheadConfig& lookahead = {},
                     int workers = 1);

// Per-encounter dynamics time from bulk and single-encounter wall times.
double timing_per_encounter(double t_n, double t_1, long long n);

struct TimingMeasurement {
    std::vector<double> rep_seconds;
    double average = 0.0;
};

// Timing protocol: one discarded warm-up evaluation, then the averaged
// repetitions.
TimingMeasurement measure_repetitions(const std::function<double()>& timed_run,
                                      int warmups = 1, int reps = 3);

double average_of_reps(const std::vector<double>& reps);

// Population variance (divide by 3) of the triplicate alert rates.
double alert_variance(const std::array<double, 3>& alert_rates);

void write_metrics_json(const EvalMetrics& metrics, const ObjectiveReport& report,
                        const std::string& path);

}  // namespace catune
