#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "catune/dqn.hpp"
#include "catune/evaluator.hpp"

namespace catune {

// One point in the reward-parameter search box [-1, 0]^3. The NMAC cost is
// fixed at -1 and excluded from the search.
struct ParamPoint {
    double alert = -0.01;
    double reversal = -0.05;
    double cease_alert = -0.05;

    void validate() const;
    RewardParams to_reward_params() const;
    std::array<double, 3> as_array() const { return {alert, reversal, cease_alert}; }
    static ParamPoint from_array(const std::array<double, 3>& a) {
        return {a[0], a[1], a[2]};
    }
};

// n-point stratified design in the unit cube: per dimension exactly one
// sample in each of the n equal strata, independent permutations.
std::vector<std::vector<double>> latin_hypercube(int n, int dims, Rng& rng);

ParamPoint unit_to_box(const std::vector<double>& unit);

struct GpConfig {
    double length_scale = 0.3;  // per normalized dimension
    double signal_var = 1.0;    // after objective standardization
    double noise_var = 1e-2;

    void validate() const;
};

// Exact GP regression with a squared-exponential kernel and fixed
// hyperparameters; objectives are z-scored internally per fit.
class GpSurrogate {
public:
    struct Prediction {
        double mean = 0.0;
        double var = 0.0;
    };

    Prediction predict(const ParamPoint& p) const;
    double best_objective() const { return best_; }
    int size() const { return static_cast<int>(x_.size()); }
    int merged_duplicates() const { return merged_; }

    friend GpSurrogate gp_fit(const std::vector<ParamPoint>& points,
                              const std::vector<double>& objectives,
                              const std::vector<double>& noise_scales, const GpConfig& config);

private:
    GpConfig cfg_;
    std::vector<std::array<double, 3>> x_;  // normalized inputs
    std::vector<double> alpha_;
    std::vector<double> chol_;  // lower-triangular factor, row-major
    double y_mean_ = 0.0;
    double y_std_ = 1.0;
    double best_ = 0.0;
    int merged_ = 0;

    double kernel(const std::array<double, 3>& a, const std::array<double, 3>& b) const;
};

// noise_scales multiply the base noise variance per point (>= 1 for
// unstable points); pass {} for uniform noise.
GpSurrogate gp_fit(const std::vector<ParamPoint>& points,
                   const std::vector<double>& objectives,
                   const std::vector<double>& noise_scales, const GpConfig& config);

// Closed-form EI under the minimization convention (lower objective wins).
double expected_improvement(double mean, double std, double best);

struct SelectResult {
    ParamPoint point;
    double ei = 0.0;
    // true when EI vanished everywhere and the max-variance candidate was
    // returned instead
    bool exhausted = false;
};

// Maximizes EI over the box: LHS candidate sweep plus deterministic pattern
// refinement from the best starts.
SelectResult select_next(const GpSurrogate& surrogate, Rng& rng, int candidates = 1000);

// n interior points of the segment [a, b] split into n+1 equal intervals.
std::vector<ParamPoint> linear_sweep(const ParamPoint& a, const ParamPoint& b, int n);

// LHS design scaled into [center +- radius] intersected with the box.
std::vector<ParamPoint> local_lhs(const ParamPoint& center, const std::array<double, 3>& radius,
                                  int n, Rng& rng);

enum class Provenance : std::uint8_t { LhsInit = 0, Ei = 1, LinearSweep = 2, LocalLhs = 3, Manual = 4 };
enum class IterationStatus : std::uint8_t { Ok = 0, Failed = 1 };

std::string to_string(Provenance p);
std::string to_string(IterationStatus s);

struct TuningIteration {
    int id = 0;
    ParamPoint point;
    Provenance provenance = Provenance::Manual;
    IterationStatus status = IterationStatus::Ok;
    std::string message;
    std::array<EvalMetrics, 3> models{};
    std::array<double, 3> model_objectives{};
    int best_model = 0;
    EvalMetrics best;
    double alert_var = 0.0;
    bool stable = true;
    double objective = 0.0;
    std::array<std::uint64_t, 3> seeds{};
};

struct TuneConfig {
    int init_points = 5;
    int budget = 15;
    std::uint64_t master_seed = 0;
    MetricTargets targets;
    ObjectiveWeights weights;
    GpConfig gp;
    double stability_threshold = 0.01;
    int candidate_count = 1000;
    std::string ledger_path;  // empty keeps the ledger in memory only

    void validate() const;
};

struct TuningLedger {
    TuneConfig config;
    std::vector<TuningIteration> iterations;

    const TuningIteration* best_stable() const;  // lowest V among stable OK entries
    const TuningIteration* best_any() const;
};

// Evaluates one parameter point: three trainings, three serial evaluations.
// Returning failed == true records a FAILED iteration and the loop goes on.
struct PointOutcome {
    bool failed = false;
    std::string message;
    std::array<EvalMetrics, 3> models{};
};
using PointEvaluator =
    std::function<PointOutcome(const ParamPoint& point, int iteration,
                               const std::array<std::uint64_t, 3>& seeds)>;

// The production evaluator: triplicate DQN training on fresh encounters,
// then serial evaluation of the three models on the frozen stratified set.
PointEvaluator make_training_evaluator(const DqnConfig& base_config, const TrainEnv& env,
                                       const EncounterSet& eval_set,
                                       const LookaheadConfig& lookahead = {},
                                       int eval_workers = 1);

// LHS seeding and EI-driven search over the box, crash-resumable through the
// ledger file. Runs synchronously; ledger order is selection order.
TuningLedger tune(const TuneConfig& config, const PointEvaluator& evaluate_point);

// Evaluates explicit points (sweeps, local designs, manual picks), appending
// to an existing ledger when one is present at config.ledger_path.
TuningLedger run_points(const TuneConfig& config, const std::vector<ParamPoint>& points,
                        Provenance provenance, const PointEvaluator& evaluate_point);

// Recomputes V (and contributions) under new weights; metrics, best-model
// choices and iteration order stay untouched.
TuningLedger rescore_ledger(const TuningLedger& ledger, const ObjectiveWeights& new_weights);

// Ids of OK iterations ordered by ascending objective.
std::vector<int> rank_by_objective(const TuningLedger& ledger);

void save_ledger(const TuningLedger& ledger, const std::string& path);
TuningLedger load_ledger(const std::string& path);

}  // namespace catune
