#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "catune/mlp.hpp"

namespace catune {

// Bounded FIFO transition store; uniform sampling with replacement.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    // Logical index 0 is the oldest retained transition.
    const Transition& at(std::size_t i) const;
    std::vector<Transition> sample(int batch, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t cursor_ = 0;
    std::vector<Transition> data_;
};

struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.05;
    long long decay_steps = 50000;

    double at(long long step) const;
};

struct DqnConfig {
    std::vector<int> hidden = {64, 64, 64};
    long long episodes = 3000;
    int batch_size = 64;
    double gamma = 0.95;
    EpsilonSchedule epsilon;
    long long target_sync_interval = 1000;
    std::size_t replay_capacity = 100000;
    std::size_t min_fill = 5000;
    std::uint64_t seed = 0;
    RewardParams reward_params;
    AdamConfig adam;

    std::vector<int> architecture() const;
    void validate() const;
};

// Produces the spec to fly for a given episode. Must be a pure function of
// the episode index so triplicate runs stay independent and reproducible.
using EncounterSource = std::function<EncounterSpec(long long episode)>;

struct TrainEnv {
    IntruderChain chain;
    DynamicsConfig dynamics;
    double dt = 1.0;
    EncounterSource next;
};

// Fresh encounters sampled per episode; training data never reuses a frozen
// evaluation set.
TrainEnv make_sampling_env(const EncounterConfig& config, std::uint64_t seed);

// Double-Q targets: r + gamma * Q_target(s', argmax_a Q_online(s', a)), with
// terminal transitions reduced to r alone.
std::vector<double> double_q_targets(const std::vector<Transition>& batch,
                                     const MlpWeights& online, const MlpWeights& target,
                                     double gamma);

// Single-network max-form targets (the uncorrected variant, kept for its
// overestimation comparison in tests).
std::vector<double> max_q_targets(const std::vector<Transition>& batch,
                                  const MlpWeights& target, double gamma);

struct LossResult {
    double loss = 0.0;
    std::vector<double> output_grad;  // row-major batch x 9, zero off the taken action
};

// Mean squared TD error over the batch; targets are constants, so gradients
// flow only through Q(s, a).
LossResult dqn_loss(const std::vector<Transition>& batch, const MlpWeights& online,
                    const MlpWeights& target, double gamma);

int epsilon_greedy(const std::vector<double>& q_values, double epsilon, Rng& rng);

struct EpisodeLog {
    long long episode = 0;
    double total_reward = 0.0;
    double mean_loss = 0.0;
    double epsilon = 0.0;
    int steps = 0;
    bool nmac = false;
};

struct TrainResult {
    MlpWeights weights;
    std::vector<EpisodeLog> log;
    long long env_steps = 0;
    long long grad_steps = 0;
};

TrainResult train(const DqnConfig& config, const TrainEnv& env);

// Three independent runs differing only in seed, trained concurrently.
std::array<TrainResult, 3> train_triplicate(const DqnConfig& config,
                                            const std::array<std::uint64_t, 3>& seeds,
                                            const TrainEnv& env);

void write_training_log_csv(const std::vector<EpisodeLog>& log, const std::string& path);

}  // namespace catune
