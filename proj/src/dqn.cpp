#include "catune/dqn.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include "catune/binio.hpp"
#include "catune/errors.hpp"

namespace catune {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ValidationError("replay buffer capacity must be >= 1");
    data_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
    if (data_.size() < capacity_) {
        data_.push_back(std::move(t));
    } else {
        data_[cursor_] = std::move(t);
    }
    cursor_ = (cursor_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= data_.size()) throw ContractError("replay buffer index out of range");
    if (data_.size() < capacity_) return data_[i];
    return data_[(cursor_ + i) % capacity_];
}

std::vector<Transition> ReplayBuffer::sample(int batch, Rng& rng) const {
    if (batch < 1) throw ContractError("replay sample batch must be >= 1");
    if (data_.empty()) throw ContractError("replay sample from empty buffer");
    std::vector<Transition> out;
    out.reserve(static_cast<std::size_t>(batch));
    for (int i = 0; i < batch; ++i)
        out.push_back(data_[rng.uniform_int(static_cast<std::uint32_t>(data_.size()))]);
    return out;
}

double EpsilonSchedule::at(long long step) const {
    if (decay_steps <= 0) return end;
    const double frac = std::min(1.0, static_cast<double>(step) / static_cast<double>(decay_steps));
    return start + (end - start) * frac;
}

std::vector<int> DqnConfig::architecture() const {
    std::vector<int> sizes;
    sizes.push_back(kObsDim);
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(kNumActions);
    return sizes;
}

void DqnConfig::validate() const {
    validate_policy_architecture(architecture());
    if (episodes < 0) throw ValidationError("dqn: episodes must be >= 0");
    if (batch_size < 1) throw ValidationError("dqn: batch_size must be >= 1");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("dqn: gamma must lie in (0, 1)");
    if (!(epsilon.start >= 0.0 && epsilon.start <= 1.0) ||
        !(epsilon.end >= 0.0 && epsilon.end <= 1.0))
        throw ValidationError("dqn: epsilon bounds must lie in [0, 1]");
    if (epsilon.decay_steps < 0) throw ValidationError("dqn: epsilon decay must be >= 0");
    if (target_sync_interval < 1) throw ValidationError("dqn: target sync interval must be >= 1");
    if (min_fill < static_cast<std::size_t>(batch_size))
        throw ValidationError("dqn: min_fill must be >= batch_size");
    if (replay_capacity < min_fill)
        throw ValidationError("dqn: replay capacity must be >= min_fill");
    reward_params.validate();
}

TrainEnv make_sampling_env(const EncounterConfig& config, std::uint64_t seed) {
    config.validate();
    TrainEnv env;
    env.chain = build_markov_chain(config.avg_action_len, config.avg_clear_len);
    env.dynamics = config.dynamics;
    env.dt = config.dt;
    env.next = [config, seed](long long episode) {
        Rng rng(derive_seed(seed, 0xE915, static_cast<std::uint64_t>(episode)));
        return sample_encounter(config, rng);
    };
    return env;
}

namespace {

std::vector<double> flatten_obs(const std::vector<Transition>& batch, bool next) {
    std::vector<double> out;
    out.reserve(batch.size() * kObsDim);
    for (const auto& t : batch) {
        const auto& o = next ? t.next_obs : t.obs;
        out.insert(out.end(), o.v.begin(), o.v.end());
    }
    return out;
}

int argmax_row(const double* row, int n) {
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (row[i] > row[best]) best = i;
    return best;
}

std::vector<double> targets_from_q(const std::vector<Transition>& batch,
                                   const std::vector<double>& q_select,
                                   const std::vector<double>& q_eval, double gamma) {
    std::vector<double> y(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch[i].terminal) {
            y[i] = batch[i].reward;
        } else {
            const double* sel = q_select.data() + i * kNumActions;
            const double* ev = q_eval.data() + i * kNumActions;
            y[i] = batch[i].reward + gamma * ev[argmax_row(sel, kNumActions)];
        }
    }
    return y;
}

}  // namespace

std::vector<double> double_q_targets(const std::vector<Transition>& batch,
                                     const MlpWeights& online, const MlpWeights& target,
                                     double gamma) {
    if (batch.empty()) throw ContractError("double_q_targets: empty batch");
    const auto next = flatten_obs(batch, true);
    const int n = static_cast<int>(batch.size());
    const auto q_online = forward_batch_vectorized(online, next, n);
    const auto q_target = forward_batch_vectorized(target, next, n);
    return targets_from_q(batch, q_online, q_target, gamma);
}

std::vector<double> max_q_targets(const std::vector<Transition>& batch,
                                  const MlpWeights& target, double gamma) {
    if (batch.empty()) throw ContractError("max_q_targets: empty batch");
    const auto next = flatten_obs(batch, true);
    const int n = static_cast<int>(batch.size());
    const auto q_target = forward_batch_vectorized(target, next, n);
    std::vector<double> y(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch[i].terminal) {
            y[i] = batch[i].reward;
        } else {
            const double* row = q_target.data() + i * kNumActions;
            y[i] = batch[i].reward + gamma * row[argmax_row(row, kNumActions)];
        }
    }
    return y;
}

LossResult dqn_loss(const std::vector<Transition>& batch, const MlpWeights& online,
                    const MlpWeights& target, double gamma) {
    if (batch.empty()) throw ContractError("dqn_loss: empty batch");
    const auto y = double_q_targets(batch, online, target, gamma);
    const int n = static_cast<int>(batch.size());
    const auto q = forward_batch_vectorized(online, flatten_obs(batch, false), n);

    LossResult res;
    res.output_grad.assign(static_cast<std::size_t>(n) * kNumActions, 0.0);
    for (int i = 0; i < n; ++i) {
        const int a = batch[static_cast<std::size_t>(i)].action.index();
        const double pred = q[static_cast<std::size_t>(i) * kNumActions + a];
        const double err = y[static_cast<std::size_t>(i)] - pred;
        res.loss += err * err / n;
        res.output_grad[static_cast<std::size_t>(i) * kNumActions + a] = -2.0 * err / n;
    }
    return res;
}

int epsilon_greedy(const std::vector<double>& q_values, double epsilon, Rng& rng) {
    if (q_values.empty()) throw ContractError("epsilon_greedy: empty q row");
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw ContractError("epsilon_greedy: epsilon outside [0, 1]");
    if (epsilon > 0.0 && rng.uniform() < epsilon)
        return static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(q_values.size())));
    return argmax_row(q_values.data(), static_cast<int>(q_values.size()));
}

TrainResult train(const DqnConfig& config, const TrainEnv& env) {
    config.validate();
    if (!env.next) throw ContractError("train: encounter source missing");

    const auto arch = config.architecture();
    MlpWeights online = MlpWeights::seeded_init(arch, derive_seed(config.seed, 0x1217));
    TrainResult result;
    result.weights = online;
    if (config.episodes == 0) return result;

    MlpWeights target = online;
    OptimizerState opt = OptimizerState::init(online, config.adam);
    ReplayBuffer buffer(config.replay_capacity);
    Rng explore(derive_seed(config.seed, 0xE817));
    Rng sampler(derive_seed(config.seed, 0x5A3F));

    long long env_steps = 0;
    long long grad_steps = 0;

    for (long long episode = 0; episode < config.episodes; ++episode) {
        const EncounterSpec spec = env.next(episode);
        EncounterSim sim(spec, env.chain, env.dynamics, config.reward_params, env.dt);

        EpisodeLog log;
        log.episode = episode;
        double loss_sum = 0.0;
        int loss_count = 0;

        while (!sim.done()) {
            const Observation obs = sim.observation();
            const double eps = config.epsilon.at(env_steps);
            const auto q = forward_batch_vectorized(
                online, std::vector<double>(obs.v.begin(), obs.v.end()), 1);
            const int a = epsilon_greedy(q, eps, explore);
            const StepOutcome out = sim.step(CombinedAction::from_index(a));

            Transition tr;
            tr.obs = obs;
            tr.action = CombinedAction::from_index(a);
            tr.reward = out.reward;
            tr.next_obs = sim.observation();
            tr.terminal = out.terminal;
            buffer.push(std::move(tr));

            log.total_reward += out.reward;
            log.nmac |= out.events.nmac;
            log.steps += 1;
            ++env_steps;

            if (buffer.size() >= config.min_fill) {
                const auto batch = buffer.sample(config.batch_size, sampler);
                const auto y = double_q_targets(batch, online, target, config.gamma);
                const int n = static_cast<int>(batch.size());
                const auto cache = forward_batch_cached(online, flatten_obs(batch, false), n);
                const auto& q_pred = cache.post.back();

                double loss = 0.0;
                std::vector<double> out_grad(static_cast<std::size_t>(n) * kNumActions, 0.0);
                for (int i = 0; i < n; ++i) {
                    const int ai = batch[static_cast<std::size_t>(i)].action.index();
                    const double err = y[static_cast<std::size_t>(i)] -
                                       q_pred[static_cast<std::size_t>(i) * kNumActions + ai];
                    loss += err * err / n;
                    out_grad[static_cast<std::size_t>(i) * kNumActions + ai] = -2.0 * err / n;
                }
                if (!std::isfinite(loss)) {
                    std::ostringstream msg;
                    msg << "dqn training diverged: non-finite loss at episode " << episode
                        << ", env step " << env_steps << ", grad step " << grad_steps;
                    throw NumericError(msg.str());
                }
                const auto grads = backward(online, cache, out_grad);
                auto stepped = optimizer_step(online, grads, opt);
                online = std::move(stepped.first);
                opt = std::move(stepped.second);

                ++grad_steps;
                if (grad_steps % config.target_sync_interval == 0) target = online;

                loss_sum += loss;
                ++loss_count;
            }
        }
        log.mean_loss = loss_count > 0 ? loss_sum / loss_count : 0.0;
        log.epsilon = config.epsilon.at(env_steps);
        result.log.push_back(log);
    }

    result.weights = std::move(online);
    result.env_steps = env_steps;
    result.grad_steps = grad_steps;
    return result;
}

std::array<TrainResult, 3> train_triplicate(const DqnConfig& config,
                                            const std::array<std::uint64_t, 3>& seeds,
                                            const TrainEnv& env) {
    if (seeds[0] == seeds[1] || seeds[0] == seeds[2] || seeds[1] == seeds[2])
        throw ValidationError("train_triplicate requires three distinct seeds");

    std::array<TrainResult, 3> results;
    std::array<std::exception_ptr, 3> errors{};
    std::vector<std::thread> threads;
    for (int i = 0; i < 3; ++i) {
        threads.emplace_back([&, i]() {
            try {
                DqnConfig c = config;
                c.seed = seeds[static_cast<std::size_t>(i)];
                results[static_cast<std::size_t>(i)] = train(c, env);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

void write_training_log_csv(const std::vector<EpisodeLog>& log, const std::string& path) {
    std::ostringstream out;
    out << "episode,steps,total_reward,mean_loss,epsilon,nmac\n";
    out.precision(17);
    for (const auto& e : log) {
        out << e.episode << ',' << e.steps << ',' << e.total_reward << ',' << e.mean_loss
            << ',' << e.epsilon << ',' << (e.nmac ? 1 : 0) << '\n';
    }
    write_file_atomic(path, out.str());
}

}  // namespace catune
