#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "catune/simulator.hpp"

namespace catune {

// The policy network used for Q-value inference: ReLU hidden layers, linear
// output. Policy nets are 25 -> hidden... -> 9; the math below works for any
// layer stack so small nets can drive the numeric tests.
void validate_policy_architecture(const std::vector<int>& layer_sizes);

struct LayerWeights {
    int out = 0;
    int in = 0;
    std::vector<double> w;  // row-major out x in
    std::vector<double> b;  // out
};

struct MlpWeights {
    std::vector<int> sizes;
    std::vector<LayerWeights> layers;

    static MlpWeights zeros(const std::vector<int>& sizes);
    // Fan-in-scaled uniform weights, zero biases, fully seeded.
    static MlpWeights seeded_init(const std::vector<int>& sizes, std::uint64_t seed);

    int input_size() const { return sizes.front(); }
    int output_size() const { return sizes.back(); }
    std::size_t parameter_count() const;
    bool finite() const;
};

// Per-sample reference path: straightforward loops, no external math.
std::vector<double> forward(const MlpWeights& net, const std::vector<double>& input);
std::vector<double> forward(const MlpWeights& net, const Observation& obs);

// Batched SIMD path. Inputs/outputs row-major [batch][dim]; matches the
// per-sample path within accumulation-order noise (< 1e-9).
std::vector<double> forward_batch_vectorized(const MlpWeights& net,
                                             const std::vector<double>& inputs, int batch);

// Forward pass that keeps pre/post activations for backprop.
struct ForwardCache {
    int batch = 0;
    std::vector<double> input;                 // row-major batch x in
    std::vector<std::vector<double>> pre;      // per layer, batch x out
    std::vector<std::vector<double>> post;     // per layer, batch x out
};
ForwardCache forward_batch_cached(const MlpWeights& net, const std::vector<double>& inputs,
                                  int batch);

struct Gradients {
    std::vector<LayerWeights> layers;  // same shapes as the weights
    bool finite() const;
};

// Exact reverse-mode gradients given d(loss)/d(outputs), row-major batch x 9.
Gradients backward(const MlpWeights& net, const ForwardCache& cache,
                   const std::vector<double>& output_grad);

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct OptimizerState {
    AdamConfig cfg;
    long long step_count = 0;
    std::vector<LayerWeights> m;
    std::vector<LayerWeights> v;

    static OptimizerState init(const MlpWeights& net, const AdamConfig& cfg = {});
};

// Adaptive-moment update with bias correction. Pure: returns fresh weights
// and state. Non-finite gradients refuse the update.
std::pair<MlpWeights, OptimizerState> optimizer_step(const MlpWeights& net,
                                                     const Gradients& grads,
                                                     const OptimizerState& state);

void save_weights(const MlpWeights& net, const std::string& path);
MlpWeights load_weights(const std::string& path);
MlpWeights load_weights(const std::string& path, const std::vector<int>& expected_sizes);

// Policy adapter over a weight set; `vectorized` selects the SIMD forward.
PolicyFn mlp_policy(MlpWeights net, bool vectorized = true);

}  // namespace catune
