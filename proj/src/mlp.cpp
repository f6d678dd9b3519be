#include "catune/mlp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <memory>

#include "catune/binio.hpp"
#include "catune/errors.hpp"
#include "catune/rng.hpp"

namespace catune {

namespace {

constexpr char kWeightsMagic[9] = "CATMLPW1";
constexpr std::uint32_t kWeightsVersion = 1;

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;
using ConstMapVec = Eigen::Map<const Eigen::VectorXd>;

void check_sizes(const std::vector<int>& sizes) {
    if (sizes.size() < 2) throw ContractError("mlp needs at least input and output layers");
    for (int s : sizes)
        if (s < 1) throw ContractError("mlp layer sizes must be positive");
}

void check_input(const MlpWeights& net, const std::vector<double>& input) {
    if (static_cast<int>(input.size()) != net.input_size())
        throw ContractError("mlp input width " + std::to_string(input.size()) +
                            " does not match architecture input " +
                            std::to_string(net.input_size()));
    for (double x : input)
        if (!std::isfinite(x)) throw NumericError("mlp input contains non-finite values");
}

}  // namespace

void validate_policy_architecture(const std::vector<int>& layer_sizes) {
    check_sizes(layer_sizes);
    if (layer_sizes.front() != kObsDim)
        throw ValidationError("policy network input layer must be 25 wide");
    if (layer_sizes.back() != kNumActions)
        throw ValidationError("policy network output layer must be 9 wide");
    if (layer_sizes.size() < 3)
        throw ValidationError("policy network needs at least one hidden layer");
}

MlpWeights MlpWeights::zeros(const std::vector<int>& sizes) {
    check_sizes(sizes);
    MlpWeights net;
    net.sizes = sizes;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        LayerWeights layer;
        layer.in = sizes[l];
        layer.out = sizes[l + 1];
        layer.w.assign(static_cast<std::size_t>(layer.in) * layer.out, 0.0);
        layer.b.assign(static_cast<std::size_t>(layer.out), 0.0);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

MlpWeights MlpWeights::seeded_init(const std::vector<int>& sizes, std::uint64_t seed) {
    MlpWeights net = zeros(sizes);
    Rng rng(seed);
    for (auto& layer : net.layers) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
        for (double& w : layer.w) w = rng.uniform(-bound, bound);
    }
    return net;
}

std::size_t MlpWeights::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.w.size() + l.b.size();
    return n;
}

bool MlpWeights::finite() const {
    for (const auto& l : layers) {
        for (double x : l.w)
            if (!std::isfinite(x)) return false;
        for (double x : l.b)
            if (!std::isfinite(x)) return false;
    }
    return true;
}

bool Gradients::finite() const {
    for (const auto& l : layers) {
        for (double x : l.w)
            if (!std::isfinite(x)) return false;
        for (double x : l.b)
            if (!std::isfinite(x)) return false;
    }
    return true;
}

std::vector<double> forward(const MlpWeights& net, const std::vector<double>& input) {
    check_input(net, input);
    std::vector<double> act = input;
    std::vector<double> next;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        next.assign(static_cast<std::size_t>(layer.out), 0.0);
        for (int o = 0; o < layer.out; ++o) {
            double acc = layer.b[static_cast<std::size_t>(o)];
            const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) acc += row[i] * act[static_cast<std::size_t>(i)];
            next[static_cast<std::size_t>(o)] = acc;
        }
        if (l + 1 < net.layers.size())
            for (double& z : next) z = z > 0.0 ? z : 0.0;
        act.swap(next);
    }
    return act;
}

std::vector<double> forward(const MlpWeights& net, const Observation& obs) {
    return forward(net, std::vector<double>(obs.v.begin(), obs.v.end()));
}

std::vector<double> forward_batch_vectorized(const MlpWeights& net,
                                             const std::vector<double>& inputs, int batch) {
    if (batch < 1) throw ContractError("forward_batch_vectorized: empty batch");
    if (inputs.size() != static_cast<std::size_t>(batch) * net.input_size())
        throw ContractError("forward_batch_vectorized: input buffer shape mismatch");

    RowMat act = ConstMapMat(inputs.data(), batch, net.input_size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        ConstMapMat w(layer.w.data(), layer.out, layer.in);
        ConstMapVec b(layer.b.data(), layer.out);
        RowMat z = act * w.transpose();
        z.rowwise() += b.transpose();
        if (l + 1 < net.layers.size()) z = z.cwiseMax(0.0);
        act = std::move(z);
    }
    return std::vector<double>(act.data(), act.data() + act.size());
}

ForwardCache forward_batch_cached(const MlpWeights& net, const std::vector<double>& inputs,
                                  int batch) {
    if (batch < 1) throw ContractError("forward_batch_cached: empty batch");
    if (inputs.size() != static_cast<std::size_t>(batch) * net.input_size())
        throw ContractError("forward_batch_cached: input buffer shape mismatch");

    ForwardCache cache;
    cache.batch = batch;
    cache.input = inputs;
    cache.pre.resize(net.layers.size());
    cache.post.resize(net.layers.size());

    RowMat act = ConstMapMat(inputs.data(), batch, net.input_size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        ConstMapMat w(layer.w.data(), layer.out, layer.in);
        ConstMapVec b(layer.b.data(), layer.out);
        RowMat z = act * w.transpose();
        z.rowwise() += b.transpose();
        cache.pre[l].assign(z.data(), z.data() + z.size());
        if (l + 1 < net.layers.size()) z = z.cwiseMax(0.0);
        cache.post[l].assign(z.data(), z.data() + z.size());
        act = std::move(z);
    }
    return cache;
}

Gradients backward(const MlpWeights& net, const ForwardCache& cache,
                   const std::vector<double>& output_grad) {
    const int batch = cache.batch;
    const int n_layers = static_cast<int>(net.layers.size());
    if (output_grad.size() != static_cast<std::size_t>(batch) * net.output_size())
        throw ContractError("backward: output gradient shape mismatch");
    if (static_cast<int>(cache.pre.size()) != n_layers)
        throw ContractError("backward: cache does not match architecture");

    Gradients grads;
    grads.layers.resize(static_cast<std::size_t>(n_layers));

    RowMat delta = ConstMapMat(output_grad.data(), batch, net.output_size());
    for (int l = n_layers - 1; l >= 0; --l) {
        const auto& layer = net.layers[static_cast<std::size_t>(l)];
        auto& g = grads.layers[static_cast<std::size_t>(l)];
        g.in = layer.in;
        g.out = layer.out;
        g.w.resize(layer.w.size());
        g.b.resize(layer.b.size());

        ConstMapMat prev_act =
            l == 0 ? ConstMapMat(cache.input.data(), batch, layer.in)
                   : ConstMapMat(cache.post[static_cast<std::size_t>(l - 1)].data(), batch,
                                 layer.in);

        MapMat(g.w.data(), layer.out, layer.in) = delta.transpose() * prev_act;
        Eigen::Map<Eigen::VectorXd>(g.b.data(), layer.out) = delta.colwise().sum();

        if (l > 0) {
            ConstMapMat w(layer.w.data(), layer.out, layer.in);
            RowMat next_delta = delta * w;
            ConstMapMat pre(cache.pre[static_cast<std::size_t>(l - 1)].data(), batch, layer.in);
            next_delta = (pre.array() > 0.0).select(next_delta, 0.0);
            delta = std::move(next_delta);
        }
    }
    return grads;
}

OptimizerState OptimizerState::init(const MlpWeights& net, const AdamConfig& cfg) {
    OptimizerState st;
    st.cfg = cfg;
    for (const auto& layer : net.layers) {
        LayerWeights zero;
        zero.in = layer.in;
        zero.out = layer.out;
        zero.w.assign(layer.w.size(), 0.0);
        zero.b.assign(layer.b.size(), 0.0);
        st.m.push_back(zero);
        st.v.push_back(std::move(zero));
    }
    return st;
}

std::pair<MlpWeights, OptimizerState> optimizer_step(const MlpWeights& net,
                                                     const Gradients& grads,
                                                     const OptimizerState& state) {
    if (grads.layers.size() != net.layers.size())
        throw ContractError("optimizer_step: gradient shape mismatch");
    if (!grads.finite())
        throw NumericError("optimizer_step: refusing update, non-finite gradient");

    MlpWeights out = net;
    OptimizerState st = state;
    st.step_count += 1;
    const auto& cfg = st.cfg;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.step_count));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.step_count));

    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto update = [&](std::vector<double>& w, const std::vector<double>& g,
                          std::vector<double>& m, std::vector<double>& v) {
            if (g.size() != w.size())
                throw ContractError("optimizer_step: gradient shape mismatch");
            for (std::size_t i = 0; i < w.size(); ++i) {
                m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
                v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
                const double mhat = m[i] / bc1;
                const double vhat = v[i] / bc2;
                w[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
            }
        };
        update(out.layers[l].w, grads.layers[l].w, st.m[l].w, st.v[l].w);
        update(out.layers[l].b, grads.layers[l].b, st.m[l].b, st.v[l].b);
    }
    return {std::move(out), std::move(st)};
}

void save_weights(const MlpWeights& net, const std::string& path) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(net.sizes.size()));
    for (int s : net.sizes) w.u32(static_cast<std::uint32_t>(s));
    for (const auto& layer : net.layers) {
        for (double x : layer.w) w.f64(x);
        for (double x : layer.b) w.f64(x);
    }
    write_container(path, kWeightsMagic, kWeightsVersion, w);
}

MlpWeights load_weights(const std::string& path) {
    const auto payload = read_container(path, kWeightsMagic, kWeightsVersion);
    ByteReader r(payload);
    const std::uint32_t n_sizes = r.u32();
    if (n_sizes < 2 || n_sizes > 64)
        throw ParseError("weight file has implausible layer count in " + path);
    std::vector<int> sizes(n_sizes);
    for (auto& s : sizes) s = static_cast<int>(r.u32());
    MlpWeights net = MlpWeights::zeros(sizes);
    for (auto& layer : net.layers) {
        for (double& x : layer.w) x = r.f64();
        for (double& x : layer.b) x = r.f64();
    }
    if (r.remaining() != 0) throw ParseError("trailing bytes in weight file " + path);
    return net;
}

MlpWeights load_weights(const std::string& path, const std::vector<int>& expected_sizes) {
    MlpWeights net = load_weights(path);
    if (net.sizes != expected_sizes) {
        std::string got, want;
        for (int s : net.sizes) got += (got.empty() ? "" : "-") + std::to_string(s);
        for (int s : expected_sizes) want += (want.empty() ? "" : "-") + std::to_string(s);
        throw ArchitectureMismatchError("weight file " + path + " holds architecture " + got +
                                        " but " + want + " was expected");
    }
    return net;
}

PolicyFn mlp_policy(MlpWeights net, bool vectorized) {
    auto shared = std::make_shared<const MlpWeights>(std::move(net));
    if (shared->input_size() != kObsDim || shared->output_size() != kNumActions)
        throw ValidationError("mlp_policy requires a 25-input 9-output network");
    return [shared, vectorized](const Observation& obs) {
        std::vector<double> q;
        if (vectorized) {
            q = forward_batch_vectorized(
                *shared, std::vector<double>(obs.v.begin(), obs.v.end()), 1);
        } else {
            q = forward(*shared, obs);
        }
        int best = 0;
        for (int a = 1; a < kNumActions; ++a)
            if (q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(best)]) best = a;
        return CombinedAction::from_index(best);
    };
}

}  // namespace catune
