#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "catune/binio.hpp"
#include "catune/cli.hpp"
#include "catune/config.hpp"
#include "catune/policy_viz.hpp"
#include "catune/tuner.hpp"
#include "catune/version.hpp"

namespace py = pybind11;
using namespace catune;

namespace {

std::vector<std::vector<double>> chain_rows(const IntruderChain& chain) {
    std::vector<std::vector<double>> rows;
    for (const auto& row : chain.transition)
        rows.emplace_back(row.begin(), row.end());
    return rows;
}

py::dict metrics_dict(const EvalMetrics& m) {
    py::dict d;
    d["p_nmac"] = m.p_nmac;
    d["p_alert"] = m.p_alert;
    d["p_reversal"] = m.p_reversal;
    d["encounter_count"] = m.encounter_count;
    d["nmac_count"] = m.nmac_count;
    d["alert_count"] = m.alert_count;
    d["reversal_count"] = m.reversal_count;
    return d;
}

RewardParams costs_from_tuple(const std::array<double, 3>& costs) {
    RewardParams p;
    p.alert_cost = costs[0];
    p.reversal_cost = costs[1];
    p.cease_alert_cost = costs[2];
    p.validate();
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "collision-avoidance policy training, evaluation and reward-model tuning";
    m.attr("__version__") = kCatuneVersion;

    py::register_exception<Error>(m, "CatuneError");

    py::class_<AircraftState>(m, "AircraftState")
        .def(py::init<>())
        .def_readwrite("x", &AircraftState::x)
        .def_readwrite("y", &AircraftState::y)
        .def_readwrite("alt", &AircraftState::alt)
        .def_readwrite("heading", &AircraftState::heading)
        .def_readwrite("ground_speed", &AircraftState::ground_speed)
        .def_readwrite("vertical_rate", &AircraftState::vertical_rate)
        .def_readwrite("turn_rate", &AircraftState::turn_rate)
        .def("__repr__", [](const AircraftState& s) {
            return "AircraftState(x=" + std::to_string(s.x) + ", y=" + std::to_string(s.y) +
                   ", alt=" + std::to_string(s.alt) + ")";
        });

    // kinematics and events
    m.def(
        "propagate",
        [](const AircraftState& s, int action, double dt) {
            return propagate(s, CombinedAction::from_index(action), dt);
        },
        py::arg("state"), py::arg("action"), py::arg("dt") = 1.0,
        "advance one aircraft by dt seconds under a combined action index");
    m.def(
        "detect_nmac",
        [](const AircraftState& own, const AircraftState& intr) {
            return detect_nmac(own, intr);
        },
        py::arg("ownship"), py::arg("intruder"));
    m.def(
        "classify_events",
        [](int prev, int curr, bool nmac) {
            const auto e = classify_events(CombinedAction::from_index(prev),
                                           CombinedAction::from_index(curr), nmac);
            py::dict d;
            d["nmac"] = e.nmac;
            d["alert"] = e.alert;
            d["reversal_v"] = e.reversal_v;
            d["reversal_h"] = e.reversal_h;
            d["cease_alert"] = e.cease_alert;
            return d;
        },
        py::arg("prev_action"), py::arg("curr_action"), py::arg("nmac"));
    m.def(
        "step_reward",
        [](int prev, int curr, bool nmac, const std::array<double, 3>& costs) {
            const auto e = classify_events(CombinedAction::from_index(prev),
                                           CombinedAction::from_index(curr), nmac);
            return step_reward(e, costs_from_tuple(costs));
        },
        py::arg("prev_action"), py::arg("curr_action"), py::arg("nmac"), py::arg("costs"),
        "reward of one step under (alert, reversal, cease_alert) costs");
    m.def(
        "observe",
        [](const AircraftState& own, const AircraftState& intr, int prev_action) {
            const auto o = observe(own, intr, CombinedAction::from_index(prev_action));
            return std::vector<double>(o.v.begin(), o.v.end());
        },
        py::arg("ownship"), py::arg("intruder"), py::arg("prev_action") = 4);

    // encounters
    m.def(
        "build_markov_chain",
        [](double avg_action_len, double avg_clear_len) {
            return chain_rows(build_markov_chain(avg_action_len, avg_clear_len));
        },
        py::arg("avg_action_len"), py::arg("avg_clear_len"));
    m.def(
        "sample_encounter",
        [](std::uint64_t seed) {
            EncounterConfig cfg;
            Rng rng(seed);
            const auto spec = sample_encounter(cfg, rng);
            py::dict d;
            d["intruder_seed"] = spec.intruder_seed;
            d["nominal_nmac"] = spec.nominal_nmac;
            d["duration"] = spec.duration;
            d["ownship"] = spec.ownship_init;
            d["intruder"] = spec.intruder_init;
            return d;
        },
        py::arg("seed"), "draw one encounter under the default configuration");
    m.def(
        "generate_encounter_set",
        [](int n, double nmac_fraction, std::uint64_t seed, const std::string& path) {
            EncounterConfig cfg;
            const auto set = generate_stratified_set(n, nmac_fraction, cfg, seed);
            write_set(set, path);
            return set.nominal_count();
        },
        py::arg("n"), py::arg("nmac_fraction"), py::arg("seed"), py::arg("path"),
        "write a stratified set file; returns the nominal-NMAC count");

    // scoring pipeline
    m.def(
        "metric_score",
        [](double metric, double target) {
            const auto s = metric_score(metric, target);
            return py::make_tuple(s.ratio, s.score);
        },
        py::arg("metric"), py::arg("target"));
    m.def(
        "objective_value",
        [](const std::array<double, 3>& metrics, const std::array<double, 3>& targets,
           const std::array<double, 3>& weights) {
            EvalMetrics m2;
            m2.p_nmac = metrics[0];
            m2.p_alert = metrics[1];
            m2.p_reversal = metrics[2];
            m2.encounter_count = 1;
            const MetricTargets t{targets[0], targets[1], targets[2]};
            const ObjectiveWeights w{weights[0], weights[1], weights[2]};
            return objective(m2, t, w).value;
        },
        py::arg("metrics"), py::arg("targets") = std::array<double, 3>{9.8268e-4, 0.1946, 0.00290},
        py::arg("weights") = std::array<double, 3>{0.05, 0.80, 0.15});
    m.def("alert_variance",
          [](const std::array<double, 3>& rates) { return alert_variance(rates); },
          py::arg("alert_rates"));
    m.def("timing_per_encounter", &timing_per_encounter, py::arg("t_n"), py::arg("t_1"),
          py::arg("n"));

    // surrogate primitives
    m.def(
        "latin_hypercube",
        [](int n, int dims, std::uint64_t seed) {
            Rng rng(seed);
            return latin_hypercube(n, dims, rng);
        },
        py::arg("n"), py::arg("dims"), py::arg("seed"));
    m.def("expected_improvement", &expected_improvement, py::arg("mean"), py::arg("std"),
          py::arg("best"));
    m.def(
        "linear_sweep",
        [](const std::array<double, 3>& a, const std::array<double, 3>& b, int n) {
            const auto pts = linear_sweep(ParamPoint::from_array(a), ParamPoint::from_array(b), n);
            std::vector<std::array<double, 3>> out;
            for (const auto& p : pts) out.push_back(p.as_array());
            return out;
        },
        py::arg("a"), py::arg("b"), py::arg("n"));
    m.def(
        "local_lhs",
        [](const std::array<double, 3>& center, double radius, int n, std::uint64_t seed) {
            Rng rng(seed);
            const auto pts =
                local_lhs(ParamPoint::from_array(center), {radius, radius, radius}, n, rng);
            std::vector<std::array<double, 3>> out;
            for (const auto& p : pts) out.push_back(p.as_array());
            return out;
        },
        py::arg("center"), py::arg("radius"), py::arg("n"), py::arg("seed"));

    // dynamic programming on caller-supplied tables
    m.def(
        "value_iteration",
        [](const std::vector<std::vector<std::vector<std::pair<int, double>>>>& transition,
           const std::vector<std::vector<double>>& reward, double gamma, double tol,
           int max_sweeps) {
            DiscreteMdp mdp;
            mdp.n_states = static_cast<int>(transition.size());
            if (mdp.n_states == 0) throw ValidationError("mdp needs at least one state");
            mdp.n_actions = static_cast<int>(transition.front().size());
            mdp.gamma = gamma;
            for (int s = 0; s < mdp.n_states; ++s) {
                for (int a = 0; a < mdp.n_actions; ++a) {
                    mdp.transition.push_back(transition[static_cast<std::size_t>(s)]
                                                       [static_cast<std::size_t>(a)]);
                    mdp.reward.push_back(
                        reward[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]);
                }
            }
            const auto v = value_iteration(mdp, tol, max_sweeps);
            py::dict d;
            d["values"] = v.values;
            d["iterations"] = v.iteration_count;
            d["residual"] = v.residual;
            d["converged"] = v.converged;
            return d;
        },
        py::arg("transition"), py::arg("reward"), py::arg("gamma") = 0.95,
        py::arg("tol") = 1e-9, py::arg("max_sweeps") = 100000,
        "transition[s][a] is a list of (next_state, probability) pairs");

    // policy networks
    py::class_<MlpWeights>(m, "Mlp")
        .def_static("seeded", &MlpWeights::seeded_init, py::arg("sizes"), py::arg("seed"))
        .def_static("load", [](const std::string& path) { return load_weights(path); },
                    py::arg("path"))
        .def("save", [](const MlpWeights& w, const std::string& path) { save_weights(w, path); },
             py::arg("path"))
        .def_property_readonly("sizes", [](const MlpWeights& w) { return w.sizes; })
        .def("forward",
             [](const MlpWeights& w, const std::vector<double>& x) { return forward(w, x); },
             py::arg("input"))
        .def("forward_batch",
             [](const MlpWeights& w, const std::vector<std::vector<double>>& xs) {
                 std::vector<double> flat;
                 for (const auto& x : xs) flat.insert(flat.end(), x.begin(), x.end());
                 const auto out =
                     forward_batch_vectorized(w, flat, static_cast<int>(xs.size()));
                 std::vector<std::vector<double>> rows;
                 const int width = w.output_size();
                 for (std::size_t i = 0; i < xs.size(); ++i)
                     rows.emplace_back(out.begin() + static_cast<long>(i) * width,
                                       out.begin() + static_cast<long>(i + 1) * width);
                 return rows;
             },
             py::arg("inputs"));

    // file-level evaluation, mirroring the CLI
    m.def(
        "evaluate_policy",
        [](const std::string& policy_path, const std::string& set_path,
           const std::array<double, 3>& costs, int workers) {
            const auto set = read_set(set_path);
            const auto bytes = read_file(policy_path);
            if (bytes.size() < 8) throw TruncatedFileError("policy file too short");
            const std::string magic(reinterpret_cast<const char*>(bytes.data()), 8);
            PolicyFn policy;
            if (magic == "CATMLPW1")
                policy = mlp_policy(load_weights(policy_path));
            else
                policy = qtable_policy(load_qtable(policy_path));
            const auto metrics =
                evaluate(policy, set, costs_from_tuple(costs), {}, workers);
            return metrics_dict(metrics);
        },
        py::arg("policy_path"), py::arg("set_path"),
        py::arg("costs") = std::array<double, 3>{-0.01, -0.05, -0.05}, py::arg("workers") = 1,
        "run a saved policy (weights or qtable) over a saved encounter set");

    // full command-line surface
    m.def("run_cli", [](const std::vector<std::string>& args) { return dispatch(args); },
          py::arg("args"), "invoke a CLI subcommand in-process; returns the exit code");
}
