// Acceptance suite: every release criterion is pinned here with its stated
// tolerance, one pass/fail line each. Run all with no arguments or select
// criteria by number: `acceptance 1 4 12`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "catune/cli.hpp"
#include "catune/config.hpp"
#include "catune/policy_viz.hpp"
#include "catune/tuner.hpp"
#include "../test_util.hpp"

using namespace catune;
using namespace catune::testutil;

namespace {

namespace fs = std::filesystem;

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
};

double elapsed_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return "<missing:" + p.string() + ">";
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

// --- criterion 1: objective reproduction (published tuning-metrics rows) ---
bool criterion_objective(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const MetricTargets targets;
    const ObjectiveWeights weights{0.05, 0.80, 0.15};
    struct Row {
        const char* name;
        double nmac, alert, reversal, value;
    };
    const Row rows[] = {
        {"Xu", 9.8268e-4, 0.19460, 0.00290, 0.0},
        {"Untuned", 1.3380e-2, 0.14950, 0.03238, 13.7174},
        {"46", 6.0500e-3, 0.21749, 0.00780, 1.4892},
        {"52", 7.0343e-3, 0.32035, 0.00015, 1.8643},
        {"124", 4.4496e-3, 0.41754, 0.00217, 1.8959},
        {"139", 7.1049e-3, 0.19062, 0.00938, 1.9743},
        {"138", 7.6419e-3, 0.20802, 0.00792, 2.0268},
    };
    for (const auto& row : rows) {
        EvalMetrics m;
        m.p_nmac = row.nmac;
        m.p_alert = row.alert;
        m.p_reversal = row.reversal;
        m.encounter_count = 1;
        const double v = objective(m, targets, weights).value;
        std::ostringstream what;
        what << "row " << row.name << ": got " << v << " want " << row.value << " +-0.005";
        c.require(std::fabs(v - row.value) <= 0.005, what.str());
    }
    c.require(elapsed_since(t0) < 1.0, "runtime >= 1 s");
    return c.ok;
}

// --- criterion 2: linear-sweep reproduction (published rows 91-96) ---
bool criterion_sweep(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const ParamPoint a{-5.9669e-4, -0.8324, -0.1128};
    const ParamPoint b{-1.3570e-5, -0.6253, -0.1018};
    const auto pts = linear_sweep(a, b, 6);
    const double expect[6][3] = {
        {-5.1339e-4, -0.8028, -0.1112}, {-4.3008e-4, -0.7732, -0.1097},
        {-3.4678e-4, -0.7436, -0.1081}, {-2.6348e-4, -0.7140, -0.1065},
        {-1.8018e-4, -0.6844, -0.1049}, {-9.6873e-5, -0.6549, -0.1034},
    };
    // agreement to 4 significant figures; the published table mixes rounding
    // and truncation, so one unit in the 4th significant digit is allowed
    for (int k = 0; k < 6; ++k) {
        const auto p = pts[static_cast<std::size_t>(k)].as_array();
        for (int d = 0; d < 3; ++d) {
            const double want = expect[k][d];
            const double ulp = std::pow(10.0, std::floor(std::log10(std::fabs(want))) - 3);
            std::ostringstream what;
            what << "row " << 91 + k << " param " << d << ": got "
                 << p[static_cast<std::size_t>(d)] << " want " << want << " +-" << ulp;
            c.require(std::fabs(p[static_cast<std::size_t>(d)] - want) <= ulp * (1 + 1e-9),
                      what.str());
        }
    }
    c.require(elapsed_since(t0) < 1.0, "runtime >= 1 s");
    return c.ok;
}

// --- criterion 3: stability-screen reproduction (published alert rates) ---
bool criterion_stability(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Row {
        const char* name;
        std::array<double, 3> rates;
        double variance;
        int printed_decimals;  // 4-decimal rows carry print rounding
    };
    const Row rows[] = {
        {"46", {0.2709, 0.2175, 0.1941}, 0.0010, 4},
        {"52", {0.1948, 0.9223, 0.3203}, 0.1008, 4},
        {"124", {0.4175, 0.9999, 0.9999}, 0.0754, 4},
        {"139", {0.1669, 0.1906, 0.1779}, 9.3778e-5, -1},
        {"138", {0.2223, 0.1927, 0.2080}, 0.0001, 4},
    };
    for (const auto& row : rows) {
        const double v = alert_variance(row.rates);
        const double tol = std::max(0.05 * row.variance, 5e-6);
        bool ok = std::fabs(v - row.variance) <= tol;
        if (!ok && row.printed_decimals > 0) {
            // the published column is rounded to 4 decimal places; accept a
            // value that prints identically (row 138: 1.4608e-4 -> 0.0001)
            const double scale = std::pow(10.0, row.printed_decimals);
            ok = std::round(v * scale) / scale == row.variance;
        }
        std::ostringstream what;
        what << "row " << row.name << ": got " << v << " want " << row.variance;
        c.require(ok, what.str());
    }
    c.require(elapsed_since(t0) < 1.0, "runtime >= 1 s");
    return c.ok;
}

// --- criterion 4: timing harness arithmetic + measured vectorized speedup ---
bool criterion_timing(Check& c) {
    struct Row {
        const char* name;
        std::vector<double> reps;
        double avg;
    };
    const Row rows[] = {
        {"baseline", {28.1693, 27.6316, 26.9382}, 27.5797},
        {"dp", {0.6675, 0.6761, 0.6621}, 0.6686},
        {"lookahead_removed", {13.7242, 13.7053, 13.7745}, 13.7347},
        {"vectorized", {7.4268, 7.1785, 7.6214}, 7.4089},
    };
    for (const auto& row : rows) {
        const double avg = average_of_reps(row.reps);
        std::ostringstream what;
        what << row.name << " average: got " << avg << " want " << row.avg << " +-1e-3";
        c.require(std::fabs(avg - row.avg) <= 1e-3, what.str());
    }
    const double base = average_of_reps(rows[0].reps);
    const double s1 = base / average_of_reps(rows[2].reps);
    const double s2 = base / average_of_reps(rows[3].reps);
    c.require(std::fabs(s1 - 2.0080) <= 1e-3, "lookahead-removal speedup off");
    c.require(std::fabs(s2 - 3.7225) <= 1e-3, "vectorized speedup off");
    c.require(timing_per_encounter(100.0, 10.0, 10) == 10.0, "per-encounter arithmetic off");

    // measured contract: batched SIMD forward >= 2x the per-sample reference
    // on the full-scale 7x512 architecture, Eq-style protocol (warmup + 3 reps)
    std::vector<int> arch = {25, 512, 512, 512, 512, 512, 512, 512, 9};
    const auto net = MlpWeights::seeded_init(arch, 7);
    const int batch = 128;
    Rng rng(3);
    std::vector<double> inputs(static_cast<std::size_t>(batch) * 25);
    for (auto& v : inputs) v = rng.uniform(-1.0, 1.0);

    volatile double sink = 0.0;
    auto time_naive = [&]() {
        const auto t0 = std::chrono::steady_clock::now();
        for (int i = 0; i < batch; ++i) {
            const std::vector<double> x(inputs.begin() + i * 25, inputs.begin() + (i + 1) * 25);
            sink += forward(net, x)[0];
        }
        return elapsed_since(t0);
    };
    auto time_vec = [&]() {
        const auto t0 = std::chrono::steady_clock::now();
        sink += forward_batch_vectorized(net, inputs, batch)[0];
        return elapsed_since(t0);
    };
    const auto naive = measure_repetitions(time_naive, 1, 3);
    const auto vec = measure_repetitions(time_vec, 1, 3);
    const double speedup = naive.average / vec.average;
    std::ostringstream what;
    what << "measured vectorized speedup on 7x512: " << speedup << " (< 2x)";
    c.require(speedup >= 2.0, what.str());
    c.detail << "measured 7x512 speedup " << speedup << "x";
    return c.ok;
}

// --- criterion 5: dp oracle equivalence ---
bool criterion_dp(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 5 + static_cast<int>(Rng(9000 + trial).uniform_int(96));  // <= 100
        const auto mdp = random_mdp(n, 4242 + static_cast<std::uint64_t>(trial), 0.9);
        const auto v = value_iteration(mdp, 1e-10, 20000);
        if (!v.converged) {
            c.require(false, "value iteration did not converge on trial " +
                                 std::to_string(trial));
            return c.ok;
        }
        const auto oracle = backward_induction(mdp, 200);
        double err = 0.0;
        for (int s = 0; s < n; ++s)
            err = std::max(err, std::fabs(v.values[static_cast<std::size_t>(s)] -
                                          oracle[static_cast<std::size_t>(s)]));
        if (err >= 1e-6) {
            c.require(false, "trial " + std::to_string(trial) + ": max-norm " +
                                 std::to_string(err));
            return c.ok;
        }
        const auto q = q_from_v(mdp, v, GridSpec::joint_small());
        double qerr = 0.0;
        for (int s = 0; s < n; ++s) {
            double best = -1e300;
            for (int a = 0; a < kNumActions; ++a) best = std::max(best, q.at(s, a));
            qerr = std::max(qerr, std::fabs(best - v.values[static_cast<std::size_t>(s)]));
        }
        if (qerr >= 1e-9) {
            c.require(false, "trial " + std::to_string(trial) + ": bellman gap " +
                                 std::to_string(qerr));
            return c.ok;
        }
    }
    const double secs = elapsed_since(t0);
    c.detail << "200 mdps in " << secs << " s";
    c.require(secs < 60.0, "runtime >= 1 min");
    return c.ok;
}

// --- criterion 6: gradient fidelity ---
bool criterion_gradients(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::vector<int>> archs = {{25, 8, 9}, {25, 16, 16, 9}};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (const auto& arch : archs) {
            auto net = MlpWeights::seeded_init(arch, 100 + seed);
            Rng rng(200 + seed);
            const int batch = 2;
            std::vector<double> inputs(static_cast<std::size_t>(batch) * 25);
            for (auto& v : inputs) v = rng.uniform(-1.0, 1.0);
            std::vector<double> coeff(static_cast<std::size_t>(batch) * 9);
            for (auto& v : coeff) v = rng.uniform(-1.0, 1.0);

            auto loss_at = [&]() {
                const auto out = forward_batch_vectorized(net, inputs, batch);
                double loss = 0.0;
                for (std::size_t i = 0; i < out.size(); ++i) loss += coeff[i] * out[i];
                return loss;
            };
            const auto cache = forward_batch_cached(net, inputs, batch);
            const auto grads = backward(net, cache, coeff);

            const double h = 1e-5;
            double worst = 0.0;
            for (std::size_t l = 0; l < net.layers.size(); ++l) {
                auto check_all = [&](std::vector<double>& w, const std::vector<double>& g) {
                    for (std::size_t i = 0; i < w.size(); ++i) {
                        const double orig = w[i];
                        w[i] = orig + h;
                        const double up = loss_at();
                        w[i] = orig - h;
                        const double down = loss_at();
                        w[i] = orig;
                        const double fd = (up - down) / (2.0 * h);
                        const double rel = std::fabs(fd - g[i]) /
                                           std::max({1.0, std::fabs(fd), std::fabs(g[i])});
                        worst = std::max(worst, rel);
                    }
                };
                check_all(net.layers[l].w, grads.layers[l].w);
                check_all(net.layers[l].b, grads.layers[l].b);
            }
            if (worst >= 1e-4) {
                std::ostringstream what;
                what << "seed " << seed << " arch " << arch.size() - 2
                     << " hidden: worst rel err " << worst;
                c.require(false, what.str());
                return c.ok;
            }
        }
    }
    const double secs = elapsed_since(t0);
    c.detail << "20 seeds x 2 archs in " << secs << " s";
    c.require(secs < 60.0, "runtime >= 1 min");
    return c.ok;
}

// --- criterion 7: double-q identity ---
bool criterion_double_q(Check& c) {
    Rng rng(31);
    const auto theta = MlpWeights::seeded_init({25, 16, 9}, 77);
    const auto other = MlpWeights::seeded_init({25, 16, 9}, 78);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Transition> batch;
        for (int i = 0; i < 8; ++i) {
            Transition t;
            for (auto& v : t.obs.v) v = rng.uniform(-1.0, 1.0);
            for (auto& v : t.next_obs.v) v = rng.uniform(-1.0, 1.0);
            t.action = CombinedAction::from_index(static_cast<int>(rng.uniform_int(9)));
            t.reward = -rng.uniform();
            t.terminal = rng.bernoulli(0.25);
            batch.push_back(t);
        }
        const auto dq = double_q_targets(batch, theta, theta, 0.95);
        const auto mq = max_q_targets(batch, theta, 0.95);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (dq[i] != mq[i]) {
                c.require(false, "trial " + std::to_string(trial) +
                                     ": double-q != max-q with identical networks");
                return c.ok;
            }
        }
        // terminal transitions never consult the target network
        const auto with_other = double_q_targets(batch, theta, other, 0.95);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (batch[i].terminal &&
                (with_other[i] != batch[i].reward || dq[i] != batch[i].reward)) {
                c.require(false, "terminal transition consulted a network");
                return c.ok;
            }
        }
    }
    return c.ok;
}

// --- criterion 8: LHS stratification ---
bool criterion_lhs(Check& c) {
    int checked = 0;
    for (int design = 0; design < 1000; ++design) {
        const int n = 2 + design % 49;          // 2..50
        const int dims = 1 + design % 3;        // 1..3
        Rng rng(5000 + static_cast<std::uint64_t>(design));
        const auto pts = latin_hypercube(n, dims, rng);
        for (int d = 0; d < dims; ++d) {
            std::vector<int> count(static_cast<std::size_t>(n), 0);
            for (const auto& p : pts) {
                const int stratum = std::min(
                    n - 1, static_cast<int>(p[static_cast<std::size_t>(d)] * n));
                count[static_cast<std::size_t>(stratum)] += 1;
            }
            for (int s = 0; s < n; ++s) {
                if (count[static_cast<std::size_t>(s)] != 1) {
                    std::ostringstream what;
                    what << "design " << design << " (n=" << n << ", dims=" << dims
                         << "): stratum " << s << " holds " << count[static_cast<std::size_t>(s)];
                    c.require(false, what.str());
                    return c.ok;
                }
            }
        }
        ++checked;
    }
    c.detail << checked << " designs";
    return c.ok;
}

// --- criterion 9: EI closed form vs quadrature ---
bool criterion_ei(Check& c) {
    const double means[] = {-2.0, -1.0, 0.0, 0.5, 1.0, 2.0};
    const double stds[] = {0.0, 0.05, 0.3, 1.0, 2.5};
    const double bests[] = {-1.5, 0.0, 0.7, 2.0};
    double worst = 0.0;
    for (double mean : means) {
        for (double std : stds) {
            for (double best : bests) {
                const double closed = expected_improvement(mean, std, best);
                const double quad = ei_by_quadrature(mean, std, best);
                worst = std::max(worst, std::fabs(closed - quad));
                if (std::fabs(closed - quad) >= 1e-6) {
                    std::ostringstream what;
                    what << "mean " << mean << " std " << std << " best " << best << ": |"
                         << closed << " - " << quad << "| >= 1e-6";
                    c.require(false, what.str());
                    return c.ok;
                }
            }
        }
    }
    c.detail << "worst |closed - quadrature| = " << worst;
    return c.ok;
}

// --- criterion 10: end-to-end desk-scale tuning trend ---
bool criterion_tuning_trend(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = parse_config("{}");
    cfg.master_seed = 20240809;
    cfg.workers = 2;

    std::cerr << "[criterion 10] generating the 2000-encounter evaluation set...\n";
    const auto set = generate_stratified_set(2000, 0.5, cfg.encounter, cfg.master_seed);
    const auto env = make_sampling_env(cfg.encounter, derive_seed(cfg.master_seed, 0xDA7A));
    const auto evaluator =
        make_training_evaluator(cfg.dqn_for_seed(0), env, set, cfg.lookahead, cfg.workers);

    const auto dir = fresh_dir("catune_acceptance_10");
    auto tune_cfg = cfg.tune_config((dir / "ledger.jsonl").string());

    std::cerr << "[criterion 10] evaluating the untuned baseline point...\n";
    TuneConfig baseline_cfg = tune_cfg;
    baseline_cfg.ledger_path.clear();
    const auto baseline_ledger =
        run_points(baseline_cfg, {ParamPoint{-0.01, -0.05, -0.05}}, Provenance::Manual,
                   evaluator);
    const auto& untuned = baseline_ledger.iterations.at(0);
    if (untuned.status != IterationStatus::Ok) {
        c.require(false, "untuned baseline training failed: " + untuned.message);
        return c.ok;
    }
    std::cerr << "[criterion 10] untuned: V " << untuned.objective << ", p_nmac "
              << untuned.best.p_nmac << ", p_alert " << untuned.best.p_alert << "\n";

    std::cerr << "[criterion 10] running 5 LHS + 15 EI tuner iterations...\n";
    const auto ledger = tune(tune_cfg, evaluator);
    const auto* best = ledger.best_any();
    if (!best) {
        c.require(false, "tuning produced no successful iteration");
        return c.ok;
    }
    std::cerr << "[criterion 10] best tuned: iteration " << best->id << ", V "
              << best->objective << ", p_nmac " << best->best.p_nmac << ", p_alert "
              << best->best.p_alert << "\n";

    c.detail << "untuned V " << untuned.objective << " p_nmac " << untuned.best.p_nmac
             << "; best tuned V " << best->objective << " p_nmac " << best->best.p_nmac
             << " (iteration " << best->id << ")";

    std::ostringstream w1;
    w1 << "best tuned V " << best->objective << " > 0.5 x untuned V " << untuned.objective;
    c.require(best->objective <= 0.5 * untuned.objective, w1.str());
    std::ostringstream w2;
    w2 << "best tuned p_nmac " << best->best.p_nmac << " >= untuned " << untuned.best.p_nmac;
    c.require(best->best.p_nmac < untuned.best.p_nmac, w2.str());

    const double secs = elapsed_since(t0);
    c.detail << "; runtime " << secs / 3600.0 << " h";
    c.require(secs < 8.0 * 3600.0, "runtime >= 8 h budget");
    fs::remove_all(dir);
    return c.ok;
}

// --- criterion 11: determinism of every subcommand ---
bool criterion_determinism(Check& c) {
    const auto dir = fresh_dir("catune_acceptance_11");
    const auto cfg_path = dir / "cfg.json";
    {
        std::ofstream out(cfg_path);
        out << R"({
            "master_seed": 99,
            "encounter": {"duration_steps": 40, "tcpa_max": 35.0},
            "dqn": {"hidden": [8], "episodes": 3, "batch_size": 8, "min_fill": 16,
                     "replay_capacity": 256, "epsilon_decay_steps": 100},
            "dp": {"mode": "joint", "bins": [5, 5, 4], "samples_per_cell": 3},
            "tuner": {"init_points": 2, "budget": 1},
            "plot": {"nx": 15, "ny": 15}
        })";
    }
    const std::string cfg = cfg_path.string();

    auto run_twice = [&](const std::string& name, std::vector<std::string> args,
                         const std::vector<std::string>& artifacts) {
        for (const char* tag : {"a", "b"}) {
            auto full = args;
            full.push_back("--out");
            full.push_back((dir / (name + "_" + tag)).string());
            const int rc = dispatch(full);
            if (rc != 0) {
                c.require(false, name + " exited " + std::to_string(rc));
                return;
            }
        }
        for (const auto& artifact : artifacts) {
            const auto a = slurp(dir / (name + "_a") / artifact);
            const auto b = slurp(dir / (name + "_b") / artifact);
            c.require(a == b, name + ": " + artifact + " differs between runs");
        }
    };

    run_twice("gen", {"generate-encounters", "--config", cfg, "--n", "40", "--nmac-fraction",
                      "0.5", "--json"},
              {"encounters.enc", "encounters.json", "manifest.json"});
    const std::string set = (dir / "gen_a" / "encounters.enc").string();

    run_twice("dp", {"solve-dp", "--config", cfg}, {"qtable.qtb", "qtable.qtb.meta.json"});
    run_twice("train", {"train-dqn", "--config", cfg}, {"weights.mlpw", "training_log.csv"});
    const std::string weights = (dir / "train_a" / "weights.mlpw").string();

    run_twice("eval",
              {"evaluate", "--config", cfg, "--policy", weights, "--set", set, "--trace", "2"},
              {"metrics.json", "trace_0.csv", "trace_1.csv"});

    // worker-count independence on top of run-to-run identity
    {
        const auto w1 = dir / "eval_w1";
        const auto w8 = dir / "eval_w8";
        dispatch({"evaluate", "--config", cfg, "--policy", weights, "--set", set, "--workers",
                  "1", "--out", w1.string()});
        dispatch({"evaluate", "--config", cfg, "--policy", weights, "--set", set, "--workers",
                  "8", "--out", w8.string()});
        c.require(slurp(w1 / "metrics.json") == slurp(w8 / "metrics.json"),
                  "metrics differ between 1 and 8 workers");
    }

    run_twice("tune", {"tune", "--config", cfg, "--set", set}, {"ledger.jsonl"});
    run_twice("sweep",
              {"sweep", "--config", cfg, "--set", set, "--from", "-0.9,-0.5,-0.5", "--to",
               "-0.1,-0.5,-0.5", "--n", "1"},
              {"ledger.jsonl"});
    const std::string ledger = (dir / "tune_a" / "ledger.jsonl").string();
    run_twice("rescore", {"rescore", "--config", cfg, "--ledger", ledger, "--weights",
                          "1.0,0.0,0.0"},
              {"ledger.jsonl", "ranking.json"});
    run_twice("plot", {"plot-policy", "--config", cfg, "--policy", weights, "--format", "ppm"},
              {"policy.ppm", "policy.ppm.legend.txt"});
    run_twice("plotq",
              {"plot-policy", "--config", cfg, "--policy",
               (dir / "dp_a" / "qtable.qtb").string(), "--format", "csv"},
              {"policy.csv"});

    if (c.ok) fs::remove_all(dir);
    return c.ok;
}

// --- criterion 12: synthetic surrogate convergence ---
bool criterion_synthetic(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    int hits = 0;
    const int runs = 100;
    for (int run = 0; run < runs; ++run) {
        TuneConfig cfg;
        cfg.init_points = 5;
        cfg.budget = 20;
        // the synthetic objective is noiseless and globally smooth; the
        // surrogate settings reflect that (see decisions notes)
        cfg.gp.noise_var = 1e-6;
        cfg.gp.length_scale = 0.8;
        cfg.master_seed = 1000 + static_cast<std::uint64_t>(run);

        Rng mrng(500 + static_cast<std::uint64_t>(run));
        const std::array<double, 3> m = {-0.1 - 0.8 * mrng.uniform(),
                                         -0.1 - 0.8 * mrng.uniform(),
                                         -0.1 - 0.8 * mrng.uniform()};
        const PointEvaluator eval = [&](const ParamPoint& p, int,
                                        const std::array<std::uint64_t, 3>&) {
            const auto a = p.as_array();
            double f = 0.0;
            for (int d = 0; d < 3; ++d) {
                const double dd =
                    a[static_cast<std::size_t>(d)] - m[static_cast<std::size_t>(d)];
                f += dd * dd;
            }
            PointOutcome out;
            for (auto& mm : out.models) {
                mm.p_alert = cfg.targets.p_alert;
                mm.p_reversal = cfg.targets.p_reversal;
                mm.p_nmac =
                    cfg.targets.p_nmac * std::sqrt(2.0 * f / cfg.weights.nmac + 1.0);
                mm.encounter_count = 1;
            }
            return out;
        };
        const auto ledger = tune(cfg, eval);
        const auto* best = ledger.best_any();
        bool ok = best != nullptr;
        if (ok) {
            const auto p = best->point.as_array();
            for (int d = 0; d < 3; ++d)
                ok &= std::fabs(p[static_cast<std::size_t>(d)] -
                                m[static_cast<std::size_t>(d)]) <= 0.05;
        }
        hits += ok ? 1 : 0;
    }
    const double secs = elapsed_since(t0);
    c.detail << hits << "/100 runs within 0.05 per dimension in " << secs << " s";
    c.require(hits >= 95, "fewer than 95/100 runs converged");
    c.require(secs < 300.0, "runtime >= 5 min");
    return c.ok;
}

struct Criterion {
    int id;
    const char* name;
    std::function<bool(Check&)> fn;
};

const Criterion kCriteria[] = {
    {1, "objective-reproduction", criterion_objective},
    {2, "linear-sweep-reproduction", criterion_sweep},
    {3, "stability-screen-reproduction", criterion_stability},
    {4, "timing-harness", criterion_timing},
    {5, "dp-oracle-equivalence", criterion_dp},
    {6, "gradient-fidelity", criterion_gradients},
    {7, "double-q-identity", criterion_double_q},
    {8, "lhs-stratification", criterion_lhs},
    {9, "ei-oracle", criterion_ei},
    {10, "tuning-trend", criterion_tuning_trend},
    {11, "determinism", criterion_determinism},
    {12, "synthetic-surrogate-convergence", criterion_synthetic},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& criterion : kCriteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), criterion.id) == selected.end())
            continue;
        Check check;
        bool ok = false;
        try {
            ok = criterion.fn(check);
        } catch (const std::exception& e) {
            check.require(false, std::string("exception: ") + e.what());
        }
        std::printf("criterion %02d [%s] %s%s%s\n", criterion.id, criterion.name,
                    ok ? "PASS" : "FAIL",
                    check.detail.str().empty() ? "" : " - ",
                    check.detail.str().c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
