#include "catune/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "catune/binio.hpp"
#include "catune/config.hpp"
#include "catune/errors.hpp"
#include "catune/policy_viz.hpp"
#include "catune/version.hpp"

namespace catune {

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    int workers_override = 0;
};

RunConfig load_run_config(const CommonArgs& common) {
    RunConfig cfg = common.config_path.empty() ? parse_config("{}")
                                               : load_config_file(common.config_path);
    if (common.seed_set) cfg.master_seed = common.seed_override;
    if (common.workers_override > 0) cfg.workers = common.workers_override;
    return cfg;
}

fs::path ensure_out_dir(const std::string& out) {
    if (out.empty()) throw ValidationError("--out directory is required");
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + out + ": " + ec.message());
    return dir;
}

// Every artifact directory gets a manifest sufficient to reproduce it:
// command, canonical config, seed, artifact list, format versions.
void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg,
                    const std::vector<std::string>& artifacts, bool deterministic = true) {
    nlohmann::json m;
    m["command"] = command;
    m["catune_version"] = kCatuneVersion;
    m["format_versions"] = {{"config", kConfigFormatVersion},
                            {"encounter_set", 1},
                            {"weights", 1},
                            {"qtable", 1},
                            {"ledger", 1}};
    const std::string config_text = serialize_config(cfg);
    m["config"] = nlohmann::json::parse(config_text);
    m["config_crc32"] = crc32(config_text.data(), config_text.size());
    m["master_seed"] = cfg.master_seed;
    m["artifacts"] = artifacts;
    m["deterministic"] = deterministic;
    write_file_atomic((dir / "manifest.json").string(), m.dump(2) + "\n");
}

PolicyFn load_policy(const std::string& path, bool vectorized, GridMode* mode_out = nullptr) {
    const auto bytes = read_file(path);
    if (bytes.size() < 8) throw TruncatedFileError("policy file too short: " + path);
    const std::string magic(reinterpret_cast<const char*>(bytes.data()), 8);
    if (magic == "CATMLPW1") {
        return mlp_policy(load_weights(path), vectorized);
    }
    if (magic == "CATQTAB1") {
        auto table = load_qtable(path);
        if (mode_out) *mode_out = table.grid.mode;
        return qtable_policy(std::move(table));
    }
    throw ParseError("unrecognized policy file magic in " + path);
}

std::array<double, 3> parse_triple(const std::string& text) {
    std::array<double, 3> vals{};
    std::stringstream ss(text);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
        if (i >= 3) throw ValidationError("expected exactly three comma-separated values");
        try {
            vals[static_cast<std::size_t>(i)] = std::stod(item);
        } catch (const std::exception&) {
            throw ValidationError("cannot parse numeric component: " + item);
        }
        ++i;
    }
    if (i != 3) throw ValidationError("expected exactly three comma-separated values");
    return vals;
}

ParamPoint parse_point(const std::string& text) {
    ParamPoint p = ParamPoint::from_array(parse_triple(text));
    p.validate();
    return p;
}

double wall_seconds(const std::function<void()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

int cmd_generate(const CommonArgs& common, int n, double nmac_fraction, bool emit_json) {
    RunConfig cfg = load_run_config(common);
    const auto dir = ensure_out_dir(common.out_dir);
    const auto set = generate_stratified_set(n, nmac_fraction, cfg.encounter, cfg.master_seed);
    const auto path = dir / "encounters.enc";
    write_set(set, path.string());
    std::vector<std::string> artifacts = {"encounters.enc"};
    if (emit_json) {
        write_set_json(set, (dir / "encounters.json").string());
        artifacts.push_back("encounters.json");
    }
    write_manifest(dir, "generate-encounters", cfg, artifacts);
    std::cout << "wrote " << set.specs.size() << " encounters (" << set.nominal_count()
              << " nominal NMAC) to " << path.string() << "\n";
    return 0;
}

int cmd_solve_dp(const CommonArgs& common) {
    RunConfig cfg = load_run_config(common);
    const auto dir = ensure_out_dir(common.out_dir);

    MdpBuildConfig build;
    build.grid = cfg.dp_grid();
    build.chain = build_markov_chain(cfg.encounter.avg_action_len, cfg.encounter.avg_clear_len);
    build.dynamics = cfg.encounter.dynamics;
    build.reward = cfg.reward;
    build.dt = cfg.encounter.dt;
    build.nominal_speed = cfg.dp.nominal_speed;
    build.nominal_alt = cfg.dp.nominal_alt;
    build.samples_per_cell = cfg.dp.samples_per_cell;
    build.seed = cfg.master_seed;
    build.gamma = cfg.dp.gamma;

    const auto mdp = build_mdp_from_simulator(build);
    const auto values = value_iteration(mdp, cfg.dp.tol, cfg.dp.max_sweeps, cfg.workers);
    const auto table = q_from_v(mdp, values, build.grid);
    save_qtable(table, (dir / "qtable.qtb").string());
    write_manifest(dir, "solve-dp", cfg, {"qtable.qtb", "qtable.qtb.meta.json"});

    std::cout << "value iteration: " << values.iteration_count
              << " sweeps, residual " << values.residual << "\n";
    if (!values.converged)
        throw ConvergenceError("value iteration did not converge within " +
                               std::to_string(cfg.dp.max_sweeps) + " sweeps (residual " +
                               std::to_string(values.residual) + "); qtable.qtb holds the "
                               "unconverged table");
    return 0;
}

int cmd_train(const CommonArgs& common) {
    RunConfig cfg = load_run_config(common);
    const auto dir = ensure_out_dir(common.out_dir);
    const auto env = make_sampling_env(cfg.encounter, derive_seed(cfg.master_seed, 0xDA7A));
    const auto result = train(cfg.dqn_for_seed(cfg.master_seed), env);
    save_weights(result.weights, (dir / "weights.mlpw").string());
    write_training_log_csv(result.log, (dir / "training_log.csv").string());
    write_manifest(dir, "train-dqn", cfg, {"weights.mlpw", "training_log.csv"});
    std::cout << "trained " << result.log.size() << " episodes, " << result.grad_steps
              << " gradient steps\n";
    return 0;
}

int cmd_evaluate(const CommonArgs& common, const std::string& policy_path,
                 const std::string& set_path, bool lookahead_flag, int trace_count) {
    RunConfig cfg = load_run_config(common);
    const auto dir = ensure_out_dir(common.out_dir);
    const auto set = read_set(set_path);
    const auto policy = load_policy(policy_path, true);
    LookaheadConfig look = cfg.lookahead;
    if (lookahead_flag) look.enabled = true;

    const auto metrics = evaluate(policy, set, cfg.reward, look, cfg.workers);
    const auto report = objective(metrics, cfg.evaluator.targets, cfg.evaluator.weights);
    write_metrics_json(metrics, report, (dir / "metrics.json").string());
    std::vector<std::string> artifacts = {"metrics.json"};

    for (int i = 0; i < trace_count && i < static_cast<int>(set.specs.size()); ++i) {
        const auto& spec = set.specs[static_cast<std::size_t>(i)];
        EncounterSim sim(spec, set.chain, set.config.dynamics, cfg.reward, set.config.dt);
        std::ostringstream csv;
        csv << "step,own_x,own_y,own_alt,own_heading,intr_x,intr_y,intr_alt,intr_heading,"
               "action,reward,nmac,alert,reversal,cease_alert,terminal\n";
        csv.precision(17);
        while (!sim.done()) {
            const auto obs = sim.observation();
            const auto action =
                look.enabled
                    ? lookahead_action(policy, obs, sim.ownship(), sim.intruder(),
                                       sim.prev_action(), sim.steps_since_alert(),
                                       set.config.dt, set.config.dynamics, look)
                    : policy(obs);
            const int step = sim.step_index();
            const auto out = sim.step(action);
            const auto& own = sim.ownship();
            const auto& intr = sim.intruder();
            csv << step << ',' << own.x << ',' << own.y << ',' << own.alt << ','
                << own.heading << ',' << intr.x << ',' << intr.y << ',' << intr.alt << ','
                << intr.heading << ',' << action.index() << ',' << out.reward << ','
                << (out.events.nmac ? 1 : 0) << ',' << (out.events.alert ? 1 : 0) << ','
                << ((out.events.reversal_h || out.events.reversal_v) ? 1 : 0) << ','
                << (out.events.cease_alert ? 1 : 0) << ',' << (out.terminal ? 1 : 0) << '\n';
        }
        const std::string name = "trace_" + std::to_string(spec.id) + ".csv";
        write_file_atomic((dir / name).string(), csv.str());
        artifacts.push_back(name);
    }
    write_manifest(dir, "evaluate", cfg, artifacts);

    std::cout.precision(10);
    std::cout << "p_nmac " << metrics.p_nmac << "  p_alert " << metrics.p_alert
              << "  p_reversal " << metrics.p_reversal << "  objective " << report.value
              << "\n";
    return 0;
}

PointEvaluator build_point_evaluator(const RunConfig& cfg, const EncounterSet& set,
                                     const fs::path& dir) {
    const auto env = make_sampling_env(cfg.encounter, derive_seed(cfg.master_seed, 0xDA7A));
    const DqnConfig base = cfg.dqn_for_seed(0);
    const LookaheadConfig look = cfg.lookahead;  // off by default during tuning
    const int workers = cfg.workers;
    const std::string weights_dir = dir.string();
    return [base, env, set, look, workers, weights_dir](
               const ParamPoint& point, int iteration,
               const std::array<std::uint64_t, 3>& seeds) {
        DqnConfig c = base;
        c.reward_params = point.to_reward_params();
        const auto trained = train_triplicate(c, seeds, env);
        PointOutcome outcome;
        for (int i = 0; i < 3; ++i) {
            char name[64];
            std::snprintf(name, sizeof name, "iter_%03d_model_%d.mlpw", iteration, i);
            save_weights(trained[static_cast<std::size_t>(i)].weights,
                         (fs::path(weights_dir) / name).string());
            const auto policy = mlp_policy(trained[static_cast<std::size_t>(i)].weights);
            outcome.models[static_cast<std::size_t>(i)] =
                evaluate(policy, set, c.reward_params, look, workers);
        }
        return outcome;
    };
}

void print_ledger_summary(const TuningLedger& ledger) {
    const auto* best = ledger.best_stable();
    const auto* any = ledger.best_any();
    if (any) {
        std::cout.precision(10);
        std::cout << "iterations " << ledger.iterations.size() << ", best objective "
                  << any->objective << " at iteration " << any->id;
        if (best && best->id != any->id)
            std::cout << " (best stable: " << best->objective << " at " << best->id << ")";
        std::cout << "\n";
    }
}

int cmd_tune(const CommonArgs& common, const std::string& set_path) {
    RunConfig cfg = load_run_config(common);
    const auto dir = ensure_out_dir(common.out_dir);
    const auto set = read_set(set_path);
    const auto tune_cfg = cfg.tune_config((dir / "ledger.jsonl").string());
    const auto ledger = tune(tune_cfg, build_point_evaluator(cfg, set, dir));
    write_manifest(dir, "tune", cfg, {"ledger.jsonl"});
    print_ledger_summary(ledger);
    return 0;
}

int cmd_sweep(const CommonArgs& common, const std::string& set_path, const std::string& line_a,
              const std::string& line_b, const std::string& center, double radius, int n,
              const std::string& points_file) {
    RunConfig cfg = load_run_config(common);
    const auto dir = ensure_out_dir(common.out_dir);
    const auto set = read_set(set_path);

    std::vector<ParamPoint> points;
    Provenance provenance = Provenance::Manual;
    if (!line_a.empty() || !line_b.empty()) {
        if (line_a.empty() || line_b.empty())
            throw ValidationError("--from and --to must be given together");
        points = linear_sweep(parse_point(line_a), parse_point(line_b), n);
        provenance = Provenance::LinearSweep;
    } else if (!center.empty()) {
        if (!(radius > 0.0))
            throw ValidationError("--radius must be > 0 for a local design");
        Rng rng(derive_seed(cfg.master_seed, 0x10CA1));
        points = local_lhs(parse_point(center), {radius, radius, radius}, n, rng);
        provenance = Provenance::LocalLhs;
    } else if (!points_file.empty()) {
        std::ifstream in(points_file);
        if (!in) throw IoError("cannot open points file: " + points_file);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            points.push_back(parse_point(line));
        }
        if (points.empty()) throw ValidationError("points file holds no points");
        provenance = Provenance::Manual;
    } else {
        throw ValidationError("sweep needs --from/--to, --center/--radius or --points");
    }

    const auto tune_cfg = cfg.tune_config((dir / "ledger.jsonl").string());
    const auto ledger = run_points(tune_cfg, points, provenance, build_point_evaluator(cfg, set, dir));
    write_manifest(dir, "sweep", cfg, {"ledger.jsonl"});
    print_ledger_summary(ledger);
    return 0;
}

int cmd_rescore(const CommonArgs& common, const std::string& ledger_path,
                const std::string& weights_text) {
    RunConfig cfg = load_run_config(common);
    const auto dir = ensure_out_dir(common.out_dir);
    auto ledger = load_ledger(ledger_path);

    ObjectiveWeights weights = cfg.evaluator.weights;
    if (!weights_text.empty()) {
        const auto w = parse_triple(weights_text);
        weights = ObjectiveWeights{w[0], w[1], w[2]};
        weights.validate();
    }
    const auto rescored = rescore_ledger(ledger, weights);
    save_ledger(rescored, (dir / "ledger.jsonl").string());

    nlohmann::json ranking = nlohmann::json::array();
    for (int id : rank_by_objective(rescored)) {
        const auto& it = rescored.iterations[static_cast<std::size_t>(id)];
        ranking.push_back({{"id", it.id},
                           {"objective", it.objective},
                           {"stable", it.stable},
                           {"point", {it.point.alert, it.point.reversal, it.point.cease_alert}}});
    }
    write_file_atomic((dir / "ranking.json").string(), ranking.dump(2) + "\n");
    write_manifest(dir, "rescore", cfg, {"ledger.jsonl", "ranking.json"});
    print_ledger_summary(rescored);
    return 0;
}

int cmd_plot(const CommonArgs& common, const std::string& policy_path,
             const std::string& plane, const std::string& format) {
    RunConfig cfg = load_run_config(common);
    const auto dir = ensure_out_dir(common.out_dir);
    if (plane == "vertical")
        cfg.plot.plane = PlotPlane::Vertical;
    else if (plane == "horizontal" || plane.empty())
        cfg.plot.plane = cfg.plot.plane;
    if (plane == "horizontal") cfg.plot.plane = PlotPlane::Horizontal;
    if (!format.empty()) {
        if (format == "ppm")
            cfg.plot.format = PlotFormat::Ppm;
        else if (format == "svg")
            cfg.plot.format = PlotFormat::Svg;
        else if (format == "csv")
            cfg.plot.format = PlotFormat::Csv;
        else
            throw ValidationError("--format must be ppm, svg or csv");
    }

    const auto policy = load_policy(policy_path, true);
    const auto grid = policy_grid(policy, cfg.plot, cfg.workers);
    const std::string ext = cfg.plot.format == PlotFormat::Ppm   ? "ppm"
                            : cfg.plot.format == PlotFormat::Svg ? "svg"
                                                                 : "csv";
    const std::string name = "policy." + ext;
    write_plot(grid, (dir / name).string());
    std::vector<std::string> artifacts = {name};
    if (cfg.plot.format == PlotFormat::Ppm) artifacts.push_back(name + ".legend.txt");
    write_manifest(dir, "plot-policy", cfg, artifacts);
    std::cout << "wrote " << (dir / name).string() << "\n";
    return 0;
}

int cmd_bench(const CommonArgs& common, const std::string& policy_path,
              const std::string& set_path, int n) {
    RunConfig cfg = load_run_config(common);
    const auto dir = ensure_out_dir(common.out_dir);
    if (n < 2) throw ValidationError("bench needs --n >= 2");
    auto set = read_set(set_path);
    if (static_cast<int>(set.specs.size()) < n)
        throw ValidationError("bench: encounter set holds fewer than --n encounters");

    EncounterSet bulk = set;
    bulk.specs.assign(set.specs.begin(), set.specs.begin() + n);
    EncounterSet single = set;
    single.specs.assign(set.specs.begin(), set.specs.begin() + 1);

    struct Row {
        std::string name;
        TimingMeasurement t;
        double speedup = 1.0;
    };
    std::vector<Row> rows;

    auto simulate_T = [&](const PolicyFn& policy, const LookaheadConfig& look) {
        return [&, policy, look]() {
            const double t_n = wall_seconds(
                [&]() { evaluate(policy, bulk, cfg.reward, look, 1); });
            const double t_1 = wall_seconds(
                [&]() { evaluate(policy, single, cfg.reward, look, 1); });
            return timing_per_encounter(t_n, t_1, n);
        };
    };

    const auto bytes = read_file(policy_path);
    const std::string magic(reinterpret_cast<const char*>(bytes.data()),
                            std::min<std::size_t>(8, bytes.size()));
    const bool is_mlp = magic == "CATMLPW1";

    LookaheadConfig look_on = cfg.lookahead;
    look_on.enabled = true;
    const LookaheadConfig look_off{};

    if (is_mlp) {
        const auto w = load_weights(policy_path);
        const auto naive = mlp_policy(w, false);
        const auto vectorized = mlp_policy(w, true);
        rows.push_back({"dqn_lookahead_naive", measure_repetitions(simulate_T(naive, look_on)), 1.0});
        rows.push_back({"dqn_naive", measure_repetitions(simulate_T(naive, look_off)), 0.0});
        rows.push_back({"dqn_vectorized", measure_repetitions(simulate_T(vectorized, look_off)), 0.0});
        const double base = rows[0].t.average;
        for (auto& r : rows) r.speedup = base / r.t.average;
    } else {
        const auto policy = load_policy(policy_path, true);
        rows.push_back({"dp_table", measure_repetitions(simulate_T(policy, look_off)), 1.0});
    }

    std::ostringstream csv;
    csv << "name,rep1_s,rep2_s,rep3_s,average_s,speedup_vs_baseline\n";
    csv.precision(10);
    for (const auto& r : rows) {
        csv << r.name;
        for (double v : r.t.rep_seconds) csv << ',' << v;
        csv << ',' << r.t.average << ',' << r.speedup << '\n';
    }
    write_file_atomic((dir / "bench.csv").string(), csv.str());
    // wall-clock measurements are machine-specific by nature
    write_manifest(dir, "bench", cfg, {"bench.csv"}, /*deterministic=*/false);
    std::cout << csv.str();
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"aircraft collision-avoidance policy training, evaluation and reward tuning"};
    app.require_subcommand(0, 1);

    bool show_version = false;
    app.add_flag("--version", show_version, "print tool and artifact format versions");

    CommonArgs common;
    auto add_common = [&common](CLI::App* sub, bool needs_out = true) {
        sub->add_option("--config", common.config_path, "JSON config file");
        auto* out = sub->add_option("--out", common.out_dir, "output directory");
        if (needs_out) out->required();
        sub->add_option("--seed", common.seed_override, "master seed override")
            ->each([&common](const std::string&) { common.seed_set = true; });
        sub->add_option("--workers", common.workers_override, "worker count override");
    };

    // generate-encounters
    int gen_n = 2000;
    double gen_fraction = 0.5;
    bool gen_json = false;
    auto* gen = app.add_subcommand("generate-encounters",
                                   "sample a stratified encounter set");
    add_common(gen);
    gen->add_option("--n", gen_n, "number of encounters");
    gen->add_option("--nmac-fraction", gen_fraction, "nominal-NMAC fraction");
    gen->add_flag("--json", gen_json, "also write a JSON export");

    auto* dp = app.add_subcommand("solve-dp", "build the tabular MDP and run value iteration");
    add_common(dp);

    auto* tr = app.add_subcommand("train-dqn", "train one policy network");
    add_common(tr);

    std::string eval_policy, eval_set;
    bool eval_lookahead = false;
    int eval_trace = 0;
    auto* ev = app.add_subcommand("evaluate", "run a policy over an encounter set");
    add_common(ev);
    ev->add_option("--policy", eval_policy, "weights or qtable file")->required();
    ev->add_option("--set", eval_set, "encounter set file")->required();
    ev->add_flag("--lookahead", eval_lookahead, "enable the early-alert lookahead");
    ev->add_option("--trace", eval_trace, "write per-step traces for the first N encounters");

    std::string tune_set;
    auto* tu = app.add_subcommand("tune", "surrogate search over the reward parameters");
    add_common(tu);
    tu->add_option("--set", tune_set, "frozen evaluation set file")->required();

    std::string sweep_set, sweep_from, sweep_to, sweep_center, sweep_points;
    double sweep_radius = 0.0;
    int sweep_n = 6;
    auto* sw = app.add_subcommand("sweep", "evaluate hand-selected parameter points");
    add_common(sw);
    sw->add_option("--set", sweep_set, "frozen evaluation set file")->required();
    sw->add_option("--from", sweep_from, "sweep start point a1,a2,a3");
    sw->add_option("--to", sweep_to, "sweep end point b1,b2,b3");
    sw->add_option("--center", sweep_center, "local design center c1,c2,c3");
    sw->add_option("--radius", sweep_radius, "local design radius");
    sw->add_option("--n", sweep_n, "number of points");
    sw->add_option("--points", sweep_points, "file with one point per line");

    std::string rescore_ledger_path, rescore_weights;
    auto* rs = app.add_subcommand("rescore", "recompute ledger objectives under new weights");
    add_common(rs);
    rs->add_option("--ledger", rescore_ledger_path, "ledger file")->required();
    rs->add_option("--weights", rescore_weights, "weights w_nmac,w_alert,w_reversal");

    std::string plot_policy_path, plot_plane, plot_format;
    auto* pl = app.add_subcommand("plot-policy", "render the policy over intruder placements");
    add_common(pl);
    pl->add_option("--policy", plot_policy_path, "weights or qtable file")->required();
    pl->add_option("--plane", plot_plane, "horizontal or vertical");
    pl->add_option("--format", plot_format, "ppm, svg or csv");

    std::string bench_policy, bench_set;
    int bench_n = 100;
    auto* be = app.add_subcommand("bench", "per-encounter timing harness");
    add_common(be);
    be->add_option("--policy", bench_policy, "weights or qtable file")->required();
    be->add_option("--set", bench_set, "encounter set file")->required();
    be->add_option("--n", bench_n, "bulk encounter count");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (show_version) {
            std::cout << "catune " << kCatuneVersion
                      << " (formats: config 1, encounter_set 1, weights 1, qtable 1, "
                         "ledger 1)\n";
            return 0;
        }
        if (gen->parsed()) return cmd_generate(common, gen_n, gen_fraction, gen_json);
        if (dp->parsed()) return cmd_solve_dp(common);
        if (tr->parsed()) return cmd_train(common);
        if (ev->parsed())
            return cmd_evaluate(common, eval_policy, eval_set, eval_lookahead, eval_trace);
        if (tu->parsed()) return cmd_tune(common, tune_set);
        if (sw->parsed())
            return cmd_sweep(common, sweep_set, sweep_from, sweep_to, sweep_center,
                             sweep_radius, sweep_n, sweep_points);
        if (rs->parsed()) return cmd_rescore(common, rescore_ledger_path, rescore_weights);
        if (pl->parsed()) return cmd_plot(common, plot_policy_path, plot_plane, plot_format);
        if (be->parsed()) return cmd_bench(common, bench_policy, bench_set, bench_n);
        std::cout << app.help();
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const ConvergenceError& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return 6;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}

int dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return dispatch(args);
}

}  // namespace catune
