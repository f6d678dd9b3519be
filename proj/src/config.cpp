#include "catune/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>

#include "catune/errors.hpp"

namespace catune {

namespace {

using nlohmann::json;

constexpr double kDegToRad = 0.017453292519943295;

// Typed field extraction with path-qualified errors and unknown-key checks.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object())
            throw ConfigError("config: " + path_ + " must be a JSON object");
    }

    ~Section() = default;

    Section child(const char* key) {
        mark(key);
        if (!j_.contains(key)) return Section(empty_, path_ + "." + key);
        return Section(j_.at(key), path_ + "." + key);
    }

    template <typename T>
    void get(const char* key, T& out) {
        mark(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config: " + path_ + "." + key + " has the wrong type");
        }
    }

    void get_enum(const char* key, std::string& out) { get(key, out); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (seen_.find(it.key()) == seen_.end())
                throw ConfigError("config: unknown key " + path_ + "." + it.key());
    }

private:
    void mark(const char* key) { seen_.insert(key); }

    static const json empty_;
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

const json Section::empty_ = json::object();

GridMode mode_from_string(const std::string& s, const std::string& path) {
    if (s == "horizontal") return GridMode::Horizontal;
    if (s == "vertical") return GridMode::Vertical;
    if (s == "joint") return GridMode::Joint3d;
    throw ConfigError("config: " + path + " must be horizontal, vertical or joint");
}

std::string mode_to_string(GridMode m) {
    switch (m) {
        case GridMode::Horizontal: return "horizontal";
        case GridMode::Vertical: return "vertical";
        case GridMode::Joint3d: return "joint";
    }
    return "horizontal";
}

}  // namespace

GridSpec RunConfig::dp_grid() const {
    GridSpec grid;
    switch (dp.mode) {
        case GridMode::Horizontal: grid = GridSpec::horizontal_default(); break;
        case GridMode::Vertical: grid = GridSpec::vertical_default(); break;
        case GridMode::Joint3d: grid = GridSpec::joint_small(); break;
    }
    for (int d = 0; d < 3; ++d)
        grid.dims[static_cast<std::size_t>(d)].bins = dp.bins[static_cast<std::size_t>(d)];
    return grid;
}

DqnConfig RunConfig::dqn_for_seed(std::uint64_t seed) const {
    DqnConfig cfg = dqn;
    cfg.seed = seed;
    cfg.reward_params = reward;
    return cfg;
}

TuneConfig RunConfig::tune_config(const std::string& ledger_path) const {
    TuneConfig cfg;
    cfg.init_points = tuner.init_points;
    cfg.budget = tuner.budget;
    cfg.master_seed = master_seed;
    cfg.targets = evaluator.targets;
    cfg.weights = evaluator.weights;
    cfg.gp = tuner.gp;
    cfg.stability_threshold = evaluator.stability_threshold;
    cfg.candidate_count = tuner.candidate_count;
    cfg.ledger_path = ledger_path;
    return cfg;
}

void RunConfig::validate() const {
    if (workers < 1) throw ConfigError("config: workers must be >= 1");
    try {
        encounter.validate();
        reward.validate();
        {
            DqnConfig c = dqn;
            c.reward_params = reward;
            c.validate();
        }
        dp_grid().validate();
        if (!(dp.tol > 0.0)) throw ValidationError("dp tolerance must be > 0");
        if (dp.max_sweeps < 1) throw ValidationError("dp max_sweeps must be >= 1");
        if (dp.samples_per_cell < 1) throw ValidationError("dp samples_per_cell must be >= 1");
        if (!(dp.gamma > 0.0 && dp.gamma < 1.0))
            throw ValidationError("dp gamma must lie in (0, 1)");
        evaluator.targets.validate();
        evaluator.weights.validate();
        if (!(evaluator.stability_threshold > 0.0))
            throw ValidationError("stability threshold must be > 0");
        tune_config("").validate();
        plot.validate();
        if (lookahead.steps < 1) throw ValidationError("lookahead steps must be >= 1");
    } catch (const ValidationError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: document is not valid JSON: ") + e.what());
    }

    RunConfig c;
    Section root(doc, "$");
    root.get("master_seed", c.master_seed);
    root.get("workers", c.workers);

    {
        auto s = root.child("encounter");
        s.get("speed_min", c.encounter.speed_min);
        s.get("speed_max", c.encounter.speed_max);
        s.get("vz_min", c.encounter.vz_min);
        s.get("vz_max", c.encounter.vz_max);
        s.get("alt_min", c.encounter.alt_min);
        s.get("alt_max", c.encounter.alt_max);
        s.get("duration_steps", c.encounter.duration_steps);
        s.get("dt", c.encounter.dt);
        s.get("nmac_fraction", c.encounter.nmac_fraction);
        s.get("tcpa_min", c.encounter.tcpa_min);
        s.get("tcpa_max", c.encounter.tcpa_max);
        s.get("annulus_min_scale", c.encounter.annulus_min_scale);
        s.get("annulus_max_scale", c.encounter.annulus_max_scale);
        s.get("avg_action_len", c.encounter.avg_action_len);
        s.get("avg_clear_len", c.encounter.avg_clear_len);
        s.get("max_attempts", c.encounter.max_attempts);
        s.finish();
    }
    {
        auto s = root.child("dynamics");
        double turn_deg = c.encounter.dynamics.turn_rate_cmd / kDegToRad;
        double slew_deg = c.encounter.dynamics.turn_slew / kDegToRad;
        s.get("turn_rate_cmd_deg_s", turn_deg);
        s.get("turn_slew_deg_s2", slew_deg);
        c.encounter.dynamics.turn_rate_cmd = turn_deg * kDegToRad;
        c.encounter.dynamics.turn_slew = slew_deg * kDegToRad;
        s.get("vz_cmd_fpm", c.encounter.dynamics.vz_cmd);
        s.get("vz_slew_fpm_s", c.encounter.dynamics.vz_slew);
        s.get("nmac_horizontal_ft", c.encounter.dynamics.nmac_horizontal);
        s.get("nmac_vertical_ft", c.encounter.dynamics.nmac_vertical);
        s.get("nmac_terminal", c.encounter.dynamics.nmac_terminal);
        s.finish();
    }
    {
        auto s = root.child("lookahead");
        s.get("enabled", c.lookahead.enabled);
        s.get("steps", c.lookahead.steps);
        s.finish();
    }
    {
        auto s = root.child("reward");
        s.get("alert_cost", c.reward.alert_cost);
        s.get("reversal_cost", c.reward.reversal_cost);
        s.get("cease_alert_cost", c.reward.cease_alert_cost);
        s.finish();
    }
    {
        auto s = root.child("dqn");
        s.get("hidden", c.dqn.hidden);
        s.get("episodes", c.dqn.episodes);
        s.get("batch_size", c.dqn.batch_size);
        s.get("gamma", c.dqn.gamma);
        s.get("epsilon_start", c.dqn.epsilon.start);
        s.get("epsilon_end", c.dqn.epsilon.end);
        s.get("epsilon_decay_steps", c.dqn.epsilon.decay_steps);
        s.get("target_sync_interval", c.dqn.target_sync_interval);
        s.get("replay_capacity", c.dqn.replay_capacity);
        s.get("min_fill", c.dqn.min_fill);
        s.get("lr", c.dqn.adam.lr);
        s.get("beta1", c.dqn.adam.beta1);
        s.get("beta2", c.dqn.adam.beta2);
        s.get("adam_eps", c.dqn.adam.eps);
        s.finish();
    }
    {
        auto s = root.child("dp");
        std::string mode = mode_to_string(c.dp.mode);
        s.get_enum("mode", mode);
        c.dp.mode = mode_from_string(mode, "$.dp.mode");
        s.get("bins", c.dp.bins);
        s.get("tol", c.dp.tol);
        s.get("max_sweeps", c.dp.max_sweeps);
        s.get("samples_per_cell", c.dp.samples_per_cell);
        s.get("nominal_speed", c.dp.nominal_speed);
        s.get("nominal_alt", c.dp.nominal_alt);
        s.get("gamma", c.dp.gamma);
        s.finish();
    }
    {
        auto s = root.child("evaluator");
        {
            auto t = s.child("targets");
            t.get("p_nmac", c.evaluator.targets.p_nmac);
            t.get("p_alert", c.evaluator.targets.p_alert);
            t.get("p_reversal", c.evaluator.targets.p_reversal);
            t.finish();
        }
        {
            auto w = s.child("weights");
            w.get("nmac", c.evaluator.weights.nmac);
            w.get("alert", c.evaluator.weights.alert);
            w.get("reversal", c.evaluator.weights.reversal);
            w.finish();
        }
        s.get("stability_threshold", c.evaluator.stability_threshold);
        s.finish();
    }
    {
        auto s = root.child("tuner");
        s.get("init_points", c.tuner.init_points);
        s.get("budget", c.tuner.budget);
        {
            auto g = s.child("gp");
            g.get("length_scale", c.tuner.gp.length_scale);
            g.get("signal_var", c.tuner.gp.signal_var);
            g.get("noise_var", c.tuner.gp.noise_var);
            g.finish();
        }
        s.get("candidate_count", c.tuner.candidate_count);
        s.finish();
    }
    {
        auto s = root.child("plot");
        std::string plane = c.plot.plane == PlotPlane::Horizontal ? "horizontal" : "vertical";
        s.get_enum("plane", plane);
        if (plane == "horizontal")
            c.plot.plane = PlotPlane::Horizontal;
        else if (plane == "vertical")
            c.plot.plane = PlotPlane::Vertical;
        else
            throw ConfigError("config: $.plot.plane must be horizontal or vertical");
        s.get("nx", c.plot.nx);
        s.get("ny", c.plot.ny);
        s.get("x_min", c.plot.x_min);
        s.get("x_max", c.plot.x_max);
        s.get("y_min", c.plot.y_min);
        s.get("y_max", c.plot.y_max);
        s.get("fixed_rel_alt", c.plot.fixed_rel_alt);
        s.get("fixed_bearing", c.plot.fixed_bearing);
        s.get("intruder_heading", c.plot.intruder_heading);
        s.get("own_speed", c.plot.own_speed);
        s.get("intruder_speed", c.plot.intruder_speed);
        s.get("own_alt", c.plot.own_alt);
        s.get("own_vz", c.plot.own_vz);
        s.get("intruder_vz", c.plot.intruder_vz);
        std::string format = c.plot.format == PlotFormat::Ppm   ? "ppm"
                             : c.plot.format == PlotFormat::Svg ? "svg"
                                                                : "csv";
        s.get_enum("format", format);
        if (format == "ppm")
            c.plot.format = PlotFormat::Ppm;
        else if (format == "svg")
            c.plot.format = PlotFormat::Svg;
        else if (format == "csv")
            c.plot.format = PlotFormat::Csv;
        else
            throw ConfigError("config: $.plot.format must be ppm, svg or csv");
        s.finish();
    }
    root.finish();

    c.validate();
    return c;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

std::string serialize_config(const RunConfig& c) {
    json doc;
    doc["master_seed"] = c.master_seed;
    doc["workers"] = c.workers;
    doc["encounter"] = {{"speed_min", c.encounter.speed_min},
                        {"speed_max", c.encounter.speed_max},
                        {"vz_min", c.encounter.vz_min},
                        {"vz_max", c.encounter.vz_max},
                        {"alt_min", c.encounter.alt_min},
                        {"alt_max", c.encounter.alt_max},
                        {"duration_steps", c.encounter.duration_steps},
                        {"dt", c.encounter.dt},
                        {"nmac_fraction", c.encounter.nmac_fraction},
                        {"tcpa_min", c.encounter.tcpa_min},
                        {"tcpa_max", c.encounter.tcpa_max},
                        {"annulus_min_scale", c.encounter.annulus_min_scale},
                        {"annulus_max_scale", c.encounter.annulus_max_scale},
                        {"avg_action_len", c.encounter.avg_action_len},
                        {"avg_clear_len", c.encounter.avg_clear_len},
                        {"max_attempts", c.encounter.max_attempts}};
    doc["dynamics"] = {{"turn_rate_cmd_deg_s", c.encounter.dynamics.turn_rate_cmd / kDegToRad},
                       {"turn_slew_deg_s2", c.encounter.dynamics.turn_slew / kDegToRad},
                       {"vz_cmd_fpm", c.encounter.dynamics.vz_cmd},
                       {"vz_slew_fpm_s", c.encounter.dynamics.vz_slew},
                       {"nmac_horizontal_ft", c.encounter.dynamics.nmac_horizontal},
                       {"nmac_vertical_ft", c.encounter.dynamics.nmac_vertical},
                       {"nmac_terminal", c.encounter.dynamics.nmac_terminal}};
    doc["lookahead"] = {{"enabled", c.lookahead.enabled}, {"steps", c.lookahead.steps}};
    doc["reward"] = {{"alert_cost", c.reward.alert_cost},
                     {"reversal_cost", c.reward.reversal_cost},
                     {"cease_alert_cost", c.reward.cease_alert_cost}};
    doc["dqn"] = {{"hidden", c.dqn.hidden},
                  {"episodes", c.dqn.episodes},
                  {"batch_size", c.dqn.batch_size},
                  {"gamma", c.dqn.gamma},
                  {"epsilon_start", c.dqn.epsilon.start},
                  {"epsilon_end", c.dqn.epsilon.end},
                  {"epsilon_decay_steps", c.dqn.epsilon.decay_steps},
                  {"target_sync_interval", c.dqn.target_sync_interval},
                  {"replay_capacity", c.dqn.replay_capacity},
                  {"min_fill", c.dqn.min_fill},
                  {"lr", c.dqn.adam.lr},
                  {"beta1", c.dqn.adam.beta1},
                  {"beta2", c.dqn.adam.beta2},
                  {"adam_eps", c.dqn.adam.eps}};
    doc["dp"] = {{"mode", mode_to_string(c.dp.mode)},
                 {"bins", c.dp.bins},
                 {"tol", c.dp.tol},
                 {"max_sweeps", c.dp.max_sweeps},
                 {"samples_per_cell", c.dp.samples_per_cell},
                 {"nominal_speed", c.dp.nominal_speed},
                 {"nominal_alt", c.dp.nominal_alt},
                 {"gamma", c.dp.gamma}};
    doc["evaluator"] = {{"targets",
                         {{"p_nmac", c.evaluator.targets.p_nmac},
                          {"p_alert", c.evaluator.targets.p_alert},
                          {"p_reversal", c.evaluator.targets.p_reversal}}},
                        {"weights",
                         {{"nmac", c.evaluator.weights.nmac},
                          {"alert", c.evaluator.weights.alert},
                          {"reversal", c.evaluator.weights.reversal}}},
                        {"stability_threshold", c.evaluator.stability_threshold}};
    doc["tuner"] = {{"init_points", c.tuner.init_points},
                    {"budget", c.tuner.budget},
                    {"gp",
                     {{"length_scale", c.tuner.gp.length_scale},
                      {"signal_var", c.tuner.gp.signal_var},
                      {"noise_var", c.tuner.gp.noise_var}}},
                    {"candidate_count", c.tuner.candidate_count}};
    doc["plot"] = {{"plane", c.plot.plane == PlotPlane::Horizontal ? "horizontal" : "vertical"},
                   {"nx", c.plot.nx},
                   {"ny", c.plot.ny},
                   {"x_min", c.plot.x_min},
                   {"x_max", c.plot.x_max},
                   {"y_min", c.plot.y_min},
                   {"y_max", c.plot.y_max},
                   {"fixed_rel_alt", c.plot.fixed_rel_alt},
                   {"fixed_bearing", c.plot.fixed_bearing},
                   {"intruder_heading", c.plot.intruder_heading},
                   {"own_speed", c.plot.own_speed},
                   {"intruder_speed", c.plot.intruder_speed},
                   {"own_alt", c.plot.own_alt},
                   {"own_vz", c.plot.own_vz},
                   {"intruder_vz", c.plot.intruder_vz},
                   {"format", c.plot.format == PlotFormat::Ppm   ? "ppm"
                              : c.plot.format == PlotFormat::Svg ? "svg"
                                                                 : "csv"}};
    return doc.dump(2) + "\n";
}

}  // namespace catune
