#include "catune/tuner.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "catune/binio.hpp"
#include "catune/errors.hpp"

namespace catune {

namespace {

constexpr double kBoxLo = -1.0;
constexpr double kBoxHi = 0.0;

double clamp_box(double v) { return std::clamp(v, kBoxLo, kBoxHi); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730951); }
double norm_pdf(double z) { return std::exp(-0.5 * z * z) / 2.5066282746310002; }

std::array<double, 3> normalize_point(const ParamPoint& p) {
    return {p.alert - kBoxLo, p.reversal - kBoxLo, p.cease_alert - kBoxLo};
}

}  // namespace

void ParamPoint::validate() const {
    auto in_box = [](double v) { return v >= kBoxLo && v <= kBoxHi && std::isfinite(v); };
    if (!in_box(alert) || !in_box(reversal) || !in_box(cease_alert))
        throw ValidationError("reward parameters must lie in [-1, 0]");
}

RewardParams ParamPoint::to_reward_params() const {
    validate();
    RewardParams params;
    params.alert_cost = alert;
    params.reversal_cost = reversal;
    params.cease_alert_cost = cease_alert;
    params.nmac_cost = -1.0;
    return params;
}

std::vector<std::vector<double>> latin_hypercube(int n, int dims, Rng& rng) {
    if (n < 1 || dims < 1) throw ValidationError("latin hypercube needs n >= 1 and dims >= 1");
    std::vector<std::vector<double>> pts(static_cast<std::size_t>(n),
                                         std::vector<double>(static_cast<std::size_t>(dims)));
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int d = 0; d < dims; ++d) {
        for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
        for (int i = n - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(i + 1)));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
        for (int i = 0; i < n; ++i) {
            const double u = rng.uniform();
            pts[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] =
                (perm[static_cast<std::size_t>(i)] + u) / n;
        }
    }
    return pts;
}

ParamPoint unit_to_box(const std::vector<double>& unit) {
    if (unit.size() != 3) throw ContractError("unit_to_box expects three coordinates");
    ParamPoint p;
    p.alert = clamp_box(kBoxLo + unit[0]);
    p.reversal = clamp_box(kBoxLo + unit[1]);
    p.cease_alert = clamp_box(kBoxLo + unit[2]);
    return p;
}

void GpConfig::validate() const {
    if (!(length_scale > 0.0) || !(signal_var > 0.0) || !(noise_var > 0.0))
        throw ValidationError("gp hyperparameters must be > 0");
}

double GpSurrogate::kernel(const std::array<double, 3>& a,
                           const std::array<double, 3>& b) const {
    double d2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double d = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
        d2 += d * d;
    }
    return cfg_.signal_var * std::exp(-d2 / (2.0 * cfg_.length_scale * cfg_.length_scale));
}

GpSurrogate gp_fit(const std::vector<ParamPoint>& points,
                   const std::vector<double>& objectives,
                   const std::vector<double>& noise_scales, const GpConfig& config) {
    config.validate();
    if (points.size() != objectives.size())
        throw ContractError("gp_fit: points and objectives must align");
    if (!noise_scales.empty() && noise_scales.size() != points.size())
        throw ContractError("gp_fit: noise scale vector must align with points");
    if (points.size() < 2) throw ValidationError("gp_fit needs at least two points");

    GpSurrogate gp;
    gp.cfg_ = config;

    // merge exact duplicates by averaging their objectives
    std::vector<double> y;
    std::vector<double> noise;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto xi = normalize_point(points[i]);
        const double scale_i = noise_scales.empty() ? 1.0 : noise_scales[i];
        bool merged = false;
        for (std::size_t j = 0; j < gp.x_.size(); ++j) {
            double d2 = 0.0;
            for (int d = 0; d < 3; ++d) {
                const double dd = gp.x_[j][static_cast<std::size_t>(d)] -
                                  xi[static_cast<std::size_t>(d)];
                d2 += dd * dd;
            }
            if (d2 < 1e-24) {
                y[j] = 0.5 * (y[j] + objectives[i]);
                noise[j] = std::max(noise[j], scale_i);
                ++gp.merged_;
                merged = true;
                break;
            }
        }
        if (!merged) {
            gp.x_.push_back(xi);
            y.push_back(objectives[i]);
            noise.push_back(scale_i);
        }
    }

    const int n = static_cast<int>(gp.x_.size());
    gp.best_ = *std::min_element(y.begin(), y.end());

    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    var /= n;
    gp.y_mean_ = mean;
    gp.y_std_ = var > 0.0 ? std::sqrt(var) : 1.0;

    Eigen::MatrixXd k(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            k(i, j) = gp.kernel(gp.x_[static_cast<std::size_t>(i)],
                                gp.x_[static_cast<std::size_t>(j)]);
    for (int i = 0; i < n; ++i)
        k(i, i) += config.noise_var * noise[static_cast<std::size_t>(i)];

    Eigen::VectorXd ys(n);
    for (int i = 0; i < n; ++i)
        ys(i) = (y[static_cast<std::size_t>(i)] - gp.y_mean_) / gp.y_std_;

    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::MatrixXd kj = k;
        if (jitter > 0.0) kj.diagonal().array() += jitter;
        llt.compute(kj);
        if (llt.info() == Eigen::Success) {
            const Eigen::VectorXd alpha = llt.solve(ys);
            gp.alpha_.assign(alpha.data(), alpha.data() + n);
            const Eigen::MatrixXd l = llt.matrixL();
            gp.chol_.resize(static_cast<std::size_t>(n) * n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    gp.chol_[static_cast<std::size_t>(i) * n + j] = l(i, j);
            return gp;
        }
        jitter = jitter == 0.0 ? 1e-10 * k.trace() / n : jitter * 10.0;
    }
    throw NumericError("gp_fit: kernel matrix not positive definite after jitter escalation");
}

GpSurrogate::Prediction GpSurrogate::predict(const ParamPoint& p) const {
    const int n = static_cast<int>(x_.size());
    if (n == 0) throw ContractError("predict on an unfitted surrogate");
    const auto xs = normalize_point(p);

    Eigen::VectorXd ks(n);
    for (int i = 0; i < n; ++i) ks(i) = kernel(x_[static_cast<std::size_t>(i)], xs);

    double mean_std = 0.0;
    for (int i = 0; i < n; ++i) mean_std += ks(i) * alpha_[static_cast<std::size_t>(i)];

    // solve L v = k* by forward substitution
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
        double acc = ks(i);
        for (int j = 0; j < i; ++j)
            acc -= chol_[static_cast<std::size_t>(i) * n + j] * v(j);
        v(i) = acc / chol_[static_cast<std::size_t>(i) * n + i];
    }
    double var_std = cfg_.signal_var - v.squaredNorm();
    if (var_std < 0.0) var_std = 0.0;

    Prediction out;
    out.mean = y_mean_ + y_std_ * mean_std;
    out.var = y_std_ * y_std_ * var_std;
    return out;
}

double expected_improvement(double mean, double std, double best) {
    if (std < 0.0) throw ContractError("expected_improvement: negative std");
    const double gap = best - mean;
    if (std == 0.0) return std::max(gap, 0.0);
    const double z = gap / std;
    return gap * norm_cdf(z) + std * norm_pdf(z);
}

SelectResult select_next(const GpSurrogate& surrogate, Rng& rng, int candidates) {
    if (candidates < 1) throw ValidationError("select_next needs at least one candidate");
    const double best = surrogate.best_objective();

    auto ei_at = [&](const ParamPoint& p) {
        const auto pred = surrogate.predict(p);
        return expected_improvement(pred.mean, std::sqrt(pred.var), best);
    };

    const auto design = latin_hypercube(candidates, 3, rng);
    std::vector<std::pair<double, ParamPoint>> scored;
    scored.reserve(design.size());
    double max_var = -1.0;
    ParamPoint max_var_point;
    for (const auto& u : design) {
        const ParamPoint p = unit_to_box(u);
        const auto pred = surrogate.predict(p);
        const double ei = expected_improvement(pred.mean, std::sqrt(pred.var), best);
        scored.emplace_back(ei, p);
        if (pred.var > max_var) {
            max_var = pred.var;
            max_var_point = p;
        }
    }
    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    // deterministic pattern refinement from the best starts
    const int starts = std::min<std::size_t>(8, scored.size());
    double best_ei = 0.0;
    ParamPoint best_point = scored.front().second;
    for (int s = 0; s < starts; ++s) {
        ParamPoint p = scored[static_cast<std::size_t>(s)].second;
        double ei = scored[static_cast<std::size_t>(s)].first;
        double step = 0.125;
        while (step > 1e-4) {
            bool improved = false;
            auto coords = p.as_array();
            for (int d = 0; d < 3; ++d) {
                for (const double dir : {+1.0, -1.0}) {
                    auto trial = coords;
                    trial[static_cast<std::size_t>(d)] =
                        clamp_box(trial[static_cast<std::size_t>(d)] + dir * step);
                    const ParamPoint tp = ParamPoint::from_array(trial);
                    const double tei = ei_at(tp);
                    if (tei > ei) {
                        ei = tei;
                        p = tp;
                        coords = trial;
                        improved = true;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        if (ei > best_ei) {
            best_ei = ei;
            best_point = p;
        }
    }

    SelectResult res;
    if (best_ei <= 1e-15) {
        res.point = max_var_point;
        res.ei = 0.0;
        res.exhausted = true;
    } else {
        res.point = best_point;
        res.ei = best_ei;
    }
    return res;
}

std::vector<ParamPoint> linear_sweep(const ParamPoint& a, const ParamPoint& b, int n) {
    if (n < 1) throw ValidationError("linear_sweep needs n >= 1");
    a.validate();
    b.validate();
    std::vector<ParamPoint> out;
    out.reserve(static_cast<std::size_t>(n));
    const auto av = a.as_array();
    const auto bv = b.as_array();
    for (int k = 1; k <= n; ++k) {
        const double t = static_cast<double>(k) / (n + 1);
        std::array<double, 3> p;
        for (int d = 0; d < 3; ++d)
            p[static_cast<std::size_t>(d)] =
                av[static_cast<std::size_t>(d)] +
                t * (bv[static_cast<std::size_t>(d)] - av[static_cast<std::size_t>(d)]);
        out.push_back(ParamPoint::from_array(p));
    }
    return out;
}

std::vector<ParamPoint> local_lhs(const ParamPoint& center, const std::array<double, 3>& radius,
                                  int n, Rng& rng) {
    center.validate();
    for (double r : radius)
        if (!(r > 0.0)) throw ValidationError("local_lhs radius must be > 0 per dimension");
    const auto c = center.as_array();
    std::array<double, 3> lo, hi;
    for (int d = 0; d < 3; ++d) {
        lo[static_cast<std::size_t>(d)] =
            std::max(kBoxLo, c[static_cast<std::size_t>(d)] - radius[static_cast<std::size_t>(d)]);
        hi[static_cast<std::size_t>(d)] =
            std::min(kBoxHi, c[static_cast<std::size_t>(d)] + radius[static_cast<std::size_t>(d)]);
        if (!(hi[static_cast<std::size_t>(d)] > lo[static_cast<std::size_t>(d)]))
            throw ValidationError("local_lhs region degenerate in dimension " +
                                  std::to_string(d));
    }
    const auto design = latin_hypercube(n, 3, rng);
    std::vector<ParamPoint> out;
    out.reserve(design.size());
    for (const auto& u : design) {
        std::array<double, 3> p;
        for (int d = 0; d < 3; ++d)
            p[static_cast<std::size_t>(d)] =
                lo[static_cast<std::size_t>(d)] +
                u[static_cast<std::size_t>(d)] *
                    (hi[static_cast<std::size_t>(d)] - lo[static_cast<std::size_t>(d)]);
        out.push_back(ParamPoint::from_array(p));
    }
    return out;
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::LhsInit: return "LHS_INIT";
        case Provenance::Ei: return "EI";
        case Provenance::LinearSweep: return "LINEAR_SWEEP";
        case Provenance::LocalLhs: return "LOCAL_LHS";
        case Provenance::Manual: return "MANUAL";
    }
    return "MANUAL";
}

std::string to_string(IterationStatus s) {
    return s == IterationStatus::Ok ? "OK" : "FAILED";
}

namespace {

Provenance provenance_from_string(const std::string& s) {
    if (s == "LHS_INIT") return Provenance::LhsInit;
    if (s == "EI") return Provenance::Ei;
    if (s == "LINEAR_SWEEP") return Provenance::LinearSweep;
    if (s == "LOCAL_LHS") return Provenance::LocalLhs;
    if (s == "MANUAL") return Provenance::Manual;
    throw ParseError("unknown provenance tag: " + s);
}

nlohmann::json metrics_to_json(const EvalMetrics& m) {
    return {{"p_nmac", m.p_nmac},
            {"p_alert", m.p_alert},
            {"p_reversal", m.p_reversal},
            {"encounter_count", m.encounter_count},
            {"nmac_count", m.nmac_count},
            {"alert_count", m.alert_count},
            {"reversal_count", m.reversal_count}};
}

EvalMetrics metrics_from_json(const nlohmann::json& j) {
    EvalMetrics m;
    m.p_nmac = j.at("p_nmac").get<double>();
    m.p_alert = j.at("p_alert").get<double>();
    m.p_reversal = j.at("p_reversal").get<double>();
    m.encounter_count = j.at("encounter_count").get<long long>();
    m.nmac_count = j.at("nmac_count").get<long long>();
    m.alert_count = j.at("alert_count").get<long long>();
    m.reversal_count = j.at("reversal_count").get<long long>();
    return m;
}

nlohmann::json config_to_json(const TuneConfig& c) {
    return {{"init_points", c.init_points},
            {"budget", c.budget},
            {"master_seed", c.master_seed},
            {"targets",
             {{"p_nmac", c.targets.p_nmac},
              {"p_alert", c.targets.p_alert},
              {"p_reversal", c.targets.p_reversal}}},
            {"weights",
             {{"nmac", c.weights.nmac},
              {"alert", c.weights.alert},
              {"reversal", c.weights.reversal}}},
            {"gp",
             {{"length_scale", c.gp.length_scale},
              {"signal_var", c.gp.signal_var},
              {"noise_var", c.gp.noise_var}}},
            {"stability_threshold", c.stability_threshold},
            {"candidate_count", c.candidate_count}};
}

TuneConfig config_from_json(const nlohmann::json& j) {
    TuneConfig c;
    c.init_points = j.at("init_points").get<int>();
    c.budget = j.at("budget").get<int>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.targets.p_nmac = j.at("targets").at("p_nmac").get<double>();
    c.targets.p_alert = j.at("targets").at("p_alert").get<double>();
    c.targets.p_reversal = j.at("targets").at("p_reversal").get<double>();
    c.weights.nmac = j.at("weights").at("nmac").get<double>();
    c.weights.alert = j.at("weights").at("alert").get<double>();
    c.weights.reversal = j.at("weights").at("reversal").get<double>();
    c.gp.length_scale = j.at("gp").at("length_scale").get<double>();
    c.gp.signal_var = j.at("gp").at("signal_var").get<double>();
    c.gp.noise_var = j.at("gp").at("noise_var").get<double>();
    c.stability_threshold = j.at("stability_threshold").get<double>();
    c.candidate_count = j.at("candidate_count").get<int>();
    return c;
}

nlohmann::json iteration_to_json(const TuningIteration& it) {
    nlohmann::json j;
    j["type"] = "iteration";
    j["id"] = it.id;
    j["point"] = {it.point.alert, it.point.reversal, it.point.cease_alert};
    j["provenance"] = to_string(it.provenance);
    j["status"] = to_string(it.status);
    if (!it.message.empty()) j["message"] = it.message;
    if (it.status == IterationStatus::Ok) {
        j["models"] = {metrics_to_json(it.models[0]), metrics_to_json(it.models[1]),
                       metrics_to_json(it.models[2])};
        j["model_objectives"] = it.model_objectives;
        j["best_model"] = it.best_model;
        j["best"] = metrics_to_json(it.best);
        j["alert_variance"] = it.alert_var;
        j["stable"] = it.stable;
        j["objective"] = it.objective;
    }
    j["seeds"] = it.seeds;
    return j;
}

TuningIteration iteration_from_json(const nlohmann::json& j) {
    TuningIteration it;
    it.id = j.at("id").get<int>();
    const auto& pt = j.at("point");
    it.point.alert = pt.at(0).get<double>();
    it.point.reversal = pt.at(1).get<double>();
    it.point.cease_alert = pt.at(2).get<double>();
    it.provenance = provenance_from_string(j.at("provenance").get<std::string>());
    const std::string status = j.at("status").get<std::string>();
    it.status = status == "OK" ? IterationStatus::Ok : IterationStatus::Failed;
    if (j.contains("message")) it.message = j.at("message").get<std::string>();
    if (it.status == IterationStatus::Ok) {
        for (int i = 0; i < 3; ++i)
            it.models[static_cast<std::size_t>(i)] =
                metrics_from_json(j.at("models").at(static_cast<std::size_t>(i)));
        const auto& mo = j.at("model_objectives");
        for (int i = 0; i < 3; ++i)
            it.model_objectives[static_cast<std::size_t>(i)] =
                mo.at(static_cast<std::size_t>(i)).get<double>();
        it.best_model = j.at("best_model").get<int>();
        it.best = metrics_from_json(j.at("best"));
        it.alert_var = j.at("alert_variance").get<double>();
        it.stable = j.at("stable").get<bool>();
        it.objective = j.at("objective").get<double>();
    }
    const auto& seeds = j.at("seeds");
    for (int i = 0; i < 3; ++i)
        it.seeds[static_cast<std::size_t>(i)] =
            seeds.at(static_cast<std::size_t>(i)).get<std::uint64_t>();
    return it;
}

TuningIteration build_iteration(const TuneConfig& config, int id, const ParamPoint& point,
                                Provenance provenance,
                                const std::array<std::uint64_t, 3>& seeds,
                                const PointOutcome& outcome) {
    TuningIteration it;
    it.id = id;
    it.point = point;
    it.provenance = provenance;
    it.seeds = seeds;
    if (outcome.failed) {
        it.status = IterationStatus::Failed;
        it.message = outcome.message;
        return it;
    }
    it.models = outcome.models;
    for (int i = 0; i < 3; ++i)
        it.model_objectives[static_cast<std::size_t>(i)] =
            objective(outcome.models[static_cast<std::size_t>(i)], config.targets,
                      config.weights)
                .value;
    it.best_model = 0;
    for (int i = 1; i < 3; ++i)
        if (it.model_objectives[static_cast<std::size_t>(i)] <
            it.model_objectives[static_cast<std::size_t>(it.best_model)])
            it.best_model = i;
    it.best = it.models[static_cast<std::size_t>(it.best_model)];
    it.objective = it.model_objectives[static_cast<std::size_t>(it.best_model)];
    it.alert_var = alert_variance({outcome.models[0].p_alert, outcome.models[1].p_alert,
                                   outcome.models[2].p_alert});
    it.stable = it.alert_var <= config.stability_threshold;
    return it;
}

std::array<std::uint64_t, 3> seeds_for(std::uint64_t master_seed, int iteration) {
    std::array<std::uint64_t, 3> seeds{};
    for (int r = 0; r < 3; ++r)
        seeds[static_cast<std::size_t>(r)] =
            derive_seed(master_seed, static_cast<std::uint64_t>(iteration),
                        static_cast<std::uint64_t>(r));
    return seeds;
}

// GP training view of the ledger: OK iterations, unstable points with
// noise inflated by (1 + variance / threshold).
void gp_training_data(const TuningLedger& ledger, std::vector<ParamPoint>& points,
                      std::vector<double>& objectives, std::vector<double>& noise) {
    points.clear();
    objectives.clear();
    noise.clear();
    for (const auto& it : ledger.iterations) {
        if (it.status != IterationStatus::Ok) continue;
        points.push_back(it.point);
        objectives.push_back(it.objective);
        noise.push_back(it.stable
                            ? 1.0
                            : 1.0 + it.alert_var / ledger.config.stability_threshold);
    }
}

TuningIteration run_one(const TuneConfig& config, int id, const ParamPoint& point,
                        Provenance provenance, const PointEvaluator& evaluate_point) {
    const auto seeds = seeds_for(config.master_seed, id);
    PointOutcome outcome;
    try {
        outcome = evaluate_point(point, id, seeds);
    } catch (const std::exception& e) {
        outcome.failed = true;
        outcome.message = e.what();
    }
    return build_iteration(config, id, point, provenance, seeds, outcome);
}

void persist(const TuningLedger& ledger) {
    if (!ledger.config.ledger_path.empty()) save_ledger(ledger, ledger.config.ledger_path);
}

TuningLedger open_or_create_ledger(const TuneConfig& config) {
    if (!config.ledger_path.empty() && std::filesystem::exists(config.ledger_path)) {
        TuningLedger ledger = load_ledger(config.ledger_path);
        const auto stored = config_to_json(ledger.config);
        const auto wanted = config_to_json(config);
        if (stored != wanted)
            throw ConfigError("existing ledger at " + config.ledger_path +
                              " was produced with a different tuning config");
        ledger.config.ledger_path = config.ledger_path;
        return ledger;
    }
    TuningLedger ledger;
    ledger.config = config;
    return ledger;
}

}  // namespace

void TuneConfig::validate() const {
    if (init_points < 1) throw ValidationError("tune: init_points must be >= 1");
    if (budget < 0) throw ValidationError("tune: budget must be >= 0");
    targets.validate();
    weights.validate();
    gp.validate();
    if (!(stability_threshold > 0.0))
        throw ValidationError("tune: stability threshold must be > 0");
    if (candidate_count < 1) throw ValidationError("tune: candidate_count must be >= 1");
}

const TuningIteration* TuningLedger::best_stable() const {
    const TuningIteration* best = nullptr;
    for (const auto& it : iterations) {
        if (it.status != IterationStatus::Ok || !it.stable) continue;
        if (!best || it.objective < best->objective) best = &it;
    }
    return best;
}

const TuningIteration* TuningLedger::best_any() const {
    const TuningIteration* best = nullptr;
    for (const auto& it : iterations) {
        if (it.status != IterationStatus::Ok) continue;
        if (!best || it.objective < best->objective) best = &it;
    }
    return best;
}

PointEvaluator make_training_evaluator(const DqnConfig& base_config, const TrainEnv& env,
                                       const EncounterSet& eval_set,
                                       const LookaheadConfig& lookahead, int eval_workers) {
    if (eval_set.specs.empty())
        throw ValidationError("training evaluator needs a nonempty evaluation set");
    return [base_config, env, eval_set, lookahead, eval_workers](
               const ParamPoint& point, int /*iteration*/,
               const std::array<std::uint64_t, 3>& seeds) {
        DqnConfig cfg = base_config;
        cfg.reward_params = point.to_reward_params();
        const auto trained = train_triplicate(cfg, seeds, env);

        PointOutcome outcome;
        // the three evaluations run in series; each may fan over workers
        for (int i = 0; i < 3; ++i) {
            const auto policy = mlp_policy(trained[static_cast<std::size_t>(i)].weights);
            outcome.models[static_cast<std::size_t>(i)] =
                evaluate(policy, eval_set, cfg.reward_params, lookahead, eval_workers);
        }
        return outcome;
    };
}

TuningLedger tune(const TuneConfig& config, const PointEvaluator& evaluate_point) {
    config.validate();
    if (!evaluate_point) throw ContractError("tune: point evaluator missing");

    TuningLedger ledger = open_or_create_ledger(config);
    const int total = config.init_points + config.budget;
    if (static_cast<int>(ledger.iterations.size()) > total)
        throw ConfigError("ledger already holds more iterations than the configured budget");

    Rng lhs_rng(derive_seed(config.master_seed, 0x14F5));
    const auto init_design = latin_hypercube(config.init_points, 3, lhs_rng);

    while (static_cast<int>(ledger.iterations.size()) < total) {
        const int id = static_cast<int>(ledger.iterations.size());
        ParamPoint point;
        Provenance provenance;
        if (id < config.init_points) {
            point = unit_to_box(init_design[static_cast<std::size_t>(id)]);
            provenance = Provenance::LhsInit;
        } else {
            provenance = Provenance::Ei;
            std::vector<ParamPoint> pts;
            std::vector<double> objs, noise;
            gp_training_data(ledger, pts, objs, noise);
            Rng select_rng(derive_seed(config.master_seed, 0x5E1E,
                                       static_cast<std::uint64_t>(id)));
            if (pts.size() < 2) {
                // not enough surviving points to fit; fall back to a fresh draw
                point = unit_to_box(latin_hypercube(1, 3, select_rng)[0]);
            } else {
                const auto gp = gp_fit(pts, objs, noise, config.gp);
                point = select_next(gp, select_rng, config.candidate_count).point;
            }
        }
        ledger.iterations.push_back(run_one(config, id, point, provenance, evaluate_point));
        persist(ledger);
    }
    return ledger;
}

TuningLedger run_points(const TuneConfig& config, const std::vector<ParamPoint>& points,
                        Provenance provenance, const PointEvaluator& evaluate_point) {
    config.validate();
    if (!evaluate_point) throw ContractError("run_points: point evaluator missing");
    TuningLedger ledger = open_or_create_ledger(config);
    for (const auto& point : points) {
        const int id = static_cast<int>(ledger.iterations.size());
        ledger.iterations.push_back(run_one(config, id, point, provenance, evaluate_point));
        persist(ledger);
    }
    return ledger;
}

TuningLedger rescore_ledger(const TuningLedger& ledger, const ObjectiveWeights& new_weights) {
    new_weights.validate();
    TuningLedger out = ledger;
    out.config.weights = new_weights;
    for (auto& it : out.iterations) {
        if (it.status != IterationStatus::Ok) continue;
        for (int i = 0; i < 3; ++i)
            it.model_objectives[static_cast<std::size_t>(i)] =
                objective(it.models[static_cast<std::size_t>(i)], out.config.targets,
                          new_weights)
                    .value;
        // best-model choice is part of the recorded run; only V moves
        it.objective = it.model_objectives[static_cast<std::size_t>(it.best_model)];
    }
    return out;
}

std::vector<int> rank_by_objective(const TuningLedger& ledger) {
    std::vector<int> ids;
    for (const auto& it : ledger.iterations)
        if (it.status == IterationStatus::Ok) ids.push_back(it.id);
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        const auto& ia = ledger.iterations[static_cast<std::size_t>(a)];
        const auto& ib = ledger.iterations[static_cast<std::size_t>(b)];
        if (ia.objective != ib.objective) return ia.objective < ib.objective;
        return a < b;
    });
    return ids;
}

void save_ledger(const TuningLedger& ledger, const std::string& path) {
    std::ostringstream out;
    nlohmann::json header;
    header["type"] = "header";
    header["format_version"] = 1;
    header["config"] = config_to_json(ledger.config);
    out << header.dump() << '\n';
    for (const auto& it : ledger.iterations) out << iteration_to_json(it).dump() << '\n';
    write_file_atomic(path, out.str());
}

TuningLedger load_ledger(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open ledger: " + path);
    std::string line;
    if (!std::getline(in, line)) throw TruncatedFileError("ledger is empty: " + path);

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("ledger header is not valid JSON in " + path + ": " + e.what());
    }
    if (header.value("type", "") != "header")
        throw ParseError("ledger does not start with a header line: " + path);
    if (header.value("format_version", 0) != 1)
        throw VersionMismatchError("unsupported ledger format version in " + path);

    TuningLedger ledger;
    try {
        ledger.config = config_from_json(header.at("config"));
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto j = nlohmann::json::parse(line);
            if (j.value("type", "") != "iteration")
                throw ParseError("unexpected record type in ledger " + path);
            ledger.iterations.push_back(iteration_from_json(j));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed ledger record in " + path + ": " + e.what());
    }
    for (std::size_t i = 0; i < ledger.iterations.size(); ++i)
        if (ledger.iterations[i].id != static_cast<int>(i))
            throw ParseError("ledger iteration ids are not dense and ascending in " + path);
    ledger.config.ledger_path = path;
    return ledger;
}

}  // namespace catune
