#include "catune/evaluator.hpp"

#include <chrono>
#include <cmath>
#include <json.hpp>
#include <thread>

#include "catune/binio.hpp"
#include "catune/errors.hpp"

namespace catune {

void MetricTargets::validate() const {
    if (!(p_nmac > 0.0) || !(p_alert > 0.0) || !(p_reversal > 0.0))
        throw ValidationError("metric targets must be > 0");
}

void ObjectiveWeights::validate() const {
    if (nmac < 0.0 || alert < 0.0 || reversal < 0.0)
        throw ValidationError("objective weights must be >= 0");
}

MetricScore metric_score(double m, double m_target) {
    if (!(m_target > 0.0)) throw ValidationError("metric target must be > 0");
    if (m < 0.0) throw ValidationError("metric value must be >= 0");
    MetricScore s;
    s.ratio = m / m_target;
    s.score = s.ratio * s.ratio / 2.0 - 0.5;
    return s;
}

ObjectiveReport objective(const EvalMetrics& metrics, const MetricTargets& targets,
                          const ObjectiveWeights& weights) {
    targets.validate();
    weights.validate();

    auto term = [](double m, double target, double weight) {
        ObjectiveTerm t;
        t.metric = m;
        t.target = target;
        t.weight = weight;
        const auto s = metric_score(m, target);
        t.ratio = s.ratio;
        t.score = s.score;
        t.contribution = weight * s.score;
        return t;
    };

    ObjectiveReport report;
    report.nmac = term(metrics.p_nmac, targets.p_nmac, weights.nmac);
    report.alert = term(metrics.p_alert, targets.p_alert, weights.alert);
    report.reversal = term(metrics.p_reversal, targets.p_reversal, weights.reversal);
    report.value =
        report.nmac.contribution + report.alert.contribution + report.reversal.contribution;
    return report;
}

EvalMetrics evaluate(const PolicyFn& policy, const EncounterSet& set,
                     const RewardParams& params, const LookaheadConfig& lookahead,
                     int workers) {
    if (set.specs.empty()) throw ValidationError("evaluate: encounter set is empty");
    params.validate();
    workers = std::max(1, workers);

    struct Counts {
        long long nmac = 0, alert = 0, reversal = 0;
    };

    const auto run_range = [&](std::size_t lo, std::size_t hi, const PolicyFn& pol,
                               Counts& out) {
        Counts c;
        for (std::size_t i = lo; i < hi; ++i) {
            EncounterResult res;
            try {
                res = run_encounter(set.specs[i], set.chain, set.config.dynamics, pol, params,
                                    lookahead, set.config.dt);
            } catch (const Error& e) {
                throw ContractError("evaluate: encounter id " +
                                    std::to_string(set.specs[i].id) + " failed: " + e.what());
            }
            c.nmac += res.aggregate.any_nmac ? 1 : 0;
            c.alert += res.aggregate.any_alert ? 1 : 0;
            c.reversal += res.aggregate.any_reversal ? 1 : 0;
        }
        out = c;
    };

    std::vector<Counts> partial(static_cast<std::size_t>(workers));
    if (workers == 1) {
        run_range(0, set.specs.size(), policy, partial[0]);
    } else {
        std::vector<std::thread> threads;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        const std::size_t chunk = (set.specs.size() + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::size_t lo = static_cast<std::size_t>(w) * chunk;
            const std::size_t hi = std::min(set.specs.size(), lo + chunk);
            if (lo >= hi) break;
            threads.emplace_back([&, lo, hi, w]() {
                try {
                    const PolicyFn local = policy;  // each worker holds its own copy
                    run_range(lo, hi, local, partial[static_cast<std::size_t>(w)]);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& t : threads) t.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    EvalMetrics m;
    m.encounter_count = static_cast<long long>(set.specs.size());
    for (const auto& c : partial) {
        m.nmac_count += c.nmac;
        m.alert_count += c.alert;
        m.reversal_count += c.reversal;
    }
    m.p_nmac = static_cast<double>(m.nmac_count) / static_cast<double>(m.encounter_count);
    m.p_alert = static_cast<double>(m.alert_count) / static_cast<double>(m.encounter_count);
    m.p_reversal =
        static_cast<double>(m.reversal_count) / static_cast<double>(m.encounter_count);
    return m;
}

double timing_per_encounter(double t_n, double t_1, long long n) {
    if (n < 2) throw ValidationError("timing_per_encounter needs n >= 2");
    return (t_n - t_1) / static_cast<double>(n - 1);
}

TimingMeasurement measure_repetitions(const std::function<double()>& timed_run, int warmups,
                                      int reps) {
    if (reps < 1) throw ValidationError("timing needs at least one repetition");
    for (int i = 0; i < warmups; ++i) timed_run();
    TimingMeasurement out;
    out.rep_seconds.reserve(static_cast<std::size_t>(reps));
    for (int i = 0; i < reps; ++i) out.rep_seconds.push_back(timed_run());
    out.average = average_of_reps(out.rep_seconds);
    return out;
}

double average_of_reps(const std::vector<double>& reps) {
    if (reps.empty()) throw ValidationError("cannot average zero repetitions");
    double sum = 0.0;
    for (double r : reps) sum += r;
    return sum / static_cast<double>(reps.size());
}

double alert_variance(const std::array<double, 3>& alert_rates) {
    for (double r : alert_rates)
        if (!(r >= 0.0 && r <= 1.0))
            throw ValidationError("alert rates must lie in [0, 1]");
    const double mean = (alert_rates[0] + alert_rates[1] + alert_rates[2]) / 3.0;
    double var = 0.0;
    for (double r : alert_rates) var += (r - mean) * (r - mean);
    return var / 3.0;
}

void write_metrics_json(const EvalMetrics& metrics, const ObjectiveReport& report,
                        const std::string& path) {
    auto term_json = [](const ObjectiveTerm& t) {
        return nlohmann::json{{"metric", t.metric},   {"target", t.target},
                              {"weight", t.weight},   {"ratio", t.ratio},
                              {"score", t.score},     {"contribution", t.contribution}};
    };
    nlohmann::json j;
    j["metrics"] = {{"p_nmac", metrics.p_nmac},
                    {"p_alert", metrics.p_alert},
                    {"p_reversal", metrics.p_reversal},
                    {"encounter_count", metrics.encounter_count},
                    {"nmac_count", metrics.nmac_count},
                    {"alert_count", metrics.alert_count},
                    {"reversal_count", metrics.reversal_count}};
    j["objective"] = {{"nmac", term_json(report.nmac)},
                      {"alert", term_json(report.alert)},
                      {"reversal", term_json(report.reversal)},
                      {"value", report.value}};
    write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace catune
