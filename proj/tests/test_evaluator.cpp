#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "catune/dqn.hpp"
#include "catune/errors.hpp"
#include "catune/evaluator.hpp"

using namespace catune;

namespace {

EvalMetrics metrics_of(double nmac, double alert, double reversal) {
    EvalMetrics m;
    m.p_nmac = nmac;
    m.p_alert = alert;
    m.p_reversal = reversal;
    m.encounter_count = 1;
    return m;
}

}  // namespace

TEST_CASE("metric score anchors") {
    CHECK(metric_score(0.1946, 0.1946).score == 0.0);
    CHECK(metric_score(0.0, 0.5).score == doctest::Approx(-0.5).epsilon(1e-15));
    const auto s = metric_score(0.01338, 9.8268e-4);
    CHECK(s.ratio == doctest::Approx(13.6158).epsilon(1e-4));
    CHECK(s.score == doctest::Approx(92.19).epsilon(1e-3));
    CHECK_THROWS_AS(metric_score(0.1, 0.0), ValidationError);
}

TEST_CASE("score shape: superlinear overshoot, bounded undershoot") {
    for (double r = 1.01; r < 40.0; r += 0.37) {
        const auto s = metric_score(r, 1.0);
        CHECK(s.score > r - 1.0);
    }
    for (double r = 0.0; r < 1.0; r += 0.05) {
        const auto s = metric_score(r, 1.0);
        CHECK(std::fabs(s.score) <= 0.5);
    }
}

TEST_CASE("objective reproduces the published tuning values") {
    const MetricTargets targets;
    const ObjectiveWeights weights;

    struct Row {
        double nmac, alert, reversal, value;
    };
    const Row rows[] = {
        {9.8268e-4, 0.19460, 0.00290, 0.0},
        {1.3380e-2, 0.14950, 0.03238, 13.7174},
        {6.0500e-3, 0.21749, 0.00780, 1.4892},
        {7.0343e-3, 0.32035, 0.00015, 1.8643},
        {4.4496e-3, 0.41754, 0.00217, 1.8959},
        {7.1049e-3, 0.19062, 0.00938, 1.9743},
        {7.6419e-3, 0.20802, 0.00792, 2.0268},
    };
    for (const auto& row : rows) {
        const auto rep = objective(metrics_of(row.nmac, row.alert, row.reversal), targets,
                                   weights);
        CHECK(rep.value == doctest::Approx(row.value).epsilon(0).scale(0).epsilon(1e-9).scale(1e9));
        CHECK(std::fabs(rep.value - row.value) <= 0.005);
    }
    // the target row is exactly zero
    const auto xu = objective(metrics_of(9.8268e-4, 0.1946, 0.00290), targets, weights);
    CHECK(xu.value == 0.0);
}

TEST_CASE("objective is linear in the weights") {
    Rng rng(9);
    const MetricTargets targets;
    for (int i = 0; i < 200; ++i) {
        const auto m = metrics_of(rng.uniform(), rng.uniform(), rng.uniform());
        ObjectiveWeights w1{rng.uniform(), rng.uniform(), rng.uniform()};
        ObjectiveWeights w2{rng.uniform(), rng.uniform(), rng.uniform()};
        ObjectiveWeights sum{w1.nmac + w2.nmac, w1.alert + w2.alert, w1.reversal + w2.reversal};
        const double lhs = objective(m, targets, sum).value;
        const double rhs = objective(m, targets, w1).value + objective(m, targets, w2).value;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("timing arithmetic reproduces the published runtime tables") {
    CHECK(timing_per_encounter(100.0, 10.0, 10) == doctest::Approx(10.0));
    CHECK_THROWS_AS(timing_per_encounter(1.0, 0.5, 1), ValidationError);

    CHECK(average_of_reps({28.1693, 27.6316, 26.9382}) ==
          doctest::Approx(27.5797).epsilon(1e-5));
    CHECK(average_of_reps({0.6675, 0.6761, 0.6621}) == doctest::Approx(0.6686).epsilon(1e-4));
    CHECK(average_of_reps({13.7242, 13.7053, 13.7745}) ==
          doctest::Approx(13.7347).epsilon(1e-5));
    const double vec = average_of_reps({7.4268, 7.1785, 7.6214});
    CHECK(vec == doctest::Approx(7.4089).epsilon(1e-5));
    CHECK(27.5797 / vec == doctest::Approx(3.7225).epsilon(1e-4));
}

TEST_CASE("measure_repetitions runs a warmup then averages") {
    int calls = 0;
    const auto res = measure_repetitions(
        [&]() {
            ++calls;
            return static_cast<double>(calls);
        },
        1, 3);
    CHECK(calls == 4);
    REQUIRE(res.rep_seconds.size() == 3);
    CHECK(res.rep_seconds[0] == 2.0);  // warmup discarded
    CHECK(res.average == doctest::Approx(3.0));
}

TEST_CASE("alert variance uses the population convention") {
    CHECK(alert_variance({0.2709, 0.2175, 0.1941}) == doctest::Approx(0.0010).epsilon(0.05));
    CHECK(alert_variance({0.1669, 0.1906, 0.1779}) ==
          doctest::Approx(9.3778e-5).epsilon(1e-4));
    CHECK(alert_variance({0.3, 0.3, 0.3}) == 0.0);
    CHECK_THROWS_AS(alert_variance({1.5, 0.0, 0.0}), ValidationError);
}

TEST_CASE("evaluate on a stratified set: exact rates and worker independence") {
    EncounterConfig cfg;
    cfg.duration_steps = 50;
    cfg.tcpa_max = 45.0;
    const auto set = generate_stratified_set(300, 0.5, cfg, 21);

    const auto clear_metrics = evaluate(clear_policy(), set, RewardParams{});
    CHECK(clear_metrics.p_nmac == 0.5);
    CHECK(clear_metrics.p_alert == 0.0);
    CHECK(clear_metrics.p_reversal == 0.0);
    CHECK(clear_metrics.encounter_count == 300);

    const PolicyFn left = [](const Observation&) {
        return CombinedAction{VerticalAction::Clear, HorizontalAction::Left};
    };
    const auto left_metrics = evaluate(left, set, RewardParams{});
    CHECK(left_metrics.p_alert == 1.0);
    CHECK(left_metrics.p_reversal == 0.0);

    // shard independence, including a policy with internal state sharing
    const auto w = MlpWeights::seeded_init({25, 16, 9}, 5);
    const auto policy = mlp_policy(w);
    const auto m1 = evaluate(policy, set, RewardParams{}, {}, 1);
    const auto m8 = evaluate(policy, set, RewardParams{}, {}, 8);
    CHECK(m1.nmac_count == m8.nmac_count);
    CHECK(m1.alert_count == m8.alert_count);
    CHECK(m1.reversal_count == m8.reversal_count);
}

TEST_CASE("evaluate propagates failures with the offending encounter id") {
    EncounterConfig cfg;
    auto set = generate_stratified_set(5, 0.4, cfg, 3);
    set.specs[3].ownship_init.x = std::nan("");
    set.specs[3].id = 77;
    try {
        evaluate(clear_policy(), set, RewardParams{});
        FAIL("expected a ContractError");
    } catch (const ContractError& e) {
        CHECK(std::string(e.what()).find("77") != std::string::npos);
    }
}
