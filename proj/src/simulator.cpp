#include "catune/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "catune/errors.hpp"

namespace catune {

namespace {

// Observation scale factors; chosen so components stay near [-1, 1] for the
// default envelope.
constexpr double kRangeScale = 10000.0;   // ft
constexpr double kAltScale = 1000.0;      // ft
constexpr double kSpeedScale = 500.0;     // ft/s
constexpr double kVzScale = 2000.0;       // ft/min
constexpr double kTcpaScale = 60.0;       // s
constexpr double kTurnScale = 0.05;       // rad/s

void check_action(CombinedAction a) {
    const int v = static_cast<int>(a.vertical);
    const int h = static_cast<int>(a.horizontal);
    if (v < 0 || v > 2 || h < 0 || h > 2)
        throw ContractError("policy returned an invalid combined action");
}

}  // namespace

void RewardParams::validate() const {
    auto in_domain = [](double c) { return c >= -1.0 && c <= 0.0 && std::isfinite(c); };
    if (!in_domain(alert_cost) || !in_domain(reversal_cost) || !in_domain(cease_alert_cost))
        throw ValidationError("reward costs must lie in [-1, 0]");
    if (nmac_cost != -1.0)
        throw ValidationError("nmac cost is fixed at -1");
}

StepEvents classify_events(CombinedAction prev, CombinedAction curr, bool nmac) {
    StepEvents e;
    e.nmac = nmac;
    e.alert = !curr.is_clear();
    e.reversal_h = (prev.horizontal == HorizontalAction::Left &&
                    curr.horizontal == HorizontalAction::Right) ||
                   (prev.horizontal == HorizontalAction::Right &&
                    curr.horizontal == HorizontalAction::Left);
    e.reversal_v = (prev.vertical == VerticalAction::Climb &&
                    curr.vertical == VerticalAction::Descend) ||
                   (prev.vertical == VerticalAction::Descend &&
                    curr.vertical == VerticalAction::Climb);
    e.cease_alert = !prev.is_clear() && curr.is_clear();
    return e;
}

double step_reward(const StepEvents& events, const RewardParams& params) {
    double r = 0.0;
    if (events.nmac) r += params.nmac_cost;
    if (events.alert) r += params.alert_cost;
    if (events.reversal_v || events.reversal_h) r += params.reversal_cost;
    if (events.cease_alert) r += params.cease_alert_cost;
    return r;
}

Observation observe(const AircraftState& own, const AircraftState& intr,
                    CombinedAction prev_action, int steps_since_alert) {
    if (!own.finite() || !intr.finite())
        throw NumericError("observe: non-finite state");

    const double dx = intr.x - own.x;
    const double dy = intr.y - own.y;
    const double cpsi = std::cos(own.heading);
    const double spsi = std::sin(own.heading);
    // Ownship body frame: bx ahead, by to the right.
    const double bx = dx * cpsi + dy * spsi;
    const double by = -dx * spsi + dy * cpsi;

    const double dalt = intr.alt - own.alt;
    const double dpsi = intr.heading - own.heading;

    const double vnx = intr.ground_speed * std::cos(intr.heading) -
                       own.ground_speed * std::cos(own.heading);
    const double vny = intr.ground_speed * std::sin(intr.heading) -
                       own.ground_speed * std::sin(own.heading);
    const double range = std::hypot(dx, dy);
    const double closing_speed_sq = vnx * vnx + vny * vny;
    const double range_rate = range > 1e-9 ? (dx * vnx + dy * vny) / range : 0.0;

    double tcpa = 0.0;
    if (closing_speed_sq > 1e-12)
        tcpa = std::clamp(-(dx * vnx + dy * vny) / closing_speed_sq, 0.0, kTcpaScale);
    const double miss = std::hypot(dx + vnx * tcpa, dy + vny * tcpa);

    Observation o;
    o.v[0] = bx / kRangeScale;
    o.v[1] = by / kRangeScale;
    o.v[2] = dalt / kAltScale;
    o.v[3] = std::sin(dpsi);
    o.v[4] = std::cos(dpsi);
    o.v[5] = own.ground_speed / kSpeedScale;
    o.v[6] = intr.ground_speed / kSpeedScale;
    o.v[7] = own.vertical_rate / kVzScale;
    o.v[8] = intr.vertical_rate / kVzScale;
    o.v[9] = range / kRangeScale;
    o.v[10] = range_rate / kSpeedScale;
    o.v[11] = (intr.vertical_rate - own.vertical_rate) / kVzScale;
    o.v[12] = tcpa / kTcpaScale;
    o.v[13] = own.turn_rate / kTurnScale;
    o.v[14] = miss / kRangeScale;
    o.v[15] = std::min(steps_since_alert, kAlertMemorySteps) /
              static_cast<double>(kAlertMemorySteps);
    o.v[16 + prev_action.index()] = 1.0;
    return o;
}

EncounterSim::EncounterSim(const EncounterSpec& spec, const IntruderChain& chain,
                           const DynamicsConfig& dyn, const RewardParams& params, double dt)
    : spec_(spec),
      dyn_(dyn),
      params_(params),
      dt_(dt),
      intruder_actions_(intruder_action_sequence(chain, spec.intruder_seed, spec.duration)),
      own_(spec.ownship_init),
      intr_(spec.intruder_init) {
    params_.validate();
    refresh_observation();
}

void EncounterSim::refresh_observation() {
    obs_ = observe(own_, intr_, prev_action_, steps_since_alert_);
}

StepOutcome EncounterSim::step(CombinedAction own_action) {
    if (done_) throw ContractError("EncounterSim::step called after terminal step");
    check_action(own_action);

    const CombinedAction intr_action = intruder_actions_[static_cast<std::size_t>(step_)];
    own_ = propagate(own_, own_action, dt_, dyn_);
    intr_ = propagate(intr_, intr_action, dt_, dyn_);

    const bool nmac = detect_nmac(own_, intr_, dyn_);
    const StepEvents events = classify_events(prev_action_, own_action, nmac);

    StepOutcome out;
    out.events = events;
    out.reward = step_reward(events, params_);

    prev_action_ = own_action;
    steps_since_alert_ = events.alert ? 0 : std::min(steps_since_alert_ + 1, kAlertMemorySteps);
    ++step_;
    done_ = step_ >= spec_.duration || (nmac && dyn_.nmac_terminal);
    out.terminal = done_;

    refresh_observation();
    return out;
}

CombinedAction lookahead_action(const PolicyFn& policy, const Observation& obs,
                                const AircraftState& own, const AircraftState& intr,
                                CombinedAction prev_action, int steps_since_alert,
                                double dt, const DynamicsConfig& dyn,
                                const LookaheadConfig& lookahead) {
    if (lookahead.enabled) {
        AircraftState own_proj = own;
        AircraftState intr_proj = intr;
        for (int k = 0; k < lookahead.steps; ++k) {
            own_proj = propagate(own_proj, kClearClear, dt, dyn);
            intr_proj = propagate(intr_proj, kClearClear, dt, dyn);
        }
        const Observation proj =
            observe(own_proj, intr_proj, prev_action, steps_since_alert);
        const CombinedAction early = policy(proj);
        check_action(early);
        if (!early.is_clear()) return early;
    }
    const CombinedAction a = policy(obs);
    check_action(a);
    return a;
}

EncounterResult run_encounter(const EncounterSpec& spec, const IntruderChain& chain,
                              const DynamicsConfig& dyn, const PolicyFn& policy,
                              const RewardParams& params,
                              const LookaheadConfig& lookahead, double dt) {
    EncounterSim sim(spec, chain, dyn, params, dt);
    EncounterResult result;
    result.transitions.reserve(static_cast<std::size_t>(spec.duration));

    while (!sim.done()) {
        const Observation obs = sim.observation();
        CombinedAction action;
        if (lookahead.enabled) {
            action = lookahead_action(policy, obs, sim.ownship(), sim.intruder(),
                                      sim.prev_action(), sim.steps_since_alert(), dt, dyn,
                                      lookahead);
        } else {
            action = policy(obs);
            check_action(action);
        }
        const StepOutcome out = sim.step(action);

        Transition tr;
        tr.obs = obs;
        tr.action = action;
        tr.reward = out.reward;
        tr.next_obs = sim.observation();
        tr.terminal = out.terminal;
        result.transitions.push_back(tr);

        auto& agg = result.aggregate;
        agg.any_nmac |= out.events.nmac;
        agg.any_alert |= out.events.alert;
        agg.any_reversal |= out.events.reversal_v || out.events.reversal_h;
        agg.nmac_steps += out.events.nmac ? 1 : 0;
        agg.total_reward += out.reward;
        agg.steps += 1;
    }
    return result;
}

}  // namespace catune
