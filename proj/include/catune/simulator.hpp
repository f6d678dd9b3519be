#pragma once

#include <array>
#include <functional>
#include <vector>

#include "catune/encounter.hpp"

namespace catune {

// Tunable costs of the reward model. NMAC is fixed at -1; the other three
// are the surrogate's search coordinates, each in [-1, 0].
struct RewardParams {
    double alert_cost = -0.01;
    double reversal_cost = -0.05;
    double cease_alert_cost = -0.05;
    double nmac_cost = -1.0;

    void validate() const;
};

struct StepEvents {
    bool nmac = false;
    bool alert = false;
    bool reversal_v = false;
    bool reversal_h = false;
    bool cease_alert = false;
};

inline constexpr int kObsDim = 25;

struct Observation {
    std::array<double, kObsDim> v{};

    double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
};

struct Transition {
    Observation obs;
    CombinedAction action;
    double reward = 0.0;
    Observation next_obs;
    bool terminal = false;
};

// Event classification is a pure function of the action pair plus the NMAC
// flag of the resulting state.
StepEvents classify_events(CombinedAction prev, CombinedAction curr, bool nmac);

// Sum of the costs whose events fired; a reversal on either (or both) axes
// is charged once.
double step_reward(const StepEvents& events, const RewardParams& params);

inline constexpr int kAlertMemorySteps = 20;

// 25-component policy input: intruder geometry in the ownship body frame,
// closure terms, advisory memory, previous-action one-hot. Rotating both
// aircraft about the origin leaves it unchanged.
Observation observe(const AircraftState& own, const AircraftState& intr,
                    CombinedAction prev_action, int steps_since_alert = kAlertMemorySteps);

using PolicyFn = std::function<CombinedAction(const Observation&)>;

// Remain-well-clear style early alerting: query the policy on a CLEAR/CLEAR
// projection of both aircraft `steps` ahead and adopt its advisory when it
// alerts. Off by default (and during tuning).
struct LookaheadConfig {
    bool enabled = false;
    int steps = 10;
};

struct AggregateEvents {
    bool any_nmac = false;
    bool any_alert = false;
    bool any_reversal = false;
    int nmac_steps = 0;
    int steps = 0;
    double total_reward = 0.0;
};

struct StepOutcome {
    double reward = 0.0;
    StepEvents events;
    bool terminal = false;
};

// Step-by-step encounter driver: the DQN trainer interacts with it action by
// action; run_encounter wraps it behind a policy callable.
class EncounterSim {
public:
    EncounterSim(const EncounterSpec& spec, const IntruderChain& chain,
                 const DynamicsConfig& dyn, const RewardParams& params, double dt = 1.0);

    const Observation& observation() const { return obs_; }
    const AircraftState& ownship() const { return own_; }
    const AircraftState& intruder() const { return intr_; }
    CombinedAction prev_action() const { return prev_action_; }
    int steps_since_alert() const { return steps_since_alert_; }
    double dt() const { return dt_; }
    int step_index() const { return step_; }
    bool done() const { return done_; }

    StepOutcome step(CombinedAction own_action);

private:
    void refresh_observation();

    EncounterSpec spec_;
    DynamicsConfig dyn_;
    RewardParams params_;
    double dt_ = 1.0;
    std::vector<CombinedAction> intruder_actions_;
    AircraftState own_;
    AircraftState intr_;
    CombinedAction prev_action_ = kClearClear;
    Observation obs_;
    int steps_since_alert_ = kAlertMemorySteps;
    int step_ = 0;
    bool done_ = false;
};

struct EncounterResult {
    std::vector<Transition> transitions;
    AggregateEvents aggregate;
};

EncounterResult run_encounter(const EncounterSpec& spec, const IntruderChain& chain,
                              const DynamicsConfig& dyn, const PolicyFn& policy,
                              const RewardParams& params,
                              const LookaheadConfig& lookahead = {}, double dt = 1.0);

// Applies the lookahead rule for one decision given current truth states.
CombinedAction lookahead_action(const PolicyFn& policy, const Observation& obs,
                                const AircraftState& own, const AircraftState& intr,
                                CombinedAction prev_action, int steps_since_alert,
                                double dt, const DynamicsConfig& dyn,
                                const LookaheadConfig& lookahead);

inline PolicyFn clear_policy() {
    return [](const Observation&) { return kClearClear; };
}

}  // namespace catune
