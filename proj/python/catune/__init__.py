"""Collision-avoidance policy training, evaluation and reward-model tuning.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

from ._core import (  # noqa: F401
    AircraftState,
    CatuneError,
    Mlp,
    __version__,
    alert_variance,
    build_markov_chain,
    classify_events,
    detect_nmac,
    evaluate_policy,
    expected_improvement,
    generate_encounter_set,
    latin_hypercube,
    linear_sweep,
    local_lhs,
    metric_score,
    objective_value,
    observe,
    propagate,
    run_cli,
    sample_encounter,
    step_reward,
    timing_per_encounter,
    value_iteration,
)

__all__ = [
    "AircraftState",
    "CatuneError",
    "Mlp",
    "__version__",
    "alert_variance",
    "build_markov_chain",
    "classify_events",
    "detect_nmac",
    "evaluate_policy",
    "expected_improvement",
    "generate_encounter_set",
    "latin_hypercube",
    "linear_sweep",
    "local_lhs",
    "metric_score",
    "objective_value",
    "observe",
    "propagate",
    "run_cli",
    "sample_encounter",
    "step_reward",
    "timing_per_encounter",
    "value_iteration",
]
