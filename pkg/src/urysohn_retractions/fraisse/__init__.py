"""Finite-stage construction of the universal ultrahomogeneous retraction."""

from .stage import (
    AbsorptionRecord,
    AmbientStage,
    GenericityReport,
    STANDARD_SCHEDULE,
    absorb,
    build_stage,
    check_genericity,
    grow,
    is_exact_prefix,
    realizing_point,
    single_point_triple,
    subtriples,
)
from .urstar import SearchBudget, UrStarVerdict, check_ur_star
from .aprox import (
    HypothesisReport,
    StepInput,
    StepReport,
    aprox_step,
    check_hypotheses,
    epsilon_schedule,
    exact_input,
    schedule_partial_sum,
    schedule_total,
    start_induction,
)
from .game import (
    EveMove,
    GameCheck,
    GameState,
    RoundRecord,
    adam_move,
    check_game_state,
    covered_prefix,
    initial_state,
    play_game,
)
from .equivariant import count_equivariant_isometries, find_equivariant_isometry, is_equivariant

__all__ = [
    "AbsorptionRecord",
    "AmbientStage",
    "GenericityReport",
    "STANDARD_SCHEDULE",
    "absorb",
    "build_stage",
    "check_genericity",
    "grow",
    "is_exact_prefix",
    "realizing_point",
    "single_point_triple",
    "subtriples",
    "SearchBudget",
    "UrStarVerdict",
    "check_ur_star",
    "HypothesisReport",
    "StepInput",
    "StepReport",
    "aprox_step",
    "check_hypotheses",
    "epsilon_schedule",
    "exact_input",
    "schedule_partial_sum",
    "schedule_total",
    "start_induction",
    "EveMove",
    "GameCheck",
    "GameState",
    "RoundRecord",
    "adam_move",
    "check_game_state",
    "covered_prefix",
    "initial_state",
    "play_game",
    "count_equivariant_isometries",
    "find_equivariant_isometry",
    "is_equivariant",
]
