"""Image-to-problem pipeline orchestration."""

from .core import (
    GOAL_MODES,
    GoalInput,
    PipelineError,
    PipelineResult,
    StageFailure,
    StageRecord,
    generate_problem,
    load_results,
    run,
    run_batch,
    translate_goal,
    translate_initial,
    write_results,
)
from .shoebox import ConflictingIdentity, merge_snapshots, reconcile_objects

__all__ = [
    "GOAL_MODES",
    "ConflictingIdentity",
    "GoalInput",
    "PipelineError",
    "PipelineResult",
    "StageFailure",
    "StageRecord",
    "generate_problem",
    "load_results",
    "merge_snapshots",
    "reconcile_objects",
    "run",
    "run_batch",
    "translate_goal",
    "translate_initial",
    "write_results",
]
