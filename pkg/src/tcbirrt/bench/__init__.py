"""Scenes, task generation, batch runs, metrics and artifact export."""

from .export import (
    TRIALS_HEADER,
    plan_to_dict,
    read_curve_csv,
    read_path_file,
    read_trials_csv,
    write_curve_csv,
    write_path_file,
    write_trials_csv,
)
from .metrics import (
    N_T_MIN_BY_TIER,
    InsufficientSuccesses,
    MetricsReport,
    TrialRecord,
    log_time_grid,
    success_rate_curve,
    summarize,
    trimmed_time_stats,
)
from .replay import ReplayReport, validate_path_file, validate_plan
from .runner import run_benchmark, run_trial, task_seed
from .scene import (
    BUNDLED_SCENES,
    ParseError,
    SceneConfig,
    ValidationError,
    load_scene,
    parse_scene,
    save_scene,
    scene_hash,
)
from .tasks import GenerationExhausted, TaskInstance, generate_tasks, solve_endpoint

__all__ = [
    "BUNDLED_SCENES",
    "GenerationExhausted",
    "InsufficientSuccesses",
    "MetricsReport",
    "N_T_MIN_BY_TIER",
    "ParseError",
    "ReplayReport",
    "SceneConfig",
    "TRIALS_HEADER",
    "TaskInstance",
    "TrialRecord",
    "ValidationError",
    "generate_tasks",
    "load_scene",
    "log_time_grid",
    "parse_scene",
    "plan_to_dict",
    "read_curve_csv",
    "read_path_file",
    "read_trials_csv",
    "run_benchmark",
    "run_trial",
    "save_scene",
    "scene_hash",
    "solve_endpoint",
    "success_rate_curve",
    "summarize",
    "task_seed",
    "trimmed_time_stats",
    "validate_path_file",
    "validate_plan",
    "write_curve_csv",
    "write_path_file",
    "write_trials_csv",
]
