"""Success-rate curves and trimmed planning-time statistics."""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

# smallest-n cutoffs used for the three scene difficulty tiers
N_T_MIN_BY_TIER = {1: 40, 2: 30, 3: 15}


class InsufficientSuccesses(ValueError):
    def __init__(self, needed, actual):
        self.needed = needed
        self.actual = actual
        super().__init__(f"need {needed} successful trials, have {actual}")


@dataclass
class TrialRecord:
    task_id: int
    success: bool
    time_s: float
    iterations: int = 0
    path_len_rad: float = 0.0
    regrasp: bool = False

    def __post_init__(self):
        if self.time_s < 0:
            raise ValueError("time_s must be non-negative")


@dataclass
class MetricsReport:
    grid: list
    success_rate: list
    n_t_min: int = None
    mean_time: float = None
    std_time: float = None
    extra: dict = field(default_factory=dict)


def log_time_grid(timeout, lo=0.1, points=100):
    """Log-spaced time grid from ``lo`` to ``timeout`` seconds."""
    if timeout <= lo:
        return [float(timeout)]
    return [float(t) for t in np.geomspace(lo, timeout, points)]


def success_rate_curve(records, grid):
    """``p(t)``: fraction of all trials that succeeded within ``t`` seconds."""
    if not records:
        raise ValueError("no trial records")
    times = np.sort([r.time_s for r in records if r.success])
    n = len(records)
    return [int(np.searchsorted(times, t, side="right")) / n for t in grid]


def trimmed_time_stats(records, n_t_min, time_limit=None):
    """Mean and sample standard deviation of the ``n_t_min`` fastest successes.

    With ``time_limit`` only successes within that time count.  Raises
    :class:`InsufficientSuccesses` when there are fewer than ``n_t_min``.
    """
    if n_t_min < 1:
        raise ValueError("n_t_min must be >= 1")
    times = sorted(r.time_s for r in records
                   if r.success and (time_limit is None or r.time_s <= time_limit))
    if len(times) < n_t_min:
        raise InsufficientSuccesses(n_t_min, len(times))
    # exact rational arithmetic, rounded once at the end
    kept = [Fraction(t) for t in times[:n_t_min]]
    mean = sum(kept) / n_t_min
    if n_t_min == 1:
        return float(mean), 0.0
    var = sum((t - mean) ** 2 for t in kept) / (n_t_min - 1)
    return float(mean), math.sqrt(var)


def summarize(records, timeout, n_t_min=None, grid=None):
    grid = log_time_grid(timeout) if grid is None else list(grid)
    report = MetricsReport(grid=grid, success_rate=success_rate_curve(records, grid), n_t_min=n_t_min)
    if n_t_min is not None:
        try:
            report.mean_time, report.std_time = trimmed_time_stats(records, n_t_min, timeout)
        except InsufficientSuccesses as exc:
            report.extra["insufficient"] = str(exc)
    successes = [r for r in records if r.success]
    report.extra["success_fraction"] = len(successes) / len(records)
    if successes:
        report.extra["median_time"] = float(np.median([r.time_s for r in successes]))
    return report
