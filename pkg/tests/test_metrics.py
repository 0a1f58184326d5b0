import math
import statistics

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import success_rate_oracle, trimmed_mean_oracle
from tcbirrt.bench import (
    N_T_MIN_BY_TIER,
    InsufficientSuccesses,
    TrialRecord,
    log_time_grid,
    success_rate_curve,
    summarize,
    trimmed_time_stats,
)


def _records(times, failures=0, timeout=60.0):
    out = [TrialRecord(i, True, float(t)) for i, t in enumerate(times)]
    out += [TrialRecord(len(times) + k, False, timeout) for k in range(failures)]
    return out


def test_all_failures_give_zero_curve():
    recs = _records([], failures=5)
    assert success_rate_curve(recs, [0.1, 1.0, 60.0]) == [0.0, 0.0, 0.0]


def test_direct_count_example():
    recs = _records([1, 2, 3], failures=1)
    assert success_rate_curve(recs, [2.5]) == [0.5]


def test_forty_of_hundred():
    recs = _records([1.0] * 40, failures=60)
    assert success_rate_curve(recs, [5.0]) == [0.4]


def test_trimmed_examples():
    assert trimmed_time_stats(_records([5, 1, 3]), 2)[0] == 2.0
    mean, std = trimmed_time_stats(_records([2, 2, 2, 2]), 3)
    assert mean == 2.0 and std == 0.0
    mean, std = trimmed_time_stats(_records([4, 1, 2, 9]), 3)
    assert mean == pytest.approx(statistics.mean([1, 2, 4]))
    assert std == pytest.approx(statistics.stdev([1, 2, 4]))


def test_insufficient_successes():
    with pytest.raises(InsufficientSuccesses) as exc:
        trimmed_time_stats(_records([1, 2], failures=3), 3)
    assert (exc.value.needed, exc.value.actual) == (3, 2)


def test_tier_cutoffs():
    assert N_T_MIN_BY_TIER == {1: 40, 2: 30, 3: 15}


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        TrialRecord(0, True, -1.0)


def test_log_grid():
    grid = log_time_grid(60.0)
    assert len(grid) == 100
    assert grid[0] == pytest.approx(0.1) and grid[-1] == pytest.approx(60.0)
    ratios = np.diff(np.log(grid))
    assert np.allclose(ratios, ratios[0])


records = st.lists(
    st.builds(TrialRecord, st.integers(0, 1000), st.booleans(), st.floats(0.0, 60.0)),
    min_size=1, max_size=40)


@given(records)
def test_curve_monotone_and_ends_at_success_fraction(recs):
    grid = log_time_grid(60.0)
    p = success_rate_curve(recs, grid)
    assert all(0.0 <= x <= 1.0 for x in p)
    assert all(a <= b for a, b in zip(p, p[1:]))
    assert p[-1] == sum(r.success for r in recs) / len(recs)


@given(records, st.integers(1, 10))
def test_trimmed_mean_matches_sort_and_slice(recs, n_t_min):
    expected = trimmed_mean_oracle(recs, n_t_min)
    if expected is None:
        with pytest.raises(InsufficientSuccesses):
            trimmed_time_stats(recs, n_t_min)
    else:
        assert trimmed_time_stats(recs, n_t_min)[0] == expected


def test_summarize():
    recs = _records([0.5, 1.0, 2.0, 3.0], failures=1, timeout=10.0)
    rep = summarize(recs, 10.0, n_t_min=3)
    assert rep.success_rate == success_rate_oracle(recs, rep.grid)
    assert rep.mean_time == pytest.approx(3.5 / 3)
    assert rep.extra["success_fraction"] == 0.8
    assert rep.extra["median_time"] == 1.5
    rep = summarize(recs, 10.0, n_t_min=5)
    assert rep.mean_time is None and "insufficient" in rep.extra
    assert math.isclose(rep.success_rate[-1], 0.8)
