"""CSV and JSON artifacts of benchmark runs."""

import csv
import json
from pathlib import Path

import numpy as np

from .metrics import TrialRecord

TRIALS_HEADER = ("task_id", "success", "time_s", "iterations", "path_len_rad", "regrasp")
CURVE_HEADER = ("t", "p")
PATH_FORMAT = "tcbirrt-path/1"


def _fmt(x):
    # repr round-trips a float exactly and is platform independent
    return repr(float(x))


def trial_row(r):
    return [str(r.task_id), str(int(bool(r.success))), _fmt(r.time_s), str(int(r.iterations)),
            _fmt(r.path_len_rad), str(int(bool(r.regrasp)))]


class TrialsWriter:
    """Appends one row per trial and flushes, so a crash loses at most the current trial."""

    def __init__(self, path):
        self.path = Path(path)
        self._fh = open(self.path, "w", newline="")
        self._w = csv.writer(self._fh, lineterminator="\n")
        self._w.writerow(TRIALS_HEADER)
        self._fh.flush()

    def write(self, record):
        self._w.writerow(trial_row(record))
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_trials_csv(records, path):
    with TrialsWriter(path) as w:
        for r in records:
            w.write(r)


def read_trials_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != TRIALS_HEADER:
        raise ValueError(f"{path}: unexpected header")
    return [TrialRecord(int(r[0]), r[1] == "1", float(r[2]), int(r[3]), float(r[4]), r[5] == "1")
            for r in rows[1:]]


def write_curve_csv(report, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_HEADER)
        for t, p in zip(report.grid, report.success_rate):
            w.writerow([_fmt(t), _fmt(p)])


def read_curve_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return [float(r[0]) for r in rows[1:]], [float(r[1]) for r in rows[1:]]


def plan_to_dict(result, metadata=None):
    segments = []
    for seg in result.segments:
        entry = {"kind": seg.kind, "joints": [[float(v) for v in q] for q in seg.joints]}
        if seg.kind == "regrasp":
            entry["object_pose"] = [float(v) for v in seg.object_poses[0]]
        else:
            entry["object_pose"] = [[float(v) for v in xi] for xi in seg.object_poses]
        segments.append(entry)
    return {"format": PATH_FORMAT, "metadata": dict(metadata or {}), "segments": segments}


def write_path_file(result, path, metadata=None):
    Path(path).write_text(json.dumps(plan_to_dict(result, metadata), indent=1) + "\n")


def read_path_file(path):
    """Path JSON as a dict; ``joints`` and ``object_pose`` entries become arrays."""
    data = json.loads(Path(path).read_text())
    if "segments" not in data:
        raise ValueError(f"{path}: not a path file")
    for seg in data["segments"]:
        seg["joints"] = [np.asarray(q, dtype=float) for q in seg["joints"]]
        pose = np.asarray(seg["object_pose"], dtype=float)
        seg["object_pose"] = pose
    return data
