# %% [markdown]
# # A small benchmark and its metrics
#
# `run_benchmark` writes `trials.csv` as it goes; the success-rate curve
# `p(t)` and trimmed time statistics are computed from the records.

# %%
import tempfile
from pathlib import Path

from tcbirrt.bench import (
    generate_tasks,
    load_scene,
    run_benchmark,
    summarize,
    validate_path_file,
    write_curve_csv,
)

scene = load_scene("desk_tier2")
world = scene.world()
tasks = generate_tasks(scene, 8, rng=0, world=world)
print("resamples while generating:", sum(t.resamples for t in tasks))

# %%
out = Path(tempfile.mkdtemp())
records = run_benchmark(scene, tasks, timeout=60.0, seed=0, out_dir=out, world=world, clock="work")
print((out / "trials.csv").read_text())

# %%
report = summarize(records, 60.0, n_t_min=5)
write_curve_csv(report, out / "curve.csv")
for t, p in list(zip(report.grid, report.success_rate))[::20]:
    print(f"p({t:7.2f} s) = {p:.3f}")
print("trimmed mean %.3f s, std %.3f s over the 5 fastest" % (report.mean_time, report.std_time))

# %%
for path in sorted((out / "paths").glob("*.json"))[:3]:
    print(path.name, "valid:", validate_path_file(path, scene, world).ok)
