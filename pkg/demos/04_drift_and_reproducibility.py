"""Day-to-day drift and reproducible bundles.

The coherent error angle performs a seeded Gaussian random walk, one step per
elapsed day since the calibration epoch, so rerunning "the same" experiment a
few days later gives a different but reproducible answer. Writing a bundle
twice from the same config gives byte-identical CSVs.
"""

import tempfile
from pathlib import Path

from dqc1bench import NoiseModel
from dqc1bench.config import load
from dqc1bench.noise import Drift, drifted_eps
from dqc1bench.runner import run

m = NoiseModel(coherent_eps=0.04, drift=Drift(sigma_per_day=0.03, seed=5))
for day in ("2019-02-22", "2019-03-01", "2019-03-06"):
    print(f"{day}: eps = {drifted_eps(m, day + 'T00:00:00Z'):+.4f}")

configs = Path(__file__).parent.parent / "configs"
with tempfile.TemporaryDirectory() as tmp:
    a = run(load(configs / "knots_drift_day0.json"), Path(tmp) / "a")
    b = run(load(configs / "knots_drift_day0.json"), Path(tmp) / "b")
    c = run(load(configs / "knots_drift_day5.json"), Path(tmp) / "c")
    same = a.csv_paths[0].read_bytes() == b.csv_paths[0].read_bytes()
    print(f"same config twice -> identical CSV: {same}")
    for bundle in (a, c):
        rows = bundle.summary["words"]
        worst = max(r["oracle_distance"] for r in rows)
        print(f"{bundle.config.now}: worst |estimate - exact| = {worst:.3f}")
