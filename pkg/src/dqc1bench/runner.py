"""Experiment orchestration: run a suite, write a result bundle atomically.

A bundle directory holds the effective config echo (``config.json``), one
CSV per suite, ``summary.json``, SVG plots, ``report.md`` and a
``manifest.json`` with the toolkit version and wall-clock duration. Everything
except the manifest is a pure function of (config, seed, version).
"""

from __future__ import annotations

import csv
import io
import json
import os
import shutil
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from .bench import sweep_payload, theta_grid, theta_sweep
from .circuit import build_dqc1_circuit
from .config import ExperimentConfig
from .knots import BraidWord, block_circuits, estimate_jones, jones_oracle, preset_words, writhe
from .noise import derive_seed, format_time
from .qstate import PauliAxis
from .report import knot_summary, oracle_summary, report, sweep_summary

__version__ = "0.1.0"

OUT_ENV = "DQC1BENCH_OUT"

SWEEP_COLUMNS = (
    "n_mixed", "l", "cnots", "theta", "sx_mean", "sx_err", "sy_mean", "sy_err",
    "sz_mean", "sz_err", "seed", "timestamp",
)
KNOT_COLUMNS = (
    "word", "k", "writhe", "cnots_upper", "cnots_lower", "trial", "re", "im", "seed",
    "qubit_pair", "timestamp",
)
ORACLE_COLUMNS = ("word", "k", "writhe", "re", "im", "abs")

CSV_NAMES = {"trace-sweep": "sweep.csv", "visibility": "sweep.csv", "knots": "knots.csv", "oracle": "oracle.csv"}


class BundleError(OSError):
    """Output directory cannot be written or would clobber something else."""


@dataclass(frozen=True)
class ResultBundle:
    path: Path
    config: ExperimentConfig
    csv_paths: tuple[Path, ...]
    summary_path: Path
    svg_paths: tuple[Path, ...]
    version: str = __version__
    duration: float = 0.0
    summary: dict = field(default_factory=dict, repr=False, compare=False)


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# suites


def knot_words(cfg: ExperimentConfig) -> list[tuple[str, int, BraidWord]]:
    """``(label, k, word)`` with ``k`` the crossing count.

    Preset words are labelled ``S12^k`` even for k = 0 and 1 so the two
    generator families stay distinguishable in the CSV.
    """
    if cfg.knots.words is not None:
        out = []
        for text in cfg.knots.words:
            w = BraidWord.parse(text)
            out.append((str(w), len(w), w))
        return out
    return [(f"{g}^{k}", k, w) for g, k, w in preset_words(cfg.knots.k_max, cfg.knots.generators)]


def sweep_rows(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    ts = format_time(cfg.timestamp)
    for n in cfg.sweep.n_mixed:
        for l in cfg.sweep.l:
            curve = theta_sweep(
                n, l, cfg.grid, cfg.noise, cfg.shots, derive_seed(cfg.seed, "sweep", n, l), cfg.timestamp,
                prep=cfg.sweep.prep, restrict_widths=cfg.sweep.restrict_widths,
            )
            for p in curve.points:
                rows.append({
                    "n_mixed": n, "l": l, "cnots": curve.cnots, "theta": p.theta,
                    "sx_mean": p.sx.mean, "sx_err": p.sx.stderr,
                    "sy_mean": p.sy.mean, "sy_err": p.sy.stderr,
                    "sz_mean": p.sz.mean, "sz_err": p.sz.stderr,
                    "seed": p.seed, "timestamp": ts,
                })
    return rows


def knot_rows(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    for pair in cfg.knots.qubit_pairs:
        for label, k, w in knot_words(cfg):
            est = estimate_jones(
                w, cfg.noise, cfg.shots, cfg.trials, pair, derive_seed(cfg.seed, pair, label), cfg.timestamp,
                prep=cfg.knots.prep, phase_exponent=cfg.knots.phase_exponent,
            )
            for t, (v, s) in enumerate(zip(est.samples, est.seeds)):
                rows.append({
                    "word": label, "k": k, "writhe": est.writhe,
                    "cnots_upper": est.cnots_upper, "cnots_lower": est.cnots_lower,
                    "trial": t, "re": float(v.real), "im": float(v.imag), "seed": s,
                    "qubit_pair": pair, "timestamp": est.timestamp,
                })
    return rows


def oracle_rows(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    for label, k, w in knot_words(cfg):
        v = jones_oracle(w, cfg.knots.phase_exponent)
        rows.append({
            "word": label, "k": k, "writhe": writhe(w),
            "re": float(v.real), "im": float(v.imag), "abs": float(abs(v)),
        })
    return rows


def circuits_document(cfg: ExperimentConfig) -> dict:
    """Compiled circuits of a suite, keyed by a readable label."""
    out = {}
    if cfg.suite in ("trace-sweep", "visibility"):
        thetas = theta_grid(cfg.grid)
        for n in cfg.sweep.n_mixed:
            for l in cfg.sweep.l:
                for i, theta in enumerate(thetas):
                    c = build_dqc1_circuit(sweep_payload(n, l, float(theta)), n, PauliAxis.X)
                    out[f"N={n} l={l} theta[{i}] x-readout"] = c.to_dict()
    else:
        for label, _, w in knot_words(cfg):
            upper, lower = block_circuits(w)
            out[f"{label} upper"] = upper.to_dict()
            out[f"{label} lower"] = lower.to_dict()
    return out


def execute(cfg: ExperimentConfig) -> tuple[str, list[dict], dict]:
    """Run the suite in memory: ``(csv name, rows, summary)``."""
    if cfg.suite in ("trace-sweep", "visibility"):
        rows = sweep_rows(cfg)
        summary = sweep_summary(rows)
    elif cfg.suite == "knots":
        rows = knot_rows(cfg)
        summary = knot_summary(rows, cfg.knots.phase_exponent, cfg.shots)
    elif cfg.suite == "oracle":
        rows = oracle_rows(cfg)
        summary = oracle_summary(rows, cfg.knots.phase_exponent)
    else:
        raise ValueError(f"unknown suite {cfg.suite!r}")
    summary = {"suite": cfg.suite, "seed": cfg.seed, "version": __version__, **summary}
    return CSV_NAMES[cfg.suite], rows, summary


# ---------------------------------------------------------------------------
# bundle writing


def default_out(cfg: ExperimentConfig) -> Path:
    if cfg.out:
        return Path(cfg.out)
    base = os.environ.get(OUT_ENV)
    return Path(base) / cfg.suite if base else Path("results") / cfg.suite


def _is_bundle(path: Path) -> bool:
    return (path / "manifest.json").is_file()


def _commit(tmp: Path, dest: Path) -> None:
    """Move ``tmp`` into place; an existing bundle is replaced, anything else refused."""
    if dest.exists():
        if not dest.is_dir():
            raise BundleError(f"{dest} exists and is not a directory")
        if any(dest.iterdir()) and not _is_bundle(dest):
            raise BundleError(f"{dest} is a non-empty directory that is not a result bundle")
        old = Path(tempfile.mkdtemp(prefix=f".{dest.name}.old-", dir=dest.parent))
        os.replace(dest, old / dest.name)
        try:
            os.replace(tmp, dest)
        except OSError:
            os.replace(old / dest.name, dest)
            raise
        shutil.rmtree(old, ignore_errors=True)
    else:
        os.replace(tmp, dest)


def run(cfg: ExperimentConfig, out: str | os.PathLike | None = None, dump_circuit: bool = False) -> ResultBundle:
    """Execute ``cfg`` and write its bundle to ``out`` (or the config/env default)."""
    start = time.perf_counter()
    dest = Path(out) if out is not None else default_out(cfg)
    csv_name, rows, summary = execute(cfg)
    columns = {"sweep.csv": SWEEP_COLUMNS, "knots.csv": KNOT_COLUMNS, "oracle.csv": ORACLE_COLUMNS}[csv_name]

    try:
        dest.parent.mkdir(parents=True, exist_ok=True)
        tmp = Path(tempfile.mkdtemp(prefix=f".{dest.name}.tmp-", dir=dest.parent))
    except OSError as exc:
        raise BundleError(f"cannot create output directory next to {dest}: {exc}") from exc
    try:
        (tmp / "config.json").write_text(cfg.to_json(), encoding="utf-8")
        (tmp / csv_name).write_text(csv_text(columns, rows), encoding="utf-8")
        (tmp / "summary.json").write_text(dump_json(summary), encoding="utf-8")
        if dump_circuit:
            (tmp / "circuits.json").write_text(dump_json(circuits_document(cfg)), encoding="utf-8")
        svgs = report([tmp], tmp)
        duration = time.perf_counter() - start
        files = sorted(p.name for p in tmp.iterdir()) + ["manifest.json"]
        manifest = {
            "version": __version__,
            "suite": cfg.suite,
            "duration_seconds": round(duration, 3),
            "files": sorted(files),
        }
        (tmp / "manifest.json").write_text(dump_json(manifest), encoding="utf-8")
        _commit(tmp, dest)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    return ResultBundle(
        path=dest,
        config=cfg,
        csv_paths=(dest / csv_name,),
        summary_path=dest / "summary.json",
        svg_paths=tuple(dest / p.name for p in svgs),
        duration=duration,
        summary=summary,
    )
