"""Summaries, plots and a Markdown report computed from bundle CSVs alone.

``run`` and ``report`` share the summary functions here, so a report
regenerated from a bundle's CSVs matches what the run wrote.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from pathlib import Path

import numpy as np

from .bench import FitResult, fit_exponential
from .knots import (
    PHASE_EXPONENT,
    TABLE_PAIRS,
    BraidWord,
    JonesEstimate,
    _cov,
    jones_oracle,
    knot_distance,
    noise_fixed_point,
)
from .svg import PALETTE, Figure, padded

GRAY = "#9a9a9a"

_INT = {"n_mixed", "l", "cnots", "seed", "k", "writhe", "cnots_upper", "cnots_lower", "trial"}
_STR = {"word", "qubit_pair", "timestamp"}

_COLUMNS = {
    "sweep.csv": ("n_mixed", "l", "cnots", "theta", "sx_mean", "sx_err", "sy_mean", "sy_err",
                  "sz_mean", "sz_err", "seed", "timestamp"),
    "knots.csv": ("word", "k", "writhe", "cnots_upper", "cnots_lower", "trial", "re", "im", "seed",
                  "qubit_pair", "timestamp"),
    "oracle.csv": ("word", "k", "writhe", "re", "im", "abs"),
}


class ReportError(ValueError):
    """A bundle is missing, or its CSV is unreadable or malformed."""


def _complex(v: complex) -> dict:
    return {"re": float(v.real), "im": float(v.imag)}


def read_csv(path: Path) -> list[dict]:
    """Rows of a bundle CSV with typed values; checks the column contract."""
    path = Path(path)
    if not path.is_file():
        raise ReportError(f"missing CSV {path}")
    expected = _COLUMNS.get(path.name)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if expected is not None and tuple(reader.fieldnames or ()) != expected:
                raise ReportError(f"{path}: columns {reader.fieldnames} do not match {list(expected)}")
            rows = []
            for i, raw in enumerate(reader, start=2):
                if None in raw or any(v is None for v in raw.values()):
                    raise ReportError(f"{path}:{i}: wrong number of fields")
                row = {}
                for k, v in raw.items():
                    row[k] = v if k in _STR else int(v) if k in _INT else float(v)
                rows.append(row)
    except (ValueError, csv.Error, UnicodeDecodeError) as exc:
        if isinstance(exc, ReportError):
            raise
        raise ReportError(f"{path}: corrupt CSV ({exc})") from exc
    if not rows:
        raise ReportError(f"{path}: no data rows")
    return rows


def _groups(rows, *keys) -> dict:
    out: dict = {}
    for r in rows:
        out.setdefault(tuple(r[k] for k in keys), []).append(r)
    return out


# ---------------------------------------------------------------------------
# sweeps


def sweep_curves(rows) -> list[dict]:
    curves = []
    for (n, l), rs in _groups(rows, "n_mixed", "l").items():
        rs = sorted(rs, key=lambda r: r["theta"])
        curves.append({
            "n_mixed": n,
            "l": l,
            "cnots": rs[0]["cnots"],
            "theta": [r["theta"] for r in rs],
            "sx": [r["sx_mean"] for r in rs],
            "sy": [r["sy_mean"] for r in rs],
            "sz": [r["sz_mean"] for r in rs],
            "sx_err": [r["sx_err"] for r in rs],
            "visibility": max(r["sx_mean"] for r in rs),
            "coherent_error": max(abs(r["sy_mean"]) for r in rs),
        })
    return curves


def _fit(points) -> FitResult | str:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            return fit_exponential(points)
        except ValueError as exc:
            return str(exc)


def sweep_fits(curves) -> dict[int, FitResult | str]:
    """Exponential fit of visibility against CNOT count, one per width N."""
    out = {}
    for (n,), cs in _groups(curves, "n_mixed").items():
        out[n] = _fit([(c["cnots"], c["visibility"]) for c in cs])
    return out


def _fit_dict(f: FitResult | str) -> dict:
    if isinstance(f, str):
        return {"error": f}
    return {
        "a": f.a,
        "tau": f.tau if math.isfinite(f.tau) else None,
        "r_squared": f.r_squared if math.isfinite(f.r_squared) else None,
        "n_points": f.n_points,
        "dropped": f.dropped,
        "decaying": f.decaying,
    }


def sweep_summary(rows) -> dict:
    curves = sweep_curves(rows)
    fits = sweep_fits(curves)
    return {
        "curves": [
            {k: c[k] for k in ("n_mixed", "l", "cnots", "visibility", "coherent_error")} for c in curves
        ],
        "fits": [{"n_mixed": n, **_fit_dict(f)} for n, f in fits.items()],
    }


# ---------------------------------------------------------------------------
# knots


def _lookup_key(label: str) -> tuple:
    return BraidWord.parse(label).generators


def knot_estimates(rows, shots: int = 0) -> dict[tuple[str, str], JonesEstimate]:
    """Trial statistics per ``(qubit_pair, word)`` in CSV order."""
    out = {}
    for (pair, word), rs in _groups(rows, "qubit_pair", "word").items():
        rs = sorted(rs, key=lambda r: r["trial"])
        samples = [complex(r["re"], r["im"]) for r in rs]
        mean = complex(np.mean(samples))
        out[(pair, word)] = JonesEstimate(
            word=word, writhe=rs[0]["writhe"], value=mean, trials=len(rs), shots_per_trial=shots,
            mean=mean, cov=_cov(samples), cnots_upper=rs[0]["cnots_upper"], cnots_lower=rs[0]["cnots_lower"],
            qubit_pair=pair, timestamp=rs[0]["timestamp"], samples=tuple(samples),
            seeds=tuple(r["seed"] for r in rs),
        )
    return out


def _find(ests: dict, pair: str, word: str) -> JonesEstimate | None:
    if (pair, word) in ests:
        return ests[(pair, word)]
    key = _lookup_key(word)
    for (p, w), e in ests.items():
        if p == pair and _lookup_key(w) == key:
            return e
    return None


def table_distances(ests: dict, phase_exponent: int = PHASE_EXPONENT) -> list[dict]:
    """Measured vs exact distances for the reference word pairs that were run."""
    out = []
    pairs = list(dict.fromkeys(p for p, _ in ests))
    for pair in pairs:
        for w1, w2, published in TABLE_PAIRS:
            e1, e2 = _find(ests, pair, w1), _find(ests, pair, w2)
            if e1 is None or e2 is None:
                continue
            dist, err = knot_distance(e1, e2)
            exact = abs(jones_oracle(BraidWord.parse(w1), phase_exponent) - jones_oracle(BraidWord.parse(w2), phase_exponent))
            out.append({
                "qubit_pair": pair, "word1": w1, "word2": w2, "published_theory": published,
                "oracle": float(exact), "measured": dist, "err": err,
            })
    return out


def same_knot_distances(ests: dict, phase_exponent: int = PHASE_EXPONENT) -> list[dict]:
    """``|V(S12^k) - V(S23^k)|``; the words close to the same link, so ideally 0.

    The normalized column divides by the exact ``|V(S12^k)|``.
    """
    out = []
    pairs = list(dict.fromkeys(p for p, _ in ests))
    ks = sorted({len(BraidWord.parse(w)) for _, w in ests})
    for pair in pairs:
        for k in ks:
            e1, e2 = _find(ests, pair, f"S12^{k}"), _find(ests, pair, f"S23^{k}")
            if e1 is None or e2 is None or e1 is e2:
                continue
            dist, err = knot_distance(e1, e2)
            scale = abs(jones_oracle(BraidWord.power("S12", k), phase_exponent))
            row = {"qubit_pair": pair, "k": k, "distance": dist, "err": err}
            if scale > 1e-12:
                row["normalized"] = dist / scale
                row["normalized_err"] = err / scale
            out.append(row)
    return out


def knot_summary(rows, phase_exponent: int = PHASE_EXPONENT, shots: int = 0) -> dict:
    ests = knot_estimates(rows, shots)
    words = []
    for (pair, word), e in ests.items():
        w = BraidWord.parse(word)
        words.append({
            "qubit_pair": pair,
            "word": word,
            "writhe": e.writhe,
            "trials": e.trials,
            "cnots_upper": e.cnots_upper,
            "cnots_lower": e.cnots_lower,
            "oracle": _complex(jones_oracle(w, phase_exponent)),
            "fixed_point": _complex(noise_fixed_point(w, phase_exponent)),
            "mean": _complex(e.mean),
            "cov": [[float(x) for x in row] for row in e.cov],
            "oracle_distance": float(abs(e.mean - jones_oracle(w, phase_exponent))),
        })
    return {
        "phase_exponent": phase_exponent,
        "distance_convention": "raw",
        "words": words,
        "table_distances": table_distances(ests, phase_exponent),
        "same_knot_distances": same_knot_distances(ests, phase_exponent),
    }


def oracle_summary(rows, phase_exponent: int = PHASE_EXPONENT) -> dict:
    table = []
    for w1, w2, published in TABLE_PAIRS:
        d = abs(jones_oracle(BraidWord.parse(w1), phase_exponent) - jones_oracle(BraidWord.parse(w2), phase_exponent))
        table.append({"word1": w1, "word2": w2, "oracle": float(d), "published_theory": published})
    return {
        "phase_exponent": phase_exponent,
        "distance_convention": "raw",
        "values": [
            {"word": r["word"], "k": r["k"], "writhe": r["writhe"], "value": {"re": r["re"], "im": r["im"]},
             "abs": r["abs"]}
            for r in rows
        ],
        "table_distances": table,
    }


# ---------------------------------------------------------------------------
# figures


def _theta_figure(curves) -> Figure:
    widths = sorted({c["n_mixed"] for c in curves})
    fig = Figure(900, 60 + 260 * len(widths), "Trace sweeps")
    grid = fig.grid(len(widths), 3, ylim=(-1.1, 1.1), xlim=(0.0, 2 * math.pi), xlabel="theta")
    for row, n in zip(grid, widths):
        cs = [c for c in curves if c["n_mixed"] == n]
        for ax, axis in zip(row, ("sx", "sy", "sz")):
            ax.title = f"N={n}  <{axis}>"
            for i, c in enumerate(cs):
                ax.line(c["theta"], c[axis], PALETTE[i % len(PALETTE)], f"l={c['l']}")
            if axis == "sx" and cs:
                th = np.linspace(0, 2 * math.pi, 97)
                ax.line(th, np.cos(th / 2) ** n, GRAY, "ideal", dashed=True)
    return fig


def _visibility_figure(curves, fits, logy: bool = False) -> Figure:
    fig = Figure(560, 420, "Visibility vs CNOT count")
    xmax = max(c["cnots"] for c in curves) or 1
    vis = [c["visibility"] for c in curves]
    if logy:
        pos = [v for v in vis if v > 0] or [1.0]
        ylim = (10 ** math.floor(math.log10(min(pos))), 1.2)
    else:
        ylim = padded(min(0.0, min(vis)), max(1.0, max(vis)))
    ax = fig.add_axes(80, 40, 440, 320, xlim=(0.0, xmax * 1.05), ylim=ylim, logy=logy,
                      xlabel="CNOT gates", ylabel="visibility")
    for i, (n, f) in enumerate(fits.items()):
        color = PALETTE[i % len(PALETTE)]
        cs = [c for c in curves if c["n_mixed"] == n]
        ax.scatter([c["cnots"] for c in cs], [c["visibility"] for c in cs], color, f"1+{n}")
        if isinstance(f, FitResult) and math.isfinite(f.tau):
            xs = np.linspace(0, xmax, 60)
            ax.line(xs, f.predict(xs), color, f"fit tau={f.tau:.2f}", dashed=True)
    return fig


def _knot_figure(ests, pair: str, phase_exponent: int, title: str, overlay=None) -> Figure:
    """Complex-plane plot: 1-SD ellipses over trials, gray exact values."""
    sets = overlay if overlay is not None else [("", ests)]
    pts = []
    for _, es in sets:
        for (p, _), e in es.items():
            if p == pair:
                pts.append(e.mean)
                pts.append(jones_oracle(BraidWord.parse(e.word), phase_exponent))
    lim = max([abs(v.real) for v in pts] + [abs(v.imag) for v in pts] + [1.0]) * 1.15
    fig = Figure(520, 520, title)
    ax = fig.add_axes(80, 40, 400, 400, xlim=(-lim, lim), ylim=(-lim, lim), xlabel="Re V", ylabel="Im V")
    ax.line([-lim, lim], [0, 0], "#dddddd")
    ax.line([0, 0], [-lim, lim], "#dddddd")
    oracle_pts = {}
    for si, (tag, es) in enumerate(sets):
        families: dict[str, str] = {}
        for (p, word), e in es.items():
            if p != pair:
                continue
            gens = {g.value for g in BraidWord.parse(word).generators}
            fam = word.split("^")[0] if len(gens) <= 1 else "mixed"
            if fam not in families:
                families[fam] = PALETTE[(len(families) + 3 * si) % len(PALETTE)]
                ax.legend.append(((f"{tag} " if tag else "") + fam, families[fam], bool(si)))
            color = families[fam]
            ax.ellipse(e.mean.real, e.mean.imag, e.cov, color, dashed=bool(si), filled=not si)
            ax.scatter([e.mean.real], [e.mean.imag], color, r=2.0, text=[word] if not si else None)
            v = jones_oracle(BraidWord.parse(word), phase_exponent)
            oracle_pts[(round(v.real, 9), round(v.imag, 9))] = v
    vals = list(oracle_pts.values())
    ax.scatter([v.real for v in vals], [v.imag for v in vals], GRAY, "exact", r=3.5)
    return fig


def _distance_figure(rows) -> Figure:
    fig = Figure(560, 420, "Distance between S12^k and S23^k estimates")
    ks = [r["k"] for r in rows] or [1]
    vals = [r.get("normalized", r["distance"]) for r in rows] or [1.0]
    ax = fig.add_axes(80, 40, 440, 320, xlim=(min(ks) - 0.5, max(ks) + 0.5), ylim=padded(0.0, max(vals)),
                      xlabel="crossings k", ylabel="normalized distance")
    for i, ((pair,), rs) in enumerate(_groups(rows, "qubit_pair").items()):
        color = PALETTE[i % len(PALETTE)]
        rs = [r for r in rs if "normalized" in r]
        xs = [r["k"] for r in rs]
        ys = [r["normalized"] for r in rs]
        ax.line(xs, ys, color, pair if i < 10 else "")
        ax.scatter(xs, ys, color)
        ax.errorbars(xs, ys, [r["normalized_err"] for r in rs], color)
    return fig


def _oracle_figure(rows) -> Figure:
    vals = [complex(r["re"], r["im"]) for r in rows]
    lim = max([abs(v.real) for v in vals] + [abs(v.imag) for v in vals] + [1.0]) * 1.2
    fig = Figure(520, 520, "Exact Jones values")
    ax = fig.add_axes(80, 40, 400, 400, xlim=(-lim, lim), ylim=(-lim, lim), xlabel="Re V", ylabel="Im V")
    ax.scatter([v.real for v in vals], [v.imag for v in vals], GRAY, r=3.5, text=[r["word"] for r in rows])
    return fig


# ---------------------------------------------------------------------------
# report


def _load_config(bundle: Path) -> dict:
    path = bundle / "config.json"
    if not path.is_file():
        raise ReportError(f"{bundle} has no config.json; not a result bundle")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ReportError(f"{path}: corrupt JSON ({exc})") from exc


def _fmt(v, digits=4) -> str:
    if v is None:
        return "-"
    return f"{v:.{digits}f}"


def _sweep_report(bundle: Path, out: Path, logy: bool) -> tuple[list[Path], list[str]]:
    curves = sweep_curves(read_csv(bundle / "sweep.csv"))
    fits = sweep_fits(curves)
    paths = [out / "trace_sweep.svg", out / "visibility.svg"]
    _theta_figure(curves).save(paths[0])
    _visibility_figure(curves, fits, logy).save(paths[1])
    md = ["## Visibility", "", "| N | l | CNOTs | visibility | max abs(sy) |", "|---|---|---|---|---|"]
    for c in curves:
        md.append(f"| {c['n_mixed']} | {c['l']} | {c['cnots']} | {_fmt(c['visibility'])} | {_fmt(c['coherent_error'])} |")
    md += ["", "## Exponential fits", "", "| N | tau (CNOTs) | R^2 | points | dropped |", "|---|---|---|---|---|"]
    for n, f in fits.items():
        if isinstance(f, str):
            md.append(f"| {n} | - | - | - | {f} |")
        else:
            md.append(f"| {n} | {_fmt(f.tau, 2)} | {_fmt(f.r_squared, 3)} | {f.n_points} | {f.dropped} |")
    return paths, md


def _knots_report(bundle: Path, out: Path, cfg: dict) -> tuple[list[Path], list[str]]:
    pe = cfg.get("knots", {}).get("phase_exponent", PHASE_EXPONENT)
    ests = knot_estimates(read_csv(bundle / "knots.csv"), cfg.get("shots", 0))
    pairs = list(dict.fromkeys(p for p, _ in ests))
    paths = [out / "knots_plane.svg", out / "knot_distances.svg"]
    _knot_figure(ests, pairs[0], pe, f"Jones estimates ({pairs[0]})").save(paths[0])
    same = same_knot_distances(ests, pe)
    _distance_figure(same).save(paths[1])
    md = ["## Jones estimates", "", "| pair | word | writhe | CNOTs (u/l) | mean | exact | abs(mean - exact) |",
          "|---|---|---|---|---|---|---|"]
    for (pair, word), e in ests.items():
        v = jones_oracle(BraidWord.parse(word), pe)
        md.append(
            f"| {pair} | {word} | {e.writhe} | {e.cnots_upper}/{e.cnots_lower} | {e.mean.real:.3f}{e.mean.imag:+.3f}i "
            f"| {v.real:.3f}{v.imag:+.3f}i | {abs(e.mean - v):.3f} |"
        )
    md += ["", "## Distances between word pairs (raw)", "", "| pair | words | exact | measured |", "|---|---|---|---|"]
    for r in table_distances(ests, pe):
        md.append(f"| {r['qubit_pair']} | {r['word1']} vs {r['word2']} | {r['oracle']:.2f} | {r['measured']:.2f} ± {r['err']:.2f} |")
    if same:
        md += ["", "## Same-link distances, normalized by the exact value", "", "| pair | k | normalized distance |",
               "|---|---|---|"]
        for r in same:
            if "normalized" in r:
                md.append(f"| {r['qubit_pair']} | {r['k']} | {r['normalized']:.3f} ± {r['normalized_err']:.3f} |")
    return paths, md


def _oracle_report(bundle: Path, out: Path, cfg: dict) -> tuple[list[Path], list[str]]:
    pe = cfg.get("knots", {}).get("phase_exponent", PHASE_EXPONENT)
    rows = read_csv(bundle / "oracle.csv")
    paths = [out / "oracle_plane.svg"]
    _oracle_figure(rows).save(paths[0])
    md = ["## Exact Jones values", "", "| word | writhe | value | abs |", "|---|---|---|---|"]
    for r in rows:
        md.append(f"| {r['word']} | {r['writhe']} | {r['re']:.4f}{r['im']:+.4f}i | {r['abs']:.4f} |")
    md += ["", "## Reference distances (raw)", "", "| words | exact | published |", "|---|---|---|"]
    for t in oracle_summary(rows, pe)["table_distances"]:
        md.append(f"| {t['word1']} vs {t['word2']} | {t['oracle']:.4f} | {t['published_theory']} |")
    return paths, md


def _overlay_report(bundles, out: Path) -> tuple[list[Path], list[str]]:
    sets = []
    pe = PHASE_EXPONENT
    for b in bundles:
        cfg = _load_config(b)
        if cfg.get("suite") != "knots":
            raise ReportError(f"overlay needs knots bundles; {b} is {cfg.get('suite')!r}")
        pe = cfg.get("knots", {}).get("phase_exponent", PHASE_EXPONENT)
        ests = knot_estimates(read_csv(b / "knots.csv"), cfg.get("shots", 0))
        sets.append((cfg.get("now") or b.name, ests))
    pair = next(iter(sets[0][1]))[0]
    path = out / "knots_overlay.svg"
    _knot_figure(None, pair, pe, f"Jones estimates on different dates ({pair})", overlay=sets).save(path)
    md = ["## Overlay", "", "| date | word | mean | abs(mean - exact) |", "|---|---|---|---|"]
    for tag, ests in sets:
        for (p, word), e in ests.items():
            if p == pair:
                v = jones_oracle(BraidWord.parse(word), pe)
                md.append(f"| {tag} | {word} | {e.mean.real:.3f}{e.mean.imag:+.3f}i | {abs(e.mean - v):.3f} |")
    return [path], md


def report(bundles, out=None, logy: bool = False) -> list[Path]:
    """Regenerate SVG plots and ``report.md`` from bundle CSVs.

    One bundle gives the suite's own plots; several knots bundles (for
    example runs on different dates with drift) give an overlay plot.
    """
    if isinstance(bundles, (str, Path)):
        bundles = [bundles]
    bundles = [Path(b) for b in bundles]
    if not bundles:
        raise ReportError("no bundle given")
    for b in bundles:
        if not b.is_dir():
            raise ReportError(f"bundle {b} does not exist")
    out = Path(out) if out is not None else bundles[0]
    out.mkdir(parents=True, exist_ok=True)

    if len(bundles) > 1:
        paths, md = _overlay_report(bundles, out)
        title = "Knot estimates across runs"
    else:
        cfg = _load_config(bundles[0])
        suite = cfg.get("suite")
        if suite in ("trace-sweep", "visibility"):
            paths, md = _sweep_report(bundles[0], out, logy)
        elif suite == "knots":
            paths, md = _knots_report(bundles[0], out, cfg)
        elif suite == "oracle":
            paths, md = _oracle_report(bundles[0], out, cfg)
        else:
            raise ReportError(f"unknown suite {suite!r} in config.json")
        title = f"{suite} report"
    head = [f"# {title}", ""]
    (out / "report.md").write_text("\n".join(head + md) + "\n", encoding="utf-8")
    return paths
