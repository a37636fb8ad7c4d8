"""Visibility benchmark: θ-sweeps of repeated controlled phase rotations.

The payload for repetition count ``l`` is ``U (U† U)^(l-1)`` with
``U = U1(θ)^{⊗N}`` and ``U1(θ) = diag(e^{-iθ/2}, e^{iθ/2})``. Logically it is
just ``U``, so the ideal readout is ``<σx> = cos^N(θ/2)`` for every ``l``;
the circuit length, and with it the accumulated noise, grows as ``2l - 1``
controlled applications.

Note: the normalized trace ``cos(θ/2)`` reaches -1 at θ = 2π (not at π), so
sweeps cover ``[0, 2π]``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from .circuit import Circuit, compile_controlled_2x2, concat, cnot_count
from .dqc1 import ExactExpectations, PrepStrategy, TraceEstimate, sample_estimate, simulate_expectations
from .noise import NoiseModel, ShotEstimate, derive_seed, format_time, parse_time

DEFAULT_GRID = 25
PRESET_WIDTHS = (1, 3)


def u1(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def sweep_payload(n_mixed: int, l: int, theta: float) -> Circuit:
    """Controlled ``U_N^{(l)}(θ)`` with qubit 0 as control; empty for ``l = 0``."""
    if l < 0:
        raise ValueError("repetition count l must be >= 0")
    n = 1 + n_mixed
    if l == 0:
        return Circuit(n, (), f"N={n_mixed} l=0")

    def layer(t: float) -> list[Circuit]:
        return [
            compile_controlled_2x2(u1(t), control=0, target=j, num_qubits=n, simplify=False)
            for j in range(1, n_mixed + 1)
        ]

    parts: list[Circuit] = []
    for _ in range(l - 1):
        parts += layer(theta) + layer(-theta)  # U then U†
    parts += layer(theta)
    return concat(parts, n, f"N={n_mixed} l={l}")


def sweep_cnots(n_mixed: int, l: int) -> int:
    return 0 if l == 0 else 2 * n_mixed * (2 * l - 1)


@dataclass(frozen=True)
class SweepPoint:
    theta: float
    sx: ShotEstimate
    sy: ShotEstimate
    sz: ShotEstimate
    seed: int | None = None


@dataclass(frozen=True)
class SweepCurve:
    n_mixed: int
    l: int
    cnots: int
    points: tuple[SweepPoint, ...]
    seed: int = 0
    timestamp: str = ""
    exact: tuple[ExactExpectations, ...] = field(default=(), repr=False, compare=False)

    @property
    def thetas(self) -> np.ndarray:
        return np.array([p.theta for p in self.points])

    def series(self, axis: str) -> np.ndarray:
        return np.array([getattr(p, axis).mean for p in self.points])


def theta_grid(grid: int) -> np.ndarray:
    if grid < 2:
        raise ValueError("grid needs at least 2 points")
    return np.linspace(0.0, 2 * math.pi, grid)


def theta_sweep(
    n_mixed: int,
    l: int,
    grid: int = DEFAULT_GRID,
    model: NoiseModel | None = None,
    shots: int = 0,
    seed: int = 0,
    now: datetime | str | None = None,
    *,
    prep: PrepStrategy | str = PrepStrategy.DIRECT_MIXED,
    restrict_widths: bool = False,
) -> SweepCurve:
    """One trace estimate per θ on a uniform grid over ``[0, 2π]``.

    With ``restrict_widths=True`` only the widths used in the original
    experiments (N = 1 or 3) are accepted.
    """
    if restrict_widths and n_mixed not in PRESET_WIDTHS:
        raise ValueError(f"restricted sweeps run N in {PRESET_WIDTHS}, got {n_mixed}")
    model = NoiseModel.noiseless() if model is None else model
    now = parse_time(now)
    exact = []
    for theta in theta_grid(grid):
        payload = sweep_payload(n_mixed, l, float(theta))
        exact.append(simulate_expectations(payload, n_mixed, prep, model, seed, now))
    curve = SweepCurve(n_mixed, l, exact[0].cnots, (), seed, format_time(now), tuple(exact))
    return resample(curve, shots, seed, model.readout_flip)


def resample(curve: SweepCurve, shots: int, seed: int, readout_flip: float = 0.0) -> SweepCurve:
    """Redraw the shot noise of ``curve`` under a new seed (channel output reused)."""
    if not curve.exact:
        raise ValueError("curve carries no channel expectations to resample")
    points = []
    thetas = theta_grid(len(curve.exact))
    for i, (theta, ex) in enumerate(zip(thetas, curve.exact)):
        point_seed = derive_seed(seed, "theta", i)
        est: TraceEstimate = sample_estimate(ex, shots, point_seed, readout_flip)
        points.append(SweepPoint(float(theta), est.re, est.im, est.z_diag, point_seed))
    return SweepCurve(curve.n_mixed, curve.l, curve.cnots, tuple(points), seed, curve.timestamp, curve.exact)


def visibility(curve: SweepCurve) -> float:
    if not curve.points:
        raise ValueError("empty curve")
    return float(max(p.sx.mean for p in curve.points))


def coherent_error_metric(curve: SweepCurve) -> float:
    """Largest ``|<σy>|`` over the sweep; the ideal value is 0 everywhere."""
    if not curve.points:
        raise ValueError("empty curve")
    return float(max(abs(p.sy.mean) for p in curve.points))


@dataclass(frozen=True)
class FitResult:
    a: float
    tau: float
    r_squared: float
    n_points: int
    dropped: int = 0
    decaying: bool = True

    def predict(self, x) -> np.ndarray:
        return self.a * np.exp(-np.asarray(x, dtype=float) / self.tau)


def r_squared(y, f) -> float:
    y, f = np.asarray(y, dtype=float), np.asarray(f, dtype=float)
    ss_res = float(np.sum((y - f) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    # constant data up to rounding: R² is undefined, report a perfect or hopeless fit
    floor = len(y) * (1e-12 * float(np.max(np.abs(y)))) ** 2 if len(y) else 0.0
    if ss_tot <= floor:
        return 1.0 if ss_res <= floor else -math.inf
    return 1.0 - ss_res / ss_tot


def fit_exponential(points) -> FitResult:
    """Fit ``a·exp(-x/τ)`` by a least-squares line through ``(x, ln y)``.

    Non-positive ``y`` cannot be logged and are dropped with a warning.
    R² is evaluated on the original ``y`` values, not the logs. If the data
    do not decay the fitted τ is reported as-is with ``decaying=False``.
    """
    pts = [(float(x), float(y)) for x, y in points]
    usable = [(x, y) for x, y in pts if y > 0]
    dropped = len(pts) - len(usable)
    if dropped:
        warnings.warn(f"dropped {dropped} non-positive visibilities before the log fit", stacklevel=2)
    if len(usable) < 3:
        raise ValueError(f"need at least 3 positive points to fit, got {len(usable)}")
    x = np.array([p[0] for p in usable])
    y = np.array([p[1] for p in usable])
    if np.ptp(x) <= 1e-9 * max(1.0, float(np.max(np.abs(x)))):
        raise ValueError("x values (CNOT counts) must not all coincide")
    slope, intercept = np.polyfit(x, np.log(y), 1)
    a = float(math.exp(intercept))
    tau = -1.0 / slope if slope != 0 else math.inf
    fit = a * np.exp(-x / tau) if math.isfinite(tau) else np.full_like(x, a)
    return FitResult(a, float(tau), r_squared(y, fit), len(usable), dropped, bool(slope < 0))


def visibility_series(
    n_mixed: int,
    ls,
    model: NoiseModel | None = None,
    shots: int = 0,
    seed: int = 0,
    now: datetime | str | None = None,
    grid: int = DEFAULT_GRID,
    prep: PrepStrategy | str = PrepStrategy.DIRECT_MIXED,
) -> list[SweepCurve]:
    """Sweeps for each repetition count in ``ls`` (independent seeds per ``l``)."""
    return [
        theta_sweep(n_mixed, l, grid, model, shots, derive_seed(seed, "l", l), now, prep=prep)
        for l in ls
    ]


def visibility_points(curves) -> list[tuple[int, float]]:
    return [(c.cnots, visibility(c)) for c in curves]


def check_cnots(curve: SweepCurve) -> None:
    payload = sweep_payload(curve.n_mixed, curve.l, 0.0)
    if cnot_count(payload) != curve.cnots:
        raise AssertionError(f"curve reports {curve.cnots} CNOTs, compiled payload has {cnot_count(payload)}")
