"""Gate noise, readout sampling and calibration drift.

Every gate is followed by a depolarizing channel ``ρ → αρ + (1-α) 𝟙/d``.
CNOTs additionally carry a systematic (coherent) error whose angle performs
a per-day Gaussian random walk, so experiments run on different dates see
different systematic errors.
"""

from __future__ import annotations

import dataclasses
import math
import zlib
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from functools import lru_cache
from typing import Mapping

import numpy as np

from .circuit import Circuit, Gate
from .qstate import X, Y, Z, DensityMatrix, apply_unitary

DEFAULT_EPOCH = datetime(2019, 2, 22, tzinfo=timezone.utc)
DEFAULT_DEPOL_2Q = math.exp(-1 / 25.81)
# assumed ten times better than a CNOT
DEFAULT_DEPOL_1Q = math.exp(-1 / 250)
DEFAULT_DRIFT_SIGMA = 0.02

COHERENT_KINDS = ("zz", "control_rz", "target_rx")


def parse_time(value: datetime | str | None) -> datetime:
    if value is None:
        return DEFAULT_EPOCH
    if isinstance(value, str):
        value = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value


def format_time(value: datetime) -> str:
    return parse_time(value).astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _key_int(key) -> int:
    if isinstance(key, (int, np.integer)):
        return int(key) & 0xFFFFFFFF
    return zlib.crc32(str(key).encode())


def derive_seed(seed: int, *keys) -> int:
    """Child seed for the named stream ``keys`` under ``seed``.

    Streams with different keys are statistically independent; the mapping
    is stable across runs and platforms.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(_key_int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def pair_key(a: int, b: int) -> str:
    lo, hi = sorted((int(a), int(b)))
    return f"{lo}-{hi}"


@dataclass(frozen=True)
class PairNoise:
    depol_2q: float | None = None
    coherent_eps: float | None = None


@dataclass(frozen=True)
class Drift:
    sigma_per_day: float = DEFAULT_DRIFT_SIGMA
    epoch: datetime = DEFAULT_EPOCH
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "epoch", parse_time(self.epoch))
        if self.sigma_per_day < 0:
            raise ValueError("drift sigma_per_day must be non-negative")


@dataclass(frozen=True)
class NoiseModel:
    depol_1q: float = DEFAULT_DEPOL_1Q
    depol_2q: float = DEFAULT_DEPOL_2Q
    coherent_eps: float = 0.0
    coherent_kind: str = "control_rz"
    drift: Drift = field(default_factory=Drift)
    readout_flip: float = 0.0
    pair_profile: Mapping[str, PairNoise] = field(default_factory=dict)
    local_depolarizing: bool = False

    def __post_init__(self):
        for name in ("depol_1q", "depol_2q"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must be in (0, 1], got {v}")
        if not math.isfinite(self.coherent_eps):
            raise ValueError("coherent_eps must be finite")
        if self.coherent_kind not in COHERENT_KINDS:
            raise ValueError(f"coherent_kind must be one of {COHERENT_KINDS}")
        if not 0 <= self.readout_flip < 0.5:
            raise ValueError(f"readout_flip must be in [0, 0.5), got {self.readout_flip}")
        for label, p in self.pair_profile.items():
            if p.depol_2q is not None and not 0 < p.depol_2q <= 1:
                raise ValueError(f"pair {label}: depol_2q must be in (0, 1]")
            if p.coherent_eps is not None and not math.isfinite(p.coherent_eps):
                raise ValueError(f"pair {label}: coherent_eps must be finite")

    @classmethod
    def noiseless(cls) -> "NoiseModel":
        return cls(depol_1q=1.0, depol_2q=1.0, coherent_eps=0.0, drift=Drift(sigma_per_day=0.0))

    @classmethod
    def depolarizing(cls, depol_2q: float, depol_1q: float = 1.0) -> "NoiseModel":
        return cls(depol_1q=depol_1q, depol_2q=depol_2q, coherent_eps=0.0, drift=Drift(sigma_per_day=0.0))

    def replace(self, **changes) -> "NoiseModel":
        return dataclasses.replace(self, **changes)

    @property
    def is_noiseless(self) -> bool:
        return (
            self.depol_1q == 1
            and self.depol_2q == 1
            and self.coherent_eps == 0
            and self.drift.sigma_per_day == 0
            and self.readout_flip == 0
            and not self.pair_profile
        )

    def for_pair(self, label: str | None) -> "NoiseModel":
        """Model with the profile of physical pair ``label`` as its defaults.

        The drift stream is re-seeded per label so pairs drift independently;
        labels without a profile keep the base purity and error angle.
        """
        if label is None:
            return self
        p = self.pair_profile.get(label, PairNoise())
        return dataclasses.replace(
            self,
            depol_2q=self.depol_2q if p.depol_2q is None else p.depol_2q,
            coherent_eps=self.coherent_eps if p.coherent_eps is None else p.coherent_eps,
            drift=dataclasses.replace(self.drift, seed=derive_seed(self.drift.seed, "pair", label)),
            pair_profile={},
        )

    def pair_params(self, a: int, b: int) -> tuple[float, float, int]:
        """(depol_2q, base coherent eps, drift seed) for a CNOT on qubits ``a``, ``b``."""
        key = pair_key(a, b)
        p = self.pair_profile.get(key)
        if p is None:
            return self.depol_2q, self.coherent_eps, self.drift.seed
        return (
            self.depol_2q if p.depol_2q is None else p.depol_2q,
            self.coherent_eps if p.coherent_eps is None else p.coherent_eps,
            derive_seed(self.drift.seed, "pair", key),
        )

    def to_dict(self) -> dict:
        return {
            "depol_1q": self.depol_1q,
            "depol_2q": self.depol_2q,
            "coherent_eps": self.coherent_eps,
            "coherent_kind": self.coherent_kind,
            "drift": {
                "sigma_per_day": self.drift.sigma_per_day,
                "epoch": format_time(self.drift.epoch),
                "seed": self.drift.seed,
            },
            "readout_flip": self.readout_flip,
            "pair_profile": {
                k: {kk: vv for kk, vv in dataclasses.asdict(v).items() if vv is not None}
                for k, v in sorted(self.pair_profile.items())
            },
            "local_depolarizing": self.local_depolarizing,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "NoiseModel":
        d = dict(d)
        if "drift" in d:
            d["drift"] = Drift(**d["drift"])
        if "pair_profile" in d:
            d["pair_profile"] = {k: PairNoise(**v) for k, v in d["pair_profile"].items()}
        return cls(**d)


@dataclass(frozen=True)
class ShotEstimate:
    """Mean of ±1 readouts. ``shots == 0`` marks an exact (infinite-shot) value."""

    mean: float
    stderr: float
    shots: int
    seed: int | None = None

    @classmethod
    def from_mean(cls, mean: float, shots: int, seed: int | None = None) -> "ShotEstimate":
        if shots == 0:
            return cls(float(mean), 0.0, 0, seed)
        return cls(float(mean), math.sqrt(max(0.0, 1.0 - mean * mean) / shots), int(shots), seed)


# ---------------------------------------------------------------------------
# drift


def elapsed_days(m: NoiseModel, now: datetime | str | None) -> int:
    now = parse_time(now)
    if now < m.drift.epoch:
        raise ValueError(f"time {now} is before the drift epoch {m.drift.epoch}")
    return (now - m.drift.epoch) // timedelta(days=1)


@lru_cache(maxsize=4096)
def _walk(seed: int, days: int, sigma: float) -> float:
    if days == 0 or sigma == 0:
        return 0.0
    steps = np.random.default_rng(seed).normal(0.0, sigma, size=days)
    return float(np.sum(steps))


def drifted_eps(
    m: NoiseModel,
    now: datetime | str | None,
    rng_seed: int | None = None,
    base_eps: float | None = None,
) -> float:
    """Coherent error angle on date ``now``: ``base + Σ N(0, σ²)`` over whole elapsed days."""
    days = elapsed_days(m, now)
    seed = m.drift.seed if rng_seed is None else rng_seed
    base = m.coherent_eps if base_eps is None else base_eps
    return base + _walk(int(seed), int(days), float(m.drift.sigma_per_day))


# ---------------------------------------------------------------------------
# channels


def coherent_error_unitary(kind: str, eps: float) -> tuple[np.ndarray, tuple[int, ...]]:
    """Error unitary and which CNOT operands it acts on (0 = control, 1 = target)."""
    if kind == "zz":
        ph = np.exp(-0.5j * eps)
        return np.diag([ph, ph.conjugate(), ph.conjugate(), ph]), (0, 1)
    if kind == "control_rz":
        return math.cos(eps / 2) * np.eye(2) - 1j * math.sin(eps / 2) * Z, (0,)
    if kind == "target_rx":
        return math.cos(eps / 2) * np.eye(2) - 1j * math.sin(eps / 2) * X, (1,)
    raise ValueError(f"unknown coherent error kind {kind!r}")


_PAULIS = (np.eye(2, dtype=complex), X, Y, Z)


def depolarize(state: DensityMatrix, alpha: float, qubits: tuple[int, ...] | None = None) -> DensityMatrix:
    """``αρ + (1-α)·(maximally mixed)``; global unless ``qubits`` is given."""
    if alpha == 1:
        return state
    if qubits is None:
        m = alpha * state.matrix
        m[np.diag_indices(state.dim)] += (1 - alpha) / state.dim
        return DensityMatrix(state.num_qubits, m)
    # Pauli twirl over the listed qubits gives 𝟙/d_S ⊗ Tr_S ρ
    twirl = np.zeros_like(state.matrix)
    count = 0
    for idx in np.ndindex(*([4] * len(qubits))):
        s = state
        for q, i in zip(qubits, idx):
            if i:
                s = apply_unitary(s, _PAULIS[i], (q,))
        twirl += s.matrix
        count += 1
    return DensityMatrix(state.num_qubits, alpha * state.matrix + (1 - alpha) * twirl / count)


def apply_noisy_gate(
    state: DensityMatrix, g: Gate, m: NoiseModel, now: datetime | str | None = None
) -> DensityMatrix:
    """Ideal gate, then (for CNOT) the drifted coherent error, then depolarization."""
    state = apply_unitary(state, g.matrix, g.targets)
    if g.kind == "CNOT":
        alpha, eps0, seed = m.pair_params(*g.targets)
        eps = drifted_eps(m, now, rng_seed=seed, base_eps=eps0) if (eps0 or m.drift.sigma_per_day) else 0.0
        if eps:
            u, ops = coherent_error_unitary(m.coherent_kind, eps)
            state = apply_unitary(state, u, tuple(g.targets[i] for i in ops))
    else:
        alpha = m.depol_1q
    return depolarize(state, alpha, g.targets if m.local_depolarizing else None)


def run_noisy(
    state: DensityMatrix, circuit: Circuit, m: NoiseModel, now: datetime | str | None = None
) -> DensityMatrix:
    for g in circuit.gates:
        state = apply_noisy_gate(state, g, m, now)
    return state


# ---------------------------------------------------------------------------
# readout


def sample_shots(true_expectation: float, shots: int, readout_flip: float = 0.0, rng_seed: int = 0) -> ShotEstimate:
    """Estimate a ±1 observable from ``shots`` readouts with symmetric bit-flip error.

    ``shots == 0`` returns the exact biased expectation ``(1-2f)·E`` with zero
    error bar.
    """
    if shots < 0:
        raise ValueError("shots must be >= 0 (0 means exact expectation)")
    e = float(np.clip(true_expectation, -1.0, 1.0))
    biased = (1 - 2 * readout_flip) * e
    if shots == 0:
        return ShotEstimate.from_mean(biased, 0, rng_seed)
    p_plus = (1 + biased) / 2
    k = np.random.default_rng(rng_seed).binomial(shots, p_plus)
    return ShotEstimate.from_mean(2 * k / shots - 1, shots, rng_seed)
