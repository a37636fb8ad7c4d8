"""One-clean-qubit trace estimation.

Qubit 0 starts in ``|0>``, qubits ``1..N`` start maximally mixed, and the
payload applies a unitary to ``1..N`` controlled on qubit 0. After a Hadamard
on qubit 0 and the payload, ``<σx> + i<σy>`` on qubit 0 equals
``Tr U / 2**N``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .circuit import Circuit, build_dqc1_circuit, check_payload, cnot_count, readout_gates
from .noise import NoiseModel, ShotEstimate, apply_noisy_gate, derive_seed, format_time, parse_time, sample_shots
from .qstate import CNOT, H, DensityMatrix, PauliAxis, apply_unitary, expectation, num_qubits_of, partial_trace

AXES = (PauliAxis.X, PauliAxis.Y, PauliAxis.Z)
# all flip patterns are enumerated up to this many mixed qubits
FLIP_ENUMERATE_MAX = 3
FLIP_SAMPLES = 16


class PrepStrategy(enum.Enum):
    DIRECT_MIXED = "direct"
    BELL_TRACE = "bell"
    FLIP_AVERAGE = "flip"


@dataclass(frozen=True)
class TraceEstimate:
    re: ShotEstimate
    im: ShotEstimate
    z_diag: ShotEstimate
    n_mixed: int
    cnots: int
    timestamp: str
    seed: int | None = None

    @property
    def value(self) -> complex:
        return complex(self.re.mean, self.im.mean)


@dataclass(frozen=True)
class ExactExpectations:
    """Noisy-channel expectations before shot sampling.

    ``values[axis]`` holds one entry per prepared input (a single entry unless
    the prep strategy is flip averaging).
    """

    values: dict
    n_mixed: int
    cnots: int
    timestamp: str

    def mean(self, axis: PauliAxis) -> float:
        return float(np.mean(self.values[PauliAxis(axis)]))


def ideal_normalized_trace(u: np.ndarray) -> complex:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    num_qubits_of(u.shape[0])
    return complex(np.trace(u) / u.shape[0])


def flip_patterns(n_mixed: int, seed: int, samples: int = FLIP_SAMPLES) -> list[tuple[int, ...]]:
    if n_mixed <= FLIP_ENUMERATE_MAX:
        return list(itertools.product((0, 1), repeat=n_mixed))
    rng = np.random.default_rng(derive_seed(seed, "flip-patterns"))
    return [tuple(int(b) for b in row) for row in rng.integers(0, 2, size=(samples, n_mixed))]


def _initial_states(n_mixed: int, prep: PrepStrategy, seed: int) -> tuple[list[DensityMatrix], int]:
    """Prepared registers and the number of ancillas appended after them."""
    clean = DensityMatrix.basis([0])
    if prep is PrepStrategy.DIRECT_MIXED:
        return [clean.tensor(DensityMatrix.maximally_mixed(n_mixed))], 0
    if prep is PrepStrategy.FLIP_AVERAGE:
        return [DensityMatrix.basis((0,) + p) for p in flip_patterns(n_mixed, seed)], 0
    # Bell pairs between mixed qubit j and ancilla n_mixed + j; preparation is ideal
    state = DensityMatrix.basis([0] * (1 + 2 * n_mixed))
    for j in range(1, n_mixed + 1):
        state = apply_unitary(state, H, (j,))
        state = apply_unitary(state, CNOT, (j, n_mixed + j))
    return [state], n_mixed


def simulate_expectations(
    payload: Circuit,
    n_mixed: int,
    prep: PrepStrategy | str,
    model: NoiseModel,
    seed: int = 0,
    now: datetime | str | None = None,
) -> ExactExpectations:
    """Run the DQC1 circuit through the noisy channel for each readout axis."""
    prep = PrepStrategy(prep)
    if n_mixed < 1:
        raise ValueError("n_mixed must be >= 1")
    check_payload(payload)
    now = parse_time(now)
    base = build_dqc1_circuit(payload, n_mixed, PauliAxis.Z)
    states, n_anc = _initial_states(n_mixed, prep, seed)
    ancillas = list(range(1 + n_mixed, 1 + n_mixed + n_anc))

    values = {axis: [] for axis in AXES}
    for state in states:
        for g in base.gates:
            state = apply_noisy_gate(state, g, model, now)
        for axis in AXES:
            s = state
            for g in readout_gates(axis):
                s = apply_noisy_gate(s, g, model, now)
            if ancillas:
                s = partial_trace(s, ancillas)
            values[axis].append(expectation(s, PauliAxis.Z, 0))
    return ExactExpectations(values, n_mixed, cnot_count(payload), format_time(now))


def _sample_axis(exps: list[float], shots: int, readout_flip: float, seed: int) -> ShotEstimate:
    if shots == 0:
        return ShotEstimate.from_mean((1 - 2 * readout_flip) * float(np.mean(exps)), 0, seed)
    n = len(exps)
    if shots < n:
        raise ValueError(f"{shots} shots cannot cover {n} flip patterns")
    per = [shots // n + (1 if i < shots % n else 0) for i in range(n)]
    means = [
        sample_shots(e, k, readout_flip, derive_seed(seed, i)).mean
        for i, (e, k) in enumerate(zip(exps, per))
    ]
    return ShotEstimate.from_mean(float(np.mean(means)), shots, seed)


def sample_estimate(
    exact: ExactExpectations,
    shots: int,
    seed: int,
    readout_flip: float = 0.0,
    polarization: float = 1.0,
) -> TraceEstimate:
    """Shot-sample each axis with its own ``shots`` budget and seed."""
    if shots < 0:
        raise ValueError("shots must be >= 1, or 0 for the exact limit")
    est = {}
    for axis in AXES:
        exps = [polarization * v for v in exact.values[axis]]
        est[axis] = _sample_axis(exps, shots, readout_flip, derive_seed(seed, "axis", axis.value))
    return TraceEstimate(
        est[PauliAxis.X], est[PauliAxis.Y], est[PauliAxis.Z], exact.n_mixed, exact.cnots, exact.timestamp, seed
    )


def estimate_normalized_trace(
    payload: Circuit,
    n_mixed: int,
    prep: PrepStrategy | str,
    model: NoiseModel,
    shots: int,
    seed: int,
    now: datetime | str | None = None,
    polarization: float = 1.0,
) -> TraceEstimate:
    """Estimate ``Tr U / 2**N`` for the controlled payload.

    ``shots=0`` returns the exact channel output (no sampling noise), which is
    what the test suite uses to separate sampling error from gate error.
    ``polarization`` rescales the clean qubit's initial polarization.
    """
    if shots < 0:
        raise ValueError("shots must be >= 1, or 0 for the exact limit")
    exact = simulate_expectations(payload, n_mixed, prep, model, seed, now)
    return sample_estimate(exact, shots, seed, model.readout_flip, polarization)
