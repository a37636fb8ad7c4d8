"""Gate-level circuits over the native set {H, X, Ry, Rz, CNOT}.

Rotation conventions (full angle, not half angle)::

    Ry(θ) = [[cos θ,  sin θ],
             [-sin θ, cos θ]]
    Rz(θ) = diag(1, e^{iθ})

The compiler here only handles *controlled 2x2 unitaries*; that is all the
benchmark payloads need.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .qstate import CNOT, EXACT_TOL, H, X, PauliAxis, embed, is_unitary

GATE_KINDS = ("H", "X", "Ry", "Rz", "CNOT")
_ROTATIONS = ("Ry", "Rz")

# Default per-block CNOT spend: diagonal blocks use a controlled phase (2),
# non-diagonal blocks use the 5-CNOT split layout (see compile_controlled_2x2).
DIAGONAL_BUDGET = 2
GENERAL_BUDGET = 5
MINIMAL_GENERAL_BUDGET = 2


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        arity = 2 if self.kind == "CNOT" else 1
        if len(self.targets) != arity:
            raise ValueError(f"{self.kind} takes {arity} target(s), got {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"repeated qubit in {self.targets}")
        if self.kind in _ROTATIONS:
            if self.theta is None or not math.isfinite(self.theta):
                raise ValueError(f"{self.kind} needs a finite angle, got {self.theta}")
            object.__setattr__(self, "theta", float(self.theta))
        elif self.theta is not None:
            raise ValueError(f"{self.kind} takes no angle")

    @property
    def matrix(self) -> np.ndarray:
        if self.kind == "H":
            return H
        if self.kind == "X":
            return X
        if self.kind == "Ry":
            return ry(self.theta)
        if self.kind == "Rz":
            return rz(self.theta)
        return CNOT

    @property
    def is_diagonal(self) -> bool:
        return self.kind == "Rz"

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.theta is not None:
            d["theta"] = self.theta
        d["targets"] = list(self.targets)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Gate":
        return cls(d["kind"], tuple(d["targets"]), d.get("theta"))


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...] = ()
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            for t in g.targets:
                if not 0 <= t < self.num_qubits:
                    raise ValueError(
                        f"gate {g.kind}{g.targets} outside a {self.num_qubits}-qubit circuit"
                    )

    def __add__(self, other: "Circuit") -> "Circuit":
        n = max(self.num_qubits, other.num_qubits)
        return Circuit(n, self.gates + other.gates, self.label or other.label)

    def __len__(self) -> int:
        return len(self.gates)

    def remap(self, mapping: Sequence[int], num_qubits: int, label: str | None = None) -> "Circuit":
        """Relabel qubit ``q`` as ``mapping[q]`` inside a ``num_qubits`` register."""
        gates = tuple(Gate(g.kind, tuple(mapping[t] for t in g.targets), g.theta) for g in self.gates)
        return Circuit(num_qubits, gates, self.label if label is None else label)

    def with_label(self, label: str) -> "Circuit":
        return Circuit(self.num_qubits, self.gates, label)

    def to_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "label": self.label,
            "gates": [g.to_dict() for g in self.gates],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Circuit":
        return cls(int(d["num_qubits"]), tuple(Gate.from_dict(g) for g in d["gates"]), d.get("label", ""))

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


def concat(circuits: Iterable[Circuit], num_qubits: int | None = None, label: str = "") -> Circuit:
    circuits = list(circuits)
    n = num_qubits if num_qubits is not None else max((c.num_qubits for c in circuits), default=1)
    gates: list[Gate] = []
    for c in circuits:
        gates.extend(c.gates)
    return Circuit(n, tuple(gates), label)


def cnot_count(c: Circuit) -> int:
    return sum(1 for g in c.gates if g.kind == "CNOT")


def unitary_of(c: Circuit) -> np.ndarray:
    """Full unitary of ``c``; the first gate in the list is applied first."""
    u = np.eye(1 << c.num_qubits, dtype=complex)
    for g in c.gates:
        u = embed(g.matrix, g.targets, c.num_qubits) @ u
    return u


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    """True if ``a = e^{iγ} b`` for some γ, to within ``tol`` elementwise."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return False
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[k]) < tol:
        return bool(np.abs(a).max() <= tol)
    phase = a[k] / b[k]
    if abs(abs(phase) - 1) > tol:
        return False
    return bool(np.abs(a - phase * b).max() <= tol)


def controlled_matrix(u: np.ndarray) -> np.ndarray:
    """``|0><0| ⊗ I + |1><1| ⊗ u`` with the control as the more significant qubit."""
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    out = np.eye(2 * d, dtype=complex)
    out[d:, d:] = u
    return out


# ---------------------------------------------------------------------------
# 2x2 decompositions


def zyz_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """Angles with ``u = e^{iγ} Rz'(α) Ry'(β) Rz'(δ)`` in the half-angle convention
    ``Rz'(x) = diag(e^{-ix/2}, e^{ix/2})``, ``Ry'(x) = exp(-i x Y / 2)``.

    Returns ``(γ, α, β, δ)``.
    """
    u = np.asarray(u, dtype=complex)
    gamma = np.angle(np.linalg.det(u)) / 2
    v = u * np.exp(-1j * gamma)
    beta = 2 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    s = np.angle(v[1, 1]) if abs(v[1, 1]) > EXACT_TOL else 0.0  # (α+δ)/2
    d = np.angle(v[1, 0]) if abs(v[1, 0]) > EXACT_TOL else 0.0  # (α-δ)/2
    alpha, delta = s + d, s - d
    return float(gamma), float(alpha), float(beta), float(delta)


def _rz_half(x: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * x), np.exp(0.5j * x)])


def _ry_half(x: float) -> np.ndarray:
    c, s = math.cos(x / 2), math.sin(x / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _is_zero_angle(theta: float, period: float) -> bool:
    r = math.remainder(theta, period)
    return abs(r) <= EXACT_TOL


def single_qubit_gates(w: np.ndarray, qubit: int) -> list[Gate]:
    """Native gates equal to ``w`` up to global phase (at most three)."""
    _, alpha, beta, delta = zyz_angles(w)
    gates = []
    # Rz'(x) ∝ Rz(x) and Ry'(x) = Ry(-x/2) in the native convention
    if not _is_zero_angle(delta, 2 * math.pi):
        gates.append(Gate("Rz", (qubit,), delta))
    if not _is_zero_angle(beta, 2 * math.pi):
        gates.append(Gate("Ry", (qubit,), -beta / 2))
    if not _is_zero_angle(alpha, 2 * math.pi):
        gates.append(Gate("Rz", (qubit,), alpha))
    return gates


def _phase_gate(phase: float, qubit: int) -> list[Gate]:
    if _is_zero_angle(phase, 2 * math.pi):
        return []
    return [Gate("Rz", (qubit,), float(math.remainder(phase, 2 * math.pi)))]


def _controlled_diagonal(p: complex, q: complex, control: int, target: int, simplify: bool = True) -> list[Gate]:
    # diag(p, q) = p * diag(1, q/p): Rz(arg p) on the control, then a controlled
    # phase built from two CNOTs.
    base = float(np.angle(p))
    phi = float(np.angle(q / p))
    if simplify and _is_zero_angle(phi, 2 * math.pi):
        return _phase_gate(base, control)
    if simplify:
        head = _phase_gate(base + phi / 2, control)
    else:
        head = [Gate("Rz", (control,), float(math.remainder(base + phi / 2, 2 * math.pi)))]
    return head + [
        Gate("Rz", (target,), phi / 2),
        Gate("CNOT", (control, target)),
        Gate("Rz", (target,), -phi / 2),
        Gate("CNOT", (control, target)),
    ]


def _controlled_abc(u: np.ndarray, control: int, target: int) -> list[Gate]:
    # u = e^{iγ} A X B X C with A B C = I; two CNOTs
    gamma, alpha, beta, delta = zyz_angles(u)
    a = _rz_half(alpha) @ _ry_half(beta / 2)
    b = _ry_half(-beta / 2) @ _rz_half(-(delta + alpha) / 2)
    c = _rz_half((delta - alpha) / 2)
    return (
        single_qubit_gates(c, target)
        + [Gate("CNOT", (control, target))]
        + single_qubit_gates(b, target)
        + [Gate("CNOT", (control, target))]
        + single_qubit_gates(a, target)
        + _phase_gate(gamma, control)
    )


def _controlled_split(u: np.ndarray, control: int, target: int) -> list[Gate]:
    # u = W · X · D with D = Rz'(δ): controlled-D (2 CNOTs), one CNOT, then
    # controlled-W through the two-CNOT construction. Five CNOTs in total.
    _, _, _, delta = zyz_angles(u)
    if _is_zero_angle(delta, 4 * math.pi) or _is_zero_angle(delta - 2 * math.pi, 4 * math.pi):
        delta = math.pi  # keep D non-scalar so the layout is always five CNOTs
    d = _rz_half(delta)
    w = u @ d.conj().T @ X
    return (
        _controlled_diagonal(d[0, 0], d[1, 1], control, target)
        + [Gate("CNOT", (control, target))]
        + _controlled_abc(w, control, target)
    )


def _is_diagonal(u: np.ndarray) -> bool:
    return abs(u[0, 1]) <= EXACT_TOL and abs(u[1, 0]) <= EXACT_TOL


def compile_controlled_2x2(
    u: np.ndarray,
    budget_hint: int | None = None,
    *,
    control: int = 0,
    target: int = 1,
    num_qubits: int | None = None,
    label: str = "",
    simplify: bool = True,
) -> Circuit:
    """Compile controlled-``u`` to native gates, controlled phase included.

    Scalar ``u`` costs no CNOTs (only an Rz on the control) and diagonal ``u``
    costs exactly 2. A non-diagonal ``u`` uses the 5-CNOT split layout by
    default; pass ``budget_hint`` < 5 to get the minimal 2-CNOT construction
    instead. A hint below the minimum for ``u`` raises ``ValueError``.

    ``simplify=False`` keeps the two-CNOT layout for diagonal ``u`` even when
    it is a scalar, so a parameterized family (θ-sweeps) has the same gate
    structure, and the same noise exposure, at every θ.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not is_unitary(u):
        raise ValueError("compile_controlled_2x2 needs a 2x2 unitary")
    n = num_qubits if num_qubits is not None else max(control, target) + 1

    if _is_diagonal(u):
        gates = _controlled_diagonal(u[0, 0], u[1, 1], control, target, simplify)
    else:
        if budget_hint is not None and budget_hint < MINIMAL_GENERAL_BUDGET:
            raise ValueError(f"a non-diagonal controlled 2x2 needs at least 2 CNOTs, hint was {budget_hint}")
        if budget_hint is not None and budget_hint < GENERAL_BUDGET:
            gates = _controlled_abc(u, control, target)
        else:
            gates = _controlled_split(u, control, target)

    count = sum(1 for g in gates if g.kind == "CNOT")
    if budget_hint is not None and count > budget_hint:
        raise ValueError(f"controlled block needs {count} CNOTs, budget was {budget_hint}")
    return Circuit(n, tuple(gates), label)


# ---------------------------------------------------------------------------
# DQC1 wrapper

_READOUT = {
    PauliAxis.X: (Gate("H", (0,)),),
    PauliAxis.Y: (Gate("Rz", (0,), -math.pi / 2), Gate("H", (0,))),
    PauliAxis.Z: (),
}


def check_payload(payload: Circuit) -> None:
    for g in payload.gates:
        if g.kind == "CNOT":
            if g.targets[1] == 0:
                raise ValueError("payload uses qubit 0 as a CNOT target")
        elif 0 in g.targets and not g.is_diagonal:
            raise ValueError(f"payload applies non-diagonal {g.kind} to the control qubit")


def build_dqc1_circuit(payload: Circuit, n_mixed: int, meas_axis: PauliAxis | str) -> Circuit:
    """Hadamard on qubit 0, then ``payload``, then the readout basis change.

    After the basis change a Z measurement of qubit 0 gives the requested
    Pauli. Only diagonal gates may touch qubit 0 inside the payload.
    """
    meas_axis = PauliAxis(meas_axis)
    check_payload(payload)
    n = 1 + n_mixed
    if payload.num_qubits > n:
        raise ValueError(f"payload has {payload.num_qubits} qubits, register has {n}")
    gates = (Gate("H", (0,)),) + payload.gates + _READOUT[meas_axis]
    return Circuit(n, gates, payload.label)


def readout_gates(meas_axis: PauliAxis | str) -> tuple[Gate, ...]:
    return _READOUT[PauliAxis(meas_axis)]
