"""Dense density-matrix states and the small amount of linear algebra the
simulator needs.

Bit ordering: qubit 0 is the most significant bit, so ``|01>`` means qubit 0
in ``|0>`` and qubit 1 in ``|1>``. Qubit 0 is the clean (control) qubit
throughout the package.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

EXACT_TOL = 1e-10
ACCUM_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


class PauliAxis(enum.Enum):
    X = "X"
    Y = "Y"
    Z = "Z"

    @property
    def matrix(self) -> np.ndarray:
        return {"X": X, "Y": Y, "Z": Z}[self.value]


def is_unitary(u: np.ndarray, tol: float = EXACT_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max() <= tol)


def num_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product ``a ⊗ b`` (``a`` acts on the more significant qubits)."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = kron(out, m)
    return out


@dataclass(frozen=True)
class DensityMatrix:
    """A ``2**n x 2**n`` density matrix.

    Construction does no validation so the simulator hot path stays cheap;
    call :meth:`check` (or use :meth:`from_matrix`) when the input is untrusted.
    """

    num_qubits: int
    matrix: np.ndarray

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "DensityMatrix":
        matrix = np.array(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"density matrix must be square, got {matrix.shape}")
        state = cls(num_qubits_of(matrix.shape[0]), matrix)
        state.check()
        return state

    @classmethod
    def basis(cls, bits: Sequence[int]) -> "DensityMatrix":
        """Computational basis state ``|b0 b1 ...><b0 b1 ...|``."""
        n = len(bits)
        idx = 0
        for b in bits:
            idx = (idx << 1) | (1 if b else 0)
        m = np.zeros((1 << n, 1 << n), dtype=complex)
        m[idx, idx] = 1.0
        return cls(n, m)

    @classmethod
    def from_statevector(cls, psi: np.ndarray) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        psi = psi / np.linalg.norm(psi)
        return cls(num_qubits_of(psi.size), np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityMatrix":
        d = 1 << n
        return cls(n, np.eye(d, dtype=complex) / d)

    @property
    def dim(self) -> int:
        return 1 << self.num_qubits

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def check(self, tol: float = EXACT_TOL, psd: bool = False) -> None:
        """Raise ``ValueError`` if the state is not Hermitian with unit trace.

        ``psd=True`` adds an eigenvalue check, which is the only expensive part
        and is meant for tests.
        """
        m = self.matrix
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"matrix shape {m.shape} does not match {self.num_qubits} qubits")
        herm = np.abs(m - m.conj().T).max()
        if herm > tol:
            raise ValueError(f"density matrix not Hermitian (deviation {herm:.3g})")
        tr = np.trace(m)
        if abs(tr - 1) > tol:
            raise ValueError(f"density matrix trace is {tr:.12g}, expected 1")
        if psd:
            lo = np.linalg.eigvalsh((m + m.conj().T) / 2).min()
            if lo < -ACCUM_TOL:
                raise ValueError(f"density matrix has negative eigenvalue {lo:.3g}")

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix(self.num_qubits + other.num_qubits, kron(self.matrix, other.matrix))


def _check_targets(targets: Sequence[int], n: int) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise ValueError(f"repeated target index in {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise ValueError(f"target {t} out of range for {n} qubits")
    return targets


def apply_unitary(state: DensityMatrix, u: np.ndarray, targets: Sequence[int]) -> DensityMatrix:
    """Return ``U ρ U†`` with ``u`` acting on ``targets`` (in the given order).

    The first entry of ``targets`` is the most significant qubit of ``u``.
    Works by tensor contraction, so the full ``2**n`` embedding is never built.
    """
    n = state.num_qubits
    targets = _check_targets(targets, n)
    k = len(targets)
    u = np.asarray(u, dtype=complex)
    if u.shape != (1 << k, 1 << k):
        raise ValueError(f"unitary of shape {u.shape} does not act on {k} qubits")
    if k == 0:
        return state

    ut = u.reshape([2] * (2 * k))
    t = state.matrix.reshape([2] * (2 * n))
    in_axes = list(range(k, 2 * k))
    # U on the row indices
    t = np.tensordot(ut, t, axes=(in_axes, list(targets)))
    t = np.moveaxis(t, list(range(k)), list(targets))
    # U† on the column indices
    cols = [n + q for q in targets]
    t = np.tensordot(t, ut.conj(), axes=(cols, in_axes))
    t = np.moveaxis(t, list(range(2 * n - k, 2 * n)), cols)
    return DensityMatrix(n, np.ascontiguousarray(t).reshape(state.dim, state.dim))


def embed(u: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    """Full ``2**n`` matrix of ``u`` acting on ``targets`` and identity elsewhere."""
    targets = _check_targets(targets, n)
    k = len(targets)
    u = np.asarray(u, dtype=complex)
    if u.shape != (1 << k, 1 << k):
        raise ValueError(f"unitary of shape {u.shape} does not act on {k} qubits")
    d = 1 << n
    ident = np.eye(d, dtype=complex).reshape([2] * n + [d])
    t = np.tensordot(u.reshape([2] * (2 * k)), ident, axes=(list(range(k, 2 * k)), list(targets)))
    t = np.moveaxis(t, list(range(k)), list(targets))
    return t.reshape(d, d)


def partial_trace(state: DensityMatrix, discard: Iterable[int]) -> DensityMatrix:
    """Trace out the qubits in ``discard``; remaining qubits keep their order."""
    n = state.num_qubits
    discard = sorted(set(int(q) for q in discard))
    if not discard:
        raise ValueError("discard set is empty")
    if len(discard) >= n:
        raise ValueError("cannot trace out every qubit")
    for q in discard:
        if not 0 <= q < n:
            raise ValueError(f"qubit {q} out of range for {n} qubits")
    keep = [q for q in range(n) if q not in discard]
    dk, dd = 1 << len(keep), 1 << len(discard)
    t = state.matrix.reshape([2] * (2 * n))
    order = keep + discard + [n + q for q in keep] + [n + q for q in discard]
    t = t.transpose(order).reshape(dk, dd, dk, dd)
    return DensityMatrix(len(keep), np.einsum("ajbj->ab", t))


def expectation(state: DensityMatrix, axis: PauliAxis, qubit: int) -> float:
    """``tr(ρ σ)`` for a Pauli on one qubit."""
    n = state.num_qubits
    if not 0 <= qubit < n:
        raise IndexError(f"qubit {qubit} out of range for {n} qubits")
    reduced = state if n == 1 else partial_trace(state, [q for q in range(n) if q != qubit])
    value = np.trace(reduced.matrix @ PauliAxis(axis).matrix)
    assert abs(value.imag) <= EXACT_TOL, f"Pauli expectation has imaginary part {value.imag}"
    return float(value.real)
