"""Estimating a normalized trace with one clean qubit.

A single pure qubit controls a unitary acting on N maximally mixed qubits.
Reading the clean qubit along x and y gives the real and imaginary parts of
Tr U / 2**N, without ever preparing a pure N-qubit register.
"""

import numpy as np

from dqc1bench import NoiseModel, compile_controlled_2x2, estimate_normalized_trace
from dqc1bench.circuit import cnot_count
from dqc1bench.dqc1 import ideal_normalized_trace

rng = np.random.default_rng(3)
u, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
payload = compile_controlled_2x2(u, control=0, target=1)
print(f"controlled-U compiles to {cnot_count(payload)} CNOTs")
print(f"exact  Tr U / 2          = {ideal_normalized_trace(u):.4f}")

# infinite shots, no noise: the simulator reproduces the trace exactly
est = estimate_normalized_trace(payload, 1, "direct", NoiseModel.noiseless(), shots=0, seed=0)
print(f"noiseless, exact readout = {est.value:.4f}")

# finite shots: the standard error shrinks like 1/sqrt(shots)
for shots in (2**8, 2**12, 2**15):
    est = estimate_normalized_trace(payload, 1, "direct", NoiseModel.noiseless(), shots=shots, seed=1)
    print(f"{shots:6d} shots            = {est.value:.4f}  (stderr {est.re.stderr:.4f})")

# default hardware-like noise shrinks the estimate towards 0
est = estimate_normalized_trace(payload, 1, "direct", NoiseModel(), shots=0, seed=0)
print(f"default noise, exact     = {est.value:.4f}  (|ratio| {abs(est.value) / abs(ideal_normalized_trace(u)):.3f})")
