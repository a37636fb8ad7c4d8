"""Benchmarking noisy quantum processors with one-clean-qubit trace estimation.

Density-matrix simulation, gate compilation, noise models, DQC1 trace
estimation, the θ-sweep visibility benchmark and Jones-polynomial estimation
for 3-strand braids.
"""

from .bench import fit_exponential, theta_sweep, visibility
from .circuit import Circuit, Gate, build_dqc1_circuit, compile_controlled_2x2, unitary_of
from .config import ConfigError, ExperimentConfig
from .dqc1 import PrepStrategy, TraceEstimate, estimate_normalized_trace
from .knots import BraidWord, block_circuits, braid_matrix, estimate_jones, jones_oracle, knot_distance, writhe
from .noise import NoiseModel
from .qstate import DensityMatrix, PauliAxis
from .runner import ResultBundle, __version__, run

__all__ = [
    "BraidWord", "Circuit", "ConfigError", "DensityMatrix", "ExperimentConfig", "Gate", "NoiseModel",
    "PauliAxis", "PrepStrategy", "ResultBundle", "TraceEstimate", "__version__", "block_circuits",
    "braid_matrix", "build_dqc1_circuit", "compile_controlled_2x2", "estimate_jones",
    "estimate_normalized_trace", "fit_exponential", "jones_oracle", "knot_distance", "run",
    "theta_sweep", "unitary_of", "visibility", "writhe",
]
