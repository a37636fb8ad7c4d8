import math
from datetime import timedelta

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqc1bench.circuit import Gate
from dqc1bench.noise import (
    DEFAULT_DEPOL_2Q,
    DEFAULT_EPOCH,
    Drift,
    NoiseModel,
    PairNoise,
    ShotEstimate,
    apply_noisy_gate,
    coherent_error_unitary,
    depolarize,
    derive_seed,
    drifted_eps,
    elapsed_days,
    format_time,
    pair_key,
    parse_time,
    sample_shots,
)
from dqc1bench.qstate import DensityMatrix, PauliAxis, apply_unitary, expectation, is_unitary, partial_trace

# Frozen from a standalone run of
#   numpy.random.default_rng(7).normal(0.0, 0.02, size=5).sum()
# i.e. a 5-day Gaussian random walk with 0.02 rad/day steps.
WALK_5_DAYS_SEED_7 = -0.026388495768505237


def random_state(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(1 << n, 1 << n)) + 1j * rng.normal(size=(1 << n, 1 << n))
    rho = a @ a.conj().T
    return DensityMatrix.from_matrix(rho / np.trace(rho))


def test_default_purity_matches_table_time_constant():
    assert -1 / math.log(DEFAULT_DEPOL_2Q) == pytest.approx(25.81)


def test_time_parsing():
    t = parse_time("2019-03-01T12:00:00Z")
    assert format_time(t) == "2019-03-01T12:00:00Z"
    assert parse_time(None) == DEFAULT_EPOCH
    assert format_time(parse_time("2019-03-01T12:00:00")) == "2019-03-01T12:00:00Z"


def test_derive_seed_is_stable_and_keyed():
    assert derive_seed(0, "x", 3) == 7640709513261444832
    assert derive_seed(0, "x", 3) != derive_seed(0, "x", 4)
    assert derive_seed(0, "x") != derive_seed(1, "x")
    assert 0 <= derive_seed(2**40, "big") < 2**63


def test_pair_key_is_unordered():
    assert pair_key(3, 1) == pair_key(1, 3) == "1-3"


def test_model_validation():
    with pytest.raises(ValueError):
        NoiseModel(depol_2q=0.0)
    with pytest.raises(ValueError):
        NoiseModel(depol_1q=1.2)
    with pytest.raises(ValueError):
        NoiseModel(coherent_kind="xy")
    with pytest.raises(ValueError):
        NoiseModel(readout_flip=0.5)
    with pytest.raises(ValueError):
        NoiseModel(pair_profile={"Q1-Q0": PairNoise(depol_2q=2.0)})
    with pytest.raises(ValueError):
        Drift(sigma_per_day=-1)


def test_model_dict_round_trip():
    m = NoiseModel(
        coherent_eps=0.05,
        coherent_kind="zz",
        drift=Drift(0.01, "2019-03-01T00:00:00Z", 4),
        readout_flip=0.02,
        pair_profile={"Q1-Q0": PairNoise(0.95, 0.1), "Q2-Q3": PairNoise(coherent_eps=0.2)},
        local_depolarizing=True,
    )
    assert NoiseModel.from_dict(m.to_dict()) == m


def test_for_pair_applies_profile_and_reseeds():
    m = NoiseModel(coherent_eps=0.01, pair_profile={"Q5-Q4": PairNoise(0.9, 0.2)})
    p = m.for_pair("Q5-Q4")
    assert (p.depol_2q, p.coherent_eps, p.pair_profile) == (0.9, 0.2, {})
    q = m.for_pair("Q1-Q0")
    assert (q.depol_2q, q.coherent_eps) == (m.depol_2q, 0.01)
    assert p.drift.seed != q.drift.seed != m.drift.seed
    assert m.for_pair(None) is m


def test_drift_walk_matches_frozen_value():
    m = NoiseModel(coherent_eps=0.1, drift=Drift(0.02, DEFAULT_EPOCH, 7))
    now = DEFAULT_EPOCH + timedelta(days=5, hours=23)
    assert elapsed_days(m, now) == 5
    assert drifted_eps(m, now) == pytest.approx(0.1 + WALK_5_DAYS_SEED_7, abs=1e-15)
    assert drifted_eps(m, DEFAULT_EPOCH) == 0.1
    with pytest.raises(ValueError):
        drifted_eps(m, DEFAULT_EPOCH - timedelta(days=1))


def test_drift_is_a_random_walk():
    # day-6 value extends the day-5 path by one step
    m = NoiseModel(drift=Drift(0.02, DEFAULT_EPOCH, 7))
    e5 = drifted_eps(m, DEFAULT_EPOCH + timedelta(days=5))
    e6 = drifted_eps(m, DEFAULT_EPOCH + timedelta(days=6))
    step = np.random.default_rng(7).normal(0.0, 0.02, size=6)[-1]
    assert e6 - e5 == pytest.approx(step, abs=1e-15)


@pytest.mark.parametrize("kind", ["zz", "control_rz", "target_rx"])
def test_coherent_error_unitaries(kind):
    u, ops = coherent_error_unitary(kind, 0.3)
    assert is_unitary(u)
    assert u.shape == (1 << len(ops),) * 2
    u0, _ = coherent_error_unitary(kind, 0.0)
    np.testing.assert_allclose(u0, np.eye(u0.shape[0]), atol=1e-15)
    with pytest.raises(ValueError):
        coherent_error_unitary("bogus", 0.1)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 1.0), st.integers(0, 2**31 - 1), st.booleans())
def test_depolarizing_is_cptp(alpha, seed, local):
    rho = random_state(seed, 2)
    out = depolarize(rho, alpha, (1,) if local else None)
    out.check(tol=1e-9, psd=True)


def test_global_depolarizing_formula():
    rho = random_state(5, 2)
    out = depolarize(rho, 0.7)
    np.testing.assert_allclose(out.matrix, 0.7 * rho.matrix + 0.3 * np.eye(4) / 4, atol=1e-14)
    mixed = DensityMatrix.maximally_mixed(2)
    np.testing.assert_allclose(depolarize(mixed, 0.3).matrix, mixed.matrix, atol=1e-15)


def test_local_depolarizing_replaces_subsystem():
    rho = random_state(6, 2)
    out = depolarize(rho, 0.6, (1,))
    reduced = partial_trace(rho, [1]).matrix
    ref = 0.6 * rho.matrix + 0.4 * np.kron(reduced, np.eye(2) / 2)
    np.testing.assert_allclose(out.matrix, ref, atol=1e-13)


def test_noisy_cnot_attenuates_coherence():
    # |+>|0> through a depolarizing CNOT: <X⊗X> becomes α
    s = apply_unitary(DensityMatrix.basis([0, 0]), np.array([[1, 1], [1, -1]]) / math.sqrt(2), (0,))
    m = NoiseModel.depolarizing(0.8)
    out = apply_noisy_gate(s, Gate("CNOT", (0, 1)), m)
    xx = np.trace(out.matrix @ np.kron([[0, 1], [1, 0]], [[0, 1], [1, 0]])).real
    assert xx == pytest.approx(0.8)


def test_control_rz_error_rotates_clean_qubit():
    s = apply_unitary(DensityMatrix.basis([0, 0]), np.array([[1, 1], [1, -1]]) / math.sqrt(2), (0,))
    m = NoiseModel(depol_1q=1, depol_2q=1, coherent_eps=0.2, drift=Drift(0.0))
    out = apply_noisy_gate(s, Gate("CNOT", (0, 1)), m)
    # reduced control state is diagonal after a CNOT onto |0>, so check after undoing the CNOT
    out = apply_unitary(out, np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]), (0, 1))
    assert expectation(out, PauliAxis.X, 0) == pytest.approx(math.cos(0.2))
    assert expectation(out, PauliAxis.Y, 0) == pytest.approx(math.sin(0.2))


def test_sample_shots_exact_mode():
    e = sample_shots(0.3, 0)
    assert (e.mean, e.stderr, e.shots) == (0.3, 0.0, 0)
    assert sample_shots(0.3, 0, readout_flip=0.1).mean == pytest.approx(0.8 * 0.3)
    with pytest.raises(ValueError):
        sample_shots(0.3, -1)


def test_sample_shots_deterministic_per_seed():
    assert sample_shots(0.2, 1000, rng_seed=3) == sample_shots(0.2, 1000, rng_seed=3)
    assert sample_shots(0.2, 1000, rng_seed=3).mean != sample_shots(0.2, 1000, rng_seed=4).mean


@pytest.mark.parametrize("true,flip", [(0.0, 0.0), (0.6, 0.0), (-0.9, 0.0), (0.5, 0.05)])
def test_sample_shots_statistics(true, flip):
    shots = 2000
    means = np.array([sample_shots(true, shots, flip, s).mean for s in range(400)])
    biased = (1 - 2 * flip) * true
    sd = math.sqrt((1 - biased**2) / shots)
    assert abs(means.mean() - biased) < 4 * sd / math.sqrt(400)
    assert means.std(ddof=1) == pytest.approx(sd, rel=0.15)


@settings(max_examples=50, deadline=None)
@given(st.floats(-1, 1), st.integers(1, 5000), st.integers(0, 2**31 - 1))
def test_sample_shots_range_and_grid(true, shots, seed):
    e = sample_shots(true, shots, rng_seed=seed)
    assert -1 <= e.mean <= 1
    k = (e.mean + 1) * shots / 2  # count of +1 outcomes is an integer
    assert abs(k - round(k)) < 1e-9
    assert e.stderr == pytest.approx(math.sqrt((1 - e.mean**2) / shots))


def test_shot_estimate_from_mean():
    assert ShotEstimate.from_mean(0.0, 4096).stderr == pytest.approx(1 / 64)
    assert ShotEstimate.from_mean(1.0, 10).stderr == 0.0
