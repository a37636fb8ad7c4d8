import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dqc1bench.bench import (
    DEFAULT_GRID,
    check_cnots,
    coherent_error_metric,
    fit_exponential,
    r_squared,
    resample,
    sweep_cnots,
    sweep_payload,
    theta_grid,
    theta_sweep,
    u1,
    visibility,
    visibility_points,
    visibility_series,
)
from dqc1bench.circuit import cnot_count, controlled_matrix, unitary_of
from dqc1bench.noise import Drift, NoiseModel


def test_u1_trace():
    for th in (0.0, 1.0, math.pi, 2 * math.pi):
        assert np.trace(u1(th)) / 2 == pytest.approx(math.cos(th / 2))


@pytest.mark.parametrize("n_mixed,l", [(1, 1), (1, 3), (2, 2), (3, 1)])
def test_sweep_payload_is_controlled_u_power(n_mixed, l):
    th = 0.7
    u = u1(th)
    full = u
    for _ in range(n_mixed - 1):
        full = np.kron(full, u)
    np.testing.assert_allclose(unitary_of(sweep_payload(n_mixed, l, th)), controlled_matrix(full), atol=1e-10)


def test_sweep_cnot_accounting():
    for n in (1, 3):
        for l in range(6):
            assert cnot_count(sweep_payload(n, l, 1.0)) == sweep_cnots(n, l)
    assert sweep_cnots(1, 5) == 18 and sweep_cnots(3, 2) == 18
    # θ = 0 and 2π keep their CNOTs: every grid point has the same circuit depth
    assert cnot_count(sweep_payload(1, 2, 0.0)) == cnot_count(sweep_payload(1, 2, 2 * math.pi)) == 6
    with pytest.raises(ValueError):
        sweep_payload(1, -1, 0.0)


def test_theta_grid():
    g = theta_grid(DEFAULT_GRID)
    assert len(g) == 25 and g[0] == 0 and g[-1] == pytest.approx(2 * math.pi)
    with pytest.raises(ValueError):
        theta_grid(1)


@pytest.mark.parametrize("n_mixed", [1, 3])
def test_noiseless_sweep_is_cosine_power(n_mixed):
    c = theta_sweep(n_mixed, 2, 13)
    np.testing.assert_allclose(c.series("sx"), np.cos(c.thetas / 2) ** n_mixed, atol=1e-12)
    np.testing.assert_allclose(c.series("sy"), 0, atol=1e-12)
    assert visibility(c) == pytest.approx(1.0)
    assert coherent_error_metric(c) < 1e-12
    check_cnots(c)


def test_restrict_widths_rejects_other_widths():
    theta_sweep(3, 1, 3, restrict_widths=True)
    with pytest.raises(ValueError):
        theta_sweep(2, 1, 3, restrict_widths=True)


def test_depolarizing_visibility_closed_form_and_monotone():
    alpha = 0.95
    m = NoiseModel.depolarizing(alpha)
    curves = visibility_series(1, range(5), m, grid=9)
    pts = visibility_points(curves)
    for cn, v in pts:
        assert v == pytest.approx(alpha**cn, abs=1e-12)
    vis = [v for _, v in pts]
    assert all(a >= b for a, b in zip(vis, vis[1:]))


def test_resample_reuses_channel_and_is_deterministic():
    c = theta_sweep(1, 2, 9, NoiseModel(coherent_eps=0.05), shots=0)
    a, b = resample(c, 1024, 5), resample(c, 1024, 5)
    assert a.points == b.points
    assert resample(c, 1024, 6).points != a.points
    for p in a.points:
        assert p.sx.shots == 1024 and p.seed is not None


def test_coherent_error_builds_up_sigma_y():
    m = NoiseModel(coherent_eps=0.05, drift=Drift(0.0))
    metrics = [coherent_error_metric(theta_sweep(1, l, 13, m)) for l in (1, 3, 5)]
    assert metrics[0] < metrics[1] < metrics[2]
    # a ZZ error leaves the trace real for these diagonal payloads
    zz = NoiseModel(coherent_eps=0.05, coherent_kind="zz", drift=Drift(0.0))
    assert coherent_error_metric(theta_sweep(1, 5, 13, zz)) < 1e-12


def test_r_squared_definition():
    y = [1.0, 2.0, 3.0]
    assert r_squared(y, y) == 1.0
    assert r_squared(y, [2.0, 2.0, 2.0]) == 0.0
    assert r_squared([1.0, 1.0], [1.0, 1.0]) == 1.0


def test_fit_recovers_exact_exponential():
    xs = np.arange(0, 40, 4)
    f = fit_exponential(zip(xs, 0.9 * np.exp(-xs / 12.5)))
    assert f.tau == pytest.approx(12.5) and f.a == pytest.approx(0.9)
    assert f.r_squared == pytest.approx(1.0) and f.decaying
    np.testing.assert_allclose(f.predict(xs), 0.9 * np.exp(-xs / 12.5))


def test_fit_drops_nonpositive_with_warning():
    pts = [(0, 1.0), (5, 0.6), (10, 0.37), (15, -0.01), (20, 0.0)]
    with pytest.warns(UserWarning, match="dropped 2"):
        f = fit_exponential(pts)
    assert f.dropped == 2 and f.n_points == 3


def test_fit_errors_and_growth():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(ValueError):
            fit_exponential([(0, 1.0), (1, -0.5), (2, 0.5)])
    f = fit_exponential([(0, 1.0), (1, 1.1), (2, 1.25)])
    assert not f.decaying and f.tau < 0
    with pytest.raises(ValueError):
        fit_exponential([(0.0, 1.0), (1e-241, 0.5), (5e-249, 0.7)])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 60), st.floats(0.01, 1)), min_size=3, max_size=12, unique_by=lambda p: p[0]),
       st.randoms(use_true_random=False))
def test_fit_invariant_under_relabeling(points, rnd):
    shuffled = list(points)
    rnd.shuffle(shuffled)
    a, b = fit_exponential(points), fit_exponential(shuffled)
    if math.isfinite(a.r_squared):
        assert a.r_squared == pytest.approx(b.r_squared, rel=1e-9, abs=1e-9)
    assert a.n_points == b.n_points
