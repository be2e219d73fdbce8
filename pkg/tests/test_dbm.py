import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edgelab import dbm
from edgelab.dbm import (
    CollisionError, StepUnderflow, SymmetrizedConfig, couple, drift, drift_identity_check, eigenvalue_drift,
    evolve, evolve_v, interpolate_init, ito_drift_direct, observable, simulate, v_rhs,
)
from edgelab.edge_stats import kolmogorov_distance
from edgelab.ensembles import spectrum_sample
from edgelab.spectral_laws import mp_cdf, mp_edges


def random_config(rng, n, spread=3.0):
    pos = np.sort(rng.uniform(0.05, spread, n))
    while n > 1 and np.min(np.diff(pos)) < 1e-3:
        pos = np.sort(rng.uniform(0.05, spread, n))
    return SymmetrizedConfig.from_positive(pos)


def test_config_validation():
    with pytest.raises(ValueError):
        SymmetrizedConfig(np.array([-1.0, 2.0]))
    with pytest.raises(ValueError):
        SymmetrizedConfig(np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        SymmetrizedConfig.from_positive([0.0, 1.0])


def test_drift_single_pair():
    # the pair sum over l != +-k is empty for N = 1; at xi = 1 only -s/2 survives
    d = drift(SymmetrizedConfig.from_positive([1.0]), 1.0)
    assert np.array_equal(d, [0.5, -0.5])


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 30), st.floats(0.05, 1.0), st.integers(0, 10**6))
def test_drift_antisymmetric(n, xi, seed):
    d = drift(random_config(np.random.default_rng(seed), n), xi)
    assert np.max(np.abs(d + d[::-1])) <= 1e-14 * max(1.0, np.max(np.abs(d)))


@pytest.mark.parametrize("xi", [0.25, 0.5, 1.0])
def test_eigenvalue_change_of_variables(xi):
    rng = np.random.default_rng(3)
    for _ in range(50):
        cfg = random_config(rng, 12)
        s = cfg.positive
        ds = drift(cfg, xi)[cfg.n:]
        lam_drift = eigenvalue_drift(s * s, xi)
        assert np.max(np.abs(2 * s * ds + 1 / cfg.n - lam_drift)) < 1e-10 * max(1, np.max(np.abs(lam_drift)))


def test_collision_names_particles():
    cfg = SymmetrizedConfig.from_positive([0.5, 0.5000001, 1.0])
    with pytest.raises(CollisionError, match="1 and 2"):
        drift(cfg, 0.5)


def test_zero_noise_scalar_ode():
    out = evolve(SymmetrizedConfig.from_positive([1.0]), 1.0, 1e-4, 0.1, noise_stream=None)
    assert abs(out.positive[0] - np.exp(-0.05)) < 1e-5


def test_ordering_and_symmetry_many_runs():
    rng = np.random.default_rng(4)
    for run in range(1000):
        n = int(rng.integers(2, 6))
        xi = float(rng.choice([0.3, 0.7, 1.0]))
        traj = simulate(random_config(rng, n), xi, 1e-3, 0.02, seed=run)
        pos = traj.positive[:, 0, :]
        assert np.all(np.diff(pos, axis=1) > 0) and np.all(pos > 0)
        full = traj.full(0)
        assert np.array_equal(full[:, :n], -full[:, n:][:, ::-1])


@pytest.mark.slow
@pytest.mark.parametrize("xi", [1.0, 0.5])
def test_equilibrium_preserved(xi):
    n = 100
    m = int(round(n / xi))
    cfg = SymmetrizedConfig.from_positive(spectrum_sample(m, n, seed=12))
    out = evolve(cfg, xi, 1e-3, 0.5, noise_stream=5)
    law = mp_edges(xi)
    delta, _ = kolmogorov_distance(out.positive, lambda x: mp_cdf(law, x * x))
    assert delta < 0.05


def test_shared_noise_identical_inputs():
    rng = np.random.default_rng(6)
    a = random_config(rng, 15)
    cs = couple(a, a, 0.5, 1e-3, 0.05, seed=9)
    assert np.array_equal(cs.traj.positive[:, 0], cs.traj.positive[:, 1])
    again = couple(a, a, 0.5, 1e-3, 0.05, seed=9)
    assert np.array_equal(again.traj.positive, cs.traj.positive)


def test_coupling_initial_gap():
    rng = np.random.default_rng(7)
    a, b = random_config(rng, 10), random_config(rng, 10)
    cs = couple(a, b, 0.5, 1e-3, 0.01, seed=1)
    assert cs.max_gap[0] == np.max(np.abs(a.positive - b.positive))
    assert cs.edge_gap[0] == abs(a.positive[-1] - b.positive[-1])


def test_interpolate_init():
    a = SymmetrizedConfig.from_positive([1.0])
    b = SymmetrizedConfig.from_positive([3.0])
    assert interpolate_init(a, b, 1.0) is a
    assert interpolate_init(a, b, 0.0) is b
    assert np.array_equal(interpolate_init(a, b, 0.5).s, [-2.0, 2.0])
    with pytest.raises(ValueError):
        interpolate_init(a, b, 1.5)


def test_step_underflow():
    # a pair 1e-4 apart meets noise of size 0.03: the first step is rejected and the
    # halved step is already below dt_min
    pos = np.concatenate([np.linspace(0.5, 1.5, 9), [0.5 + 1e-4]])
    with pytest.raises(StepUnderflow):
        simulate(SymmetrizedConfig.from_positive(pos), 0.5, 1e-2, 0.02, seed=0, dt_min=6e-3)


def test_v_zero_stays_zero():
    rng = np.random.default_rng(8)
    traj = simulate(random_config(rng, 8), 0.5, 1e-3, 0.02, seed=2)
    vs = evolve_v(np.zeros(16), traj)
    assert np.all(vs.v == 0)


def test_v_constant_static_square_case():
    cfg = SymmetrizedConfig.from_positive(np.linspace(0.2, 1.8, 9))
    assert np.max(np.abs(v_rhs(cfg.s, np.full(18, 2.5), 1.0))) < 1e-12
    traj = simulate(cfg, 1.0, 1e-3, 0.0, seed=None)
    assert np.array_equal(evolve_v(np.full(18, 2.5), traj).v[-1], np.full(18, 2.5))


def test_v_rejects_bad_start():
    traj = simulate(SymmetrizedConfig.from_positive([1.0, 2.0]), 0.5, 1e-3, 0.002, seed=1)
    with pytest.raises(ValueError):
        evolve_v(np.array([1.0, -1.0, -1.0, 1.0]), traj)
    with pytest.raises(ValueError):
        evolve_v(np.array([1.0, 2.0, 1.0, 1.0]), traj)


def test_folded_generator_matches_full():
    rng = np.random.default_rng(13)
    cfg = random_config(rng, 9)
    half = rng.uniform(0, 1, 9)
    v = np.concatenate([half[::-1], half])
    full = v_rhs(cfg.s, v, 0.4)
    folded = dbm.v_generator_half(cfg.positive, 0.4) @ half
    assert np.max(np.abs(full[9:] - folded)) < 1e-12 * np.max(np.abs(full))


def test_max_principle_runs():
    rng = np.random.default_rng(9)
    for run in range(100):
        n = 50
        cfg = SymmetrizedConfig.from_positive(spectrum_sample(100, n, seed=300, replica=run))
        traj = simulate(cfg, 0.5, 1e-3, 0.02, seed=run, record_every=2)
        half = rng.uniform(0, 1, n)
        v0 = np.concatenate([half[::-1], half])
        vs = evolve_v(v0, traj)
        top = v0.max()
        assert vs.vmax.max() <= top * (1 + 1e-6)
        assert vs.vmin.min() >= -1e-6 * top
        assert np.all(np.diff(vs.vmax) <= 1e-6 * top)
        assert np.max(np.abs(vs.v - vs.v[:, ::-1])) <= 1e-12 * top


def test_observable_examples():
    x = np.array([-1.0, 1.0])
    assert observable(x, np.zeros(2), 1j, 0.0, 0.5).f == 0
    assert abs(observable(x, np.ones(2), 1j, 0.0, 1.0).f - 1j) < 1e-15
    rng = np.random.default_rng(10)
    cfg = random_config(rng, 6)
    half = rng.uniform(0, 1, 6)
    assert observable(cfg, np.concatenate([half[::-1], half]), 0.4 + 0.2j, 0.3, 0.5).f.imag >= 0


def test_drift_identity_example():
    rng = np.random.default_rng(11)
    cfg = random_config(rng, 10)
    half = rng.uniform(0, 1, 10)
    v = np.concatenate([half[::-1], half])
    res = drift_identity_check(cfg, v, 1 + 0.3j, 0.5)
    assert res.residual < 1e-11 * res.scale
    assert abs(ito_drift_direct(cfg, v, 1 + 0.3j, 0.5) - res.closed_form) < 1e-11 * res.scale
    zero = drift_identity_check(cfg, np.zeros(20), 1 + 0.3j, 0.5)
    assert zero.term_by_term == 0 and zero.closed_form == 0


def test_drift_identity_conjugate_symmetry():
    rng = np.random.default_rng(12)
    cfg = random_config(rng, 7)
    half = rng.uniform(0, 1, 7)
    v = np.concatenate([half[::-1], half])
    z = 0.7 + 0.4j
    a = drift_identity_check(cfg, v, z, 0.6)
    b = drift_identity_check(cfg, v, -z.conjugate(), 0.6)
    assert abs(b.closed_form + a.closed_form.conjugate()) < 1e-12 * a.scale
    assert abs(b.residual - a.residual) < 1e-12 * a.scale
