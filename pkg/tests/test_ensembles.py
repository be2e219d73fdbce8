import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edgelab.ensembles import (
    GAUSSIAN, EntryDistribution, covariance, edge_sample, embed_population, gaussian_divisible, moment_gap,
    rotate_population_test, sample_data, separable, symmetrized_block, top_eigenvalue,
)

RADEMACHER = EntryDistribution("rademacher")


def test_reproducible():
    a = sample_data(30, 20, RADEMACHER, seed=4, replica=2)
    b = sample_data(30, 20, RADEMACHER, seed=4, replica=2)
    assert np.array_equal(a.entries, b.entries)
    assert not np.array_equal(a.entries, sample_data(30, 20, RADEMACHER, seed=4, replica=3).entries)


def test_rejects_wide_matrices():
    with pytest.raises(ValueError):
        sample_data(10, 11)


@pytest.mark.parametrize("kind", ["gaussian", "rademacher", "uniform", "two-point-matched"])
def test_entry_moments(kind):
    m = 1000
    q = sample_data(m, 1000, EntryDistribution(kind), seed=1).entries * np.sqrt(m)
    assert abs(q.mean()) < 4e-3
    assert abs(q.var() - 1) < 1e-2


def test_rademacher_values():
    m = 40
    x = sample_data(m, 7, RADEMACHER, seed=2).entries
    assert np.all(np.isin(x * np.sqrt(m), [-1.0, 1.0]))


def test_two_point_matched_moments():
    d = EntryDistribution("two-point-matched", fourth=5.0)
    q = d.draw(np.random.default_rng(0), 10**6)
    assert d.moments == (0.0, 1.0, 0.0, 5.0)
    assert abs(np.mean(q**4) - 5) < 0.1
    assert moment_gap(d, GAUSSIAN) == (3, 2.0)


def test_single_column_and_trace():
    c = np.arange(1.0, 6.0)[:, None]
    assert covariance(c).eigenvalues == pytest.approx([np.sum(c**2)], rel=1e-15)
    x = sample_data(60, 25, seed=5)
    ev = covariance(x).eigenvalues
    assert abs(ev.sum() - np.sum(x.entries**2)) < 1e-10 * ev.sum()
    assert np.all(ev >= 0)


def test_eigenvalues_are_squared_singular_values():
    x = sample_data(80, 40, seed=6).entries
    gram = np.linalg.eigvalsh(x.T @ x)
    cov = covariance(x)
    assert np.max(np.abs(cov.eigenvalues - gram) / gram) < 1e-9
    assert np.allclose(cov.singular_values**2, cov.eigenvalues, rtol=1e-15)


def test_separable_identity():
    x = sample_data(30, 12, seed=7)
    assert np.array_equal(separable(x, np.ones(30)).eigenvalues, covariance(x).eigenvalues)
    with pytest.raises(ValueError):
        separable(x, np.ones(29))


def test_non_finite_rejected():
    bad = np.ones((3, 2))
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        covariance(bad)


def test_symmetrized_block():
    ev = np.linalg.eigvalsh(symmetrized_block(np.eye(3)))
    assert np.allclose(ev, [-1, -1, -1, 1, 1, 1], atol=1e-15)
    x = sample_data(20, 20, seed=8).entries
    s = np.linalg.svd(x, compute_uv=False)
    ev = np.linalg.eigvalsh(symmetrized_block(x))
    assert np.max(np.abs(ev - np.sort(np.concatenate([-s, s])))) < 1e-10
    h = symmetrized_block(x)
    assert np.allclose((h**2).sum(axis=0), np.concatenate([(x**2).sum(axis=0), (x**2).sum(axis=1)]))
    with pytest.raises(ValueError):
        symmetrized_block(np.ones((3, 2)))


def test_gaussian_divisible():
    x0 = sample_data(400, 250, RADEMACHER, seed=9)
    assert gaussian_divisible(x0, 0.0) is x0
    t = 0.3
    xt = gaussian_divisible(x0, t)
    var = np.var(xt.entries * np.sqrt(400))
    assert abs(var - (np.exp(-t) + 1 - np.exp(-t))) < 1e-2
    far = gaussian_divisible(x0, 40.0)
    assert abs(np.var(far.entries) * 400 - 1) < 1e-2
    # exact variance identity on the mixed law's moments
    assert xt.dist.moments[1] == pytest.approx(1.0, abs=1e-15)


def test_moment_gap_examples():
    assert moment_gap(GAUSSIAN, GAUSSIAN) == (4, 0.0)
    assert moment_gap(GAUSSIAN, RADEMACHER) == (3, 2.0)


@given(st.floats(0, 20), st.floats(0, 20))
def test_divisible_gap_monotone(t1, t2):
    a, b = sorted((t1, t2))
    ga = moment_gap(RADEMACHER.mixed_with_gaussian(a), GAUSSIAN)[1]
    gb = moment_gap(RADEMACHER.mixed_with_gaussian(b), GAUSSIAN)[1]
    assert gb <= ga + 1e-15
    assert ga <= 2 * np.exp(-a) + 1e-15


def test_edge_sample_order_independent():
    a = edge_sample(40, 20, 6, RADEMACHER, seed=3)
    b = edge_sample(40, 20, 3, RADEMACHER, seed=3, first_replica=3)
    assert np.array_equal(a[3:], b)
    assert np.allclose(a[:, 1] ** 2, a[:, 0])


def test_edge_sample_workers_match():
    a = edge_sample(30, 15, 8, seed=1, workers=1)
    b = edge_sample(30, 15, 8, seed=1, workers=2)
    assert np.array_equal(a, b)


def test_top_eigenvalue_matches_full_solver():
    x = sample_data(90, 60, seed=10).entries
    g = x.T @ x
    assert abs(top_eigenvalue(g) - np.linalg.eigvalsh(g)[-1]) < 1e-13


def test_rotation_diagonal_identical():
    rep = rotate_population_test(np.diag(np.linspace(1, 2, 12)), seed=1, n=10, reps=50)
    assert np.array_equal(rep.rotated_max, rep.diagonal_max)


@pytest.mark.slow
def test_rotation_invariance():
    c, s = np.cos(0.7), np.sin(0.7)
    u = np.array([[c, -s], [s, c]])
    block = u @ np.diag([1.0, 2.0]) @ u.T
    rep = rotate_population_test(embed_population(block, 50), seed=2, n=50, reps=2000)
    assert rep.p_value > 0.01 and rep.passed
    again = rotate_population_test(embed_population(block, 50), seed=2, n=50, reps=20)
    assert np.array_equal(again.rotated_max, rep.rotated_max[:20])


def test_rotation_rejects_non_gaussian():
    with pytest.raises(ValueError):
        rotate_population_test(np.eye(10), dist=RADEMACHER, n=5, reps=2)
