import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from edgelab.spectral_laws import (
    AspectRatio, edge_distances, eigen_stieltjes, empirical_stieltjes, mp_cdf, mp_density, mp_edges, mp_mass,
    mp_quadratic_residual, mp_stieltjes, quantile_residuals, sample_sv_law, sv_density, sv_mass, sv_stieltjes,
    typical_locations,
)

xis = st.floats(min_value=0.01, max_value=1.0)
upper = st.complex_numbers(min_magnitude=0.05, max_magnitude=20, allow_nan=False, allow_infinity=False).filter(
    lambda z: z.imag > 1e-3)


def test_edges_examples():
    law = mp_edges(0.25)
    assert (law.lambda_minus, law.lambda_plus) == (0.25, 2.25)
    sq = mp_edges(1)
    assert (sq.lambda_minus, sq.lambda_plus) == (0.0, 4.0)
    assert sq.sqrt_edges == (0.0, 2.0)
    assert sq.hard_edge and not law.hard_edge


@pytest.mark.parametrize("bad", [0.0, -0.5, 1.0001, 3])
def test_edges_reject_out_of_range(bad):
    with pytest.raises(ValueError):
        mp_edges(bad)


def test_aspect_ratio_exact():
    r = AspectRatio.from_dims(300, 1200)
    assert r.exact == Fraction(1, 4) and r.xi == 0.25
    assert mp_edges(r).ratio is r


@settings(max_examples=1000, deadline=None)
@given(xis)
def test_edge_identities(xi):
    law = mp_edges(xi)
    assert abs(law.lambda_minus * law.lambda_plus - (1 - xi) ** 2) < 1e-14
    assert abs(law.lambda_minus + law.lambda_plus - 2 * (1 + xi)) < 1e-14


def test_density_examples():
    assert mp_density(mp_edges(1), 2.0) == pytest.approx(1 / (2 * np.pi), rel=1e-15)
    assert mp_density(mp_edges(0.25), 3.0) == 0.0
    assert mp_density(mp_edges(1), 0.0) == np.inf
    assert sv_density(mp_edges(1), 0.0) == pytest.approx(1 / np.pi, rel=1e-15)


@pytest.mark.parametrize("xi", [1.0, 0.25, 0.5, 0.09])
def test_masses(xi):
    law = mp_edges(xi)
    assert abs(mp_mass(law) - 1) < 1e-10
    assert abs(sv_mass(law) - 1) < 1e-10


def test_mass_square_case_plain_quadrature():
    # independent route: Gauss-Jacobi style weight x^{-1/2} (4 - x)^{1/2} handled by QUADPACK
    val = quad(lambda x: 1 / (2 * np.pi), 0, 4, weight="alg", wvar=(-0.5, 0.5))[0]
    assert abs(val - 1) < 1e-12


def test_semicircle_pointwise():
    x = np.linspace(-2.5, 2.5, 2001)
    ref = np.sqrt(np.clip(4 - x * x, 0, None)) / (2 * np.pi)
    assert np.max(np.abs(sv_density(mp_edges(1), x) - ref)) < 1e-14


@given(xis, st.floats(min_value=0, max_value=3))
def test_sv_density_even(xi, x):
    law = mp_edges(xi)
    assert sv_density(law, -x) == sv_density(law, x)


def test_mp_stieltjes_reference_value():
    law = mp_edges(1)
    z = 1j
    # rho_MP(x) = x^{-1/2} (4 - x)^{1/2} / (2 pi): let QUADPACK carry the algebraic weight
    ref = quad(lambda x: (1 / (x - z)).real / (2 * np.pi), 0, 4, weight="alg", wvar=(-0.5, 0.5))[0] + 1j * quad(
        lambda x: (1 / (x - z)).imag / (2 * np.pi), 0, 4, weight="alg", wvar=(-0.5, 0.5))[0]
    m = mp_stieltjes(law, z)
    assert abs(m - (0.30024 + 0.62481j)) < 1e-4
    assert abs(m - ref) < 1e-12


@settings(max_examples=200, deadline=None)
@given(xis, upper)
def test_mp_branch_and_quadratic(xi, z):
    law = mp_edges(xi)
    m = mp_stieltjes(law, z)
    assert m.imag > 0
    assert abs(mp_quadratic_residual(law, z, m)) < 1e-12 * max(1, abs(z) * abs(m) ** 2, abs(m))


def test_mp_stieltjes_on_support_raises():
    with pytest.raises(ValueError, match="inversion"):
        mp_stieltjes(mp_edges(0.25), 1.0)


def test_sv_stieltjes_semicircle():
    assert abs(sv_stieltjes(mp_edges(1), 2j) - (np.sqrt(2) - 1) * 1j) < 1e-15


@settings(max_examples=200, deadline=None)
@given(xis, upper)
def test_sv_consistency_and_symmetry(xi, z):
    law = mp_edges(xi)
    m = sv_stieltjes(law, z)
    assert m.imag > 0
    assert abs(m - z * mp_stieltjes(law, z * z)) < 1e-13 * max(1.0, abs(m))
    assert abs(sv_stieltjes(law, -z.conjugate()) + m.conjugate()) < 1e-13 * max(1.0, abs(m))


def test_sv_stieltjes_monte_carlo():
    law = mp_edges(0.5)
    samples = sample_sv_law(law, 10**6, np.random.default_rng(5))
    z = 1 + 0.5j
    emp = np.mean(1 / (samples - z))
    assert abs(emp - sv_stieltjes(law, z)) < 1e-2


@pytest.mark.parametrize("xi,n", [(1.0, 50), (0.25, 200), (0.5, 101)])
def test_typical_locations(xi, n):
    law = mp_edges(xi)
    loc = typical_locations(law, n)
    assert loc.gamma[-1] == np.sqrt(law.lambda_plus)
    assert np.all(np.diff(loc.gamma) > 0)
    assert np.max(np.abs(quantile_residuals(law, loc))) < 1e-10
    sym = loc.symmetrized()
    assert np.array_equal(sym[:n], -loc.gamma[::-1])


def test_typical_location_semicircle_quantile():
    n = 40
    g = typical_locations(mp_edges(1), n).gamma[n // 2 - 1]
    # semicircle CDF: 1/2 + (x sqrt(4 - x^2) / 4 + asin(x / 2)) / pi
    cdf = 0.5 + (g * np.sqrt(4 - g * g) / 4 + np.arcsin(g / 2)) / np.pi
    assert abs(cdf - 0.75) < 1e-10


def test_mp_cdf_methods_agree():
    law = mp_edges(0.3)
    x = np.linspace(law.lambda_minus, law.lambda_plus, 37)
    assert np.max(np.abs(mp_cdf(law, x) - mp_cdf(law, x, method="quad"))) < 1e-12


def test_empirical_stieltjes_examples():
    assert abs(empirical_stieltjes([1.0], 2j) - 0.4j) < 1e-16
    with pytest.raises(ValueError):
        empirical_stieltjes([1.0, 2.0], -2.0 + 0j)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(min_value=0.01, max_value=3), min_size=1, max_size=30), upper)
def test_empirical_identity(svals, z):
    s = np.sort(svals)
    m = empirical_stieltjes(s, z)
    assert abs(m - z * eigen_stieltjes(s * s, z * z)) < 1e-13 * max(1.0, abs(m))
    assert abs(empirical_stieltjes(s, z.conjugate()) - m.conjugate()) < 1e-13 * max(1.0, abs(m))


def test_edge_distances_examples():
    d = edge_distances(mp_edges(1), 2.0)
    assert (d.kappa, d.a, d.b) == (0.0, 0.0, 0.0)
    d = edge_distances(mp_edges(0.25), 1.5 + 0.1)
    assert d.kappa == pytest.approx(0.1, abs=1e-15) and d.a == pytest.approx(0.1, abs=1e-15)
    assert edge_distances(mp_edges(0.25), 1.0 + 0.2j).b > 0
