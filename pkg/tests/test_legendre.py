import numpy as np
import pytest
from numpy.testing import assert_allclose

from spheremag.legendre import LegendreTables, block_start, legendre, legendre_all


def test_legendre_low_orders():
    assert legendre(0, 0.3) == 1.0
    assert legendre(1, 0.5) == 0.5
    # closed form (3t^2 - 1)/2
    assert_allclose(legendre(2, 0.5), -0.125, atol=1e-15)


def test_legendre_endpoint_normalization():
    for n in (1, 5, 20, 100):
        assert_allclose(legendre(n, 1.0), 1.0, atol=1e-12)


def test_legendre_against_numpy_basis():
    # independent oracle: numpy's Legendre polynomial evaluation
    t = np.linspace(-1, 1, 17)
    for n in (3, 7, 15, 40):
        ref = np.polynomial.legendre.Legendre.basis(n)(t)
        assert_allclose(legendre(n, t), ref, atol=1e-12)


def test_legendre_domain_check():
    with pytest.raises(ValueError):
        legendre(2, 1.5)
    with pytest.raises(ValueError):
        legendre(-1, 0.0)


def test_legendre_all_stack():
    t = np.array([-0.7, 0.1, 0.9])
    stack = legendre_all(6, t)
    for n in range(7):
        assert_allclose(stack[n], legendre(n, t), atol=1e-14)


def test_tables_orthonormal_in_latitude():
    # int_{-1}^{1} Theta_n^m Theta_p^m dt = delta_np, checked with Gauss quadrature
    L = 12
    t, w = np.polynomial.legendre.leggauss(2 * L + 2)
    tab = LegendreTables(L, t)
    for m in (0, 1, 3, 7):
        block = tab.block("plm", m)
        gram = (block * w) @ block.T
        assert_allclose(gram, np.eye(L + 1 - m), atol=1e-12)


def test_tables_over_sin_consistency():
    L = 8
    t = np.linspace(-0.95, 0.95, 11)
    s = np.sqrt(1 - t**2)
    tab = LegendreTables(L, t, s, derivatives=True)
    for m in (1, 2, 5):
        assert_allclose(tab.block("over_sin", m) * s, tab.block("plm", m), atol=1e-12)


def test_tables_theta_derivative_fd():
    # oracle: central finite differences in theta
    L = 9
    theta = np.array([0.3, 1.1, 2.0, 2.8])
    h = 1e-6
    tab = LegendreTables(L, np.cos(theta), np.sin(theta), derivatives=True)
    tp = LegendreTables(L, np.cos(theta + h), np.sin(theta + h))
    tm = LegendreTables(L, np.cos(theta - h), np.sin(theta - h))
    fd = (tp.plm - tm.plm) / (2 * h)
    assert np.max(np.abs(tab.dplm_dtheta - fd)) < 1e-7


def test_tables_pole_values_finite():
    L = 6
    tab = LegendreTables(L, np.array([1.0, -1.0]), np.array([0.0, 0.0]), derivatives=True)
    assert np.all(np.isfinite(tab.plm))
    assert np.all(np.isfinite(tab.plm_over_sin))
    assert np.all(np.isfinite(tab.dplm_dtheta))
    # orders m >= 2 vanish at the poles even after division by sin(theta)
    assert_allclose(tab.block("over_sin", 2), 0.0, atol=1e-300)


def test_block_start_packing():
    L = 5
    assert block_start(L, 0) == 0
    assert block_start(L, 1) == L + 1
    assert block_start(L, 2) == 2 * L + 1
