import numpy as np
import pytest
from numpy.testing import assert_allclose

from spheremag import forward as F
from spheremag import harmonics as H
from spheremag.sphere import build_gauss_grid, fibonacci_points, gauss_grid_for_degree

ORACLE_GRID = gauss_grid_for_degree(320)


def random_vector_coeffs(rng, L, decay=1.0):
    scale = decay ** H.degrees_flat(L)
    c = [rng.standard_normal(H.coeff_size(L)) * scale for _ in range(3)]
    c[1][0] = c[2][0] = 0.0
    return H.VectorCoeffs(L, *c)


def test_potential_zero_magnetization():
    g = build_gauss_grid(4, 8)
    assert F.potential_direct(np.zeros((g.n_nodes, 3)), g, np.array([0.0, 0.0, 1.5])) == 0.0


def test_potential_on_sphere_rejected():
    g = build_gauss_grid(4, 8)
    with pytest.raises(ValueError):
        F.potential_direct(np.zeros((g.n_nodes, 3)), g, np.array([0.0, 0.0, 1.0]))


def test_toroidal_field_exterior_silent():
    m = H.vector_harm(3, 1, 1, ORACLE_GRID.nodes)
    v = F.potential_direct(m, ORACLE_GRID, np.array([0.0, 0.0, 1.5]))
    assert abs(v) <= 1e-10


def test_exterior_spectral_vs_direct():
    rng = np.random.default_rng(0)
    coeffs = H.VectorCoeffs.unit(1, 2, 1, 1)
    m = H.vsht_inverse(coeffs, ORACLE_GRID.nodes)
    pts = fibonacci_points(20).centers * 1.5
    direct = F.potential_direct(m, ORACLE_GRID, pts)
    spectral = F.potential_exterior_spectral(coeffs, pts)
    assert np.max(np.abs(direct - spectral)) <= 1e-10
    assert np.max(np.abs(spectral)) > 1e-3  # genuinely nonzero field


def test_exterior_ignores_families_1_and_3():
    rng = np.random.default_rng(1)
    c1 = rng.standard_normal(H.coeff_size(4))
    c3 = rng.standard_normal(H.coeff_size(4))
    c3[0] = 0.0
    coeffs = H.VectorCoeffs(4, c1, np.zeros(H.coeff_size(4)), c3)
    pts = fibonacci_points(10).centers * 2.0
    assert np.max(np.abs(F.potential_exterior_spectral(coeffs, pts))) == 0.0


def test_exterior_closed_form_degree1():
    coeffs = H.VectorCoeffs.unit(1, 2, 1, 1)
    x = np.array([0.0, 1.2, 1.6])  # |x| = 2
    expected = (np.sqrt(3) / 3) * 2.0 ** (-2) * H.sph_harm(1, 1, x / 2.0)
    assert_allclose(F.potential_exterior_spectral(coeffs, x), expected, atol=1e-14)


def test_exterior_linearity():
    rng = np.random.default_rng(2)
    a = random_vector_coeffs(rng, 3)
    b = random_vector_coeffs(rng, 3)
    summed = H.VectorCoeffs(3, a.c1 + b.c1, a.c2 + b.c2, a.c3 + b.c3)
    x = np.array([1.1, -0.4, 0.9])
    va = F.potential_exterior_spectral(a, x)
    vb = F.potential_exterior_spectral(b, x)
    vs = F.potential_exterior_spectral(summed, x)
    assert_allclose(vs, va + vb, atol=1e-13)


def test_exterior_domain_check():
    with pytest.raises(ValueError):
        F.potential_exterior_spectral(H.VectorCoeffs.zeros(1), np.array([0.0, 0.0, 0.5]))


def test_interior_ignores_families_2_and_3():
    rng = np.random.default_rng(3)
    c2 = rng.standard_normal(H.coeff_size(4))
    c3 = rng.standard_normal(H.coeff_size(4))
    c2[0] = c3[0] = 0.0
    coeffs = H.VectorCoeffs(4, np.zeros(H.coeff_size(4)), c2, c3)
    assert F.potential_interior_spectral(coeffs, np.array([0.0, 0.0, 0.5])) == 0.0


def test_interior_degree0_vs_direct():
    coeffs = H.VectorCoeffs.unit(0, 1, 0, 1)
    m = H.vsht_inverse(coeffs, ORACLE_GRID.nodes)
    x = np.array([0.0, 0.0, 0.5])
    assert_allclose(F.potential_interior_spectral(coeffs, x),
                    F.potential_direct(m, ORACLE_GRID, x), atol=1e-10)


def test_interior_series_certification():
    # locks the derived interior constant -sqrt((n+1)(2n+1))/(2n+1) for n = 1, 2, 3
    rng = np.random.default_rng(4)
    for n in (1, 2, 3):
        k = int(rng.integers(1, 2 * n + 2))
        coeffs = H.VectorCoeffs.unit(n, 1, n, k)
        m = H.vsht_inverse(coeffs, ORACLE_GRID.nodes)
        x = np.array([0.21, -0.33, 0.55])
        assert_allclose(F.potential_interior_spectral(coeffs, x),
                        F.potential_direct(m, ORACLE_GRID, x), atol=1e-10)


def test_spectral_direct_agreement_band_limited():
    rng = np.random.default_rng(5)
    coeffs = random_vector_coeffs(rng, 12, decay=0.8)
    m = H.vsht_inverse(coeffs, ORACLE_GRID.nodes)
    for radius, fn in ((1.1, F.potential_exterior_spectral),
                       (0.9, F.potential_interior_spectral),
                       (1.5, F.potential_exterior_spectral)):
        pts = fibonacci_points(30).centers * radius
        direct = F.potential_direct(m, ORACLE_GRID, pts)
        spectral = fn(coeffs, pts)
        scale = np.max(np.abs(spectral))
        assert np.max(np.abs(direct - spectral)) <= 1e-8 * scale


def test_far_field_decay():
    # |V(r xi)| ~ C / r^2 once the degree-1 term dominates: ratio test at r = 2, 4, 8
    rng = np.random.default_rng(6)
    xi = np.array([0.48, 0.6, 0.64])
    coeffs = random_vector_coeffs(rng, 6, decay=0.3)
    vals = {r: abs(F.potential_exterior_spectral(coeffs, r * xi)) for r in (2.0, 4.0, 8.0)}
    assert vals[4.0] / vals[8.0] == pytest.approx(4.0, rel=0.1)
    assert vals[2.0] / vals[4.0] == pytest.approx(4.0, rel=0.2)
    # r^2-scaled magnitude stays bounded (no slower-decaying content leaks in)
    scaled = [vals[r] * r**2 for r in (2.0, 4.0, 8.0)]
    assert max(scaled) <= 1.5 * min(scaled)


def test_abel_poisson_closed_form():
    assert_allclose(F.abel_poisson(1.0, 0.9), (1 - 0.81) / (1 - 0.9) ** 3, rtol=1e-12)
    assert F.abel_poisson(-1.0, 0.5) > 0.0
    with pytest.raises(ValueError):
        F.abel_poisson(0.5, 1.0)


def test_abel_poisson_mass():
    # zonal integral: int_Omega K(xi.eta) d omega(eta) = 2*pi int_{-1}^{1} K(t) dt = 4*pi
    t, w = np.polynomial.legendre.leggauss(400)
    mass = 2 * np.pi * np.sum(w * F.abel_poisson(t, 0.9))
    assert_allclose(mass, 4 * np.pi, atol=1e-10)


def test_abel_poisson_series_matches_closed_form():
    # the value-series tail is ~(2L/(1-h)) h^L; L = 330 pushes it below 1e-10
    t = np.linspace(-1.0, 1.0, 41)
    closed = F.abel_poisson(t, 0.9)
    series = F.abel_poisson_series(t, 0.9, 330)
    assert np.max(np.abs(closed - series)) <= 1e-10


def test_basis_truncation_invariant():
    centers = fibonacci_points(10)
    basis = F.AbelPoissonBasis(centers=centers, h=0.9)
    assert basis.h**basis.L_K <= 1e-12 * (1 + 1e-9)
    with pytest.raises(ValueError):
        F.AbelPoissonBasis(centers=centers, h=0.9, L_K=10)


def test_kernel_potential_zero_field():
    g = build_gauss_grid(6, 12)
    basis = F.AbelPoissonBasis(centers=fibonacci_points(3), h=0.9)
    val = F.kernel_potential(basis.centers.centers[0], basis,
                             np.zeros((g.n_nodes, 3)), g, np.array([0.0, 0.0, 1.4]))
    assert val == 0.0


def test_kernel_potential_same_integral_oracle():
    basis = F.AbelPoissonBasis(centers=fibonacci_points(5), h=0.9)
    grid = F.default_kernel_grid(0.9, 1.1)
    v = grid.nodes + np.array([0.0, 0.0, 1.0]) - grid.nodes[:, 2:3] * grid.nodes
    center = basis.centers.centers[2]
    x = np.array([0.3, -0.2, 1.2])
    kv = F.abel_poisson(grid.nodes @ center, 0.9)[:, None] * v
    assert_allclose(F.kernel_potential(center, basis, v, grid, x),
                    F.potential_direct(kv, grid, x), atol=1e-12)


def test_kernel_potential_rotational_equivariance():
    from spheremag.sphere import rotation_from_z

    basis_h = 0.9
    grid = gauss_grid_for_degree(300)
    rot = rotation_from_z(np.array([np.sqrt(0.5), 0.0, np.sqrt(0.5)]))
    center = np.array([0.0, 0.0, 1.0])
    zeta = np.array([0.0, 0.0, 1.0])

    def v_fn(pts):
        return pts + zeta[None, :] - (pts @ zeta)[:, None] * pts

    basis = F.AbelPoissonBasis(centers=fibonacci_points(4), h=basis_h)
    x = np.array([0.2, 0.1, 1.3])
    val = F.kernel_potential(center, basis, v_fn(grid.nodes), grid, x)

    def v_rot(pts):
        return v_fn(pts @ rot) @ rot.T  # rotated field: v'(xi) = R v(R^T xi)

    val_rot = F.kernel_potential(rot @ center, basis, v_rot(grid.nodes), grid, rot @ x)
    assert_allclose(val_rot, val, atol=1e-10)


def test_kernel_potential_field_certified_against_direct():
    h, radius = 0.9, 1.1
    basis = F.AbelPoissonBasis(centers=fibonacci_points(12), h=h)
    src = F.default_kernel_grid(h, radius)
    zeta = np.array([0.0, 0.0, 1.0])
    v = src.nodes + zeta[None, :] - (src.nodes @ zeta)[:, None] * src.nodes
    eval_grid = build_gauss_grid(5, 10)
    vmat = F.kernel_potential_field(basis, v, src, radius, eval_grid)
    scale = np.max(np.abs(vmat))
    for ci in (0, 5, 11):
        for ni in (0, 17, 49):
            direct = F.kernel_potential(basis.centers.centers[ci], basis, v, src,
                                        radius * eval_grid.nodes[ni])
            assert abs(direct - vmat[ci, ni]) <= 1e-10 * scale


def test_kernel_potential_field_interior():
    h, radius = 0.9, 0.9
    basis = F.AbelPoissonBasis(centers=fibonacci_points(6), h=h)
    src = F.default_kernel_grid(h, radius)
    v = np.array(src.nodes, copy=True)
    eval_grid = build_gauss_grid(4, 8)
    vmat = F.kernel_potential_field(basis, v, src, radius, eval_grid)
    direct = F.kernel_potential(basis.centers.centers[3], basis, v, src,
                                radius * eval_grid.nodes[7])
    assert_allclose(vmat[3, 7], direct, atol=1e-10 * np.max(np.abs(vmat)))


def test_potential_samples_radius_guard():
    g = build_gauss_grid(3, 6)
    with pytest.raises(ValueError):
        F.PotentialSamples(radius=1.01, grid=g, values=np.zeros(g.n_nodes))
    ps = F.PotentialSamples(radius=1.1, grid=g, values=np.ones(g.n_nodes))
    assert_allclose(np.sum(ps.area_weights), 1.1**2 * 4 * np.pi, atol=1e-10)
