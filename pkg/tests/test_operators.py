import numpy as np
import pytest
from numpy.testing import assert_allclose

from spheremag import harmonics as H
from spheremag import operators as O
from spheremag.sphere import build_gauss_grid, integrate


def random_vector_coeffs(rng, L):
    c = [rng.standard_normal(H.coeff_size(L)) for _ in range(3)]
    c[1][0] = c[2][0] = 0.0
    return H.VectorCoeffs(L, *c)


def test_multiplier_degree0():
    c = H.ScalarCoeffs.unit(0, 0, 1)
    assert_allclose(O.apply_multiplier(c, "D").values[0], 0.5)
    assert_allclose(O.apply_multiplier(c, "D_inv").values[0], 2.0)
    assert_allclose(O.apply_multiplier(c, "D_minus_half").values[0], 0.0)


def test_multiplier_factorization_identity():
    rng = np.random.default_rng(0)
    c = H.ScalarCoeffs(16, rng.standard_normal(H.coeff_size(16)))
    lhs = O.apply_multiplier(O.apply_multiplier(c, "D_plus_half"), "D_minus_half")
    rhs = O.apply_multiplier(c, "neg_beltrami")
    assert np.max(np.abs(lhs.values - rhs.values)) <= 1e-12 * np.max(np.abs(rhs.values))


def test_multiplier_inverse_identity():
    rng = np.random.default_rng(1)
    c = H.ScalarCoeffs(12, rng.standard_normal(H.coeff_size(12)))
    back = O.apply_multiplier(O.apply_multiplier(c, "D"), "D_inv")
    assert np.max(np.abs(back.values - c.values)) <= 1e-15


def test_multiplier_nullspace_guard():
    c = H.ScalarCoeffs.unit(2, 0, 1)
    with pytest.raises(ValueError):
        O.apply_multiplier(c, "D_minus_half_inv")
    mean_free = H.ScalarCoeffs.unit(2, 1, 1)
    out = O.apply_multiplier(mean_free, "D_minus_half_inv")
    assert_allclose(out.get(1, 1), 1.0)


def test_multiplier_unknown_kind():
    with pytest.raises(ValueError):
        O.apply_multiplier(H.ScalarCoeffs.zeros(1), "beltrami")


def test_helmholtz_radial_field():
    g = build_gauss_grid(10, 20)
    L = 5
    rng = np.random.default_rng(2)
    G = H.ScalarCoeffs(L, rng.standard_normal(H.coeff_size(L)))
    samples = H.sht_inverse(G, g.nodes)[:, None] * g.nodes
    h = O.helmholtz_decompose(samples, g, L)
    assert np.max(np.abs(h.F1.values - G.values)) <= 1e-10
    assert np.max(np.abs(h.F2.values)) <= 1e-10
    assert np.max(np.abs(h.F3.values)) <= 1e-10


def test_helmholtz_gradient_field():
    g = build_gauss_grid(8, 16)
    grad = H.grad_basis_matrices(1, g.nodes)[H.flat_index(1, 1)]
    h = O.helmholtz_decompose(grad, g, 3)
    assert_allclose(h.F2.get(1, 1), 1.0, atol=1e-10)
    rest = np.concatenate([h.F1.values, h.F3.values,
                           np.delete(h.F2.values, H.flat_index(1, 1))])
    assert np.max(np.abs(rest)) <= 1e-10


def test_helmholtz_resynthesis():
    rng = np.random.default_rng(3)
    L = 8
    g = build_gauss_grid(10, 20)
    f = H.vsht_inverse(random_vector_coeffs(rng, L), g.nodes)
    h = O.helmholtz_decompose(f, g, L)
    back = O.helmholtz_synthesize(h, g.nodes)
    assert np.max(np.abs(back - f)) <= 1e-10


def test_variant2_from_helmholtz_tangential_example():
    # F2 = Y_{1,1}: S1 = -1/3 Y_{1,1}, S2 = 2/3 Y_{1,1}; synthesis oracle recovers grad* Y_{1,1}
    L = 1
    h = O.HelmholtzScalars(H.ScalarCoeffs.zeros(L), H.ScalarCoeffs.unit(L, 1, 1),
                           H.ScalarCoeffs.zeros(L))
    s = O.hardy_hodge_from_helmholtz(h)
    assert_allclose(s.S1.get(1, 1), -1.0 / 3.0, atol=1e-14)
    assert_allclose(s.S2.get(1, 1), 2.0 / 3.0, atol=1e-14)
    g = build_gauss_grid(6, 12)
    resynth = H.vsht_inverse(O.scalars_to_coeffs(s), g.nodes)
    grad = H.grad_basis_matrices(L, g.nodes)[H.flat_index(1, 1)]
    assert np.max(np.abs(resynth - grad)) <= 1e-12


def test_variant2_degree0_arithmetic():
    L = 0
    h = O.HelmholtzScalars(H.ScalarCoeffs.unit(L, 0, 1), H.ScalarCoeffs.zeros(L),
                           H.ScalarCoeffs.zeros(L))
    s = O.hardy_hodge_from_helmholtz(h)
    assert_allclose(s.S1.get(0, 1), 1.0)
    assert_allclose(s.S2.get(0, 1), 1.0)


def test_variant2_curl_passthrough():
    L = 2
    h = O.HelmholtzScalars(H.ScalarCoeffs.zeros(L), H.ScalarCoeffs.zeros(L),
                           H.ScalarCoeffs.unit(L, 2, 1))
    s = O.hardy_hodge_from_helmholtz(h)
    assert_allclose(s.S3.get(2, 1), 1.0)
    assert np.max(np.abs(s.S1.values)) == 0.0
    assert np.max(np.abs(s.S2.values)) == 0.0


def test_variant3_relations():
    rng = np.random.default_rng(4)
    L = 10
    f1 = H.ScalarCoeffs(L, rng.standard_normal(H.coeff_size(L)))
    f2v = rng.standard_normal(H.coeff_size(L))
    f3v = rng.standard_normal(H.coeff_size(L))
    f2v[0] = f3v[0] = 0.0
    h = O.HelmholtzScalars(f1, H.ScalarCoeffs(L, f2v), H.ScalarCoeffs(L, f3v))
    s2 = O.hardy_hodge_from_helmholtz(h)
    s3 = O.hh3_scalars(h)
    assert np.max(np.abs(s3.S1.values
                         - O.apply_multiplier(s2.S1, "D_plus_half").values)) <= 1e-12
    assert np.max(np.abs(s3.S2.values
                         - O.apply_multiplier(s2.S2, "D_minus_half").values)) <= 1e-12
    assert np.max(np.abs(s3.S3.values
                         - O.apply_multiplier(s2.S3, "D_minus_half").values)) <= 1e-12


def test_variant3_degree0_examples():
    L = 1
    h = O.HelmholtzScalars(H.ScalarCoeffs.unit(L, 0, 1), H.ScalarCoeffs.zeros(L),
                           H.ScalarCoeffs.zeros(L))
    s = O.hh3_scalars(h)
    assert_allclose(s.S1.get(0, 1), 1.0, atol=1e-14)
    assert_allclose(s.S2.get(0, 1), 0.0, atol=1e-14)
    h2 = O.HelmholtzScalars(H.ScalarCoeffs.zeros(L), H.ScalarCoeffs.zeros(L),
                            H.ScalarCoeffs.unit(L, 1, 1))
    s2 = O.hh3_scalars(h2)
    assert_allclose(s2.S3.get(1, 1), 1.0, atol=1e-14)


def test_spectral_unit_family3():
    g = build_gauss_grid(8, 16)
    f = H.vector_harm(3, 2, 2, g.nodes)
    coeffs, _ = O.hardy_hodge_spectral(f, g, 3)
    assert_allclose(coeffs.c3[H.flat_index(2, 2)], 1.0, atol=1e-10)
    rest = np.concatenate([coeffs.c1, coeffs.c2,
                           np.delete(coeffs.c3, H.flat_index(2, 2))])
    assert np.max(np.abs(rest)) <= 1e-10


def test_spectral_parts_orthogonal_and_complete():
    rng = np.random.default_rng(5)
    L = 8
    g = build_gauss_grid(10, 20)
    f = H.vsht_inverse(random_vector_coeffs(rng, L), g.nodes)
    coeffs, _ = O.hardy_hodge_spectral(f, g, L)
    p1, p2, p3 = O.hardy_hodge_parts(coeffs, g.nodes)
    norm = np.sqrt(integrate(np.sum(f**2, axis=1), g))
    assert np.max(np.abs(p1 + p2 + p3 - f)) <= 1e-10 * norm
    for a, b in ((p1, p2), (p1, p3), (p2, p3)):
        assert abs(integrate(np.sum(a * b, axis=1), g)) <= 1e-10 * norm**2


def test_dual_path_agreement():
    rng = np.random.default_rng(6)
    L = 8
    g = build_gauss_grid(10, 20)
    f = H.vsht_inverse(random_vector_coeffs(rng, L), g.nodes)
    _, s_spec = O.hardy_hodge_spectral(f, g, L)
    s_helm = O.hardy_hodge_from_helmholtz(O.helmholtz_decompose(f, g, L))
    for a, b in ((s_spec.S1, s_helm.S1), (s_spec.S2, s_helm.S2), (s_spec.S3, s_helm.S3)):
        assert np.max(np.abs(a.values - b.values)) <= 1e-10


def test_obar_consistency():
    # first zeroth-order part obar1[S1_III] equals the first-order part otilde1[S1_II]
    rng = np.random.default_rng(7)
    L = 6
    g = build_gauss_grid(8, 16)
    f = H.vsht_inverse(random_vector_coeffs(rng, L), g.nodes)
    helm = O.helmholtz_decompose(f, g, L)
    s2 = O.hardy_hodge_from_helmholtz(helm)
    s3 = O.hh3_scalars(helm)
    coeffs = O.scalars_to_coeffs(s2)
    p1, _, _ = O.hardy_hodge_parts(coeffs, g.nodes)
    # obar1 = o1 - o2 (D + 1/2)^{-1}: synthesize from Helmholtz scalars of that shape
    sbar1 = s3.S1
    tang = O.apply_multiplier(sbar1, "D_plus_half_inv").values
    tang_mean_free = tang.copy()
    tang_mean_free[0] = 0.0  # o2 annihilates constants; drop the inert mean
    recon = O.helmholtz_synthesize(
        O.HelmholtzScalars(sbar1, H.ScalarCoeffs(L, -tang_mean_free),
                           H.ScalarCoeffs.zeros(L)), g.nodes)
    assert np.max(np.abs(recon - p1)) <= 1e-10


def test_structural_mean_conditions():
    rng = np.random.default_rng(8)
    L = 5
    g = build_gauss_grid(8, 16)
    f = H.vsht_inverse(random_vector_coeffs(rng, L), g.nodes)
    f += g.nodes * 0.7  # add a radial mean so degree 0 is exercised
    _, s_spec = O.hardy_hodge_spectral(f, g, L)
    assert s_spec.S1.values[0] == s_spec.S2.values[0]
    assert s_spec.S3.values[0] == 0.0
    s3 = O.hh3_scalars(O.helmholtz_decompose(f, g, L))
    assert s3.S2.values[0] == 0.0
    assert s3.S3.values[0] == 0.0
