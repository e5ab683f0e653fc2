import numpy as np
import pytest

from oscent import (
    DisorderModel,
    assemble_anderson,
    assemble_custom,
    build_box,
    covariance_matrix,
    covariance_symplectic_eigenvalues,
    eigensystem,
    make_region,
    partition_blocks,
    sample_springs,
    spd_inv_sqrt,
    spd_sqrt,
    symplectic_spectrum,
)

SQ3 = np.sqrt(3.0)


def two_site():
    lat = build_box(1, [2])
    return assemble_custom(lat, [[2.0, -1.0], [-1.0, 2.0]])


def random_chain(n, seed, k_max=8.0, index=0):
    lat = build_box(1, [n])
    springs = sample_springs(DisorderModel(k_max=k_max, seed=seed), lat, index)
    return lat, assemble_anderson(lat, springs)


def test_eigensystem_identity():
    lat = build_box(1, [3])
    data = eigensystem(assemble_custom(lat, np.eye(3)))
    np.testing.assert_allclose(data.frequencies, 1.0)
    np.testing.assert_allclose(data.vectors, np.eye(3))


def test_eigensystem_two_site_hand_values():
    data = eigensystem(two_site())
    np.testing.assert_allclose(data.eigenvalues, [1.0, 3.0], atol=1e-14)
    inv_sq2 = 1.0 / np.sqrt(2.0)
    np.testing.assert_allclose(data.vectors[:, 0], [inv_sq2, inv_sq2], atol=1e-14)
    # sign rule: first largest-magnitude entry made positive
    np.testing.assert_allclose(data.vectors[:, 1], [inv_sq2, -inv_sq2], atol=1e-14)


def test_eigensystem_diagonal():
    lat = build_box(1, [2])
    data = eigensystem(assemble_custom(lat, np.diag([4.0, 9.0])))
    np.testing.assert_allclose(data.frequencies, [2.0, 3.0])


def test_eigensystem_rejects_indefinite():
    lat = build_box(1, [2])
    with pytest.raises(np.linalg.LinAlgError):
        eigensystem(assemble_custom(lat, [[1.0, 2.0], [2.0, 1.0]]))


def test_sqrt_examples():
    lat = build_box(1, [2])
    np.testing.assert_allclose(
        spd_sqrt(assemble_custom(lat, np.diag([4.0, 9.0]))), np.diag([2.0, 3.0]), atol=1e-14
    )
    a = (SQ3 + 1.0) / 2.0
    b = (1.0 - SQ3) / 2.0
    np.testing.assert_allclose(spd_sqrt(two_site()), [[a, b], [b, a]], atol=1e-14)
    np.testing.assert_allclose(spd_sqrt(assemble_custom(lat, np.eye(2))), np.eye(2), atol=1e-15)


def test_sqrt_squares_back_on_large_random_spd():
    rng = np.random.default_rng(3)
    n = 400
    basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
    m = basis @ np.diag(rng.uniform(0.1, 10.0, size=n)) @ basis.T
    m = 0.5 * (m + m.T)
    root = spd_sqrt(m)
    np.testing.assert_allclose(root @ root, m, rtol=0, atol=1e-8 * np.linalg.norm(m, 2))
    np.testing.assert_allclose(spd_inv_sqrt(m) @ root, np.eye(n), atol=1e-8)


def test_partition_two_site_scalars():
    region = make_region(build_box(1, [2]), [(0,)])
    blocks = partition_blocks(spd_sqrt(two_site()), region)
    a = (SQ3 + 1.0) / 2.0
    b = (1.0 - SQ3) / 2.0
    assert blocks.a[0, 0] == pytest.approx(a, abs=1e-14)
    assert blocks.b[0, 0] == pytest.approx(a, abs=1e-14)
    assert blocks.c[0, 0] == pytest.approx(b, abs=1e-14)
    assert blocks.schur[0, 0] == pytest.approx(a - b * b / a, abs=1e-14)


def test_partition_decoupled_schur_equals_a():
    lat = build_box(1, [4])
    hsqrt = np.diag([1.0, 2.0, 3.0, 4.0])
    region = make_region(lat, [(0,), (1,)])
    blocks = partition_blocks(hsqrt, region)
    assert np.array_equal(blocks.schur, blocks.a)


def test_partition_rejects_full_region():
    lat = build_box(1, [3])
    region = make_region(lat, lat.sites)
    with pytest.raises(ValueError):
        partition_blocks(np.eye(3), region)


def test_symplectic_decoupled_modes_are_exactly_one():
    lat = build_box(1, [3])
    region = make_region(lat, [(0,), (1,)])
    blocks = partition_blocks(np.diag([1.0, 2.0, 3.0]), region)
    spec = symplectic_spectrum(blocks)
    np.testing.assert_array_equal(spec.mu, [1.0, 1.0])
    np.testing.assert_array_equal(spec.sigma, [0.0, 0.0])
    np.testing.assert_array_equal(spec.kappa, [1.0, 1.0])


def test_symplectic_two_site_value():
    region = make_region(build_box(1, [2]), [(0,)])
    blocks = partition_blocks(spd_sqrt(two_site()), region)
    spec = symplectic_spectrum(blocks)
    mu_sq_expected = 1.0 / (1.0 - (2.0 - SQ3) ** 2)
    assert spec.mu[0] ** 2 == pytest.approx(mu_sq_expected, abs=1e-12)
    assert spec.mu[0] == pytest.approx(1.0380, abs=1e-4)


def test_symplectic_spectrum_reconstructs_core_and_is_orthogonal():
    lat, h = random_chain(8, seed=17)
    region = make_region(lat, [(2,), (3,), (4,)])
    blocks = partition_blocks(spd_sqrt(h), region)
    spec = symplectic_spectrum(blocks)
    np.testing.assert_allclose(spec.f2.T @ spec.f2, np.eye(3), atol=1e-8)
    a_sqrt = spd_sqrt(blocks.a)
    core = a_sqrt @ np.linalg.solve(blocks.schur, a_sqrt)
    np.testing.assert_allclose(
        spec.f2 @ np.diag(spec.mu**2) @ spec.f2.T, core, atol=1e-8
    )


def test_mu_at_least_one_across_realizations():
    for index in range(20):
        lat, h = random_chain(8, seed=31, index=index)
        region = make_region(lat, [(1,), (2,), (3,)])
        spec = symplectic_spectrum(partition_blocks(spd_sqrt(h), region))
        assert np.all(spec.mu >= 1.0 - 1e-12)
        assert np.all(spec.sigma <= 0.0) and np.all(spec.sigma > -1.0)
        assert np.all(spec.kappa > 0.0) and np.all(spec.kappa <= 1.0)


def test_change_of_variables_diagonalizes_reduced_form():
    # F^T (a - c b^{-1} c^T /2 ... ) checks via the lemma identities below;
    # here: F columns scale A^{-1/2} f2 by sqrt(2 mu^2/(1+mu^2)).
    lat, h = random_chain(6, seed=13)
    region = make_region(lat, [(0,), (1,)])
    blocks = partition_blocks(spd_sqrt(h), region)
    spec = symplectic_spectrum(blocks)
    scale = np.sqrt(2.0 * spec.mu**2 / (1.0 + spec.mu**2))
    np.testing.assert_allclose(spec.f, spec.a_inv_sqrt @ spec.f2 @ np.diag(scale), atol=1e-12)


def test_sigma_theta_lemma_identities():
    lat, h = random_chain(9, seed=41)
    region = make_region(lat, [(3,), (4,), (5,)])
    blocks = partition_blocks(spd_sqrt(h), region)
    spec = symplectic_spectrum(blocks)
    a_inv_sqrt = spec.a_inv_sqrt
    theta = a_inv_sqrt @ blocks.c @ blocks.solve_b(blocks.c.T) @ a_inv_sqrt
    theta = 0.5 * (theta + theta.T)
    eye = np.eye(region.size)
    lhs_b = np.linalg.inv(eye - 0.5 * theta)
    np.testing.assert_allclose(
        spec.f2 @ np.diag(1.0 - spec.sigma) @ spec.f2.T, lhs_b, atol=1e-8
    )
    lhs_c = eye - theta
    np.testing.assert_allclose(
        spec.f2 @ np.diag((1.0 + spec.sigma) / (1.0 - spec.sigma)) @ spec.f2.T,
        lhs_c,
        atol=1e-8,
    )
    # coupling strength strictly between 0 and 1 when the complement dominates
    theta_eigs = np.linalg.eigvalsh(theta)
    assert np.all(theta_eigs > 0.0) and np.all(theta_eigs < 1.0)


def test_covariance_examples():
    # decoupled scalar: gamma and its inverse on the diagonal, symplectic value 1
    lat = build_box(1, [2])
    region = make_region(lat, [(0,)])
    blocks = partition_blocks(np.diag([2.0, 5.0]), region)
    cov = covariance_matrix(blocks)
    np.testing.assert_allclose(cov.matrix, np.diag([0.5, 2.0]))
    np.testing.assert_allclose(covariance_symplectic_eigenvalues(cov), [1.0], atol=1e-12)
    # identity blocks
    blocks_id = partition_blocks(np.eye(2), region)
    cov_id = covariance_matrix(blocks_id)
    np.testing.assert_allclose(cov_id.matrix, np.eye(2))


def test_covariance_route_matches_schur_route():
    region = make_region(build_box(1, [2]), [(0,)])
    blocks = partition_blocks(spd_sqrt(two_site()), region)
    spec = symplectic_spectrum(blocks)
    cov_mu = covariance_symplectic_eigenvalues(covariance_matrix(blocks))
    np.testing.assert_allclose(cov_mu, spec.mu, atol=1e-8)
    for index in range(5):
        lat, h = random_chain(10, seed=53, index=index)
        region = make_region(lat, [(2,), (3,), (4,), (5,)])
        blocks = partition_blocks(spd_sqrt(h), region)
        spec = symplectic_spectrum(blocks)
        cov_mu = covariance_symplectic_eigenvalues(covariance_matrix(blocks))
        np.testing.assert_allclose(cov_mu, spec.mu, atol=1e-8)


def test_eigenvector_signs_are_deterministic():
    lat, h = random_chain(12, seed=71)
    first = eigensystem(h).vectors
    second = eigensystem(h).vectors
    assert np.array_equal(first, second)
    idx = np.abs(first).argmax(axis=0)
    assert np.all(first[idx, np.arange(first.shape[1])] > 0)
