import json
import math

import numpy as np
import pytest

from oscent import (
    DisorderModel,
    assemble_anderson,
    assemble_custom,
    bruteforce_reduced_diagonal,
    build_box,
    eigensystem,
    entropy_report,
    excitation_profile,
    excitation_weights,
    excited_diagonal_element,
    excited_diagonal_trace,
    excited_half_renyi_bounds,
    ground_state_renyi,
    half_renyi_factor,
    log_negativity,
    make_region,
    occupation_cutoffs,
    partition_blocks,
    renyi_factor,
    sample_springs,
    single_excitation_ensemble_bound,
    spd_sqrt,
    symplectic_spectrum,
)


def series_renyi(mu, eps, terms=400):
    """Independent oracle: sum the reduced-state eigenvalue series directly."""
    total_log = 0.0
    for m in np.atleast_1d(mu):
        n = np.arange(terms)
        lam = (2.0 / (1.0 + m)) * ((m - 1.0) / (m + 1.0)) ** n
        total_log += math.log(np.sum(lam**eps))
    return total_log / (1.0 - eps)


def coupled_system(springs=(1.0, 1.0), region_sites=((0,),)):
    lat = build_box(1, [len(springs)])
    h = assemble_anderson(lat, np.asarray(springs, dtype=float))
    data = eigensystem(h)
    blocks = partition_blocks(spd_sqrt(data), make_region(lat, region_sites))
    return lat, h, data, blocks, symplectic_spectrum(blocks)


def decoupled_system(freqs=(1.5, 2.5), region_sites=((0,),)):
    lat = build_box(1, [len(freqs)])
    h = assemble_custom(lat, np.diag(np.square(freqs)))
    data = eigensystem(h)
    blocks = partition_blocks(spd_sqrt(data), make_region(lat, region_sites))
    return lat, h, data, blocks, symplectic_spectrum(blocks)


def test_renyi_factor_at_one_is_one():
    for eps in (0.1, 0.5, 0.9):
        assert renyi_factor(1.0, eps) == pytest.approx(1.0, abs=1e-15)


def test_renyi_factor_exact_value_at_five_fourths():
    # sqrt(9/8) - sqrt(1/8) = 1/sqrt(2), hence f = sqrt(2)
    assert renyi_factor(1.25, 0.5) == pytest.approx(math.sqrt(2.0), abs=1e-15)


def test_renyi_factor_domain_errors():
    with pytest.raises(ValueError):
        renyi_factor(0.9, 0.5)
    with pytest.raises(ValueError):
        renyi_factor(2.0, 1.0)
    with pytest.raises(ValueError):
        renyi_factor(2.0, 0.0)


@pytest.mark.parametrize("x", [1.1, 2.0, 10.0])
def test_half_factor_upper_bound(x):
    assert renyi_factor(x, 0.5) <= math.sqrt(x * x - 1.0) + 1.0


def test_half_factor_closed_form_identity():
    xs = np.array([1.0, 1.01, 1.25, 2.0, 7.5, 40.0])
    np.testing.assert_allclose(renyi_factor(xs, 0.5), half_renyi_factor(xs), rtol=1e-14)


def test_ground_renyi_is_zero_for_product_state():
    mu = np.ones(5)
    for eps in (0.2, 0.5, 0.9, 1.0):
        assert ground_state_renyi(mu, eps) == 0.0


def test_ground_renyi_two_site_value_against_series_oracle():
    *_, spec = coupled_system()
    value = ground_state_renyi(spec, 0.5)
    assert value == pytest.approx(series_renyi(spec.mu, 0.5), abs=1e-12)
    # frozen from the series oracle (two coupled unit-spring oscillators)
    assert value == pytest.approx(0.274653072167027, abs=1e-12)
    assert value == pytest.approx(2.0 * math.log(half_renyi_factor(spec.mu[0])), abs=1e-14)


@pytest.mark.parametrize("eps", [0.25, 0.6, 0.85])
def test_ground_renyi_matches_series_on_random_spectra(eps):
    rng = np.random.default_rng(5)
    for _ in range(10):
        mu = 1.0 + rng.uniform(0.0, 1.5, size=4)
        assert ground_state_renyi(mu, eps) == pytest.approx(series_renyi(mu, eps), rel=1e-10)


def test_renyi_non_increasing_in_eps():
    values = [ground_state_renyi(np.array([1.5]), e) for e in (0.3, 0.5, 0.9, 1.0)]
    assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))


def test_von_neumann_limit_consistency():
    rng = np.random.default_rng(29)
    for _ in range(50):
        mu = 1.0 + rng.uniform(0.0, 2.0, size=5)
        near = ground_state_renyi(mu, 1.0 - 1e-6)
        exact = ground_state_renyi(mu, 1.0)
        assert abs(near - exact) <= 1e-4


def test_bound_chain_orders_renyi_values():
    rng = np.random.default_rng(31)
    for _ in range(20):
        mu = 1.0 + rng.uniform(0.0, 1.0, size=3)
        logneg = log_negativity(mu)
        vn = ground_state_renyi(mu, 1.0)
        for eps in (0.55, 0.7, 0.9):
            value = ground_state_renyi(mu, eps)
            assert vn - 1e-12 <= value <= logneg + 1e-12


def test_log_negativity_equals_half_renyi():
    *_, spec = coupled_system(springs=(0.3, 2.0))
    assert log_negativity(spec) == ground_state_renyi(spec, 0.5)
    assert log_negativity(np.array([1.25])) == pytest.approx(math.log(2.0), abs=1e-14)


def test_profile_decoupled_examples():
    lat, h, data, blocks, spec = decoupled_system()
    inside = excitation_profile(data, blocks, spec, 1)
    assert inside.nu == pytest.approx(1.0)
    assert inside.weights[0] == pytest.approx(2.0, abs=1e-12)  # saturates the row-sum cap
    outside = excitation_profile(data, blocks, spec, 2)
    assert outside.weights[0] == pytest.approx(0.0, abs=1e-14)
    np.testing.assert_allclose(outside.v_region, 0.0, atol=1e-14)
    with pytest.raises(IndexError):
        excitation_profile(data, blocks, spec, 3)


def test_weight_column_sums_equal_two():
    lat = build_box(1, [10])
    springs = sample_springs(DisorderModel(k_max=8.0, seed=3), lat, 0)
    h = assemble_anderson(lat, springs)
    data = eigensystem(h)
    blocks = partition_blocks(spd_sqrt(data), make_region(lat, [(3,), (4,), (5,), (6,)]))
    spec = symplectic_spectrum(blocks)
    weights = excitation_weights(data, blocks, spec)
    assert weights.shape == (10, 4)
    assert np.all(weights >= 0.0)
    np.testing.assert_allclose(weights.sum(axis=0), 2.0, atol=1e-8)
    assert np.all(weights.sum(axis=1) <= 2.0 + 1e-9)


def test_energy_split_identity_per_mode():
    lat, h, data, blocks, spec = coupled_system(springs=(0.7, 1.9, 0.2), region_sites=((0,),))
    for k in (1, 2, 3):
        profile = excitation_profile(data, blocks, spec, k)
        split = profile.frequency * float(
            profile.nu @ blocks.solve_schur(profile.nu)
        ) + profile.complement_energy
        assert split == pytest.approx(1.0, abs=1e-8)
        # definition route agrees with the Schur route
        direct = profile.frequency ** -1.0 * blocks.schur @ profile.v_region
        np.testing.assert_allclose(profile.nu, direct.ravel(), atol=1e-10)


def test_excited_diagonal_decoupled_limit():
    lat, h, data, blocks, spec = decoupled_system()
    profile = excitation_profile(data, blocks, spec, 1)
    assert excited_diagonal_element(profile, spec, [0]) == 0.0
    assert excited_diagonal_element(profile, spec, [1]) == pytest.approx(1.0, abs=1e-12)
    assert excited_diagonal_element(profile, spec, [2]) == 0.0


def test_excited_diagonal_matches_bruteforce():
    lat, h, data, blocks, spec = coupled_system()
    region = blocks.region
    for k in (1, 2):
        profile = excitation_profile(data, blocks, spec, k)
        alpha = [0, 0]
        alpha[k - 1] = 1
        for n in range(4):
            formula = excited_diagonal_element(profile, spec, [n])
            brute = bruteforce_reduced_diagonal(h, region, alpha, [n])
            assert formula == pytest.approx(brute, abs=1e-6)


def test_excited_diagonals_are_nonnegative():
    rng = np.random.default_rng(37)
    lat = build_box(1, [8])
    model = DisorderModel(k_max=8.0, seed=11)
    for index in range(5):
        h = assemble_anderson(lat, sample_springs(model, lat, index))
        data = eigensystem(h)
        blocks = partition_blocks(spd_sqrt(data), make_region(lat, [(2,), (3,), (4,)]))
        spec = symplectic_spectrum(blocks)
        for k in (1, 4, 8):
            profile = excitation_profile(data, blocks, spec, k)
            for _ in range(10):
                n = rng.integers(0, 4, size=3)
                assert excited_diagonal_element(profile, spec, n) >= 0.0


def test_excited_trace_normalizes():
    lat, h, data, blocks, spec = coupled_system(springs=(0.5, 3.0, 1.2), region_sites=((0,), (1,)))
    for k in (1, 2, 3):
        profile = excitation_profile(data, blocks, spec, k)
        trace = excited_diagonal_trace(profile, spec)
        assert trace == pytest.approx(1.0, abs=1e-6)
    cutoffs = occupation_cutoffs(spec)
    assert np.all(cutoffs >= 1)


def test_half_renyi_bounds_decoupled_values():
    lat, h, data, blocks, spec = decoupled_system()
    inside = excitation_profile(data, blocks, spec, 1)
    computed, theorem = excited_half_renyi_bounds(inside, spec)
    assert computed == pytest.approx(2.0 * math.log(1.0 + math.sqrt(2.0)), abs=1e-12)
    assert math.isnan(theorem)  # single-site region: theorem route needs size > 1
    outside = excitation_profile(data, blocks, spec, 2)
    computed, _ = excited_half_renyi_bounds(outside, spec)
    assert computed == pytest.approx(0.0, abs=1e-12)


def test_half_renyi_bounds_ordering_on_realizations():
    lat = build_box(1, [10])
    model = DisorderModel(k_max=8.0, seed=19)
    region = make_region(lat, [(3,), (4,), (5,), (6,)])
    for index in range(8):
        h = assemble_anderson(lat, sample_springs(model, lat, index))
        data = eigensystem(h)
        blocks = partition_blocks(spd_sqrt(data), region)
        spec = symplectic_spectrum(blocks)
        logneg = log_negativity(spec)
        intermediate = 2.0 * logneg + 2.0 * math.log(1.0 + math.sqrt(2.0) * region.size)
        for k in range(1, 11):
            profile = excitation_profile(data, blocks, spec, k)
            computed, theorem = excited_half_renyi_bounds(profile, spec)
            assert computed <= intermediate + 1e-12
            assert computed <= theorem + 1e-12
            assert theorem == pytest.approx(2.0 * logneg + 4.0 * math.log(region.size))


def test_theorem_bound_dominates_bruteforce_half_renyi():
    # reconstruct the reduced single-excitation state as a matrix in the
    # mode basis, take its actual 1/2-Renyi entropy, and compare with both
    # bounds; the region has two sites so the theorem bound applies
    from oscent import bruteforce_reduced_matrix_element

    lat, h, data, blocks, spec = coupled_system(
        springs=(1.5, 0.4, 2.0), region_sites=((0,), (1,))
    )
    profile = excitation_profile(data, blocks, spec, 2)
    box = [(i, j) for i in range(5) for j in range(5)]
    matrix = np.zeros((len(box), len(box)))
    for a, bra in enumerate(box):
        for b in range(a, len(box)):
            value = bruteforce_reduced_matrix_element(h, blocks.region, [0, 1, 0], bra, box[b])
            matrix[a, b] = matrix[b, a] = value
    assert np.trace(matrix) == pytest.approx(1.0, abs=1e-6)
    eigenvalues = np.linalg.eigvalsh(matrix)
    positive = eigenvalues[eigenvalues > 1e-14]
    brute_half_renyi = 2.0 * math.log(np.sum(np.sqrt(positive)))
    computed, theorem = excited_half_renyi_bounds(profile, spec)
    assert brute_half_renyi <= computed + 1e-9
    assert computed <= theorem + 1e-12


def test_ensemble_bound_values_and_hypothesis():
    *_, spec = decoupled_system()
    assert single_excitation_ensemble_bound(spec, 2, 1) == pytest.approx(math.log(3.0))
    with pytest.raises(ValueError):
        single_excitation_ensemble_bound(spec, 9, 4)
    lat = build_box(1, [100])
    h = assemble_anderson(lat, sample_springs(DisorderModel(k_max=8.0, seed=23), lat, 0))
    data = eigensystem(h)
    region = make_region(lat, [(i,) for i in range(45, 55)])
    spec_big = symplectic_spectrum(partition_blocks(spd_sqrt(data), region))
    value = single_excitation_ensemble_bound(spec_big, 100, 10)
    assert value == pytest.approx(math.log(3.0) + 2.0 * ground_state_renyi(spec_big, 0.5))
    assert math.isfinite(value)


def test_entropy_report_serialization():
    lat, h, data, blocks, spec = coupled_system(springs=(1.0, 2.0, 0.5), region_sites=((0,), (1,)))
    profiles = [excitation_profile(data, blocks, spec, k) for k in (1, 2, 3)]
    report = entropy_report(spec, [0.5, 0.75, 1.0], profiles, lattice_size=lat.size)
    payload = json.loads(report.to_json())
    assert payload["eps"] == [0.5, 0.75, 1.0]
    assert payload["ground_renyi"][0] == pytest.approx(report.log_negativity)
    assert len(payload["excited_computed_bounds"]) == 3
    assert payload["ensemble_bound"] is None  # 2^2 > 3
    rows = report.to_csv_rows()
    assert len(rows) == 3 and all(len(r.split(",")) == 4 for r in rows)
    values = report.ground_renyi
    assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))
