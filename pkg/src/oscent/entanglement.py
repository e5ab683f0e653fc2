"""Entropy formulas and entanglement bounds.

Ground state: the eps-Renyi entanglement entropy is an explicit function of
the symplectic eigenvalues mu_j,

    E_eps = 1/(1-eps) * sum_j log f_eps(mu_j),
    f_eps(x) = (((x+1)/2)^eps - ((x-1)/2)^eps)^(-1),

with eps = 1 the von Neumann limit and eps = 1/2 the logarithmic
negativity. Single-excitation eigenstates are not gaussian; for those only
the diagonal matrix elements in the ground-state mode basis are available
in closed form, and they yield a computable upper bound on the 1/2-Renyi
entropy plus the coarser bound 2 N(ground) + 4 log(region size).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .spectral import BipartitionBlocks, SpectralData, SymplecticSpectrum

# Modes with mu below this threshold take the analytic mu -> 1 limit in the
# excited-state diagonal formula (the (mu-1)^n zero cancels the pole).
MU_ONE_THRESHOLD = 1.0 + 1e-8

# Diagonal elements more negative than this indicate a formula misuse
# rather than rounding noise.
NEGATIVE_FLOOR = -1e-12


def renyi_factor(x, eps: float):
    """Per-mode factor f_eps(x) of the ground-state Renyi formula.

    Defined for x >= 1 and 0 < eps < 1; f_eps(1) = 1 for every eps.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 1.0):
        raise ValueError("renyi_factor requires x >= 1")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    value = 1.0 / (((x + 1.0) / 2.0) ** eps - ((x - 1.0) / 2.0) ** eps)
    return value if value.ndim else float(value)


def half_renyi_factor(x):
    """Closed form of f_{1/2}: sqrt(2)/(sqrt(x+1) - sqrt(x-1))."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 1.0):
        raise ValueError("half_renyi_factor requires x >= 1")
    value = np.sqrt(2.0) / (np.sqrt(x + 1.0) - np.sqrt(x - 1.0))
    return value if value.ndim else float(value)


def _mu_of(spectrum) -> np.ndarray:
    if isinstance(spectrum, SymplecticSpectrum):
        return spectrum.mu
    return np.asarray(spectrum, dtype=float)


def ground_state_renyi(spectrum, eps: float) -> float:
    """eps-Renyi entanglement entropy of the ground state, eps in (0, 1].

    eps = 1 takes the separate von Neumann branch rather than a numerical
    limit; both closed forms come straight from the symplectic eigenvalues.
    Accepts a SymplecticSpectrum or a bare array of mu values.
    """
    mu = _mu_of(spectrum)
    if np.any(mu < 1.0):
        raise ValueError("symplectic eigenvalues must all be >= 1")
    if eps == 1.0:
        plus = (mu + 1.0) / 2.0
        minus = (mu - 1.0) / 2.0
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = plus * np.log(plus) - np.where(minus > 0, minus * np.log(minus), 0.0)
        return float(np.sum(terms))
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    return float(np.sum(np.log(renyi_factor(mu, eps))) / (1.0 - eps))


def log_negativity(spectrum) -> float:
    """Logarithmic negativity of the ground state: the 1/2-Renyi entropy."""
    return ground_state_renyi(spectrum, 0.5)


@dataclass(frozen=True, eq=False)
class ExcitationProfile:
    """Per-excitation quantities entering the excited-state formulas.

    ``mode`` is the 1-based excitation index (ascending frequency order),
    ``nu`` the region part of the eigenvector pushed through the Schur
    complement, ``complement_energy`` the complement quadratic form
    gamma_k (v_k)_c^T b^{-1} (v_k)_c, and ``weights`` the couplings Q_{k,j}
    to the symplectic modes (nonnegative, summing to at most 2).
    """

    mode: int
    frequency: float
    v_region: np.ndarray
    v_complement: np.ndarray
    nu: np.ndarray
    complement_energy: float
    weights: np.ndarray

    @property
    def region_size(self) -> int:
        return self.weights.shape[0]


def _profile_arrays(data: SpectralData, blocks: BipartitionBlocks, spectrum: SymplecticSpectrum):
    """Vectorized nu vectors, complement energies and weights for all modes."""
    ri = blocks.region.indices
    ci = blocks.region.complement_indices
    v_region = data.vectors[ri, :]
    v_complement = data.vectors[ci, :]
    b_inv_v = blocks.solve_b(v_complement)
    nu = v_region - blocks.c @ b_inv_v
    complement_energy = data.frequencies * np.einsum("ik,ik->k", v_complement, b_inv_v)
    frame = spectrum.f2.T @ spectrum.a_inv_sqrt
    x = frame @ nu
    y = frame @ v_region
    weights = data.frequencies[None, :] * (
        spectrum.mu[:, None] ** 2 * x**2 + y**2
    )
    return v_region, v_complement, nu, complement_energy, weights.T


def excitation_profile(
    data: SpectralData,
    blocks: BipartitionBlocks,
    spectrum: SymplecticSpectrum,
    mode: int,
) -> ExcitationProfile:
    """Build the excitation profile for 1-based mode index ``mode``.

    Validates the defining identities on construction: weights are
    nonnegative with sum <= 2, and the frequency-weighted energy split
    gamma_k (nu^T schur^{-1} nu + (v)_c^T b^{-1} (v)_c) equals 1.
    """
    if not 1 <= mode <= data.size:
        raise IndexError(f"mode must lie in 1..{data.size}, got {mode}")
    k = mode - 1
    v_region, v_complement, nu, complement_energy, weights = _profile_arrays(
        data, blocks, spectrum
    )
    q = weights[k]
    if q.sum() > 2.0 + 1e-9:
        raise ArithmeticError(f"weight sum {q.sum()} exceeds 2")
    nu_k = nu[:, k]
    split = data.frequencies[k] * float(nu_k @ blocks.solve_schur(nu_k)) + complement_energy[k]
    if abs(split - 1.0) > 1e-8:
        raise ArithmeticError(f"energy-split identity violated by {split - 1.0:.3e}")
    return ExcitationProfile(
        mode=mode,
        frequency=float(data.frequencies[k]),
        v_region=v_region[:, k].copy(),
        v_complement=v_complement[:, k].copy(),
        nu=nu_k.copy(),
        complement_energy=float(complement_energy[k]),
        weights=q.copy(),
    )


def excitation_weights(
    data: SpectralData, blocks: BipartitionBlocks, spectrum: SymplecticSpectrum
) -> np.ndarray:
    """Weights Q_{k,j} for every excitation at once, shape (modes, region size).

    Row sums are <= 2 and every column sums to exactly 2.
    """
    return _profile_arrays(data, blocks, spectrum)[4]


def excitation_profiles(
    data: SpectralData, blocks: BipartitionBlocks, spectrum: SymplecticSpectrum
) -> list[ExcitationProfile]:
    """All excitation profiles from one pass of the shared linear algebra."""
    v_region, v_complement, nu, complement_energy, weights = _profile_arrays(
        data, blocks, spectrum
    )
    return [
        ExcitationProfile(
            mode=k + 1,
            frequency=float(data.frequencies[k]),
            v_region=v_region[:, k].copy(),
            v_complement=v_complement[:, k].copy(),
            nu=nu[:, k].copy(),
            complement_energy=float(complement_energy[k]),
            weights=weights[k].copy(),
        )
        for k in range(data.size)
    ]


def excited_diagonal_element(
    profile: ExcitationProfile, spectrum: SymplecticSpectrum, occupations
) -> float:
    """Diagonal matrix element of the reduced single-excitation state.

    ``occupations`` is the vector of mode occupation numbers in the
    symplectic mode basis. Modes at mu = 1 are handled by the analytic
    limit: occupied decoupled modes kill every term except their own
    weight/2 contribution at occupation 1.
    """
    n = np.asarray(occupations, dtype=int)
    if n.shape != (spectrum.size,) or np.any(n < 0):
        raise ValueError("occupations must be a nonnegative vector, one entry per mode")
    mu = spectrum.mu
    q = profile.weights
    at_one = mu < MU_ONE_THRESHOLD
    singular = at_one & (n > 0)
    ratio = np.where(at_one, 0.0, (mu - 1.0) / (mu + 1.0))
    base_factors = (2.0 / (1.0 + mu)) * ratio**n
    if not np.any(singular):
        pole_terms = np.zeros(spectrum.size)
        regular = ~at_one
        pole_terms[regular] = 2.0 * mu[regular] / (mu[regular] ** 2 - 1.0)
        bracket = 1.0 - np.sum(mu / (mu + 1.0) * q) + np.sum(pole_terms * q * n)
        value = float(np.prod(base_factors) * bracket)
    elif np.count_nonzero(singular) == 1 and n[singular][0] == 1:
        # The (mu-1)^{n_j} zero cancels the 2 mu/(mu^2-1) pole; in the limit
        # only this mode's term survives with value q_j/2.
        j = int(np.nonzero(singular)[0][0])
        others = np.ones(spectrum.size, dtype=bool)
        others[j] = False
        value = float(np.prod(base_factors[others]) * q[j] / 2.0)
    else:
        # Two or more occupied decoupled modes, or occupation >= 2 there:
        # every term carries an uncancelled zero.
        value = 0.0
    if value < NEGATIVE_FLOOR:
        raise ArithmeticError(f"diagonal element {value} is negative beyond rounding noise")
    return max(value, 0.0)


def occupation_cutoffs(spectrum: SymplecticSpectrum, tail: float = 1e-12) -> np.ndarray:
    """Per-mode occupation cutoffs with geometric tail below ``tail``."""
    ratio = (spectrum.mu - 1.0) / (spectrum.mu + 1.0)
    cutoffs = np.ones(spectrum.size, dtype=int)
    positive = ratio > 0
    cutoffs[positive] = np.ceil(np.log(tail) / np.log(ratio[positive])).astype(int)
    return np.maximum(cutoffs, 1)


def excited_diagonal_trace(
    profile: ExcitationProfile, spectrum: SymplecticSpectrum, cutoffs=None
) -> float:
    """Sum of diagonal elements over the truncated occupation box.

    Factorizes the box sum over modes exactly (the summand is a ground-state
    product times an affine function of the occupations), so the cost is
    quadratic in the region size rather than exponential. Converges to 1 as
    the cutoffs grow.
    """
    mu = spectrum.mu
    q = profile.weights
    if cutoffs is None:
        cutoffs = occupation_cutoffs(spectrum)
    cutoffs = np.asarray(cutoffs, dtype=int)
    at_one = mu < MU_ONE_THRESHOLD
    ratio = np.where(at_one, 0.0, (mu - 1.0) / (mu + 1.0))
    # Per-mode truncated moments of the ground factor (2/(1+mu)) ratio^n.
    s0 = np.empty(spectrum.size)
    s1_weighted = np.empty(spectrum.size)  # sum of (2 mu/(mu^2-1)) n ratio^n terms
    for j in range(spectrum.size):
        n = np.arange(cutoffs[j] + 1)
        p = (2.0 / (1.0 + mu[j])) * ratio[j] ** n
        s0[j] = p.sum()
        if at_one[j]:
            # limit of (2 mu/(mu^2-1)) * sum n p(n): only n = 1 survives.
            s1_weighted[j] = 0.5 if cutoffs[j] >= 1 else 0.0
        else:
            s1_weighted[j] = 2.0 * mu[j] / (mu[j] ** 2 - 1.0) * (n * p).sum()
    prod_all = np.prod(s0)
    total = prod_all * (1.0 - np.sum(mu / (mu + 1.0) * q))
    for j in range(spectrum.size):
        total += q[j] * s1_weighted[j] * prod_all / s0[j]
    return float(total)


def excited_half_renyi_bounds(
    profile: ExcitationProfile, spectrum: SymplecticSpectrum
) -> tuple[float, float]:
    """(computed, theorem) upper bounds on the 1/2-Renyi entropy of the excitation.

    The computed bound sums the square roots of the diagonal elements in
    closed form; the theorem bound is 2 N(ground) + 4 log(region size) and
    is reported as nan for single-site regions, where its derivation needs
    region size > 1.
    """
    f_half = half_renyi_factor(spectrum.mu)
    log_product = float(np.sum(np.log(f_half)))
    computed = 2.0 * (math.log1p(float(np.sqrt(profile.weights) @ f_half)) + log_product)
    if spectrum.size > 1:
        theorem = 2.0 * log_negativity(spectrum) + 4.0 * math.log(spectrum.size)
    else:
        theorem = math.nan
    return computed, theorem


def single_excitation_ensemble_bound(
    spectrum, lattice_size: int, region_size: int
) -> float:
    """Bound log 3 + 2 E_{1/2}(ground) for the uniform one-excitation ensemble.

    Only valid when region_size^2 <= lattice_size; violating that hypothesis
    raises rather than returning a number the derivation does not cover.
    """
    if region_size**2 > lattice_size:
        raise ValueError(
            f"hypothesis violated: region size squared {region_size**2} exceeds "
            f"lattice size {lattice_size}"
        )
    return math.log(3.0) + 2.0 * ground_state_renyi(spectrum, 0.5)


@dataclass
class EntropyReport:
    """Serializable bundle of entropies and bounds for one realization."""

    eps: list[float]
    ground_renyi: list[float]
    von_neumann: float
    log_negativity: float
    excited_modes: list[int] = field(default_factory=list)
    excited_computed_bounds: list[float] = field(default_factory=list)
    excited_theorem_bounds: list[float] = field(default_factory=list)
    ensemble_bound: float | None = None
    mu: list[float] = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "eps": self.eps,
            "ground_renyi": self.ground_renyi,
            "von_neumann": self.von_neumann,
            "log_negativity": self.log_negativity,
            "excited_modes": self.excited_modes,
            "excited_computed_bounds": self.excited_computed_bounds,
            "excited_theorem_bounds": self.excited_theorem_bounds,
            "ensemble_bound": self.ensemble_bound,
            "mu": self.mu,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_csv_rows(self) -> list[str]:
        """One comma-separated row per requested eps value."""
        rows = []
        for e, value in zip(self.eps, self.ground_renyi):
            rows.append(
                f"{e:.15g},{value:.15g},{self.von_neumann:.15g},{self.log_negativity:.15g}"
            )
        return rows


def entropy_report(
    spectrum: SymplecticSpectrum,
    eps_values,
    profiles: list[ExcitationProfile] = (),
    lattice_size: int | None = None,
) -> EntropyReport:
    """Assemble an EntropyReport; Renyi values are non-increasing in eps."""
    eps_values = [float(e) for e in eps_values]
    report = EntropyReport(
        eps=eps_values,
        ground_renyi=[ground_state_renyi(spectrum, e) for e in eps_values],
        von_neumann=ground_state_renyi(spectrum, 1.0),
        log_negativity=log_negativity(spectrum),
        mu=[float(m) for m in spectrum.mu],
    )
    for profile in profiles:
        computed, theorem = excited_half_renyi_bounds(profile, spectrum)
        report.excited_modes.append(profile.mode)
        report.excited_computed_bounds.append(computed)
        report.excited_theorem_bounds.append(theorem)
    if lattice_size is not None and spectrum.size**2 <= lattice_size:
        report.ensemble_bound = single_excitation_ensemble_bound(
            spectrum, lattice_size, spectrum.size
        )
    return report
