"""Eigensystems, SPD square roots, bipartition blocks and symplectic spectra.

Everything here is dense linear algebra: eigendecomposition of the coupling
matrix, functions of it (square root, inverse square root), the block
decomposition of the square root induced by a region, the Schur complement
of the complement block, and the symplectic eigenvalues mu_j >= 1 that carry
all the ground-state entanglement information.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh

from .hamiltonian import CouplingMatrix, PD_TOLERANCE
from .lattice import Region

# mu_j^2 below 1 by more than this is a hard error; anything closer is
# rounding noise on a decoupled direction and gets clipped to exactly 1.
MU_CLIP_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigendecomposition h = V diag(frequencies^2) V^T, frequencies ascending."""

    eigenvalues: np.ndarray  # frequencies squared, ascending
    frequencies: np.ndarray
    vectors: np.ndarray  # orthogonal, one eigenvector per column

    @property
    def size(self) -> int:
        return self.frequencies.shape[0]


@dataclass(frozen=True, eq=False)
class BipartitionBlocks:
    """Blocks of the SPD square root in the region-first ordering.

    ``a`` is the region block, ``b`` the complement block, ``c`` the
    off-diagonal coupling, and ``schur`` = a - c b^{-1} c^T.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    schur: np.ndarray
    region: Region
    _b_factor: tuple = field(repr=False)
    _schur_factor: tuple = field(repr=False)

    def solve_b(self, rhs: np.ndarray) -> np.ndarray:
        return cho_solve(self._b_factor, rhs)

    def solve_schur(self, rhs: np.ndarray) -> np.ndarray:
        return cho_solve(self._schur_factor, rhs)


@dataclass(frozen=True, eq=False)
class SymplecticSpectrum:
    """Symplectic eigenvalues of the reduced ground state and the mode frame.

    ``mu`` is ascending with every entry >= 1; ``sigma`` and ``kappa`` are
    the per-mode kernel parameters sigma_j = (1-mu_j^2)/(1+mu_j^2) in (-1, 0]
    and kappa_j = 2 mu_j/(1+mu_j^2) in (0, 1]. ``f2`` is the orthogonal
    diagonalizer, ``f`` the full change-of-variables matrix, and
    ``a_inv_sqrt`` the inverse square root of the region block (kept because
    excitation profiles need it).
    """

    mu: np.ndarray
    sigma: np.ndarray
    kappa: np.ndarray
    f2: np.ndarray
    f: np.ndarray
    a_inv_sqrt: np.ndarray

    @property
    def size(self) -> int:
        return self.mu.shape[0]


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Block-diagonal covariance matrix diag(schur^{-1}, a) of the reduced state."""

    matrix: np.ndarray

    @property
    def modes(self) -> int:
        return self.matrix.shape[0] // 2


def _as_matrix(h) -> np.ndarray:
    return h.matrix if isinstance(h, CouplingMatrix) else np.asarray(h, dtype=float)


def _fix_eigenvector_signs(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column positive (first on ties)."""
    idx = np.abs(vectors).argmax(axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigensystem(h) -> SpectralData:
    """Eigendecomposition of a coupling matrix with a deterministic sign convention.

    Raises if any eigenvalue fails the positive-definiteness floor.
    """
    m = _as_matrix(h)
    m = 0.5 * (m + m.T)
    eigenvalues, vectors = eigh(m)
    floor = PD_TOLERANCE * max(abs(eigenvalues[0]), abs(eigenvalues[-1]))
    if eigenvalues[0] <= floor:
        raise np.linalg.LinAlgError(
            f"matrix is not positive definite: smallest eigenvalue {eigenvalues[0]:.3e}"
        )
    vectors = _fix_eigenvector_signs(vectors)
    return SpectralData(
        eigenvalues=eigenvalues,
        frequencies=np.sqrt(eigenvalues),
        vectors=vectors,
    )


def spd_sqrt(h) -> np.ndarray:
    """Symmetric square root of an SPD matrix via its eigendecomposition."""
    data = h if isinstance(h, SpectralData) else eigensystem(h)
    root = (data.vectors * data.frequencies) @ data.vectors.T
    return 0.5 * (root + root.T)


def spd_inv_sqrt(h) -> np.ndarray:
    """Symmetric inverse square root of an SPD matrix."""
    data = h if isinstance(h, SpectralData) else eigensystem(h)
    root = (data.vectors / data.frequencies) @ data.vectors.T
    return 0.5 * (root + root.T)


def partition_blocks(hsqrt: np.ndarray, region: Region) -> BipartitionBlocks:
    """Extract the region/complement blocks of the square root and the Schur complement.

    The Schur complement is computed through a Cholesky solve of the
    complement block, never an explicit inverse.
    """
    hsqrt = np.asarray(hsqrt, dtype=float)
    n = region.lattice.size
    if hsqrt.shape != (n, n):
        raise ValueError(f"matrix shape {hsqrt.shape} does not match lattice size {n}")
    if region.complement_size == 0:
        raise ValueError("region equals the whole lattice; the complement block is empty")
    ri, ci = region.indices, region.complement_indices
    a = hsqrt[np.ix_(ri, ri)]
    b = hsqrt[np.ix_(ci, ci)]
    c = hsqrt[np.ix_(ri, ci)]
    try:
        b_factor = cho_factor(b)
    except np.linalg.LinAlgError as err:
        raise np.linalg.LinAlgError(f"complement block is not positive definite: {err}")
    schur = a - c @ cho_solve(b_factor, c.T)
    schur = 0.5 * (schur + schur.T)
    try:
        schur_factor = cho_factor(schur)
    except np.linalg.LinAlgError as err:
        raise np.linalg.LinAlgError(f"Schur complement is not positive definite: {err}")
    return BipartitionBlocks(
        a=a, b=b, c=c, schur=schur, region=region,
        _b_factor=b_factor, _schur_factor=schur_factor,
    )


def symplectic_spectrum(blocks: BipartitionBlocks) -> SymplecticSpectrum:
    """Symplectic eigenvalues mu_j and the mode frame of the reduced ground state.

    mu_j^2 are the eigenvalues of a^{1/2} schur^{-1} a^{1/2}; values dipping
    below 1 by at most MU_CLIP_TOLERANCE are clipped to exactly 1 (decoupled
    directions), anything lower raises.
    """
    a_data = eigensystem(blocks.a)
    a_sqrt = spd_sqrt(a_data)
    a_inv_sqrt = spd_inv_sqrt(a_data)
    core = a_sqrt @ blocks.solve_schur(a_sqrt)
    core = 0.5 * (core + core.T)
    mu_sq, f2 = eigh(core)
    if mu_sq[0] < 1.0 - MU_CLIP_TOLERANCE:
        raise np.linalg.LinAlgError(
            f"symplectic eigenvalue below 1: mu^2 = {mu_sq[0]:.15f}"
        )
    mu_sq = np.maximum(mu_sq, 1.0)
    f2 = _fix_eigenvector_signs(f2)
    mu = np.sqrt(mu_sq)
    sigma = (1.0 - mu_sq) / (1.0 + mu_sq)
    kappa = 2.0 * mu / (1.0 + mu_sq)
    f = a_inv_sqrt @ f2 @ np.diag(np.sqrt(2.0 * mu_sq / (1.0 + mu_sq)))
    return SymplecticSpectrum(
        mu=mu, sigma=sigma, kappa=kappa, f2=f2, f=f, a_inv_sqrt=a_inv_sqrt
    )


def covariance_matrix(blocks: BipartitionBlocks) -> CovarianceMatrix:
    """Covariance matrix of the reduced ground state: diag(schur^{-1}, a)."""
    n0 = blocks.a.shape[0]
    schur_inv = blocks.solve_schur(np.eye(n0))
    schur_inv = 0.5 * (schur_inv + schur_inv.T)
    gamma = np.zeros((2 * n0, 2 * n0))
    gamma[:n0, :n0] = schur_inv
    gamma[n0:, n0:] = blocks.a
    return CovarianceMatrix(matrix=gamma)


def covariance_symplectic_eigenvalues(cov: CovarianceMatrix) -> np.ndarray:
    """Symplectic eigenvalues straight from the covariance matrix, ascending.

    Works on the full 2n x 2n matrix (positive spectrum of i J Gamma through
    the Hermitian i Gamma^{1/2} J Gamma^{1/2}), so it is an independent
    cross-check of the Schur-complement route.
    """
    gamma = cov.matrix
    n0 = cov.modes
    j = np.zeros((2 * n0, 2 * n0))
    j[:n0, n0:] = -np.eye(n0)
    j[n0:, :n0] = np.eye(n0)
    root = spd_sqrt(gamma)
    hermitian = 1j * (root @ j @ root)
    spectrum = np.linalg.eigvalsh(hermitian)
    return np.sort(spectrum[spectrum > 0])
