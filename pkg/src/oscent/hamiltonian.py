"""Effective single-particle coupling matrices on a lattice.

The workhorse is the random-spring model: nearest-neighbor quadratic
couplings plus i.i.d. on-site spring constants drawn uniformly from
[0, k_max]. Spring draws use a counter-based generator keyed by
(seed, realization_index), so realization r is the same no matter how many
workers sample in parallel or in what order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import Lattice, l1_distance

# Smallest eigenvalue must exceed this times ||h|| for the matrix to count
# as positive definite; exact singularity has probability zero for the
# uniform spring distribution, so anything at this floor is numerical.
PD_TOLERANCE = 1e-10

# Relative asymmetry allowed in user-supplied matrices before they are
# rejected instead of silently symmetrized.
SYM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DisorderModel:
    """I.i.d. uniform spring constants on [0, k_max], keyed by a 64-bit seed."""

    k_max: float
    seed: int

    def __post_init__(self):
        if not self.k_max > 0:
            raise ValueError(f"k_max must be positive, got {self.k_max}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    """Dense real symmetric positive-definite coupling matrix on a lattice."""

    matrix: np.ndarray
    lattice: Lattice

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class AssumptionReport:
    """Positivity and norm-bound diagnostics for a coupling matrix."""

    is_positive_definite: bool
    smallest_eigenvalue: float
    hsqrt_norm: float
    bound: float
    bound_satisfied: bool


def sample_springs(model: DisorderModel, lattice: Lattice, realization_index: int) -> np.ndarray:
    """Draw one realization of spring constants, one entry per site.

    Entry i is a deterministic function of (seed, realization_index, i):
    the stream is Philox keyed by (seed, realization_index), so repeated and
    parallel sampling agree bit for bit.
    """
    if realization_index < 0:
        raise ValueError("realization_index must be nonnegative")
    key = np.array([model.seed, realization_index], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    return model.k_max * rng.random(lattice.size)


def assemble_anderson(lattice: Lattice, springs) -> CouplingMatrix:
    """Nearest-neighbor coupling matrix with on-site springs.

    Diagonal entry at site j is (number of neighbors of j inside the box)
    plus the spring constant k_j; off-diagonal entries are -1 exactly for
    l1-distance-1 pairs and 0 otherwise.
    """
    springs = np.asarray(springs, dtype=float)
    if springs.shape != (lattice.size,):
        raise ValueError(f"expected {lattice.size} springs, got shape {springs.shape}")
    if np.any(springs < 0):
        raise ValueError("spring constants must be nonnegative")
    n = lattice.size
    h = np.zeros((n, n))
    for i, a in enumerate(lattice.sites):
        for j in range(i + 1, n):
            if l1_distance(a, lattice.sites[j]) == 1:
                h[i, j] = h[j, i] = -1.0
    degrees = -h.sum(axis=1)
    h[np.diag_indices(n)] = degrees + springs
    return CouplingMatrix(matrix=h, lattice=lattice)


def assemble_custom(lattice: Lattice, entries, sym_tolerance: float = SYM_TOLERANCE) -> CouplingMatrix:
    """Wrap a user-supplied dense symmetric matrix.

    Asymmetry beyond ``sym_tolerance`` (relative to the matrix norm) is an
    error; anything smaller is averaged away so downstream eigensolvers see
    an exactly symmetric matrix.
    """
    m = np.asarray(entries, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] != lattice.size:
        raise ValueError(f"matrix size {m.shape[0]} != lattice size {lattice.size}")
    scale = max(np.abs(m).max(), 1.0)
    asym = np.abs(m - m.T).max()
    if asym > sym_tolerance * scale:
        raise ValueError(f"matrix asymmetry {asym:.3e} exceeds tolerance {sym_tolerance * scale:.3e}")
    return CouplingMatrix(matrix=0.5 * (m + m.T), lattice=lattice)


def load_matrix_csv(path, lattice: Lattice) -> CouplingMatrix:
    """Load a dense coupling matrix from a comma-separated row-major text file."""
    m = np.loadtxt(path, delimiter=",", ndmin=2)
    return assemble_custom(lattice, m)


def validate_coupling(h: CouplingMatrix, bound: float) -> AssumptionReport:
    """Check positive definiteness and the norm bound ||h^{1/2}|| <= bound.

    Never raises; failures are carried in the report so disorder loops can
    count and skip bad realizations.
    """
    eigenvalues = np.linalg.eigvalsh(0.5 * (h.matrix + h.matrix.T))
    smallest = float(eigenvalues[0])
    largest = float(eigenvalues[-1])
    hsqrt_norm = float(np.sqrt(max(largest, 0.0)))
    return AssumptionReport(
        is_positive_definite=smallest > PD_TOLERANCE * max(abs(largest), abs(smallest)),
        smallest_eigenvalue=smallest,
        hsqrt_norm=hsqrt_norm,
        bound=float(bound),
        bound_satisfied=hsqrt_norm <= float(bound),
    )


def anderson_norm_bound(dimension: int, k_max: float) -> float:
    """Almost-sure bound sqrt(4d + k_max) on ||h^{1/2}|| for the spring model."""
    return float(np.sqrt(4.0 * dimension + k_max))
