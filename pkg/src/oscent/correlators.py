"""Singular eigenfunction correlators, decay fits and the area-law constant.

The correlator matrix holds |<delta_j, h^{-1/2} delta_k>| for all site
pairs. Its fractional moments decay exponentially in the localized regime;
fitting that decay over a disorder ensemble produces the (C, eta) pair that
feeds the averaged area-law constant.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .lattice import Lattice, Region, l1_distance
from .spectral import eigensystem, spd_inv_sqrt

# Distance bins whose empirical mean falls below this are dropped from the
# decay fit; deep-localization tails underflow long before they matter.
UNDERFLOW_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class CorrelatorTable:
    """Absolute inverse-square-root matrix elements for one realization."""

    values: np.ndarray
    lattice: Lattice
    hsqrt_norm: float


@dataclass(frozen=True)
class DecayFit:
    """Exponential-decay fit of averaged correlator moments.

    ``eta`` is minus the fitted slope of log(mean moment) against distance,
    ``prefactor`` the exponentiated intercept. The fit window and residual
    are reported because a finite-volume fit conflates boundary effects with
    the true asymptotic exponent.
    """

    eta: float
    prefactor: float
    s: float
    residual: float
    distances: tuple[int, ...]


def correlator_table(h) -> CorrelatorTable:
    """Correlator matrix of one coupling matrix."""
    data = eigensystem(h)
    values = np.abs(spd_inv_sqrt(data))
    values = 0.5 * (values + values.T)
    return CorrelatorTable(
        values=values,
        lattice=h.lattice,
        hsqrt_norm=float(data.frequencies[-1]),
    )


def ground_state_correlator_bound(table: CorrelatorTable, region: Region, p: float, bound: float) -> float:
    """Cross-region correlator bound on the ground-state Renyi entropies.

    Computes bound^{p/2}/p times the sum of |<delta_k, h^{-1/2} delta_j>|^{p/2}
    over region sites k and complement sites j. Valid for every eps in
    [1/2, 1], any p in (0, 1], and any bound dominating ||h^{1/2}||.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if bound < table.hsqrt_norm * (1.0 - 1e-12):
        raise ValueError(
            f"bound {bound} is below the actual square-root norm {table.hsqrt_norm}"
        )
    cross = table.values[np.ix_(region.indices, region.complement_indices)]
    return float(bound ** (p / 2.0) / p * np.sum(cross ** (p / 2.0)))


def distance_bins(lattice: Lattice) -> dict[int, np.ndarray]:
    """Index pairs (as flat masks) grouped by l1 distance >= 1."""
    n = lattice.size
    dist = np.zeros((n, n), dtype=int)
    for i in range(n):
        for j in range(i + 1, n):
            dist[i, j] = dist[j, i] = l1_distance(lattice.sites[i], lattice.sites[j])
    return {
        int(r): np.nonzero(dist == r)
        for r in np.unique(dist)
        if r >= 1
    }


def mean_moment_by_distance(mean_moment: np.ndarray, lattice: Lattice) -> dict[int, float]:
    """Average an elementwise moment matrix over pairs at each l1 distance."""
    return {
        r: float(mean_moment[idx].mean()) for r, idx in distance_bins(lattice).items()
    }


def decay_fit(tables: list[CorrelatorTable], s: float) -> DecayFit:
    """Least-squares exponential-decay fit of E[|correlator|^s] vs distance.

    All tables must come from the same lattice. The fit runs over distances
    r >= 1 whose averaged moment stays above the underflow floor; fewer than
    three surviving distances is an error rather than a degenerate fit.
    """
    if not tables:
        raise ValueError("need at least one correlator table")
    if not 0.0 < s <= 1.0:
        raise ValueError(f"s must lie in (0, 1], got {s}")
    lattice = tables[0].lattice
    if any(t.lattice is not lattice and t.lattice.sites != lattice.sites for t in tables):
        raise ValueError("all tables must share one lattice")
    mean_moment = np.zeros_like(tables[0].values)
    for table in tables:
        mean_moment += table.values**s
    mean_moment /= len(tables)
    return _fit_binned(mean_moment, lattice, s)


def _fit_binned(mean_moment: np.ndarray, lattice: Lattice, s: float) -> DecayFit:
    by_distance = mean_moment_by_distance(mean_moment, lattice)
    usable = {r: v for r, v in by_distance.items() if v > UNDERFLOW_FLOOR}
    if not usable:
        raise ValueError("no decay data: all averaged moments vanish")
    dropped = sorted(set(by_distance) - set(usable))
    if dropped:
        warnings.warn(f"dropping underflowed distance bins {dropped}", stacklevel=2)
    if len(usable) < 3:
        raise ValueError(f"need >= 3 distinct distances for a fit, have {len(usable)}")
    r = np.array(sorted(usable))
    y = np.log(np.array([usable[int(v)] for v in r]))
    design = np.stack([np.ones_like(r, dtype=float), r.astype(float)], axis=1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ coef
    residual = float(np.sqrt(np.mean((y - fitted) ** 2)))
    return DecayFit(
        eta=float(-coef[1]),
        prefactor=float(np.exp(coef[0])),
        s=s,
        residual=residual,
        distances=tuple(int(v) for v in r),
    )


def correlator_csv(values: np.ndarray, lattice: Lattice) -> str:
    """Render a correlator (or moment) matrix as CSV rows j,k,distance,value."""
    lines = ["j,k,distance,value"]
    for i in range(lattice.size):
        for j in range(lattice.size):
            distance = l1_distance(lattice.sites[i], lattice.sites[j])
            lines.append(f"{i},{j},{distance},{values[i, j]:.15g}")
    return "\n".join(lines) + "\n"


def lattice_exponential_sum(eta: float, dimension: int) -> float:
    """Closed form of sum over Z^d of exp(-eta |k|_1 / 2).

    The l1 norm factorizes over axes, so the sum is the d-th power of the
    one-dimensional two-sided geometric sum.
    """
    if not eta > 0:
        raise ValueError("eta must be positive for a convergent sum")
    q = math.exp(-0.5 * eta)
    return ((1.0 + q) / (1.0 - q)) ** dimension


def area_law_constant(prefactor: float, eta: float, s: float, bound: float, dimension: int) -> float:
    """Volume-independent constant multiplying the boundary size in the averaged bound.

    Equals bound^{s/2} * prefactor / s times the squared lattice exponential
    sum; diverges (raises) when eta <= 0.
    """
    if not 0.0 < s <= 1.0:
        raise ValueError(f"s must lie in (0, 1], got {s}")
    total = lattice_exponential_sum(eta, dimension)
    return bound ** (s / 2.0) * prefactor / s * total**2
