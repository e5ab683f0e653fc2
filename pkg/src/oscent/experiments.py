"""Disorder Monte Carlo: scans over realizations, aggregation, scaling fits.

A scan draws independent spring realizations, computes entropies and bounds
for each, and aggregates with deterministic (Welford, index-ordered)
accumulation, so the output is byte-identical no matter how many worker
threads ran the realizations.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .correlators import CorrelatorTable, DecayFit, _fit_binned, area_law_constant, ground_state_correlator_bound
from .entanglement import (
    excitation_weights,
    ground_state_renyi,
    half_renyi_factor,
    log_negativity,
    single_excitation_ensemble_bound,
)
from .hamiltonian import (
    CouplingMatrix,
    DisorderModel,
    anderson_norm_bound,
    assemble_anderson,
    sample_springs,
    validate_coupling,
)
from .lattice import box_region, build_box, inner_boundary, make_region
from .spectral import eigensystem, partition_blocks, spd_inv_sqrt, spd_sqrt, symplectic_spectrum


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one scan byte for byte."""

    dimension: int
    lengths: tuple[int, ...]
    region_corner: tuple[int, ...] | None = None
    region_lengths: tuple[int, ...] | None = None
    region_sites: tuple[tuple[int, ...], ...] | None = None
    k_max: float = 1.0
    realizations: int = 1
    eps_values: tuple[float, ...] = (0.5, 1.0)
    excitations: str | tuple[int, int] = "all"
    p: float = 1.0
    s: float = 0.5
    master_seed: int = 0
    threads: int | None = None
    fit_decay: bool = False
    coupling_kind: str = "nearest"  # "nearest" or "none" (springs only, decoupled)

    def __post_init__(self):
        if self.coupling_kind not in ("nearest", "none"):
            raise ValueError(f"unknown coupling kind {self.coupling_kind!r}")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if not all(0.0 < e <= 1.0 for e in self.eps_values):
            raise ValueError(f"every eps must lie in (0, 1], got {self.eps_values}")
        if self.region_sites is None and (self.region_corner is None or self.region_lengths is None):
            raise ValueError("config needs region_sites or region_corner + region_lengths")
        if isinstance(self.excitations, str):
            if self.excitations not in ("all", "none"):
                raise ValueError(f"unknown excitation policy {self.excitations!r}")
        else:
            lo, hi = self.excitations
            if not 1 <= lo <= hi:
                raise ValueError(f"bad excitation range {self.excitations}")

    @staticmethod
    def from_dict(raw: dict) -> "ExperimentConfig":
        region = raw.get("region", {})
        excitations = raw.get("excitations", "all")
        if isinstance(excitations, dict):
            lo, hi = excitations["k_range"]
            excitations = (int(lo), int(hi))
        return ExperimentConfig(
            dimension=int(raw["dimension"]),
            lengths=tuple(int(n) for n in raw["lengths"]),
            region_corner=tuple(region["corner"]) if "corner" in region else None,
            region_lengths=tuple(region["lengths"]) if "lengths" in region else None,
            region_sites=tuple(tuple(s) for s in region["sites"]) if "sites" in region else None,
            k_max=float(raw.get("disorder", {}).get("k_max", raw.get("k_max", 1.0))),
            realizations=int(raw.get("realizations", 1)),
            eps_values=tuple(float(e) for e in raw.get("eps", [0.5, 1.0])),
            excitations=excitations,
            p=float(raw.get("p", 1.0)),
            s=float(raw.get("s", 0.5)),
            master_seed=int(raw.get("seed", raw.get("master_seed", 0))),
            threads=int(raw["threads"]) if raw.get("threads") is not None else None,
            fit_decay=bool(raw.get("fit_decay", False)),
            coupling_kind=str(raw.get("coupling", "nearest")),
        )

    def to_dict(self) -> dict:
        region: dict = {}
        if self.region_sites is not None:
            region["sites"] = [list(s) for s in self.region_sites]
        else:
            region["corner"] = list(self.region_corner)
            region["lengths"] = list(self.region_lengths)
        excitations = (
            self.excitations
            if isinstance(self.excitations, str)
            else {"k_range": list(self.excitations)}
        )
        return {
            "dimension": self.dimension,
            "lengths": list(self.lengths),
            "region": region,
            "disorder": {"kind": "uniform", "k_max": self.k_max},
            "realizations": self.realizations,
            "eps": list(self.eps_values),
            "excitations": excitations,
            "p": self.p,
            "s": self.s,
            "seed": self.master_seed,
            "threads": self.threads,
            "fit_decay": self.fit_decay,
            "coupling": self.coupling_kind,
        }


@dataclass
class RealizationRecord:
    """Per-realization entropies and bounds; NaNs mark skipped quantities."""

    index: int
    pd_ok: bool
    ground_renyi: dict[float, float] = field(default_factory=dict)
    log_negativity: float = math.nan
    excited_mode: int = -1
    excited_computed_bound: float = math.nan
    excited_theorem_bound: float = math.nan
    gs_correlator_bound: float = math.nan
    ensemble_bound: float = math.nan
    mu_max: float = math.nan


@dataclass
class ScanResult:
    """Records plus deterministic aggregates for one scan."""

    config: ExperimentConfig
    lattice_size: int
    region_size: int
    boundary_size: int
    records: list[RealizationRecord]
    aggregates: dict
    failed_pd: int
    decay: DecayFit | None = None
    empirical_area_bound: dict | None = None

    @property
    def excited_theorem_mean(self) -> float:
        stats = self.aggregates.get("excited_theorem_bound")
        return stats["mean"] if stats else math.nan


class _Welford:
    """Streaming mean and standard error, bit-stable in insertion order."""

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self._m2 = 0.0

    def add(self, value: float):
        self.count += 1
        delta = value - self.mean
        self.mean += delta / self.count
        self._m2 += delta * (value - self.mean)

    def stats(self) -> dict:
        if self.count == 0:
            return None
        if self.count == 1:
            return {"mean": self.mean, "se": 0.0, "n": 1}
        variance = self._m2 / (self.count - 1)
        return {"mean": self.mean, "se": math.sqrt(variance / self.count), "n": self.count}


def _selected_modes(policy, total: int) -> list[int]:
    if policy == "all":
        return list(range(1, total + 1))
    if policy == "none":
        return []
    lo, hi = policy
    if hi > total:
        raise ValueError(f"excitation range {policy} exceeds mode count {total}")
    return list(range(lo, hi + 1))


def run_scan(config: ExperimentConfig) -> ScanResult:
    """Run one disorder scan; deterministic given the config (incl. seed).

    Realizations failing the positive-definiteness check are recorded with
    pd_ok = False and excluded from every aggregate; the first realization
    must pass (anything else means the config itself is bad).
    """
    lattice = build_box(config.dimension, config.lengths)
    if config.region_sites is not None:
        region = make_region(lattice, config.region_sites)
    else:
        region = box_region(lattice, config.region_corner, config.region_lengths)
    boundary = len(inner_boundary(region))
    model = DisorderModel(k_max=config.k_max, seed=config.master_seed)
    bound = anderson_norm_bound(config.dimension, config.k_max)
    modes = _selected_modes(config.excitations, lattice.size)
    collect_decay = config.fit_decay

    def worker(index: int):
        springs = sample_springs(model, lattice, index)
        if config.coupling_kind == "nearest":
            h = assemble_anderson(lattice, springs)
        else:
            h = CouplingMatrix(matrix=np.diag(springs), lattice=lattice)
        report = validate_coupling(h, bound)
        if not report.is_positive_definite:
            return RealizationRecord(index=index, pd_ok=False), None
        data = eigensystem(h)
        hsqrt = spd_sqrt(data)
        blocks = partition_blocks(hsqrt, region)
        spectrum = symplectic_spectrum(blocks)
        record = RealizationRecord(index=index, pd_ok=True)
        record.ground_renyi = {
            eps: ground_state_renyi(spectrum, eps) for eps in config.eps_values
        }
        record.log_negativity = log_negativity(spectrum)
        record.mu_max = float(spectrum.mu[-1])
        inv_sqrt = np.abs(spd_inv_sqrt(data))
        table = CorrelatorTable(
            values=0.5 * (inv_sqrt + inv_sqrt.T),
            lattice=lattice,
            hsqrt_norm=float(data.frequencies[-1]),
        )
        record.gs_correlator_bound = ground_state_correlator_bound(
            table, region, config.p, bound
        )
        if modes:
            weights = excitation_weights(data, blocks, spectrum)
            f_half = half_renyi_factor(spectrum.mu)
            log_product = float(np.sum(np.log(f_half)))
            selected = np.array(modes, dtype=int) - 1
            computed = 2.0 * (
                np.log1p(np.sqrt(weights[selected]) @ f_half) + log_product
            )
            worst = int(np.argmax(computed))
            record.excited_mode = modes[worst]
            record.excited_computed_bound = float(computed[worst])
            if region.size > 1:
                record.excited_theorem_bound = (
                    2.0 * record.log_negativity + 4.0 * math.log(region.size)
                )
        if region.size**2 <= lattice.size:
            record.ensemble_bound = single_excitation_ensemble_bound(
                spectrum, lattice.size, region.size
            )
        moment = table.values**config.s if collect_decay else None
        return record, moment

    threads = config.threads or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=threads) as pool:
        outcomes = list(pool.map(worker, range(config.realizations)))

    records = [record for record, _ in outcomes]
    if not records[0].pd_ok:
        raise ValueError("first realization failed the positive-definiteness check")
    failed = sum(1 for r in records if not r.pd_ok)
    if failed == len(records):
        raise ValueError("every realization failed the positive-definiteness check")

    accumulators: dict[str, _Welford] = {}

    def push(name: str, value: float):
        if not math.isnan(value):
            accumulators.setdefault(name, _Welford()).add(value)

    moment_sum = None
    moment_count = 0
    for record, moment in outcomes:
        if not record.pd_ok:
            continue
        for eps, value in record.ground_renyi.items():
            push(f"ground_renyi[{eps:g}]", value)
        push("log_negativity", record.log_negativity)
        push("excited_computed_bound", record.excited_computed_bound)
        push("excited_theorem_bound", record.excited_theorem_bound)
        push("gs_correlator_bound", record.gs_correlator_bound)
        push("ensemble_bound", record.ensemble_bound)
        push("mu_max", record.mu_max)
        if moment is not None:
            moment_sum = moment if moment_sum is None else moment_sum + moment
            moment_count += 1

    aggregates = {name: acc.stats() for name, acc in accumulators.items()}
    decay = None
    empirical = None
    if collect_decay and moment_count:
        decay = _fit_binned(moment_sum / moment_count, lattice, config.s)
        if decay.eta > 0:
            constant = area_law_constant(
                decay.prefactor, decay.eta, config.s, bound, config.dimension
            )
            empirical = {
                "prefactor": decay.prefactor,
                "eta": decay.eta,
                "s": config.s,
                "residual": decay.residual,
                "constant": constant,
                "constant_times_boundary": constant * boundary,
                "note": "empirical",
            }

    return ScanResult(
        config=config,
        lattice_size=lattice.size,
        region_size=region.size,
        boundary_size=boundary,
        records=records,
        aggregates=aggregates,
        failed_pd=failed,
        decay=decay,
        empirical_area_bound=empirical,
    )


def area_law_fit(results):
    """Least-squares slopes of the mean excited bound vs boundary and log size.

    Needs at least three distinct region sizes. Any object with
    ``boundary_size``, ``region_size`` and ``excited_theorem_mean`` works.
    """
    results = list(results)
    sizes = {r.region_size for r in results}
    if len(sizes) < 3:
        raise ValueError(f"need >= 3 region sizes, have {len(sizes)}")
    y = np.array([r.excited_theorem_mean for r in results])
    vs_boundary = _ols(np.array([float(r.boundary_size) for r in results]), y)
    vs_log = _ols(np.array([math.log(r.region_size) for r in results]), y)
    return AreaLawFit(
        slope_vs_boundary=vs_boundary[0],
        slope_vs_boundary_se=vs_boundary[1],
        residual_vs_boundary=vs_boundary[2],
        slope_vs_log_size=vs_log[0],
        slope_vs_log_size_se=vs_log[1],
        residual_vs_log_size=vs_log[2],
    )


@dataclass(frozen=True)
class AreaLawFit:
    """Slopes, slope standard errors and RMS residuals of the scaling fits."""

    slope_vs_boundary: float
    slope_vs_boundary_se: float
    residual_vs_boundary: float
    slope_vs_log_size: float
    slope_vs_log_size_se: float
    residual_vs_log_size: float


def _ols(x: np.ndarray, y: np.ndarray):
    if np.ptp(x) == 0.0:
        # constant regressor (e.g. the boundary size of 1d intervals):
        # the slope is undefined, not zero
        spread = float(np.sqrt(np.mean((y - y.mean()) ** 2)))
        return math.nan, math.nan, spread
    design = np.stack([np.ones_like(x), x], axis=1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ coef
    ssr = float(np.sum((y - fitted) ** 2))
    dof = len(x) - 2
    if dof > 0:
        gram_inv = np.linalg.inv(design.T @ design)
        slope_se = math.sqrt(max(ssr / dof, 0.0) * gram_inv[1, 1])
    else:
        slope_se = 0.0
    return float(coef[1]), slope_se, math.sqrt(ssr / len(x))


CSV_HEADER = (
    "realization_index,lattice_size,region_size,boundary_size,eps,"
    "E_eps_ground,log_negativity,excited_k,excited_computed_bound,"
    "excited_theorem_bound,gs_correlator_bound_p,pd_ok"
)


def _fmt(value: float) -> str:
    return "" if math.isnan(value) else f"{value:.15g}"


def write_records_csv(results, path):
    """One CSV over all scans: one row per (realization, eps), sorted."""
    if isinstance(results, ScanResult):
        results = [results]
    lines = [CSV_HEADER]
    for result in results:
        for record in sorted(result.records, key=lambda r: r.index):
            eps_list = result.config.eps_values if record.pd_ok else result.config.eps_values[:1]
            for eps in eps_list:
                value = record.ground_renyi.get(eps, math.nan)
                excited_k = str(record.excited_mode) if record.excited_mode > 0 else ""
                lines.append(
                    ",".join(
                        [
                            str(record.index),
                            str(result.lattice_size),
                            str(result.region_size),
                            str(result.boundary_size),
                            f"{eps:.15g}",
                            _fmt(value),
                            _fmt(record.log_negativity),
                            excited_k,
                            _fmt(record.excited_computed_bound),
                            _fmt(record.excited_theorem_bound),
                            _fmt(record.gs_correlator_bound),
                            "1" if record.pd_ok else "0",
                        ]
                    )
                )
    text = "\n".join(lines) + "\n"
    with open(path, "w", newline="\n") as handle:
        handle.write(text)
    return text


def write_aggregates_json(results, path):
    """Aggregate means and standard errors, one entry per scan."""
    if isinstance(results, ScanResult):
        results = [results]
    payload = []
    for result in results:
        payload.append(
            {
                "lattice_size": result.lattice_size,
                "region_size": result.region_size,
                "boundary_size": result.boundary_size,
                "realizations": result.config.realizations,
                "failed_pd": result.failed_pd,
                "aggregates": result.aggregates,
                "empirical_area_bound": result.empirical_area_bound,
            }
        )
    text = json.dumps(payload, indent=2, sort_keys=True)
    with open(path, "w", newline="\n") as handle:
        handle.write(text + "\n")
    return text


def write_scaling_data(results, path):
    """Gnuplot-style whitespace table of mean quantities per region size."""
    if isinstance(results, ScanResult):
        results = [results]
    lines = [
        "# region_size boundary_size log_region_size mean_half_renyi "
        "mean_excited_computed_bound mean_excited_theorem_bound"
    ]
    for result in sorted(results, key=lambda r: r.region_size):
        half = result.aggregates.get("ground_renyi[0.5]") or result.aggregates.get(
            "log_negativity"
        )
        computed = result.aggregates.get("excited_computed_bound")
        theorem = result.aggregates.get("excited_theorem_bound")
        lines.append(
            " ".join(
                [
                    str(result.region_size),
                    str(result.boundary_size),
                    f"{math.log(result.region_size):.15g}",
                    f"{half['mean']:.15g}" if half else "nan",
                    f"{computed['mean']:.15g}" if computed else "nan",
                    f"{theorem['mean']:.15g}" if theorem else "nan",
                ]
            )
        )
    text = "\n".join(lines) + "\n"
    with open(path, "w", newline="\n") as handle:
        handle.write(text)
    return text
