"""Desk-scale reproduction of the published simulation tables.

:func:`reproduce_table` reruns one experiment, lays its output out like the
published table and compares every cell with the published value.  Monte
Carlo cells get a tolerance ``max(base, 3 * SE)``, where ``SE`` combines the
standard error of our run with that of the published run, so reduced
replication counts widen the tolerance instead of producing spurious
failures.  The tolerance actually used is recorded for every cell.

Replication counts are ``round(scale * full)`` where ``full`` is the
published count.  With ``scale=None`` each table uses its desk default
(:data:`DESK_SCALE`).
"""

from __future__ import annotations

import csv
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import reference as ref
from ._kernels import dominance_counts_bitset
from .dataio import load_biomarkers
from .distributions import (
    CopulaSpec,
    EquicorrelatedSpec,
    sample_archimedean,
    sample_bivariate_family,
    sample_equicorrelated_normal,
    sample_fgm,
    sample_general_normal,
)
from .errors import ConfigurationError, DomainError
from .independence import (
    CONFIDENCE_LEVELS,
    TestPolicy,
    calibrate_percentiles,
    default_sigma,
    estimate_sigma_pi,
    resolve_critical_value,
)
from .kendall_core import auk_from_counts, kendall_tau_pairwise
from .orthant import auk_vector, index_I
from .rng import as_seed_sequence
from .standardize import calibrate_phi, index_I_star, mc_index_for_equicorrelated_normal, phi_builtin

__all__ = [
    "TABLE_IDS",
    "DESK_SCALE",
    "FULL_REPLICATES",
    "CellResult",
    "ReproductionResult",
    "reproduce_table",
]

log = logging.getLogger(__name__)

TABLE_IDS = ("T1", "T2", *ref.INDEX_TABLES, "T6", "T7", "T8", "TS")

#: Published replication counts.
FULL_REPLICATES = {"T1": 100_000, "T2": 10_000, "T3": 1000, "T4": 1000, "T5": 1000,
                   "T7": 1000, "T8": 1000, "TS": 250}

#: Default scale per table family (replicates = scale * published count).
DESK_SCALE = {"T1": 0.1, "T2": 0.2, "T3": 0.2, "T4": 0.2, "T5": 0.2,
              "T7": 1.0, "T8": 1.0, "TS": 0.2}

#: Sample size of each Table 2 replicate at full scale and below it.
T2_SAMPLE_SIZE_FULL = 50_000
T2_SAMPLE_SIZE_DESK = 5000
T2_DIMENSIONS = (2, 3, 4, 5)

TS_SAMPLE_SIZE = 2000

_Z = 3.0


@dataclass(frozen=True)
class CellResult:
    """One compared cell."""

    table: str
    row: str
    column: str
    published: float
    reproduced: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.reproduced - self.published) <= self.tolerance

    def to_row(self) -> dict:
        return {
            "table": self.table,
            "row": self.row,
            "column": self.column,
            "published": self.published,
            "reproduced": self.reproduced,
            "difference": self.reproduced - self.published,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass
class ReproductionResult:
    """Layout table, per-cell comparison and run parameters of one reproduction."""

    table_id: str
    header: list
    rows: list
    cells: list
    parameters: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cells)

    def summary(self) -> dict:
        failed = [c.to_row() for c in self.cells if not c.passed]
        return {
            "table": self.table_id,
            "cells": len(self.cells),
            "passed_cells": len(self.cells) - len(failed),
            "passed": not failed,
            "parameters": self.parameters,
            "failures": failed,
        }

    def write(self, out_dir) -> dict:
        """Write ``<id>_layout.csv`` and ``<id>_comparison.csv``; return their paths."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        layout = out / f"{self.table_id}_layout.csv"
        with open(layout, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.header)
            writer.writerows([[_fmt(v) for v in row] for row in self.rows])
        comparison = out / f"{self.table_id}_comparison.csv"
        with open(comparison, "w", newline="", encoding="utf-8") as fh:
            fields = list(CellResult("", "", "", 0, 0, 0).to_row())
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            for cell in self.cells:
                writer.writerow({k: _fmt(v) for k, v in cell.to_row().items()})
        return {"layout": str(layout), "comparison": str(comparison)}


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def _replicates(family: str, scale: float | None) -> int:
    s = DESK_SCALE[family] if scale is None else float(scale)
    if not s > 0:
        raise DomainError(f"scale must be positive, got {scale}")
    return max(100 if family in ("T1", "T2") else 10, round(s * FULL_REPLICATES[family]))


def _family(table_id: str) -> str:
    return re.sub(r"[a-j]$", "", table_id)


def reproduce_table(table_id: str, scale: float | None = None, seed: int = 0) -> ReproductionResult:
    """Rerun one published experiment and compare it cell by cell.

    Parameters
    ----------
    table_id : str
        One of :data:`TABLE_IDS`: ``T1``, ``T2``, ``T3a``-``T3j``,
        ``T4a``-``T4h``, ``T5a``-``T5h``, ``T6``, ``T7``, ``T8`` or ``TS``.
    scale : float, optional
        Fraction of the published replication count; ``1.0`` is full scale.
    seed : int
        Root seed; every cell draws from its own spawned stream.

    Raises
    ------
    ConfigurationError
        For an unknown ``table_id``.
    """
    if table_id not in TABLE_IDS:
        raise ConfigurationError(f"unknown table {table_id!r}; choose from {', '.join(TABLE_IDS)}")
    family = _family(table_id)
    runner = {
        "T1": _table1, "T2": _table2, "T3": _index_table, "T4": _index_table,
        "T5": _index_table, "T6": _table6, "T7": _table7, "T8": _table8, "TS": _table_s,
    }[family]
    if family == "T6":
        return runner(table_id, seed)
    return runner(table_id, _replicates(family, scale), seed)


# -- T1: percentiles of |z_n| ---------------------------------------------------

def _table1(table_id, r, seed):
    sizes = sorted(ref.PERCENTILE_TABLE_D2)
    children = as_seed_sequence(seed).spawn(len(sizes))
    sigma = default_sigma(2)
    header = ["level", *map(str, sizes), "inf"]
    rows = [[f"p{level:.2f}"] for level in CONFIDENCE_LEVELS]
    cells = []
    for n, child in zip(sizes, children):
        log.info("T1: n=%d, r=%d", n, r)
        table = calibrate_percentiles(2, n, r, child, sigma)
        for k, level in enumerate(CONFIDENCE_LEVELS):
            value = table.critical_value(round(1 - level, 10))
            rows[k].append(value)
            # Asymptotic SE of an empirical quantile of |Z|, density 2 phi(q).
            se = math.sqrt(level * (1 - level) * (1 / r + 1 / FULL_REPLICATES["T1"])) / (
                2 * stats.norm.pdf(value))
            cells.append(CellResult(table_id, f"p{level:.2f}", str(n),
                                    ref.PERCENTILE_TABLE_D2[n][k], value, max(0.05, _Z * se)))
    for k, level in enumerate(CONFIDENCE_LEVELS):
        value = float(stats.norm.isf((1 - level) / 2))
        rows[k].append(value)
        # The published normal quantiles are truncated, not rounded (2.5758 -> 2.57).
        published = {0.90: 1.65, 0.95: 1.96, 0.99: 2.57}[level]
        cells.append(CellResult(table_id, f"p{level:.2f}", "inf", published, value, 0.01))
    return ReproductionResult(table_id, header, rows, cells, {"r": r, "seed": seed, "d": 2})


# -- T2: Monte Carlo sigma_Pi ----------------------------------------------------

def _table2(table_id, r, seed):
    n = T2_SAMPLE_SIZE_FULL if r >= FULL_REPLICATES["T2"] else T2_SAMPLE_SIZE_DESK
    children = as_seed_sequence(seed).spawn(len(T2_DIMENSIONS))
    header = ["quantity", *map(str, T2_DIMENSIONS)]
    row = ["sigma_hat"]
    cells = []
    for d, child in zip(T2_DIMENSIONS, children):
        log.info("T2: d=%d, r=%d, n=%d", d, r, n)
        value = estimate_sigma_pi(d, r, n, child).value
        row.append(value)
        published = ref.SIGMA_TABLE[d]
        se = published * math.sqrt(1 / (2 * (r - 1)) + 1 / (2 * (FULL_REPLICATES["T2"] - 1)))
        cells.append(CellResult(table_id, "sigma_hat", str(d), published, value,
                                max(0.005, _Z * se)))
    return ReproductionResult(table_id, header, [row], cells, {"r": r, "n": n, "seed": seed})


# -- T3-T5: index simulations ---------------------------------------------------

def _index_sampler(entry):
    family, params = entry["family"], entry["params"]
    if family == "normal3":
        r12, r13, r23 = params["rho12"], params["rho13"], params["rho23"]
        Sigma = np.array([[1.0, r12, r13], [r12, 1.0, r23], [r13, r23, 1.0]])
        return lambda n, rng: sample_general_normal(Sigma, n, rng)
    if family == "fgm":
        return lambda n, rng: sample_fgm(params["variant"], params["theta"], n, rng)
    spec = CopulaSpec(family, params["theta"], 3)
    return lambda n, rng: sample_archimedean(spec, n, rng)


def _index_table(table_id, r, seed):
    entry = ref.INDEX_TABLES[table_id]
    sampler = _index_sampler(entry)
    phi = phi_builtin(3)
    sizes = ref.INDEX_SAMPLE_SIZES
    header = ["estimator", *map(str, sizes)]
    rows = [["I_hat"], ["I_hat_star"]]
    cells = []
    for k, (n, child) in enumerate(zip(sizes, as_seed_sequence(seed).spawn(len(sizes)))):
        log.info("%s: n=%d, r=%d", table_id, n, r)
        I = np.empty(r)
        for j, stream in enumerate(child.spawn(r)):
            I[j] = index_I(auk_vector(sampler(n, np.random.default_rng(stream)), method="auto"))
        I_star = np.array([index_I_star(v, phi) for v in I])
        for row, name, values, base in ((rows[0], "I_hat", I, 0.01), (rows[1], "I_hat_star", I_star, 0.02)):
            mean = float(values.mean())
            row.append(mean)
            sd = float(values.std(ddof=1))
            se = sd * math.sqrt(1 / r + 1 / FULL_REPLICATES["T3"])
            published = entry[name.replace("_hat", "")][k]
            cells.append(CellResult(table_id, name, str(n), published, mean, max(base, _Z * se)))
    return ReproductionResult(table_id, header, rows, cells,
                              {"r": r, "seed": seed, "law": entry["label"], "phi": "builtin d=3"})


# -- T6: biomarker data (deterministic) -----------------------------------------

def _table6(table_id, seed):
    data = load_biomarkers()
    header = ["columns", "I_hat", "I_hat_star", "tau_hat"]
    rows, cells = [], []

    def add(cols, I_pub, Is_pub, tau_pub, phi):
        sub = data.select(list(cols))
        I = index_I(auk_vector(sub))
        Is = index_I_star(I, phi)
        tau = kendall_tau_pairwise(sub) if len(cols) == 2 else None
        label = "(" + ",".join(cols) + ")"
        rows.append([label, I, Is, "" if tau is None else tau])
        cells.append(CellResult(table_id, label, "I_hat", I_pub, I,
                                0.0005 if len(cols) == 4 else 0.001))
        cells.append(CellResult(table_id, label, "I_hat_star", Is_pub, Is, 0.02))
        if tau is not None:
            cells.append(CellResult(table_id, label, "tau_hat", tau_pub, tau, 0.001))

    for cols, I_pub, Is_pub, tau_pub in ref.BIOMARKER_PAIRS:
        add(cols, I_pub, Is_pub, tau_pub, phi_builtin(2))
    for cols, I_pub, Is_pub in ref.BIOMARKER_TRIPLES:
        add(cols, I_pub, Is_pub, None, phi_builtin(3))
    log.info("T6: calibrating phi_4 with seed %d", seed)
    phi4 = calibrate_phi(4, seed=seed)
    full = ref.BIOMARKER_FULL
    add(full["columns"], full["I"], full["I_star"], None, phi4)
    return ReproductionResult(table_id, header, rows, cells,
                              {"seed": seed, "phi_4": phi4.provenance_dict()})


# -- T7/T8: rejection rates ------------------------------------------------------

def _rejection_rate(sampler, n, r, child, critical, sigma):
    rejections = 0
    for stream in child.spawn(r):
        X = sampler(n, np.random.default_rng(stream)).values
        auk = auk_from_counts(dominance_counts_bitset(X), n, 2)
        rejections += abs(math.sqrt(n) * (auk - 0.5) / sigma) > critical
    return 100.0 * rejections / r


def _power_table(table_id, laws, r, seed):
    sizes = ref.POWER_SAMPLE_SIZES
    sigma = default_sigma(2)
    policy = TestPolicy(allow_calibration=False)
    critical = {n: resolve_critical_value(n, 2, 0.05, sigma, policy)[0] for n in sizes}
    header = ["law", *map(str, sizes)]
    rows, cells = [], []
    for (label, sampler, published, base), law_seq in zip(laws, as_seed_sequence(seed).spawn(len(laws))):
        row = [label]
        for k, (n, child) in enumerate(zip(sizes, law_seq.spawn(len(sizes)))):
            log.info("%s: %s n=%d r=%d", table_id, label, n, r)
            rate = _rejection_rate(sampler, n, r, child, critical[n], sigma.value)
            row.append(rate)
            p = published[k] / 100.0
            se = 100.0 * math.sqrt(p * (1 - p) * (1 / r + 1 / FULL_REPLICATES["T7"]))
            cells.append(CellResult(table_id, label, str(n), published[k], rate, max(base, _Z * se)))
        rows.append(row)
    return ReproductionResult(table_id, header, rows, cells,
                              {"r": r, "seed": seed, "alpha": 0.05,
                               "critical_values": {str(n): v for n, v in critical.items()}})


def _table7(table_id, r, seed):
    laws = []
    for rho, published in ref.POWER_NORMAL.items():
        spec = EquicorrelatedSpec(2, rho)
        sampler = lambda n, rng, spec=spec: sample_equicorrelated_normal(spec, n, rng)  # noqa: E731
        laws.append((f"rho={rho:g}", sampler, published, 3.0))
    return _power_table(table_id, laws, r, seed)


def _table8(table_id, r, seed):
    laws = []
    for label, (family, params, published) in ref.POWER_NON_NORMAL.items():
        sampler = lambda n, rng, f=family, p=params: sample_bivariate_family(f, p, n, rng)  # noqa: E731
        laws.append((label, sampler, published, 4.0 if family == "circle" else 3.0))
    return _power_table(table_id, laws, r, seed)


# -- TS: population index of N3(0, Sigma_3(rho)) ---------------------------------

def _table_s(table_id, N, seed):
    rhos = list(ref.NORMAL3_INDEX)
    header = ["rho", "I"]
    rows, cells = [], []
    for rho, child in zip(rhos, as_seed_sequence(seed).spawn(len(rhos))):
        if rho in (0.0, 1.0):
            value = float(rho)
        else:
            log.info("TS: rho=%g, N=%d", rho, N)
            value = mc_index_for_equicorrelated_normal(3, rho, TS_SAMPLE_SIZE, N, child)
        rows.append([rho, value])
        cells.append(CellResult(table_id, f"rho={rho:g}", "I", ref.NORMAL3_INDEX[rho], value,
                                0.02 if rho >= 0.9 else 0.015))
    return ReproductionResult(table_id, header, rows, cells,
                              {"N": N, "n": TS_SAMPLE_SIZE, "seed": seed, "d": 3})
