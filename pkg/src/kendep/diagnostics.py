"""Kendall curves of all reflections and the class-membership check.

A reflection whose empirical Kendall cdf never crosses ``K_Pi`` witnesses
condition C1; two reflections whose cdfs stay on or below ``K_Pi`` witness
condition C2.  On a finite sample "never crosses" is judged up to a
tolerance band, by default the 95% Dvoretzky-Kiefer-Wolfowitz half-width
``sqrt(ln(2 / 0.05) / (2 n))``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .kendall_core import ProductKendallLaw, as_sample
from .orthant import SignPattern, orthant_counts, sign_patterns

__all__ = [
    "DEFAULT_GRID_SIZE",
    "KendallCurve",
    "ClassDecision",
    "curve_grid",
    "dkw_tolerance",
    "kendall_curve",
    "kendall_curves",
    "classify_class_membership",
    "write_curves_csv",
]

DEFAULT_GRID_SIZE = 512


@dataclass(frozen=True)
class KendallCurve:
    """Empirical and reference Kendall cdfs of one reflection on a grid."""

    pattern: SignPattern
    grid: np.ndarray
    k_emp: np.ndarray
    k_pi: np.ndarray

    @property
    def difference(self) -> np.ndarray:
        return self.k_emp - self.k_pi


@dataclass(frozen=True)
class ClassDecision:
    """Result of the C1/C2 check.

    ``c1_witnesses`` lists patterns whose difference ``K_hat - K_Pi`` keeps
    one sign within the tolerance; ``c2_witnesses`` those whose difference
    stays at or below the tolerance.
    """

    in_X1: bool
    in_X2: bool
    c1_witnesses: tuple
    c2_witnesses: tuple
    tolerance: float
    grid_size: int

    def to_dict(self) -> dict:
        return {
            "in_X1": self.in_X1,
            "in_X2": self.in_X2,
            "c1_witnesses": list(self.c1_witnesses),
            "c2_witnesses": list(self.c2_witnesses),
            "tolerance": self.tolerance,
            "grid_size": self.grid_size,
        }


def curve_grid(grid_size: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    """``grid_size`` equispaced points of (0, 1], ending at 1."""
    if grid_size < 16:
        raise ValueError(f"grid_size must be at least 16, got {grid_size}")
    return np.arange(1, grid_size + 1) / grid_size


def dkw_tolerance(n: int, level: float = 0.05) -> float:
    """Half-width of the DKW confidence band for an empirical cdf."""
    return math.sqrt(math.log(2.0 / level) / (2.0 * n))


def _curves_from_counts(counts, n, d, grid):
    k_pi = ProductKendallLaw(d).cdf(grid)
    # counts are integers, so K_hat(t) = #{c <= n t} / n; the small offset
    # keeps n t from landing just below an integer through rounding.
    thresholds = np.floor(n * grid + 1e-9).astype(np.int64)
    curves = []
    # Column j of counts belongs to pattern j; a single column is pattern 0.
    for j, pattern in zip(range(counts.shape[1]), sign_patterns(d)):
        freq = np.bincount(counts[:, j], minlength=n + 1)
        cdf = np.cumsum(freq) / n
        curves.append(KendallCurve(pattern, grid, cdf[thresholds], k_pi))
    return curves


def kendall_curves(sample, grid_size: int = DEFAULT_GRID_SIZE, method: str = "onepass") -> list:
    """Kendall curves of all ``2**d`` reflections from one counting pass."""
    sample = as_sample(sample)
    counts = orthant_counts(sample, method)
    return _curves_from_counts(counts, sample.n, sample.d, curve_grid(grid_size))


def kendall_curve(sample, pattern, grid_size: int = DEFAULT_GRID_SIZE) -> KendallCurve:
    """Kendall curve of one reflection.

    Parameters
    ----------
    sample : Sample or array_like
    pattern : SignPattern or int
        Reflection, given as a pattern or its index.
    grid_size : int
        Number of grid points in (0, 1].
    """
    sample = as_sample(sample)
    index = pattern.index if isinstance(pattern, SignPattern) else int(pattern)
    flipped = SignPattern(index, sample.d).apply(sample.values)
    counts = orthant_counts(flipped, "bitset")[:, :1]
    curve = _curves_from_counts(counts, sample.n, sample.d, curve_grid(grid_size))[0]
    return KendallCurve(SignPattern(index, sample.d), curve.grid, curve.k_emp, curve.k_pi)


def classify_class_membership(sample, tolerance: float | None = None,
                              grid_size: int = DEFAULT_GRID_SIZE, curves=None) -> ClassDecision:
    """Quantized version of the visual C1/C2 decision rule.

    Parameters
    ----------
    sample : Sample or array_like
    tolerance : float, optional
        Band half-width; defaults to :func:`dkw_tolerance` of ``n``.
    curves : list of KendallCurve, optional
        Precomputed curves of ``sample`` (skips the counting pass).
    """
    sample = as_sample(sample)
    tol = dkw_tolerance(sample.n) if tolerance is None else float(tolerance)
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    curves = kendall_curves(sample, grid_size) if curves is None else curves
    c1, c2 = [], []
    for curve in curves:
        diff = curve.difference
        below = bool(np.all(diff <= tol))
        above = bool(np.all(diff >= -tol))
        if below or above:
            c1.append(curve.pattern.index)
        if below:
            c2.append(curve.pattern.index)
    in_x2 = len(c2) >= 2
    return ClassDecision(bool(c1) or in_x2, in_x2, tuple(c1), tuple(c2), tol, len(curves[0].grid))


def write_curves_csv(curves, path) -> int:
    """Write curves in long format ``pattern_index,t,k_emp,k_pi``; returns the row count."""
    rows = 0
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pattern_index", "t", "k_emp", "k_pi"])
        for curve in curves:
            for t, ke, kp in zip(curve.grid, curve.k_emp, curve.k_pi):
                writer.writerow([curve.pattern.index, repr(float(t)), repr(float(ke)), repr(float(kp))])
                rows += 1
    return rows
