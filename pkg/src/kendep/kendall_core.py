"""Product Kendall law, multivariate pseudo-observations and the AUK estimator.

For independent uniforms ``U_1, ..., U_d`` the product ``P = U_1 ... U_d`` has
the Kendall distribution

.. math::

    K_\\Pi(t) = t \\sum_{k=0}^{d-1} \\frac{(-\\ln t)^k}{k!}
             = 1 - F_{\\chi^2_{2d}}(-2 \\ln t),

with density :math:`k_\\Pi(t) = (-\\ln t)^{d-1} / (d-1)!`.  The area under
the Kendall curve of a random vector with pseudo-observation ``T`` is
``AUK = E{1 - K_Pi(T)}`` and equals 1/2 under total independence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special, stats

from ._kernels import dominance_counts_bitset
from .errors import DomainError, ShapeError, UndefinedStatisticError

__all__ = [
    "Sample",
    "as_sample",
    "ProductKendallLaw",
    "PseudoObservations",
    "product_kendall_cdf",
    "product_kendall_pdf",
    "descending_factorial_integral",
    "multivariate_ecdf_at_points",
    "pseudo_obs_excluding_self",
    "empirical_kendall_cdf",
    "auk_estimate",
    "auk_from_counts",
    "kendall_tau_pairwise",
]

#: Below this value ``K_Pi`` is evaluated through the chi-square survival form.
SERIES_THRESHOLD = 1e-3


@dataclass(frozen=True)
class Sample:
    """An ``n x d`` table of finite observations.

    Parameters
    ----------
    values : array_like of shape (n, d)
        Observations, one row per sample point.  Stored as a read-only
        float64 array.
    columns : tuple of str, optional
        Column labels.  Defaults to ``X1, ..., Xd``.
    """

    values: np.ndarray
    columns: tuple = field(default=None)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2:
            raise ShapeError(f"a sample must be two-dimensional, got shape {values.shape}")
        n, d = values.shape
        if n < 2:
            raise ShapeError(f"a sample needs at least 2 rows, got {n}")
        if d < 2:
            raise ShapeError(f"a sample needs at least 2 columns, got {d}")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise DomainError(
                f"non-finite value at row {bad[0] + 1}, column {bad[1] + 1}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        columns = self.columns
        if columns is None:
            columns = tuple(f"X{j + 1}" for j in range(d))
        columns = tuple(str(c) for c in columns)
        if len(columns) != d:
            raise ShapeError(f"{len(columns)} column labels for {d} columns")
        object.__setattr__(self, "columns", columns)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def select(self, columns):
        """Return the sub-sample made of the given columns (labels or indices)."""
        idx = []
        for c in columns:
            if isinstance(c, (int, np.integer)):
                idx.append(int(c))
            elif c in self.columns:
                idx.append(self.columns.index(c))
            else:
                raise ShapeError(f"unknown column {c!r}; available: {', '.join(self.columns)}")
        return Sample(self.values[:, idx], tuple(self.columns[i] for i in idx))


def as_sample(data) -> Sample:
    """Coerce an array-like or :class:`Sample` into a validated :class:`Sample`."""
    if isinstance(data, Sample):
        return data
    return Sample(np.asarray(data, dtype=np.float64))


@dataclass(frozen=True)
class ProductKendallLaw:
    """Kendall law of the product of ``d`` independent uniforms.

    Examples
    --------
    >>> law = ProductKendallLaw(2)
    >>> round(float(law.cdf(0.5)), 7)
    0.8465736
    """

    d: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.d}")
        object.__setattr__(self, "d", int(self.d))

    # -- cdf ------------------------------------------------------------
    def cdf_series(self, t):
        """``t * sum_{k<d} (-ln t)^k / k!`` (accurate away from 0)."""
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            x = -np.log(t)
            term = np.ones_like(x)
            total = np.ones_like(x)
            for k in range(1, self.d):
                term = term * x / k
                total = total + term
            # Rounding in the sum can push the product a few ulps above 1.
            out = np.minimum(t * total, 1.0)
        return np.where(t == 0.0, 0.0, out)

    def cdf_chi2(self, t):
        """``1 - F_{chi2(2d)}(-2 ln t)`` as a regularized upper incomplete gamma."""
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore"):
            return special.gammaincc(self.d, -np.log(t))

    def cdf(self, t):
        """``K_Pi(t)`` for ``t`` in [0, 1]."""
        t = _check_unit(t, closed=True)
        out = np.where(t < SERIES_THRESHOLD, self.cdf_chi2(t), self.cdf_series(t))
        return out[()] if out.ndim == 0 else out

    def sf(self, t):
        """``1 - K_Pi(t)`` computed without cancellation near ``t = 1``."""
        t = _check_unit(t, closed=True)
        with np.errstate(divide="ignore"):
            out = special.gammainc(self.d, -np.log(t))
        return out[()] if np.ndim(out) == 0 else out

    # -- pdf ------------------------------------------------------------
    def pdf_series(self, t):
        t = np.asarray(t, dtype=np.float64)
        return (-np.log(t)) ** (self.d - 1) / math.factorial(self.d - 1)

    def pdf_chi2(self, t):
        """``2 f_{chi2(2d)}(-2 ln t) / t``, the derivative of the chi-square form."""
        t = np.asarray(t, dtype=np.float64)
        return 2.0 * stats.chi2.pdf(-2.0 * np.log(t), 2 * self.d) / t

    def pdf(self, t):
        """``k_Pi(t)`` for ``t`` in the open interval (0, 1)."""
        t = _check_unit(t, closed=False)
        out = self.pdf_series(t)
        return out[()] if np.ndim(out) == 0 else out


def _check_unit(t, closed):
    t = np.asarray(t, dtype=np.float64)
    if closed:
        ok = (t >= 0.0) & (t <= 1.0)
        what = "[0, 1]"
    else:
        ok = (t > 0.0) & (t < 1.0)
        what = "(0, 1)"
    if not np.all(ok):
        raise DomainError(f"t must lie in {what}")
    return t


def _law(law_or_d) -> ProductKendallLaw:
    if isinstance(law_or_d, ProductKendallLaw):
        return law_or_d
    return ProductKendallLaw(law_or_d)


def product_kendall_cdf(law, t):
    """``K_Pi(t)``; ``law`` may be a :class:`ProductKendallLaw` or a dimension."""
    return _law(law).cdf(t)


def product_kendall_pdf(law, t):
    """``k_Pi(t)``; ``law`` may be a :class:`ProductKendallLaw` or a dimension."""
    return _law(law).pdf(t)


def descending_factorial_integral(k: int, n: int, t: float) -> float:
    """``I_{k,n}(t) = int_0^t s^k ln^n(1/s) ds``.

    Repeated integration by parts gives

    .. math::

        I_{k,n}(t) = t^{k+1} \\sum_{j=0}^{n} \\frac{(n)_j}{(k+1)^{j+1}}
                     \\ln^{n-j}(1/t),

    where ``(n)_j = n (n-1) ... (n-j+1)`` is the descending factorial.  In
    particular ``I_{k,n}(1) = n! / (k+1)^{n+1}``.

    Parameters
    ----------
    k, n : int
        Nonnegative integers.
    t : float
        Upper limit in [0, 1].
    """
    if k < 0 or n < 0 or int(k) != k or int(n) != n:
        raise DomainError("k and n must be nonnegative integers")
    if not 0.0 <= t <= 1.0:
        raise DomainError("t must lie in [0, 1]")
    if t == 0.0:
        return 0.0
    k, n = int(k), int(n)
    log_inv = -math.log(t)
    total = 0.0
    falling = 1.0
    for j in range(n + 1):
        total += falling / (k + 1) ** (j + 1) * log_inv ** (n - j)
        falling *= n - j
    return t ** (k + 1) * total


@dataclass(frozen=True)
class PseudoObservations:
    """Empirical joint cdf evaluated at the sample points.

    Attributes
    ----------
    t_hat : ndarray of shape (n,)
        Pseudo-observations.
    d : int
        Dimension of the sample they came from.
    convention : {"include-self", "exclude-self"}
        Whether point ``i`` counts itself (denominator ``n``) or not
        (denominator ``n - 1``).
    """

    t_hat: np.ndarray
    d: int
    convention: str = "include-self"

    @property
    def n(self) -> int:
        return self.t_hat.shape[0]


def multivariate_ecdf_at_points(sample) -> PseudoObservations:
    """``T_i = #{j : X_j <= X_i componentwise} / n`` with ``i`` counted.

    Examples
    --------
    >>> multivariate_ecdf_at_points([[0, 0], [1, 1]]).t_hat
    array([0.5, 1. ])
    """
    sample = as_sample(sample)
    counts = dominance_counts_bitset(sample.values)
    return PseudoObservations(counts / sample.n, sample.d, "include-self")


def pseudo_obs_excluding_self(sample) -> PseudoObservations:
    """``T~_i = #{j != i : X_j <= X_i componentwise} / (n - 1)``."""
    sample = as_sample(sample)
    counts = dominance_counts_bitset(sample.values)
    return PseudoObservations((counts - 1) / (sample.n - 1), sample.d, "exclude-self")


def empirical_kendall_cdf(pseudo: PseudoObservations, t):
    """Right-continuous empirical cdf of the pseudo-observations at ``t``."""
    t = _check_unit(t, closed=True)
    ordered = np.sort(pseudo.t_hat)
    out = np.searchsorted(ordered, t, side="right") / ordered.shape[0]
    return out[()] if np.ndim(out) == 0 else out


def auk_estimate(pseudo: PseudoObservations, law=None) -> float:
    """``1 - mean K_Pi(T_i)``, the plug-in area under the Kendall curve."""
    law = ProductKendallLaw(pseudo.d) if law is None else _law(law)
    if law.d != pseudo.d:
        raise DomainError(f"law dimension {law.d} does not match data dimension {pseudo.d}")
    return float(np.mean(law.sf(np.clip(pseudo.t_hat, 0.0, 1.0))))


def auk_from_counts(counts, n: int, d: int):
    """AUK estimates from include-self dominance counts.

    ``counts`` holds integers in ``1..n`` along its first axis; every other
    axis is treated as a separate rotation or replicate.  The values of
    ``1 - K_Pi(c/n)`` are tabulated once, so the cost is a gather and a mean.
    """
    table = ProductKendallLaw(d).sf(np.arange(n + 1) / n)
    return table[np.asarray(counts)].mean(axis=0)


def kendall_tau_pairwise(sample) -> float:
    """Tie-adjusted sample Kendall tau (tau-b) of a two-column sample."""
    sample = as_sample(sample)
    if sample.d != 2:
        raise ShapeError(f"Kendall tau needs exactly 2 columns, got {sample.d}")
    x, y = sample.values[:, 0], sample.values[:, 1]
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise UndefinedStatisticError("Kendall tau is undefined for a constant column")
    return float(stats.kendalltau(x, y, variant="b").statistic)
