"""Test of total independence based on the AUK of the unrotated sample.

Under total independence ``sqrt(n) (AUK_hat - 1/2)`` is asymptotically normal
with standard deviation ``sigma_Pi``.  The statistic

.. math::

    z_n = \\sqrt{n} (\\widehat{AUK} - 1/2) / \\sigma_\\Pi

is compared with ``z_{alpha/2}`` for large samples and with Monte Carlo
percentiles of ``|z_n|`` otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, stats

from ._kernels import dominance_counts_bitset
from .errors import ConfigurationError, DomainError, NumericalError
from .kendall_core import ProductKendallLaw, as_sample, auk_from_counts
from .rng import as_seed_sequence

__all__ = [
    "CONFIDENCE_LEVELS",
    "SIGMA_TABLE",
    "PERCENTILE_TABLE_D2",
    "SigmaPi",
    "CalibrationTable",
    "TestPolicy",
    "TestReport",
    "gamma_pi_d2",
    "sigma_pi_exact_d2",
    "sigma_pi_quadrature_d2",
    "sigma_pi_table",
    "null_auk_replicates",
    "estimate_sigma_pi",
    "calibrate_percentiles",
    "builtin_percentiles",
    "uses_asymptotic_critical_value",
    "test_statistic",
    "resolve_sigma",
    "resolve_critical_value",
    "run_independence_test",
]

CONFIDENCE_LEVELS = (0.90, 0.95, 0.99)

#: Published Monte Carlo estimates of sigma_Pi (r = 10^4 samples of size 5 * 10^4).
#: Only the d = 2 entry agrees with the null law of d-dimensional data; the
#: other entries match the spread of the statistic evaluated on bivariate
#: samples, so they are kept for reference and are not used by default.
SIGMA_TABLE = {
    2: 0.20988, 3: 0.19383, 4: 0.16254, 5: 0.12511, 6: 0.09407,
    7: 0.06853, 8: 0.04912, 9: 0.03395, 10: 0.02377,
}

#: Percentiles of |z_n| for d = 2 (10^5 uniform samples per n): n -> (p90, p95, p99).
PERCENTILE_TABLE_D2 = {
    30: (2.30, 2.62, 3.19),
    50: (2.11, 2.44, 3.05),
    70: (2.01, 2.34, 2.95),
    100: (1.93, 2.25, 2.87),
    150: (1.84, 2.17, 2.78),
    200: (1.79, 2.12, 2.75),
    300: (1.74, 2.06, 2.68),
    400: (1.72, 2.05, 2.67),
    500: (1.71, 2.03, 2.65),
    750: (1.68, 2.01, 2.63),
    1000: (1.67, 1.98, 2.60),
}


@dataclass(frozen=True)
class SigmaPi:
    """Null standard deviation of ``sqrt(n) (AUK_hat - 1/2)``.

    ``source`` is ``"exact_d2"``, ``"quadrature_d2"``, ``"table"`` or
    ``"monte_carlo"``; ``details`` records the Monte Carlo parameters.
    """

    d: int
    value: float
    source: str
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.value > 0:
            raise DomainError(f"sigma must be positive, got {self.value}")

    def to_dict(self) -> dict:
        return {"d": self.d, "value": self.value, "source": self.source, **self.details}


@dataclass(frozen=True)
class CalibrationTable:
    """Percentiles ``p_{d,n;1-alpha}`` of ``|z_n|`` under independence."""

    d: int
    n: int
    percentiles: dict
    r: int | None
    seed: int | None
    source: str = "monte_carlo"
    sigma: float | None = None

    def critical_value(self, alpha: float) -> float:
        level = round(1.0 - alpha, 10)
        for key, value in self.percentiles.items():
            if abs(float(key) - level) < 1e-9:
                return float(value)
        raise ConfigurationError(
            f"no calibrated percentile for alpha={alpha}; available levels: "
            f"{sorted(float(k) for k in self.percentiles)}"
        )

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "percentiles": {f"{float(k):.2f}": float(v) for k, v in self.percentiles.items()},
            "r": self.r,
            "seed": self.seed,
            "source": self.source,
            "sigma": self.sigma,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CalibrationTable":
        return cls(
            int(data["d"]), int(data["n"]),
            {float(k): float(v) for k, v in data["percentiles"].items()},
            data.get("r"), data.get("seed"), data.get("source", "monte_carlo"), data.get("sigma"),
        )


def gamma_pi_d2(s, t):
    """Null covariance kernel for ``d = 2`` at ``s <= t``: ``s (t - 1 - ln t)``."""
    s = np.asarray(s, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    lo, hi = np.minimum(s, t), np.maximum(s, t)
    return lo * (hi - 1.0 - np.log(hi))


def sigma_pi_exact_d2() -> SigmaPi:
    """``sigma_Pi = sqrt(19/432)`` for ``d = 2``."""
    return SigmaPi(2, math.sqrt(19.0 / 432.0), "exact_d2")


def sigma_pi_quadrature_d2(cutoff: float = 1e-10) -> SigmaPi:
    """``sigma_Pi^2 = 2 iint_{0<s<t<1} k(s) Gamma(s, t) k(t) ds dt`` with ``k(t) = -ln t``.

    Adaptive two-dimensional quadrature over the triangle; ``cutoff`` trims
    the integrable logarithmic singularity at 0.
    """

    def integrand(s, t):
        return np.log(s) * np.log(t) * gamma_pi_d2(s, t)

    value, err = integrate.dblquad(
        integrand, cutoff, 1.0, lambda t: cutoff, lambda t: t, epsabs=1e-13, epsrel=1e-12
    )
    if not np.isfinite(value) or err > 1e-9:
        raise NumericalError(f"quadrature did not converge (error estimate {err:.3g})")
    return SigmaPi(2, math.sqrt(2.0 * value), "quadrature_d2", {"abs_error": err})


def sigma_pi_table(d: int) -> SigmaPi:
    """Tabulated Monte Carlo value for ``2 <= d <= 10``."""
    if d not in SIGMA_TABLE:
        raise ConfigurationError(f"no tabulated sigma for d={d}; run estimate_sigma_pi")
    return SigmaPi(d, SIGMA_TABLE[d], "table", {"r": 10000, "n": 50000})


def null_auk_replicates(d: int, n: int, r: int, seed=0) -> np.ndarray:
    """AUK estimates of ``r`` independent uniform samples of size ``n``.

    Replicate ``j`` draws from child stream ``j`` of ``seed``, so any prefix
    of the output is reproducible on its own.
    """
    if d < 2 or n < 2 or r < 1:
        raise DomainError("need d >= 2, n >= 2 and r >= 1")
    table = ProductKendallLaw(d).sf(np.arange(n + 1) / n)
    out = np.empty(r)
    for j, child in enumerate(as_seed_sequence(seed).spawn(r)):
        u = np.random.default_rng(child).random((n, d))
        out[j] = table[dominance_counts_bitset(u)].mean()
    return out


def estimate_sigma_pi(d: int, r: int = 2000, n: int = 5000, seed=0) -> SigmaPi:
    """Sample standard deviation of ``sqrt(n) (AUK_j - 1/2)`` over ``r`` null samples."""
    if r < 2:
        raise DomainError("need r >= 2")
    a = math.sqrt(n) * (null_auk_replicates(d, n, r, seed) - 0.5)
    return SigmaPi(d, float(np.std(a, ddof=1)), "monte_carlo", {"r": r, "n": n, "seed": seed})


def calibrate_percentiles(d: int, n: int, r: int = 10000, seed=0, sigma: SigmaPi | None = None,
                          levels=CONFIDENCE_LEVELS) -> CalibrationTable:
    """Empirical quantiles of ``|z_n|`` over ``r`` uniform samples of size ``n``."""
    if r < 100:
        raise DomainError("need r >= 100 replicates")
    if sigma is None:
        sigma = default_sigma(d) if d == 2 else estimate_sigma_pi(d, seed=seed)
    z = np.abs(math.sqrt(n) * (null_auk_replicates(d, n, r, seed) - 0.5) / sigma.value)
    q = np.quantile(z, levels)
    return CalibrationTable(d, n, dict(zip(levels, map(float, q))), r,
                            seed if isinstance(seed, int) else None, "monte_carlo", sigma.value)


def builtin_percentiles(n: int) -> CalibrationTable | None:
    """Tabulated ``d = 2`` percentiles for ``n``, or ``None`` if not tabulated."""
    if n not in PERCENTILE_TABLE_D2:
        return None
    return CalibrationTable(2, n, dict(zip(CONFIDENCE_LEVELS, PERCENTILE_TABLE_D2[n])),
                            100000, None, "builtin", None)


def uses_asymptotic_critical_value(n: int, d: int) -> bool:
    """Large-sample rule: normal quantiles once ``n > max(1000, 100 d)``."""
    return n > max(1000, 100 * d)


def test_statistic(auk_hat: float, n: int, sigma) -> float:
    """``z_n = sqrt(n) (AUK_hat - 1/2) / sigma``."""
    value = sigma.value if isinstance(sigma, SigmaPi) else float(sigma)
    if n < 2 or not value > 0:
        raise DomainError("need n >= 2 and a positive sigma")
    return math.sqrt(n) * (auk_hat - 0.5) / value


# Keep pytest from collecting this function when a test module imports it.
test_statistic.__test__ = False


def default_sigma(d: int) -> SigmaPi:
    """Closed-form value for ``d = 2``.

    Other dimensions have no closed form; :func:`resolve_sigma` supplies a
    Monte Carlo estimate for them.
    """
    if d != 2:
        raise ConfigurationError(f"no closed-form sigma for d={d}; use resolve_sigma or estimate_sigma_pi")
    return sigma_pi_exact_d2()


@dataclass(frozen=True)
class TestPolicy:
    """How ``sigma_Pi`` and critical values are obtained.

    Attributes
    ----------
    sigma : {"default", "monte_carlo", "table"}
        ``"default"`` uses the exact value for ``d = 2`` and a Monte Carlo
        estimate otherwise.  ``"monte_carlo"`` always uses a Monte Carlo
        estimate with ``sigma_r`` samples of size ``sigma_n``, loaded from
        the cache when present.  ``"table"`` uses the published constants
        of :data:`SIGMA_TABLE`.
    use_builtin_percentiles : bool
        Use the tabulated ``d = 2`` percentiles when ``n`` is tabulated.
    allow_calibration : bool
        Run a Monte Carlo percentile calibration when nothing else applies.
    """

    __test__ = False

    sigma: str = "default"
    sigma_r: int = 2000
    sigma_n: int = 5000
    use_builtin_percentiles: bool = True
    allow_calibration: bool = True
    percentile_r: int = 10000
    seed: int = 0
    cache: object = None


@dataclass(frozen=True)
class TestReport:
    """Outcome of one independence test."""

    __test__ = False

    n: int
    d: int
    auk_hat: float
    z_n: float
    sigma: SigmaPi
    critical_value: float
    critical_source: str
    alpha: float
    reject: bool
    p_value_asymptotic: float
    calibration: dict | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "auk_hat": self.auk_hat,
            "z_n": self.z_n,
            "sigma": self.sigma.to_dict(),
            "critical_value": self.critical_value,
            "critical_source": self.critical_source,
            "alpha": self.alpha,
            "reject": self.reject,
            "p_value_asymptotic": self.p_value_asymptotic,
            "calibration": self.calibration,
        }


def resolve_sigma(d: int, policy: TestPolicy) -> SigmaPi:
    if policy.sigma not in ("default", "monte_carlo", "table"):
        raise ConfigurationError(f"unknown sigma source {policy.sigma!r}")
    if policy.sigma == "table":
        return sigma_pi_table(d)
    if policy.sigma == "default" and d == 2:
        return default_sigma(d)
    cache = policy.cache
    if cache is not None:
        hit = cache.get_sigma(d)
        if hit is not None:
            return hit
    if not policy.allow_calibration:
        raise ConfigurationError(f"no sigma available for d={d} and calibration is disabled")
    sigma = estimate_sigma_pi(d, policy.sigma_r, policy.sigma_n, policy.seed)
    if cache is not None:
        cache.put_sigma(sigma)
        cache.save()
    return sigma


def resolve_critical_value(n: int, d: int, alpha: float, sigma: SigmaPi, policy: TestPolicy):
    """Critical value, its source label and the calibration record used."""
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if uses_asymptotic_critical_value(n, d):
        return float(stats.norm.isf(alpha / 2.0)), "asymptotic", None
    table = None
    if d == 2 and policy.use_builtin_percentiles and sigma.source in ("exact_d2", "quadrature_d2"):
        table = builtin_percentiles(n)
    cache = policy.cache
    if table is None and cache is not None:
        table = cache.get_percentiles(d, n)
    if table is None:
        if not policy.allow_calibration:
            raise ConfigurationError(
                f"no percentile calibration for d={d}, n={n} and calibration is disabled"
            )
        table = calibrate_percentiles(d, n, policy.percentile_r, policy.seed, sigma)
        if cache is not None:
            cache.put_percentiles(table)
            cache.save()
    critical = table.critical_value(alpha)
    # |z_n| scales with 1 / sigma, so percentiles computed under another
    # sigma convert exactly.
    if table.sigma is not None and table.sigma != sigma.value:
        critical *= table.sigma / sigma.value
    return critical, "calibrated", table.to_dict()


def run_independence_test(sample, alpha: float = 0.05, policy: TestPolicy | None = None) -> TestReport:
    """Test total independence of the columns of ``sample``.

    The decision is ``|z_n| > critical value``.  The reported p-value always
    comes from the asymptotic normal law, whichever critical value is used.
    """
    policy = TestPolicy() if policy is None else policy
    sample = as_sample(sample)
    n, d = sample.n, sample.d
    counts = dominance_counts_bitset(sample.values)
    auk_hat = float(auk_from_counts(counts, n, d))
    sigma = resolve_sigma(d, policy)
    z = test_statistic(auk_hat, n, sigma)
    critical, source, calibration = resolve_critical_value(n, d, alpha, sigma, policy)
    p_value = float(2.0 * stats.norm.sf(abs(z)))
    return TestReport(n, d, auk_hat, z, sigma, critical, source, alpha,
                      bool(abs(z) > critical), p_value, calibration)
