"""Standardized index ``I* = phi_d(I)``.

``phi_d`` is a monotone polynomial of degree 7 on [0, 1] mapping the index of
an equicorrelated normal vector onto its correlation, so that ``I*`` reads on
the ``|rho|`` scale.  Built-in polynomials exist for ``d = 2`` and ``d = 3``;
other dimensions are calibrated by Monte Carlo.

The fit solves

.. math::

    \\min_c \; \\sum_j (p_c(x_j) - y_j)^2 + \\lambda \\int_0^1 p_c''(t)^2 dt
    \\quad \\text{s.t.} \\quad p_c'(g_k) \\ge 0, \; g_k \\in \\text{grid},

a least-squares problem with linear inequality constraints.  It is reduced
to a least-distance problem and solved with nonnegative least squares
(Lawson and Hanson).  The small curvature term selects the smoothest
solution when, as in calibration, there are fewer points than coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre, polynomial
from scipy.optimize import nnls

from .errors import ConfigurationError, DomainError, FitError
from .distributions import EquicorrelatedSpec, sample_equicorrelated_normal
from .orthant import auk_vector, index_I
from .rng import as_seed_sequence

__all__ = [
    "DEGREE",
    "GRID_SIZE",
    "CALIBRATION_RHO",
    "StandardizerPhi",
    "RhoIndexGrid",
    "phi_builtin",
    "mc_index_for_equicorrelated_normal",
    "rho_index_grid",
    "fit_monotone_polynomial",
    "calibrate_phi",
    "index_I_star",
]

DEGREE = 7
GRID_SIZE = 2049
CALIBRATION_RHO = (0.0, 0.4, 0.8, 0.95, 0.99, 1.0)
DEFAULT_MC_N = 2000
DEFAULT_MC_REPLICATES = 50
DEFAULT_SMOOTHING = 1e-6

_BUILTIN = {
    2: (0.0, 2.070, 0.061, -2.471, 1.307, 0.033, 0.0, 0.0),
    3: (0.0, 1.62, 4.45, -13.48, 12.13, -3.72, 0.0, 0.0),
}


def monotonicity_grid() -> np.ndarray:
    return np.linspace(0.0, 1.0, GRID_SIZE)


@dataclass(frozen=True)
class StandardizerPhi:
    """A degree-7 polynomial ``phi`` with ``phi(0) = 0`` and ``phi(1) = 1``.

    Attributes
    ----------
    d : int
        Dimension the polynomial belongs to.
    coefficients : ndarray of shape (8,)
        Monomial coefficients, constant term first.
    provenance : dict
        ``{"source": "builtin"}`` or the calibration parameters.
    """

    d: int
    coefficients: np.ndarray
    provenance: dict = field(default_factory=lambda: {"source": "builtin"})

    def __post_init__(self):
        c = np.zeros(DEGREE + 1)
        given = np.asarray(self.coefficients, dtype=np.float64)
        if given.ndim != 1 or given.size > DEGREE + 1:
            raise DomainError(f"expected at most {DEGREE + 1} coefficients")
        c[: given.size] = given
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    def __call__(self, t):
        return polynomial.polyval(np.asarray(t, dtype=np.float64), self.coefficients)

    def derivative(self, t):
        return polynomial.polyval(np.asarray(t, dtype=np.float64), polynomial.polyder(self.coefficients))

    def check_invariants(self, atol: float = 1e-9) -> None:
        """Raise :class:`FitError` unless the pins and grid monotonicity hold."""
        if abs(self(0.0)) > atol or abs(self(1.0) - 1.0) > atol:
            raise FitError(f"phi(0) = {self(0.0)!r}, phi(1) = {self(1.0)!r}; expected 0 and 1")
        slope = self.derivative(monotonicity_grid())
        if slope.min() < 0.0:
            raise FitError(f"phi decreases on [0, 1] (min slope {slope.min():.3g})")

    def provenance_dict(self) -> dict:
        return {"d": self.d, "coefficients": self.coefficients.tolist(), **self.provenance}


@dataclass(frozen=True)
class RhoIndexGrid:
    """Monte Carlo index values ``I(rho)`` for equicorrelated normal vectors."""

    rho: np.ndarray
    I_of_rho: np.ndarray
    d: int
    n: int
    N: int
    seed: int


def phi_builtin(d: int) -> StandardizerPhi:
    """The published polynomial for ``d = 2`` or ``d = 3``.

    Examples
    --------
    >>> float(phi_builtin(2)(1.0))
    1.0
    """
    if d not in _BUILTIN:
        raise ConfigurationError(
            f"no built-in standardizer for d={d}; use calibrate_phi(d, ...) instead"
        )
    return StandardizerPhi(d, np.array(_BUILTIN[d]), {"source": "builtin"})


def _mc_index(d, rho, n, N, seq):
    spec = EquicorrelatedSpec(d, rho)
    total = 0.0
    for child in seq.spawn(N):
        sample = sample_equicorrelated_normal(spec, n, np.random.default_rng(child))
        total += index_I(auk_vector(sample, method="auto"))
    return total / N


def mc_index_for_equicorrelated_normal(d: int, rho: float, n: int = DEFAULT_MC_N,
                                       N: int = DEFAULT_MC_REPLICATES, seed=0) -> float:
    """Average of ``I`` over ``N`` samples of size ``n`` from ``N_d(0, Sigma_d(rho))``.

    Raises
    ------
    DomainError
        If ``rho`` lies outside ``[1/(1 - d), 1]``, where ``Sigma_d(rho)``
        stops being positive semidefinite.
    """
    EquicorrelatedSpec(d, rho)
    if n < 2 or N < 1:
        raise DomainError("need n >= 2 and N >= 1")
    return _mc_index(d, rho, n, N, as_seed_sequence(seed))


def rho_index_grid(d: int, n: int = DEFAULT_MC_N, N: int = DEFAULT_MC_REPLICATES,
                   seed=0, rho=CALIBRATION_RHO) -> RhoIndexGrid:
    """Step 1 of the calibration: ``I(rho_j)`` with the endpoints pinned to 0 and 1.

    Each interior ``rho_j`` gets its own child stream of ``seed``.
    """
    rho = np.asarray(rho, dtype=np.float64)
    if rho[0] != 0.0 or rho[-1] != 1.0 or np.any(np.diff(rho) <= 0):
        raise DomainError("rho grid must increase strictly from 0 to 1")
    children = as_seed_sequence(seed).spawn(rho.size)
    values = np.empty(rho.size)
    values[0], values[-1] = 0.0, 1.0
    for j in range(1, rho.size - 1):
        values[j] = _mc_index(d, float(rho[j]), n, N, children[j])
    return RhoIndexGrid(rho, values, d, n, N, seed if isinstance(seed, int) else None)


# -- constrained fit -----------------------------------------------------------
#
# Work in the shifted Legendre basis on [0, 1] for conditioning and convert to
# monomial coefficients at the end.

def _legendre_columns(t, order=0):
    t = np.asarray(t, dtype=np.float64)
    cols = np.empty((t.size, DEGREE + 1))
    eye = np.eye(DEGREE + 1)
    for j in range(DEGREE + 1):
        c = legendre.legder(eye[j], order) * 2.0**order if order else eye[j]
        cols[:, j] = legendre.legval(2.0 * t - 1.0, c)
    return cols


def _curvature_gram():
    nodes, weights = legendre.leggauss(DEGREE + 2)
    nodes = (nodes + 1.0) / 2.0
    weights = weights / 2.0
    B = _legendre_columns(nodes, order=2)
    return (B * weights[:, None]).T @ B


def _legendre_to_monomial(a):
    out = np.zeros(DEGREE + 1)
    shift = np.array([-1.0, 2.0])
    for j, aj in enumerate(a):
        in_s = legendre.leg2poly(np.eye(DEGREE + 1)[j])
        term = np.zeros(1)
        for k, ck in enumerate(in_s):
            term = polynomial.polyadd(term, ck * polynomial.polypow(shift, k))
        out[: term.size] += aj * term
    return out


def _least_squares_inequality(E, f, G, h):
    """``min ||E c - f||`` subject to ``G c >= h`` for full-column-rank ``E``."""
    Q, R = np.linalg.qr(E)
    f_t = Q.T @ f
    H = np.linalg.solve(R.T, G.T).T
    k = h - H @ f_t
    m = H.shape[1]
    M = np.vstack([H.T, k[None, :]])
    target = np.zeros(m + 1)
    target[-1] = 1.0
    u, _ = nnls(M, target, maxiter=100 * M.shape[1])
    resid = M @ u - target
    if abs(resid[-1]) < 1e-14:
        raise FitError("monotonicity constraints are infeasible")
    z = -resid[:m] / resid[-1]
    return np.linalg.solve(R, z + f_t)


def fit_monotone_polynomial(points, degree: int = DEGREE, smoothing: float = DEFAULT_SMOOTHING,
                            d: int = 0, provenance=None) -> StandardizerPhi:
    """Least-squares degree-7 polynomial with nonnegative slope on [0, 1].

    Parameters
    ----------
    points : sequence of (x, y)
        Data in ``[0, 1]^2`` with strictly increasing ``x``; ``(0, 0)`` and
        ``(1, 1)`` must be included.
    degree : int
        Must be 7.
    smoothing : float
        Weight of the curvature penalty.
    d : int
        Dimension recorded on the result.

    Returns
    -------
    StandardizerPhi
        After the fit the constant term is set to zero and the coefficients
        are divided by their sum, which pins ``phi(0) = 0`` and ``phi(1) = 1``.
    """
    if degree != DEGREE:
        raise ConfigurationError(f"only degree {DEGREE} is supported")
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 4:
        raise FitError("need at least 4 (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    if np.any((pts < 0) | (pts > 1)):
        raise FitError("points must lie in [0, 1]^2")
    if np.any(np.diff(x) <= 0):
        raise FitError("x values must increase strictly")
    if not (x[0] == 0 and y[0] == 0 and x[-1] == 1 and y[-1] == 1):
        raise FitError("points must include (0, 0) and (1, 1)")
    if np.ptp(y) == 0:
        raise FitError("degenerate data: all y values are equal")
    gram = _curvature_gram()
    w, V = np.linalg.eigh(gram)
    root = (V * np.sqrt(np.clip(w, 0.0, None))).T
    E = np.vstack([_legendre_columns(x), np.sqrt(smoothing) * root])
    f = np.concatenate([y, np.zeros(DEGREE + 1)])
    G = _legendre_columns(monotonicity_grid(), order=1)
    # A tiny positive margin absorbs rounding in the basis conversion.
    a = _least_squares_inequality(E, f, G, np.full(GRID_SIZE, 1e-9))
    c = _legendre_to_monomial(a)
    c[0] = 0.0
    total = c.sum()
    if not total > 0:
        raise FitError("fitted polynomial does not increase from 0 to 1")
    phi = StandardizerPhi(d, c / total, provenance or {"source": "fit", "smoothing": smoothing})
    phi.check_invariants()
    return phi


def calibrate_phi(d: int, n: int = DEFAULT_MC_N, N: int = DEFAULT_MC_REPLICATES, seed=0,
                  smoothing: float = DEFAULT_SMOOTHING) -> StandardizerPhi:
    """Monte Carlo calibration of ``phi_d``.

    ``I(rho)`` is estimated at ``rho = 0, 0.4, 0.8, 0.95, 0.99, 1`` (the
    endpoints pinned to 0 and 1) and a monotone degree-7 polynomial is fitted
    to the pairs ``(I(rho_j), rho_j)``.  The result is a deterministic
    function of ``(d, n, N, seed, smoothing)``.
    """
    grid = rho_index_grid(d, n, N, seed)
    provenance = {
        "source": "calibrated",
        "seed": seed,
        "n": n,
        "N": N,
        "rho": grid.rho.tolist(),
        "I_of_rho": grid.I_of_rho.tolist(),
        "smoothing": smoothing,
    }
    return fit_monotone_polynomial(np.column_stack([grid.I_of_rho, grid.rho]),
                                   smoothing=smoothing, d=d, provenance=provenance)


def index_I_star(I: float, phi: StandardizerPhi) -> float:
    """``phi(min(I, 1))`` clamped into [0, 1], with ``I >= 1`` mapped to 1."""
    if I < 0:
        raise DomainError(f"index must be nonnegative, got {I}")
    if I >= 1.0:
        # Honour the pin phi(1) = 1 exactly; the published coefficients sum
        # to 1 only up to rounding.
        return 1.0
    return float(np.clip(phi(I), 0.0, 1.0))
