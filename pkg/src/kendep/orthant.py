"""Sign rotations, the AUK vector and the dependence index ``I``.

Each of the ``2**d`` sign patterns reflects a subset of coordinates.  The AUK
of every reflected sample forms the vector ``D``; its Euclidean distance to
the independence point ``(1/2, ..., 1/2)``, scaled by ``c_d``, is the index
``I``.  The scale makes the comonotone population score exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import bitset_bytes, orthant_counts_bitset, orthant_counts_onepass
from .errors import ConfigurationError, DomainError
from .kendall_core import PseudoObservations, as_sample, auk_from_counts

__all__ = [
    "MAX_DIMENSION",
    "LEVELS",
    "SignPattern",
    "AukVector",
    "DependenceReport",
    "sign_patterns",
    "orthant_counts",
    "orthant_pseudo_obs_all_rotations",
    "auk_vector",
    "normalizing_constant",
    "index_I",
    "classify_level",
    "dependence_report",
]

#: Largest dimension accepted; keeps the ``2**d`` tallies bounded.
MAX_DIMENSION = 20

#: Upper bin edges and labels of the four dependence levels.
LEVELS = ((0.25, "weak"), (0.5, "mild"), (0.75, "strong"), (math.inf, "very strong"))

# Above this footprint the all-pattern bitset kernel yields to the pair loop.
_BITSET_BUDGET = 256 * 2**20


@dataclass(frozen=True)
class SignPattern:
    """One reflection of the coordinate axes.

    ``index`` bit ``m`` is set exactly when coordinate ``m`` is negated, so
    pattern 0 leaves the data untouched.
    """

    index: int
    d: int

    @property
    def signs(self) -> tuple:
        return tuple(-1 if (self.index >> m) & 1 else 1 for m in range(self.d))

    @property
    def label(self) -> str:
        return "".join("-" if s < 0 else "+" for s in self.signs)

    @property
    def negation(self) -> "SignPattern":
        """The globally reflected pattern ``-s``."""
        return SignPattern(self.index ^ ((1 << self.d) - 1), self.d)

    def apply(self, values) -> np.ndarray:
        """Multiply each column of ``values`` by its sign."""
        return np.asarray(values, dtype=np.float64) * np.asarray(self.signs, dtype=np.float64)

    @classmethod
    def from_signs(cls, signs) -> "SignPattern":
        index = 0
        for m, s in enumerate(signs):
            if s not in (1, -1):
                raise DomainError(f"signs must be +1 or -1, got {s}")
            if s == -1:
                index |= 1 << m
        return cls(index, len(signs))


def _check_dimension(d):
    if int(d) != d or not 2 <= d <= MAX_DIMENSION:
        raise ConfigurationError(f"dimension must be an integer in [2, {MAX_DIMENSION}], got {d}")
    return int(d)


def sign_patterns(d: int) -> list:
    """All ``2**d`` patterns in index order; pattern 0 is all positive."""
    d = _check_dimension(d)
    return [SignPattern(j, d) for j in range(1 << d)]


def orthant_counts(sample, method: str = "onepass") -> np.ndarray:
    """Include-self dominance counts of every reflected sample.

    Parameters
    ----------
    sample : Sample or array_like of shape (n, d)
    method : {"onepass", "bitset", "auto"}
        ``"onepass"`` walks every ordered pair once and tallies all admissible
        patterns; ``"bitset"`` intersects packed coordinate sets and is faster
        for moderate ``n``; ``"auto"`` picks the bitset kernel when it fits a
        fixed memory budget.  All methods return identical integers.

    Returns
    -------
    ndarray of shape (n, 2**d), int64
    """
    sample = as_sample(sample)
    _check_dimension(sample.d)
    if method == "auto":
        fits = bitset_bytes(sample.n, sample.d, all_patterns=True) <= _BITSET_BUDGET
        method = "bitset" if fits else "onepass"
    if method == "onepass":
        return orthant_counts_onepass(sample.values)
    if method == "bitset":
        return orthant_counts_bitset(sample.values)
    raise ConfigurationError(f"unknown counting method {method!r}")


def orthant_pseudo_obs_all_rotations(sample, method: str = "onepass") -> list:
    """Pseudo-observations of every reflected sample, in pattern order."""
    sample = as_sample(sample)
    counts = orthant_counts(sample, method)
    return [
        PseudoObservations(counts[:, j] / sample.n, sample.d, "include-self")
        for j in range(counts.shape[1])
    ]


@dataclass(frozen=True)
class AukVector:
    """Per-rotation AUK estimates ``D`` ordered by pattern index."""

    d: int
    auk: np.ndarray

    def __post_init__(self):
        auk = np.asarray(self.auk, dtype=np.float64)
        if auk.shape != (1 << self.d,):
            raise DomainError(f"expected {1 << self.d} entries, got {auk.shape}")
        object.__setattr__(self, "auk", auk)

    @property
    def reference(self) -> np.ndarray:
        """The independence point ``(1/2, ..., 1/2)``."""
        return np.full(1 << self.d, 0.5)


def auk_vector(sample, method: str = "onepass") -> AukVector:
    """AUK of each of the ``2**d`` reflections of ``sample``."""
    sample = as_sample(sample)
    counts = orthant_counts(sample, method)
    return AukVector(sample.d, auk_from_counts(counts, sample.n, sample.d))


def normalizing_constant(d: int) -> float:
    """``c_d = (2^{d-2} - 2^{1-d} + 2^{1-2d})^{-1/2}``.

    ``c_2 = sqrt(8/5)`` and ``c_3 = sqrt(32/57)``.
    """
    if int(d) != d or d < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {d}")
    d = int(d)
    # Scaling by 2^(2d-1) keeps every term an exact integer.
    numerator = 2 ** (3 * d - 3) - 2 ** d + 1
    return math.sqrt(2 ** (2 * d - 1) / numerator)


def index_I(auk: AukVector) -> float:
    """``I = c_d ||D - 1/2||``, reported without clipping.

    The squared deviations are summed with :func:`math.fsum`, which rounds
    exactly once, so reordering ``D`` (as any sign flip or coordinate
    permutation of the data does) cannot change a single bit of the result.
    """
    return normalizing_constant(auk.d) * math.sqrt(math.fsum((auk.auk - 0.5) ** 2))


def classify_level(I_star: float) -> str:
    """Dependence level of a standardized index value.

    Bins are ``[0, .25)`` weak, ``[.25, .5)`` mild, ``[.5, .75)`` strong and
    ``[.75, 1]`` very strong.
    """
    if not 0.0 <= I_star <= 1.0:
        raise DomainError(f"standardized index must lie in [0, 1], got {I_star}")
    for upper, label in LEVELS:
        if I_star < upper:
            return label
    return LEVELS[-1][1]


@dataclass(frozen=True)
class DependenceReport:
    """Index, standardized index and level of one (sub)vector.

    ``exceeds_one`` flags a raw index above 1, which can only occur for a
    finite sample from outside the class where the bound is guaranteed.
    """

    I: float
    I_star: float
    level: str
    auk_vector: AukVector
    phi_provenance: dict

    @property
    def exceeds_one(self) -> bool:
        return self.I > 1.0

    def to_dict(self) -> dict:
        return {
            "I": self.I,
            "I_star": self.I_star,
            "level": self.level,
            "exceeds_one": self.exceeds_one,
            "auk_vector": self.auk_vector.auk.tolist(),
            "phi": self.phi_provenance,
        }


def dependence_report(sample, phi, method: str = "onepass") -> DependenceReport:
    """Compute ``I``, ``I* = phi(I)`` and the level for ``sample``.

    Parameters
    ----------
    sample : Sample or array_like
    phi : StandardizerPhi
        Standardizer for the sample's dimension.
    """
    from .standardize import index_I_star

    sample = as_sample(sample)
    if phi.d != sample.d:
        raise ConfigurationError(f"standardizer is for d={phi.d}, sample has d={sample.d}")
    D = auk_vector(sample, method)
    I = index_I(D)
    I_star = index_I_star(I, phi)
    return DependenceReport(I, I_star, classify_level(I_star), D, phi.provenance_dict())
