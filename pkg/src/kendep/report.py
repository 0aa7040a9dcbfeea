"""Analysis reports and the JSON document format shared by all commands."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .cache import CalibrationCache
from .errors import ConfigurationError
from .kendall_core import Sample, kendall_tau_pairwise
from .orthant import dependence_report
from .standardize import StandardizerPhi, calibrate_phi, phi_builtin

__all__ = [
    "SCHEMA_VERSION",
    "SubvectorResult",
    "AnalysisReport",
    "resolve_phi",
    "subsets",
    "analyze",
    "document",
    "dump_document",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SubvectorResult:
    columns: tuple
    I: float
    I_star: float
    level: str
    exceeds_one: bool
    tau: float | None = None

    def to_dict(self) -> dict:
        out = {
            "columns": list(self.columns),
            "I": self.I,
            "I_star": self.I_star,
            "level": self.level,
            "exceeds_one": self.exceeds_one,
        }
        if self.tau is not None:
            out["tau"] = self.tau
        return out


@dataclass
class AnalysisReport:
    """Results for a data set together with everything needed to rerun them.

    ``phi`` maps a dimension to the provenance of the standardizer used for
    every ``I*`` of that dimension.
    """

    dataset: dict
    subvectors: list = field(default_factory=list)
    test: dict | None = None
    phi: dict = field(default_factory=dict)

    def results(self) -> dict:
        out = {"subvectors": [s.to_dict() for s in self.subvectors]}
        if self.test is not None:
            out["test"] = self.test
        return out


def resolve_phi(d: int, cache: CalibrationCache | None = None, allow_calibration: bool = True,
                seed: int = 0) -> StandardizerPhi:
    """Built-in for ``d <= 3``, else the cached fit, else a fresh calibration.

    A fresh calibration is stored in ``cache`` when one is given.
    """
    if d <= 3:
        return phi_builtin(d)
    if cache is not None:
        phi = cache.get_phi(d)
        if phi is not None:
            return phi
    if not allow_calibration:
        raise ConfigurationError(
            f"no standardizer for d={d} in the cache and calibration is disabled; "
            f"run 'kendep calibrate --d {d}' first"
        )
    phi = calibrate_phi(d, seed=seed)
    if cache is not None:
        cache.put_phi(phi)
        cache.save()
    return phi


def subsets(columns, mode: str) -> list:
    """Column subsets for ``mode`` in ``{"full", "pairs", "triples", "all"}``."""
    columns = tuple(columns)
    d = len(columns)
    sizes = {"full": [d], "pairs": [2], "triples": [3], "all": range(2, d + 1)}.get(mode)
    if sizes is None:
        raise ConfigurationError(f"unknown subset mode {mode!r}")
    return [c for k in sizes if k <= d for c in itertools.combinations(columns, k)]


def analyze(sample: Sample, subsets_mode: str = "full", cache=None, allow_calibration: bool = True,
            seed: int = 0, dataset: dict | None = None) -> AnalysisReport:
    """Index, standardized index and level for every requested subvector."""
    report = AnalysisReport(dataset or {"n": sample.n, "columns": list(sample.columns)})
    for cols in subsets(sample.columns, subsets_mode):
        sub = sample.select(list(cols))
        phi = resolve_phi(sub.d, cache, allow_calibration, seed)
        report.phi.setdefault(str(sub.d), phi.provenance_dict())
        dep = dependence_report(sub, phi)
        tau = kendall_tau_pairwise(sub) if sub.d == 2 else None
        report.subvectors.append(SubvectorResult(cols, dep.I, dep.I_star, dep.level, dep.exceeds_one, tau))
    return report


def document(command: str, inputs: dict, provenance: dict, results: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "kendep_version": __version__,
        "inputs": inputs,
        "provenance": provenance,
        "results": results,
    }


def _default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_document(doc: dict, path=None) -> str:
    """Serialize ``doc``; write it to ``path`` when given.  Returns the text."""
    text = json.dumps(doc, indent=2, sort_keys=True, default=_default) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
