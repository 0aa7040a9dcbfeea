"""Versioned JSON cache of calibration results.

One file holds calibrated standardizers, Monte Carlo ``sigma_Pi`` estimates
and percentile tables.  Every entry carries the parameters that produced it.
Writes go to a temporary file in the same directory followed by an atomic
rename, so readers never see a half-written cache.
"""

from __future__ import annotations

import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import ConfigurationError

__all__ = ["FORMAT_VERSION", "CACHE_ENV", "default_cache_path", "CalibrationCache"]

FORMAT_VERSION = 1
CACHE_ENV = "KENDEP_CACHE"


def default_cache_path() -> Path:
    """``$KENDEP_CACHE`` if set, else ``~/.cache/kendep/calibration.json``."""
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "kendep" / "calibration.json"


class CalibrationCache:
    """Read/write access to a calibration cache file.

    Parameters
    ----------
    path : str or Path, optional
        Cache location; defaults to :func:`default_cache_path`.
    """

    def __init__(self, path=None):
        self.path = Path(path) if path is not None else default_cache_path()
        self.data = self._load()

    def _load(self) -> dict:
        if not self.path.exists():
            return {
                "format_version": FORMAT_VERSION,
                "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                "phi": {},
                "sigma": {},
                "percentiles": {},
            }
        with open(self.path, encoding="utf-8") as fh:
            data = json.load(fh)
        version = data.get("format_version")
        if version != FORMAT_VERSION:
            raise ConfigurationError(
                f"cache {self.path} has format version {version!r}; expected {FORMAT_VERSION}"
            )
        for key in ("phi", "sigma", "percentiles"):
            data.setdefault(key, {})
        return data

    def save(self) -> None:
        """Write the cache atomically."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(self.data, indent=2, sort_keys=True) + "\n"
        fd, tmp = tempfile.mkstemp(prefix=".kendep-", suffix=".json", dir=self.path.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    # -- standardizers ---------------------------------------------------
    def get_phi(self, d: int):
        from .standardize import StandardizerPhi

        entry = self.data["phi"].get(str(d))
        if entry is None:
            return None
        provenance = {k: v for k, v in entry.items() if k not in ("d", "coefficients")}
        return StandardizerPhi(d, np.array(entry["coefficients"]), provenance)

    def put_phi(self, phi) -> None:
        self.data["phi"][str(phi.d)] = phi.provenance_dict()

    # -- sigma -----------------------------------------------------------
    def get_sigma(self, d: int):
        from .independence import SigmaPi

        entry = self.data["sigma"].get(str(d))
        if entry is None:
            return None
        details = {k: v for k, v in entry.items() if k not in ("d", "value", "source")}
        return SigmaPi(d, float(entry["value"]), entry["source"], details)

    def put_sigma(self, sigma) -> None:
        self.data["sigma"][str(sigma.d)] = sigma.to_dict()

    # -- percentiles -----------------------------------------------------
    def get_percentiles(self, d: int, n: int):
        from .independence import CalibrationTable

        entry = self.data["percentiles"].get(f"{d}:{n}")
        return None if entry is None else CalibrationTable.from_dict(entry)

    def put_percentiles(self, table) -> None:
        self.data["percentiles"][f"{table.d}:{table.n}"] = table.to_dict()

    def entry_text(self, section: str, key: str) -> str:
        """Canonical JSON of one entry (used to compare runs byte for byte)."""
        return json.dumps(self.data[section][key], sort_keys=True)
