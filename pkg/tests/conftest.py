import itertools

import numpy as np
import pytest
from scipy import special


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion.

    ``criterion(number, title, checks)`` takes ``checks`` as a list of
    ``(description, ok)`` pairs, prints one PASS/FAIL line and fails the test
    when any check fails.  The lines are repeated in the terminal summary.
    """
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def report(number, title, checks):
        failed = [text for text, ok in checks if not ok]
        status = "FAIL" if failed else "PASS"
        detail = "; ".join(failed) if failed else "; ".join(text for text, _ in checks)
        line = f"criterion {number:>2} {status}: {title} ({detail})"
        lines.append((number, line))
        print(line)
        assert not failed, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Point the calibration cache at a per-test file."""
    path = tmp_path / "cache" / "calibration.json"
    monkeypatch.setenv("KENDEP_CACHE", str(path))
    return path


def naive_counts(X):
    """Brute-force include-self dominance counts for every sign pattern.

    Flips the data for each pattern and compares every pair directly,
    sharing no code with the package kernels.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    out = np.empty((n, 2 ** d), dtype=np.int64)
    for p in range(2 ** d):
        signs = np.array([-1.0 if (p >> m) & 1 else 1.0 for m in range(d)])
        Y = X * signs
        for i in range(n):
            out[i, p] = sum(all(Y[j, k] <= Y[i, k] for k in range(d)) for j in range(n))
    return out


def naive_index(X):
    """Index I from the brute-force counts and the incomplete gamma form of K_Pi."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    T = naive_counts(X) / n
    D = special.gammainc(d, -np.log(T)).mean(axis=0)
    c = (2.0 ** (d - 2) - 2.0 ** (1 - d) + 2.0 ** (1 - 2 * d)) ** -0.5
    return c * np.linalg.norm(D - 0.5)


def tied_sample(rng, n, d, levels=4):
    """Sample on a coarse integer grid so that ties are frequent."""
    return rng.integers(0, levels, size=(n, d)).astype(float)


def all_subsets(items, sizes):
    return [c for k in sizes for c in itertools.combinations(items, k)]
