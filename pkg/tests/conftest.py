from functools import lru_cache

import numpy as np
import pytest

from driven_tls.bessel import find_bessel_zero
from driven_tls.interaction import InteractionSpec
from driven_tls.pipeline import prepare, solve

X1 = find_bessel_zero(0, 1)
X2 = find_bessel_zero(0, 2)

CASES = {
    "A": (1.0, 2.0, 0.0),
    "B": (10.0, X1, 0.0),
    "B2": (10.0, X2, 0.0),
    "C": (1.0, 1.0, 0.3),
}


def case_spec(name):
    omega, chi1, chi2 = CASES[name]
    return InteractionSpec.monochromatic(omega, chi1, chi2)


@lru_cache(maxsize=None)
def prepared_case(name, order=None, modes=40):
    return prepare(case_spec(name), order, modes)


@lru_cache(maxsize=None)
def solved(name, eps, order=None, modes=40):
    return solve(case_spec(name), eps, order=order, modes=modes, prepared=prepared_case(name, order, modes))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_CRITERIA = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Print and keep one PASS/FAIL line; returns the verdict for asserting."""
    lines = request.config.stash.setdefault(_CRITERIA, [])

    def report(number, parts):
        ok = all(passed for _, passed in parts)
        detail = "; ".join(f"{'ok' if passed else 'FAIL'} {text}" for text, passed in parts)
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        print(line)
        lines.append(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_CRITERIA, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
