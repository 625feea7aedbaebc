from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from abgeo.bodies import make_antiblocking

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def dyadic(bits: int = 4, lo: int = 1):
    return st.integers(lo, 2 ** bits).map(lambda k: Fraction(k, 2 ** bits))


@st.composite
def antiblocking(draw, n=None, max_gens=4, max_n=3):
    n = n or draw(st.integers(1, max_n))
    k = draw(st.integers(1, max_gens))
    gens = [tuple(draw(dyadic()) for _ in range(n)) for _ in range(k)]
    return make_antiblocking(n, gens)


@st.composite
def antiblocking_pair(draw, max_n=3):
    n = draw(st.integers(1, max_n))
    return draw(antiblocking(n=n)), draw(antiblocking(n=n))


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(12345)


# acceptance bookkeeping: one summary line per criterion -----------------------

ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


class _Criterion:
    def __init__(self, log: list, label: str, limit_s: float | None):
        self.log, self.label, self.limit_s = log, label, limit_s
        self.notes: list[str] = []

    def note(self, text: str):
        self.notes.append(text)

    def __enter__(self):
        import time
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        import time
        elapsed = time.perf_counter() - self._t0
        ok = exc_type is None and (self.limit_s is None or elapsed < self.limit_s)
        if exc_type is None and not ok:
            self.notes.append(f"over time limit of {self.limit_s:g} s")
        elif exc_type is not None:
            self.notes.append(f"{exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
        limit = f", limit {self.limit_s:g} s" if self.limit_s else ""
        self.log.append(f"{'PASS' if ok else 'FAIL'}  {self.label}  ({elapsed:.1f} s{limit})"
                        + (f"  {'; '.join(self.notes)}" if self.notes else ""))
        if exc_type is None and not ok:
            pytest.fail(f"{self.label} took {elapsed:.1f} s, limit {self.limit_s:g} s")
        return False


@pytest.fixture
def criterion(request):
    """``with criterion("label", limit_s) as c: ...`` records pass/fail and wall time."""
    log = request.config.stash[ACCEPTANCE]
    return lambda label, limit_s=None: _Criterion(log, label, limit_s)


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
