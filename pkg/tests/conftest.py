import os
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from bottchern import catalog  # noqa: E402
from bottchern.algebra import Form, basis  # noqa: E402
from bottchern.scalars import GaussRat  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

COFRAME_NAMES = ["torus2", "torus3", "iwasawa", "kodaira-thurston"]

small_fraction = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
gauss = st.builds(GaussRat, small_fraction, small_fraction)


@st.composite
def forms(draw, n, p, q):
    mons = basis(n, p, q)
    coeffs = draw(st.lists(gauss, min_size=len(mons), max_size=len(mons)))
    return Form(n, dict(zip(mons, coeffs)))


@st.composite
def real_pp_forms(draw, n, p):
    f = draw(forms(n, p, p))
    return f + f.conjugate()


@pytest.fixture(scope="session")
def entries():
    return {name: catalog.load(name) for name in COFRAME_NAMES}


@pytest.fixture(scope="session")
def iwasawa_family():
    return catalog.load_family("iwasawa-family")


def kahler_form(n):
    return sum((Form.monomial(n, (j,), (j,), GaussRat(0, 1)) for j in range(2, n + 1)),
               Form.monomial(n, (1,), (1,), GaussRat(0, 1)))


def hermitian_form(n, entries_):
    """i * sum H_jk phi^j ^ phibar^k with H = A A^* + 1 (positive definite)."""
    A = [entries_[i * n:(i + 1) * n] for i in range(n)]
    H = [[sum((A[j][m] * A[k][m].conjugate() for m in range(n)), GaussRat(int(j == k)))
          for k in range(n)] for j in range(n)]
    out = Form.zero(n, (1, 1))
    for j in range(n):
        for k in range(n):
            out = out + Form.monomial(n, (j + 1,), (k + 1,), H[j][k] * GaussRat(0, 1))
    return out


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
