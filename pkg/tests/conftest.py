import functools

import numpy as np
import pytest
from hypothesis import settings

from bulkedge.hamiltonians import build_model
from bulkedge.lattice import TorusWindow
from bulkedge.spectral import eig_hermitian, spectral_projector

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE: dict = {}


@functools.lru_cache(maxsize=8)
def bulk_projector(kind: str, s: float, n: int):
    """Fermi projector at 0 of a bulk model on the n x n torus (cached)."""
    w = TorusWindow(n)
    H = build_model(kind, s).matrix(w)
    sd = eig_hermitian(H)
    return w, H, sd, spectral_projector(sd, 0.0)


@pytest.fixture(scope="session")
def hplus24():
    return bulk_projector("haldane_plus", 0.5, 24)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split(".")[0]), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
