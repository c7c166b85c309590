import sys

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (g + g.conj().T)


def random_psd(rng, dim, rank=None):
    g = rng.normal(size=(dim, rank or dim)) + 1j * rng.normal(size=(dim, rank or dim))
    return g @ g.conj().T


def random_spd2(rng, scale=1.0):
    g = rng.normal(size=(2, 2)) * scale
    return g @ g.T + 0.1 * scale**2 * np.eye(2)


def random_information(rng, dim=None, n_outcomes=None):
    """(CFIM, QFIM, gamma) of a random pure-state model and random POVM."""
    from teurkit import fisher
    from teurkit.model import random_pure_model

    dim = dim or int(rng.integers(2, 4))
    n_outcomes = n_outcomes or int(rng.integers(3, 7))
    m = random_pure_model(dim, rng)
    theta = np.zeros(2)
    r = m.rho(theta)
    ls = fisher.slds(m, theta)
    fq = fisher.qfim(r, ls)
    g = fisher.incompat_gamma(r, ls, fq)
    povm = fisher.FinitePOVM.random(dim, n_outcomes, rng)
    return fisher.cfim(m, povm, theta), fq, g


def random_pair(rng):
    """Random SPD QFIM and a classical matrix F with 0 <= F <= QFIM."""
    from teurkit.linalg import sym_sqrt2

    fq = random_spd2(rng, scale=rng.uniform(0.5, 3))
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)))
    b = q @ np.diag(rng.uniform(0, 1, 2)) @ q.T
    s = sym_sqrt2(fq)
    return s @ b @ s, fq


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
