"""Two-parameter precision tradeoffs.

Evaluates the estimation uncertainty relation

    sqrt(|E F_q - I|) + sqrt((1 - gamma) |E F_q|) >= 1

for a sample-scaled error covariance ``E = n * Cov``, together with the
information-regret tradeoff and the chain of intermediate inequalities that
lead from one to the other through the regular parametrization.

Throughout, ``F`` is a classical and ``F_q`` a quantum Fisher information
matrix, both 2x2.
"""

from dataclasses import asdict, dataclass, field
from typing import List, Tuple

import numpy as np

from . import fisher
from .errors import NegativeDeterminant, NonDiagonalQfim, RegretDomainError, SingularQfim
from .linalg import det2, inverse2, sym_sqrt2
from .model import PureStateModel

TOL_INEQ = 1e-9
TOL_DET = 1e-10
TOL_QCRB = 1e-9
TOL_REGRET = 1e-6
TOL_IDENTITY = 1e-12


def _sqrt_clamped(x, tol=TOL_DET):
    if x < -tol:
        raise NegativeDeterminant(f"determinant {x:.3g} is negative")
    return float(np.sqrt(max(x, 0.0)))


def check_qcrb(E, F_q, tol=TOL_QCRB):
    """Raise NegativeDeterminant unless ``E >= F_q^{-1}`` up to ``tol``."""
    s = sym_sqrt2(np.asarray(F_q, dtype=float))
    w = np.linalg.eigvalsh(s @ E @ s)
    if w[0] < 1 - tol:
        raise NegativeDeterminant(
            f"covariance lies below the quantum Cramer-Rao bound "
            f"(min eigenvalue of F^1/2 E F^1/2 is {w[0]:.6g} < 1)"
        )


def teur_lhs(E, F_q, gamma, check_bound=True):
    """Left-hand side of the uncertainty relation for ``E = n * Cov``.

    With ``check_bound`` off, E is treated as a statistical estimate: it is
    not checked against the QCRB and a negative ``|E F_q - I|`` counts as 0.
    """
    E = np.asarray(E, dtype=float)
    F_q = np.asarray(F_q, dtype=float)
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma!r}")
    if check_bound:
        check_qcrb(E, F_q)
    m = E @ F_q
    gap = det2(m - np.eye(2))
    if not check_bound:
        gap = max(gap, 0.0)
    return _sqrt_clamped(gap) + np.sqrt((1 - gamma) * max(det2(m), 0.0))


def teur_extremal_check(E, F_q, tol=1e-12):
    """``(E11 - 1/F11)(E22 - 1/F22) - E12^2`` for a diagonal QFIM.

    ``E`` already carries the sample factor n. For maximal incompatibility the
    relation holds iff this is at least ``1 / |F_q|``
    (see :func:`teur_extremal_bound`).
    """
    E = np.asarray(E, dtype=float)
    F_q = np.asarray(F_q, dtype=float)
    if abs(F_q[0, 1]) > tol * np.max(np.abs(F_q)) or abs(F_q[1, 0]) > tol * np.max(np.abs(F_q)):
        raise NonDiagonalQfim("extremal form needs a diagonal QFIM")
    return (E[0, 0] - 1 / F_q[0, 0]) * (E[1, 1] - 1 / F_q[1, 1]) - E[0, 1] ** 2


def teur_extremal_bound(F_q):
    return 1.0 / det2(np.asarray(F_q, dtype=float))


def regret_ratios(F, F_q, tol=TOL_REGRET):
    F = np.asarray(F, dtype=float)
    F_q = np.asarray(F_q, dtype=float)
    out = []
    for mu in range(2):
        if F[mu, mu] > F_q[mu, mu] + tol:
            raise RegretDomainError(
                f"classical information {F[mu, mu]:.6g} exceeds quantum {F_q[mu, mu]:.6g}"
            )
        out.append(float(np.sqrt(max(0.0, 1 - F[mu, mu] / F_q[mu, mu]))))
    return tuple(out)


def irtr_check(F, F_q, c):
    """Both sides of ``D1^2 + D2^2 + 2 sqrt(1 - c^2) D1 D2 >= c^2``."""
    d1, d2 = regret_ratios(F, F_q)
    c = float(np.clip(c, 0.0, 1.0))
    lhs = d1**2 + d2**2 + 2 * np.sqrt(1 - c**2) * d1 * d2
    return float(lhs), c**2


def c_from_gamma(F_q, gamma):
    """IRTR coefficient c expressed through gamma and the QFIM."""
    F_q = np.asarray(F_q, dtype=float)
    return float(np.sqrt(gamma * det2(F_q) / (F_q[0, 0] * F_q[1, 1])))


@dataclass(frozen=True)
class RegularParametrization:
    J: np.ndarray
    O: np.ndarray
    F_prime: np.ndarray


def _fix_sign(v):
    return v if v[np.argmax(np.abs(v))] > 0 else -v


def regular_parametrization(F, F_q):
    """Jacobian ``J = F_q^{-1/2} O`` taking F_q to I and F to a diagonal matrix.

    ``O`` holds the eigenvectors of ``F_q^{-1/2} F F_q^{-1/2}`` in ascending
    eigenvalue order, each column signed so its largest-magnitude entry is
    positive.
    """
    F = np.asarray(F, dtype=float)
    F_q = np.asarray(F_q, dtype=float)
    if not det2(F_q) > 1e-12:
        raise SingularQfim(f"QFIM determinant {det2(F_q):.3g} is too small")
    s = sym_sqrt2(F_q, -0.5)
    m = s @ F @ s
    _, o = np.linalg.eigh(0.5 * (m + m.T))
    o = np.column_stack([_fix_sign(o[:, k]) for k in range(2)])
    J = s @ o
    return RegularParametrization(J, o, J.T @ F @ J)


@dataclass
class ChainLink:
    name: str
    lhs: float
    rhs: float
    satisfied: bool


def _link(name, lhs, rhs, tol=TOL_INEQ):
    return ChainLink(name, float(lhs), float(rhs), bool(lhs >= rhs - tol))


def _inverse_or_none(F):
    F = np.asarray(F, dtype=float)
    if abs(det2(F)) <= 1e-12 * max(np.max(np.abs(F)), 1.0) ** 2:
        return None
    return inverse2(F)


def g_identity_residual(G):
    """``tr G - (1 + |G| - |I - G|)``; zero for every 2x2 matrix."""
    G = np.asarray(G, dtype=float)
    return float(np.trace(G) - (1 + det2(G) - det2(np.eye(2) - G)))


def derivation_chain(F, F_q, gamma, tol=TOL_INEQ):
    """Evaluate every inequality linking the IRTR to the uncertainty relation.

    All links are reported in ``lhs >= rhs`` form:

    * ``irtr_regular``: IRTR for the regular parameters,
      ``2 - tr F' + 2 sqrt((1-gamma)(1 - tr F' + |F'|)) >= gamma``
    * ``new_irtr``: same with ``G = F F_q^{-1}``,
      ``2 - gamma >= tr G - 2 sqrt((1-gamma)(1 - tr G + |G|))``
    * ``squared_form``: ``(sqrt(1-gamma) + sqrt(1 - tr G + |G|))^2 >= |G|``
    * ``eur_prior``:
      ``sqrt((1-gamma)|F^-1|) + sqrt(|F^-1 - F_q^-1|) >= sqrt(|F_q^-1|)``
    * ``teur``: the uncertainty relation with ``E = F^-1``
    * ``g_identity``: ``tr G == 1 + |G| - |I - G|``, an equality; satisfied
      when the two sides agree to 1e-12 relative

    A singular F gives an infinite error covariance; the last two links are
    then reported with ``lhs = inf``.
    """
    F = np.asarray(F, dtype=float)
    F_q = np.asarray(F_q, dtype=float)
    regret_ratios(F, F_q)
    g1 = 1.0 - gamma
    links = []

    rp = regular_parametrization(F, F_q)
    fp = rp.F_prime
    reg_gap = max(1 - np.trace(fp) + det2(fp), 0.0)
    links.append(_link("irtr_regular", 2 - np.trace(fp) + 2 * np.sqrt(g1 * reg_gap), gamma, tol))

    G = F @ inverse2(F_q)
    gap = max(1 - np.trace(G) + det2(G), 0.0)
    links.append(_link("new_irtr", 2 - gamma, np.trace(G) - 2 * np.sqrt(g1 * gap), tol))
    links.append(_link("squared_form", (np.sqrt(g1) + np.sqrt(gap)) ** 2, det2(G), tol))
    id_rhs = 1 + det2(G) - det2(np.eye(2) - G)
    id_ok = abs(np.trace(G) - id_rhs) <= TOL_IDENTITY * max(1.0, abs(id_rhs))
    links.append(ChainLink("g_identity", float(np.trace(G)), float(id_rhs), bool(id_ok)))

    iq = inverse2(F_q)
    ic = _inverse_or_none(F)
    if ic is None:
        links.append(_link("eur_prior", np.inf, np.sqrt(det2(iq)), tol))
        links.append(_link("teur", np.inf, 1.0, tol))
    else:
        lhs = np.sqrt(g1 * max(det2(ic), 0.0)) + _sqrt_clamped(det2(ic - iq))
        links.append(_link("eur_prior", lhs, np.sqrt(det2(iq)), tol))
        links.append(_link("teur", teur_lhs(ic, F_q, gamma, check_bound=False), 1.0, tol))
    return links


@dataclass
class TradeoffReport:
    teur_lhs: float
    teur_satisfied: bool
    irtr_lhs: float
    irtr_rhs: float
    gamma: float
    regret: Tuple[float, float]
    c: float
    G: List[List[float]]
    chain: List[ChainLink] = field(default_factory=list)

    def to_dict(self):
        return asdict(self)


def tradeoff_report(E, F_q, gamma, F=None, tol=TOL_INEQ):
    """Full report for error covariance ``E = n * Cov``.

    ``F`` defaults to ``E^{-1}``, the classical information of a measurement
    whose efficient estimator attains E.
    """
    E = np.asarray(E, dtype=float)
    F_q = np.asarray(F_q, dtype=float)
    if F is None:
        F = inverse2(E)
    F = np.asarray(F, dtype=float)
    lhs = teur_lhs(E, F_q, gamma)
    c = c_from_gamma(F_q, gamma)
    irtr_l, irtr_r = irtr_check(F, F_q, c)
    G = F @ inverse2(F_q)
    return TradeoffReport(
        teur_lhs=float(lhs),
        teur_satisfied=bool(lhs >= 1 - tol),
        irtr_lhs=irtr_l,
        irtr_rhs=irtr_r,
        gamma=float(gamma),
        regret=regret_ratios(F, F_q),
        c=c,
        G=G.tolist(),
        chain=derivation_chain(F, F_q, gamma, tol),
    )


@dataclass
class EstimationMetrics:
    qfim: np.ndarray
    gamma: float
    c: float
    qgt: np.ndarray = None
    cfim: np.ndarray = None
    regret: Tuple[float, float] = None
    irtr_lhs: float = None
    irtr_rhs: float = None
    teur_lhs: float = None

    def to_dict(self):
        def enc(x):
            if isinstance(x, np.ndarray):
                if np.iscomplexobj(x):
                    return {"real": x.real.tolist(), "imag": x.imag.tolist()}
                return x.tolist()
            return x

        return {k: enc(v) for k, v in asdict(self).items() if v is not None}


def analyze(model, theta, povm=None):
    """QFIM, gamma and (optionally) measurement-dependent quantities at theta."""
    r = model.rho(theta)
    ls = fisher.slds(model, theta)
    fq = fisher.qfim(r, ls)
    gamma = fisher.incompat_gamma(r, ls, fq)
    m = EstimationMetrics(qfim=fq, gamma=gamma, c=fisher.commutator_coefficient(r, ls, fq))
    if isinstance(model, PureStateModel):
        m.qgt = fisher.qgt(model, theta)
    if povm is not None:
        F = fisher.cfim(model, povm, theta)
        m.cfim = F
        m.regret = regret_ratios(F, fq)
        m.irtr_lhs, m.irtr_rhs = irtr_check(F, fq, m.c)
        inv = _inverse_or_none(F)
        if inv is not None:
            m.teur_lhs = float(teur_lhs(inv, fq, gamma, check_bound=False))
    return m
