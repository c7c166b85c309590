"""Quantum and classical Fisher information.

Symmetric logarithmic derivatives are solved in the eigenbasis of rho. The
quantum Fisher information matrix and the incompatibility factor follow from
them; for pure-state models the quantum geometric tensor gives an independent
route to both.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NotPSD, SingularQfim, SupportMismatch, ZeroProbabilityDerivative
from .linalg import check_hermitian, det2, eig_hermitian, schatten1, sqrt_psd
from .model import PureStateModel, drho, rho

EPS_SUPPORT = 1e-10
TOL_KERNEL = 1e-6
EPS_PROB = 1e-12
TOL_DPROB = 1e-9
TOL_POVM = 1e-9


def sld(rho_, drho_, eps_support=EPS_SUPPORT, tol_kernel=TOL_KERNEL):
    """Symmetric logarithmic derivative L with drho = (L rho + rho L) / 2.

    In the eigenbasis of rho (eigenvalues p) the solution is
    ``L_jk = 2 drho_jk / (p_j + p_k)``. Pairs with ``p_j + p_k`` below
    ``eps_support * max(p)`` are set to zero; if drho has weight there the
    model leaves the support of rho and SupportMismatch is raised.
    """
    p, u = eig_hermitian(rho_)
    d = u.conj().T @ check_hermitian(drho_) @ u
    denom = p[:, None] + p[None, :]
    support = denom > eps_support * max(p[-1], 0.0)
    outside = np.abs(d[~support])
    if outside.size and outside.max() > tol_kernel:
        raise SupportMismatch(
            f"derivative has weight {outside.max():.3g} outside the support of rho"
        )
    l_eig = np.zeros_like(d)
    l_eig[support] = 2 * d[support] / denom[support]
    out = u @ l_eig @ u.conj().T
    return 0.5 * (out + out.conj().T)


def slds(model, theta):
    r = rho(model, theta)
    return [sld(r, drho(model, theta, mu)) for mu in range(model.n_params)]


def qfim(rho_, slds_):
    """QFIM entries ``Re tr(rho L_mu L_nu)``."""
    n = len(slds_)
    f = np.empty((n, n))
    for i in range(n):
        rl = rho_ @ slds_[i]
        for j in range(i, n):
            f[i, j] = f[j, i] = np.trace(rl @ slds_[j]).real
    return f


def qgt(model: PureStateModel, theta):
    """Quantum geometric tensor of a pure-state model (complex Hermitian matrix).

    Its real part is a quarter of the QFIM, its imaginary part is antisymmetric.
    """
    psi = model.psi(theta)
    dpsi = [model.dpsi(theta, mu) for mu in range(model.n_params)]
    overlaps = np.array([np.vdot(d, psi) for d in dpsi])
    n = model.n_params
    q = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            q[i, j] = np.vdot(dpsi[i], dpsi[j]) - overlaps[i] * np.conj(overlaps[j])
    return 0.5 * (q + q.conj().T)


def commutator_norm(rho_, l1, l2):
    """Trace norm of ``sqrt(rho) [L1, L2] sqrt(rho)``."""
    s = sqrt_psd(rho_)
    return schatten1(s @ (l1 @ l2 - l2 @ l1) @ s)


def incompat_gamma(rho_, slds_, qfim_, pair=(0, 1), clamp=True):
    """Incompatibility factor for the parameter pair ``pair``.

    Ratio of the squared trace norm of the sandwiched SLD commutator to four
    times the QFIM determinant. Ranges over [0, 1]; with ``clamp`` the
    round-off excursions just outside are folded back.
    """
    i, j = pair
    f2 = np.asarray(qfim_)[np.ix_(pair, pair)]
    det = det2(f2)
    if not det > 1e-12:
        raise SingularQfim(f"QFIM determinant {det:.3g} is too small")
    g = commutator_norm(rho_, slds_[i], slds_[j]) ** 2 / (4 * det)
    return float(np.clip(g, 0.0, 1.0)) if clamp else float(g)


def gamma_from_qgt(q):
    """Pure-state incompatibility factor ``|Im Q| / |Re Q|`` for a 2x2 QGT."""
    det = det2(q.real)
    if not det > 1e-12 / 16:
        raise SingularQfim(f"Re QGT determinant {det:.3g} is too small")
    return float(det2(q.imag) / det)


def commutator_coefficient(rho_, slds_, qfim_, pair=(0, 1)):
    """``||sqrt(rho)[L_i, L_j]sqrt(rho)||_1 / (2 sqrt(F_ii F_jj))`` used by the IRTR."""
    i, j = pair
    f = np.asarray(qfim_)
    return commutator_norm(rho_, slds_[i], slds_[j]) / (2 * np.sqrt(f[i, i] * f[j, j]))


@dataclass(frozen=True)
class FinitePOVM:
    elements: Sequence[np.ndarray]

    def __post_init__(self):
        els = [check_hermitian(m) for m in self.elements]
        if not els:
            raise ValueError("POVM needs at least one element")
        for m in els:
            if np.linalg.eigvalsh(m)[0] < -TOL_POVM:
                raise NotPSD("POVM element is not positive semidefinite")
        total = sum(els)
        err = np.max(np.abs(total - np.eye(total.shape[0])))
        if err > TOL_POVM:
            raise ValueError(f"POVM elements do not sum to identity (error {err:.3g})")
        object.__setattr__(self, "elements", tuple(els))

    @property
    def dim(self):
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)

    @classmethod
    def projective(cls, basis):
        """Rank-one projectors onto the columns of a unitary matrix."""
        basis = np.asarray(basis, dtype=complex)
        return cls([np.outer(basis[:, k], basis[:, k].conj()) for k in range(basis.shape[1])])

    @classmethod
    def random(cls, dim, n_outcomes, rng):
        """Random POVM: random PSD operators normalized by their sum."""
        raw = []
        for _ in range(n_outcomes):
            g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            raw.append(g @ g.conj().T)
        w, u = np.linalg.eigh(sum(raw))
        s = (u / np.sqrt(w)) @ u.conj().T
        return cls([s @ m @ s for m in raw])


def random_unitary(dim, rng):
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def cfim(model, povm, theta, eps_prob=EPS_PROB, tol_dprob=TOL_DPROB):
    """Classical Fisher information of the outcome distribution ``tr(rho M_x)``.

    Outcomes with vanishing probability contribute nothing if their
    probability derivatives vanish too; otherwise the information is singular
    and ZeroProbabilityDerivative is raised.
    """
    r = rho(model, theta)
    drs = [drho(model, theta, mu) for mu in range(model.n_params)]
    n = model.n_params
    f = np.zeros((n, n))
    for m in povm.elements:
        p = np.trace(r @ m).real
        dp = np.array([np.trace(d @ m).real for d in drs])
        if p < eps_prob:
            if np.max(np.abs(dp)) >= tol_dprob:
                raise ZeroProbabilityDerivative(
                    f"outcome with probability {p:.3g} has derivative {np.max(np.abs(dp)):.3g}"
                )
            continue
        f += np.outer(dp, dp) / p
    return f
