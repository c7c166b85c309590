"""Parametric quantum statistical models ``theta -> rho_theta``.

Two flavours are provided: :class:`ParametricModel` for density operators and
:class:`PureStateModel` for state vectors. Derivatives are either supplied
analytically (one callable per parameter) or taken by central differences
with step ``h``.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError, ModelEvaluationError, TruncationError, UnknownModel
from .linalg import check_hermitian

FD_STEP = 1e-5
TOL_TRACE = 1e-9
TOL_PSD = 1e-9
TOL_NORM = 1e-10
LEAKAGE_BOUND = 1e-5

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _central_difference(fn, theta, mu, h):
    tp = np.array(theta, dtype=float)
    tm = tp.copy()
    tp[mu] += h
    tm[mu] -= h
    return (np.asarray(fn(tp)) - np.asarray(fn(tm))) / (2 * h)


def _check_theta(theta, n_params):
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (n_params,):
        raise ConfigError(f"theta must have length {n_params}, got shape {theta.shape}")
    return theta


def _check_index(mu, n_params):
    if not 0 <= mu < n_params:
        raise ConfigError(f"parameter index {mu} out of range for {n_params} parameters")


@dataclass(frozen=True)
class ParametricModel:
    """Map from a real parameter vector to a density matrix.

    If ``derivatives`` is given it must hold one callable per parameter
    returning ``d rho / d theta_mu``; otherwise central differences with step
    ``h`` are used.
    """

    dim: int
    n_params: int
    state_fn: Callable[[np.ndarray], np.ndarray]
    derivatives: Optional[Sequence[Callable[[np.ndarray], np.ndarray]]] = None
    h: float = FD_STEP
    name: str = ""

    def __post_init__(self):
        if self.n_params < 1:
            raise ConfigError("n_params must be positive")
        if self.derivatives is not None and len(self.derivatives) != self.n_params:
            raise ConfigError("need exactly one derivative per parameter")

    @property
    def analytic(self):
        return self.derivatives is not None

    def rho(self, theta):
        return rho(self, theta)

    def drho(self, theta, mu):
        return drho(self, theta, mu)

    def drhos(self, theta):
        return [drho(self, theta, mu) for mu in range(self.n_params)]


@dataclass(frozen=True)
class PureStateModel:
    """Map from a real parameter vector to a normalized state vector."""

    dim: int
    n_params: int
    state_fn: Callable[[np.ndarray], np.ndarray]
    derivatives: Optional[Sequence[Callable[[np.ndarray], np.ndarray]]] = None
    h: float = FD_STEP
    name: str = ""

    def __post_init__(self):
        if self.derivatives is not None and len(self.derivatives) != self.n_params:
            raise ConfigError("need exactly one derivative per parameter")

    @property
    def analytic(self):
        return self.derivatives is not None

    def psi(self, theta):
        theta = _check_theta(theta, self.n_params)
        v = np.asarray(self.state_fn(theta), dtype=complex)
        if v.shape != (self.dim,):
            raise ModelEvaluationError(f"state has shape {v.shape}, expected ({self.dim},)")
        norm = np.linalg.norm(v)
        if abs(norm - 1) > TOL_NORM:
            raise ModelEvaluationError(f"state is not normalized (norm = {norm!r})")
        return v

    def dpsi(self, theta, mu):
        theta = _check_theta(theta, self.n_params)
        _check_index(mu, self.n_params)
        if self.derivatives is not None:
            return np.asarray(self.derivatives[mu](theta), dtype=complex)
        return _central_difference(self.psi, theta, mu, self.h)

    def rho(self, theta):
        v = self.psi(theta)
        return np.outer(v, v.conj())

    def drho(self, theta, mu):
        if self.derivatives is None:
            # differentiate the projector itself; this also removes any
            # theta-dependent global phase of the vector
            theta = _check_theta(theta, self.n_params)
            _check_index(mu, self.n_params)
            d = _central_difference(self.rho, theta, mu, self.h)
            return 0.5 * (d + d.conj().T)
        v = self.psi(theta)
        dv = self.dpsi(theta, mu)
        d = np.outer(dv, v.conj())
        return d + d.conj().T

    def drhos(self, theta):
        return [self.drho(theta, mu) for mu in range(self.n_params)]

    def as_density(self):
        derivs = None
        if self.derivatives is not None:
            derivs = [lambda t, mu=mu: self.drho(t, mu) for mu in range(self.n_params)]
        return ParametricModel(self.dim, self.n_params, self.rho, derivs, self.h, self.name)


def rho(model, theta):
    """Evaluate the density matrix and check it is a valid state."""
    if isinstance(model, PureStateModel):
        return model.rho(theta)
    theta = _check_theta(theta, model.n_params)
    r = np.asarray(model.state_fn(theta), dtype=complex)
    if r.shape != (model.dim, model.dim):
        raise ModelEvaluationError(f"state has shape {r.shape}, expected {(model.dim, model.dim)}")
    try:
        check_hermitian(r)
    except ArithmeticError as exc:
        raise ModelEvaluationError(str(exc)) from exc
    tr = np.trace(r).real
    if abs(tr - 1) > TOL_TRACE:
        raise ModelEvaluationError(f"trace is {tr!r}, expected 1")
    wmin = np.linalg.eigvalsh(0.5 * (r + r.conj().T))[0]
    if wmin < -TOL_PSD:
        raise ModelEvaluationError(f"state has negative eigenvalue {wmin:.3g}")
    return r


def drho(model, theta, mu):
    if isinstance(model, PureStateModel):
        return model.drho(theta, mu)
    theta = _check_theta(theta, model.n_params)
    _check_index(mu, model.n_params)
    if model.derivatives is not None:
        d = np.asarray(model.derivatives[mu](theta), dtype=complex)
    else:
        d = _central_difference(lambda t: rho(model, t), theta, mu, model.h)
    return 0.5 * (d + d.conj().T)


# ---------------------------------------------------------------------------
# Fock-space displaced squeezed states


@dataclass(frozen=True)
class FockTruncation:
    """Fock cutoff; states losing more than ``leakage_bound`` of their norm
    beyond level ``n_max`` are rejected rather than silently truncated."""

    n_max: int = 60
    leakage_bound: float = LEAKAGE_BOUND

    @property
    def dim(self):
        return self.n_max + 1


def _ladder_amplitudes(alpha, zeta, n_max):
    """Fock amplitudes of D(alpha) S(zeta)|0> and their derivatives.

    The state is the eigenvector of ``a cosh r + a^dag e^{i phi} sinh r`` with
    eigenvalue ``beta``, which gives a three-term recursion in n. Returns the
    amplitudes and their derivatives with respect to Re(alpha) and Im(alpha).
    """
    r, phi = abs(zeta), np.angle(zeta)
    ch, sh, th = np.cosh(r), np.sinh(r), np.tanh(r)
    eph = np.exp(1j * phi)
    ac = np.conj(alpha)
    beta = alpha * ch + ac * eph * sh
    dbeta = (ch + eph * sh, 1j * ch - 1j * eph * sh)
    # d|alpha|^2 and d(conj(alpha)^2) for Re and Im directions
    dabs2 = (2 * alpha.real, 2 * alpha.imag)
    dac2 = (2 * ac, -2j * ac)

    c = np.zeros(n_max + 1, dtype=complex)
    dc = np.zeros((2, n_max + 1), dtype=complex)
    c[0] = np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * ac**2 * eph * th) / np.sqrt(ch)
    for k in range(2):
        dc[k, 0] = c[0] * (-0.5 * dabs2[k] - 0.5 * dac2[k] * eph * th)
    sq = np.sqrt(np.arange(n_max + 2))
    for n in range(n_max):
        prev = c[n - 1] if n else 0.0
        c[n + 1] = (beta * c[n] - eph * sh * sq[n] * prev) / (ch * sq[n + 1])
        for k in range(2):
            dprev = dc[k, n - 1] if n else 0.0
            dc[k, n + 1] = (
                dbeta[k] * c[n] + beta * dc[k, n] - eph * sh * sq[n] * dprev
            ) / (ch * sq[n + 1])
    return c, dc


def _check_leakage(c, trunc):
    leak = 1.0 - float(np.vdot(c, c).real)
    if leak > trunc.leakage_bound:
        raise TruncationError(
            f"Fock truncation at n_max={trunc.n_max} leaks {leak:.3g} of the norm "
            f"(bound {trunc.leakage_bound:g}); raise n_max"
        )
    return leak


def truncation_leakage(alpha, zeta, trunc=FockTruncation()):
    c, _ = _ladder_amplitudes(complex(alpha), complex(zeta), trunc.n_max)
    return 1.0 - float(np.vdot(c, c).real)


def displaced_squeezed_state(alpha, zeta, trunc=FockTruncation()):
    """Normalized Fock amplitudes of ``D(alpha) S(zeta)|0>``.

    Raises TruncationError if the norm outside the first ``n_max + 1`` levels
    exceeds ``LEAKAGE_BOUND``.
    """
    c, _ = _ladder_amplitudes(complex(alpha), complex(zeta), trunc.n_max)
    _check_leakage(c, trunc)
    return c / np.linalg.norm(c)


def displacement_estimation(
    r=0.0, phi=0.0, n_max=60, analytic=True, h=FD_STEP, leakage_bound=LEAKAGE_BOUND
):
    """Pure-state model with ``theta = (Re alpha, Im alpha)``.

    With ``analytic=False`` the state derivatives come from central
    differences instead of the differentiated recursion.
    """
    trunc = FockTruncation(int(n_max), leakage_bound)
    zeta = complex(r * np.exp(1j * phi))

    def amplitudes(theta):
        c, dc = _ladder_amplitudes(complex(theta[0], theta[1]), zeta, trunc.n_max)
        _check_leakage(c, trunc)
        return c, dc

    def state(theta):
        c, _ = amplitudes(theta)
        return c / np.linalg.norm(c)

    def derivative(mu):
        def fn(theta):
            c, dc = amplitudes(theta)
            norm = np.linalg.norm(c)
            # d(c/|c|) = dc/|c| - c Re<c|dc>/|c|^3
            return dc[mu] / norm - c * np.vdot(c, dc[mu]).real / norm**3

        return fn

    derivs = [derivative(0), derivative(1)] if analytic else None
    return PureStateModel(trunc.dim, 2, state, derivs, h, "displacement_estimation")


def pure_qubit_bloch(h=FD_STEP):
    """``|psi> = (cos(t1/2), e^{i t2} sin(t1/2))``."""

    def state(t):
        return np.array([np.cos(t[0] / 2), np.exp(1j * t[1]) * np.sin(t[0] / 2)])

    derivs = [
        lambda t: np.array([-0.5 * np.sin(t[0] / 2), 0.5 * np.exp(1j * t[1]) * np.cos(t[0] / 2)]),
        lambda t: np.array([0.0, 1j * np.exp(1j * t[1]) * np.sin(t[0] / 2)]),
    ]
    return PureStateModel(2, 2, state, derivs, h, "pure_qubit_bloch")


def mixed_qubit_bloch(analytic=True, h=FD_STEP):
    """``rho = (I + t1 sigma_x + t2 sigma_y) / 2`` on the open unit disk."""
    eye = np.eye(2, dtype=complex)

    def state(t):
        return 0.5 * (eye + t[0] * SIGMA_X + t[1] * SIGMA_Y)

    derivs = [lambda t: 0.5 * SIGMA_X, lambda t: 0.5 * SIGMA_Y] if analytic else None
    return ParametricModel(2, 2, state, derivs, h, "mixed_qubit_bloch")


def diagonal_qutrit(analytic=True, h=FD_STEP):
    """Classical model ``rho = diag(t1, t2, 1 - t1 - t2)``; its SLDs commute."""

    def state(t):
        return np.diag([t[0], t[1], 1 - t[0] - t[1]]).astype(complex)

    derivs = None
    if analytic:
        derivs = [
            lambda t: np.diag([1.0, 0.0, -1.0]).astype(complex),
            lambda t: np.diag([0.0, 1.0, -1.0]).astype(complex),
        ]
    return ParametricModel(3, 2, state, derivs, h, "diagonal_qutrit")


def linear_pure(psi0, directions, h=FD_STEP):
    """``|psi(theta)> = normalize(psi0 + sum_mu theta_mu v_mu)``.

    A cheap family with exact derivatives everywhere, used to draw random
    pure-state models of any dimension.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    vs = [np.asarray(v, dtype=complex) for v in directions]

    def raw(t):
        return psi0 + sum(tk * v for tk, v in zip(t, vs))

    def state(t):
        u = raw(t)
        return u / np.linalg.norm(u)

    def derivative(mu):
        def fn(t):
            u = raw(t)
            norm = np.linalg.norm(u)
            return vs[mu] / norm - u * np.vdot(u, vs[mu]).real / norm**3

        return fn

    return PureStateModel(
        psi0.size, len(vs), state, [derivative(mu) for mu in range(len(vs))], h, "linear_pure"
    )


def random_pure_model(dim, rng, n_params=2):
    """Random :func:`linear_pure` model, meant to be evaluated at theta = 0."""

    def cvec():
        return rng.normal(size=dim) + 1j * rng.normal(size=dim)

    psi0 = cvec()
    psi0 /= np.linalg.norm(psi0)
    return linear_pure(psi0, [cvec() for _ in range(n_params)])


_CATALOG = {
    "pure_qubit_bloch": pure_qubit_bloch,
    "mixed_qubit_bloch": mixed_qubit_bloch,
    "diagonal_qutrit": diagonal_qutrit,
    "displacement_estimation": displacement_estimation,
}


def builtin_models():
    """Name -> constructor mapping of the bundled models."""
    return dict(_CATALOG)


def make_model(name, **params):
    try:
        ctor = _CATALOG[name]
    except KeyError:
        raise UnknownModel(f"unknown model {name!r}; choose from {sorted(_CATALOG)}") from None
    try:
        return ctor(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for model {name!r}: {exc}") from exc

