"""Phase-space displacement estimation with squeezed light.

The probe is ``D(alpha) S(zeta)|0>`` with ``zeta = r e^{i phi}`` and the
unknowns are ``(Re alpha, Im alpha)``. The joint measurement of
``A = Q - Q'`` and ``B = P + P'`` uses an ancilla in squeezed vacuum
``S(r_anc e^{i phi_anc})|0>``. Quadratures are ``Q = (a + a^dag)/2`` and
``P = (a - a^dag)/(2i)``, so vacuum variances are 1/4.

All covariances here are sample-scaled (``n * Cov`` of the sample-mean
estimator).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from itertools import product

import numpy as np

from .errors import ConfigError
from .linalg import det2, rot2, scale2
from .tradeoff import teur_lhs

GAMMA = 1.0
SWEEP_HEADER = ("r", "phi", "r_anc", "phi_anc", "n", "E11", "E12", "E22", "teur_lhs", "area")
SWEEP_PARAMS = ("r", "phi", "r_anc", "phi_anc", "n")


@dataclass(frozen=True)
class GaussianScheme:
    r: float = 0.0
    phi: float = 0.0
    alpha: complex = 0j
    r_anc: float = 0.0
    phi_anc: float = 0.0
    n: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"sample count n must be a positive integer, got {self.n!r}")
        vals = (self.r, self.phi, self.alpha, self.r_anc, self.phi_anc)
        if not all(np.isfinite(v) for v in vals):
            raise ConfigError("scheme parameters must be finite")
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "n", int(self.n))

    @property
    def theta(self):
        return np.array([self.alpha.real, self.alpha.imag])

    def to_dict(self):
        d = asdict(self)
        d["alpha"] = [self.alpha.real, self.alpha.imag]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        a = d.pop("alpha", 0j)
        if isinstance(a, (list, tuple)):
            a = complex(a[0], a[1])
        try:
            return cls(alpha=complex(a), **d)
        except TypeError as exc:
            raise ConfigError(f"bad scheme fields: {exc}") from exc


def _rcr(angle, r):
    rot = rot2(angle)
    return rot @ scale2(r) @ rot.T


def qfim_displacement(r, phi):
    """QFIM for ``(Re alpha, Im alpha)``: ``4 R(phi/2) C(2r) R(phi/2)^T``."""
    ch, sh = np.cosh(2 * r), np.sinh(2 * r)
    return 4 * np.array(
        [[ch + np.cos(phi) * sh, np.sin(phi) * sh], [np.sin(phi) * sh, ch - np.cos(phi) * sh]]
    )


def system_cov(r, phi):
    """Quadrature covariance of the probe, ``R(phi/2) C(-2r) R(phi/2)^T / 4``."""
    return 0.25 * _rcr(phi / 2, -2 * r)


def ancilla_cov(r_anc, phi_anc):
    """Covariance of ``(-Q', P')`` for a squeezed-vacuum ancilla."""
    return 0.25 * _rcr(-phi_anc / 2, -2 * r_anc)


def joint_cov(scheme):
    """Sample-scaled covariance of the sample-mean estimates of ``(A, B)``."""
    return system_cov(scheme.r, scheme.phi) + ancilla_cov(scheme.r_anc, scheme.phi_anc)


def error_area(scheme):
    return float(np.sqrt(det2(joint_cov(scheme))))


def beta_of_alpha(alpha, zeta):
    """Coherent amplitude beta with ``D(alpha)S(zeta)|0> = S(zeta)D(beta)|0>``."""
    r, phi = abs(zeta), np.angle(zeta)
    return alpha * np.cosh(r) + np.conj(alpha) * np.exp(1j * phi) * np.sinh(r)


def beta_jacobian(r, phi):
    """d(Re beta, Im beta) / d(Re alpha, Im alpha) = R(phi/2) C(r) R(phi/2)^T."""
    return _rcr(phi / 2, r)


def heisenberg_quadratures(r, phi, alpha):
    """Affine map taking vacuum quadratures to those of the displaced squeezed state."""
    alpha = complex(alpha)
    return _rcr(phi / 2, -r), np.array([alpha.real, alpha.imag])


@dataclass
class MeasurementRecord:
    samples: np.ndarray
    seed: int


@dataclass
class EstimateSummary:
    mean: np.ndarray
    sample_cov: np.ndarray
    n_trials: int

    def to_dict(self):
        return {
            "mean": [float(x) for x in self.mean],
            "sample_cov": np.asarray(self.sample_cov, dtype=float).tolist(),
            "n_trials": int(self.n_trials),
        }


def _trial_rng(seed, trial):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def measurement_record(scheme, seed, trial=0):
    """Raw ``(A, B)`` outcomes of one experiment of ``scheme.n`` samples.

    Outcomes are bivariate normal with mean ``(Re alpha, Im alpha)`` and
    covariance :func:`joint_cov`; each trial index has its own random stream.
    """
    chol = np.linalg.cholesky(joint_cov(scheme))
    z = _trial_rng(seed, trial).standard_normal((scheme.n, 2))
    return MeasurementRecord(scheme.theta + z @ chol.T, seed)


def _trial_means(scheme, seed, trials, chol):
    out = np.empty((len(trials), 2))
    for k, t in enumerate(trials):
        z = _trial_rng(seed, t).standard_normal((scheme.n, 2))
        out[k] = scheme.theta + z.mean(axis=0) @ chol.T
    return out


def simulate(scheme, n_trials, seed, workers=1):
    """Repeat the sample-mean experiment ``n_trials`` times.

    Returns the average estimate and ``n`` times the empirical covariance of
    the per-trial estimates. Trial ``t`` always draws from the stream
    ``(seed, t)``, so the result does not depend on ``workers``.
    """
    if n_trials < 1:
        raise ConfigError("n_trials must be at least 1")
    chol = np.linalg.cholesky(joint_cov(scheme))
    trials = np.arange(n_trials)
    if workers > 1:
        chunks = np.array_split(trials, workers)
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda c: _trial_means(scheme, seed, c, chol), chunks))
        means = np.concatenate(parts)
    else:
        means = _trial_means(scheme, seed, trials, chol)
    if n_trials > 1:
        cov = scheme.n * np.cov(means, rowvar=False, ddof=1)
    else:
        cov = np.zeros((2, 2))
    return EstimateSummary(means.mean(axis=0), cov, n_trials)


def grid_schemes(base, grid):
    """Yield ``(params, scheme)`` over a grid of scheme fields.

    ``grid`` is an ordered list of ``(name, values)``; points run row-major
    with the first entry outermost.
    """
    if not grid or any(len(v) == 0 for _, v in grid):
        raise ConfigError("sweep grid is empty")
    names = [name for name, _ in grid]
    for name in names:
        if name not in SWEEP_PARAMS:
            raise ConfigError(f"cannot sweep {name!r}; choose from {SWEEP_PARAMS}")
    for values in product(*(v for _, v in grid)):
        params = dict(zip(names, values))
        yield params, GaussianScheme.from_dict({**base.to_dict(), **params})


def sweep(base, grid):
    """Closed-form rows (see ``SWEEP_HEADER``) over a grid of scheme fields."""
    rows = []
    for _, s in grid_schemes(base, grid):
        e = joint_cov(s)
        lhs = teur_lhs(e, qfim_displacement(s.r, s.phi), GAMMA)
        area = np.sqrt(det2(e))
        rows.append((s.r, s.phi, s.r_anc, s.phi_anc, s.n, e[0, 0], e[0, 1], e[1, 1], lhs, area))
    return rows
