"""Error-ellipse geometry in a two-dimensional parameter space.

An ellipse is ``{v : (v - c)^T A (v - c) <= kappa^2}`` with ``A`` symmetric
positive definite. The error ellipse of a sample-scaled covariance ``E`` uses
``A = E^{-1}``; the quantum-limited ellipse uses the QFIM itself.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NonConcentric, NotPSD
from .linalg import inverse2


@dataclass(frozen=True)
class Ellipse:
    center: tuple
    A: np.ndarray
    kappa: float = 1.0

    def __post_init__(self):
        a = np.asarray(self.A, dtype=float)
        if a.shape != (2, 2) or not np.allclose(a, a.T, rtol=0, atol=1e-12 * np.max(np.abs(a))):
            raise ValueError("shape matrix must be a symmetric 2x2 matrix")
        if np.linalg.eigvalsh(a)[0] <= 0:
            raise NotPSD("shape matrix must be positive definite")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        object.__setattr__(self, "A", 0.5 * (a + a.T))
        object.__setattr__(self, "center", tuple(float(x) for x in self.center))


@dataclass(frozen=True)
class EllipseMetrics:
    intercepts: tuple
    maxima: tuple
    semi_axes: tuple
    tilt: float

    def to_dict(self):
        return {
            "intercepts": list(self.intercepts),
            "maxima": list(self.maxima),
            "semi_axes": list(self.semi_axes),
            "tilt": self.tilt,
        }


def error_ellipse(E, center=(0.0, 0.0), kappa=1.0):
    return Ellipse(center, inverse2(E), kappa)


def quantum_limited_ellipse(F_q, center=(0.0, 0.0), kappa=1.0):
    return Ellipse(center, np.asarray(F_q, dtype=float), kappa)


def _frame(A):
    """Eigenvalues (ascending) and a right-handed frame whose first column is
    the major axis, oriented so its angle lies in (-pi/2, pi/2]."""
    w, u = np.linalg.eigh(A)
    major = u[:, 0]
    if major[0] < 0 or (major[0] == 0 and major[1] < 0):
        major = -major
    minor = np.array([-major[1], major[0]])
    return w, np.column_stack([major, minor])


def metrics(e):
    A, k = e.A, e.kappa
    inv = inverse2(A)
    w, frame = _frame(A)
    tilt = float(np.arctan2(frame[1, 0], frame[0, 0]))
    return EllipseMetrics(
        intercepts=(k / np.sqrt(A[0, 0]), k / np.sqrt(A[1, 1])),
        maxima=(k * np.sqrt(inv[0, 0]), k * np.sqrt(inv[1, 1])),
        semi_axes=(k / np.sqrt(w[0]), k / np.sqrt(w[1])),
        tilt=tilt,
    )


def contains(outer, inner, tol=1e-10):
    """Whether concentric ``outer`` contains ``inner``."""
    if not np.allclose(outer.center, inner.center, rtol=0, atol=1e-12):
        raise NonConcentric("containment is only defined for concentric ellipses")
    diff = inner.A / inner.kappa**2 - outer.A / outer.kappa**2
    return bool(np.linalg.eigvalsh(diff)[0] >= -tol)


def polyline(e, n_points=256):
    """Closed boundary polyline of ``n_points + 1`` rows.

    Points sit at uniform angle steps in the principal-axis frame, starting
    at the positive end of the major axis.
    """
    if n_points < 4:
        raise ValueError("n_points must be at least 4")
    w, frame = _frame(e.A)
    t = 2 * np.pi * np.arange(n_points + 1) / n_points
    t[-1] = 0.0
    local = np.column_stack([np.cos(t) / np.sqrt(w[0]), np.sin(t) / np.sqrt(w[1])])
    return np.asarray(e.center) + e.kappa * local @ frame.T


def boundary_residual(e, points):
    d = np.asarray(points) - np.asarray(e.center)
    return np.einsum("ij,jk,ik->i", d, e.A, d) - e.kappa**2
