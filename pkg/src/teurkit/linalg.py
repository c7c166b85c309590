"""Small dense linear algebra used by the rest of the package.

Matrices are plain numpy arrays. Hermitian inputs are checked entrywise
against ``TOL_HERM``; 2x2 real symmetric matrices are ``(2, 2)`` float arrays.
"""

import numpy as np

from .errors import NonHermitianInput, NotPSD, SingularMatrix

TOL_HERM = 1e-10
TOL_PSD = 1e-10


def as_matrix(m, dtype=complex):
    a = np.asarray(m, dtype=dtype)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def check_hermitian(m, tol=TOL_HERM):
    a = as_matrix(m)
    err = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if err > tol:
        raise NonHermitianInput(f"matrix is not Hermitian (max |m - m^H| = {err:.3g})")
    return a


def eig_hermitian(m, tol=TOL_HERM):
    """Eigendecomposition ``m = U diag(w) U^H`` with ascending ``w``.

    Raises NonHermitianInput when ``m`` fails the entrywise Hermiticity check.
    """
    a = check_hermitian(m, tol)
    # symmetrize so LAPACK sees an exactly Hermitian matrix
    w, u = np.linalg.eigh(0.5 * (a + a.conj().T))
    return w, u


def sqrt_psd(m, tol=TOL_PSD):
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues in ``[-tol, 0)`` are treated as numerical noise and clamped to
    zero; anything more negative raises NotPSD.
    """
    w, u = eig_hermitian(m)
    if w.size and w[0] < -tol:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3g} < -{tol:g}")
    w = np.sqrt(np.clip(w, 0.0, None))
    return (u * w) @ u.conj().T


def schatten1(m):
    """Trace norm: the sum of singular values of ``m``."""
    a = as_matrix(m)
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def det2(m):
    m = np.asarray(m)
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def sym2(a11, a12, a22):
    return np.array([[a11, a12], [a12, a22]], dtype=float)


def inverse2(m):
    """Inverse of a 2x2 matrix via the adjugate formula."""
    m = np.asarray(m, dtype=float)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    d = det2(m)
    scale = np.max(np.abs(m)) ** 2
    if not abs(d) > 1e-14 * scale:
        raise SingularMatrix(f"2x2 matrix is singular (det = {d:.3g})")
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / d


def rot2(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def scale2(r):
    return np.diag([np.exp(r), np.exp(-r)])


def sym_sqrt2(m, power=0.5):
    """``m**power`` for a real symmetric positive definite matrix."""
    w, u = np.linalg.eigh(0.5 * (m + m.T))
    if w[0] <= 0:
        raise NotPSD(f"matrix is not positive definite (min eigenvalue {w[0]:.3g})")
    return (u * w**power) @ u.T


def is_psd(m, tol=1e-9):
    m = np.asarray(m)
    return bool(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0] >= -tol)
