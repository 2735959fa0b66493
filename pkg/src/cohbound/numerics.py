"""Dense Hermitian linear algebra for small matrices.

Everything here works on plain ``numpy`` arrays of shape ``(d, d)``.
"""
from typing import NamedTuple

import numpy as np

from .errors import NoConvergence, NotHermitian, NotPSD

HERMITIAN_ATOL = 1e-10
NEGATIVE_CLAMP = 1e-8


class EigenDecomposition(NamedTuple):
    """Eigenvalues sorted descending, eigenvectors stored as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_square_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def check_hermitian(a, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    a = as_square_matrix(a)
    err = np.abs(a - a.conj().T).max()
    if err > atol:
        raise NotHermitian(f"matrix is not Hermitian (max asymmetry {err:.3g})")
    return a


def jacobi_eigh(a, tol: float = 1e-12, max_sweeps: int = 100) -> EigenDecomposition:
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Each 2x2 pivot block is made real by a diagonal phase and then zeroed by
    a plane rotation. Iteration stops once the off-diagonal Frobenius norm is
    below ``tol`` times the Frobenius norm of ``a``.
    """
    a = check_hermitian(a)
    a = 0.5 * (a + a.conj().T)
    d = a.shape[0]
    v = np.eye(d, dtype=np.complex128)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                b = a[p, q]
                mod = abs(b)
                if mod <= 1e-300:
                    continue
                phase = b / mod
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * mod)
                t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    else:
        raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    w = np.diag(a).real
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


def hermitian_eig(a, method: str = "lapack") -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    ``method="lapack"`` uses ``numpy.linalg.eigh``; ``method="jacobi"`` uses
    :func:`jacobi_eigh`. Both check hermiticity to 1e-10.
    """
    if method == "jacobi":
        return jacobi_eigh(a)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    a = check_hermitian(a)
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    return EigenDecomposition(w[::-1].copy(), v[:, ::-1].copy())


def psd_sqrt(a) -> np.ndarray:
    """Principal square root of a PSD matrix.

    Eigenvalues in ``[-1e-8, noise floor]`` are treated as exact zeros; anything
    more negative raises :class:`NotPSD`.
    """
    w, v = hermitian_eig(a)
    if w.min() < -NEGATIVE_CLAMP:
        raise NotPSD(f"matrix has eigenvalue {w.min():.3g} < -{NEGATIVE_CLAMP:g}")
    # eigenvalues at the solver's noise floor are zero; sqrt would blow them up to ~1e-8
    floor = 4 * w.size * np.finfo(float).eps * max(abs(w).max(), 1.0)
    r = (v * np.sqrt(np.where(w > floor, w, 0.0))) @ v.conj().T
    return 0.5 * (r + r.conj().T)


def trace_norm(a) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix (no factor 1/2)."""
    w, _ = hermitian_eig(a)
    return float(np.abs(w).sum())
