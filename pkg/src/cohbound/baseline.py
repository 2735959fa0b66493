"""Spectrum-estimation (majorization) lower bound for the relative entropy of coherence.

Used as the comparison method: since the spectrum ``lambda`` of a state
majorizes any projective outcome distribution ``q``, Schur concavity gives
``C_re = H(p) - H(lambda) >= H(p) - H(q)``.
"""
import numpy as np

from .errors import DimensionMismatch
from .numerics import hermitian_eig
from .statistics import shannon_entropy

POSITIVE_THRESHOLD = 1e-9


def majorizes(a, b, atol: float = 1e-12) -> bool:
    """True iff every partial sum of sorted ``a`` dominates the one of sorted ``b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"lengths differ: {a.shape} vs {b.shape}")
    ca = np.cumsum(np.sort(a)[::-1])
    cb = np.cumsum(np.sort(b)[::-1])
    return bool(np.all(ca >= cb - atol))


def spectrum(rho) -> np.ndarray:
    lam = np.clip(hermitian_eig(rho).eigenvalues, 0.0, None)
    return lam / lam.sum()


def spectrum_lower_bound_re(p, q):
    """``max(0, H(p) - H(q))`` in bits; vectorized over leading axes."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape[-1:] != q.shape[-1:]:
        raise DimensionMismatch(f"lengths differ: {p.shape[-1:]} vs {q.shape[-1:]}")
    return np.clip(shannon_entropy(p) - shannon_entropy(q), 0.0, None)
