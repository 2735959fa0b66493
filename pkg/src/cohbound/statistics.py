"""Born-rule statistics and the classical functionals used by the bounds.

The functionals accept arrays whose *last* axis indexes outcomes, so they
work equally on a single distribution and on a grid of them. Entropies are
in bits.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidDistribution
from .states import computational_basis

CLAMP_ATOL = 1e-12
SUM_ATOL = 1e-9
LN2 = np.log(2.0)


def as_prob_dist(p, atol: float = SUM_ATOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise InvalidDistribution(f"expected a 1-d probability vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise InvalidDistribution("distribution has non-finite entries")
    if p.min() < -CLAMP_ATOL:
        raise InvalidDistribution(f"negative probability {p.min():.3g}")
    p = np.clip(p, 0.0, None)
    if abs(p.sum() - 1.0) > atol:
        raise InvalidDistribution(f"probabilities sum to {p.sum()!r}")
    return p


def normalize_counts(p, atol: float = 1e-6) -> np.ndarray:
    """Ingest measured frequencies: renormalize (with a warning) when off by more than ``atol``."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 1 or not np.all(np.isfinite(p)):
        raise InvalidDistribution("expected a finite 1-d vector of probabilities")
    if p.min() < -CLAMP_ATOL:
        raise InvalidDistribution(f"negative probability {p.min():.3g}")
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if total <= 0:
        raise InvalidDistribution("probabilities sum to zero")
    if abs(total - 1.0) > atol:
        warnings.warn(f"distribution sums to {total:.9g}; renormalizing", stacklevel=2)
    return p / total


def _same_shape(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1:] != b.shape[-1:]:
        raise DimensionMismatch(f"distribution lengths differ: {a.shape[-1:]} vs {b.shape[-1:]}")
    return a, b


def born(rho, basis) -> np.ndarray:
    """Outcome probabilities ``<b_j|rho|b_j>`` for the columns ``b_j`` of ``basis``."""
    rho = np.asarray(rho, dtype=np.complex128)
    basis = np.asarray(basis, dtype=np.complex128)
    if rho.shape[0] != basis.shape[0]:
        raise DimensionMismatch(f"state dim {rho.shape[0]} vs basis dim {basis.shape[0]}")
    q = np.einsum("ij,ik,kj->j", basis.conj(), rho, basis)
    if np.abs(q.imag).max() > 1e-10:
        raise ValueError("Born probabilities have a large imaginary part; is rho Hermitian?")
    q = q.real
    q[(q < 0) & (q >= -CLAMP_ATOL)] = 0.0
    return q


def overlap_matrix(ref, test) -> np.ndarray:
    """``c[i, j] = |<i|b_j>|^2`` between reference and test bases."""
    ref = np.asarray(ref, dtype=np.complex128)
    test = np.asarray(test, dtype=np.complex128)
    if ref.shape != test.shape:
        raise DimensionMismatch(f"basis shapes differ: {ref.shape} vs {test.shape}")
    return np.abs(ref.conj().T @ test) ** 2


def post_measurement_dist(p, c) -> np.ndarray:
    """Test statistics on the dephased state, computed classically: ``q'_j = sum_i c_ij p_i``."""
    p = np.asarray(p, dtype=float)
    c = np.asarray(c, dtype=float)
    if c.shape != (p.shape[-1], p.shape[-1]):
        raise DimensionMismatch(f"overlap matrix {c.shape} does not match length {p.shape[-1]}")
    return p @ c


@dataclass(frozen=True)
class StatisticsTriple:
    """Reference statistics ``p``, test statistics ``q`` on the state, ``qprime`` on its dephasing."""

    p: np.ndarray
    q: np.ndarray
    qprime: np.ndarray

    def __post_init__(self):
        n = {len(self.p), len(self.q), len(self.qprime)}
        if len(n) != 1:
            raise DimensionMismatch(f"triple has unequal lengths {sorted(n)}")

    @classmethod
    def validated(cls, p, q, qprime, atol: float = SUM_ATOL):
        return cls(as_prob_dist(p, atol), as_prob_dist(q, atol), as_prob_dist(qprime, atol))

    @property
    def dim(self) -> int:
        return len(self.p)


def measurement_statistics(rho, test, ref=None) -> StatisticsTriple:
    """Simulate the two-measurement scheme: ``p`` from ``ref``, ``q`` from ``test``, ``q'`` from both."""
    rho = np.asarray(rho, dtype=np.complex128)
    ref = computational_basis(rho.shape[0]) if ref is None else ref
    p = born(rho, ref)
    q = born(rho, test)
    qprime = post_measurement_dist(p, overlap_matrix(ref, test))
    return StatisticsTriple(p, q, qprime)


def _xlogx(p):
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(p > 0, p * np.log(p), 0.0)


def shannon_entropy(p):
    """Shannon entropy in bits, with ``0 log 0 = 0``."""
    h = -_xlogx(p).sum(axis=-1) / LN2
    return np.maximum(h, 0.0)


def relative_entropy(q, q2):
    """Classical relative entropy ``H(q||q2)`` in bits; ``inf`` when supp(q) is not inside supp(q2)."""
    q, q2 = _same_shape(q, q2)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        terms = np.where(q > 0, q * np.log(q / q2), 0.0)
    return np.maximum(terms.sum(axis=-1) / LN2, 0.0)


def kolmogorov(q, q2):
    q, q2 = _same_shape(q, q2)
    return 0.5 * np.abs(q - q2).sum(axis=-1)


def l2_dist_sq(q, q2):
    q, q2 = _same_shape(q, q2)
    return ((q - q2) ** 2).sum(axis=-1)


def bhattacharyya(q, q2):
    q, q2 = _same_shape(q, q2)
    return np.sqrt(np.clip(q, 0, None) * np.clip(q2, 0, None)).sum(axis=-1)


def hellinger_sq(q, q2):
    """``1/2 sum (sqrt q - sqrt q2)^2``, equal to ``1 - BC`` for normalized inputs."""
    q, q2 = _same_shape(q, q2)
    d = np.sqrt(np.clip(q, 0, None)) - np.sqrt(np.clip(q2, 0, None))
    return 0.5 * (d * d).sum(axis=-1)


def classical_infidelity(q, q2):
    """``sqrt(1 - BC(q, q2)^2)`` with BC the Bhattacharyya coefficient.

    Evaluated as ``sqrt(h (2 - h))`` with ``h`` the squared Hellinger distance, which
    avoids the cancellation in ``1 - BC^2`` when ``q`` and ``q2`` nearly coincide.
    """
    h = np.clip(hellinger_sq(q, q2), 0.0, 1.0)
    return np.sqrt(h * (2.0 - h))


def p_half_norm(p):
    """``(sum_i sqrt(p_i))^2``, the 1/2-quasinorm of ``p``."""
    p = np.asarray(p, dtype=float)
    return np.sqrt(np.clip(p, 0, None)).sum(axis=-1) ** 2


def p_two_norm_sq(p):
    p = np.asarray(p, dtype=float)
    return (p * p).sum(axis=-1)


def p_inf_norm(p):
    return np.asarray(p, dtype=float).max(axis=-1)
