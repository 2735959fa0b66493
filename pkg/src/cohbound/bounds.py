"""Measurable upper and lower bounds on coherence.

Every bound is a function of the statistics triple ``(p, q, q')`` only:
``p`` from the reference measurement, ``q`` from the test measurement on the
state and ``q'`` from the test measurement on the dephased state. The
vectorized helpers :func:`lower_bound` / :func:`upper_bound` take arrays
whose last axis indexes outcomes.
"""
from dataclasses import dataclass

import numpy as np

from .numerics import hermitian_eig
from .oracles import QuantifierKind
from .states import dephase
from .statistics import (
    StatisticsTriple,
    classical_infidelity,
    kolmogorov,
    l2_dist_sq,
    measurement_statistics,
    p_half_norm,
    p_inf_norm,
    p_two_norm_sq,
    relative_entropy,
    shannon_entropy,
)

K = QuantifierKind


def _uncertainty_l2(p):
    return np.clip(1.0 - p_two_norm_sq(p), 0.0, None)


UPPER_BOUNDS = {
    K.RelEntropy: shannon_entropy,
    K.L1: lambda p: np.clip(p_half_norm(p) - 1.0, 0.0, None),
    K.L2: _uncertainty_l2,
    K.TraceNorm: lambda p: np.sqrt(_uncertainty_l2(p)),
    K.RoofInfidelity: lambda p: np.sqrt(_uncertainty_l2(p)),
    K.Skew: _uncertainty_l2,
    K.RoofSkew: _uncertainty_l2,
    K.Robustness: lambda p: np.clip(p_half_norm(p) - 1.0, 0.0, None),
}

LOWER_BOUNDS = {
    K.RelEntropy: lambda p, q, qp: relative_entropy(q, qp),
    K.L1: lambda p, q, qp: 2.0 * kolmogorov(q, qp),
    K.L2: lambda p, q, qp: l2_dist_sq(q, qp),
    K.TraceNorm: lambda p, q, qp: kolmogorov(q, qp),
    K.RoofInfidelity: lambda p, q, qp: np.sqrt(0.5) * classical_infidelity(q, qp),
    K.Skew: lambda p, q, qp: 0.5 * l2_dist_sq(q, qp),
    K.RoofSkew: lambda p, q, qp: classical_infidelity(q, qp) ** 2,
    K.Robustness: lambda p, q, qp: l2_dist_sq(q, qp) / p_inf_norm(p),
}


def upper_bound(kind: QuantifierKind, p):
    return UPPER_BOUNDS[kind](np.asarray(p, dtype=float))


def lower_bound(kind: QuantifierKind, p, q, qprime, table=None):
    """Lower bound for ``kind``, floored at zero.

    For the relative entropy an infinite value (support of ``q`` outside that
    of ``q'``) is replaced by the upper bound ``H(p)``. ``table`` overrides
    the formula table (used for mutation checks).
    """
    table = LOWER_BOUNDS if table is None else table
    p, q, qprime = (np.asarray(a, dtype=float) for a in (p, q, qprime))
    val = table[kind](p, q, qprime)
    if kind is K.RelEntropy:
        val = np.where(np.isinf(val), shannon_entropy(p), val)
    return np.clip(val, 0.0, None)


@dataclass(frozen=True)
class BoundInterval:
    kind: QuantifierKind
    lower: float
    upper: float
    clamped: bool = False

    def contains(self, value: float, atol: float = 1e-9) -> bool:
        return self.lower - atol <= value <= self.upper + atol


def bound(kind: QuantifierKind, s: StatisticsTriple, table=None) -> BoundInterval:
    """Measurable interval for ``kind`` from a statistics triple."""
    clamped = False
    if kind is K.RelEntropy:
        clamped = bool(np.isinf(relative_entropy(s.q, s.qprime)))
    return BoundInterval(
        kind,
        float(lower_bound(kind, s.p, s.q, s.qprime, table)),
        float(upper_bound(kind, s.p)),
        clamped,
    )


def bound_all(s: StatisticsTriple, kinds=None) -> list[BoundInterval]:
    kinds = list(QuantifierKind) if kinds is None else kinds
    return [bound(k, s) for k in kinds]


def bound_from_state(kind: QuantifierKind, rho, test, ref=None) -> BoundInterval:
    return bound(kind, measurement_statistics(rho, test, ref))


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    vecs = vecs.copy()
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            vecs[:, j] = col * (abs(col[nz[0]]) / col[nz[0]])
    return vecs


def saturating_test_basis(rho) -> tuple[np.ndarray, bool]:
    """Eigenbasis of ``rho - rho_d`` (descending eigenvalues) and a degeneracy flag.

    With this test basis the l2 and trace-norm lower bounds are exact for any
    state and the l1 bound is exact for qubits. For an incoherent state the
    computational basis is returned with the flag set.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    delta = rho - dephase(rho)
    if np.abs(delta).max() <= 1e-12:
        return np.eye(rho.shape[0], dtype=np.complex128), True
    return _fix_phases(hermitian_eig(delta).eigenvectors), False


def state_eigenbasis(rho) -> np.ndarray:
    """Eigenbasis of ``rho`` itself; for a pure state it saturates the skew-roof bound."""
    return _fix_phases(hermitian_eig(np.asarray(rho, dtype=np.complex128)).eigenvectors)
