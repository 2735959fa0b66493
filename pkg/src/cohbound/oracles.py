"""Exact values of the coherence quantifiers (reference basis = computational).

These need the full density matrix and serve as ground truth for the
measurable bounds in :mod:`cohbound.bounds`.
"""
import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DimTooLarge, OutOfRange, UnsupportedQuantifier
from .numerics import hermitian_eig, psd_sqrt, trace_norm
from .states import as_density, as_pure, dephase
from .statistics import shannon_entropy

ROBUSTNESS_MAX_DIM = 4
ROOF_MAX_DIM = 3


class QuantifierKind(enum.Enum):
    RelEntropy = "re"
    L1 = "l1"
    L2 = "l2"
    TraceNorm = "tr"
    RoofInfidelity = "if"
    Skew = "s"
    RoofSkew = "rs"
    Robustness = "rob"

    @classmethod
    def parse(cls, name: str) -> "QuantifierKind":
        """Accept either the member name (case-insensitive) or the short alias."""
        key = name.strip()
        for kind in cls:
            if key.lower() in (kind.name.lower(), kind.value):
                return kind
        raise ValueError(f"unknown quantifier {name!r}")


ALL_KINDS = tuple(QuantifierKind)


def c_re_exact(rho) -> float:
    """Relative entropy of coherence ``S(rho||rho_d) = H(diag rho) - S(rho)`` in bits."""
    rho = np.asarray(rho, dtype=np.complex128)
    lam = np.clip(hermitian_eig(rho).eigenvalues, 0.0, None)
    return float(max(shannon_entropy(np.diag(rho).real.clip(0)) - shannon_entropy(lam), 0.0))


def c_l1_exact(rho) -> float:
    rho = np.asarray(rho)
    a = np.abs(rho)
    return float(a.sum() - np.trace(a))


def c_l2_exact(rho) -> float:
    rho = np.asarray(rho)
    a = np.abs(rho) ** 2
    return float(a.sum() - np.trace(a))


def c_tr_exact(rho) -> float:
    """Half the trace norm of ``rho - rho_d``."""
    rho = np.asarray(rho, dtype=np.complex128)
    return 0.5 * trace_norm(rho - dephase(rho))


def c_skew_exact(rho) -> float:
    """Skew-information coherence ``1 - sum_j <j|sqrt(rho)|j>^2``."""
    r = psd_sqrt(rho)
    return float(max(1.0 - np.sum(np.diag(r).real ** 2), 0.0))


def c_roofskew_exact(rho) -> float:
    """Convex roof of the skew coherence via the quantum Fisher information.

    ``C'_s = 1/4 sum_j F(rho, |j><j|)`` with
    ``F = sum_kl 2 (l_k - l_l)^2/(l_k + l_l) |<phi_k|j><j|phi_l>|^2``.
    """
    lam, v = hermitian_eig(rho)
    lam = np.clip(lam, 0.0, None)
    s = lam[:, None] + lam[None, :]
    diff2 = (lam[:, None] - lam[None, :]) ** 2
    w = np.divide(2 * diff2, s, out=np.zeros_like(s), where=s > 1e-14)
    mod2 = np.abs(v) ** 2  # mod2[j, k] = |<j|phi_k>|^2
    fisher = np.einsum("jk,kl,jl->j", mod2, w, mod2)
    return float(max(0.25 * fisher.sum(), 0.0))


def pure_relative_entropy(phi):
    """Coherence of a pure state under relative entropy: ``H(|phi_i|^2)``. Batched over leading axes."""
    return shannon_entropy(np.abs(phi) ** 2)


def pure_skew(phi):
    p = np.abs(phi) ** 2
    return np.clip(1.0 - (p * p).sum(axis=-1), 0.0, None)


def pure_infidelity(phi):
    p = np.abs(phi) ** 2
    return np.sqrt(np.clip(1.0 - p.max(axis=-1), 0.0, None))


def c_roofinfid_pure(phi) -> float:
    """Infidelity coherence of a pure state, ``sqrt(1 - max_i |<i|phi>|^2)``."""
    return float(pure_infidelity(as_pure(phi)))


def robustness_batch(rhos, mu_final: float = 1e-12, shrink: float = 30.0,
                     newton_tol: float = 1e-8, max_newton: int = 80) -> np.ndarray:
    """Robustness of coherence for a stack of states, shape ``(n, d, d)``.

    Uses ``C_R(rho) = min { tr X - 1 : X diagonal, X >= rho }`` and solves it
    with a log-barrier Newton method (central path down to ``mu_final``).
    Returned values exceed the true optimum by at most ``d * mu_final`` plus
    the centering error; values below ``10 d mu_final`` are reported as 0.
    """
    rhos = np.asarray(rhos, dtype=np.complex128)
    n, d, _ = rhos.shape
    x = np.repeat(np.linalg.eigvalsh(rhos).max(axis=-1, keepdims=True) + 1.0, d, axis=1)
    eye = np.eye(d)

    def slack(xv, r):
        return xv[:, :, None] * eye - r

    mu = 1.0
    while True:
        active = np.arange(n)
        for _ in range(max_newton):
            if active.size == 0:
                break
            xa, ra = x[active], rhos[active]
            m = slack(xa, ra)
            minv = np.linalg.inv(m)
            g = 1.0 / mu - np.einsum("nii->ni", minv).real
            h = np.abs(minv) ** 2
            dx = -np.linalg.solve(h, g[..., None])[..., 0]
            dec = -(g * dx).sum(axis=-1)
            todo = dec / 2 > newton_tol
            active, xa, m, dx, g, dec = active[todo], xa[todo], m[todo], dx[todo], g[todo], dec[todo]
            if active.size == 0:
                break
            # barrier change along dx, exactly: t*sum(dx)/mu - sum_k log(1 + t*w_k),
            # w = eig(L^-1 diag(dx) L^-H) with m = L L^H
            linv = np.linalg.inv(np.linalg.cholesky(m))
            w = np.linalg.eigvalsh((linv * dx[:, None, :]) @ linv.conj().transpose(0, 2, 1))
            wmin = w.min(axis=-1)
            t = np.where(wmin < 0, np.minimum(1.0, -0.99 / np.where(wmin < 0, wmin, -1.0)), 1.0)
            lin = dx.sum(axis=-1) / mu
            for _ in range(60):
                change = t * lin - np.log1p(t[:, None] * w).sum(axis=-1)
                bad = change > -0.25 * t * dec
                if not bad.any():
                    break
                t = np.where(bad, 0.5 * t, t)
            t = np.where(bad, 0.0, t)
            x[active] = xa + t[:, None] * dx
        if mu <= mu_final:
            break
        mu = max(mu / shrink, mu_final)
    value = x.sum(axis=-1) - 1.0
    # the central path stops about d * mu_final above the optimum; below that we cannot tell from 0
    return np.where(value < 10 * d * mu_final, 0.0, value)


def c_robustness_exact(rho) -> float:
    """Robustness of coherence (minimal mixing ``s`` making ``(rho + s tau)/(1+s)`` incoherent)."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape[0] > ROBUSTNESS_MAX_DIM:
        raise DimTooLarge(f"robustness oracle supports dim <= {ROBUSTNESS_MAX_DIM}")
    return float(robustness_batch(rho[None])[0])


@dataclass(frozen=True)
class Decomposition:
    """Pure-state ensemble ``rho = sum_i weights[i] |states[i]><states[i]|``."""

    weights: np.ndarray
    states: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return np.einsum("i,ij,ik->jk", self.weights, self.states, self.states.conj())


def _ensemble(params, sqrt_lam_vt, k, r):
    a = (params[: k * r] + 1j * params[k * r:]).reshape(k, r)
    w, v = np.linalg.eigh(a.conj().T @ a)
    u = a @ ((v / np.sqrt(np.clip(w, 1e-300, None))) @ v.conj().T)
    return u @ sqrt_lam_vt


def _ensemble_value(unnormalized, pure_quantifier):
    f = np.sum(np.abs(unnormalized) ** 2, axis=1)
    keep = f > 1e-15
    phi = unnormalized[keep] / np.sqrt(f[keep])[:, None]
    return float(np.dot(f[keep], pure_quantifier(phi))), f, keep


def convex_roof_bruteforce(rho, pure_quantifier, ensembles: int = 200, seed=0,
                           return_decomposition: bool = False):
    """Upper estimate of a convex roof by searching pure-state decompositions.

    Decompositions of size ``d**2`` are parameterized by isometries ``U``
    (``psi_i = sum_k U_ik sqrt(l_k) |e_k>``) and refined with BFGS from the
    eigen-ensemble plus ``ensembles`` random starts. The start sequence
    depends only on ``seed``, so more ensembles never increase the result.
    """
    if ensembles < 1:
        raise OutOfRange(f"ensembles must be >= 1, got {ensembles}")
    rho = as_density(rho)
    d = rho.shape[0]
    if d > ROOF_MAX_DIM:
        raise DimTooLarge(f"convex roof search supports dim <= {ROOF_MAX_DIM}")
    lam, vecs = hermitian_eig(rho)
    r = int(np.sum(lam > 1e-12))
    if r == 1:
        phi = vecs[:, 0]
        value = float(pure_quantifier(phi[None])[0])
        dec = Decomposition(np.ones(1), phi[None].copy())
        return (value, dec) if return_decomposition else value
    k = d * d
    sqrt_lam_vt = np.sqrt(lam[:r])[:, None] * vecs[:, :r].T

    def objective(params):
        return _ensemble_value(_ensemble(params, sqrt_lam_vt, k, r), pure_quantifier)[0]

    eigen_start = np.zeros(2 * k * r)
    eigen_start[: k * r] = np.eye(k, r).ravel()
    rng = np.random.default_rng(seed)
    starts = [eigen_start] + [rng.normal(size=2 * k * r) for _ in range(ensembles)]
    best_val, best_x = objective(eigen_start), eigen_start
    for x0 in starts:
        res = minimize(objective, x0, method="BFGS", options={"gtol": 1e-9})
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x
    if not return_decomposition:
        return best_val
    psi = _ensemble(best_x, sqrt_lam_vt, k, r)
    _, f, keep = _ensemble_value(psi, pure_quantifier)
    dec = Decomposition(f[keep], psi[keep] / np.sqrt(f[keep])[:, None])
    return best_val, dec


def qubit_pure_exact(kind: QuantifierKind, theta):
    """Closed forms for ``sin(t/2)|0> + cos(t/2)e^{i psi}|1>``; vectorized in ``theta``."""
    theta = np.asarray(theta, dtype=float)
    s2 = np.sin(theta / 2) ** 2
    if kind is QuantifierKind.RelEntropy:
        return shannon_entropy(np.stack([s2, 1 - s2], axis=-1))
    if kind in (QuantifierKind.L1, QuantifierKind.Robustness):
        return np.sin(theta)
    if kind in (QuantifierKind.L2, QuantifierKind.Skew, QuantifierKind.RoofSkew):
        return 0.5 * np.sin(theta) ** 2
    if kind is QuantifierKind.TraceNorm:
        return 0.5 * np.sin(theta)
    if kind is QuantifierKind.RoofInfidelity:
        return np.minimum(np.sin(theta / 2), np.cos(theta / 2))
    raise UnsupportedQuantifier(str(kind))


def exact_value(kind: QuantifierKind, rho):
    """Ground-truth value of ``kind`` on ``rho``, or ``None`` where no oracle exists.

    The infidelity roof is only available for pure input; robustness only up to dim 4.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if kind is QuantifierKind.RelEntropy:
        return c_re_exact(rho)
    if kind is QuantifierKind.L1:
        return c_l1_exact(rho)
    if kind is QuantifierKind.L2:
        return c_l2_exact(rho)
    if kind is QuantifierKind.TraceNorm:
        return c_tr_exact(rho)
    if kind is QuantifierKind.Skew:
        return c_skew_exact(rho)
    if kind is QuantifierKind.RoofSkew:
        return c_roofskew_exact(rho)
    if kind is QuantifierKind.Robustness:
        return c_robustness_exact(rho) if rho.shape[0] <= ROBUSTNESS_MAX_DIM else None
    if kind is QuantifierKind.RoofInfidelity:
        lam, v = hermitian_eig(rho)
        if lam[1] > 1e-10:
            return None
        return float(pure_infidelity(v[:, 0]))
    raise UnsupportedQuantifier(str(kind))
