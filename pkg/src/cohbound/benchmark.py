"""Efficiency benchmarks and invariant studies.

The efficiency ``Q`` of a lower-bounding method is the average, over pure
qubit states ``sin(t/2)|0> + cos(t/2)e^{i psi}|1>`` (measure
``sin t dt dpsi / 4pi``), of the test-basis-averaged ratio
``lower bound / exact value``. Integrals use the open midpoint rule, so no
node sits on the poles where the exact value vanishes. Every run is
repeated on a grid refined by a factor of two in every dimension, and the
change is reported as ``refinement_delta``.
"""
import dataclasses
import enum
import json
import logging
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import bounds as bnd
from .baseline import POSITIVE_THRESHOLD, majorizes, spectrum, spectrum_lower_bound_re
from .errors import GridTooCoarse, UnsupportedQuantifier
from .oracles import (
    QuantifierKind,
    c_re_exact,
    c_tr_exact,
    c_l2_exact,
    exact_value,
    qubit_pure_exact,
    robustness_batch,
)
from .states import (
    bloch_vector,
    dephase,
    projector,
    qubit_bloch_basis,
    qubit_pure,
    random_density,
    random_pure_haar,
    random_unitary,
)
from .statistics import (
    kolmogorov,
    l2_dist_sq,
    measurement_statistics,
    p_two_norm_sq,
    relative_entropy,
    shannon_entropy,
    born,
)

log = logging.getLogger(__name__)

K = QuantifierKind
MAX_REFINEMENT_DELTA = 0.005


class Strategy(enum.Enum):
    MubPhaseAverage = "mub"
    BlochAverage = "bloch"
    SpectrumRandomB = "spectrum-random"
    SpectrumMubB = "spectrum-mub"

    @classmethod
    def parse(cls, name: str) -> "Strategy":
        for s in cls:
            if name.strip().lower() in (s.name.lower(), s.value):
                return s
        raise ValueError(f"unknown strategy {name!r}")

    @property
    def uses_mub(self) -> bool:
        return self in (Strategy.MubPhaseAverage, Strategy.SpectrumMubB)

    @property
    def uses_spectrum(self) -> bool:
        return self in (Strategy.SpectrumRandomB, Strategy.SpectrumMubB)


DEFAULT_GRIDS = {
    Strategy.MubPhaseAverage: (256, 64, 256),
    Strategy.SpectrumMubB: (256, 64, 256),
    Strategy.BlochAverage: (128, 32, 64, 64),
    Strategy.SpectrumRandomB: (128, 32, 64, 64),
}


@dataclass(frozen=True)
class BenchmarkConfig:
    quantifier: QuantifierKind
    strategy: Strategy
    grid: tuple = None
    seed: int = 0
    ratio_floor: float = 1e-12
    psi_offset: float = 0.0
    max_delta: float = MAX_REFINEMENT_DELTA

    def __post_init__(self):
        grid = DEFAULT_GRIDS[self.strategy] if self.grid is None else tuple(int(g) for g in self.grid)
        need = 3 if self.strategy.uses_mub else 4
        if len(grid) < need:
            raise ValueError(f"strategy {self.strategy.name} needs {need} grid sizes, got {grid}")
        grid = grid[:need]
        if min(grid) < 8:
            raise ValueError(f"grid sizes must be >= 8, got {grid}")
        if not self.ratio_floor > 0:
            raise ValueError("ratio_floor must be positive")
        object.__setattr__(self, "grid", grid)

    def refined(self) -> "BenchmarkConfig":
        return dataclasses.replace(self, grid=tuple(2 * g for g in self.grid))

    def as_dict(self) -> dict:
        return {
            "quantifier": self.quantifier.name,
            "strategy": self.strategy.name,
            "grid": list(self.grid),
            "seed": self.seed,
            "ratio_floor": self.ratio_floor,
            "psi_offset": self.psi_offset,
            "max_delta": self.max_delta,
        }


CSV_COLUMNS = ("quantifier", "strategy", "grid", "seed", "q_value", "refinement_delta", "wall_time_s")


@dataclass(frozen=True)
class BenchmarkReport:
    config: BenchmarkConfig
    q_value: float
    refinement_delta: float
    wall_time_s: float
    refined_q_value: float = float("nan")

    @property
    def converged(self) -> bool:
        return self.refinement_delta <= self.config.max_delta

    def as_dict(self) -> dict:
        return {
            "config": self.config.as_dict(),
            "q_value": self.q_value,
            "refined_q_value": self.refined_q_value,
            "refinement_delta": self.refinement_delta,
            "wall_time_s": self.wall_time_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def csv_fields(self) -> list:
        c = self.config
        return [
            c.quantifier.name,
            c.strategy.name,
            "x".join(str(g) for g in c.grid),
            c.seed,
            self.q_value,
            self.refinement_delta,
            self.wall_time_s,
        ]


def _midpoints(n: int, length: float) -> np.ndarray:
    return (np.arange(n) + 0.5) * (length / n)


def _inner_bases(config: BenchmarkConfig, grid):
    """Bloch vector of the first test-basis vector at every inner node, shape ``(n, 3)``,
    plus the quadrature weights.

    The MUB family lies on the equator, ``n = (cos phi, sin phi, 0)``; the Bloch family
    is ``n = (sin a sin psi2, sin a cos psi2, cos a)``.
    """
    if config.strategy.uses_mub:
        phase = _midpoints(grid[2], 2 * np.pi)
        n = np.stack([np.cos(phase), np.sin(phase), np.zeros_like(phase)], axis=-1)
        return n, np.full(phase.shape, 1.0 / phase.size)
    alpha = _midpoints(grid[2], np.pi)
    psi2 = _midpoints(grid[3], 2 * np.pi)
    a, p2 = np.meshgrid(alpha, psi2, indexing="ij")
    n = np.stack([np.sin(a) * np.sin(p2), np.sin(a) * np.cos(p2), np.cos(a)], axis=-1)
    weights = np.sin(a)
    return n.reshape(-1, 3), (weights / weights.sum()).ravel()


def _azimuth_symmetric(config: BenchmarkConfig, grid) -> bool:
    # The integrand depends on psi only through psi -/+ (inner azimuth). When the inner
    # azimuth midpoints refine the psi midpoints, every psi row sees the same shifted set
    # of nodes, so all rows share one inner average.
    n_az = grid[2] if config.strategy.uses_mub else grid[3]
    return n_az % grid[1] == 0 and (n_az // grid[1]) % 2 == 0


def _integrate(config: BenchmarkConfig, grid, full: bool = False) -> float:
    """Average ratio lower/exact on ``grid``; ``full=True`` evaluates every psi row."""
    kind = config.quantifier
    thetas = _midpoints(grid[0], np.pi)
    psis = _midpoints(grid[1], 2 * np.pi) + config.psi_offset
    if not full and _azimuth_symmetric(config, grid):
        psis = psis[:1]
    n, inner_w = _inner_bases(config, grid)
    exact = qubit_pure_exact(kind, thetas)
    outer_w = np.sin(thetas) * (exact >= config.ratio_floor)
    row_means = np.zeros(thetas.size)
    # transverse part of r.n for a unit-length equatorial component; scaled by sin(theta) below
    transverse = np.cos(psis)[:, None] * n[:, 0] + np.sin(psis)[:, None] * n[:, 1]
    for k, theta in enumerate(thetas):
        if outer_w[k] == 0:
            continue
        # state Bloch vector is (sin t cos psi, sin t sin psi, -cos t)
        p0 = np.sin(theta / 2) ** 2
        p = np.array([p0, 1.0 - p0])
        longitudinal = -np.cos(theta) * n[:, 2]
        q0 = np.clip(0.5 * (1.0 + np.sin(theta) * transverse + longitudinal), 0.0, 1.0)
        q = np.stack([q0, 1.0 - q0], axis=-1)
        qp0 = 0.5 * (1.0 + longitudinal)
        qp = np.stack([qp0, 1.0 - qp0], axis=-1)[None, :, :]
        if config.strategy.uses_spectrum:
            lower = spectrum_lower_bound_re(p, q)
        else:
            lower = bnd.lower_bound(kind, p, q, qp)
        ratio = lower / exact[k]
        row_means[k] = (ratio @ inner_w).mean()
    return float(np.dot(outer_w, row_means) / outer_w.sum())


def _run(config: BenchmarkConfig) -> BenchmarkReport:
    t0 = time.perf_counter()
    q_value = _integrate(config, config.grid)
    refined = _integrate(config, config.refined().grid)
    wall = time.perf_counter() - t0
    report = BenchmarkReport(config, q_value, abs(refined - q_value), wall, refined)
    log.info("%s/%s: Q=%.6f delta=%.2e (%.1fs)", config.quantifier.name,
             config.strategy.name, q_value, report.refinement_delta, wall)
    if not report.converged:
        raise GridTooCoarse(
            f"refinement changed Q by {report.refinement_delta:.3g} > {config.max_delta}", report)
    return report


def run_qd(config: BenchmarkConfig) -> BenchmarkReport:
    """Efficiency of the disturbance-based lower bound (``Q_D``)."""
    if config.strategy.uses_spectrum:
        raise ValueError(f"run_qd needs a disturbance strategy, got {config.strategy.name}")
    return _run(config)


def run_qm(config: BenchmarkConfig) -> BenchmarkReport:
    """Efficiency of the spectrum-estimation lower bound (``Q_M`` / ``Q'_M``)."""
    if config.quantifier is not K.RelEntropy:
        raise UnsupportedQuantifier(
            f"spectrum baseline is only implemented for RelEntropy, not {config.quantifier.name}")
    if not config.strategy.uses_spectrum:
        raise ValueError(f"run_qm needs a spectrum strategy, got {config.strategy.name}")
    return _run(config)


def run_benchmark(config: BenchmarkConfig) -> BenchmarkReport:
    return run_qm(config) if config.strategy.uses_spectrum else run_qd(config)


# --- invariant studies -------------------------------------------------------

SATURATION_KINDS = (K.L2, K.TraceNorm, K.L1, K.RoofSkew)


@dataclass
class SaturationReport:
    kind: QuantifierKind
    rows: list = field(default_factory=list)  # (dim, index, exact, lower, gap, alt_gap)

    def max_gap(self, dim=None) -> float:
        gaps = [r[4] for r in self.rows if dim is None or r[0] == dim]
        return max(gaps) if gaps else 0.0

    def max_alt_gap(self, dim=None) -> float:
        gaps = [r[5] for r in self.rows if dim is None or r[0] == dim]
        return max(gaps) if gaps else 0.0


def run_saturation_study(kind: QuantifierKind, n_states: int = 1000, seed: int = 0,
                         dims=(2, 3)) -> SaturationReport:
    """Gap ``exact - lower`` when the test basis is chosen to saturate the bound.

    For l2, trace norm and l1 the test basis is the eigenbasis of
    ``rho - rho_d`` on random states of random rank. The skew roof is studied
    on pure states with the state's own eigenbasis as test basis; ``alt_gap``
    then records the gap obtained with the ``rho - rho_d`` eigenbasis.
    """
    if kind not in SATURATION_KINDS:
        raise UnsupportedQuantifier(f"no saturation study for {kind.name}")
    report = SaturationReport(kind)
    for dim in dims:
        rng = np.random.default_rng((seed, dim))
        for i in range(n_states):
            if kind is K.RoofSkew:
                rho = projector(random_pure_haar(dim, rng))
                test = bnd.state_eigenbasis(rho)
            else:
                rho = random_density(dim, int(rng.integers(1, dim + 1)), rng)
                test, _ = bnd.saturating_test_basis(rho)
            exact = exact_value(kind, rho)
            lower = bnd.bound_from_state(kind, rho, test).lower
            alt_gap = float("nan")
            if kind is K.RoofSkew:
                alt = bnd.bound_from_state(kind, rho, bnd.saturating_test_basis(rho)[0]).lower
                alt_gap = exact - alt
            report.rows.append((dim, i, exact, lower, exact - lower, alt_gap))
    return report


MUTATIONS = {
    "skew-no-half": {K.Skew: lambda p, q, qp: l2_dist_sq(q, qp)},
}


@dataclass
class SandwichReport:
    n_samples: int
    dims: tuple
    stats: dict = field(default_factory=dict)  # (kind, dim) -> [checked, violations, low_excess, up_excess]
    warnings: list = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(v[1] for v in self.stats.values())

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def as_dict(self) -> dict:
        return {
            "suite": "sandwich",
            "passed": self.passed,
            "n_samples": self.n_samples,
            "dims": list(self.dims),
            "violations": self.violations,
            "warnings": self.warnings,
            "detail": [
                {"kind": k.name, "dim": d, "checked": v[0], "violations": v[1],
                 "max_lower_excess": v[2], "max_upper_excess": v[3]}
                for (k, d), v in sorted(self.stats.items(), key=lambda kv: (kv[0][0].value, kv[0][1]))
            ],
        }


def random_pairs(n: int, dim: int, seed: int):
    """``n`` random (state, test basis) pairs; state ranks are uniform in ``1..dim``."""
    rng = np.random.default_rng((seed, dim))
    for _ in range(n):
        rho = random_density(dim, int(rng.integers(1, dim + 1)), rng)
        yield rho, random_unitary(dim, rng)


def run_sandwich_suite(n_samples: int = 10_000, dims=(2, 3, 4), seed: int = 0,
                       atol: float = 1e-9, mutation: str | None = None) -> SandwichReport:
    """Check ``lower <= exact <= upper`` for every kind with an oracle on random pairs.

    The infidelity roof is only checked on pure states. ``mutation`` swaps in
    a deliberately wrong lower bound from :data:`MUTATIONS`.
    """
    if not set(dims) <= {2, 3, 4}:
        raise ValueError(f"dims must be a subset of {{2, 3, 4}}, got {dims}")
    table = dict(bnd.LOWER_BOUNDS)
    if mutation is not None:
        table.update(MUTATIONS[mutation])
    report = SandwichReport(n_samples, tuple(dims))
    if n_samples == 0:
        msg = "sandwich suite ran with n_samples=0; vacuous pass"
        warnings.warn(msg, stacklevel=2)
        report.warnings.append(msg)
        return report

    def record(kind, dim, lower, exact, upper):
        st = report.stats.setdefault((kind, dim), [0, 0, 0.0, 0.0])
        lo, up = lower - exact, exact - upper
        st[0] += 1
        st[1] += int(lo > atol or up > atol)
        st[2] = max(st[2], lo)
        st[3] = max(st[3], up)

    for dim in dims:
        rhos, triples = [], []
        for rho, test in random_pairs(n_samples, dim, seed):
            s = measurement_statistics(rho, test)
            rhos.append(rho)
            triples.append(s)
            for kind in K:
                if kind is K.Robustness:
                    continue
                exact = exact_value(kind, rho)
                if exact is None:
                    continue
                lower = float(bnd.lower_bound(kind, s.p, s.q, s.qprime, table))
                record(kind, dim, lower, exact, float(bnd.upper_bound(kind, s.p)))
        rob = robustness_batch(np.array(rhos))
        for s, exact in zip(triples, rob):
            lower = float(bnd.lower_bound(K.Robustness, s.p, s.q, s.qprime, table))
            record(K.Robustness, dim, lower, float(exact), float(bnd.upper_bound(K.Robustness, s.p)))
    return report


def run_udr_suite(n_samples: int = 2000, dims=(2, 3, 4), seed: int = 0, atol: float = 1e-9) -> dict:
    """Uncertainty >= quantum disturbance >= classical disturbance, for three distances."""
    failures = {"relative_entropy": 0, "trace": 0, "l2": 0}
    for dim in dims:
        for rho, test in random_pairs(n_samples, dim, seed + 1):
            s = measurement_statistics(rho, test)
            chains = {
                "relative_entropy": (shannon_entropy(s.p), c_re_exact(rho), relative_entropy(s.q, s.qprime)),
                "trace": (np.sqrt(max(1 - p_two_norm_sq(s.p), 0.0)), c_tr_exact(rho), kolmogorov(s.q, s.qprime)),
                "l2": (1 - p_two_norm_sq(s.p), c_l2_exact(rho), l2_dist_sq(s.q, s.qprime)),
            }
            for name, (unc, quantum, classical) in chains.items():
                if not (unc + atol >= quantum >= classical - atol):
                    failures[name] += 1
    return {"suite": "udr", "passed": not any(failures.values()),
            "n_samples": n_samples, "dims": list(dims), "failures": failures}


def run_majorization_suite(n_samples: int = 10_000, dims=(2, 3, 4), seed: int = 0) -> dict:
    """Spectrum majorizes Born statistics; spectrum bound never exceeds the exact value."""
    not_majorized = 0
    over_exact = 0
    for dim in dims:
        for rho, test in random_pairs(n_samples, dim, seed + 2):
            lam = spectrum(rho)
            q = born(rho, test)
            not_majorized += not majorizes(lam, q)
            p = np.diag(rho).real
            over_exact += spectrum_lower_bound_re(p, q) > c_re_exact(rho) + 1e-9
    return {"suite": "majorization", "passed": not (not_majorized or over_exact),
            "n_samples": n_samples, "dims": list(dims),
            "not_majorized": int(not_majorized), "bound_above_exact": int(over_exact)}


def run_pi8_comparison(n_grid: int = 100, n_random: int = 10_000, seed: int = 0,
                       resolution: float = 1e-6) -> dict:
    """Compare where the two relative-entropy bounds are informative for a fixed qubit state.

    The state is ``sin(pi/8)|0> + cos(pi/8)|1>``. Over an ``n_grid**2``
    midpoint grid of Bloch directions ``n`` the spectrum bound should be
    positive exactly when ``|<phi|n.sigma|phi>| > sqrt(2)/2`` (grid points
    within ``resolution`` of the threshold are not judged). Over Haar-random
    test bases the fraction with a positive disturbance bound is reported.
    """
    phi = qubit_pure(np.pi / 4, 0.0)
    rho = projector(phi)
    r = bloch_vector(rho)
    p = born(rho, np.eye(2))
    rho_d = dephase(rho)
    threshold = np.sqrt(2) / 2
    mismatches = judged = 0
    spectrum_positive = 0
    for alpha in _midpoints(n_grid, np.pi):
        for psi2 in _midpoints(n_grid, 2 * np.pi):
            n = np.array([np.sin(alpha) * np.sin(psi2), np.sin(alpha) * np.cos(psi2), np.cos(alpha)])
            expectation = abs(float(r @ n))
            q = born(rho, qubit_bloch_basis(alpha, psi2))
            positive = spectrum_lower_bound_re(p, q) > POSITIVE_THRESHOLD
            spectrum_positive += positive
            if abs(expectation - threshold) < resolution:
                continue
            judged += 1
            mismatches += positive != (expectation > threshold)
    rng = np.random.default_rng(seed)
    disturbance_positive = spectrum_random_positive = 0
    for _ in range(n_random):
        u = random_unitary(2, rng)
        q = born(rho, u)
        qp = born(rho_d, u)
        disturbance_positive += relative_entropy(q, qp) > POSITIVE_THRESHOLD
        spectrum_random_positive += spectrum_lower_bound_re(p, q) > POSITIVE_THRESHOLD
    return {
        "threshold": threshold,
        "grid_points": n_grid * n_grid,
        "grid_points_judged": judged,
        "grid_mismatches": int(mismatches),
        "grid_spectrum_positive_fraction": spectrum_positive / (n_grid * n_grid),
        "random_bases": n_random,
        "disturbance_positive_fraction": disturbance_positive / n_random,
        "spectrum_positive_fraction": spectrum_random_positive / n_random,
    }


def run_mub_optimality(kinds=None, n_theta: int = 32, n_phase: int = 128, n_sphere: int = 64) -> dict:
    """Largest lower bound over all qubit test bases minus the largest over the MUB family.

    A margin near zero (or negative) for a kind means the MUB family is where its
    bound is strongest for the sampled states. Recorded, not asserted.
    """
    kinds = list(K) if kinds is None else kinds
    thetas = _midpoints(n_theta, np.pi)
    mub_cfg = BenchmarkConfig(K.L2, Strategy.MubPhaseAverage, grid=(8, 8, n_phase))
    sphere_cfg = BenchmarkConfig(K.L2, Strategy.BlochAverage, grid=(8, 8, n_sphere, n_sphere))
    families = {"mub": _inner_bases(mub_cfg, mub_cfg.grid)[0],
                "sphere": _inner_bases(sphere_cfg, sphere_cfg.grid)[0]}
    margins = {}
    for kind in kinds:
        worst = -np.inf
        for theta in thetas:
            # psi = 0: the state's Bloch vector is (sin t, 0, -cos t)
            p0 = np.sin(theta / 2) ** 2
            p = np.array([p0, 1.0 - p0])
            best = {}
            for name, n in families.items():
                longitudinal = -np.cos(theta) * n[:, 2]
                q0 = np.clip(0.5 * (1.0 + np.sin(theta) * n[:, 0] + longitudinal), 0.0, 1.0)
                qp0 = 0.5 * (1.0 + longitudinal)
                q = np.stack([q0, 1.0 - q0], axis=-1)
                qp = np.stack([qp0, 1.0 - qp0], axis=-1)
                best[name] = float(bnd.lower_bound(kind, p, q, qp).max())
            worst = max(worst, best["sphere"] - best["mub"])
        margins[kind.name] = worst
    return {"n_theta": n_theta, "n_phase": n_phase, "n_sphere": n_sphere, "max_margin": margins}
