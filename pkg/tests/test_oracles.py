import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohbound.errors import DimTooLarge, OutOfRange, UnsupportedQuantifier
from cohbound.oracles import (
    ALL_KINDS,
    QuantifierKind as K,
    c_l1_exact,
    c_l2_exact,
    c_re_exact,
    c_robustness_exact,
    c_roofinfid_pure,
    c_roofskew_exact,
    c_skew_exact,
    c_tr_exact,
    convex_roof_bruteforce,
    exact_value,
    pure_infidelity,
    pure_relative_entropy,
    pure_skew,
    qubit_pure_exact,
    robustness_batch,
)
from cohbound.states import projector, qubit_pure, random_density, random_pure_haar

PLUS = projector(np.array([1, 1]) / np.sqrt(2))


def test_eight_kinds_and_aliases():
    assert len(ALL_KINDS) == 8
    assert K.parse("rob") is K.Robustness
    assert K.parse("roofskew") is K.RoofSkew
    with pytest.raises(ValueError):
        K.parse("nope")


@pytest.mark.parametrize("kind,value", [
    (K.RelEntropy, 1.0), (K.L1, 1.0), (K.L2, 0.5), (K.TraceNorm, 0.5),
    (K.RoofInfidelity, np.sqrt(0.5)), (K.Skew, 0.5), (K.RoofSkew, 0.5), (K.Robustness, 1.0),
])
def test_plus_state_values(kind, value):
    assert exact_value(kind, PLUS) == pytest.approx(value, abs=1e-9)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_zero_on_incoherent_states(kind):
    if kind is K.RoofInfidelity:
        assert exact_value(kind, np.diag([1.0, 0.0, 0.0])) == pytest.approx(0.0, abs=1e-12)
        return
    rho = np.diag([0.2, 0.5, 0.3])
    assert exact_value(kind, rho) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_invariant_under_diagonal_phases(kind):
    rng = np.random.default_rng(7)
    rho = projector(random_pure_haar(3, rng)) if kind is K.RoofInfidelity else random_density(3, seed=rng)
    u = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 3)))
    assert exact_value(kind, u @ rho @ u.conj().T) == pytest.approx(exact_value(kind, rho), abs=1e-9)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_qubit_closed_forms(kind):
    thetas = np.linspace(0.01, np.pi - 0.01, 100)
    closed = qubit_pure_exact(kind, thetas)
    direct = [exact_value(kind, projector(qubit_pure(t, 1.3))) for t in thetas]
    assert np.allclose(closed, direct, atol=1e-9, rtol=0)


def test_closed_form_spot_values():
    # hand values at theta = pi/2
    t = np.pi / 2
    assert qubit_pure_exact(K.RelEntropy, t) == pytest.approx(1.0)
    assert qubit_pure_exact(K.TraceNorm, t) == pytest.approx(0.5)
    assert qubit_pure_exact(K.Skew, t) == pytest.approx(0.5)
    assert qubit_pure_exact(K.RoofInfidelity, t) == pytest.approx(np.sqrt(2) / 2)
    assert c_roofinfid_pure(np.array([1.0, 0.0])) == 0.0


def test_skew_at_least_half_l2_and_robustness_at_most_l1():
    rng = np.random.default_rng(12)
    for d in (2, 3, 4):
        rhos = [random_density(d, int(rng.integers(1, d + 1)), rng) for _ in range(200)]
        for rho in rhos:
            assert c_skew_exact(rho) >= 0.5 * c_l2_exact(rho) - 1e-12
        if d == 2:
            rob = robustness_batch(np.array(rhos))
            # qubits: robustness equals the l1 coherence
            assert np.allclose(rob, [c_l1_exact(r) for r in rhos], atol=1e-9)
        else:
            rob = robustness_batch(np.array(rhos))
            assert np.all(rob <= np.array([c_l1_exact(r) for r in rhos]) + 1e-9)


def test_robustness_against_sdp_solver():
    cp = pytest.importorskip("cvxpy")
    rng = np.random.default_rng(31)
    for d in (3, 4):
        for _ in range(3):
            rho = random_density(d, int(rng.integers(1, d + 1)), rng)
            x = cp.Variable(d)
            prob = cp.Problem(cp.Minimize(cp.sum(x) - 1), [cp.diag(x) - rho >> 0])
            prob.solve()
            assert c_robustness_exact(rho) == pytest.approx(prob.value, abs=1e-5)


def test_robustness_dim_cap():
    with pytest.raises(DimTooLarge):
        c_robustness_exact(np.eye(5) / 5)
    assert exact_value(K.Robustness, np.eye(5) / 5) is None


def test_relative_entropy_bounded_by_log_d():
    rng = np.random.default_rng(5)
    for d in (2, 3, 4):
        for _ in range(50):
            assert 0.0 <= c_re_exact(random_density(d, seed=rng)) <= np.log2(d) + 1e-12
    assert c_re_exact(projector(np.ones(4) / 2)) == pytest.approx(2.0)


def test_trace_norm_coherence_qubit_formula():
    # qubit: half the trace norm of the off-diagonal part is |rho_01|
    rho = random_density(2, seed=8)
    assert c_tr_exact(rho) == pytest.approx(abs(rho[0, 1]))


def test_roof_skew_on_pure_states_is_uncertainty():
    rng = np.random.default_rng(9)
    for d in (2, 3, 4):
        phi = random_pure_haar(d, rng)
        p = np.abs(phi) ** 2
        assert c_roofskew_exact(projector(phi)) == pytest.approx(1 - np.sum(p * p), abs=1e-9)


def test_fisher_formula_never_exceeds_roof_search_in_qutrits():
    # the Fisher formula sums per-projector roofs, so in d >= 3 it can only undercut the
    # roof of the summed skew coherence; for qubits the two coincide
    rng = np.random.default_rng(44)
    gaps = []
    for _ in range(3):
        rho = random_density(3, seed=rng)
        gaps.append(convex_roof_bruteforce(rho, pure_skew, ensembles=1, seed=1) - c_roofskew_exact(rho))
    assert min(gaps) >= -1e-9
    assert max(gaps) > 1e-3


def test_bruteforce_decomposition_reconstructs_and_is_monotone():
    rho = random_density(2, seed=3)
    v1, dec = convex_roof_bruteforce(rho, pure_infidelity, ensembles=1, seed=5, return_decomposition=True)
    assert np.isclose(dec.weights.sum(), 1.0)
    assert np.allclose(dec.reconstruct(), rho, atol=1e-8)
    v3 = convex_roof_bruteforce(rho, pure_infidelity, ensembles=3, seed=5)
    assert v3 <= v1 + 1e-15
    # the roof never exceeds the eigen-ensemble average
    lam, vecs = np.linalg.eigh(rho)
    assert v1 <= float(np.dot(lam, pure_infidelity(vecs.T))) + 1e-12


def test_bruteforce_trivial_inputs():
    phi = random_pure_haar(3, 2)
    assert convex_roof_bruteforce(projector(phi), pure_relative_entropy) == pytest.approx(
        float(pure_relative_entropy(phi)))
    assert convex_roof_bruteforce(np.diag([0.4, 0.6]), pure_skew, ensembles=1) == pytest.approx(0.0, abs=1e-8)
    with pytest.raises(DimTooLarge):
        convex_roof_bruteforce(np.eye(4) / 4, pure_skew)
    with pytest.raises(OutOfRange):
        convex_roof_bruteforce(np.eye(2) / 2, pure_skew, ensembles=0)


def test_roof_infidelity_unavailable_for_mixed():
    assert exact_value(K.RoofInfidelity, np.eye(2) / 2) is None


def test_unsupported_closed_form():
    with pytest.raises(UnsupportedQuantifier):
        qubit_pure_exact("bogus", 0.3)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, np.pi), st.floats(0.0, 6.28))
def test_relative_entropy_closed_form_property(theta, psi):
    rho = projector(qubit_pure(theta, psi))
    assert c_re_exact(rho) == pytest.approx(float(qubit_pure_exact(K.RelEntropy, theta)), abs=1e-9)
