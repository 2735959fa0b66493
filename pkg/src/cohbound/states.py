"""States, measurement bases and random sampling.

Conventions
-----------
* A density matrix is a ``(d, d)`` complex array.
* A pure state is a length-``d`` complex vector.
* A basis is a ``(d, d)`` unitary whose *columns* are the basis vectors, so
  ``basis[:, j]`` is ``|b_j>``. The reference basis defaults to the
  computational basis (the identity).
"""
import numpy as np

from .errors import BadRank, DimensionMismatch, InvalidState, OutOfRange
from .numerics import HERMITIAN_ATOL, check_hermitian

TRACE_ATOL = 1e-10
NORM_ATOL = 1e-12
ORTHO_ATOL = 1e-10


def as_density(rho, atol: float = TRACE_ATOL) -> np.ndarray:
    """Validate ``rho`` as a density matrix and return it as a complex array."""
    try:
        rho = check_hermitian(rho, atol=HERMITIAN_ATOL)
    except ValueError as err:
        raise InvalidState(str(err)) from err
    if rho.shape[0] < 2:
        raise InvalidState("dimension must be at least 2")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > atol:
        raise InvalidState(f"trace is {tr!r}, expected 1")
    wmin = np.linalg.eigvalsh(rho).min()
    if wmin < -atol:
        raise InvalidState(f"matrix has negative eigenvalue {wmin:.3g}")
    return rho


def as_pure(phi, atol: float = NORM_ATOL) -> np.ndarray:
    phi = np.asarray(phi, dtype=np.complex128)
    if phi.ndim != 1 or phi.shape[0] < 2:
        raise InvalidState(f"expected a vector of length >= 2, got shape {phi.shape}")
    norm = np.linalg.norm(phi)
    if abs(norm - 1.0) > atol:
        raise InvalidState(f"state norm is {norm!r}, expected 1")
    return phi


def as_basis(basis, atol: float = ORTHO_ATOL) -> np.ndarray:
    basis = np.asarray(basis, dtype=np.complex128)
    if basis.ndim != 2 or basis.shape[0] != basis.shape[1] or basis.shape[0] < 2:
        raise InvalidState(f"expected a square basis matrix, got shape {basis.shape}")
    gram = basis.conj().T @ basis
    err = np.abs(gram - np.eye(basis.shape[0])).max()
    if err > atol:
        raise InvalidState(f"basis vectors are not orthonormal (Gram error {err:.3g})")
    return basis


def projector(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=np.complex128)
    return np.outer(phi, phi.conj())


def computational_basis(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def _check_dims(*arrays):
    dims = {a.shape[0] for a in arrays}
    if len(dims) != 1:
        raise DimensionMismatch(f"dimension mismatch: {sorted(dims)}")


def dephase(rho, ref=None) -> np.ndarray:
    """Erase the off-diagonal part of ``rho`` in the reference basis."""
    rho = np.asarray(rho, dtype=np.complex128)
    if ref is None:
        return np.diag(np.diag(rho).real).astype(np.complex128)
    ref = np.asarray(ref, dtype=np.complex128)
    _check_dims(rho, ref)
    p = np.einsum("ij,ik,kj->j", ref.conj(), rho, ref).real
    return (ref * p) @ ref.conj().T


def to_reference_frame(rho, ref) -> np.ndarray:
    """Rewrite ``rho`` in the coordinates of ``ref`` so that ``ref`` becomes computational."""
    ref = np.asarray(ref, dtype=np.complex128)
    _check_dims(np.asarray(rho), ref)
    return ref.conj().T @ rho @ ref


def qubit_pure(theta: float, psi: float) -> np.ndarray:
    """``sin(theta/2)|0> + cos(theta/2) e^{i psi}|1>`` with theta in [0, pi], psi in [0, 2pi)."""
    if not 0.0 <= theta <= np.pi:
        raise OutOfRange(f"theta={theta} outside [0, pi]")
    if not 0.0 <= psi < 2 * np.pi:
        raise OutOfRange(f"psi={psi} outside [0, 2pi)")
    return np.array([np.sin(theta / 2), np.cos(theta / 2) * np.exp(1j * psi)])


def fourier_basis(dim: int) -> np.ndarray:
    if dim < 2:
        raise OutOfRange("dim must be at least 2")
    k = np.arange(dim)
    return np.exp(2j * np.pi * np.outer(k, k) / dim) / np.sqrt(dim)


def qubit_mub_basis(phase: float) -> np.ndarray:
    """Equatorial qubit basis ``(|0> +- e^{i phase}|1>)/sqrt(2)``."""
    e = np.exp(1j * phase)
    return np.array([[1.0, 1.0], [e, -e]]) / np.sqrt(2)


def qubit_bloch_basis(alpha: float, psi2: float) -> np.ndarray:
    """Eigenbasis of ``n . sigma`` with ``n = (sin a sin psi2, sin a cos psi2, cos a)``.

    The first column is the +1 eigenvector.
    """
    phi = np.pi / 2 - psi2
    c, s = np.cos(alpha / 2), np.sin(alpha / 2)
    e = np.exp(1j * phi)
    return np.array([[c, -np.conj(e) * s], [e * s, c]])


def bloch_vector(rho) -> np.ndarray:
    rho = np.asarray(rho)
    return np.array([2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real])


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_pure_haar(dim: int, seed=None) -> np.ndarray:
    """Haar-random pure state from a normalized complex Gaussian vector.

    ``seed`` is an integer or a ``numpy.random.Generator`` (which is advanced).
    """
    if dim < 2:
        raise OutOfRange("dim must be at least 2")
    rng = _rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rank: int | None = None, seed=None) -> np.ndarray:
    """Random mixed state: partial trace of a Haar pure state on ``dim x rank``."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise BadRank(f"rank must be in [1, {dim}], got {rank}")
    rng = _rng(seed)
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix with phase correction."""
    rng = _rng(seed)
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))
