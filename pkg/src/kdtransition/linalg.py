"""
State, basis and observable primitives.

Everything is dense numpy. Dimensions are small (2 to 16), so no attempt is
made at sparse or blocked storage. Value objects are frozen dataclasses whose
arrays are marked read-only on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from .config import DEFAULT_TOL, Tolerances
from .errors import (
    DegenerateObservableError,
    DegenerateStateError,
    DimensionMismatchError,
    IndexOutOfRangeError,
    InvalidDimensionError,
    InvalidStateError,
)

CArray = npt.NDArray[np.complex128]
RArray = npt.NDArray[np.float64]

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _frozen(arr: npt.ArrayLike, dtype=complex) -> np.ndarray:
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


@dataclass(frozen=True)
class Basis:
    """Orthonormal basis stored as the columns of a d x d matrix.

    ``vectors[:, k]`` is the k-th basis vector. ``label`` is informational and
    travels into serialized output.
    """

    vectors: CArray
    label: str = "explicit"

    def __post_init__(self):
        v = _frozen(self.vectors)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionMismatchError(f"basis matrix must be square, got shape {v.shape}")
        if v.shape[0] < 1:
            raise InvalidDimensionError("basis dimension must be positive")
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def vector(self, k: int) -> CArray:
        return self.vectors[:, k]

    def projector(self, k: int) -> CArray:
        v = self.vectors[:, k]
        return np.outer(v, v.conj())

    def orthonormality_defect(self) -> float:
        v = self.vectors
        return float(np.max(np.abs(dagger(v) @ v - np.eye(self.dim))))


@dataclass(frozen=True)
class ObservableSpec:
    """Non-degenerate observable A = sum_i a_i |a_i><a_i|."""

    eigenvalues: RArray
    basis: Basis

    def __post_init__(self):
        ev = np.array(self.eigenvalues, dtype=float, copy=True)
        if ev.ndim != 1 or ev.shape[0] != self.basis.dim:
            raise DimensionMismatchError(
                f"{ev.shape[0] if ev.ndim == 1 else ev.shape} eigenvalues for a basis of dimension {self.basis.dim}"
            )
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def matrix(self) -> CArray:
        v = self.basis.vectors
        return v @ np.diag(self.eigenvalues) @ dagger(v)

    def projector(self, i: int) -> CArray:
        return self.basis.projector(i)


@dataclass(frozen=True)
class DensityOperator:
    """A density matrix. Shape is checked here; physicality via ``validate_density``."""

    matrix: CArray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionMismatchError(f"density matrix must be square, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class DensityReport:
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    @property
    def passed(self) -> bool:
        return (
            self.hermiticity_defect <= self.tol.structural
            and self.trace_defect <= self.tol.structural
            and self.min_eigenvalue >= -self.tol.structural
        )

    def failures(self) -> list[str]:
        out = []
        if self.hermiticity_defect > self.tol.structural:
            out.append(f"Hermiticity defect {self.hermiticity_defect:.3e}")
        if self.trace_defect > self.tol.structural:
            out.append(f"trace defect {self.trace_defect:.3e}")
        if self.min_eigenvalue < -self.tol.structural:
            out.append(f"minimum eigenvalue {self.min_eigenvalue:.3e}")
        return out


def validate_density(rho: DensityOperator | npt.ArrayLike, tol: Tolerances = DEFAULT_TOL) -> DensityReport:
    """Report how far ``rho`` is from being a valid density matrix. Never raises on physics."""
    m = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)
    herm = float(np.max(np.abs(m - dagger(m))))
    trace_defect = float(abs(np.trace(m) - 1.0))
    # eigenvalues of the Hermitian part; the anti-Hermitian residue is reported separately
    min_ev = float(np.linalg.eigvalsh(0.5 * (m + dagger(m)))[0])
    return DensityReport(herm, trace_defect, min_ev, tol)


def density(matrix: npt.ArrayLike, tol: Tolerances = DEFAULT_TOL) -> DensityOperator:
    """Build a ``DensityOperator`` and raise ``InvalidStateError`` if it is unphysical."""
    rho = DensityOperator(np.asarray(matrix, dtype=complex))
    report = validate_density(rho, tol)
    if not report.passed:
        raise InvalidStateError("not a density matrix: " + "; ".join(report.failures()))
    return rho


def computational_basis(d: int) -> Basis:
    if d < 1:
        raise InvalidDimensionError(f"dimension must be positive, got {d}")
    return Basis(np.eye(d, dtype=complex), label="computational")


def fourier_basis(d: int) -> Basis:
    """Discrete Fourier basis, F[i, j] = exp(2 pi i ij / d) / sqrt(d).

    Mutually unbiased with the computational basis.

    >>> np.round(fourier_basis(2).vectors.real * np.sqrt(2), 12)
    array([[ 1.,  1.],
           [ 1., -1.]])
    """
    if d < 2:
        raise InvalidDimensionError(f"Fourier basis needs d >= 2, got {d}")
    k = np.arange(d)
    return Basis(np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d), label="fourier")


def rotated_qubit_basis(theta: float) -> Basis:
    """Real qubit basis with |f_0> = cos(theta)|0> + sin(theta)|1>."""
    c, s = np.cos(theta), np.sin(theta)
    return Basis(np.array([[c, -s], [s, c]], dtype=complex), label=f"rotated(theta={theta!r})")


def observable(eigenvalues: npt.ArrayLike, basis: Basis | None = None, tol: Tolerances = DEFAULT_TOL) -> ObservableSpec:
    """Validated constructor: orthonormal basis, pairwise distinct eigenvalues."""
    ev = np.asarray(eigenvalues, dtype=float)
    if basis is None:
        basis = computational_basis(ev.shape[0])
    defect = basis.orthonormality_defect()
    if defect > tol.structural:
        raise InvalidStateError(f"observable basis is not orthonormal (defect {defect:.3e})")
    spec = ObservableSpec(ev, basis)
    gaps = np.abs(ev[:, None] - ev[None, :])
    off = ~np.eye(ev.shape[0], dtype=bool)
    if ev.shape[0] > 1 and np.min(gaps[off]) <= tol.distinct:
        raise DegenerateObservableError(f"eigenvalues must be pairwise distinct, got {ev.tolist()}")
    return spec


def sigma_z() -> ObservableSpec:
    return observable([1.0, -1.0])


def pure_state(amplitudes: npt.ArrayLike) -> DensityOperator:
    """Normalized projector |psi><psi| onto the given amplitude vector."""
    psi = np.asarray(amplitudes, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if norm <= 1e-12:
        raise DegenerateStateError("cannot build a pure state from a zero vector")
    psi = psi / norm
    return DensityOperator(np.outer(psi, psi.conj()))


def bloch_state(x: float, y: float, z: float) -> DensityOperator:
    """Qubit state (I + x sx + y sy + z sz) / 2."""
    r2 = x * x + y * y + z * z
    if r2 > 1 + 1e-12:
        raise InvalidStateError(f"Bloch vector norm {np.sqrt(r2):.6g} exceeds 1")
    return DensityOperator(0.5 * (np.eye(2) + x * PAULI_X + y * PAULI_Y + z * PAULI_Z))


def check_dims(*objs) -> int:
    dims = {o.dim for o in objs}
    if len(dims) != 1:
        raise DimensionMismatchError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def check_index(k: int, d: int, name: str = "index") -> int:
    if not (0 <= int(k) < d):
        raise IndexOutOfRangeError(f"{name} {k} out of range for dimension {d}")
    return int(k)


# random instances for tests and experiment scripts


def random_unitary(d: int, rng: np.random.Generator) -> CArray:
    """Haar-random unitary via QR of a Ginibre matrix with phase fix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_basis(d: int, rng: np.random.Generator) -> Basis:
    return Basis(random_unitary(d, rng), label="random")


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ dagger(g)
    return DensityOperator(m / np.trace(m).real)


def random_pure(d: int, rng: np.random.Generator) -> DensityOperator:
    return pure_state(rng.standard_normal(d) + 1j * rng.standard_normal(d))


def random_observable(d: int, rng: np.random.Generator) -> ObservableSpec:
    ev = np.sort(rng.uniform(-2.0, 2.0, size=d))
    # keep gaps well above the distinctness threshold
    ev = ev + 1e-3 * np.arange(d)
    return observable(ev, random_basis(d, rng))
