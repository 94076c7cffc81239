"""
Kirkwood-Dirac tables and their classical/quantum split.

Conventions
-----------
Rows index the eigenbasis ``{|a_i>}`` of the observable, columns the second
basis ``{|f_j>}``::

    Q[i, j] = <a_i| rho |f_j> <f_j|a_i>

The table splits as ``Q = wigner + real_corr + 1j * imag_corr`` where
``wigner[i, j] = Tr(rho P_i P_fj P_i)`` is the sequential-projective joint
probability and the two corrections are disturbance traces built from the
binary dephasing ``rho'_i = P_i rho P_i + (1 - P_i) rho (1 - P_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import CorruptTableError, DimensionMismatchError, NonInvertibleConfigurationError
from .linalg import (
    Basis,
    CArray,
    DensityOperator,
    ObservableSpec,
    RArray,
    _frozen,
    check_dims,
    check_index,
    dagger,
)


@dataclass(frozen=True)
class KDTable:
    entries: CArray
    a_basis: Basis
    f_basis: Basis

    def __post_init__(self):
        q = _frozen(self.entries)
        d = self.a_basis.dim
        if self.f_basis.dim != d or q.shape != (d, d):
            raise DimensionMismatchError(
                f"KD table of shape {q.shape} with bases of dimension {d} and {self.f_basis.dim}"
            )
        object.__setattr__(self, "entries", q)

    @property
    def dim(self) -> int:
        return self.a_basis.dim

    def overlaps(self) -> CArray:
        """``O[i, j] = <a_i|f_j>``."""
        return dagger(self.a_basis.vectors) @ self.f_basis.vectors


@dataclass(frozen=True)
class JohansenParts:
    wigner: RArray
    real_corr: RArray
    imag_corr: RArray

    def recombine(self) -> CArray:
        return self.wigner + self.real_corr + 1j * self.imag_corr


@dataclass(frozen=True)
class Marginals:
    row_sums: RArray
    col_sums: RArray
    total: float
    row_residue: float
    col_residue: float
    total_residue: float

    def consistent(self, tol: float = DEFAULT_TOL.structural) -> bool:
        return (
            self.row_residue <= tol
            and self.col_residue <= tol
            and abs(self.total - 1.0) <= tol
            and self.total_residue <= tol
        )


def _check_bases(rho: DensityOperator, A: ObservableSpec, F: Basis) -> int:
    return check_dims(rho, A, F)


def kd_table(rho: DensityOperator, A: ObservableSpec, F: Basis) -> KDTable:
    """KD quasiprobability table of ``rho`` for the eigenbasis of ``A`` and ``F``."""
    _check_bases(rho, A, F)
    va, vf = A.basis.vectors, F.vectors
    amp = dagger(va) @ rho.matrix @ vf  # <a_i|rho|f_j>
    ov = dagger(va) @ vf  # <a_i|f_j>
    return KDTable(amp * ov.conj(), A.basis, F)


def kd_table_conjugate(rho: DensityOperator, A: ObservableSpec, F: Basis) -> KDTable:
    """The alternative ordering ``P[i, j] = <f_j|rho|a_i><a_i|f_j> = Tr(rho P_i P_fj)``."""
    _check_bases(rho, A, F)
    va, vf = A.basis.vectors, F.vectors
    amp = dagger(vf) @ rho.matrix @ va  # [j, i] = <f_j|rho|a_i>
    ov = dagger(va) @ vf
    return KDTable(amp.T * ov, A.basis, F)


def kd_marginals(Q: KDTable, tol: Tolerances = DEFAULT_TOL) -> Marginals:
    """Row, column and total sums of a KD table.

    Sums are returned as real numbers; their imaginary residues are kept as
    diagnostics. A residue above ``tol.corrupt`` means the table cannot have
    come from a density matrix and raises ``CorruptTableError``.
    """
    rows = Q.entries.sum(axis=1)
    cols = Q.entries.sum(axis=0)
    total = Q.entries.sum()
    out = Marginals(
        row_sums=rows.real.copy(),
        col_sums=cols.real.copy(),
        total=float(total.real),
        row_residue=float(np.max(np.abs(rows.imag))),
        col_residue=float(np.max(np.abs(cols.imag))),
        total_residue=float(abs(total.imag)),
    )
    worst = max(out.row_residue, out.col_residue, out.total_residue)
    if worst > tol.corrupt:
        raise CorruptTableError(f"KD marginals have imaginary residue {worst:.3e}")
    return out


def reconstruct_state(Q: KDTable, tol: Tolerances = DEFAULT_TOL) -> DensityOperator:
    """Invert a KD table: ``rho = sum_ij Q_ij |a_i><f_j| / <f_j|a_i>``."""
    ov = Q.overlaps()
    small = np.abs(ov) <= tol.overlap
    if small.any():
        i, j = map(int, np.argwhere(small)[0])
        raise NonInvertibleConfigurationError(i, j, float(abs(ov[i, j])))
    coeff = Q.entries / ov.conj()
    return DensityOperator(Q.a_basis.vectors @ coeff @ dagger(Q.f_basis.vectors))


def binary_dephase(rho: DensityOperator, A: ObservableSpec, i: int) -> DensityOperator:
    """Non-selective binary measurement ``{P_i, 1 - P_i}``."""
    d = check_dims(rho, A)
    i = check_index(i, d, "eigenvector index")
    p = A.projector(i)
    q = np.eye(d) - p
    m = rho.matrix
    return DensityOperator(p @ m @ p + q @ m @ q)


def full_dephase(rho: DensityOperator, A: ObservableSpec) -> DensityOperator:
    """Diagonal part of ``rho`` in the eigenbasis of ``A``."""
    check_dims(rho, A)
    va = A.basis.vectors
    diag = np.real(np.einsum("ki,kl,li->i", va.conj(), rho.matrix, va))
    return DensityOperator(va @ np.diag(diag) @ dagger(va))


def phase_rotated_projector(F: Basis, j: int, A: ObservableSpec, i: int) -> CArray:
    """``R P_fj R^dagger`` with ``R = I + (exp(-i pi/2) - 1) P_ai``.

    The quarter-turn is taken clockwise so that minus one half of
    ``Tr((rho - rho'_i) R P_fj R^dagger)`` is the imaginary part of
    ``Q[i, j]`` rather than of its complex conjugate.
    """
    d = check_dims(F, A)
    j = check_index(j, d, "postselection index")
    i = check_index(i, d, "eigenvector index")
    r = np.eye(d) + (np.exp(-0.5j * np.pi) - 1.0) * A.projector(i)
    return r @ F.projector(j) @ dagger(r)


def johansen_decompose(rho: DensityOperator, A: ObservableSpec, F: Basis) -> JohansenParts:
    """Split the KD table into Wigner term, real and imaginary corrections.

    Each entry is evaluated from its defining trace::

        wigner[i, j]    = Tr(rho P_i P_fj P_i)
        real_corr[i, j] =  1/2 Tr((rho - rho'_i) P_fj)
        imag_corr[i, j] = -1/2 Tr((rho - rho'_i) R_i P_fj R_i^dagger)

    with ``rho'_i`` the binary dephasing at index ``i``. For ``d > 2`` the
    binary and full dephasings differ, and only the binary one makes the
    three parts sum to the KD table.
    """
    d = _check_bases(rho, A, F)
    m = rho.matrix
    wig = np.empty((d, d))
    re = np.empty((d, d))
    im = np.empty((d, d))
    for i in range(d):
        pa = A.projector(i)
        diff = m - binary_dephase(rho, A, i).matrix
        for j in range(d):
            pf = F.projector(j)
            wig[i, j] = np.trace(m @ pa @ pf @ pa).real
            re[i, j] = 0.5 * np.trace(diff @ pf).real
            im[i, j] = -0.5 * np.trace(diff @ phase_rotated_projector(F, j, A, i)).real
    return JohansenParts(wig, re, im)


def wigner_table(rho: DensityOperator, A: ObservableSpec, F: Basis) -> RArray:
    """``p(a_i|rho) * p(f_j|a_i)`` in product form; rows with ``p(a_i|rho) = 0`` are zero."""
    _check_bases(rho, A, F)
    va = A.basis.vectors
    p_a = np.real(np.einsum("ki,kl,li->i", va.conj(), rho.matrix, va))
    p_f_given_a = np.abs(dagger(va) @ F.vectors) ** 2
    return p_a[:, None] * p_f_given_a


def coherence_terms(rho: DensityOperator, A: ObservableSpec, F: Basis) -> CArray:
    """Per-pair coherence contributions ``C[i, k, j] = <a_i|rho|a_k><a_k|P_fj|a_i>`` (``k != i``).

    The diagonal ``k == i`` is zeroed. Summing over ``k`` gives
    ``Q - wigner``, so ``real_corr = Re C.sum(1)`` and ``imag_corr = Im C.sum(1)``.
    A pointer with overlaps ``F_ik`` multiplies ``C[i, k, :]`` by ``F_ik``.
    """
    d = _check_bases(rho, A, F)
    va = A.basis.vectors
    r = dagger(va) @ rho.matrix @ va  # r[i, k] = <a_i|rho|a_k>
    ov = dagger(va) @ F.vectors  # ov[k, j] = <a_k|f_j>
    c = r[:, :, None] * ov[None, :, :] * ov.conj()[:, None, :]
    c[np.arange(d), np.arange(d), :] = 0.0
    return c
