"""Expectation, ABL conditional and weak values read off KD data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import ImpossiblePostselectionError, OrthogonalPostselectionError
from .kd import JohansenParts, KDTable, full_dephase, johansen_decompose, kd_table, wigner_table
from .linalg import Basis, DensityOperator, ObservableSpec, RArray, check_dims, check_index


@dataclass(frozen=True)
class WeakValueResult:
    """Weak value and its split into a Wigner part and a coherence correction.

    ``value = numerator / denominator`` with ``denominator = p(f_j|rho)``.
    ``wigner_part`` is ``sum_i a_i wigner[i, j] / p(f_j|rho)`` and
    ``correction_part`` the remainder, so
    ``value == wigner_part + correction_part``.
    """

    value: complex
    numerator: complex
    denominator: float
    wigner_part: float
    correction_part: complex


@dataclass(frozen=True)
class DenominatorComparison:
    strong_prob: float
    weak_prob: float
    gap: float


def expectation(rho: DensityOperator, A: ObservableSpec) -> float:
    """``sum_i a_i Tr(rho P_i)``."""
    check_dims(rho, A)
    va = A.basis.vectors
    p_a = np.real(np.einsum("ki,kl,li->i", va.conj(), rho.matrix, va))
    return float(A.eigenvalues @ p_a)


def conditional_value(
    rho: DensityOperator,
    A: ObservableSpec,
    F: Basis,
    j: int,
    *,
    wigner: RArray | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> float:
    """ABL value: eigenvalue average weighted by column ``j`` of the Wigner table.

    Raises ``ImpossiblePostselectionError`` when ``|f_j>`` cannot be reached
    after a projective measurement of ``A``.
    """
    d = check_dims(rho, A, F)
    j = check_index(j, d, "postselection index")
    w = wigner_table(rho, A, F) if wigner is None else wigner
    col = w[:, j]
    denom = col.sum()
    if denom <= tol.postselect:
        raise ImpossiblePostselectionError(
            f"postselection on f_{j} has probability {denom:.3e} after a projective measurement", float(denom)
        )
    return float(A.eigenvalues @ col / denom)


def weak_value(
    rho: DensityOperator,
    A: ObservableSpec,
    F: Basis,
    j: int,
    *,
    table: KDTable | None = None,
    parts: JohansenParts | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> WeakValueResult:
    """``sum_i a_i Q_ij / sum_i Q_ij`` for postselection on ``|f_j>``."""
    d = check_dims(rho, A, F)
    j = check_index(j, d, "postselection index")
    Q = kd_table(rho, A, F) if table is None else table
    parts = johansen_decompose(rho, A, F) if parts is None else parts
    col = Q.entries[:, j]
    p_f = float(np.real(col.sum()))
    if p_f <= tol.postselect:
        raise OrthogonalPostselectionError(
            f"postselection probability p(f_{j}|rho) = {p_f:.3e} is below {tol.postselect:.0e}", p_f
        )
    a = A.eigenvalues
    num = complex(a @ col)
    wig = float(a @ parts.wigner[:, j]) / p_f
    corr = complex(a @ (parts.real_corr[:, j] + 1j * parts.imag_corr[:, j])) / p_f
    return WeakValueResult(num / p_f, num, p_f, wig, corr)


def denominator_compare(rho: DensityOperator, A: ObservableSpec, F: Basis, j: int) -> DenominatorComparison:
    """Postselection probability after a projective measurement of ``A`` versus without one."""
    d = check_dims(rho, A, F)
    j = check_index(j, d, "postselection index")
    pf = F.projector(j)
    strong = float(np.trace(full_dephase(rho, A).matrix @ pf).real)
    weak = float(np.trace(rho.matrix @ pf).real)
    return DenominatorComparison(strong, weak, weak - strong)
