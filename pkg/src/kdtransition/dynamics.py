"""
Time-dependent KD tables and the weak-to-strong transition.

Two routes are offered. The exact route (t-mode) evolves the state with the
pairwise pointer overlaps and recomputes the table. The interpolation route
(F-mode) mixes the initial table with its Wigner part,
``Q(F) = F * Q0 + (1 - F) * W``, which is exact whenever all coherences share
one overlap (always at ``d = 2``).

For ``d > 2`` the two routes are compared with a single summary overlap, the
smallest off-diagonal ``F_ik``. In F-mode the matching exact state damps pair
``(i, k)`` by ``F ** ((a_i - a_k) / max_gap) ** 2``, which is what a Gaussian
pointer does once the widest gap has reached overlap ``F``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import GridPointError, ImpossiblePostselectionError, KDError
from .kd import KDTable, kd_table, wigner_table
from .linalg import Basis, DensityOperator, ObservableSpec, RArray, check_dims, check_index
from .nonclassicality import table_nonclassicality
from .pointer import PointerConfig, decoherence_factors, dephase_with_factors, reduced_state, scalar_factor

SCALAR_F_CONVENTION = "min_offdiagonal"


@dataclass(frozen=True)
class TransitionPoint:
    F: float
    t: float | None
    Q_t: KDTable | None
    A_T: complex
    N_t: float
    max_interp_residual: float
    error: str | None = None


def dynamical_kd_exact(rho: DensityOperator, A: ObservableSpec, F_basis: Basis, cfg: PointerConfig) -> KDTable:
    """KD table of the pointer-reduced state at ``cfg.t``."""
    return kd_table(reduced_state(rho, A, cfg), A, F_basis)


def dynamical_kd_interp(Q0: KDTable, W: RArray, F: float) -> KDTable:
    """``F * Q0 + (1 - F) * W``."""
    if not 0.0 <= F <= 1.0:
        raise ValueError(f"decoherence factor must lie in [0, 1], got {F}")
    W = np.asarray(W, dtype=float)
    if W.shape != Q0.entries.shape:
        raise ValueError(f"Wigner table shape {W.shape} does not match KD table {Q0.entries.shape}")
    return KDTable(F * Q0.entries + (1.0 - F) * W, Q0.a_basis, Q0.f_basis)


def general_value_AT(Qt: KDTable, A: ObservableSpec, j: int, tol: Tolerances = DEFAULT_TOL) -> complex:
    """``sum_i a_i Qt_ij / sum_i Qt_ij``: weak value at F = 1, ABL value at F = 0."""
    j = check_index(j, Qt.dim, "postselection index")
    col = Qt.entries[:, j]
    denom = col.sum()
    if abs(denom) <= tol.postselect:
        raise ImpossiblePostselectionError(
            f"postselection on f_{j} has probability {abs(denom):.3e} at this decoherence level", float(abs(denom))
        )
    return complex(A.eigenvalues @ col / denom)


def pair_factors_for_scalar(A: ObservableSpec, F: float) -> RArray:
    """Pairwise Gaussian overlaps whose smallest off-diagonal entry equals ``F``."""
    a = np.asarray(A.eigenvalues)
    gaps = np.abs(a[:, None] - a[None, :])
    ratio = (gaps / gaps.max()) ** 2 if A.dim > 1 else np.zeros((1, 1))
    with np.errstate(divide="ignore"):
        return np.where(ratio == 0, 1.0, np.power(F, ratio))


def interp_residual(Q_exact: KDTable, Q0: KDTable, W: RArray, F: float) -> float:
    return float(np.max(np.abs(Q_exact.entries - dynamical_kd_interp(Q0, W, F).entries)))


def transition_sweep(
    rho: DensityOperator,
    A: ObservableSpec,
    F_basis: Basis,
    j: int,
    *,
    f_grid: Sequence[float] | None = None,
    t_grid: Sequence[float] | None = None,
    pointer: PointerConfig | None = None,
    on_error: str = "raise",
) -> list[TransitionPoint]:
    """Evaluate the general value ``A_T`` across a grid of decoherence levels.

    Give exactly one of ``f_grid`` (F-mode, interpolated tables) or ``t_grid``
    together with ``pointer`` (t-mode, exact pairwise evolution; only
    ``pointer.sigma`` and ``pointer.g`` are used). Every point also carries
    ``N_t`` and the largest entrywise gap between the exact and interpolated
    tables. With ``on_error="record"`` a failing point is kept with its
    message instead of aborting the sweep; with ``"raise"`` a
    ``GridPointError`` carrying the grid index is raised.
    """
    d = check_dims(rho, A, F_basis)
    j = check_index(j, d, "postselection index")
    if (f_grid is None) == (t_grid is None):
        raise ValueError("give exactly one of f_grid or t_grid")
    if t_grid is not None and pointer is None:
        raise ValueError("t-mode needs a pointer configuration")
    if on_error not in ("raise", "record"):
        raise ValueError(f"on_error must be 'raise' or 'record', got {on_error!r}")

    Q0 = kd_table(rho, A, F_basis)
    W = wigner_table(rho, A, F_basis)
    points: list[TransitionPoint] = []
    grid = list(f_grid if f_grid is not None else t_grid)
    for idx, val in enumerate(grid):
        val = float(val)
        t = None if f_grid is not None else val
        F = math.nan
        Qt = None
        resid = math.nan
        try:
            if t is None:
                F = val
                Qt = dynamical_kd_interp(Q0, W, F)
                exact = kd_table(dephase_with_factors(rho, A, pair_factors_for_scalar(A, F)), A, F_basis)
                resid = float(np.max(np.abs(exact.entries - Qt.entries)))
            else:
                cfg = pointer.at(t)
                F = scalar_factor(decoherence_factors(cfg, A))
                Qt = dynamical_kd_exact(rho, A, F_basis, cfg)
                resid = interp_residual(Qt, Q0, W, F)
            n_t = table_nonclassicality(Qt, W).total
            a_t = general_value_AT(Qt, A, j)
        except (KDError, ValueError) as exc:
            if on_error == "raise":
                raise GridPointError(idx, exc) from exc
            n_t = table_nonclassicality(Qt, W).total if Qt is not None else math.nan
            points.append(TransitionPoint(F, t, Qt, complex(math.nan, math.nan), n_t, resid, str(exc)))
            continue
        points.append(TransitionPoint(F, t, Qt, a_t, n_t, resid))
    return points
