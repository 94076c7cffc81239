"""
Gaussian von Neumann pointer.

The coupling ``g A (x) P`` displaces the pointer wave packet by ``g a_i t`` for
each eigenvalue. The free kinetic term of the pointer is ignored, so the
packets keep their width ``sigma`` and the overlap of two of them is the
closed-form Gaussian ``exp(-(g (a_i - a_k) t)^2 / (8 sigma^2))``. Tracing the
pointer out multiplies each coherence ``rho_ik`` (in the eigenbasis of ``A``)
by that overlap.

``tau_D = 2 sqrt(2) sigma / (g |a_i - a_k|)`` is the time at which the overlap
falls to ``1/e``. An exponential law ``F = exp(-t / tau_D)`` is sometimes used
as a rough parametrization of the same decay; nothing here uses it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidPointerError
from .linalg import DensityOperator, ObservableSpec, RArray, check_dims, dagger

# exp(-40) ~ 4e-18: below this the pointer states are treated as orthogonal
STRONG_EXPONENT = 40.0


@dataclass(frozen=True)
class PointerConfig:
    sigma: float
    g: float
    t: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidPointerError(f"pointer width sigma must be > 0, got {self.sigma}")
        if not (math.isfinite(self.g) and self.g > 0):
            raise InvalidPointerError(f"coupling g must be > 0, got {self.g}")
        if not (math.isfinite(self.t) and self.t >= 0):
            raise InvalidPointerError(f"interaction time t must be >= 0, got {self.t}")

    def at(self, t: float) -> PointerConfig:
        return PointerConfig(self.sigma, self.g, t)


def overlap_exponent(cfg: PointerConfig, a_i: float, a_k: float) -> float:
    dx = cfg.g * (a_i - a_k) * cfg.t
    return dx * dx / (8.0 * cfg.sigma**2)


def pointer_overlap(cfg: PointerConfig, a_i: float, a_k: float) -> float:
    """Overlap of the pointer packets attached to eigenvalues ``a_i`` and ``a_k``."""
    return math.exp(-overlap_exponent(cfg, a_i, a_k))


def decoherence_time(cfg: PointerConfig, a_i: float, a_k: float) -> float:
    """Time at which the pair overlap has fallen to 1/e: ``2 sqrt(2) sigma / (g |a_i - a_k|)``."""
    gap = abs(a_i - a_k)
    if gap == 0:
        return math.inf
    return 2.0 * math.sqrt(2.0) * cfg.sigma / (cfg.g * gap)


def time_for_overlap(cfg: PointerConfig, a_i: float, a_k: float, F: float) -> float:
    """Invert the Gaussian overlap: the ``t`` at which the pair overlap equals ``F``."""
    if not 0 < F <= 1:
        raise InvalidPointerError(f"overlap must lie in (0, 1], got {F}")
    return decoherence_time(cfg, a_i, a_k) * math.sqrt(-math.log(F))


def decoherence_factors(cfg: PointerConfig, A: ObservableSpec) -> RArray:
    """Matrix of pairwise overlaps ``F[i, k]``; unit diagonal, symmetric."""
    a = np.asarray(A.eigenvalues)
    dx = cfg.g * (a[:, None] - a[None, :]) * cfg.t
    return np.exp(-(dx**2) / (8.0 * cfg.sigma**2))


def tau_matrix(cfg: PointerConfig, A: ObservableSpec) -> RArray:
    d = A.dim
    out = np.full((d, d), np.inf)
    for i in range(d):
        for k in range(d):
            if i != k:
                out[i, k] = decoherence_time(cfg, A.eigenvalues[i], A.eigenvalues[k])
    return out


def scalar_factor(factors: RArray) -> float:
    """Single summary overlap: the smallest off-diagonal entry (1.0 when d = 1)."""
    d = factors.shape[0]
    if d < 2:
        return 1.0
    return float(np.min(factors[~np.eye(d, dtype=bool)]))


def dephase_with_factors(rho: DensityOperator, A: ObservableSpec, factors: RArray) -> DensityOperator:
    """Multiply the coherences of ``rho`` in the eigenbasis of ``A`` entrywise by ``factors``."""
    check_dims(rho, A)
    va = A.basis.vectors
    r = dagger(va) @ rho.matrix @ va
    return DensityOperator(va @ (r * factors) @ dagger(va))


def reduced_state(rho: DensityOperator, A: ObservableSpec, cfg: PointerConfig) -> DensityOperator:
    """System state after the pointer interaction with the pointer traced out."""
    return dephase_with_factors(rho, A, decoherence_factors(cfg, A))
