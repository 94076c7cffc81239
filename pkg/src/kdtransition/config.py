"""Numerical tolerances shared by all modules."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Absolute tolerances.

    ``structural`` bounds Hermiticity/trace/orthonormality/marginal defects,
    ``distinct`` the minimum eigenvalue gap of an observable, ``postselect``
    the smallest usable postselection probability, ``overlap`` the smallest
    basis overlap accepted by state reconstruction, and ``corrupt`` the
    imaginary marginal residue at which a KD table is rejected outright.
    """

    structural: float = 1e-10
    distinct: float = 1e-12
    postselect: float = 1e-12
    overlap: float = 1e-8
    corrupt: float = 1e-8


DEFAULT_TOL = Tolerances()
