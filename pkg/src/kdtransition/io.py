"""
Scenario files and serialized output.

Scenario files are JSON. Complex numbers are written as ``[re, im]`` pairs;
a bare number is accepted as a real value. Example::

    {
      "dim": 2,
      "state": {"pure": [1, 1]},
      "a_observable": {"eigenvalues": [1, -1], "basis": "identity"},
      "f_basis": "fourier",
      "postselect_index": 0,
      "pointer": {"sigma": 1.0, "g": 1.0},
      "grid": {"t_values": [0.0, 0.5, 1.0]}
    }

``state`` holds exactly one of ``bloch`` (x, y, z), ``pure`` (amplitude
list) or ``density`` (row-major matrix). Bases are ``"identity"``,
``"fourier"`` or an explicit list of column vectors.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import KDError
from .kd import KDTable
from .linalg import (
    Basis,
    DensityOperator,
    ObservableSpec,
    bloch_state,
    computational_basis,
    fourier_basis,
    observable,
    pure_state,
    validate_density,
)
from .pointer import PointerConfig

STATE_FORMS = ("bloch", "pure", "density")


class ScenarioError(KDError):
    """Malformed or inconsistent scenario; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class Scenario:
    dim: int
    rho: DensityOperator
    A: ObservableSpec
    F: Basis
    postselect_index: int | None
    pointer: PointerConfig | None
    f_values: tuple[float, ...] | None
    t_values: tuple[float, ...] | None
    seed: int | None
    raw: dict

    @property
    def has_grid(self) -> bool:
        return self.f_values is not None or self.t_values is not None


def fmt(x: float) -> str:
    """17 significant digits, locale independent; empty for None."""
    if x is None:
        return ""
    x = float(x)
    return format(x + 0.0 if x == 0 else x, ".17g")


def _complex(v: Any, field: str) -> complex:
    if isinstance(v, bool):
        raise ScenarioError(field, f"expected a number or [re, im], got {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
        isinstance(c, (int, float)) and not isinstance(c, bool) for c in v
    ):
        return complex(v[0], v[1])
    raise ScenarioError(field, f"expected a number or [re, im], got {v!r}")


def _vector(v: Any, d: int, field: str) -> np.ndarray:
    if not isinstance(v, list):
        raise ScenarioError(field, "expected a list")
    if len(v) != d:
        raise ScenarioError(field, f"length {len(v)} does not match dim {d}")
    return np.array([_complex(c, f"{field}[{k}]") for k, c in enumerate(v)], dtype=complex)


def _matrix(rows: Any, d: int, field: str) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != d:
        raise ScenarioError(field, f"expected {d} rows")
    return np.array([_vector(r, d, f"{field}[{k}]") for k, r in enumerate(rows)])


def _basis(spec: Any, d: int, field: str) -> Basis:
    if spec in ("identity", "computational"):
        return computational_basis(d)
    if spec == "fourier":
        if d < 2:
            raise ScenarioError(field, "Fourier basis needs dim >= 2")
        return fourier_basis(d)
    if isinstance(spec, list):
        # list of column vectors
        cols = _matrix(spec, d, field)
        b = Basis(cols.T.copy(), label="explicit")
        defect = b.orthonormality_defect()
        if defect > 1e-10:
            raise ScenarioError(field, f"basis is not orthonormal (defect {defect:.3e})")
        return b
    raise ScenarioError(field, f"expected 'identity', 'fourier' or a list of columns, got {spec!r}")


def _floats(v: Any, field: str) -> tuple[float, ...]:
    if not isinstance(v, list) or not v:
        raise ScenarioError(field, "expected a non-empty list of numbers")
    out = []
    for k, x in enumerate(v):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise ScenarioError(f"{field}[{k}]", f"expected a finite number, got {x!r}")
        out.append(float(x))
    return tuple(out)


def parse_scenario(doc: dict) -> Scenario:
    """Validate a scenario document and build the library objects it describes."""
    if not isinstance(doc, dict):
        raise ScenarioError("<root>", "scenario must be a JSON object")
    d = doc.get("dim")
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise ScenarioError("dim", f"expected a positive integer, got {d!r}")

    state = doc.get("state")
    if not isinstance(state, dict):
        raise ScenarioError("state", "missing or not an object")
    forms = [k for k in STATE_FORMS if k in state]
    if len(forms) != 1:
        raise ScenarioError("state", f"exactly one of {STATE_FORMS} required, got {sorted(state)}")
    form = forms[0]
    try:
        if form == "bloch":
            if d != 2:
                raise ScenarioError("state.bloch", f"Bloch states need dim 2, got {d}")
            xyz = _floats(state["bloch"], "state.bloch")
            if len(xyz) != 3:
                raise ScenarioError("state.bloch", "expected [x, y, z]")
            rho = bloch_state(*xyz)
        elif form == "pure":
            rho = pure_state(_vector(state["pure"], d, "state.pure"))
        else:
            rho = DensityOperator(_matrix(state["density"], d, "state.density"))
            report = validate_density(rho)
            if not report.passed:
                raise ScenarioError("state.density", "; ".join(report.failures()))
    except ScenarioError:
        raise
    except KDError as exc:
        raise ScenarioError(f"state.{form}", str(exc)) from exc

    obs = doc.get("a_observable")
    if not isinstance(obs, dict) or "eigenvalues" not in obs:
        raise ScenarioError("a_observable", "expected an object with 'eigenvalues'")
    ev = _floats(obs["eigenvalues"], "a_observable.eigenvalues")
    if len(ev) != d:
        raise ScenarioError("a_observable.eigenvalues", f"length {len(ev)} does not match dim {d}")
    a_basis = _basis(obs.get("basis", "identity"), d, "a_observable.basis")
    try:
        A = observable(ev, a_basis)
    except KDError as exc:
        raise ScenarioError("a_observable", str(exc)) from exc

    F = _basis(doc.get("f_basis", "fourier"), d, "f_basis")

    j = doc.get("postselect_index")
    if j is not None and (isinstance(j, bool) or not isinstance(j, int) or not 0 <= j < d):
        raise ScenarioError("postselect_index", f"expected an integer in [0, {d}), got {j!r}")

    pointer = None
    if doc.get("pointer") is not None:
        p = doc["pointer"]
        if not isinstance(p, dict):
            raise ScenarioError("pointer", "expected an object with sigma and g")
        try:
            pointer = PointerConfig(float(p["sigma"]), float(p["g"]), float(p.get("t", 0.0)))
        except (KeyError, TypeError) as exc:
            raise ScenarioError("pointer", f"missing or invalid field {exc}") from exc
        except KDError as exc:
            raise ScenarioError("pointer", str(exc)) from exc

    f_values = t_values = None
    if doc.get("grid") is not None:
        g = doc["grid"]
        if not isinstance(g, dict) or len([k for k in ("f_values", "t_values") if k in g]) != 1:
            raise ScenarioError("grid", "expected exactly one of f_values or t_values")
        if "f_values" in g:
            f_values = _floats(g["f_values"], "grid.f_values")
            bad = [k for k, x in enumerate(f_values) if not 0.0 <= x <= 1.0]
            if bad:
                raise ScenarioError(f"grid.f_values[{bad[0]}]", "must lie in [0, 1]")
        else:
            t_values = _floats(g["t_values"], "grid.t_values")
            bad = [k for k, x in enumerate(t_values) if x < 0]
            if bad:
                raise ScenarioError(f"grid.t_values[{bad[0]}]", "must be >= 0")

    seed = doc.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ScenarioError("seed", f"expected an integer, got {seed!r}")

    return Scenario(d, rho, A, F, j, pointer, f_values, t_values, seed, doc)


def load_scenario(path: str) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno} column {exc.colno}", exc.msg) from exc
    return parse_scenario(doc)


# KD table serialization


def _basis_label(b: Basis) -> str:
    return b.label


def _encode_basis(b: Basis) -> list:
    return [[[float(z.real), float(z.imag)] for z in b.vectors[:, k]] for k in range(b.dim)]


def table_to_dict(Q: KDTable, *, include_bases: bool = True) -> dict:
    out = {
        "dim": Q.dim,
        "a_basis_label": _basis_label(Q.a_basis),
        "f_basis_label": _basis_label(Q.f_basis),
        "entries": [[float(z.real), float(z.imag)] for z in Q.entries.ravel()],
    }
    if include_bases:
        out["a_basis"] = _encode_basis(Q.a_basis)
        out["f_basis"] = _encode_basis(Q.f_basis)
    return out


def table_from_dict(doc: dict) -> KDTable:
    """Inverse of ``table_to_dict``. Without explicit columns the labels must be standard."""
    d = doc.get("dim")
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise ScenarioError("dim", f"expected a positive integer, got {d!r}")
    entries = doc.get("entries")
    if not isinstance(entries, list) or len(entries) != d * d:
        raise ScenarioError("entries", f"expected {d * d} [re, im] pairs")
    q = np.array([_complex(z, f"entries[{k}]") for k, z in enumerate(entries)]).reshape(d, d)

    def basis(key: str) -> Basis:
        if key in doc:
            b = _basis(doc[key], d, key)
            return Basis(b.vectors, label=doc.get(f"{key}_label", "explicit"))
        label = doc.get(f"{key}_label")
        if label in ("computational", "identity", "fourier"):
            return _basis(label, d, f"{key}_label")
        raise ScenarioError(key, f"no basis columns and non-standard label {label!r}")

    return KDTable(q, basis("a_basis"), basis("f_basis"))


def table_to_csv(Q: KDTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "j", "re", "im"])
    for i in range(Q.dim):
        for j in range(Q.dim):
            z = Q.entries[i, j]
            w.writerow([i, j, fmt(z.real), fmt(z.imag)])
    return buf.getvalue()


def table_from_csv(text: str, a_basis: Basis, f_basis: Basis) -> KDTable:
    rows = list(csv.DictReader(line for line in io.StringIO(text) if not line.startswith("#")))
    d = a_basis.dim
    q = np.zeros((d, d), dtype=complex)
    for r in rows:
        q[int(r["i"]), int(r["j"])] = complex(float(r["re"]), float(r["im"]))
    return KDTable(q, a_basis, f_basis)
