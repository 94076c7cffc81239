"""
Command line front end.

    kdtransition <verb> --scenario FILE [--out PATH] [--format csv|json]

Verbs: table, decompose, values, transition, decay, validate.

Exit codes: 0 success, 2 invalid scenario, 3 impossible postselection,
4 numerical invariant violated at runtime.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Callable

import numpy as np

from . import __version__
from .config import DEFAULT_TOL
from .dynamics import SCALAR_F_CONVENTION, transition_sweep
from .errors import CorruptTableError, ImpossiblePostselectionError, KDError, NonInvertibleConfigurationError
from .io import Scenario, ScenarioError, fmt, load_scenario, parse_scenario, table_from_dict, table_to_csv, table_to_dict
from .kd import johansen_decompose, kd_marginals, kd_table, reconstruct_state
from .linalg import ObservableSpec, validate_density
from .nonclassicality import decay_check, nonclassicality
from .pointer import tau_matrix
from .values import conditional_value, denominator_compare, expectation, weak_value

EXIT_OK = 0
EXIT_SCENARIO = 2
EXIT_POSTSELECTION = 3
EXIT_INVARIANT = 4

CONVENTIONS = {
    "table_orientation": "rows=a_basis, cols=f_basis",
    "dephasing": "binary",
    "phase_rotation": "exp(-i*pi/2)",
    "scalar_F": SCALAR_F_CONVENTION,
    "decay_prediction_F": "F_01",
}


class CommandFailed(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


class Output:
    """Accumulates one command's metadata and payload and renders it."""

    def __init__(self, command: str, scenario: dict | None, mode: str | None = None):
        self.metadata = {
            "tool": "kdtransition",
            "version": __version__,
            "command": command,
            "mode": mode,
            "conventions": CONVENTIONS,
            "scenario": scenario,
        }
        self.payload: dict = {}
        self.csv_header: list[str] = []
        self.csv_rows: list[list] = []
        self.csv_trailer: dict = {}
        self.exit_code = EXIT_OK

    def render(self, fmt_name: str) -> str:
        if fmt_name == "json":
            return json.dumps({"metadata": self.metadata, "payload": self.payload}, indent=2, allow_nan=False) + "\n"
        buf = io.StringIO()
        buf.write("# metadata: " + json.dumps(self.metadata, sort_keys=True, allow_nan=False) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.csv_header)
        w.writerows(self.csv_rows)
        for key, val in self.csv_trailer.items():
            buf.write(f"# {key}: " + json.dumps(val, sort_keys=True, allow_nan=False) + "\n")
        return buf.getvalue()


def _num(x: float | None) -> float | None:
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return None
    return float(x)


def _cnum(z: complex) -> list:
    return [_num(z.real), _num(z.imag)]


def _need_index(sc: Scenario) -> int:
    if sc.postselect_index is None:
        raise ScenarioError("postselect_index", "required for this command")
    return sc.postselect_index


def cmd_table(sc: Scenario, args) -> Output:
    out = Output("table", sc.raw)
    Q = kd_table(sc.rho, sc.A, sc.F)
    try:
        m = kd_marginals(Q)
    except CorruptTableError as exc:
        raise CommandFailed(EXIT_INVARIANT, str(exc)) from exc
    va = sc.A.basis.vectors
    born_a = np.real(np.einsum("ki,kl,li->i", va.conj(), sc.rho.matrix, va))
    vf = sc.F.vectors
    born_f = np.real(np.einsum("ki,kl,li->i", vf.conj(), sc.rho.matrix, vf))
    checks = {
        "marginals_real": m.row_residue <= DEFAULT_TOL.structural and m.col_residue <= DEFAULT_TOL.structural,
        "row_sums_match_born": bool(np.max(np.abs(m.row_sums - born_a)) <= DEFAULT_TOL.structural),
        "col_sums_match_born": bool(np.max(np.abs(m.col_sums - born_f)) <= DEFAULT_TOL.structural),
        "total_is_one": abs(m.total - 1.0) <= DEFAULT_TOL.structural,
    }
    checks["passed"] = all(checks.values())
    marginals = {
        "row_sums": m.row_sums.tolist(),
        "col_sums": m.col_sums.tolist(),
        "total": m.total,
        "imag_residue": max(m.row_residue, m.col_residue, m.total_residue),
    }
    warnings = []
    recon = None
    if args.reconstruct:
        try:
            back = reconstruct_state(Q)
            recon = {"max_abs_error": float(np.max(np.abs(back.matrix - sc.rho.matrix)))}
        except NonInvertibleConfigurationError as exc:
            warnings.append(f"non-invertible configuration: {exc}")
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)

    out.payload = {"table": table_to_dict(Q), "marginals": marginals, "checks": checks, "warnings": warnings}
    if recon is not None:
        out.payload["reconstruction"] = recon
    out.csv_header = ["i", "j", "re", "im"]
    out.csv_rows = [row.split(",") for row in table_to_csv(Q).splitlines()[1:]]
    out.csv_trailer = {"marginals": marginals, "checks": checks}
    if warnings:
        out.csv_trailer["warnings"] = warnings
    if not checks["passed"]:
        out.exit_code = EXIT_INVARIANT
    return out


def cmd_decompose(sc: Scenario, args) -> Output:
    out = Output("decompose", sc.raw)
    Q = kd_table(sc.rho, sc.A, sc.F)
    parts = johansen_decompose(sc.rho, sc.A, sc.F)
    report = nonclassicality(sc.rho, sc.A, sc.F)
    resid = float(np.max(np.abs(parts.recombine() - Q.entries)))
    imag_marg = max(
        float(np.max(np.abs(parts.imag_corr.sum(axis=0)))), float(np.max(np.abs(parts.imag_corr.sum(axis=1))))
    )
    checks = {
        "recombination_residual": resid,
        "imag_marginal_residue": imag_marg,
        "passed": resid <= DEFAULT_TOL.structural and imag_marg <= DEFAULT_TOL.structural,
    }
    d = sc.dim
    rows = []
    for i in range(d):
        for j in range(d):
            z = Q.entries[i, j]
            rows.append(
                {
                    "i": i,
                    "j": j,
                    "re": float(z.real),
                    "im": float(z.imag),
                    "wigner": float(parts.wigner[i, j]),
                    "real_corr": float(parts.real_corr[i, j]),
                    "imag_corr": float(parts.imag_corr[i, j]),
                }
            )
    out.payload = {"entries": rows, "nonclassicality": report.to_dict(), "checks": checks}
    out.csv_header = ["i", "j", "re", "im", "wigner", "real_corr", "imag_corr"]
    out.csv_rows = [[r["i"], r["j"]] + [fmt(r[k]) for k in out.csv_header[2:]] for r in rows]
    out.csv_trailer = {"nonclassicality": report.to_dict(), "checks": checks}
    if not checks["passed"]:
        out.exit_code = EXIT_INVARIANT
    return out


def cmd_values(sc: Scenario, args) -> Output:
    j = _need_index(sc)
    out = Output("values", sc.raw)
    try:
        wv = weak_value(sc.rho, sc.A, sc.F, j)
    except ImpossiblePostselectionError as exc:
        raise CommandFailed(EXIT_POSTSELECTION, f"{exc} (probability {exc.probability:.17g})") from exc
    ac = conditional_value(sc.rho, sc.A, sc.F, j)
    den = denominator_compare(sc.rho, sc.A, sc.F, j)
    spectrum = [float(sc.A.eigenvalues.min()), float(sc.A.eigenvalues.max())]
    out.payload = {
        "postselect_index": j,
        "expectation": expectation(sc.rho, sc.A),
        "conditional_value": ac,
        "weak_value": {
            "re": wv.value.real,
            "im": wv.value.imag,
            "numerator": _cnum(wv.numerator),
            "denominator": wv.denominator,
            "wigner_part": wv.wigner_part,
            "correction_part": _cnum(wv.correction_part),
        },
        "denominators": {"strong_prob": den.strong_prob, "weak_prob": den.weak_prob, "gap": den.gap},
        "spectrum": spectrum,
        "anomalous": not (spectrum[0] <= wv.value.real <= spectrum[1]) or abs(wv.value.imag) > DEFAULT_TOL.structural,
    }
    flat = [
        ("expectation", out.payload["expectation"]),
        ("conditional_value", ac),
        ("weak_value_re", wv.value.real),
        ("weak_value_im", wv.value.imag),
        ("weak_value_wigner_part", wv.wigner_part),
        ("weak_value_correction_re", wv.correction_part.real),
        ("weak_value_correction_im", wv.correction_part.imag),
        ("strong_prob", den.strong_prob),
        ("weak_prob", den.weak_prob),
        ("gap", den.gap),
    ]
    out.csv_header = ["quantity", "value"]
    out.csv_rows = [[k, fmt(v)] for k, v in flat]
    return out


def _pointer_meta(sc: Scenario) -> dict | None:
    if sc.pointer is None:
        return None
    tau = tau_matrix(sc.pointer, sc.A)
    d = sc.dim
    return {
        "sigma": sc.pointer.sigma,
        "g": sc.pointer.g,
        "tau_D": [{"i": i, "k": k, "tau": float(tau[i, k])} for i in range(d) for k in range(i + 1, d)],
    }


def cmd_transition(sc: Scenario, args) -> Output:
    j = _need_index(sc)
    if not sc.has_grid:
        raise ScenarioError("grid", "required for transition")
    if sc.t_values is not None and sc.pointer is None:
        raise ScenarioError("pointer", "required for a t_values grid")
    mode = "F" if sc.f_values is not None else "t"
    out = Output("transition", sc.raw, mode=mode)
    out.metadata["pointer"] = _pointer_meta(sc)
    points = transition_sweep(
        sc.rho, sc.A, sc.F, j, f_grid=sc.f_values, t_grid=sc.t_values, pointer=sc.pointer, on_error="record"
    )
    rows = []
    born_violation = 0.0
    va = sc.A.basis.vectors
    p_a = np.real(np.einsum("ki,kl,li->i", va.conj(), sc.rho.matrix, va))
    for idx, p in enumerate(points):
        if p.Q_t is not None:
            born_violation = max(born_violation, float(np.max(np.abs(p.Q_t.entries.sum(axis=1) - p_a))))
        rows.append(
            {
                "index": idx,
                "F": _num(p.F),
                "t": p.t,
                "re_AT": _num(p.A_T.real),
                "im_AT": _num(p.A_T.imag),
                "N_t": _num(p.N_t),
                "max_interp_residual": _num(p.max_interp_residual),
                "error": p.error,
            }
        )
    out.payload = {"points": rows, "row_marginal_violation": born_violation}
    out.csv_header = ["index", "F", "t", "re_AT", "im_AT", "N_t", "max_interp_residual", "error"]
    out.csv_rows = [
        [r["index"]] + [fmt(r[k]) for k in out.csv_header[1:-1]] + [r["error"] or ""] for r in rows
    ]
    if born_violation > DEFAULT_TOL.structural:
        out.exit_code = EXIT_INVARIANT
    return out


def cmd_decay(sc: Scenario, args) -> Output:
    if sc.pointer is None:
        raise ScenarioError("pointer", "required for decay")
    if sc.t_values is None:
        raise ScenarioError("grid.t_values", "required for decay")
    out = Output("decay", sc.raw, mode="t")
    out.metadata["pointer"] = _pointer_meta(sc)
    pts = decay_check(sc.rho, sc.A, sc.F, [sc.pointer.at(t) for t in sc.t_values])
    exact = sc.dim == 2
    rows = []
    for idx, p in enumerate(pts):
        if exact:
            flag = "PASS" if p.residual <= DEFAULT_TOL.structural else "FAIL"
        else:
            flag = "REPORT"
        rows.append(
            {"index": idx, "t": p.t, "F": p.F, "N_t": p.N_t, "predicted": p.predicted, "residual": p.residual, "flag": flag}
        )
    out.payload = {"rows": rows, "N_0": nonclassicality(sc.rho, sc.A, sc.F).total}
    out.csv_header = ["index", "t", "F", "N_t", "predicted", "residual", "flag"]
    out.csv_rows = [[r["index"]] + [fmt(r[k]) for k in out.csv_header[1:-1]] + [r["flag"]] for r in rows]
    if any(r["flag"] == "FAIL" for r in rows):
        out.exit_code = EXIT_INVARIANT
    return out


def _validate_table_doc(doc: dict, out: Output) -> None:
    table_doc = doc.get("payload", {}).get("table") if "payload" in doc else doc
    if not isinstance(table_doc, dict):
        raise ScenarioError("payload.table", "missing")
    Q = table_from_dict(table_doc)
    checks: dict = {}
    try:
        m = kd_marginals(Q)
        checks["marginals_real"] = max(m.row_residue, m.col_residue, m.total_residue) <= DEFAULT_TOL.structural
        checks["total_is_one"] = abs(m.total - 1.0) <= DEFAULT_TOL.structural
    except CorruptTableError as exc:
        checks["marginals_real"] = False
        checks["error"] = str(exc)
    warnings = []
    try:
        rho = reconstruct_state(Q)
        rep = validate_density(rho)
        checks["reconstructed_state_valid"] = rep.passed
        checks["reconstruction"] = {
            "hermiticity_defect": rep.hermiticity_defect,
            "trace_defect": rep.trace_defect,
            "min_eigenvalue": rep.min_eigenvalue,
        }
        round_trip = float(np.max(np.abs(kd_table(rho, _as_observable(Q), Q.f_basis).entries - Q.entries)))
        checks["round_trip_error"] = round_trip
        checks["round_trip_ok"] = round_trip <= 1e-9
    except NonInvertibleConfigurationError as exc:
        warnings.append(f"non-invertible configuration: {exc}")
    checks["passed"] = all(v for k, v in checks.items() if isinstance(v, bool))
    out.payload = {"kind": "kd_table", "checks": checks, "warnings": warnings}


def _as_observable(Q) -> ObservableSpec:
    # eigenvalues do not enter the table itself
    return ObservableSpec(np.arange(Q.dim, dtype=float), Q.a_basis)


def cmd_validate(path: str, args) -> Output:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    # CSV outputs carry their metadata on a comment line; only JSON documents are accepted here
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno} column {exc.colno}", exc.msg) from exc
    if isinstance(doc, dict) and "state" in doc:
        sc = parse_scenario(doc)
        out = Output("validate", sc.raw)
        rep = validate_density(sc.rho)
        checks = {
            "state_valid": rep.passed,
            "hermiticity_defect": rep.hermiticity_defect,
            "trace_defect": rep.trace_defect,
            "min_eigenvalue": rep.min_eigenvalue,
            "a_basis_defect": sc.A.basis.orthonormality_defect(),
            "f_basis_defect": sc.F.orthonormality_defect(),
        }
        checks["passed"] = rep.passed
        out.payload = {"kind": "scenario", "checks": checks}
    else:
        out = Output("validate", None)
        _validate_table_doc(doc, out)
    out.csv_header = ["check", "value"]
    out.csv_rows = [[k, json.dumps(v, sort_keys=True)] for k, v in out.payload["checks"].items()]
    if not out.payload["checks"]["passed"]:
        out.exit_code = EXIT_INVARIANT
    return out


COMMANDS: dict[str, Callable] = {
    "table": cmd_table,
    "decompose": cmd_decompose,
    "values": cmd_values,
    "transition": cmd_transition,
    "decay": cmd_decay,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help="scenario JSON file (validate also accepts table JSON output)")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="kdtransition", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"kdtransition {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("table", parents=[common], help="KD table, marginals and their checks")
    p.add_argument("--reconstruct", action="store_true", help="also invert the table back to a state")
    sub.add_parser("decompose", parents=[common], help="Wigner term and quantum corrections")
    sub.add_parser("values", parents=[common], help="expectation, ABL and weak values")
    sub.add_parser("transition", parents=[common], help="general value across a decoherence grid")
    sub.add_parser("decay", parents=[common], help="nonclassicality decay along a time grid")
    sub.add_parser("validate", parents=[common], help="check a scenario or a serialized KD table")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            out = cmd_validate(args.scenario, args)
        else:
            out = COMMANDS[args.command](load_scenario(args.scenario), args)
    except ScenarioError as exc:
        print(f"error: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except CommandFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ImpossiblePostselectionError as exc:
        print(f"error: {exc} (probability {exc.probability:.17g})", file=sys.stderr)
        return EXIT_POSTSELECTION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except KDError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT

    text = out.render(args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if out.exit_code:
        print(f"error: numerical invariant violated ({args.command})", file=sys.stderr)
    return out.exit_code


if __name__ == "__main__":
    sys.exit(main())
