"""Command-line front end: ``qcurv <command> FILE [flags]``.

Input files are JSON module documents (``"format": 1``) whose matrix entries
are expression strings in q and x.  Reports go to stdout as text; ``--json``
writes the machine-readable report (``-`` for stdout).  JSON reports are
deterministic: keys are sorted and places appear in ascending n.

Exit codes: 0 ok or consistent, 10 nontrivial heuristic verdict, 2 input
error, 3 no good place, 4 factorization out of range, 5 specialization,
resonance, near-zero or truncation failure.
"""

import argparse
import json
import re
import sys
import time
from fractions import Fraction

from . import __version__
from .algebra import matrix as mx
from .curvature import CONSISTENT, DEFAULT_THRESHOLD, make_executor, triviality_scan
from .deformation import (
    DiffModule, deform, diff_module_new, diff_triviality_scan, specialize_q1,
    specialize_q_value,
)
from .errors import (
    BadSpecialization, FactorizationOutOfRange, NearZero, NoGoodPlaces, NotRegularSingular,
    NotSpecializable, ParseError, QCurvatureError, Resonant, SingularMatrix,
    TruncationDominates,
)
from .galois import diagonal_galois_group, factor_constant, verify_by_curvatures
from .qmodule import QDiffModule, module_new
from .theta import fundamental_eval, log_solution_eval, theta_eval

FORMAT = 1
KINDS = ("q_difference", "differential", "diagonal_constants")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_GOOD_PLACES = 3
EXIT_FACTORIZATION = 4
EXIT_SPECIALIZATION = 5
EXIT_NONTRIVIAL = 10

_ERROR_CODES = (
    (NoGoodPlaces, EXIT_NO_GOOD_PLACES),
    (FactorizationOutOfRange, EXIT_FACTORIZATION),
    ((NotSpecializable, BadSpecialization, Resonant, NearZero, NotRegularSingular,
      TruncationDominates), EXIT_SPECIALIZATION),
)


class InputError(Exception):
    """Bad file, flag or document; exit code 2."""


# documents -----------------------------------------------------------------


def _require(cond, message):
    if not cond:
        raise InputError(message)


def _parse_entries(rows, label):
    out = []
    for i, row in enumerate(rows):
        _require(isinstance(row, list), f"{label} row {i} is not a list")
        for j, e in enumerate(row):
            _require(isinstance(e, str), f"{label}[{i}][{j}] is not a string")
        out.append(row)
    from .algebra import parse_ratfun

    parsed = []
    for i, row in enumerate(out):
        prow = []
        for j, e in enumerate(row):
            try:
                prow.append(parse_ratfun(e))
            except ParseError as exc:
                raise InputError(f"{label}[{i}][{j}]: {exc}") from None
            except ZeroDivisionError as exc:
                raise InputError(f"{label}[{i}][{j}]: {exc}") from None
        parsed.append(prow)
    return parsed


def load_document(path) -> dict:
    """Read a module document; a report carrying ``results.module`` is accepted too."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if isinstance(doc, dict) and "command" in doc and isinstance(doc.get("results"), dict):
        doc = doc["results"].get("module")
        _require(doc is not None, f"{path}: report carries no module")
    _require(isinstance(doc, dict), f"{path}: document must be a JSON object")
    _require(doc.get("format") == FORMAT, f"{path}: unsupported format {doc.get('format')!r}")
    kind = doc.get("kind")
    _require(kind in KINDS, f"{path}: kind must be one of {', '.join(KINDS)}")
    dim = doc.get("dimension")
    _require(isinstance(dim, int) and not isinstance(dim, bool) and dim >= 1,
             f"{path}: dimension must be a positive integer")
    if kind == "diagonal_constants":
        consts = doc.get("constants")
        _require(isinstance(consts, list) and len(consts) == dim,
                 f"{path}: constants must be a list of {dim} strings")
        _parse_entries([consts], "constants")
    else:
        rows = doc.get("matrix")
        _require(isinstance(rows, list) and len(rows) == dim
                 and all(isinstance(r, list) and len(r) == dim for r in rows),
                 f"{path}: matrix must be {dim}x{dim}")
        doc["_parsed"] = _parse_entries(rows, "matrix")
    return doc


def _expect_kind(doc, *kinds):
    _require(doc["kind"] in kinds, f"expected a {' or '.join(kinds)} document, got {doc['kind']}")


def _q_module(doc) -> QDiffModule:
    _expect_kind(doc, "q_difference")
    step = doc.get("step", 1)
    _require(isinstance(step, int) and step >= 1, "step must be a positive integer")
    try:
        return module_new(doc["_parsed"], step)
    except SingularMatrix as exc:
        raise InputError(str(exc)) from None


def _diff_module(doc) -> DiffModule:
    _expect_kind(doc, "differential")
    try:
        return diff_module_new(doc["_parsed"])
    except ValueError as exc:
        raise InputError(str(exc)) from None


def module_document(kind, matrix, name=None, notes=None) -> dict:
    doc = {"format": FORMAT, "kind": kind, "dimension": len(matrix),
           "matrix": mx.format_matrix(matrix)}
    if name:
        doc["name"] = name
    if notes:
        doc["notes"] = notes
    return doc


def _echo(doc) -> dict:
    return {k: v for k, v in doc.items() if not k.startswith("_")}


# flags -----------------------------------------------------------------------


def _range(text):
    m = re.fullmatch(r"\s*(\d+)\s*:\s*(\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError("expected n_min:n_max")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo < 1 or lo > hi:
        raise argparse.ArgumentTypeError("need 1 <= n_min <= n_max")
    return lo, hi


def _rational(text):
    """a, a/b, decimals, or a power b^e such as 2^-40."""
    m = re.fullmatch(r"\s*(-?\d+)\s*(?:\^|\*\*)\s*(-?\d+)\s*", text)
    try:
        if m:
            return Fraction(int(m.group(1))) ** int(m.group(2))
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


# reports -----------------------------------------------------------------------


def _verdict_json(verdict) -> dict:
    places = []
    bad = dict(verdict.bad_places)
    for n in range(verdict.n_min, verdict.n_max + 1):
        if n in bad:
            places.append({"n": n, "status": "bad", "witness": bad[n]})
        elif n in verdict.details:
            rep = verdict.details[n]
            entry = {"n": n, "status": "identity" if rep.is_identity else "nontrivial"}
            if not rep.is_identity:
                entry["curvature"] = mx.format_matrix(rep.matrix)
            places.append(entry)
    return {
        "conclusion": verdict.conclusion,
        "threshold": verdict.threshold,
        "good_places": verdict.good_places,
        "identity_places": verdict.identity_places,
        "failures": verdict.failures,
        "failure_places": list(verdict.failure_places),
        "bad_places": [{"n": n, "witness": w} for n, w in verdict.bad_places],
        "places": places,
    }


def _verdict_lines(verdict) -> list:
    lines = []
    for p in _verdict_json(verdict)["places"]:
        if p["status"] == "bad":
            lines.append(f"n={p['n']:>3}  bad place: {p['witness']}")
        elif p["status"] == "identity":
            lines.append(f"n={p['n']:>3}  identity")
        else:
            lines.append(f"n={p['n']:>3}  NOT identity: {p['curvature']}")
    lines.append(
        f"verdict: {verdict.conclusion} (good {verdict.good_places}, identity "
        f"{verdict.identity_places}, failures {verdict.failures}, bad {len(verdict.bad_places)})"
    )
    return lines


def _verdict_code(verdict) -> int:
    return EXIT_OK if verdict.conclusion == CONSISTENT else EXIT_NONTRIVIAL


def _scan_inputs(args) -> dict:
    return {"range": list(args.range), "threshold": args.threshold,
            "exclude_n1": args.exclude_n1}


def _run_scan(scan, module, args):
    if args.parallel:
        with make_executor() as ex:
            return scan(module, *args.range, args.threshold, args.exclude_n1, executor=ex)
    return scan(module, *args.range, args.threshold, args.exclude_n1)


def cmd_scan(args):
    doc = load_document(args.file)
    m = _q_module(doc)
    verdict = _run_scan(triviality_scan, m, args)
    inputs = {"module": _echo(doc), **_scan_inputs(args)}
    return inputs, _verdict_json(verdict), _verdict_lines(verdict), _verdict_code(verdict)


def cmd_diff_scan(args):
    doc = load_document(args.file)
    d = _diff_module(doc)
    verdict = _run_scan(diff_triviality_scan, d, args)
    inputs = {"module": _echo(doc), **_scan_inputs(args)}
    return inputs, _verdict_json(verdict), _verdict_lines(verdict), _verdict_code(verdict)


def cmd_galois_diagonal(args):
    doc = load_document(args.file)
    _expect_kind(doc, "diagonal_constants")
    consts = doc["constants"]
    group = diagonal_galois_group(consts)
    verdict = verify_by_curvatures(consts, group.lattice, *args.range, args.threshold,
                                   args.exclude_n1)
    results = {
        "factored": [str(factor_constant(c)) for c in consts],
        "lattice_basis": [list(v) for v in group.lattice.basis],
        "elementary_divisors": list(group.elementary_divisors),
        "finite_part": list(group.finite_part),
        "torus_dimension": group.torus_dimension,
        "saturation_basis": [list(v) for v in group.saturation],
        "trivial": group.is_trivial,
        "verification": {
            "conclusion": verdict.conclusion,
            "good_places": verdict.good_places,
            "failures": verdict.failures,
            "failure_places": list(verdict.failure_places),
            "bad_places": [{"n": n, "witness": w} for n, w in verdict.bad_places],
        },
    }
    lines = [
        f"constants: {', '.join(consts)}",
        f"relation lattice basis: {results['lattice_basis']}",
        f"elementary divisors: {results['elementary_divisors']}",
        f"torus dimension: {group.torus_dimension}, finite part: {results['finite_part']}",
        f"curvature check: {verdict.conclusion} ({verdict.failures} failures "
        f"over {verdict.good_places} good places)",
    ]
    inputs = {"module": _echo(doc), **_scan_inputs(args)}
    return inputs, results, lines, _verdict_code(verdict)


def cmd_deform(args):
    doc = load_document(args.file)
    m = deform(_diff_module(doc))
    out = module_document("q_difference", m.sigma_matrix, doc.get("name"),
                          "q-deformation A = I + (q-1) x G")
    lines = ["A = " + json.dumps(out["matrix"])]
    return {"module": _echo(doc)}, {"module": out}, lines, EXIT_OK


def cmd_specialize(args):
    doc = load_document(args.file)
    m = _q_module(doc)
    a = args.q_val if args.q_val is not None else Fraction(1)
    if a == 1:
        g = specialize_q1(m)
        out = module_document("differential", g.g_matrix, doc.get("name"),
                              "specialization at q = 1")
        results = {"q_value": "1", "module": out}
        lines = ["G = " + json.dumps(out["matrix"])]
    else:
        s = specialize_q_value(m, a)
        results = {"q_value": str(a), "root_of_unity": s.root_of_unity,
                   "matrix": mx.format_matrix(s.matrix)}
        lines = [f"A(q={a}) = " + json.dumps(results["matrix"])]
    return {"module": _echo(doc), "q_value": str(a)}, results, lines, EXIT_OK


def cmd_theta_solve(args):
    doc = load_document(args.file)
    m = _q_module(doc)
    _require(args.at is not None and args.at != 0, "--at x0 (nonzero) is required")
    q_val = args.q_val if args.q_val is not None else Fraction(2)
    _require(q_val > 1, "--q-val must be > 1")
    _require(args.tol > 0, "--tol must be positive")
    theta = theta_eval(args.at, q_val, args.tol)
    fe = fundamental_eval(m, args.at, q_val, args.order, args.tol)
    results = {
        "theta": theta.to_json(),
        "exponents": [str(c) for c in fe.exponents],
        "fundamental_matrix": [[b.to_json() for b in row] for row in fe.u],
        "residual": [[b.to_json() for b in row] for row in fe.residual],
        "residual_contains_zero": fe.residual_contains_zero(),
        "truncation_bound": str(fe.truncation_bound),
    }
    if not theta.contains_zero():
        results["log_solution"] = log_solution_eval(args.at, q_val, args.tol).to_json()
    lines = [f"Theta({args.at}) = {theta}"]
    lines += [f"U[{i}][{j}] = {b}" for i, row in enumerate(fe.u) for j, b in enumerate(row)]
    lines += [f"residual[{i}][{j}] = {b}" for i, row in enumerate(fe.residual)
              for j, b in enumerate(row)]
    lines.append(f"residual contains 0: {fe.residual_contains_zero()}")
    inputs = {"module": _echo(doc), "at": str(args.at), "q_value": str(q_val),
              "order": args.order, "tol": str(args.tol)}
    return inputs, results, lines, EXIT_OK


# entry point ---------------------------------------------------------------------


def _add_scan_flags(p, default_range):
    p.add_argument("--range", type=_range, default=default_range, metavar="N_MIN:N_MAX")
    p.add_argument("--threshold", type=_positive_int, default=DEFAULT_THRESHOLD, metavar="K")
    p.add_argument("--exclude-n1", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcurv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file")
        p.add_argument("--json", metavar="OUT", help="write the JSON report (- for stdout)")
        p.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")
        p.set_defaults(func=func)
        return p

    p = command("scan", cmd_scan, "curvature triviality scan of a q-difference module")
    _add_scan_flags(p, (1, 50))
    p.add_argument("--parallel", action="store_true")
    p = command("galois-diagonal", cmd_galois_diagonal, "Galois group of diag(c_1, ..., c_nu)")
    _add_scan_flags(p, (1, 30))
    command("deform", cmd_deform, "q-deformation of a differential module")
    p = command("specialize", cmd_specialize, "specialize q at 1 or at a rational")
    p.add_argument("--q-val", type=_rational, default=None, metavar="A")
    p = command("diff-scan", cmd_diff_scan, "triviality scan of a differential module")
    _add_scan_flags(p, (1, 30))
    p.add_argument("--parallel", action="store_true")
    p = command("theta-solve", cmd_theta_solve, "certified fundamental solution at a point")
    p.add_argument("--at", type=_rational, required=True, metavar="X0")
    p.add_argument("--q-val", type=_rational, default=None, metavar="A")
    p.add_argument("--order", type=_positive_int, default=16, metavar="N")
    p.add_argument("--tol", type=_rational, default=Fraction(1, 2 ** 40))
    return parser


def render_report(command, inputs, results, elapsed=None) -> str:
    report = {"command": command, "inputs": inputs, "results": results, "version": __version__}
    if elapsed is not None:
        report["timing"] = {"seconds": round(elapsed, 6)}
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _error_code(exc) -> int:
    for kinds, code in _ERROR_CODES:
        if isinstance(exc, kinds):
            return code
    return EXIT_INPUT


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        inputs, results, lines, code = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (QCurvatureError, ValueError) as exc:
        code = _error_code(exc)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return code
    elapsed = time.perf_counter() - start if args.timing else None
    text = render_report(args.command, inputs, results, elapsed)
    if args.json == "-":
        sys.stdout.write(text)
    else:
        print("\n".join(lines))
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
