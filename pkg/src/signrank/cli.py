"""Command-line interface.

Every command prints one JSON document ``{"status", "payload",
"diagnostics"}`` on stdout and exits with 0 (Pass), 1 (Fail: a
verification mismatch), 2 (bad input or violated precondition) or 3
(rounding or sampling exhausted).  Diagnostics are also echoed to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any

from . import __version__
from .errors import (
    AxiomViolation,
    InstanceTooLarge,
    ParseError,
    PreconditionViolated,
    RepresentationMismatch,
    RoundingExhausted,
    SamplingExhausted,
    SignRankError,
)
from .linalg import ExactMatrix
from .matroid import (
    FIXTURES,
    MAX_CANDIDATES,
    Matroid,
    Representation,
    cocircuit_matrix,
    cocircuit_realization,
    dual_representation,
    kapranov_search,
    load_fixture,
    optimality_witness,
    validate_representation,
)
from .patterns import SignPattern, sign_of, term_rank
from .realization import RoundingSchedule, pattern_rank_adjust, realize

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_EXHAUSTED = 0, 1, 2, 3
STATUS = {EXIT_PASS: "Pass", EXIT_FAIL: "Fail", EXIT_INPUT: "Error", EXIT_EXHAUSTED: "Error"}


class CommandFailed(Exception):
    """Verification mismatch: exit code 1 with a payload."""

    def __init__(self, payload: Any, message: str):
        super().__init__(message)
        self.payload = payload


def _load_json(path: str) -> Any:
    try:
        text = Path(path).read_text() if path != "-" else sys.stdin.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", exc.pos) from exc


def _load_matrix(path: str) -> ExactMatrix:
    data = _load_json(path)
    # accept the full output of `realize` as well as a bare matrix document
    if isinstance(data, dict) and "payload" in data:
        data = data["payload"]
    if isinstance(data, dict) and "output" in data and "entries" not in data:
        data = data["output"]
    return ExactMatrix.from_dict(data)


def _load_pattern(path: str) -> SignPattern:
    data = _load_json(path)
    if isinstance(data, dict) and "pattern" in data:
        return SignPattern.from_dict(data)
    return sign_of(ExactMatrix.from_dict(data))


def _load_matroid(path: str) -> Matroid:
    # bare names of shipped fixtures are accepted in place of a file
    if path in FIXTURES and not Path(path).exists():
        return load_fixture(path)[0]
    return Matroid.from_dict(_load_json(path))


def _load_rep(path: str) -> Representation:
    if path in FIXTURES and not Path(path).exists():
        return load_fixture(path)[1]
    return Representation.from_dict(_load_json(path))


def _schedule(args) -> RoundingSchedule:
    max_exp = args.max_exp
    if max_exp is None:
        max_exp = int(os.environ.get("SPR_MAX_EXP", RoundingSchedule.max_exponent))
    return RoundingSchedule(args.start_exp, max_exp)


def _grid(rows: list[list[str]]) -> str:
    width = max((len(x) for r in rows for x in r), default=1)
    return "\n".join(" ".join(x.rjust(width) for x in r) for r in rows)


def _human_matrix(A: ExactMatrix) -> str:
    return _grid([[str(x) for x in row] for row in A.entries])


# ---------------------------------------------------------------------------
# commands: each returns (payload, diagnostics) or raises


def cmd_pattern(args):
    S = sign_of(_load_matrix(args.matrix))
    return S.to_dict(), [], str(S)


def cmd_termrank(args):
    S = _load_pattern(args.file)
    t, matching, cover = term_rank(S)
    payload = {
        "t": t,
        "matching": [list(p) for p in matching.pairs],
        "cover": {"rows": sorted(cover.row_set), "cols": sorted(cover.col_set)},
    }
    return payload, [], f"term rank {t}"


def cmd_rank(args):
    A = _load_matrix(args.matrix)
    return {"rank": A.rank(), "rows": A.rows, "cols": A.cols}, [], f"rank {A.rank()}"


def cmd_realize(args):
    A = _load_matrix(args.matrix)
    report = realize(A, _schedule(args), args.seed)
    payload = report.to_dict()
    if args.out:
        Path(args.out).write_text(report.output.to_json() + "\n")
    diags = [f"stages: {' -> '.join(report.trace.stages)}"]
    return payload, diags, _human_matrix(report.output)


def cmd_adjust_rank(args):
    A = _load_matrix(args.matrix)
    X = pattern_rank_adjust(A, args.target, args.seed)
    if args.out:
        Path(args.out).write_text(X.to_json() + "\n")
    return {"rank": X.rank(), "output": X.to_dict()}, [], _human_matrix(X)


def cmd_verify(args):
    A = _load_matrix(args.original)
    X = _load_matrix(args.candidate)
    checks = {
        "shape_equal": A.shape == X.shape,
        "pattern_equal": A.shape == X.shape and sign_of(A) == sign_of(X),
        "rank_equal": A.rank() == X.rank(),
        "rational": X.is_rational(),
    }
    payload = {"checks": checks, "original_rank": A.rank(), "candidate_rank": X.rank()}
    if not all(checks.values()):
        failed = [k for k, v in checks.items() if not v]
        raise CommandFailed(payload, f"verification failed: {', '.join(failed)}")
    return payload, [], "verified"


def cmd_kapranov(args):
    S = _load_pattern(args.pattern)
    res = kapranov_search(S, args.rank, denominator_bound=args.bound,
                         max_candidates=args.max_candidates)
    diags = [] if res.found else ["NotFoundWithinBounds is evidence, not proof"]
    return res.to_dict(), diags, res.to_dict()["result"]


def cmd_matroid(args):
    M = _load_matroid(args.matroid)
    action = args.action
    if action == "validate":
        try:
            M.validate()
        except AxiomViolation as exc:
            raise CommandFailed({"valid": False, "reason": str(exc)}, str(exc)) from exc
        return {"valid": True, "rank": M.rank(), "ground": M.ground}, [], "valid"
    M.validate()
    if action == "dual":
        D = M.dual()
        return D.to_dict(), [], f"dual of rank {D.rank()}"
    if action in ("circuits", "cocircuits"):
        sets = M.circuits() if action == "circuits" else M.cocircuits()
        listed = sorted(sorted(c) for c in sets)
        return {action: listed}, [], "\n".join(str(c) for c in listed)
    if action == "comatrix":
        C = cocircuit_matrix(M)
        cocs = sorted(sorted(c) for c in M.cocircuits())
        return {"matrix": C.to_dict(), "cocircuits": cocs}, [], _human_matrix(C)
    if not args.rep:
        raise ParseError(f"matroid {action} needs --rep")
    rep = _load_rep(args.rep)
    if action == "validate-rep":
        try:
            validate_representation(M, rep)
        except RepresentationMismatch as exc:
            payload = {"valid": False, "subset": list(exc.subset) if exc.subset else None}
            raise CommandFailed(payload, str(exc)) from exc
        return {"valid": True}, [], "representation valid"
    if action == "dualrep":
        D = dual_representation(M, rep)
        return D.to_dict(), [], "dual representation"
    if action == "realize":
        R = cocircuit_realization(M, rep)
        return {"rank": R.rank(), "output": R.to_dict()}, [], _human_matrix(R)
    if action == "witness":
        cols = None
        if args.search_columns:
            cols = [int(c) for c in args.search_columns.split(",")]
        report = optimality_witness(M, rep, args.search_bound, cols, args.max_candidates)
        diags = []
        if report.search is not None and not report.search.found:
            diags.append("rational search found nothing within bounds (evidence, not proof)")
        return report.to_dict(), diags, f"rank {report.rank}, term rank {report.term_rank}"
    raise ParseError(f"unknown matroid action {action}")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="signrank", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"signrank {__version__}")
    p.add_argument("--human", action="store_true", help="render a readable summary to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("pattern", help="sign pattern of a matrix")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_pattern)

    s = sub.add_parser("termrank", help="term rank with matching and König cover")
    s.add_argument("file", help="pattern or matrix JSON")
    s.set_defaults(func=cmd_termrank)

    s = sub.add_parser("rank", help="exact rank")
    s.add_argument("matrix")
    s.set_defaults(func=cmd_rank)

    s = sub.add_parser("realize", help="rational matrix with the same sign pattern and rank")
    s.add_argument("matrix")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--start-exp", type=int, default=RoundingSchedule.start_exponent)
    s.add_argument("--max-exp", type=int, default=None)
    s.add_argument("-o", "--out", help="also write the output matrix to this file")
    s.set_defaults(func=cmd_realize)

    s = sub.add_parser("adjust-rank", help="same pattern, rank moved up to --target")
    s.add_argument("matrix")
    s.add_argument("--target", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--out")
    s.set_defaults(func=cmd_adjust_rank)

    s = sub.add_parser("verify", help="check pattern, rank and rationality of a candidate")
    s.add_argument("--original", required=True)
    s.add_argument("--candidate", required=True)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("kapranov-search", help="bounded search for a low-rank matrix with a zero pattern")
    s.add_argument("pattern")
    s.add_argument("--rank", type=int, required=True)
    s.add_argument("--bound", type=int, required=True)
    s.add_argument("--max-candidates", type=int, default=MAX_CANDIDATES)
    s.set_defaults(func=cmd_kapranov)

    s = sub.add_parser("matroid", help="matroid operations")
    s.add_argument(
        "action",
        choices=["validate", "dual", "circuits", "cocircuits", "comatrix",
                 "validate-rep", "dualrep", "realize", "witness"],
    )
    s.add_argument("matroid", help=f"matroid JSON or a shipped name ({', '.join(FIXTURES)})")
    s.add_argument("--rep", help="representation JSON or a shipped name")
    s.add_argument("--search-bound", type=int)
    s.add_argument("--search-columns", help="comma-separated 0-based columns for the search")
    s.add_argument("--max-candidates", type=int, default=MAX_CANDIDATES)
    s.set_defaults(func=cmd_matroid)
    return p


def _emit(code: int, payload: Any, diagnostics: list[str]) -> int:
    json.dump({"status": STATUS[code], "payload": payload, "diagnostics": diagnostics}, sys.stdout)
    sys.stdout.write("\n")
    for line in diagnostics:
        print(line, file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, diags, human = args.func(args)
    except CommandFailed as exc:
        return _emit(EXIT_FAIL, exc.payload, [str(exc)])
    except (RoundingExhausted, SamplingExhausted) as exc:
        return _emit(EXIT_EXHAUSTED, None, [str(exc)])
    except (ParseError, PreconditionViolated, InstanceTooLarge, AxiomViolation,
            RepresentationMismatch, ValueError) as exc:
        return _emit(EXIT_INPUT, None, [str(exc)])
    except SignRankError as exc:
        return _emit(EXIT_FAIL, None, [f"{type(exc).__name__}: {exc}"])
    if args.human and human:
        print(human, file=sys.stderr)
    return _emit(EXIT_PASS, payload, diags)


if __name__ == "__main__":
    sys.exit(main())
