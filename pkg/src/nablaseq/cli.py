"""Command-line front end.

Machine-readable JSON goes to stdout; diagnostics go to stderr.  Exit codes:
0 success (proved / checked / refuted as requested), 1 negative outcome
(exhausted, not refuted, check failed), 2 input error, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .algebra import MAX_SIZE, refute
from .kernel import (
    CalculusId,
    InternalError,
    ProofError,
    ProofTree,
    calculus_from_name,
    check_proof,
    ikd,
    proof_from_json,
    proof_to_json,
)
from .meta import (
    DynPremise,
    HeytingPremise,
    Left,
    LeftDisjunct,
    Residual,
    RightDisjunct,
    VisserAntecedent,
    interpolate,
    split_disjunction,
    visser_disjunctive,
    visser_heyting,
    visser_implicative,
)
from .render import render
from .search import Exhausted, Found, SearchBudget, prove
from .syntax import (
    DynImp,
    HeytImp,
    Multiset,
    ParseError,
    parse_formula,
    parse_sequent,
    print_formula,
    print_sequent,
    strip_nabla,
)
from .transform import deduction_export, deduction_import, eliminate_cuts, ikd_to_stl, stl_to_ikd

BUDGET_ENV = "NABLASEQ_BUDGET"

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class CliError(Exception):
    """Input-level error: bad flags, unparsable input, failed preconditions."""


@dataclass(frozen=True)
class CliConfig:
    calc: CalculusId
    budget: SearchBudget
    fmt: str


def _env_budget() -> SearchBudget:
    """Default budget, overridable via NABLASEQ_BUDGET=depth=30,nabla=2,nodes=200000."""
    spec = os.environ.get(BUDGET_ENV, "")
    values = {}
    if spec:
        for piece in spec.split(","):
            key, _, num = piece.partition("=")
            key = key.strip()
            if key not in ("depth", "nabla", "nodes") or not num.strip().isdigit():
                raise CliError(f"cannot parse {BUDGET_ENV}: bad entry {piece!r}")
            values[key] = int(num)
    return SearchBudget(
        max_depth=values.get("depth", 30),
        max_nabla_excess=values.get("nabla", 2),
        max_nodes=values.get("nodes", 200_000),
    )


def _budget_from(args) -> SearchBudget:
    base = _env_budget()
    return SearchBudget(
        max_depth=args.depth if args.depth is not None else base.max_depth,
        max_nabla_excess=args.nabla_excess if args.nabla_excess is not None else base.max_nabla_excess,
        max_nodes=args.nodes if args.nodes is not None else base.max_nodes,
    )


def _add_budget_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--depth", type=int, default=None, help="proof height bound")
    p.add_argument("--nabla-excess", type=int, default=None, help="nabla prefix growth bound")
    p.add_argument("--nodes", type=int, default=None, help="search expansion cap")


def _add_calc_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--calc", default="ikd", help="calculus: ikd, ikds, stl, stln (default ikd)")


def _load_proof(path: str) -> ProofTree:
    try:
        if path == "-":
            data = json.load(sys.stdin)
        else:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read proof file {path}: {exc}")
    try:
        return proof_from_json(data)
    except (ProofError, ParseError, ValueError) as exc:
        raise CliError(f"malformed proof: {exc}")


def _checked_proof(path: str, calc: CalculusId) -> ProofTree:
    t = _load_proof(path)
    err = check_proof(t, calc)
    if err is not None:
        raise CliError(f"input proof fails checking at {list(err[0])}: {err[1]}")
    return t


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_parse(args) -> int:
    text = args.input
    if "|-" in text:
        s = parse_sequent(text)
        _emit({"type": "sequent", "canonical": print_sequent(s)})
    else:
        f = parse_formula(text)
        _emit({"type": "formula", "canonical": print_formula(f)})
    return EXIT_OK


def cmd_prove(args) -> int:
    calc = calculus_from_name(args.calc)
    if calc.allow_cut:
        calc = calc.with_cut(False)
    goal = parse_sequent(args.sequent)
    outcome = prove(goal, calc, _budget_from(args))
    if isinstance(outcome, Exhausted):
        _emit({
            "outcome": "exhausted",
            "expansions": outcome.report.expansions,
            "prunes": outcome.report.prunes,
            "budget_hit": list(outcome.report.budget_hit),
        })
        return EXIT_NEGATIVE
    err = check_proof(outcome.proof, calc)  # self-distrust re-validation
    if err is not None:
        raise InternalError(f"found proof failed re-checking: {err[1]}")
    _emit({"outcome": "found", "proof": proof_to_json(outcome.proof)})
    return EXIT_OK


def cmd_check(args) -> int:
    calc = calculus_from_name(args.calc)
    if args.cut:
        calc = calc.with_cut(True)
    if args.hypotheses:
        calc = calc.with_hypotheses(True)
    t = _load_proof(args.proof)
    err = check_proof(t, calc)
    if err is None:
        _emit({"ok": True, "endsequent": print_sequent(t.sequent)})
        return EXIT_OK
    _emit({"ok": False, "path": list(err[0]), "violation": err[1]})
    return EXIT_NEGATIVE


def cmd_translate(args) -> int:
    t = _load_proof(args.proof)
    if args.to == "ikd":
        out = stl_to_ikd(t)
        err = check_proof(out, ikd())
    else:
        out = ikd_to_stl(t)
        err = check_proof(out, calculus_from_name("stl"))
    if err is not None:
        raise InternalError(f"translated proof fails checking: {err[1]}")
    _emit({"proof": proof_to_json(out)})
    return EXIT_OK


def cmd_cutelim(args) -> int:
    t = _checked_proof(args.proof, ikd(allow_cut=True))
    out = eliminate_cuts(t, args.strategy)
    err = check_proof(out, ikd())
    if err is not None:
        raise InternalError(f"cut-free result fails checking: {err[1]}")
    _emit({"proof": proof_to_json(out)})
    return EXIT_OK


def _parse_indices(spec: str) -> list[int]:
    try:
        return [int(x) for x in spec.split(",") if x.strip() != ""]
    except ValueError:
        raise CliError(f"bad index list {spec!r}")


def cmd_interpolate(args) -> int:
    calc = ikd()
    if args.proof:
        t = _checked_proof(args.proof, calc)
    else:
        goal = parse_sequent(args.sequent)
        outcome = prove(goal, calc, _budget_from(args))
        if isinstance(outcome, Exhausted):
            _emit({"outcome": "exhausted", "budget_hit": list(outcome.report.budget_hit)})
            return EXIT_NEGATIVE
        t = outcome.proof
    items = t.sequent.ant.items
    indices = _parse_indices(args.left)
    if any(i < 0 or i >= len(items) for i in indices):
        raise CliError(
            f"--left index out of range for an antecedent of {len(items)} formulas"
        )
    gamma1 = Multiset(items[i] for i in indices)
    result = interpolate(t, gamma1)
    for proof, tag in ((result.left_proof, "left"), (result.right_proof, "right")):
        err = check_proof(proof, calc)
        if err is not None:
            raise InternalError(f"{tag} interpolation proof fails checking: {err[1]}")
    _emit({
        "interpolant": print_formula(result.interpolant),
        "left_proof": proof_to_json(result.left_proof),
        "right_proof": proof_to_json(result.right_proof),
        "trace": list(result.trace),
    })
    return EXIT_OK


def _visser_antecedent(goal) -> VisserAntecedent:
    heyt, dyn = [], []
    for f in goal.ant:
        pre = strip_nabla(f)
        if isinstance(pre.core, HeytImp):
            heyt.append((pre.depth, pre.core.left, pre.core.right))
        elif isinstance(pre.core, DynImp):
            dyn.append((pre.depth, pre.core.left, pre.core.right))
        else:
            raise CliError(
                f"antecedent formula {print_formula(f)} is not nabla^n of an implication"
            )
    return VisserAntecedent(tuple(heyt), tuple(dyn))


def cmd_visser(args) -> int:
    goal = parse_sequent(args.sequent)
    x = _visser_antecedent(goal)
    outcome = prove(goal, ikd(), _budget_from(args))
    if isinstance(outcome, Exhausted):
        _emit({"outcome": "exhausted", "budget_hit": list(outcome.report.budget_hit)})
        return EXIT_NEGATIVE
    if args.mode == "disj":
        verdict = visser_disjunctive(outcome.proof, x)
    elif args.mode == "imp":
        verdict = visser_implicative(outcome.proof, x, args.k)
    else:
        verdict = visser_heyting(outcome.proof, x, args.k)
    payload = {"proof": proof_to_json(verdict.proof)}
    if isinstance(verdict, HeytingPremise):
        payload["verdict"] = "heyting_premise"
        payload["index"] = verdict.index
    elif isinstance(verdict, DynPremise):
        payload["verdict"] = "dyn_premise"
        payload["index"] = verdict.index
    elif isinstance(verdict, LeftDisjunct):
        payload["verdict"] = "left_disjunct"
    elif isinstance(verdict, RightDisjunct):
        payload["verdict"] = "right_disjunct"
    elif isinstance(verdict, Residual):
        payload["verdict"] = "residual"
        payload["heyting_indices"] = list(verdict.heyting_indices)
        payload["dyn_indices"] = list(verdict.dyn_indices)
    _emit(payload)
    return EXIT_OK


def cmd_split_disjunction(args) -> int:
    text = args.input
    goal = parse_sequent(text) if "|-" in text else parse_sequent("|- " + text)
    outcome = prove(goal, ikd(), _budget_from(args))
    if isinstance(outcome, Exhausted):
        _emit({"outcome": "exhausted", "budget_hit": list(outcome.report.budget_hit)})
        return EXIT_NEGATIVE
    result = split_disjunction(outcome.proof)
    side = "left" if isinstance(result, Left) else "right"
    _emit({"side": side, "proof": proof_to_json(result.proof)})
    return EXIT_OK


def cmd_deduce(args) -> int:
    assumption = parse_formula(args.assumption)
    if args.action == "export":
        t = _checked_proof(args.proof, ikd(allow_cut=True, allow_hypotheses=True))
        result = deduction_export(t, assumption)
        err = check_proof(result.proof, ikd())
        if err is not None:
            raise InternalError(f"exported proof fails checking: {err[1]}")
        _emit({
            "sigma": [print_formula(f) for f in result.sigma],
            "proof": proof_to_json(result.proof),
        })
        return EXIT_OK
    if not args.sigma:
        raise CliError("deduce import requires --sigma")
    sigma = Multiset(parse_formula(s) for s in args.sigma.split(";") if s.strip())
    t = _checked_proof(args.proof, ikd(allow_cut=True))
    out = deduction_import(assumption, sigma, t)
    err = check_proof(out, ikd(allow_cut=True, allow_hypotheses=True))
    if err is not None:
        raise InternalError(f"imported proof fails checking: {err[1]}")
    _emit({"proof": proof_to_json(out)})
    return EXIT_OK


def cmd_refute(args) -> int:
    goal = parse_sequent(args.sequent)
    if args.heyting == "auto":
        need = True
    else:
        need = args.heyting == "yes"
    cm = refute(goal, args.max_size, need)
    if cm is None:
        _emit({"refuted": False, "max_size": args.max_size})
        return EXIT_NEGATIVE
    _emit({"refuted": True, "countermodel": cm.to_json()})
    return EXIT_OK


def cmd_render(args) -> int:
    t = _load_proof(args.proof)
    sys.stdout.write(render(t, args.format))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nablaseq",
        description="prover, proof checker and proof transformations for the nabla sequent calculi",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a formula or sequent and print its canonical form")
    p.add_argument("input")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("prove", help="bounded backward proof search")
    _add_calc_flag(p)
    _add_budget_flags(p)
    p.add_argument("sequent")
    p.set_defaults(fn=cmd_prove)

    p = sub.add_parser("check", help="check a proof file")
    _add_calc_flag(p)
    p.add_argument("--cut", action="store_true", help="allow the cut rule")
    p.add_argument("--hypotheses", action="store_true", help="allow hypothesis leaves")
    p.add_argument("proof", help="proof JSON file, or - for stdin")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("translate", help="translate a proof between the calculi")
    p.add_argument("--to", choices=("ikd", "stl"), required=True)
    p.add_argument("proof")
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("cutelim", help="eliminate cut nodes from a proof")
    p.add_argument("--strategy", choices=("topmost", "bottommost"), default="topmost")
    p.add_argument("proof")
    p.set_defaults(fn=cmd_cutelim)

    p = sub.add_parser("interpolate", help="Maehara interpolation over a split antecedent")
    p.add_argument("--left", required=True, help="comma-separated antecedent indices forming Gamma1")
    p.add_argument("--proof", default=None, help="proof JSON instead of searching")
    _add_budget_flags(p)
    p.add_argument("sequent", nargs="?", default=None)
    p.set_defaults(fn=cmd_interpolate)

    p = sub.add_parser("visser", help="admissible-rule extraction")
    p.add_argument("--mode", choices=("disj", "imp", "heyt"), required=True)
    p.add_argument("--k", type=int, default=0, help="nabla exponent of the succedent")
    _add_budget_flags(p)
    p.add_argument("sequent")
    p.set_defaults(fn=cmd_visser)

    p = sub.add_parser("split-disjunction", help="disjunction property extraction")
    _add_budget_flags(p)
    p.add_argument("input", help="formula A | B, or a sequent |- A | B")
    p.set_defaults(fn=cmd_split_disjunction)

    p = sub.add_parser("deduce", help="deduction theorem: export or import")
    p.add_argument("action", choices=("export", "import"))
    p.add_argument("--assumption", required=True, help="the hypothesis formula A")
    p.add_argument("--sigma", default=None, help="semicolon-separated variants (import)")
    p.add_argument("proof")
    p.set_defaults(fn=cmd_deduce)

    p = sub.add_parser("refute", help="search for a finite-algebra countermodel")
    p.add_argument("--max-size", type=int, default=4, choices=range(1, MAX_SIZE + 1))
    p.add_argument("--heyting", choices=("auto", "yes", "no"), default="auto")
    p.add_argument("sequent")
    p.set_defaults(fn=cmd_refute)

    p = sub.add_parser("render", help="render a proof as text")
    p.add_argument("--format", choices=("ascii", "latex"), default="ascii")
    p.add_argument("proof")
    p.set_defaults(fn=cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "interpolate" and not args.proof and not args.sequent:
        parser.error("interpolate needs a sequent or --proof")
    try:
        return args.fn(args)
    except (CliError, ParseError, ProofError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
