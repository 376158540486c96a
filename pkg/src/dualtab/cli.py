"""Command-line interface.

Commands
--------
prove TERM            decide validity of ``x TERM y``
entail                decide premises |= conclusion (--premise repeatable,
                      --conclusion required); premises and conclusion are
                      terms asserted to denote the full relation
modal FORMULA         decide validity of a modal formula via translation
check-model FORMULA MODELFILE
                      exit 0 when the model+valuation falsify the formula,
                      1 when they satisfy it
fragment TERM         report fragment membership of the simplified term
simplify TERM         print the 1-simplified form of the term

Flags: ``--json`` (machine output), ``--trace`` (stream rule applications
to stderr), ``--max-steps N``, ``--oracle-size K`` (1..4), ``--verify``
(cross-check the verdict with the independent oracles).

Exit codes: 0 valid / falsified, 1 invalid / satisfied, 2 parse error or
malformed input, 3 fragment violation, 4 resource exhausted.

Verdict JSON::

    {"verdict": "valid" | "invalid",
     "proof": <tree> | null,
     "countermodel": {"universe": [..], "relations": {name: [[a,b],..]},
                      "valuation": {var: elem}} | null,
     "stats": {"steps": int, "branches": int, "variables": int}}

Proof-tree nodes carry ``id``, ``parent``, ``children``, ``formulas``
(triples ``[left, term, right]`` with rendered terms), ``rule``,
``premise``, ``variable`` (fresh or instantiating variable of the step)
and ``closed``.  Commands that encode their input (``entail``, ``modal``)
add the encoded/translated term under ``"term"``; ``--verify`` adds
``"verified"`` (true/false/null) and, for ``modal``, the Kripke
cross-check under ``"kripke"``.
"""

from __future__ import annotations

import argparse
import json
import sys

from .engine import Countermodel, Proof, run_procedure, stats_of, verdict_to_json
from .errors import (BudgetExceeded, DualTabError, EmptyPremises,
                     FragmentViolation, ParseError, ResourceExhausted)
from .formulas import RelFormula, parse_formula
from .frontends import (EntailmentProblem, encode_entailment,
                        kripke_countermodel, parse_modal, translate_modal)
from .semantics import (brute_force_countermodel, falsifies_branch,
                        model_from_json, satisfies)
from .terms import (fragment_check, parse_term, render_term, simplify_ones)

EXIT_VALID = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_FRAGMENT = 3
EXIT_RESOURCES = 4


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="dualtab",
        description="Dual-tableau validity prover with countermodel extraction.",
        epilog="Input starting with '-' needs the usual separator, e.g. "
               "dualtab prove --json -- '-(r ; 1)'.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def positive(text):
        value = int(text)
        if value < 1:
            raise argparse.ArgumentTypeError("must be at least 1")
        return value

    def common(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--trace", action="store_true",
                       help="stream rule applications to stderr")
        p.add_argument("--max-steps", type=positive, default=1_000_000, metavar="N")
        p.add_argument("--oracle-size", type=int, default=3, choices=(1, 2, 3, 4),
                       metavar="K", help="universe cap for --verify oracles")
        p.add_argument("--verify", action="store_true",
                       help="cross-check the verdict with the independent oracles")

    p = sub.add_parser("prove", help="decide validity of a term")
    p.add_argument("term")
    common(p)

    p = sub.add_parser("entail", help="decide a relational entailment")
    p.add_argument("--premise", action="append", required=True, metavar="TERM")
    p.add_argument("--conclusion", required=True, metavar="TERM")
    common(p)

    p = sub.add_parser("modal", help="decide a modal formula")
    p.add_argument("formula")
    common(p)

    p = sub.add_parser("check-model", help="evaluate a formula against a model file")
    p.add_argument("formula")
    p.add_argument("model_file")

    p = sub.add_parser("fragment", help="check fragment membership")
    p.add_argument("term")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("simplify", help="apply the 1-identities to a term")
    p.add_argument("term")
    p.add_argument("--json", action="store_true")

    return parser


def _trace_printer(event):
    var = f" with {event['variable']}" if event["variable"] else ""
    print(f"[trace] {event['rule']}: {event['premise']}{var}", file=sys.stderr)


def _emit(payload, as_json, human_lines):
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in human_lines:
            print(line)


def _tree_lines(tree):
    lines = []

    def emit(node_id, depth):
        node = tree.nodes[node_id]
        formulas = ", ".join(f"{f.left} {render_term(f.term)} {f.right}"
                             for f in node.formulas)
        rule = f" [{node.rule}]" if node.rule else ""
        closed = "  *closed*" if node.closed else ""
        lines.append(f"{'  ' * depth}({node.id}){rule} {{{formulas}}}{closed}")
        for child in node.children:
            emit(child, depth + 1)

    emit(0, 0)
    return lines


def _prove_payload(term, args, extra=None):
    trace = _trace_printer if args.trace else None
    verdict = run_procedure(term, max_steps=args.max_steps, trace=trace)
    payload = verdict_to_json(verdict)
    if extra:
        payload.update(extra)
    lines = []
    if isinstance(verdict, Proof):
        lines.append("valid")
        lines.extend(_tree_lines(verdict.tree))
    else:
        lines.append("invalid")
        lines.append(json.dumps(payload["countermodel"], sort_keys=True))
    if args.verify:
        payload["verified"], note = _verify(term, verdict, args.oracle_size)
        if note:
            payload["verify_note"] = note
        lines.append(f"verified: {payload['verified']}")
    stats = stats_of(verdict)
    lines.append(f"steps={stats['steps']} branches={stats['branches']} "
                 f"variables={stats['variables']}")
    return verdict, payload, lines


def _verify(term, verdict, oracle_size):
    if isinstance(verdict, Proof):
        try:
            found = brute_force_countermodel(term, oracle_size)
        except BudgetExceeded as exc:
            return None, str(exc)
        return found is None, None
    ok = falsifies_branch(verdict.model, verdict.valuation, verdict.branch)
    query = RelFormula("x", term, "y")
    ok = ok and not satisfies(verdict.model, verdict.valuation, query)
    return ok, None


def _exit_for(verdict):
    return EXIT_VALID if isinstance(verdict, Proof) else EXIT_INVALID


def cmd_prove(args):
    term = simplify_ones(parse_term(args.term))
    verdict, payload, lines = _prove_payload(term, args)
    _emit(payload, args.json, lines)
    return _exit_for(verdict)


def cmd_entail(args):
    premises = [parse_term(t) for t in args.premise]
    conclusion = parse_term(args.conclusion)
    encoded = encode_entailment(EntailmentProblem(tuple(premises), conclusion))
    extra = {"term": render_term(encoded)}
    verdict, payload, lines = _prove_payload(encoded, args, extra)
    lines.insert(0, f"encoded: {render_term(encoded)}")
    _emit(payload, args.json, lines)
    return _exit_for(verdict)


def cmd_modal(args):
    formula = parse_modal(args.formula)
    translated = translate_modal(formula)
    extra = {"term": render_term(translated)}
    verdict, payload, lines = _prove_payload(translated, args, extra)
    lines.insert(0, f"translated: {render_term(translated)}")
    if args.verify:
        worlds = min(args.oracle_size, 3)
        try:
            refutation = kripke_countermodel(formula, worlds)
        except BudgetExceeded as exc:
            payload["kripke"] = None
            payload["verify_note"] = str(exc)
        else:
            payload["kripke"] = {"refuted": refutation is not None, "worlds": worlds}
            if refutation is not None and isinstance(verdict, Proof):
                payload["verified"] = False
            lines.append(f"kripke refuted (<= {worlds} worlds): {refutation is not None}")
    _emit(payload, args.json, lines)
    return _exit_for(verdict)


def cmd_check_model(args):
    formula = parse_formula(args.formula)
    try:
        with open(args.model_file, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        model, valuation = model_from_json(data)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: malformed model file: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        holds = satisfies(model, valuation, formula)
    except DualTabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    print("satisfied" if holds else "falsified")
    return EXIT_INVALID if holds else EXIT_VALID


def cmd_fragment(args):
    term = simplify_ones(parse_term(args.term))
    verdict = fragment_check(term)
    if args.json:
        payload = {
            "term": render_term(term),
            "accepted": verdict.accepted,
            "offender": render_term(verdict.offender) if verdict.offender else None,
            "clause": verdict.clause,
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        if verdict.accepted:
            print("accepted")
        else:
            print(f"rejected: {verdict.clause}: {render_term(verdict.offender)}")
    return EXIT_VALID if verdict.accepted else EXIT_FRAGMENT


def cmd_simplify(args):
    term = simplify_ones(parse_term(args.term))
    if args.json:
        print(json.dumps({"term": render_term(term)}, indent=2, sort_keys=True))
    else:
        print(render_term(term))
    return EXIT_VALID


_COMMANDS = {
    "prove": cmd_prove,
    "entail": cmd_entail,
    "modal": cmd_modal,
    "check-model": cmd_check_model,
    "fragment": cmd_fragment,
    "simplify": cmd_simplify,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (FragmentViolation, EmptyPremises) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FRAGMENT
    except ResourceExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCES


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
