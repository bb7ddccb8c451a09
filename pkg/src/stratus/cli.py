"""Command-line entry point.

Every subcommand prints either a short human-readable report or, with
``--json``, one JSON envelope::

    {"schema": "stratus/1", "command": [...], "status": "ok", "payload": {...}, "elapsed_ms": 3}

Exit status is 0 on success, 1 when an input file or value is rejected
and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Callable, Sequence

from . import bfext, emitter, ramsey, stratification
from .formula import FormulaSyntaxError, parse_formula, parse_formulas, render

SCHEMA = "stratus/1"

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_USAGE = 2


class InputError(Exception):
    pass


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise InputError(f"cannot read {path}: {err.strerror or err}") from None


def _read_json(path: str):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise InputError(f"{path}: invalid JSON at line {err.lineno} column {err.colno}: {err.msg}") from None


def _names(text: str | None) -> list[str]:
    return [s.strip() for s in (text or "").split(",") if s.strip()]


def _ints(text: str | None) -> list[int]:
    try:
        return [int(s) for s in _names(text)]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# stratify


def cmd_stratify(args) -> dict:
    text = _read_text(args.file)
    formulas = parse_formulas(text, relations=_names(args.relations), syntax=args.syntax)
    if not formulas:
        raise InputError(f"{args.file}: no formulas")
    reports = []
    for f in formulas:
        try:
            reports.append(stratification.report(f))
        except ValueError as err:
            reports.append({"formula": render(f), "status": "error", "error": str(err)})
    return {"results": reports}


def show_stratify(payload: dict) -> str:
    lines = []
    for r in payload["results"]:
        lines.append(r["formula"])
        if r["status"] == "stratified":
            levels = ", ".join(f"{v}={lvl}" for v, lvl in r["levels"].items())
            lines.append(f"  stratified: {levels}")
        elif r["status"] == "conflict":
            steps = " ".join(f"{s['from']}->{s['to']}({s['step']:+d})" for s in r["cycle"])
            lines.append(f"  not stratified, net offset {r['net_offset']}: {steps}")
        else:
            lines.append(f"  error: {r['error']}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# bfext


def _operands(args) -> list:
    """Relations from ``--set`` literals then ``--dag`` files, in order."""
    out = []
    for lit in args.set or ():
        out.append(bfext.from_set_literal(lit).relation)
    for path in args.dag or ():
        out.append(bfext.PointedRelation.from_json(_read_json(path)))
    return out


def _certified(args, count: int) -> list[bfext.Bfext]:
    return [bfext.certify(r) for r in _need(args, count)]


def _codes(codes) -> list[str]:
    return [str(c) for c in sorted(codes)]


def cmd_bfext(args) -> dict:
    op = args.op
    if op == "validate":
        (rel,) = _need(args, 1)
        out = bfext.validate(rel)
        if isinstance(out, bfext.ValidationReport):
            return {"valid": False, "failures": out.to_json()}
        return {"valid": True, "canon": str(out.canon), "nodes": len(rel.nodes)}
    if op == "collapse":
        (rel,) = _need(args, 1)
        b, g = bfext.collapse(rel)
        return {"canon": str(b.canon), "dag": b.relation.to_json(), "map": {str(k): v for k, v in sorted(g.items(), key=lambda kv: repr(kv[0]))}}
    if op == "iso":
        a, b = _certified(args, 2)
        return {"iso": bfext.iso(a, b), "canon": [str(a.canon), str(b.canon)]}
    if op == "eps":
        a, b = _certified(args, 2)
        return {"eps": bfext.eps(a, b)}
    if op == "ext":
        (a,) = _certified(args, 1)
        codes = bfext.ext(a)
        return {"count": len(codes), "codes": _codes(codes)}
    if op == "pow":
        (a,) = _certified(args, 1)
        codes = bfext.pow(a)
        return {"count": len(codes), "codes": _codes(codes)}
    if op == "k":
        if args.n is None or args.n < 0:
            raise InputError("k needs --n with a nonnegative length")
        b = bfext.k_embed(bfext.FinWellOrder.of_length(args.n))
        return {"n": args.n, "canon": str(b.canon), "von_neumann": b.canon == bfext.von_neumann(args.n)}
    if op == "t":
        if args.card is not None:
            return {"card": args.card, "t_card": bfext.t_card(args.card)}
        (a,) = _certified(args, 1)
        image = bfext.t_op(a)
        return {"canon": str(image.canon), "fixed": image.canon == a.canon, "dag": image.relation.to_json()}
    if op == "enum":
        if args.max_nodes is None:
            raise InputError("enum needs --max-nodes")
        codes = bfext.enumerate_bf(args.max_nodes, max_elements=args.max_elements)
        payload = {"max_nodes": args.max_nodes, "count": len(codes)}
        if args.list:
            payload["codes"] = [str(c) for c in codes]
        return payload
    if op == "seg":
        (rel,) = _need(args, 1)
        if args.node is None:
            raise InputError("seg needs --node")
        node = _node_id(rel, args.node)
        part = bfext.seg(rel, node)
        return {"node": args.node, "dag": part.to_json()}
    raise InputError(f"unknown bfext operation {op!r}")


def _need(args, count: int):
    rels = _operands(args)
    if len(rels) != count:
        raise InputError(f"expected {count} operand(s) from --set/--dag, got {len(rels)}")
    return rels


def _node_id(rel, text: str):
    for n in rel.nodes:
        if str(n) == text:
            return n
    raise InputError(f"no node {text!r}")


def show_bfext(payload: dict) -> str:
    lines = []
    for key, value in payload.items():
        if key == "codes":
            lines.append("codes:")
            lines.extend(f"  {c}" for c in value)
        elif isinstance(value, (dict, list)):
            lines.append(f"{key}: {json.dumps(value)}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# ramsey


def _structure(path: str) -> ramsey.FiniteStructure:
    return ramsey.FiniteStructure.from_json(_read_json(path))


def _coloring(path: str) -> ramsey.Coloring:
    data = _read_json(path)
    try:
        assignment = {tuple(s): c for s, c in data["assignment"]}
        return ramsey.Coloring(data["n"], data["k"], data["c"], assignment)
    except (KeyError, TypeError, ValueError) as err:
        if isinstance(err, ramsey.RamseyError):
            raise
        raise InputError(f"{path}: coloring needs n, k, c and assignment [[subset, color], ...]") from None


def _structure_formulas(s: ramsey.FiniteStructure, path: str, syntax: str):
    names = set(s.relations) | {"lt", "le"}
    return parse_formulas(_read_text(path), relations=names, syntax=syntax)


def cmd_ramsey(args) -> dict:
    op = args.op
    if op == "homog":
        col = _coloring(_require(args.coloring, "--coloring"))
        w = ramsey.homogeneous(col, _require(args.m, "--m"))
        if w is None:
            return {"found": False}
        return {"found": True, **w.to_json(), "verified": ramsey.verify_homogeneous(col, w)}
    if op == "check":
        n, k, c, m = (_require(getattr(args, a), f"--{a}") for a in "nkcm")
        witness = ramsey.find_ramsey_counterexample(n, k, c, m, budget=args.budget)
        payload = {"n": n, "k": k, "c": c, "m": m, "result": witness is None}
        if witness is not None:
            payload["counterexample"] = witness.to_json()
        return payload
    if op == "indisc":
        s = _structure(_require(args.structure, "--structure"))
        formulas = _structure_formulas(s, _require(args.formulas, "--formulas"), args.syntax)
        seq = ramsey.extract_indiscernibles(s, formulas, _require(args.m, "--m"), k=args.k)
        return {"found": seq is not None, "sequence": list(seq) if seq is not None else None}
    if op == "stabilize":
        s = _structure(_require(args.structure, "--structure"))
        terms = _names(_require(args.terms, "--terms"))
        missing = [t for t in terms if t not in s.functions]
        if missing:
            raise InputError(f"structure has no function {missing[0]!r}")
        within = _ints(args.within) if args.within else None
        w = ramsey.stabilize_terms(s, terms, _require(args.z, "--z"), _require(args.m, "--m"), within=within)
        if w is None:
            return {"found": False}
        return {"found": True, **w.to_json()}
    if op == "eval":
        s = _structure(_require(args.structure, "--structure"))
        names = set(s.relations) | {"lt", "le"}
        f = parse_formula(_require(args.formula, "--formula"), relations=names, syntax=args.syntax)
        env = {}
        for item in _names(args.env):
            var, sep, value = item.partition("=")
            if not sep:
                raise InputError(f"--env entries look like x=0, got {item!r}")
            try:
                env[var.strip()] = int(value)
            except ValueError:
                raise InputError(f"--env value for {var!r} must be an integer") from None
        return {"formula": render(f), "value": ramsey.evaluate(s, f, env)}
    raise InputError(f"unknown ramsey operation {op!r}")


def _require(value, flag: str):
    if value is None:
        raise InputError(f"missing {flag}")
    return value


def show_ramsey(payload: dict) -> str:
    return "\n".join(f"{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}" for k, v in payload.items())


# ---------------------------------------------------------------------------
# emit


def cmd_emit(args) -> dict:
    formulas = []
    if args.formulas:
        formulas = parse_formulas(_read_text(args.formulas), relations=_names(args.relations), syntax=args.syntax)
    terms = [emitter.SkolemTermSig.parse(t) for t in _names(args.terms)]
    tuples = None
    if args.index_tuples:
        tuples = [tuple(_ints(chunk)) for chunk in args.index_tuples.split(";") if chunk.strip()]
    sel = emitter.SchemeSelection(args.theory, args.n, formulas, terms, tuples)
    skipped: list = []
    instances = emitter.instantiate(sel, skipped)
    document = emitter.emit(instances, args.format)
    if args.output:
        Path(args.output).write_text(document, encoding="utf-8")
    return {
        "theory": sel.theory,
        "count": len(instances),
        "names": [i.name for i in instances],
        "skipped": [s.to_json() for s in skipped],
        "document": document,
    }


def show_emit(payload: dict) -> str:
    out = payload["document"].rstrip("\n")
    for s in payload["skipped"]:
        out += f"\nskipped {s['scheme_id']} {s['term']}{s['indices']}: {s['reason']}"
    return out


# ---------------------------------------------------------------------------
# driver


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON envelope")

    parser = argparse.ArgumentParser(prog="stratus", description="Stratification, hereditarily finite sets, Ramsey search and axiom emission.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stratify", parents=[common], help="decide stratification of formulas in a file")
    p.add_argument("file", help="formula file, or - for stdin")
    p.add_argument("--syntax", choices=("sexpr", "infix"), default="sexpr")
    p.add_argument("--relations", help="extra predicate names, comma separated")
    p.set_defaults(run=cmd_stratify, show=show_stratify)

    p = sub.add_parser("bfext", parents=[common], help="operations on hereditarily finite sets")
    p.add_argument("op", choices=("validate", "collapse", "iso", "eps", "ext", "pow", "k", "t", "enum", "seg"))
    p.add_argument("--set", action="append", help="brace literal such as {{},{{}}}; repeatable")
    p.add_argument("--dag", action="append", help="JSON file with nodes, edges and top; repeatable")
    p.add_argument("--n", type=int, help="length of the well-order for k")
    p.add_argument("--card", type=int, help="cardinal for t")
    p.add_argument("--node", help="node id for seg")
    p.add_argument("--max-nodes", type=int, help="node bound for enum")
    p.add_argument("--max-elements", type=int, help="element bound for enum")
    p.add_argument("--list", action="store_true", help="list enumerated codes")
    p.set_defaults(run=cmd_bfext, show=show_bfext)

    p = sub.add_parser("ramsey", parents=[common], help="homogeneous sets and indiscernibles")
    p.add_argument("op", choices=("homog", "check", "indisc", "stabilize", "eval"))
    for name in ("n", "k", "c", "m", "z", "budget"):
        p.add_argument(f"--{name}", type=int)
    p.add_argument("--coloring", help="coloring JSON file")
    p.add_argument("--structure", help="structure JSON file")
    p.add_argument("--formulas", help="formula file")
    p.add_argument("--formula", help="formula text for eval")
    p.add_argument("--env", help="assignment such as x=0,y=2")
    p.add_argument("--terms", help="function names, comma separated")
    p.add_argument("--within", help="restrict stabilize to these elements")
    p.add_argument("--syntax", choices=("sexpr", "infix"), default="sexpr")
    p.set_defaults(run=cmd_ramsey, show=show_ramsey)

    p = sub.add_parser("emit", parents=[common], help="instantiate W1, W2 or W3 axiom schemes")
    p.add_argument("--theory", required=True, type=str.upper, choices=emitter.THEORIES)
    p.add_argument("--n", required=True, type=int, help="emit constants c_-n ... c_n")
    p.add_argument("--formulas", help="formula file")
    p.add_argument("--relations", help="extra predicate names in the formula file")
    p.add_argument("--syntax", choices=("sexpr", "infix"), default="sexpr")
    p.add_argument("--terms", help="Skolem terms as name/arity, comma separated")
    p.add_argument("--index-tuples", help="index tuples such as '-1;0;0,1'")
    p.add_argument("--format", choices=emitter.FORMATS, default="sexpr")
    p.add_argument("--output", help="also write the document here")
    p.set_defaults(run=cmd_emit, show=show_emit)
    return parser


_INPUT_ERRORS = (
    InputError,
    FormulaSyntaxError,
    bfext.BfextError,
    ramsey.RamseyError,
    emitter.EmitterError,
    ValueError,
    RecursionError,
)


def run(argv: Sequence[str], out=None) -> int:
    """Parse *argv*, dispatch, print the report and return the exit code."""
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    start = time.perf_counter()
    command: Callable = args.run
    try:
        payload = command(args)
        status, code = "ok", EXIT_OK
    except _INPUT_ERRORS as err:
        payload, status, code = {"error": str(err)}, "error", EXIT_INPUT
    elapsed = round((time.perf_counter() - start) * 1000)
    if args.json:
        envelope = {"schema": SCHEMA, "command": list(argv), "status": status, "payload": payload, "elapsed_ms": elapsed}
        print(json.dumps(envelope), file=out)
    elif status == "ok":
        print(args.show(payload), file=out)
    else:
        print(f"stratus: error: {payload['error']}", file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
