"""Finite fragments of the indiscernibility theories W1, W2 and W3.

Each theory extends set theory with a unary predicate ``C``, constants
``c_i`` for integers ``i`` and, in W3, a unary function ``fhat`` and a
constant ``beta``.  Its axiom schemes range over all formulas, all Skolem
terms and all increasing integer index tuples; a :class:`SchemeSelection`
picks finitely many of each and the ``instantiate_*`` functions write out
the corresponding sentences.

Sentences live in a small extended language: the core connectives and
quantifiers over atoms whose arguments are terms (variables, constants
and applications).  ``lt``, ``le``, ``ordinal`` and ``omega`` are
primitive symbols.  Bounded quantifiers are spelled out, so
``(forall x in omega) phi`` becomes ``(forall x (implies (in x omega) phi))``.
"""
from __future__ import annotations

import itertools
import json
import logging
import re
from dataclasses import dataclass, field
from typing import Sequence, Union

from .formula import (
    Binary,
    Equality,
    Formula,
    FormulaSyntaxError,
    Membership,
    Negation,
    Pairing,
    Quantified,
    Relation,
    SExpr,
    Sethood,
    Token,
    Var,
    free_vars,
    read_sexprs,
    render,
    substitute,
    variables,
)

__all__ = [
    "Const",
    "App",
    "Pred",
    "Sentence",
    "SkolemTermSig",
    "SchemeSelection",
    "AxiomInstance",
    "SkippedInstance",
    "EmitterError",
    "instantiate",
    "instantiate_w1",
    "instantiate_w2",
    "instantiate_w3",
    "emit",
    "parse_document",
    "parse_sentence",
    "parse_tptp_formula",
    "render_tptp",
    "to_extended",
    "expected_count",
]

log = logging.getLogger(__name__)

THEORIES = ("W1", "W2", "W3")
FORMATS = ("sexpr", "tptp")


class EmitterError(ValueError):
    pass


# ---------------------------------------------------------------------------
# the extended language


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple


@dataclass(frozen=True)
class Pred:
    name: str
    args: tuple


Term = Union[Var, Const, App]
Sentence = Union[Pred, Negation, Binary, Quantified]

OMEGA = Const("omega")
BETA = Const("beta")
_CONST = re.compile(r"c_(m?)([0-9]+)\Z")
_RESERVED_CONSTS = {"omega", "beta"}
_SYMBOL = re.compile(r"[a-z][A-Za-z0-9]*\Z")


def const(i: int) -> Const:
    """``c_i``, with negative subscripts written ``c_m<abs>``."""
    return Const(f"c_m{-i}" if i < 0 else f"c_{i}")


def _index_label(i: int) -> str:
    return f"m{-i}" if i < 0 else str(i)


@render.register
def _(t: Const) -> str:
    return t.name


@render.register
def _(t: App) -> str:
    return "(" + " ".join([t.fn, *map(render, t.args)]) + ")"


@render.register
def _(p: Pred) -> str:
    return "(" + " ".join([p.name, *map(render, p.args)]) + ")"


def _and(parts: Sequence[Sentence]) -> Sentence:
    *rest, last = parts
    for p in reversed(rest):
        last = Binary("and", p, last)
    return last


def _implies(a, b) -> Binary:
    return Binary("implies", a, b)


def _forall(v: Var, body) -> Quantified:
    return Quantified("forall", v, body)


def _forall_in(v: Var, bound: Term, body) -> Quantified:
    return _forall(v, _implies(Pred("in", (v, bound)), body))


def _exists_in(v: Var, bound: Term, body) -> Quantified:
    return Quantified("exists", v, Binary("and", Pred("in", (v, bound)), body))


def to_extended(f: Formula) -> Sentence:
    """Lift a core formula into the extended language."""
    if isinstance(f, Membership):
        return Pred("in", (f.element, f.container))
    if isinstance(f, Equality):
        return Pred("=", (f.left, f.right))
    if isinstance(f, Sethood):
        return Pred("S", (f.arg,))
    if isinstance(f, Pairing):
        return Pred("P", (f.first, f.second, f.pair))
    if isinstance(f, Relation):
        return Pred(f.name, f.args)
    if isinstance(f, Negation):
        return Negation(to_extended(f.body))
    if isinstance(f, Binary):
        return Binary(f.connective, to_extended(f.left), to_extended(f.right))
    if isinstance(f, Quantified):
        return Quantified(f.quantifier, f.var, to_extended(f.body))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# selections and instances


@dataclass(frozen=True)
class SkolemTermSig:
    name: str
    arity: int

    def __post_init__(self):
        if not _SYMBOL.match(self.name):
            raise EmitterError(f"term name {self.name!r} must be a lowercase letter followed by letters or digits")
        if self.name == "fhat" or self.name in _RESERVED_CONSTS:
            raise EmitterError(f"term name {self.name!r} is reserved")
        if not isinstance(self.arity, int) or self.arity < 1:
            raise EmitterError(f"term {self.name!r} needs a positive arity")

    @classmethod
    def parse(cls, text: str) -> "SkolemTermSig":
        """Read ``name/arity``."""
        name, sep, arity = text.strip().partition("/")
        if not sep or not arity.strip().isdigit():
            raise EmitterError(f"expected name/arity, got {text!r}")
        return cls(name.strip(), int(arity))


@dataclass(frozen=True)
class SchemeSelection:
    """What to instantiate.

    Constants run over ``c_-n ... c_n``.  ``index_tuples``, when given,
    lists the increasing index tuples to use; each term takes those of
    its own length.  Otherwise every increasing tuple in ``[-n, n]`` is used.
    """

    theory: str
    n_constants: int
    formulas: tuple = ()
    terms: tuple = ()
    index_tuples: tuple | None = None

    def __post_init__(self):
        theory = str(self.theory).upper()
        if theory not in THEORIES:
            raise EmitterError(f"unknown theory {self.theory!r}; expected one of {', '.join(THEORIES)}")
        object.__setattr__(self, "theory", theory)
        object.__setattr__(self, "formulas", tuple(self.formulas))
        object.__setattr__(self, "terms", tuple(self.terms))
        n = self.n_constants
        if not isinstance(n, int) or n < 0:
            raise EmitterError("n_constants must be a nonnegative integer")
        names = [t.name for t in self.terms]
        if len(set(names)) != len(names):
            raise EmitterError("term names must be distinct")
        available = 2 * n + 1
        for t in self.terms:
            if t.arity > available:
                raise EmitterError(f"term {t.name!r} has arity {t.arity} but only {available} constants are available")
        for i, f in enumerate(self.formulas):
            arity = formula_arity(f)
            if arity > available:
                raise EmitterError(f"formula {i} has arity {arity} but only {available} constants are available")
            for v in variables(f):
                if _CONST.match(v.name) or v.name in _RESERVED_CONSTS:
                    raise EmitterError(f"formula {i} uses the reserved name {v} as a variable")
        if self.index_tuples is not None:
            tuples = tuple(sorted({tuple(t) for t in self.index_tuples}))
            for t in tuples:
                if not t or list(t) != sorted(set(t)) or t[0] < -n or t[-1] > n:
                    raise EmitterError(f"index tuple {list(t)} is not increasing within [-{n}, {n}]")
            object.__setattr__(self, "index_tuples", tuples)

    @property
    def indices(self) -> range:
        return range(-self.n_constants, self.n_constants + 1)

    def tuples_for(self, arity: int) -> list[tuple[int, ...]]:
        if self.index_tuples is None:
            return list(itertools.combinations(self.indices, arity))
        return [t for t in self.index_tuples if len(t) == arity]


@dataclass(frozen=True)
class AxiomInstance:
    scheme_id: str
    sentence: Sentence
    provenance: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def name(self) -> str:
        """Stable identifier built from the clause label and provenance."""
        theory, clause = self.scheme_id.split(".")
        parts = [theory.lower(), clause]
        p = self.provenance
        if "constants" in p:
            parts += [_index_label(i) for i in p["constants"]]
        if "formula" in p:
            parts.append(str(p["formula"]))
        if "term" in p:
            parts.append(p["term"])
            parts += [_index_label(i) for i in p["i"]]
            if "j" in p:
                parts.append("")
                parts += [_index_label(j) for j in p["j"]]
        return "_".join(parts)

    def text(self) -> str:
        return render(self.sentence)


@dataclass(frozen=True)
class SkippedInstance:
    scheme_id: str
    term: str
    indices: tuple[int, ...]
    reason: str

    def to_json(self) -> dict:
        return {"scheme_id": self.scheme_id, "term": self.term, "indices": list(self.indices), "reason": self.reason}


_POSITIONAL = re.compile(r"x([1-9][0-9]*)\Z")


def formula_arity(f: Formula) -> int:
    """Largest ``n`` with ``x<n>`` free in *f*; other free variables are errors."""
    top = 0
    for v in free_vars(f):
        match = _POSITIONAL.match(v.name)
        if v.index or not match:
            raise EmitterError(f"free variable {v} is not one of x1, x2, ...")
        top = max(top, int(match.group(1)))
    return top


# ---------------------------------------------------------------------------
# clauses

_X = Var("x")
_Y = Var("y")


def _in_c_implies_omega() -> Sentence:
    return _forall(_X, _implies(Pred("C", (_X,)), Pred("in", (_X, OMEGA))))


def _c_cofinal() -> Sentence:
    return _forall_in(_X, OMEGA, _exists_in(_Y, OMEGA, Binary("and", Pred("lt", (_X, _Y)), Pred("C", (_Y,)))))


def _indiscernible(f: Formula) -> Sentence:
    n = formula_arity(f)
    xs = [Var(f"x{i}") for i in range(1, n + 1)]
    ys = [Var(f"y{i}") for i in range(1, n + 1)]
    phi_x = to_extended(f)
    phi_y = to_extended(substitute(f, dict(zip(xs, ys))))
    body = Binary("iff", phi_x, phi_y)
    hyps = [Pred("lt", (a, b)) for a, b in zip(xs, xs[1:])]
    hyps += [Pred("lt", (a, b)) for a, b in zip(ys, ys[1:])]
    for x, y in zip(xs, ys):
        hyps += [Pred("C", (x,)), Pred("C", (y,))]
    if hyps:
        body = _implies(_and(hyps), body)
    for v in reversed(xs + ys):
        body = _forall(v, body)
    return body


def _term(t: SkolemTermSig, idx: Sequence[int]) -> App:
    return App(t.name, tuple(const(i) for i in idx))


def _fixed_below_c(t: SkolemTermSig, i: Sequence[int], j: Sequence[int]) -> Sentence:
    ti, tj = _term(t, i), _term(t, j)
    below = _forall(_X, _implies(Pred("C", (_X,)), Pred("lt", (ti, _X))))
    return _implies(below, Pred("=", (ti, tj)))


def _ordinal_monotone(t: SkolemTermSig, i: Sequence[int]) -> Sentence:
    ti = _term(t, i)
    shifted = _term(t, [k + 1 for k in i])
    return _implies(Pred("ordinal", (ti,)), Pred("le", (ti, shifted)))


def _common(sel: SchemeSelection, tag: str) -> list[AxiomInstance]:
    out = [
        AxiomInstance(f"{tag}.i", _in_c_implies_omega()),
        AxiomInstance(f"{tag}.ii", _c_cofinal()),
    ]
    for i in sel.indices:
        out.append(AxiomInstance(f"{tag}.iii", Pred("C", (const(i),)), {"constants": [i]}))
    for i, j in itertools.combinations(sel.indices, 2):
        out.append(AxiomInstance(f"{tag}.iv", Pred("lt", (const(i), const(j))), {"constants": [i, j]}))
    return out


def _formula_clauses(sel: SchemeSelection, label: str) -> list[AxiomInstance]:
    return [
        AxiomInstance(label, _indiscernible(f), {"formula": k, "text": render(f)})
        for k, f in enumerate(sel.formulas)
    ]


def _term_clauses(sel: SchemeSelection, label: str) -> list[AxiomInstance]:
    # the scheme is symmetric in spirit; each unordered pair of distinct
    # tuples is emitted once, smaller tuple first
    out = []
    for t in sel.terms:
        for i, j in itertools.combinations(sel.tuples_for(t.arity), 2):
            out.append(AxiomInstance(label, _fixed_below_c(t, i, j), {"term": t.name, "i": list(i), "j": list(j)}))
    return out


def _require(sel: SchemeSelection, theory: str):
    if sel.theory != theory:
        raise EmitterError(f"selection is for {sel.theory}, not {theory}")


def instantiate_w1(sel: SchemeSelection) -> list[AxiomInstance]:
    _require(sel, "W1")
    return _common(sel, "W1") + _formula_clauses(sel, "W1.v") + _term_clauses(sel, "W1.vi")


def instantiate_w2(sel: SchemeSelection, skipped: list | None = None) -> list[AxiomInstance]:
    """W1's clauses followed by ordinal monotonicity for each term and tuple.

    Tuples whose shift by one leaves ``[-n, n]`` are not emitted; they are
    logged and, if *skipped* is a list, appended to it.
    """
    _require(sel, "W2")
    out = _common(sel, "W2") + _formula_clauses(sel, "W2.v") + _term_clauses(sel, "W2.vi")
    n = sel.n_constants
    for t in sel.terms:
        for i in sel.tuples_for(t.arity):
            if i[-1] + 1 > n:
                miss = SkippedInstance("W2.vii", t.name, i, f"shifted index {i[-1] + 1} exceeds {n}")
                log.info("skipping %s for %s%s: %s", miss.scheme_id, t.name, list(i), miss.reason)
                if skipped is not None:
                    skipped.append(miss)
                continue
            out.append(AxiomInstance(
                "W2.vii", _ordinal_monotone(t, i), {"term": t.name, "i": list(i), "shifted": [k + 1 for k in i]}
            ))
    return out


def instantiate_w3(sel: SchemeSelection) -> list[AxiomInstance]:
    _require(sel, "W3")
    x, y = _X, _Y
    fixed = [
        AxiomInstance("W3.v", Pred("ordinal", (BETA,))),
        AxiomInstance("W3.vi", _forall_in(x, OMEGA, Pred("in", (App("fhat", (x,)), BETA)))),
        AxiomInstance("W3.vii", _forall_in(x, OMEGA, _forall_in(y, OMEGA, _implies(
            Pred("lt", (x, y)), Pred("lt", (App("fhat", (y,)), App("fhat", (x,))))
        )))),
    ]
    return _common(sel, "W3") + fixed + _formula_clauses(sel, "W3.viii") + _term_clauses(sel, "W3.ix")


def instantiate(sel: SchemeSelection, skipped: list | None = None) -> list[AxiomInstance]:
    if sel.theory == "W1":
        return instantiate_w1(sel)
    if sel.theory == "W2":
        return instantiate_w2(sel, skipped)
    return instantiate_w3(sel)


def expected_count(sel: SchemeSelection) -> int:
    """Closed-form number of instances for *sel*."""
    from math import comb

    size = 2 * sel.n_constants + 1
    total = 2 + size + comb(size, 2) + len(sel.formulas)
    total += sum(comb(len(sel.tuples_for(t.arity)), 2) for t in sel.terms)
    if sel.theory == "W2":
        total += sum(sum(1 for i in sel.tuples_for(t.arity) if i[-1] < sel.n_constants) for t in sel.terms)
    if sel.theory == "W3":
        total += 3
    return total


# ---------------------------------------------------------------------------
# parsing the extended s-expression language

_CONNECTIVES = ("and", "or", "implies", "iff")


def _fail(node, msg, expected):
    line, col = (node.line, node.column) if node is not None else (1, 1)
    raise FormulaSyntaxError(msg, line, col, set(expected))


def _sexpr_term(node) -> Term:
    if isinstance(node, Token):
        text = node.text
        if _CONST.match(text) or text in _RESERVED_CONSTS:
            return Const(text)
        if text in ("(", ")") or not re.match(r"[A-Za-z_][A-Za-z0-9_']*(?:#[0-9]+)?\Z", text):
            _fail(node, f"invalid term {text!r}", {"<term>"})
        return Var.parse(text)
    if not node.items or not isinstance(node.items[0], Token):
        _fail(node, "application needs a function symbol", {"<symbol>"})
    if len(node.items) < 2:
        _fail(node, "application needs arguments", {"<term>"})
    return App(node.items[0].text, tuple(_sexpr_term(a) for a in node.items[1:]))


def _sexpr_sentence(node) -> Sentence:
    if isinstance(node, Token):
        _fail(node, f"expected a formula, got {node.text!r}", {"("})
    items = node.items
    if not items or not isinstance(items[0], Token):
        _fail(node, "expected a head symbol", {"<symbol>"})
    head = items[0].text
    args = items[1:]
    if head == "not":
        if len(args) != 1:
            _fail(node, "'not' takes one formula", {"<formula>"})
        return Negation(_sexpr_sentence(args[0]))
    if head in _CONNECTIVES:
        if len(args) != 2:
            _fail(node, f"'{head}' takes two formulas", {"<formula>"})
        return Binary(head, _sexpr_sentence(args[0]), _sexpr_sentence(args[1]))
    if head in ("forall", "exists"):
        if len(args) != 2 or not isinstance(args[0], Token):
            _fail(node, f"'{head}' takes a variable and a formula", {"<variable>"})
        var = _sexpr_term(args[0])
        if not isinstance(var, Var):
            _fail(args[0], f"cannot bind {args[0].text!r}", {"<variable>"})
        return Quantified(head, var, _sexpr_sentence(args[1]))
    if not args:
        _fail(node, f"predicate {head!r} needs arguments", {"<term>"})
    return Pred(head, tuple(_sexpr_term(a) for a in args))


def parse_sentence(text: str) -> Sentence:
    """Parse one sentence of the extended s-expression language."""
    nodes = read_sexprs(text)
    if len(nodes) != 1:
        raise FormulaSyntaxError("expected exactly one sentence", 1, 1, {"("})
    return _sexpr_sentence(nodes[0])


# ---------------------------------------------------------------------------
# TPTP-like rendering and parsing

_TPTP_LOWER = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_TPTP_BINARY = {"and": "&", "or": "|", "implies": "=>", "iff": "<=>"}
_TPTP_CONNECTIVE = {v: k for k, v in _TPTP_BINARY.items()}


def _tptp_symbol(name: str) -> str:
    if _TPTP_LOWER.match(name):
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _tptp_var(v: Var) -> str:
    # '_' doubles, '#' and "'" get two-character escapes
    body = v.name.replace("_", "__").replace("'", "_q")
    if v.index:
        body += f"_h{v.index}"
    return "V" + body


def _untptp_var(text: str) -> Var:
    body = text[1:]
    out = []
    index = 0
    i = 0
    while i < len(body):
        ch = body[i]
        if ch != "_":
            out.append(ch)
            i += 1
            continue
        code = body[i + 1:i + 2]
        if code == "_":
            out.append("_")
        elif code == "q":
            out.append("'")
        elif code == "h" and body[i + 2:].isdigit():
            index = int(body[i + 2:])
            break
        else:
            raise FormulaSyntaxError(f"bad variable {text!r}", 1, 1, {"<variable>"})
        i += 2
    return Var("".join(out), index)


def _tptp_term(t: Term) -> str:
    if isinstance(t, Var):
        return _tptp_var(t)
    if isinstance(t, Const):
        return _tptp_symbol(t.name)
    return f"{_tptp_symbol(t.fn)}({', '.join(map(_tptp_term, t.args))})"


def render_tptp(s: Sentence) -> str:
    """Fully parenthesised TPTP first-order syntax."""
    if isinstance(s, Pred):
        if s.name == "=":
            return f"({_tptp_term(s.args[0])} = {_tptp_term(s.args[1])})"
        return f"{_tptp_symbol(s.name)}({', '.join(map(_tptp_term, s.args))})"
    if isinstance(s, Negation):
        return f"~ {render_tptp(s.body)}"
    if isinstance(s, Binary):
        return f"({render_tptp(s.left)} {_TPTP_BINARY[s.connective]} {render_tptp(s.right)})"
    if isinstance(s, Quantified):
        q = "!" if s.quantifier == "forall" else "?"
        return f"({q} [{_tptp_var(s.var)}] : {render_tptp(s.body)})"
    raise TypeError(f"cannot render {s!r}")


_TPTP_TOKEN = re.compile(
    r"\s+|%[^\n]*|(?P<tok><=>|=>|'(?:[^'\\]|\\.)*'|[A-Za-z][A-Za-z0-9_]*|[()\[\],:.~&|=!?])"
)


class _TptpParser:
    def __init__(self, text: str):
        self.tokens: list[tuple[str, int, int]] = []
        line, start = 1, 0
        pos = 0
        while pos < len(text):
            m = _TPTP_TOKEN.match(text, pos)
            if not m:
                raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, pos - start + 1, {"<token>"})
            if m.group("tok"):
                self.tokens.append((m.group("tok"), line, pos - start + 1))
            chunk = m.group(0)
            if "\n" in chunk:
                line += chunk.count("\n")
                start = pos + chunk.rindex("\n") + 1
            pos = m.end()
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        if self.i >= len(self.tokens):
            raise FormulaSyntaxError("unexpected end of input", 1, 1, {expected or "<token>"})
        tok, line, col = self.tokens[self.i]
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, got {tok!r}", line, col, {expected})
        self.i += 1
        return tok

    def document(self) -> list[tuple[str, Sentence]]:
        out = []
        while self.peek() is not None:
            self.take("fof")
            self.take("(")
            name = self.take()
            self.take(",")
            self.take()
            self.take(",")
            body = self.formula()
            self.take(")")
            self.take(".")
            out.append((name, body))
        return out

    def formula(self) -> Sentence:
        left = self.unitary()
        op = self.peek()
        if op in _TPTP_CONNECTIVE:
            self.take()
            return Binary(_TPTP_CONNECTIVE[op], left, self.unitary())
        return left

    def unitary(self) -> Sentence:
        tok = self.peek()
        if tok == "(":
            self.take()
            inner = self.formula()
            self.take(")")
            return inner
        if tok == "~":
            self.take()
            return Negation(self.unitary())
        if tok in ("!", "?"):
            self.take()
            self.take("[")
            names = [self.take()]
            while self.peek() == ",":
                self.take()
                names.append(self.take())
            self.take("]")
            self.take(":")
            body = self.unitary()
            for name in reversed(names):
                body = Quantified("forall" if tok == "!" else "exists", _untptp_var(name), body)
            return body
        return self.atom()

    def atom(self) -> Sentence:
        left = self.term(predicate=True)
        if self.peek() == "=":
            self.take()
            right = self.term()
            return Pred("=", (_as_term(left), right))
        if isinstance(left, Pred) and left.args:
            return left
        raise FormulaSyntaxError("expected an atom", *self._where(), {"<atom>"})

    def _where(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i][1:]
        return (1, 1)

    def term(self, predicate: bool = False):
        tok = self.take()
        if tok[0].isupper():
            return _untptp_var(tok)
        name = tok[1:-1].replace("\\'", "'").replace("\\\\", "\\") if tok.startswith("'") else tok
        if not (tok.startswith("'") or tok[0].islower()):
            raise FormulaSyntaxError(f"unexpected {tok!r}", *self._where(), {"<term>"})
        if self.peek() != "(":
            return Pred(name, ()) if predicate else Const(name)
        self.take("(")
        args = [self.term()]
        while self.peek() == ",":
            self.take()
            args.append(self.term())
        self.take(")")
        return Pred(name, tuple(args)) if predicate else App(name, tuple(args))


def _as_term(x) -> Term:
    if isinstance(x, Pred):
        return App(x.name, x.args) if x.args else Const(x.name)
    return x


def parse_tptp_formula(text: str) -> Sentence:
    p = _TptpParser(text)
    out = p.formula()
    if p.peek() is not None:
        raise FormulaSyntaxError("trailing input", *p._where(), {"<end>"})
    return out


# ---------------------------------------------------------------------------
# documents


def _provenance_text(inst: AxiomInstance) -> str:
    return json.dumps(inst.provenance, sort_keys=True, ensure_ascii=False)


def emit(instances: Sequence[AxiomInstance], format: str = "sexpr") -> str:
    """Serialize *instances*, one named axiom each, after a header comment."""
    if format not in FORMATS:
        raise EmitterError(f"unknown format {format!r}; expected one of {', '.join(FORMATS)}")
    comment = ";" if format == "sexpr" else "%"
    lines = [f"{comment} stratus axiom instances: {len(instances)}"]
    for inst in instances:
        lines.append(f"{comment} {inst.scheme_id} {_provenance_text(inst)}")
        if format == "sexpr":
            lines.append(f"(axiom {inst.name} {render(inst.sentence)})")
        else:
            lines.append(f"fof({inst.name}, axiom, {render_tptp(inst.sentence)}).")
    return "\n".join(lines) + "\n"


def parse_document(text: str, format: str = "sexpr") -> list[tuple[str, Sentence]]:
    """Read back the ``(name, sentence)`` pairs of an emitted document."""
    if format == "tptp":
        return _TptpParser(text).document()
    if format != "sexpr":
        raise EmitterError(f"unknown format {format!r}")
    out = []
    for node in read_sexprs(text):
        if (
            not isinstance(node, SExpr)
            or len(node.items) != 3
            or not isinstance(node.items[0], Token)
            or node.items[0].text != "axiom"
            or not isinstance(node.items[1], Token)
        ):
            _fail(node, "expected (axiom <name> <sentence>)", {"(axiom"})
        out.append((node.items[1].text, _sexpr_sentence(node.items[2])))
    return out
