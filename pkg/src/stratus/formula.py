"""Formulas of the language of set theory with a sethood predicate and a
ternary pairing predicate.

Two surface syntaxes are supported.  The s-expression syntax is primary::

    (forall x (implies (in x y) (exists z (P x z y))))

The infix syntax is secondary::

    A x. (x in y -> E z. P(x, z, y))

Variables may carry a disambiguator written ``x#1``; it is produced by
:func:`alpha_rename` and accepted back by both parsers.
"""
from __future__ import annotations

import re
from collections import namedtuple
from dataclasses import dataclass
from functools import singledispatch
from typing import Iterable, Iterator, Union

__all__ = [
    "Var",
    "Membership",
    "Equality",
    "Sethood",
    "Pairing",
    "Relation",
    "Negation",
    "Binary",
    "Quantified",
    "Formula",
    "FormulaSyntaxError",
    "parse_formula",
    "parse_formulas",
    "parse_infix",
    "render",
    "render_infix",
    "alpha_rename",
    "free_vars",
    "variables",
    "atoms",
    "substitute",
    "read_sexprs",
    "SExpr",
    "Token",
]

CONNECTIVES = ("and", "or", "implies", "iff")
QUANTIFIERS = ("forall", "exists")
CORE_HEADS = frozenset({"in", "=", "S", "P", "not", *CONNECTIVES, *QUANTIFIERS})

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*(?:#[0-9]+)?\Z")


class Var(namedtuple("Var", "name index")):
    """A variable name with an alpha-renaming disambiguator.

    A named tuple, so hashing and comparison stay in C; the stratifier
    hashes variables a great deal.
    """

    __slots__ = ()

    def __new__(cls, name: str, index: int = 0):
        if not name:
            raise ValueError("variable name must be nonempty")
        if index < 0:
            raise ValueError("disambiguator must be nonnegative")
        return super().__new__(cls, name, index)

    def __str__(self):
        return self.name if self.index == 0 else f"{self.name}#{self.index}"

    def __repr__(self):
        return f"Var({str(self)!r})"

    @classmethod
    def parse(cls, token: str) -> "Var":
        name, _, idx = token.partition("#")
        return cls(name, int(idx) if idx else 0)


@dataclass(frozen=True)
class Membership:
    element: Var
    container: Var


@dataclass(frozen=True)
class Equality:
    left: Var
    right: Var


@dataclass(frozen=True)
class Sethood:
    arg: Var


@dataclass(frozen=True)
class Pairing:
    """``P(first, second, pair)``: *pair* is the ordered pair of the first two."""

    first: Var
    second: Var
    pair: Var


@dataclass(frozen=True)
class Relation:
    """An atom over a named relation outside the core signature.

    Only produced when the parser is given extra relation names, which is
    how finite structures supply their own vocabulary.
    """

    name: str
    args: tuple[Var, ...]


@dataclass(frozen=True)
class Negation:
    body: "Formula"


@dataclass(frozen=True)
class Binary:
    connective: str
    left: "Formula"
    right: "Formula"

    def __post_init__(self):
        if self.connective not in CONNECTIVES:
            raise ValueError(f"unknown connective {self.connective!r}")


@dataclass(frozen=True)
class Quantified:
    quantifier: str
    var: Var
    body: "Formula"

    def __post_init__(self):
        if self.quantifier not in QUANTIFIERS:
            raise ValueError(f"unknown quantifier {self.quantifier!r}")


Atom = Union[Membership, Equality, Sethood, Pairing, Relation]
Formula = Union[Atom, Negation, Binary, Quantified]
ATOM_TYPES = (Membership, Equality, Sethood, Pairing, Relation)


def atom_args(atom) -> tuple[Var, ...]:
    if isinstance(atom, Membership):
        return (atom.element, atom.container)
    if isinstance(atom, Equality):
        return (atom.left, atom.right)
    if isinstance(atom, Sethood):
        return (atom.arg,)
    if isinstance(atom, Pairing):
        return (atom.first, atom.second, atom.pair)
    if isinstance(atom, Relation):
        return atom.args
    raise TypeError(f"not an atom: {atom!r}")


def _rebuild_atom(atom, args):
    if isinstance(atom, Relation):
        return Relation(atom.name, tuple(args))
    return type(atom)(*args)


# ---------------------------------------------------------------------------
# s-expression reader


class FormulaSyntaxError(ValueError):
    """Raised on malformed input; carries a 1-based position and the
    set of tokens that would have been accepted."""

    def __init__(self, message: str, line: int, column: int, expected: Iterable[str] = ()):
        self.message = message
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f"; expected one of: {', '.join(sorted(self.expected))}"
        super().__init__(detail)


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int


@dataclass(frozen=True)
class SExpr:
    items: tuple
    line: int
    column: int


def _tokenize_sexpr(text: str) -> Iterator[Token]:
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
        elif ch.isspace():
            col, i = col + 1, i + 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield Token(ch, line, col)
            col, i = col + 1, i + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            yield Token(text[i:j], line, col)
            col, i = col + (j - i), j


def read_sexprs(text: str) -> list:
    """Read every top-level s-expression in *text*.

    Atoms come back as :class:`Token`, lists as :class:`SExpr`.
    """
    stack: list[tuple[list, Token]] = []
    out = []
    last = Token("", 1, 1)
    for tok in _tokenize_sexpr(text):
        last = tok
        if tok.text == "(":
            stack.append(([], tok))
        elif tok.text == ")":
            if not stack:
                raise FormulaSyntaxError("unbalanced ')'", tok.line, tok.column, {"(", "<atom>"})
            items, opener = stack.pop()
            node = SExpr(tuple(items), opener.line, opener.column)
            (stack[-1][0] if stack else out).append(node)
        else:
            (stack[-1][0] if stack else out).append(tok)
    if stack:
        _, opener = stack[-1]
        raise FormulaSyntaxError(
            "unclosed '('", last.line, last.column + len(last.text), {")"}
        )
    return out


def _pos(node) -> tuple[int, int]:
    return node.line, node.column


def _var(node, allowed_heads: frozenset[str]) -> Var:
    if not isinstance(node, Token):
        raise FormulaSyntaxError("expected a variable", *_pos(node), {"<variable>"})
    if not _IDENT.match(node.text) or node.text.split("#")[0] in allowed_heads:
        raise FormulaSyntaxError(
            f"invalid variable {node.text!r}", *_pos(node), {"<variable>"}
        )
    return Var.parse(node.text)


_ATOM_ARITY = {"in": 2, "=": 2, "S": 1, "P": 3}


def _from_sexpr(node, relations: frozenset[str]):
    heads = CORE_HEADS | relations
    if isinstance(node, Token):
        raise FormulaSyntaxError(
            f"expected a formula, got {node.text!r}", *_pos(node), {"("}
        )
    if not node.items:
        raise FormulaSyntaxError("empty list", *_pos(node), sorted(heads))
    head, *rest = node.items
    if not isinstance(head, Token) or head.text not in heads:
        got = head.text if isinstance(head, Token) else "("
        raise FormulaSyntaxError(f"unknown head {got!r}", *_pos(head), sorted(heads))
    h = head.text
    if h in _ATOM_ARITY:
        if len(rest) != _ATOM_ARITY[h]:
            raise FormulaSyntaxError(
                f"{h!r} takes {_ATOM_ARITY[h]} arguments, got {len(rest)}",
                *_pos(node),
                {"<variable>"} if len(rest) < _ATOM_ARITY[h] else {")"},
            )
        args = [_var(a, heads) for a in rest]
        return {"in": Membership, "=": Equality, "S": Sethood, "P": Pairing}[h](*args)
    if h == "not":
        if len(rest) != 1:
            raise FormulaSyntaxError("'not' takes one formula", *_pos(node), {")"} if rest else {"("})
        return Negation(_from_sexpr(rest[0], relations))
    if h in CONNECTIVES:
        limit = None if h in ("and", "or") else 2
        if len(rest) < 2 or (limit is not None and len(rest) > limit):
            raise FormulaSyntaxError(
                f"{h!r} takes {'two or more' if limit is None else 'two'} formulas",
                *_pos(node),
                {"("} if len(rest) < 2 else {")"},
            )
        parts = [_from_sexpr(r, relations) for r in rest]
        out = parts[-1]
        for part in reversed(parts[:-1]):
            out = Binary(h, part, out)
        return out
    if h in QUANTIFIERS:
        if len(rest) != 2:
            raise FormulaSyntaxError(
                f"{h!r} takes a variable and a formula", *_pos(node),
                {"<variable>"} if not rest else ({"("} if len(rest) == 1 else {")"}),
            )
        return Quantified(h, _var(rest[0], heads), _from_sexpr(rest[1], relations))
    # extra relation symbol
    return Relation(h, tuple(_var(a, heads) for a in rest))


def parse_formula(text: str, relations: Iterable[str] = (), syntax: str = "sexpr") -> Formula:
    """Parse exactly one formula.

    *relations* names additional predicate symbols to admit as
    :class:`Relation` atoms; by default only the core heads are legal.
    """
    if syntax == "infix":
        return parse_infix(text, relations)
    if syntax != "sexpr":
        raise ValueError(f"unknown syntax {syntax!r}")
    nodes = read_sexprs(text)
    if not nodes:
        raise FormulaSyntaxError("empty input", 1, 1, {"("})
    if len(nodes) > 1:
        extra = nodes[1]
        raise FormulaSyntaxError("trailing input after formula", *_pos(extra), {"<end>"})
    return _from_sexpr(nodes[0], frozenset(relations))


def parse_formulas(text: str, relations: Iterable[str] = (), syntax: str = "sexpr") -> list[Formula]:
    """Parse a formula file: one formula per line, ``;`` starts a comment."""
    rels = frozenset(relations)
    if syntax == "sexpr":
        return [_from_sexpr(n, rels) for n in read_sexprs(text)]
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split(";", 1)[0]
        if body.strip():
            try:
                out.append(parse_infix(body, rels))
            except FormulaSyntaxError as err:
                raise FormulaSyntaxError(err.message, lineno, err.column, err.expected) from None
    return out


# ---------------------------------------------------------------------------
# infix reader

_INFIX_TOKEN = re.compile(
    r"\s*(?:(?P<op><->|->|[!&|().,=])|(?P<word>[A-Za-z_][A-Za-z0-9_']*(?:#[0-9]+)?))"
)
# binding strength, loosest first; '->' is right associative
_INFIX_BINARY = [("<->", "iff"), ("->", "implies"), ("|", "or"), ("&", "and")]


class _InfixParser:
    def __init__(self, text: str, relations: frozenset[str]):
        self.text = text
        self.relations = relations
        self.toks: list[tuple[str, int, int]] = []
        line, col_base, i = 1, 0, 0
        while i < len(text):
            if text[i] == "\n":
                line, col_base, i = line + 1, i + 1, i + 1
                continue
            if text[i].isspace():
                i += 1
                continue
            m = _INFIX_TOKEN.match(text, i)
            if not m or m.end() == i:
                raise FormulaSyntaxError(
                    f"unexpected character {text[i]!r}", line, i - col_base + 1,
                    {"!", "(", "A", "E", "S", "P", "<variable>"},
                )
            start = m.start("op") if m.group("op") else m.start("word")
            self.toks.append((m.group("op") or m.group("word"), line, start - col_base + 1))
            i = m.end()
        self.i = 0
        end_col = len(text) - col_base + 1
        self.end = ("<end>", line, end_col)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else self.end

    def take(self, *expected):
        tok = self.peek()
        if expected and tok[0] not in expected:
            raise FormulaSyntaxError(f"unexpected {tok[0]!r}", tok[1], tok[2], expected)
        self.i += 1
        return tok

    def var(self):
        tok = self.peek()
        if tok[0] == "<end>" or not _IDENT.match(tok[0]) or tok[0] == "in":
            raise FormulaSyntaxError(f"expected a variable, got {tok[0]!r}", tok[1], tok[2], {"<variable>"})
        self.i += 1
        return Var.parse(tok[0])

    def formula(self, level=0):
        if level == len(_INFIX_BINARY):
            return self.unary()
        op, name = _INFIX_BINARY[level]
        left = self.formula(level + 1)
        if op == "->":
            if self.peek()[0] == "->":
                self.take()
                return Binary(name, left, self.formula(level))
            return left
        while self.peek()[0] == op:
            self.take()
            left = Binary(name, left, self.formula(level + 1))
        return left

    def unary(self):
        tok = self.peek()
        if tok[0] == "!":
            self.take()
            return Negation(self.unary())
        if tok[0] in ("A", "E") and self._is_quantifier():
            self.take()
            v = self.var()
            self.take(".")
            return Quantified("forall" if tok[0] == "A" else "exists", v, self.formula())
        if tok[0] == "(":
            self.take()
            inner = self.formula()
            self.take(")")
            return inner
        return self.atom()

    def _is_quantifier(self):
        nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else self.end
        after = self.toks[self.i + 2] if self.i + 2 < len(self.toks) else self.end
        return _IDENT.match(nxt[0] or "") is not None and after[0] == "."

    def atom(self):
        tok = self.peek()
        head = tok[0]
        if head in ("S", "P") or head in self.relations:
            nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else self.end
            if nxt[0] == "(":
                self.take()
                self.take("(")
                args = [self.var()]
                while self.peek()[0] == ",":
                    self.take()
                    args.append(self.var())
                self.take(")")
                if head == "S":
                    if len(args) != 1:
                        raise FormulaSyntaxError("S takes one argument", tok[1], tok[2], {")"})
                    return Sethood(*args)
                if head == "P":
                    if len(args) != 3:
                        raise FormulaSyntaxError("P takes three arguments", tok[1], tok[2], {","})
                    return Pairing(*args)
                return Relation(head, tuple(args))
        if head == "<end>" or not _IDENT.match(head):
            raise FormulaSyntaxError(
                f"unexpected {head!r}", tok[1], tok[2],
                {"!", "(", "A", "E", "S", "P", "<variable>"},
            )
        left = self.var()
        op = self.take("in", "=")
        right = self.var()
        return Membership(left, right) if op[0] == "in" else Equality(left, right)


def parse_infix(text: str, relations: Iterable[str] = ()) -> Formula:
    p = _InfixParser(text, frozenset(relations))
    out = p.formula()
    if p.peek()[0] != "<end>":
        tok = p.peek()
        raise FormulaSyntaxError(f"unexpected {tok[0]!r}", tok[1], tok[2], {"<end>", "&", "|", "->", "<->"})
    return out


# ---------------------------------------------------------------------------
# rendering


@singledispatch
def render(f) -> str:
    """Canonical s-expression text of *f*."""
    raise TypeError(f"cannot render {type(f).__name__}")


@render.register
def _(f: Var) -> str:
    return str(f)


@render.register
def _(f: Membership) -> str:
    return f"(in {f.element} {f.container})"


@render.register
def _(f: Equality) -> str:
    return f"(= {f.left} {f.right})"


@render.register
def _(f: Sethood) -> str:
    return f"(S {f.arg})"


@render.register
def _(f: Pairing) -> str:
    return f"(P {f.first} {f.second} {f.pair})"


@render.register
def _(f: Relation) -> str:
    return "(" + " ".join([f.name, *map(str, f.args)]) + ")"


@render.register
def _(f: Negation) -> str:
    return f"(not {render(f.body)})"


@render.register
def _(f: Binary) -> str:
    return f"({f.connective} {render(f.left)} {render(f.right)})"


@render.register
def _(f: Quantified) -> str:
    return f"({f.quantifier} {f.var} {render(f.body)})"


_INFIX_SYMBOL = {"and": "&", "or": "|", "implies": "->", "iff": "<->"}


def render_infix(f: Formula) -> str:
    """Fully parenthesised infix text; parses back to the same AST."""
    if isinstance(f, Membership):
        return f"{f.element} in {f.container}"
    if isinstance(f, Equality):
        return f"{f.left} = {f.right}"
    if isinstance(f, Sethood):
        return f"S({f.arg})"
    if isinstance(f, Pairing):
        return f"P({f.first}, {f.second}, {f.pair})"
    if isinstance(f, Relation):
        return f"{f.name}({', '.join(map(str, f.args))})"
    if isinstance(f, Negation):
        return f"!({render_infix(f.body)})"
    if isinstance(f, Binary):
        return f"({render_infix(f.left)} {_INFIX_SYMBOL[f.connective]} {render_infix(f.right)})"
    if isinstance(f, Quantified):
        q = "A" if f.quantifier == "forall" else "E"
        return f"({q} {f.var}. {render_infix(f.body)})"
    raise TypeError(f"cannot render {type(f).__name__}")


# ---------------------------------------------------------------------------
# traversal helpers


def atoms(f: Formula) -> Iterator[tuple[tuple[int, ...], Atom]]:
    """Yield ``(path, atom)`` for every atomic subformula, left to right.

    A path lists child positions from the root: ``0`` is the body of a
    negation or quantifier, ``0``/``1`` the sides of a binary node.
    """
    stack = [((), f)]
    while stack:
        path, g = stack.pop()
        if isinstance(g, ATOM_TYPES):
            yield path, g
        elif isinstance(g, Negation) or isinstance(g, Quantified):
            stack.append((path + (0,), g.body))
        elif isinstance(g, Binary):
            stack.append((path + (1,), g.right))
            stack.append((path + (0,), g.left))
        else:
            raise TypeError(f"not a formula: {g!r}")


def variables(f: Formula) -> set[Var]:
    """Every variable occurring in *f*, bound, free or as a binder."""
    out: set[Var] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, ATOM_TYPES):
            out.update(atom_args(g))
        elif isinstance(g, Negation):
            stack.append(g.body)
        elif isinstance(g, Quantified):
            out.add(g.var)
            stack.append(g.body)
        elif isinstance(g, Binary):
            stack.extend((g.left, g.right))
        else:
            raise TypeError(f"not a formula: {g!r}")
    return out


def free_vars(f: Formula) -> list[Var]:
    """Free variables in order of first occurrence."""
    seen: dict[Var, None] = {}

    def walk(g, bound):
        if isinstance(g, ATOM_TYPES):
            for v in atom_args(g):
                if v not in bound:
                    seen.setdefault(v)
        elif isinstance(g, Negation):
            walk(g.body, bound)
        elif isinstance(g, Quantified):
            walk(g.body, bound | {g.var})
        elif isinstance(g, Binary):
            walk(g.left, bound)
            walk(g.right, bound)
        else:
            raise TypeError(f"not a formula: {g!r}")

    walk(f, frozenset())
    return list(seen)


def _fresh(name: str, used: set[Var]) -> Var:
    i = 1
    while Var(name, i) in used:
        i += 1
    return Var(name, i)


def alpha_rename(f: Formula) -> Formula:
    """Give every binder a distinct variable, leaving free variables alone.

    The first binder of a given variable keeps its name unless that name
    also occurs free; later binders get the next unused disambiguator.
    Shadowed occurrences resolve to the innermost binder.
    """
    used = variables(f)
    reserved = set(free_vars(f))
    taken: set[Var] = set(reserved)

    def walk(g, env):
        if isinstance(g, ATOM_TYPES):
            return _rebuild_atom(g, [env.get(v, v) for v in atom_args(g)])
        if isinstance(g, Negation):
            return Negation(walk(g.body, env))
        if isinstance(g, Binary):
            return Binary(g.connective, walk(g.left, env), walk(g.right, env))
        if isinstance(g, Quantified):
            new = g.var
            if new in taken:
                new = _fresh(g.var.name, used | taken)
            taken.add(new)
            return Quantified(g.quantifier, new, walk(g.body, {**env, g.var: new}))
        raise TypeError(f"not a formula: {g!r}")

    return walk(f, {})


def substitute(f: Formula, mapping: dict[Var, Var]) -> Formula:
    """Capture-avoiding replacement of free variables."""
    targets = set(mapping.values())

    def walk(g, env, avoid):
        if isinstance(g, ATOM_TYPES):
            return _rebuild_atom(g, [env.get(v, v) for v in atom_args(g)])
        if isinstance(g, Negation):
            return Negation(walk(g.body, env, avoid))
        if isinstance(g, Binary):
            return Binary(g.connective, walk(g.left, env, avoid), walk(g.right, env, avoid))
        if isinstance(g, Quantified):
            inner = dict(env)
            inner.pop(g.var, None)
            new = g.var
            if new in avoid:
                new = _fresh(g.var.name, avoid | variables(g))
                inner[g.var] = new
            return Quantified(g.quantifier, new, walk(g.body, inner, avoid | {new}))
        raise TypeError(f"not a formula: {g!r}")

    return walk(f, dict(mapping), targets)
