"""Hereditarily finite sets as topped well-founded extensional relations.

A :class:`PointedRelation` is a finite digraph with edges ``(child,
parent)`` and a distinguished top.  When it is acyclic, extensional (no
two nodes with the same children) and every node lies below the top, it
codes exactly one hereditarily finite set; :func:`validate` certifies
this and returns a :class:`Bfext`.  Isomorphism classes are decided by
the canonical code of the top node, a :class:`CanonCode`.
"""
from __future__ import annotations

import gc
import itertools
import operator
from dataclasses import dataclass, field
from graphlib import TopologicalSorter
from typing import Hashable, Iterable, Mapping, Sequence, Union

__all__ = [
    "CanonCode",
    "EMPTY",
    "PointedRelation",
    "Bfext",
    "ValidationReport",
    "FinWellOrder",
    "BfextError",
    "BoundExceeded",
    "validate",
    "certify",
    "seg",
    "collapse",
    "canon",
    "iso",
    "eps",
    "ext",
    "pow",
    "k_embed",
    "t_op",
    "t_card",
    "enumerate_bf",
    "from_set_literal",
    "from_code",
    "von_neumann",
]

DEFAULT_ENUM_BOUND = 8

Node = Hashable


class BfextError(ValueError):
    pass


class BoundExceeded(BfextError):
    pass


# ---------------------------------------------------------------------------
# canonical codes


class CanonCode:
    """An interned hereditarily finite set.

    Elements are kept sorted by rank, then size, then lexicographically
    by element; with this order the von Neumann naturals sort as 0, 1, 2...
    Equal sets are the same object, so ``==`` and ``hash`` are identity
    based; hashes differ between processes, so sort before printing.
    """

    __slots__ = ("elements", "rank", "_key", "__weakref__")
    _table: dict = {}

    elements: tuple["CanonCode", ...]
    rank: int

    def __new__(cls, elements: Iterable["CanonCode"] = ()):
        table = cls._table
        if type(elements) is tuple:
            # keys of the table are exactly the canonical element tuples
            found = table.get(elements)
            if found is not None:
                return found
        elems = tuple(sorted(set(elements), key=_key))
        found = table.get(elems)
        if found is not None:
            return found
        return cls._build(elems)

    @classmethod
    def _build(cls, elems: tuple) -> "CanonCode":
        self = object.__new__(cls)
        self.elements = elems
        # elements are sorted by rank first
        self.rank = elems[-1].rank + 1 if elems else 0
        self._key = (self.rank, len(elems), tuple([e._key for e in elems]))
        # setdefault keeps the table append-only under concurrent inserts
        return cls._table.setdefault(elems, self)

    # Interning makes equality identity, so the inherited ``__eq__`` and
    # ``__hash__`` are correct and run at C speed.

    def __lt__(self, other: "CanonCode"):
        return self._key < other._key

    def __le__(self, other: "CanonCode"):
        return self._key <= other._key

    def __gt__(self, other: "CanonCode"):
        return self._key > other._key

    def __ge__(self, other: "CanonCode"):
        return self._key >= other._key

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, item):
        return item in self.elements

    def __str__(self):
        return "{" + ",".join(map(str, self.elements)) + "}"

    def __repr__(self):
        return f"CanonCode({self})"

    def __reduce__(self):
        return (CanonCode, (self.elements,))

    def closure(self) -> set["CanonCode"]:
        """Transitive closure of ``{self}``: the nodes of its canonical DAG."""
        seen = {self}
        stack = [self]
        while stack:
            for e in stack.pop().elements:
                if e not in seen:
                    seen.add(e)
                    stack.append(e)
        return seen

    def node_count(self) -> int:
        return len(self.closure())


_key = operator.attrgetter("_key")


EMPTY = CanonCode()


def von_neumann(n: int) -> CanonCode:
    """The von Neumann natural ``n``, built as ``n = (n-1) ∪ {n-1}``."""
    code = EMPTY
    for _ in range(n):
        code = CanonCode((*code.elements, code))
    return code


# ---------------------------------------------------------------------------
# relations


@dataclass(frozen=True)
class PointedRelation:
    nodes: frozenset
    edges: frozenset  # of (child, parent)
    top: Node

    @classmethod
    def make(cls, nodes: Iterable[Node], edges: Iterable[Sequence[Node]], top: Node) -> "PointedRelation":
        return cls(frozenset(nodes), frozenset((c, p) for c, p in edges), top)

    def children(self) -> dict[Node, set[Node]]:
        out: dict[Node, set[Node]] = {n: set() for n in self.nodes}
        for c, p in self.edges:
            out.setdefault(p, set()).add(c)
            out.setdefault(c, set())
        return out

    def to_json(self) -> dict:
        """JSON form; node ids that are not ints are renumbered."""
        if all(isinstance(n, int) for n in self.nodes):
            ids = {n: n for n in self.nodes}
        else:
            ids = {n: i for i, n in enumerate(sorted(self.nodes, key=repr))}
        return {
            "nodes": sorted(ids.values()),
            "edges": sorted([ids[c], ids[p]] for c, p in self.edges),
            "top": ids[self.top],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PointedRelation":
        try:
            nodes = data["nodes"]
            edges = data["edges"]
            top = data["top"]
        except (KeyError, TypeError) as err:
            raise BfextError(f"DAG JSON needs 'nodes', 'edges' and 'top': missing {err}") from None
        if not isinstance(nodes, list) or not isinstance(edges, list):
            raise BfextError("'nodes' and 'edges' must be lists")
        for e in edges:
            if not isinstance(e, list) or len(e) != 2:
                raise BfextError(f"edge {e!r} is not a [child, parent] pair")
        try:
            return cls.make(nodes, edges, top)
        except TypeError as err:
            raise BfextError(f"node ids must be hashable scalars: {err}") from None


@dataclass(frozen=True)
class Bfext:
    """A certified topped well-founded extensional relation."""

    relation: PointedRelation
    canon: CanonCode
    acyclic: bool = True
    extensional: bool = True
    topped: bool = True

    @property
    def top(self):
        return self.relation.top

    def __str__(self):
        return str(self.canon)


@dataclass(frozen=True)
class ValidationReport:
    """Why a relation is not a BFEXT.

    ``failures`` maps a property name (``"well-formed"``, ``"acyclic"``,
    ``"extensional"``, ``"topped"``) to a witness: a cycle as a node
    list, a pair of nodes with equal children, or an unreachable node.
    """

    failures: dict[str, object] = field(default_factory=dict)

    def __bool__(self):
        return False

    def to_json(self) -> dict:
        return {k: _jsonable(v) for k, v in self.failures.items()}


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, frozenset):
        return sorted((_jsonable(x) for x in v), key=repr)
    if isinstance(v, (int, str, float)) or v is None:
        return v
    return repr(v)


def _find_cycle(rel: PointedRelation) -> list | None:
    kids = rel.children()
    color: dict = {}
    for start in sorted(kids, key=repr):
        if start in color:
            continue
        # iterative DFS following child edges
        stack = [(start, iter(sorted(kids[start], key=repr)))]
        path = [start]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
                path.pop()
            elif color.get(nxt) == 1:
                return path[path.index(nxt):]
            elif nxt not in color:
                color[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(sorted(kids[nxt], key=repr))))
    return None


def _below(rel: PointedRelation, x: Node) -> set:
    kids = rel.children()
    seen = {x}
    stack = [x]
    while stack:
        for c in kids.get(stack.pop(), ()):
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return seen


def _codes(rel: PointedRelation) -> dict[Node, CanonCode]:
    """Code every node bottom-up.  Requires an acyclic relation."""
    kids = rel.children()
    order = TopologicalSorter({n: kids[n] for n in kids}).static_order()
    codes: dict[Node, CanonCode] = {}
    for n in order:
        codes[n] = CanonCode(codes[c] for c in kids[n])
    return codes


def _fast_codes(r: PointedRelation) -> dict[Node, CanonCode] | None:
    """Codes of every node when *r* is a BFEXT, else ``None``.

    One depth-first pass from the top; a node seen again while still open
    means a cycle.  Extensional relations are exactly those whose nodes
    get pairwise distinct codes.
    """
    nodes = r.nodes
    kids: dict = {n: [] for n in nodes}
    for c, p in r.edges:
        if c not in kids or p not in kids:
            return None
        kids[p].append(c)
    if r.top not in kids:
        return None
    codes: dict = {}
    open_ = set()
    stack = [(r.top, False)]
    while stack:
        n, done = stack.pop()
        if done:
            open_.discard(n)
            codes[n] = CanonCode([codes[c] for c in kids[n]])
        elif n not in codes:
            if n in open_:
                return None
            open_.add(n)
            stack.append((n, True))
            for c in kids[n]:
                if c not in codes:
                    stack.append((c, False))
    if len(codes) != len(nodes) or len(set(codes.values())) != len(nodes):
        return None
    return codes


def validate(r: PointedRelation) -> Union[Bfext, ValidationReport]:
    codes = _fast_codes(r)
    if codes is not None:
        return Bfext(r, codes[r.top])
    failures: dict[str, object] = {}
    loose = [e for e in r.edges if e[0] not in r.nodes or e[1] not in r.nodes]
    if r.top not in r.nodes or loose:
        failures["well-formed"] = {"top_missing": r.top not in r.nodes, "dangling_edges": sorted(loose, key=repr)}
        return ValidationReport(failures)
    cycle = _find_cycle(r)
    if cycle is not None:
        failures["acyclic"] = cycle
    kids = r.children()
    by_children: dict[frozenset, list] = {}
    for n in sorted(r.nodes, key=repr):
        by_children.setdefault(frozenset(kids[n]), []).append(n)
    clash = next((group for group in by_children.values() if len(group) > 1), None)
    if clash is not None:
        failures["extensional"] = (clash[0], clash[1])
    reach = _below(r, r.top)
    missing = sorted(r.nodes - reach, key=repr)
    if missing:
        failures["topped"] = missing[0]
    if failures:
        return ValidationReport(failures)
    return Bfext(r, _codes(r)[r.top])


def certify(r: PointedRelation) -> Bfext:
    """Like :func:`validate` but raises on failure."""
    out = validate(r)
    if isinstance(out, ValidationReport):
        raise BfextError(f"not a BFEXT: {out.to_json()}")
    return out


def seg(r: PointedRelation, x: Node) -> PointedRelation:
    """The part of *r* hanging below *x*, pointed at *x*.

    Built in layers: first the edges into *x*, then repeatedly the edges
    into any node already touched, until nothing new appears.
    """
    if x not in r.nodes:
        raise BfextError(f"unknown node {x!r}")
    into: dict[Node, list] = {}
    for c, p in r.edges:
        into.setdefault(p, []).append((c, p))
    layer = set(into.get(x, ()))
    edges = set(layer)
    dom = {x}
    while layer:
        dom |= {n for e in layer for n in e}
        layer = {e for z in dom for e in into.get(z, ())} - edges
        edges |= layer
    nodes = {x} | {n for e in edges for n in e}
    return PointedRelation(frozenset(nodes), frozenset(edges), x)


def canon(b: Bfext) -> CanonCode:
    """Recompute the code of the top from the relation itself."""
    codes = _fast_codes(b.relation)
    if codes is None:
        raise BfextError("relation is not a BFEXT")
    return codes[b.relation.top]


def collapse(r: PointedRelation) -> tuple[Bfext, dict]:
    """Extensional quotient of an acyclic topped relation.

    Returns the collapsed BFEXT and the surjection ``g`` from the input
    nodes onto its nodes; nodes are numbered in canonical order.
    """
    if r.top not in r.nodes or any(c not in r.nodes or p not in r.nodes for c, p in r.edges):
        raise BfextError("relation is malformed")
    if _find_cycle(r) is not None:
        raise BfextError("relation is cyclic")
    if _below(r, r.top) != set(r.nodes):
        raise BfextError("relation is not topped")
    codes = _codes(r)
    numbering = {c: i for i, c in enumerate(sorted(set(codes.values())))}
    g = {n: numbering[codes[n]] for n in r.nodes}
    edges = {(g[c], g[p]) for c, p in r.edges}
    out = certify(PointedRelation(frozenset(numbering.values()), frozenset(edges), g[r.top]))
    return out, g


def from_code(code: CanonCode) -> Bfext:
    """The canonical DAG of *code*: one node per element of its closure."""
    members = sorted(code.closure())
    ids = {c: i for i, c in enumerate(members)}
    edges = frozenset((ids[e], ids[c]) for c in members for e in c.elements)
    rel = PointedRelation(frozenset(ids.values()), edges, ids[code])
    return Bfext(rel, code)


def iso(r: Bfext, s: Bfext) -> bool:
    return canon(r) == canon(s)


def eps(r: Bfext, s: Bfext) -> bool:
    """``r`` is isomorphic to the segment below some child of ``s``'s top."""
    target = canon(r)
    rel = s.relation
    for c, p in rel.edges:
        if p == rel.top and certify(seg(rel, c)).canon == target:
            return True
    return False


def ext(x: Bfext | CanonCode) -> frozenset[CanonCode]:
    """Codes of the segments below the children of the top.

    A :class:`CanonCode` already is an isomorphism class, so its elements
    are returned directly.
    """
    if isinstance(x, CanonCode):
        return frozenset(x.elements)
    rel = x.relation
    return frozenset(certify(seg(rel, c)).canon for c, p in rel.edges if p == rel.top)


def pow(x: Bfext | CanonCode) -> frozenset[CanonCode]:
    """Every set whose elements all belong to ``x``; ``2**len(ext(x))`` of them."""
    members = x.elements if isinstance(x, CanonCode) else tuple(sorted(ext(x)))
    # combinations of a sorted tuple are canonical element tuples
    subsets = itertools.chain.from_iterable(
        itertools.combinations(members, size) for size in range(len(members) + 1)
    )
    table = CanonCode._table
    out = list(map(table.get, subsets))
    if None in out:
        # some subsets were never built before
        out = [CanonCode(sub) for sub in itertools.chain.from_iterable(
            itertools.combinations(members, size) for size in range(len(members) + 1))]
    return frozenset(out)


@dataclass(frozen=True)
class FinWellOrder:
    """A finite strict well-order given by its elements in increasing order."""

    elements: tuple
    strict: bool = True

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise BfextError("well-order elements must be distinct")

    @classmethod
    def of_length(cls, n: int) -> "FinWellOrder":
        return cls(tuple(range(n)))

    @classmethod
    def from_pairs(cls, elements: Iterable[Node], pairs: Iterable[Sequence[Node]]) -> "FinWellOrder":
        """Build from an order relation given as ``(a, b)`` for ``a < b``.

        Reflexive pairs are dropped; what remains must be a strict linear order.
        """
        elems = list(elements)
        less = {(a, b) for a, b in pairs if a != b}
        for a, b in less:
            if (b, a) in less:
                raise BfextError(f"{a!r} and {b!r} are mutually below each other")
        rank = {e: sum((d, e) in less for d in elems) for e in elems}
        ordered = sorted(elems, key=lambda e: rank[e])
        for i, a in enumerate(ordered):
            for b in ordered[i + 1:]:
                if (a, b) not in less:
                    raise BfextError("relation is not a strict linear order")
        return cls(tuple(ordered))

    def __len__(self):
        return len(self.elements)


def k_embed(w: FinWellOrder) -> Bfext:
    """Adjoin a fresh top above every element of the order and collapse."""
    n = len(w.elements)
    edges = {(i, j) for i in range(n) for j in range(i + 1, n)}
    edges |= {(i, n) for i in range(n)}
    out, _ = collapse(PointedRelation(frozenset(range(n + 1)), frozenset(edges), n))
    return out


def t_op(b: Bfext) -> Bfext:
    """Replace every node by its singleton."""
    rel = b.relation
    wrap = {n: frozenset({n}) for n in rel.nodes}
    image = PointedRelation(
        frozenset(wrap.values()),
        frozenset((wrap[c], wrap[p]) for c, p in rel.edges),
        wrap[rel.top],
    )
    return certify(image)


def t_card(n: int) -> int:
    if n < 0:
        raise BfextError("cardinality must be nonnegative")
    base = range(n)
    return len({frozenset({a}) for a in base})


def enumerate_bf(
    max_nodes: int, bound: int = DEFAULT_ENUM_BOUND, max_elements: int | None = None
) -> list[CanonCode]:
    """Every hereditarily finite set whose canonical DAG has at most
    *max_nodes* nodes.

    *max_elements*, when given, keeps only sets with at most that many
    elements.  The order is fixed: by node count, then by the canonical
    order of the transitive closure, then by which elements are present.

    A set with ``s`` nodes is a subset ``x`` of a transitive set ``T`` of
    size ``s - 1`` with transitive closure exactly ``T``; that happens
    precisely when ``x`` contains every element of ``T`` that is not an
    element of another member of ``T``.  Transitive sets of size ``m``
    are in turn ``T' ∪ {y}`` for a transitive ``T'`` of size ``m - 1``
    and some new ``y ⊆ T'``.
    """
    if max_nodes < 1:
        raise BfextError("max_nodes must be positive")
    if max_nodes > bound:
        raise BoundExceeded(f"max_nodes {max_nodes} exceeds the configured bound {bound}")
    if max_elements is not None and max_elements < 0:
        raise BfextError("max_elements must be nonnegative")
    cap = max_nodes if max_elements is None else max_elements
    # millions of small tuples would otherwise trigger repeated collections
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        out = [EMPTY]
        transitive: list[tuple[CanonCode, ...]] = [(EMPTY,)]
        for size in range(2, max_nodes + 1):
            for t in transitive:
                out.extend(_closures_onto(t, cap))
            if size < max_nodes:
                transitive = _grow_transitive(transitive)
        return out
    finally:
        if gc_was_enabled:
            gc.enable()


def _closures_onto(t: tuple, cap: int) -> list[CanonCode]:
    """All sets with at most *cap* elements whose transitive closure is
    exactly the transitive set *t*."""
    inner = set()
    for u in t:
        inner.update(u.elements)
    must = [u not in inner for u in t]
    left = sum(must)
    if left > cap:
        return []
    # grow element tuples position by position so they stay sorted
    partial = [()]
    for u, required in zip(t, must):
        if required:
            left -= 1
            partial = [p + (u,) for p in partial]
        else:
            partial += [p + (u,) for p in partial if len(p) + left < cap]
    table = CanonCode._table
    build = CanonCode._build
    return [c if (c := table.get(p)) is not None else build(p) for p in partial]


def _grow_transitive(level: list[tuple]) -> list[tuple]:
    out = set()
    for t in level:
        members = set(t)
        for r in range(len(t) + 1):
            for sub in itertools.combinations(t, r):
                y = CanonCode(sub)
                if y not in members:
                    out.add(tuple(sorted((*t, y), key=_key)))
    return sorted(out, key=lambda t: [u._key for u in t])


def from_set_literal(text: str) -> Bfext:
    return from_code(parse_set_literal(text))


def parse_set_literal(text: str) -> CanonCode:
    """Parse brace notation such as ``{{},{{}}}``; whitespace is ignored."""
    s = "".join(text.split())
    pos = 0

    def fail(msg):
        raise BfextError(f"malformed set literal at offset {pos}: {msg}")

    def parse():
        nonlocal pos
        if pos >= len(s) or s[pos] != "{":
            fail("expected '{'")
        pos += 1
        items = []
        if pos < len(s) and s[pos] == "}":
            pos += 1
            return CanonCode()
        while True:
            items.append(parse())
            if pos >= len(s):
                fail("expected ',' or '}'")
            if s[pos] == ",":
                pos += 1
            elif s[pos] == "}":
                pos += 1
                return CanonCode(items)
            else:
                fail("expected ',' or '}'")

    code = parse()
    if pos != len(s):
        fail("trailing characters")
    return code
