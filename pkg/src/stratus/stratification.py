"""Stratifiability of formulas.

A formula is stratified when its variables can be given integer levels
such that ``x = y`` and ``P(x, y, z)`` force equal levels and ``x in y``
puts ``y`` exactly one level above ``x``.  Deciding this is a difference
constraint problem over a graph whose edges carry offsets 0 or 1; we
propagate potentials along a spanning forest and, when a non-tree edge
disagrees, return the closed walk that proves no assignment exists.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence, Union

from .formula import (
    Binary,
    Equality,
    Formula,
    Membership,
    Negation,
    Pairing,
    Quantified,
    Relation,
    Sethood,
    Var,
    _fresh,
    atoms,
    render,
)

__all__ = [
    "StratConstraint",
    "Stratification",
    "ConflictCycle",
    "collect_constraints",
    "solve",
    "stratify",
    "is_stratified",
    "report",
]


@dataclass(frozen=True)
class StratConstraint:
    """``level(rhs) - level(lhs) == offset``."""

    lhs: Var
    rhs: Var
    offset: int
    origin: object = field(compare=False)
    path: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.offset not in (0, 1):
            raise ValueError("offset must be 0 or 1")

    def __str__(self):
        return f"{self.lhs} -{self.offset}-> {self.rhs}"


@dataclass(frozen=True)
class Stratification:
    levels: dict[Var, int]
    constraints: tuple[StratConstraint, ...] = ()
    # renamed binder -> name it had in the input formula
    original: dict[Var, Var] = field(default_factory=dict)

    def __getitem__(self, v) -> int:
        if isinstance(v, str):
            v = Var.parse(v)
        return self.levels[v]


@dataclass(frozen=True)
class ConflictCycle:
    """A closed walk through the constraint graph with nonzero net offset.

    ``directions[i]`` is ``+1`` when ``constraints[i]`` is traversed from
    lhs to rhs and ``-1`` otherwise.
    """

    constraints: tuple[StratConstraint, ...]
    directions: tuple[int, ...]
    net_offset: int

    def vertices(self) -> list[Var]:
        out = []
        for c, d in zip(self.constraints, self.directions):
            out.append(c.lhs if d > 0 else c.rhs)
        return out


Result = Union[Stratification, ConflictCycle]


def collect_constraints(f: Formula) -> list[StratConstraint]:
    """Constraints generated by the atoms of an alpha-renamed formula."""
    out = []
    for path, atom in sorted(atoms(f), key=lambda pa: pa[0]):
        if isinstance(atom, Membership):
            out.append(StratConstraint(atom.element, atom.container, 1, atom, path))
        elif isinstance(atom, Equality):
            out.append(StratConstraint(atom.left, atom.right, 0, atom, path))
        elif isinstance(atom, Pairing):
            out.append(StratConstraint(atom.first, atom.pair, 0, atom, path))
            out.append(StratConstraint(atom.second, atom.pair, 0, atom, path))
        elif isinstance(atom, Sethood):
            pass
        elif isinstance(atom, Relation):
            raise ValueError(f"relation {atom.name!r} is outside the stratifiable language")
    return out


def solve(cs: Sequence[StratConstraint], extra_vars=()) -> Result:
    """Find levels satisfying every constraint, or a conflict cycle.

    Levels are normalised so each connected component has minimum 0.
    *extra_vars* are variables that occur in no constraint; they get
    level 0.
    """
    adj: dict[Var, list[tuple[Var, int, int]]] = {}
    for v in extra_vars:
        adj.setdefault(v, [])
    for i, c in enumerate(cs):
        adj.setdefault(c.lhs, []).append((c.rhs, c.offset, i))
        adj.setdefault(c.rhs, []).append((c.lhs, -c.offset, i))

    level: dict[Var, int] = {}
    # spanning-forest parent: vertex -> (parent vertex, constraint index)
    parent: dict[Var, tuple[Var, int] | None] = {}
    depth: dict[Var, int] = {}
    components: list[list[Var]] = []

    for root in adj:
        if root in level:
            continue
        level[root], parent[root], depth[root] = 0, None, 0
        comp = [root]
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, w, i in adj[u]:
                if v not in level:
                    level[v] = level[u] + w
                    parent[v], depth[v] = (u, i), depth[u] + 1
                    comp.append(v)
                    queue.append(v)
                elif level[v] != level[u] + w:
                    return _cycle(cs, parent, depth, u, v, i)
        components.append(comp)

    for comp in components:
        low = min(level[v] for v in comp)
        for v in comp:
            level[v] -= low
    return Stratification(dict(sorted(level.items())), tuple(cs))


def _tree_path(parent, depth, a, b):
    """Constraint steps from a up to the meeting point and from b up to it."""
    up_a, up_b = [], []
    while depth[a] > depth[b]:
        p, i = parent[a]
        up_a.append((a, p, i))
        a = p
    while depth[b] > depth[a]:
        p, i = parent[b]
        up_b.append((b, p, i))
        b = p
    while a != b:
        p, i = parent[a]
        up_a.append((a, p, i))
        a = p
        q, j = parent[b]
        up_b.append((b, q, j))
        b = q
    return up_a, up_b


def _cycle(cs, parent, depth, u, v, edge) -> ConflictCycle:
    # walk: v -> ... -> lca -> ... -> u, then u -> v via the offending edge
    up_v, up_u = _tree_path(parent, depth, v, u)
    steps = [(a, b, i) for a, b, i in up_v]
    steps += [(b, a, i) for a, b, i in reversed(up_u)]
    steps.append((u, v, edge))
    constraints, directions = [], []
    net = 0
    for a, b, i in steps:
        c = cs[i]
        d = 1 if (c.lhs == a and c.rhs == b) else -1
        constraints.append(c)
        directions.append(d)
        net += d * c.offset
    if net < 0:
        constraints.reverse()
        directions = [-d for d in reversed(directions)]
        net = -net
    return ConflictCycle(tuple(constraints), tuple(directions), net)


def stratify(f: Formula) -> Result:
    """Alpha-rename, collect constraints and solve.

    Renaming follows :func:`~stratus.formula.alpha_rename`.  Constraint
    ``path`` fields locate the generating atom; renaming keeps the tree
    shape, so paths index the caller's formula as well.
    """
    # One walk resolves every occurrence to its binder (an int) or to a
    # free variable; names are chosen afterwards, once all free variables
    # are known.
    binders: list[Var] = []
    free: dict[Var, None] = {}
    raw: list[tuple] = []

    def ref(v, env):
        r = env.get(v)
        if r is None:
            free.setdefault(v)
            return v
        return r

    def walk(g, env, path):
        kind = type(g)
        if kind is Membership:
            raw.append((g, path, (ref(g.element, env), ref(g.container, env))))
        elif kind is Equality:
            raw.append((g, path, (ref(g.left, env), ref(g.right, env))))
        elif kind is Pairing:
            raw.append((g, path, (ref(g.first, env), ref(g.second, env), ref(g.pair, env))))
        elif kind is Sethood:
            ref(g.arg, env)
        elif kind is Negation:
            walk(g.body, env, path + (0,))
        elif kind is Binary:
            walk(g.left, env, path + (0,))
            walk(g.right, env, path + (1,))
        elif kind is Quantified:
            binders.append(g.var)
            walk(g.body, {**env, g.var: len(binders) - 1}, path + (0,))
        elif kind is Relation:
            raise ValueError(f"relation {g.name!r} is outside the stratifiable language")
        else:
            raise TypeError(f"not a formula: {g!r}")

    walk(f, {}, ())

    taken = set(free)
    used = taken | set(binders)
    names: list[Var] = []
    original: dict[Var, Var] = {}
    for v in binders:
        if v in taken:
            new = _fresh(v.name, used)
            used.add(new)
            original[new] = v
            v = new
        taken.add(v)
        names.append(v)

    constraints: list[StratConstraint] = []
    for g, path, refs in raw:
        args = [names[r] if type(r) is int else r for r in refs]
        atom = g if all(type(r) is not int or names[r] == binders[r] for r in refs) else type(g)(*args)
        if len(args) == 2:
            constraints.append(StratConstraint(args[0], args[1], 1 if type(g) is Membership else 0, atom, path))
        else:
            constraints.append(StratConstraint(args[0], args[2], 0, atom, path))
            constraints.append(StratConstraint(args[1], args[2], 0, atom, path))

    result = solve(constraints, extra_vars=sorted(taken))
    if isinstance(result, Stratification):
        return Stratification(result.levels, result.constraints, original)
    return result


def is_stratified(f: Formula) -> bool:
    return isinstance(stratify(f), Stratification)


def report(f: Formula, result: Result | None = None) -> dict:
    """JSON-ready summary of a stratification attempt."""
    if result is None:
        result = stratify(f)
    out: dict = {"formula": render(f)}
    if isinstance(result, Stratification):
        out["status"] = "stratified"
        out["levels"] = {str(v): lvl for v, lvl in result.levels.items()}
        out["origins"] = [
            {"constraint": str(c), "atom": render(c.origin), "path": list(c.path)}
            for c in result.constraints
        ]
        if result.original:
            out["renamed"] = {str(k): str(v) for k, v in result.original.items()}
    else:
        out["status"] = "conflict"
        out["cycle"] = [
            {"from": str(c.lhs if d > 0 else c.rhs), "to": str(c.rhs if d > 0 else c.lhs),
             "step": d * c.offset}
            for c, d in zip(result.constraints, result.directions)
        ]
        out["net_offset"] = result.net_offset
        out["origins"] = [
            {"constraint": str(c), "atom": render(c.origin), "path": list(c.path)}
            for c in result.constraints
        ]
    # free variables with the same identifier always share one level
    out["free_variables_shared_by_name"] = True
    return out
