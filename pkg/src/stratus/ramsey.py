"""Finite Ramsey search and indiscernibility colorings.

Colorings assign a color to every increasing ``k``-tuple over
``{0, ..., n-1}``.  :func:`homogeneous` finds the lexicographically least
``m``-set on which a coloring is constant; on top of it sit the two
colorings used to extract indiscernibles from a finite structure: the
truth-vector coloring of a list of formulas, and the term-stabilization
coloring that records a term value when it is below a threshold ``z`` and
collapses every larger value to ``z``.
"""
from __future__ import annotations

import itertools
import math
import os
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

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
    free_vars,
)

__all__ = [
    "Coloring",
    "HomogeneousWitness",
    "FunctionTable",
    "FiniteStructure",
    "RamseyError",
    "BudgetExceeded",
    "EvaluationError",
    "homogeneous",
    "verify_homogeneous",
    "exhaustive_ramsey_check",
    "find_ramsey_counterexample",
    "evaluate",
    "formula_arity",
    "truth_coloring",
    "extract_indiscernibles",
    "check_indiscernible",
    "stabilize_terms",
    "default_budget",
]

DEFAULT_BUDGET = 1 << 20


class RamseyError(ValueError):
    pass


class BudgetExceeded(RamseyError):
    pass


class EvaluationError(RamseyError):
    pass


def default_budget() -> int:
    """Search budget from ``STRATUS_BUDGET``, else ``2**20``."""
    raw = os.environ.get("STRATUS_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise RamseyError(f"STRATUS_BUDGET must be an integer, got {raw!r}") from None
    if value < 0:
        raise RamseyError("STRATUS_BUDGET must be nonnegative")
    return value


# ---------------------------------------------------------------------------
# colorings


@dataclass(frozen=True)
class Coloring:
    """A total map from the increasing ``k``-tuples over ``range(n)`` to ``range(c)``."""

    n: int
    k: int
    c: int
    assignment: Mapping[tuple[int, ...], int]

    def __post_init__(self):
        if self.n < 0 or self.k < 0 or self.c < 1:
            raise RamseyError("need n >= 0, k >= 0 and at least one color")
        expected = math.comb(self.n, self.k)
        if len(self.assignment) != expected:
            raise RamseyError(f"coloring has {len(self.assignment)} entries, expected {expected}")
        for subset, color in self.assignment.items():
            if len(subset) != self.k or list(subset) != sorted(set(subset)):
                raise RamseyError(f"{subset!r} is not an increasing {self.k}-tuple")
            if subset and not (0 <= subset[0] and subset[-1] < self.n):
                raise RamseyError(f"{subset!r} leaves the universe")
            if not 0 <= color < self.c:
                raise RamseyError(f"color {color} of {subset!r} is out of range")

    @classmethod
    def from_function(cls, n: int, k: int, c: int, fn: Callable[[tuple[int, ...]], int]) -> "Coloring":
        return cls(n, k, c, {s: fn(s) for s in itertools.combinations(range(n), k)})

    def __call__(self, subset: Sequence[int]) -> int:
        return self.assignment[tuple(sorted(subset))]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "c": self.c,
            "assignment": [[list(s), col] for s, col in sorted(self.assignment.items())],
        }


@dataclass(frozen=True)
class HomogeneousWitness:
    """An increasing sequence all of whose ``k``-subsets get ``color``.

    ``values`` is filled in by :func:`stabilize_terms`: the stabilized
    value of each term, where the threshold ``z`` itself means "never
    below ``z``".
    """

    subset: tuple[int, ...]
    color: int
    values: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        out = {"subset": list(self.subset), "color": self.color}
        if self.values is not None:
            out["values"] = list(self.values)
        return out


def homogeneous(col: Coloring, m: int) -> HomogeneousWitness | None:
    """The lexicographically least homogeneous ``m``-set, or ``None``.

    Backtracks over increasing sequences in lexicographic order, so the
    first complete sequence found is the least one.  When ``m < k`` every
    ``m``-set is vacuously homogeneous and the least color, 0, is reported.
    """
    n, k = col.n, col.k
    if m < 1:
        raise RamseyError("m must be positive")
    if m > n:
        raise RamseyError(f"m = {m} exceeds the universe size {n}")
    if m < k or k == 0:
        if k == 0:
            return HomogeneousWitness(tuple(range(m)), col.assignment[()])
        return HomogeneousWitness(tuple(range(m)), 0)

    colors = col.assignment
    prefix: list[int] = []

    def extend(start: int, color: int | None) -> int | None:
        if len(prefix) == m:
            return color
        # leave room for the remaining elements
        for e in range(start, n - (m - len(prefix)) + 1):
            chosen = color
            ok = True
            if len(prefix) >= k - 1:
                for rest in itertools.combinations(prefix, k - 1):
                    got = colors[(*rest, e)]
                    if chosen is None:
                        chosen = got
                    elif got != chosen:
                        ok = False
                        break
            if ok:
                prefix.append(e)
                found = extend(e + 1, chosen)
                if found is not None:
                    return found
                prefix.pop()
        return None

    color = extend(0, None)
    if color is None:
        return None
    return HomogeneousWitness(tuple(prefix), color)


def verify_homogeneous(col: Coloring, witness: HomogeneousWitness) -> bool:
    """Recolor every ``k``-subset of the witness directly."""
    subset = witness.subset
    if list(subset) != sorted(set(subset)) or any(not 0 <= a < col.n for a in subset):
        return False
    return all(col(s) == witness.color for s in itertools.combinations(subset, col.k))


# ---------------------------------------------------------------------------
# exhaustive checks


def find_ramsey_counterexample(n: int, k: int, c: int, m: int, budget: int | None = None) -> Coloring | None:
    """The first ``c``-coloring of ``[n]^k`` with no homogeneous ``m``-set.

    Colorings are tried in lexicographic order of their color vectors over
    the ``k``-subsets in lexicographic order.  Raises
    :class:`BudgetExceeded` when there are more than *budget* colorings.
    """
    if min(n, k, m) < 0 or c < 1:
        raise RamseyError("need nonnegative n, k, m and at least one color")
    if m > n:
        raise RamseyError(f"m = {m} exceeds n = {n}")
    if budget is None:
        budget = default_budget()
    subsets = list(itertools.combinations(range(n), k))
    total = c ** len(subsets)
    if total > budget:
        raise BudgetExceeded(f"{c}^{len(subsets)} = {total} colorings exceed the budget {budget}")
    index = {s: i for i, s in enumerate(subsets)}
    # each m-set as the positions of its k-subsets in a color vector
    groups = [
        [index[s] for s in itertools.combinations(big, k)]
        for big in itertools.combinations(range(n), m)
    ]
    for vector in itertools.product(range(c), repeat=len(subsets)):
        if not any(len({vector[i] for i in g}) <= 1 for g in groups):
            return Coloring(n, k, c, dict(zip(subsets, vector)))
    return None


def exhaustive_ramsey_check(n: int, k: int, c: int, m: int, budget: int | None = None) -> bool:
    """Whether every ``c``-coloring of ``[n]^k`` has a homogeneous ``m``-set."""
    return find_ramsey_counterexample(n, k, c, m, budget) is None


# ---------------------------------------------------------------------------
# finite structures


@dataclass(frozen=True)
class FunctionTable:
    """A total function ``range(n)^arity -> range(n)``."""

    arity: int
    values: Mapping[tuple[int, ...], int]

    def __call__(self, *args: int) -> int:
        return self.values[args]

    @classmethod
    def from_function(cls, n: int, arity: int, fn: Callable[..., int]) -> "FunctionTable":
        return cls(arity, {args: fn(*args) for args in itertools.product(range(n), repeat=arity)})

    @classmethod
    def from_json(cls, n: int, data: Mapping) -> "FunctionTable":
        """Read ``{"arity": v, "table": ...}``.

        The table is either a flat list of ``n**v`` values in row-major
        order of the arguments or nested lists indexed by the arguments.
        """
        try:
            arity = data["arity"]
            table = data["table"]
        except (KeyError, TypeError):
            raise RamseyError("function needs 'arity' and 'table'") from None
        if not isinstance(arity, int) or isinstance(arity, bool) or arity < 0:
            raise RamseyError(f"bad arity {arity!r}")
        if not isinstance(table, list):
            raise RamseyError("'table' must be a list")
        domain = list(itertools.product(range(n), repeat=arity))
        if len(table) == len(domain) and all(isinstance(v, int) for v in table):
            return cls(arity, dict(zip(domain, table)))
        if arity > 0 and _is_nested(table, arity, n):
            return cls(arity, {args: _dig(table, args) for args in domain})
        raise RamseyError(f"table must hold {len(domain)} values, flat or nested {arity} deep")


def _is_nested(table, depth: int, n: int) -> bool:
    if depth == 0:
        return isinstance(table, int)
    return isinstance(table, list) and len(table) == n and all(_is_nested(t, depth - 1, n) for t in table)


def _dig(table, args):
    for a in args:
        table = table[a]
    return table


@dataclass(frozen=True)
class FiniteStructure:
    """A structure on ``{0, ..., size-1}``.

    Relations are sets of tuples.  ``lt`` and ``le`` default to the natural
    order of the universe unless a table of that name is supplied.
    """

    size: int
    relations: Mapping[str, frozenset] = field(default_factory=dict)
    functions: Mapping[str, FunctionTable] = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 1:
            raise RamseyError("universe must be nonempty")
        for name, tuples in self.relations.items():
            arities = {len(t) for t in tuples}
            if len(arities) > 1:
                raise RamseyError(f"relation {name!r} mixes arities {sorted(arities)}")
            for t in tuples:
                if any(not isinstance(a, int) or not 0 <= a < self.size for a in t):
                    raise RamseyError(f"relation {name!r} has {list(t)} outside the universe")
        for name, fn in self.functions.items():
            for args in itertools.product(range(self.size), repeat=fn.arity):
                if args not in fn.values:
                    raise RamseyError(f"function {name!r} is undefined at {list(args)}")
                if not 0 <= fn.values[args] < self.size:
                    raise RamseyError(f"function {name!r} leaves the universe at {list(args)}")
            if len(fn.values) != self.size ** fn.arity:
                raise RamseyError(f"function {name!r} has arguments outside the universe")

    @property
    def universe(self) -> range:
        return range(self.size)

    def relation(self, name: str) -> frozenset:
        if name in self.relations:
            return self.relations[name]
        if name == "lt":
            return frozenset(itertools.combinations(range(self.size), 2))
        if name == "le":
            return frozenset((a, b) for a in range(self.size) for b in range(a, self.size))
        raise EvaluationError(f"structure has no relation {name!r}")

    @classmethod
    def linear_order(cls, n: int, **extra) -> "FiniteStructure":
        """The ``n``-chain with ``lt`` and the successor relation ``succ``."""
        rels = {
            "lt": frozenset(itertools.combinations(range(n), 2)),
            "succ": frozenset((a, a + 1) for a in range(n - 1)),
        }
        rels.update({k: frozenset(map(tuple, v)) for k, v in extra.items()})
        return cls(n, rels)

    @classmethod
    def from_json(cls, data: Mapping) -> "FiniteStructure":
        try:
            size = data["size"]
        except (KeyError, TypeError):
            raise RamseyError("structure needs 'size'") from None
        if not isinstance(size, int):
            raise RamseyError("'size' must be an integer")
        rels = {}
        for name, tuples in data.get("relations", {}).items():
            if not isinstance(tuples, list) or not all(isinstance(t, list) for t in tuples):
                raise RamseyError(f"relation {name!r} must be a list of tuples")
            rels[name] = frozenset(tuple(t) for t in tuples)
        funcs = {name: FunctionTable.from_json(size, spec) for name, spec in data.get("functions", {}).items()}
        return cls(size, rels, funcs)

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "relations": {k: sorted(map(list, v)) for k, v in sorted(self.relations.items())},
            "functions": {
                k: {"arity": f.arity, "table": [f.values[a] for a in itertools.product(range(self.size), repeat=f.arity)]}
                for k, f in sorted(self.functions.items())
            },
        }


# ---------------------------------------------------------------------------
# evaluation


def evaluate(s: FiniteStructure, f: Formula, env: Mapping) -> bool:
    """Tarski satisfaction of *f* in *s* under *env*.

    ``=`` is identity; ``in``, ``S`` and ``P`` are read from relations of
    those names, and any other predicate from the relation it names.
    Quantifiers range over the universe.
    """
    bound = {(v if isinstance(v, Var) else Var.parse(v)): a for v, a in env.items()}
    for a in bound.values():
        if not isinstance(a, int) or not 0 <= a < s.size:
            raise EvaluationError(f"{a!r} is not an element of the universe")
    return _eval(s, f, bound)


def _lookup(env, v):
    try:
        return env[v]
    except KeyError:
        raise EvaluationError(f"variable {v} is unbound") from None


def _holds(s: FiniteStructure, name: str, args, env) -> bool:
    table = s.relation(name)
    values = tuple(_lookup(env, v) for v in args)
    if table:
        width = len(next(iter(table)))
        if width != len(values):
            raise EvaluationError(f"relation {name!r} has arity {width}, used with {len(values)}")
    return values in table


def _eval(s, f, env) -> bool:
    if isinstance(f, Membership):
        return _holds(s, "in", (f.element, f.container), env)
    if isinstance(f, Equality):
        return _lookup(env, f.left) == _lookup(env, f.right)
    if isinstance(f, Sethood):
        return _holds(s, "S", (f.arg,), env)
    if isinstance(f, Pairing):
        return _holds(s, "P", (f.first, f.second, f.pair), env)
    if isinstance(f, Relation):
        return _holds(s, f.name, f.args, env)
    if isinstance(f, Negation):
        return not _eval(s, f.body, env)
    if isinstance(f, Binary):
        left = _eval(s, f.left, env)
        if f.connective == "and":
            return left and _eval(s, f.right, env)
        if f.connective == "or":
            return left or _eval(s, f.right, env)
        if f.connective == "implies":
            return not left or _eval(s, f.right, env)
        return left == _eval(s, f.right, env)
    if isinstance(f, Quantified):
        test = any if f.quantifier == "exists" else all
        return test(_eval(s, f.body, {**env, f.var: a}) for a in range(s.size))
    raise EvaluationError(f"cannot evaluate {f!r}")


_POSITIONAL = re.compile(r"x([1-9][0-9]*)\Z")


def formula_arity(f: Formula) -> int:
    """Largest ``i`` with ``x<i>`` free in *f*; other free variables are errors."""
    top = 0
    for v in free_vars(f):
        match = _POSITIONAL.match(v.name)
        if v.index or not match:
            raise RamseyError(f"free variable {v} is not one of x1, x2, ...")
        top = max(top, int(match.group(1)))
    return top


def _positional_env(values: Sequence[int]) -> dict[Var, int]:
    return {Var(f"x{i + 1}"): a for i, a in enumerate(values)}


def truth_coloring(s: FiniteStructure, formulas: Sequence[Formula], k: int | None = None) -> Coloring:
    """Color each increasing ``k``-tuple by which formulas it satisfies.

    Bit ``i`` of the color is set iff formula ``i`` holds with ``x1 <
    ... < xk`` bound to the tuple.  *k* defaults to the largest arity
    among the formulas, and at least 1.
    """
    arities = [formula_arity(f) for f in formulas]
    if k is None:
        k = max(arities, default=0) or 1
    for f, a in zip(formulas, arities):
        if a > k:
            raise RamseyError(f"formula needs {a} variables but the coloring uses {k}-tuples")
    if k > s.size:
        raise RamseyError(f"{k}-tuples do not fit in a universe of size {s.size}")
    assignment = {}
    for tup in itertools.combinations(range(s.size), k):
        env = _positional_env(tup)
        assignment[tup] = sum(1 << i for i, f in enumerate(formulas) if _eval(s, f, env))
    return Coloring(s.size, k, 1 << len(formulas), assignment)


def check_indiscernible(s: FiniteStructure, formulas: Sequence[Formula], seq: Sequence[int], k: int | None = None) -> bool:
    """Whether any two increasing ``k``-tuples from *seq* satisfy the same formulas."""
    if k is None:
        k = max((formula_arity(f) for f in formulas), default=0) or 1
    if list(seq) != sorted(set(seq)):
        return False
    for f in formulas:
        truths = {evaluate(s, f, _positional_env(t)) for t in itertools.combinations(seq, k)}
        if len(truths) > 1:
            return False
    return True


def extract_indiscernibles(
    s: FiniteStructure, formulas: Sequence[Formula], m: int, k: int | None = None
) -> tuple[int, ...] | None:
    """The least increasing ``m``-sequence that is order-indiscernible for
    *formulas*, or ``None`` when the universe has none."""
    col = truth_coloring(s, formulas, k)
    if m > s.size:
        raise RamseyError(f"m = {m} exceeds the universe size {s.size}")
    witness = homogeneous(col, m)
    if witness is None:
        return None
    if not check_indiscernible(s, formulas, witness.subset, col.k):
        raise AssertionError(f"search returned a non-indiscernible sequence {witness.subset}")
    return witness.subset


def stabilize_terms(
    s: FiniteStructure,
    terms: Sequence[FunctionTable | str],
    z: int,
    m: int,
    within: Iterable[int] | None = None,
) -> HomogeneousWitness | None:
    """Find an ``m``-subset on which every term is stable.

    An increasing ``v``-tuple is colored by the vector whose ``i``-th entry
    is ``term_i(tuple)`` when that is below ``z`` and ``z`` otherwise.  On
    the returned subset each term is either constantly some value ``< z``
    or never below ``z``.  The search is limited to *within* when given.
    """
    tables = [s.functions[t] if isinstance(t, str) else t for t in terms]
    if not tables:
        raise RamseyError("need at least one term")
    arities = {t.arity for t in tables}
    if len(arities) != 1:
        raise RamseyError(f"terms have different arities {sorted(arities)}")
    (v,) = arities
    if not 0 <= z < s.size:
        raise RamseyError(f"threshold {z} is not in the universe")
    pool = sorted(set(range(s.size) if within is None else within))
    if any(not 0 <= a < s.size for a in pool):
        raise RamseyError("search set leaves the universe")
    if m > len(pool):
        raise RamseyError(f"m = {m} exceeds the search set size {len(pool)}")
    radix = z + 1

    def color(tup) -> int:
        args = tuple(pool[i] for i in tup)
        code = 0
        for t in tables:
            code = code * radix + min(t.values[args], z)
        return code

    col = Coloring.from_function(len(pool), v, radix ** len(tables), color)
    witness = homogeneous(col, m)
    if witness is None:
        return None
    values = []
    code = witness.color
    for _ in tables:
        code, digit = divmod(code, radix)
        values.append(digit)
    return HomogeneousWitness(tuple(pool[i] for i in witness.subset), witness.color, tuple(reversed(values)))
