import itertools
import pickle
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_iso, code_to_frozenset, relation_to_frozenset, von_neumann_frozenset
from stratus.bfext import (
    EMPTY,
    BfextError,
    BoundExceeded,
    CanonCode,
    FinWellOrder,
    PointedRelation,
    ValidationReport,
    canon,
    certify,
    collapse,
    enumerate_bf,
    eps,
    ext,
    from_code,
    from_set_literal,
    iso,
    k_embed,
    parse_set_literal,
    pow,
    seg,
    t_card,
    t_op,
    validate,
    von_neumann,
)


def rel(edges, top, nodes=None):
    nodes = set(nodes or ()) | {top} | {n for e in edges for n in e}
    return PointedRelation.make(nodes, edges, top)


# canonical codes


def test_codes_are_interned():
    a = CanonCode([EMPTY, CanonCode([EMPTY])])
    b = CanonCode((CanonCode([EMPTY]), EMPTY, EMPTY))
    assert a is b
    assert pickle.loads(pickle.dumps(a)) is a


def test_von_neumann_order_and_text():
    naturals = [von_neumann(n) for n in range(6)]
    assert naturals == sorted(naturals)
    assert str(naturals[2]) == "{{},{{}}}"
    assert parse_set_literal(" { {}, { {} } } ") is naturals[2]
    assert [code_to_frozenset(c) for c in naturals] == [von_neumann_frozenset(n) for n in range(6)]


@pytest.mark.parametrize("text", ["{", "{}}", "{{},", "x", ""])
def test_bad_literals(text):
    with pytest.raises(BfextError):
        parse_set_literal(text)


# validation


def test_validate_accepts_ordinal_two():
    b = validate(rel([(0, 1), (0, 2), (1, 2)], 2))
    assert not isinstance(b, ValidationReport)
    assert b.canon is von_neumann(2)


def test_validate_reports_each_failure():
    cyc = validate(rel([(0, 1), (1, 0), (0, 2)], 2))
    assert set(cyc.failures) >= {"acyclic"}
    twins = validate(rel([(0, 1), (0, 2), (1, 3), (2, 3)], 3))
    assert twins.failures["extensional"] == (1, 2)
    loose = validate(rel([(0, 1), (1, 5)], 1))
    assert loose.failures == {"topped": 5}
    bad = validate(PointedRelation.make([0], [(0, 9)], 0))
    assert "well-formed" in bad.failures
    assert not bad
    with pytest.raises(BfextError):
        certify(rel([(0, 0)], 0))


def test_seg_and_ext():
    two = from_code(von_neumann(3))
    tops = [c for c, p in two.relation.edges if p == two.top]
    assert {certify(seg(two.relation, c)).canon for c in tops} == {von_neumann(i) for i in range(3)}
    assert ext(two) == ext(two.canon) == frozenset(von_neumann(i) for i in range(3))
    with pytest.raises(BfextError):
        seg(two.relation, "nope")


# collapse and isomorphism


def test_collapse_merges_twins():
    out, g = collapse(rel([(0, 1), (0, 2), (1, 3), (2, 3)], 3))
    assert out.canon is CanonCode([CanonCode([EMPTY])])
    assert g[1] == g[2] and len(set(g.values())) == 3


def test_collapse_rejects_cycles_and_untopped():
    with pytest.raises(BfextError):
        collapse(rel([(0, 1), (1, 0)], 0))
    with pytest.raises(BfextError):
        collapse(rel([], 0, nodes=[1]))


@st.composite
def topped_dags(draw, max_nodes=6):
    n = draw(st.integers(1, max_nodes))
    edges = set()
    for i in range(n - 1):
        parents = draw(st.sets(st.integers(i + 1, n - 1), min_size=1, max_size=n - 1 - i))
        edges |= {(i, p) for p in parents}
    return PointedRelation.make(range(n), edges, n - 1)


@given(topped_dags())
def test_collapse_value_matches_frozensets(r):
    out, g = collapse(r)
    assert code_to_frozenset(out.canon) == relation_to_frozenset(r)
    assert collapse(out.relation)[0].canon is out.canon
    assert set(g.values()) == set(out.relation.nodes)


@settings(max_examples=60)
@given(topped_dags(max_nodes=5), topped_dags(max_nodes=5))
def test_iso_agrees_with_bijection_search(r, s):
    a, b = collapse(r)[0], collapse(s)[0]
    assert iso(a, b) == brute_force_iso(a.relation, b.relation)


def test_iso_ignores_node_names():
    a = from_set_literal("{{},{{}}}")
    b = certify(rel([("e", "o"), ("e", "t"), ("o", "t")], "t"))
    assert iso(a, b)
    assert not iso(a, from_set_literal("{{}}"))


# eps, pow and friends


def test_eps_is_membership():
    one, two = from_code(von_neumann(1)), from_code(von_neumann(2))
    assert eps(one, two)
    assert not eps(two, one)
    assert not eps(two, two)


def test_pow_sizes_and_members():
    x = von_neumann(2)
    p = pow(x)
    assert len(p) == 4
    assert p == {parse_set_literal(t) for t in ["{}", "{{}}", "{{{}}}", "{{},{{}}}"]}
    assert pow(from_code(x)) == p


@settings(max_examples=50)
@given(topped_dags())
def test_pow_law_on_relations(r):
    b = collapse(r)[0]
    assert len(pow(b)) == 2 ** len(ext(b))
    assert all(set(ext(s)) <= set(ext(b)) for s in pow(b))


def test_k_embed_of_well_orders():
    w = FinWellOrder.from_pairs("abc", [("a", "b"), ("b", "c"), ("a", "c"), ("a", "a")])
    assert w.elements == ("a", "b", "c")
    assert k_embed(w).canon is von_neumann(3)
    assert canon(k_embed(FinWellOrder.of_length(0))) is EMPTY
    with pytest.raises(BfextError):
        FinWellOrder.from_pairs("abc", [("a", "b")])
    with pytest.raises(BfextError):
        FinWellOrder(("a", "a"))


def test_t_operation_is_identity_on_classes():
    for text in ["{}", "{{},{{}}}", "{{{{}}},{}}"]:
        b = from_set_literal(text)
        assert canon(t_op(b)) is b.canon
    assert [t_card(n) for n in range(5)] == list(range(5))
    with pytest.raises(BfextError):
        t_card(-1)


# enumeration


def test_enumeration_counts():
    # hereditarily finite sets whose canonical DAG has at most n nodes
    assert [len(enumerate_bf(n)) for n in range(1, 7)] == [1, 2, 4, 12, 80, 1328]


def test_enumeration_is_complete_and_duplicate_free():
    codes = enumerate_bf(5)
    assert len(set(codes)) == len(codes)
    assert all(c.node_count() <= 5 for c in codes)
    # every subset of a small set, closed under membership, is present
    universe = set(codes)
    for c in codes:
        assert set(c.elements) <= universe
    counts = [c.node_count() for c in codes]
    assert counts == sorted(counts)


def test_enumeration_element_bound():
    codes = enumerate_bf(6, max_elements=2)
    assert all(len(c) <= 2 for c in codes)
    assert set(codes) == {c for c in enumerate_bf(6) if len(c) <= 2}


def test_enumeration_bounds_checked():
    with pytest.raises(BoundExceeded):
        enumerate_bf(9)
    with pytest.raises(BfextError):
        enumerate_bf(0)


def test_enumeration_matches_naive_closure():
    # every set with at most 4 nodes, built by closing {} under subsets
    level = {frozenset()}
    for _ in range(4):
        level |= {frozenset(s) for r in range(4) for s in itertools.combinations(sorted(level, key=repr), r)}
    small = set()
    for s in level:
        nodes = set()
        stack = [s]
        while stack:
            t = stack.pop()
            if t not in nodes:
                nodes.add(t)
                stack.extend(t)
        if len(nodes) <= 4:
            small.add(s)
    assert {code_to_frozenset(c) for c in enumerate_bf(4)} == small


def test_json_round_trip():
    r = rel([(0, 1), (0, 2), (1, 2)], 2)
    assert PointedRelation.from_json(r.to_json()) == r
    with pytest.raises(BfextError):
        PointedRelation.from_json({"nodes": [0]})
    with pytest.raises(BfextError):
        PointedRelation.from_json({"nodes": [0], "edges": [[0]], "top": 0})


def test_random_relabel_keeps_code():
    rng = random.Random(3)
    b = from_code(von_neumann(4))
    names = list(b.relation.nodes)
    shuffled = names[:]
    rng.shuffle(shuffled)
    f = dict(zip(names, shuffled))
    r = PointedRelation.make(shuffled, [(f[c], f[p]) for c, p in b.relation.edges], f[b.top])
    assert certify(r).canon is b.canon


def test_k_and_t_commute_on_short_orders():
    for n in range(9):
        k = k_embed(FinWellOrder.of_length(n))
        assert canon(t_op(k)) is canon(k) is von_neumann(n)
