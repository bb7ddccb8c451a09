import pytest
from hypothesis import given

from oracles import brute_force_stratified
from stratus.formula import Equality, Membership, Pairing, Var, alpha_rename, atoms, parse_formula
from stratus.stratification import (
    ConflictCycle,
    StratConstraint,
    Stratification,
    collect_constraints,
    is_stratified,
    report,
    solve,
    stratify,
)

from strategies import formulas

x, y, z = Var("x"), Var("y"), Var("z")


def test_membership_raises_level():
    s = stratify(parse_formula("(in x y)"))
    assert s.levels == {x: 0, y: 1}


def test_pairing_and_equality_force_equal_levels():
    s = stratify(parse_formula("(and (P x y z) (= z w))"))
    assert len({s["x"], s["y"], s["z"], s["w"]}) == 1


def test_sethood_imposes_nothing():
    s = stratify(parse_formula("(and (= x y) (S w))"))
    assert [str(c) for c in s.constraints] == ["x -0-> y"]
    assert s["w"] == 0


def test_russell_cycle():
    c = stratify(parse_formula("(exists y (forall x (iff (in x y) (not (in x x)))))"))
    assert isinstance(c, ConflictCycle)
    assert [str(k) for k in c.constraints] == ["x -1-> x"]
    assert c.net_offset == 1


def test_longer_cycle_is_a_closed_walk():
    c = stratify(parse_formula("(and (in x y) (and (in y z) (= z x)))"))
    assert isinstance(c, ConflictCycle)
    assert c.net_offset == 2
    verts = c.vertices()
    heads = [k.rhs if d > 0 else k.lhs for k, d in zip(c.constraints, c.directions)]
    assert heads == verts[1:] + verts[:1]


def test_shadowed_binders_are_separate():
    # each x is its own variable, so y sits one above both
    assert is_stratified(parse_formula("(and (forall x (in x y)) (forall x (in x y)))"))
    # but the free x and the bound one are different too
    assert is_stratified(parse_formula("(and (in y x) (forall x (in x y)))"))
    assert not is_stratified(parse_formula("(and (in y x) (in x y))"))


def test_renamed_binders_reported():
    s = stratify(parse_formula("(and (in x y) (forall x (S x)))"))
    assert s.original == {Var("x", 1): x}
    assert Var("x", 1) in s.levels


def test_levels_normalised_per_component():
    s = stratify(parse_formula("(and (in x y) (in z w))"))
    assert min(s["x"], s["y"]) == 0 and min(s["z"], s["w"]) == 0


def test_relation_atoms_rejected():
    with pytest.raises(ValueError):
        stratify(parse_formula("(lt x y)", relations=["lt"]))


def test_constraint_offset_checked():
    with pytest.raises(ValueError):
        StratConstraint(x, y, 2, None)


def test_report_shapes():
    ok = report(parse_formula("(in x y)"))
    assert ok["status"] == "stratified" and ok["levels"] == {"x": 0, "y": 1}
    bad = report(parse_formula("(in x x)"))
    assert bad["status"] == "conflict" and bad["net_offset"] == 1
    assert bad["cycle"] == [{"from": "x", "to": "x", "step": 1}]


def _check_sound(f, result):
    for c in result.constraints:
        assert result.levels[c.rhs] - result.levels[c.lhs] == c.offset
    for _, atom in atoms(alpha_rename(f)):
        if isinstance(atom, Membership):
            assert result.levels[atom.container] == result.levels[atom.element] + 1
        elif isinstance(atom, Equality):
            assert result.levels[atom.left] == result.levels[atom.right]
        elif isinstance(atom, Pairing):
            assert result.levels[atom.first] == result.levels[atom.second] == result.levels[atom.pair]


@given(formulas)
def test_agrees_with_exhaustive_search(f):
    assert is_stratified(f) == brute_force_stratified(f)


@given(formulas)
def test_results_are_sound(f):
    result = stratify(f)
    if isinstance(result, Stratification):
        _check_sound(f, result)
    else:
        assert result.net_offset > 0
        walk = sum(d * c.offset for c, d in zip(result.constraints, result.directions))
        assert walk == result.net_offset


@given(formulas)
def test_matches_separate_rename_collect_solve(f):
    one_pass = stratify(f)
    staged = solve(collect_constraints(alpha_rename(f)))
    assert type(one_pass) is type(staged)
    if isinstance(staged, Stratification):
        assert {v: one_pass.levels[v] for v in staged.levels} == staged.levels


@given(formulas)
def test_invariant_under_renaming(f):
    assert is_stratified(alpha_rename(f)) == is_stratified(f)
