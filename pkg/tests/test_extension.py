import json

import pytest

from conftest import hidden_cycle_union
from ucqlab.extension import (
    ExtensionError,
    UnsupportedScopeError,
    Verdict,
    classify_union,
    is_virtual_symbol,
    resolve,
)
from ucqlab.queries import Variable, parse_query
from ucqlab.reductions import generate_qc
from ucqlab.structure import StructureKind, find_difficult_structures, is_free_connex

V = Variable


def total_steps(resolved):
    return sum(len(e.virtual_atoms) for e in resolved.extended)


def test_virtual_symbol_predicate():
    assert is_virtual_symbol("V_1")
    assert is_virtual_symbol("V_23")
    assert not is_virtual_symbol("V_")
    assert not is_virtual_symbol("R1")
    assert not is_virtual_symbol("vx")


def test_resolve_no_step_when_nothing_provided(ex_path):
    resolved = resolve(ex_path)
    assert total_steps(resolved) == 0


def test_resolve_single_step_yields_free_connex(ex_tractable):
    resolved = resolve(ex_tractable)
    assert total_steps(resolved) == 1
    (va,) = resolved.extended[0].virtual_atoms
    assert {v.name for v in va.variables} == {"x", "z", "y"}
    assert is_virtual_symbol(va.symbol)
    assert resolved.all_free_connex()


def test_resolve_is_idempotent(ex_tractable):
    once = resolve(ex_tractable)
    again = resolve(once.as_union())
    assert total_steps(again) == 0
    assert again.all_free_connex() == once.all_free_connex()


def test_resolve_hidden_cycle_leaves_tetra():
    for k in (4, 5):
        resolved = resolve(hidden_cycle_union(k))
        ext = resolved.extended[0]
        assert total_steps(resolved) == 1
        (va,) = ext.virtual_atoms
        assert {v.name for v in va.variables} == {f"x{i}" for i in range(1, k)}
        q1 = ext.query()
        kinds = {s.kind for s in find_difficult_structures(q1)}
        assert StructureKind.TETRA in kinds
        assert not ext.is_free_connex()


def test_resolve_qc_family_makes_no_step():
    for c in (1, 2):
        resolved = resolve(generate_qc(c))
        assert total_steps(resolved) == 0
        assert not resolved.all_free_connex()


def test_classify_free_path_union(ex_path):
    r = classify_union(ex_path)
    assert r.verdict is Verdict.INTRACTABLE
    assert r.structure.kind is StructureKind.FREE_PATH
    assert {v.name for v in r.structure.variables} == {"x", "z", "y"}
    assert r.unprovided == V("z")
    assert [sorted(v.name for v in xs) for xs in r.plan.x_sets] == [
        ["x"],
        ["y"],
        ["z"],
    ]


def test_classify_cycle_union(ex_cycle):
    r = classify_union(ex_cycle)
    assert r.verdict is Verdict.INTRACTABLE
    assert r.structure.kind is StructureKind.CHORDLESS_CYCLE
    assert {v.name for v in r.structure.variables} == {"x", "y", "z"}
    assert r.unprovided == V("y")
    assert [sorted(v.name for v in xs) for xs in r.plan.x_sets] == [
        ["z"],
        ["x"],
        ["y"],
    ]


def test_classify_tractable_union(ex_tractable):
    r = classify_union(ex_tractable)
    assert r.verdict is Verdict.TRACTABLE
    assert all(e.is_free_connex() for e in r.resolved.extended)


def test_classify_hidden_cycle_unions():
    for k in (4, 5):
        r = classify_union(hidden_cycle_union(k))
        assert r.verdict is Verdict.INTRACTABLE
        assert r.unprovided == V(f"x{k}")
        expected = [{f"x{i}"} for i in range(1, k + 1)]
        assert [{v.name for v in xs} for xs in r.plan.x_sets] == expected


def test_classify_rejects_more_than_two_disjuncts():
    with pytest.raises(UnsupportedScopeError):
        classify_union(generate_qc(1))


def test_classify_rejects_self_join_in_difficult_disjunct():
    u = parse_query("Q(x,y) :- R(x,z),R(z,y).")
    with pytest.raises(UnsupportedScopeError):
        classify_union(u)


def test_classify_two_difficult_body_isomorphic():
    u = parse_query("Q(x) :- R(x,z),S(z,y),T(y,x). Q(x) :- R(x,a),S(a,b),T(b,x).")
    r = classify_union(u)
    # the two disjuncts collapse under containment; a single cyclic CQ is hard
    assert r.verdict is Verdict.INTRACTABLE


def test_classification_json_shape(ex_path):
    r = classify_union(ex_path)
    doc = json.loads(r.to_json())
    assert doc["verdict"] == "IntractableUnderVUTD"
    assert doc["witness"]["structure"] == "free-path(x,z,y)"
    assert doc["witness"]["unprovided"] == "z"
    assert doc["witness"]["x_sets"] == [["x"], ["y"], ["z"]]
    assert len(doc["disjuncts"]) == 2


def test_classification_json_tractable(ex_tractable):
    doc = json.loads(classify_union(ex_tractable).to_json())
    assert doc["verdict"] == "Tractable"
    assert any(d["virtual_atoms"] for d in doc["disjuncts"])


def test_virtual_symbols_avoid_user_symbols():
    u = parse_query(
        "Q(x,y,w) :- R1(x,z),R2(z,y),R3(y,w),V_1(x). "
        "Q(x,y,w) :- R1(x,w),R2(w,y),V_1(x)."
    )
    resolved = resolve(u)
    fresh = {va.symbol for e in resolved.extended for va in e.virtual_atoms}
    assert "V_1" not in fresh
