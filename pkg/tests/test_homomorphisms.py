import pytest

from ucqlab.homomorphisms import (
    body_homomorphisms,
    is_contained,
    make_non_redundant,
    provided_sets,
    provided_variables,
    provides_set,
    provides_structure,
)
from ucqlab.queries import Variable, parse_cq, parse_query
from ucqlab.structure import find_difficult_structures

V = Variable


def test_unique_body_homomorphism_into_self_join_free(ex_path):
    q1, q2 = ex_path.disjuncts
    homs = body_homomorphisms(q2, q1)
    assert len(homs) == 1
    h = homs[0].as_dict()
    assert h == {
        V("x"): V("x"),
        V("t1"): V("z"),
        V("t2"): V("z"),
        V("y"): V("y"),
        V("w"): V("y"),
        V("t3"): V("w"),
    }


def test_no_homomorphism_when_symbols_differ():
    q1 = parse_cq("Q(x) :- R(x,y).")
    q2 = parse_cq("Q(x) :- S(x,y).")
    assert body_homomorphisms(q2, q1) == []


def test_containment_requires_positionwise_head_match(ex_path):
    q1, q2 = ex_path.disjuncts
    # the unique body-hom sends head (x,y,w) to (x,y,y)
    assert not is_contained(q1, q2)
    assert not is_contained(q2, q1)


def test_containment_by_specialization():
    narrow = parse_cq("Q(x) :- R(x,x).")
    wide = parse_cq("Q(x) :- R(x,y).")
    assert is_contained(narrow, wide)
    assert not is_contained(wide, narrow)


def test_make_non_redundant_keeps_incomparable_union(ex_path):
    assert make_non_redundant(ex_path) == ex_path


def test_make_non_redundant_drops_contained_disjunct():
    u = parse_query("Q(x) :- R(x,x). Q(x) :- R(x,y).")
    out = make_non_redundant(u)
    assert len(out.disjuncts) == 1
    assert out.disjuncts[0] == u.disjuncts[1]


def test_free_path_variable_not_provided(ex_path):
    q1, q2 = ex_path.disjuncts
    assert V("z") not in provided_variables(q1, q2)
    assert not provides_set(q2, q1, {V("x"), V("z"), V("y")})


def test_cycle_variable_not_provided(ex_cycle):
    q1, q2 = ex_cycle.disjuncts
    assert V("y") not in provided_variables(q1, q2)


def test_provided_sets_cover_homomorphism_image(ex_path):
    q1, q2 = ex_path.disjuncts
    targets = {p.target_vars for p in provided_sets(q1, q2)}
    # h sends the head (x,y,w) to (x,y,y), so the image of free(Q2) is {x,y}
    assert frozenset({V("x"), V("y")}) in targets
    assert all(t <= frozenset({V("x"), V("y")}) for t in targets)


def test_provided_sets_are_subset_closed(ex_path):
    q1, q2 = ex_path.disjuncts
    targets = {p.target_vars for p in provided_sets(q1, q2)}
    for t in targets:
        for v in t:
            assert (t - {v}) in targets or not (t - {v})


def test_provides_structure_subset_semantics(ex_tractable):
    q1, q2 = ex_tractable.disjuncts
    (free_path,) = find_difficult_structures(q1)
    assert provides_structure(q2, q1, free_path)


def test_hidden_cycle_is_provided_but_not_its_closure():
    from conftest import hidden_cycle_union

    q1, q2 = hidden_cycle_union(4).disjuncts
    cycle_vars = {V("x1"), V("x2"), V("x3")}
    assert provides_set(q2, q1, cycle_vars)
    assert not provides_set(q2, q1, cycle_vars | {V("x4")})


def test_provides_rejects_non_body_variables(ex_path):
    q1, q2 = ex_path.disjuncts
    assert not provides_set(q2, q1, {V("nothere")})
