import pytest
from hypothesis import given
from hypothesis import strategies as st

from ucqlab.queries import (
    Atom,
    ConjunctiveQuery,
    Constant,
    QueryError,
    UnionQuery,
    Variable,
    is_self_join_free,
    parse_cq,
    parse_query,
    print_query,
)


def test_parse_two_disjunct_union():
    u = parse_query(
        "Q(x,y,w) :- R1(x,z),R2(z,y),R3(y,w). "
        "Q(x,y,w) :- R1(x,t1),R2(t2,y),R3(w,t3)."
    )
    assert len(u.disjuncts) == 2
    assert {v.name for v in u.disjuncts[0].free()} == {"x", "y", "w"}
    assert u.head_vars == tuple(Variable(n) for n in ("x", "y", "w"))


def test_parse_single_atom():
    q = parse_cq("Q(x,y) :- R(x,y).")
    assert q.free() == frozenset({Variable("x"), Variable("y")})
    assert len(q.body) == 1


def test_head_var_must_appear_in_body():
    with pytest.raises(QueryError):
        parse_cq("Q(x) :- R(y).")


def test_disjuncts_must_share_head_variable_set():
    with pytest.raises(QueryError):
        parse_query("Q(x) :- R(x). Q(y) :- R(y).")


def test_constants_in_body():
    q = parse_cq("Q(x) :- R(x,'3'),S(x,'hi').")
    consts = {t for a in q.body for t in a.args if isinstance(t, Constant)}
    assert {c.value for c in consts} == {"3", "hi"}


def test_boolean_query():
    q = parse_cq("Q() :- R(x,y).")
    assert q.is_boolean()
    assert q.free() == frozenset()


def test_self_join_free():
    assert is_self_join_free(parse_cq("Q(x) :- R1(x,y),R2(y,x)."))
    assert not is_self_join_free(
        parse_cq("Q(x,y,w) :- R1(x,t1),R3(y,t2),R3(w,t3).")
    )


def test_syntax_error_reports_position():
    with pytest.raises(QueryError):
        parse_query("Q(x) :- R(x),")


def test_inconsistent_arity_rejected():
    with pytest.raises(QueryError):
        parse_cq("Q(x) :- R(x),R(x,x).")
    with pytest.raises(QueryError):
        parse_query("Q(x) :- R(x). Q(x) :- R(x,x).")


# fixed symbol -> arity map keeps generated queries well-formed
SCHEMA = {"R1": 1, "R2": 2, "R3": 3, "S1": 1, "S2": 2}


@st.composite
def cqs(draw):
    head_pool = draw(
        st.lists(st.sampled_from("abcd"), min_size=1, max_size=3, unique=True)
    )
    symbols = draw(
        st.lists(st.sampled_from(sorted(SCHEMA)), min_size=1, max_size=4, unique=True)
    )
    body = []
    used = set()
    for sym in symbols:
        args = tuple(
            Variable(draw(st.sampled_from(head_pool + ["u", "v", "w"])))
            for _ in range(SCHEMA[sym])
        )
        body.append(Atom(sym, args))
        used.update(args)
    head = tuple(Variable(n) for n in head_pool if Variable(n) in used)
    return ConjunctiveQuery(head, tuple(body))


@given(cqs())
def test_print_parse_roundtrip_cq(q):
    assert parse_cq(print_query(q)) == q


@given(st.lists(cqs(), min_size=1, max_size=3))
def test_print_parse_roundtrip_union(qs):
    head = qs[0].head_vars
    compatible = [q for q in qs if q.head_vars == head]
    u = UnionQuery(tuple(compatible))
    assert parse_query(print_query(u)) == u
