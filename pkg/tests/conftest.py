"""Shared fixtures: golden queries and randomized instance generators."""

import random

import pytest

from ucqlab import Database, UnionQuery, parse_query
from ucqlab.queries import Atom, ConjunctiveQuery, Variable

EX_PATH_TEXT = (
    "Q(x,y,w) :- R1(x,z),R2(z,y),R3(y,w). "
    "Q(x,y,w) :- R1(x,t1),R2(t2,y),R3(w,t3)."
)

EX_CYCLE_TEXT = (
    "Q(x,z,y,v) :- R1(x,z,v),R2(z,y,v),R3(y,x,v). "
    "Q(x,z,y,v) :- R1(x,z,v),R2(y,t1,v),R3(t2,x,v)."
)

# one resolution step turns the first disjunct free-connex
EX_TRACTABLE_TEXT = (
    "Q(x,y,w) :- R1(x,z),R2(z,y),R3(y,w). Q(x,y,w) :- R1(x,w),R2(w,y)."
)


def hidden_cycle_union(k: int) -> UnionQuery:
    """Arity-(k-1) union whose resolution step leaves a tetra behind:
    the first disjunct hides a cycle on x1..x_{k-1}, the second provides
    exactly that cycle and nothing containing x_k."""
    xs = [f"x{i}" for i in range(1, k + 1)]
    head = ",".join(xs[1:])
    atoms1 = ",".join(
        f"R{i}(" + ",".join(xs[: i - 1] + xs[i:]) + ")" for i in range(1, k)
    )
    body2 = (
        "R1(" + ",".join(xs[1 : k - 1] + [xs[0]]) + "),"
        "R2(" + ",".join([xs[k - 1]] + xs[2 : k - 1] + ["v"]) + ")"
    )
    return parse_query(f"Q({head}) :- {atoms1}. Q({head}) :- {body2}.")


@pytest.fixture
def ex_path():
    return parse_query(EX_PATH_TEXT)


@pytest.fixture
def ex_cycle():
    return parse_query(EX_CYCLE_TEXT)


@pytest.fixture
def ex_tractable():
    return parse_query(EX_TRACTABLE_TEXT)


SCHEMA = [("R1", 1), ("R2", 2), ("R3", 2), ("R4", 3), ("R5", 1), ("R6", 3)]
VARS = ["a", "b", "c", "d", "e"]


def random_cq(rng: random.Random, head: tuple) -> ConjunctiveQuery | None:
    rels = rng.sample(SCHEMA, rng.randint(1, 5))
    body = tuple(
        Atom(sym, tuple(Variable(rng.choice(VARS)) for _ in range(ar)))
        for sym, ar in rels
    )
    used = {v for a in body for v in a.args}
    if set(head) - used:
        return None
    return ConjunctiveQuery(tuple(head), body)


def random_union(rng: random.Random) -> UnionQuery | None:
    head = tuple(Variable(v) for v in rng.sample(VARS, rng.randint(1, 3)))
    disjuncts = []
    for _ in range(rng.randint(1, 2)):
        q = random_cq(rng, head)
        if q is None:
            return None
        disjuncts.append(q)
    try:
        return UnionQuery(tuple(disjuncts))
    except ValueError:
        return None


def random_database(u: UnionQuery, rng: random.Random, max_constants: int = 8) -> Database:
    db = Database()
    dom = [str(i) for i in range(rng.randint(2, max_constants))]
    for d in u.disjuncts:
        for atom in d.body:
            db.ensure_relation(atom.relation, len(atom.args))
            for _ in range(rng.randint(0, 10)):
                db.add_tuple(
                    atom.relation, tuple(rng.choice(dom) for _ in atom.args)
                )
    return db
