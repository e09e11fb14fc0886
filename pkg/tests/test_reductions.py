import random
from fractions import Fraction

import pytest

from ucqlab.database import Database
from ucqlab.engine import brute_force_answers
from ucqlab.extension import classify_union
from ucqlab.queries import Variable, parse_cq, parse_query
from ucqlab.reductions import (
    BOT,
    ReductionError,
    TripartiteGraph,
    brute_force_hyperclique,
    build_reduction_database,
    choose_reduction_sets,
    format_graph,
    generate_qc,
    hyperclique_encode,
    load_graph,
    parse_graph,
    planted_triangle,
    qc_database_from_graph,
    qc_evaluate,
    random_tripartite,
    save_graph,
    split_v1v2,
    split_v3,
    triangle_brute_force,
    triangle_detect_2path,
    triangle_list,
    verify_reduction_conditions,
)
from ucqlab.structure import StructureKind, find_difficult_structures

V = Variable


def small_graph():
    return TripartiteGraph.build(2, 2, 2, e12=[(0, 0), (1, 1)], e23=[(0, 0)], e13=[(0, 0)])


# --- graph plumbing ---------------------------------------------------------


def test_graph_validation():
    with pytest.raises(ReductionError):
        TripartiteGraph.build(2, 2, 2, e12=[(5, 0)], e23=[], e13=[])
    with pytest.raises(ReductionError):
        TripartiteGraph.build(2, 2, 2, e12=[], e23=[(0, -1)], e13=[])


def test_graph_format_parse_roundtrip():
    g = random_tripartite(3, 4, 5, 0.5, random.Random(0))
    assert parse_graph(format_graph(g)) == g


def test_graph_file_roundtrip(tmp_path):
    g = random_tripartite(3, 4, 5, 0.5, random.Random(1))
    path = tmp_path / "g.txt"
    save_graph(g, path)
    assert load_graph(path) == g


def test_parse_graph_rejects_malformed():
    with pytest.raises(ReductionError):
        parse_graph("parts 2 2\ne12 0 0\n")
    with pytest.raises(ReductionError):
        parse_graph("parts 2 2 2\ne99 0 0\n")


def test_planted_triangle_always_has_one():
    for seed in range(10):
        g = planted_triangle(4, 4, 9, random.Random(seed), 0.2)
        assert triangle_brute_force(g)[0] is not None


# --- triangle algorithms ----------------------------------------------------


def test_triangle_algorithms_agree():
    rng = random.Random(5)
    for _ in range(60):
        g = random_tripartite(5, 5, 9, 0.3, rng)
        first, count = triangle_brute_force(g)
        listed = triangle_list(g)
        assert len(listed) == count
        assert len(set(listed)) == count
        assert (triangle_detect_2path(g) is None) == (first is None)


def test_triangle_detect_on_empty_graph():
    g = TripartiteGraph.build(2, 2, 2, e12=[], e23=[], e13=[])
    assert triangle_detect_2path(g) is None
    assert triangle_brute_force(g) == (None, 0)


# --- X-set selection --------------------------------------------------------


def test_choose_sets_free_path_middle(ex_path):
    q1 = ex_path.disjuncts[0]
    (s,) = find_difficult_structures(q1)
    plan = choose_reduction_sets(q1, s, V("z"))
    assert [set(x) for x in plan.x_sets] == [{V("x")}, {V("y")}, {V("z")}]
    assert plan.alpha == Fraction(1, 3)


def test_choose_sets_free_path_endpoint():
    q = parse_cq("Q(x,y) :- R1(x,z),R2(z,y).")
    (s,) = find_difficult_structures(q)
    for endpoint in (s.variables[0], s.variables[-1]):
        plan = choose_reduction_sets(q, s, endpoint)
        assert plan.x_sets[-1] == frozenset({endpoint})
        assert plan.x_sets[1] == frozenset({V("z")})


def test_choose_sets_cycle_rotation(ex_cycle):
    q1 = ex_cycle.disjuncts[0]
    (s,) = find_difficult_structures(q1)
    plan = choose_reduction_sets(q1, s, V("y"))
    assert [set(x) for x in plan.x_sets] == [{V("z")}, {V("x")}, {V("y")}]


def test_choose_sets_long_cycle_prefix():
    q = parse_cq("Q() :- R1(a,b),R2(b,c),R3(c,d),R4(d,a).")
    (s,) = find_difficult_structures(q)
    v = s.variables[-1]
    plan = choose_reduction_sets(q, s, v)
    assert len(plan.x_sets) == 3
    assert plan.x_sets[2] == frozenset({v})
    assert len(plan.x_sets[0]) == 2 and len(plan.x_sets[1]) == 1
    # prefix must stay consecutive along the cycle
    rep = verify_reduction_conditions(q, None, plan)
    assert rep.conditions["sets_connected"]


def test_choose_sets_requires_member_variable(ex_path):
    q1 = ex_path.disjuncts[0]
    (s,) = find_difficult_structures(q1)
    with pytest.raises(ReductionError):
        choose_reduction_sets(q1, s, V("w"))


def test_verify_conditions_golden(ex_path):
    q1, q2 = ex_path.disjuncts
    (s,) = find_difficult_structures(q1)
    plan = choose_reduction_sets(q1, s, V("z"))
    report = verify_reduction_conditions(q1, q2, plan)
    assert report.ok
    assert all(report.conditions.values())


def test_verify_conditions_fail_when_edge_covers_everything():
    q = parse_cq("Q(x,y) :- R1(x,z),R2(z,y),R3(x,z,y).")
    from ucqlab.reductions import ReductionPlan
    from ucqlab.structure import DifficultStructure

    s = DifficultStructure(StructureKind.FREE_PATH, (V("x"), V("z"), V("y")))
    plan = ReductionPlan(
        (frozenset({V("x")}), frozenset({V("y")}), frozenset({V("z")})),
        Fraction(1, 2),
        s,
        V("z"),
    )
    report = verify_reduction_conditions(q, None, plan)
    assert not report.conditions["atom_misses_some_set"]
    assert not report.ok


# --- reduction database -----------------------------------------------------


def triangle_iff_witness(union_text, graphs):
    u = parse_query(union_text)
    r = classify_union(u)
    q1 = r.resolved.original.disjuncts[r.difficult_index]
    for g in graphs:
        has = triangle_brute_force(g)[0] is not None
        db, is_witness = build_reduction_database(q1, r.plan, g)
        found = any(
            is_witness(db.decode_tuple(row)) for row in brute_force_answers(q1, db)
        )
        assert found == has, format_graph(g)


def test_reduction_database_free_path(ex_path):
    rng = random.Random(31)
    triangle_iff_witness(
        "Q(x,y,w) :- R1(x,z),R2(z,y),R3(y,w). "
        "Q(x,y,w) :- R1(x,t1),R2(t2,y),R3(w,t3).",
        [random_tripartite(4, 4, 7, 0.3, rng) for _ in range(40)],
    )


def test_reduction_database_cycle(ex_cycle):
    rng = random.Random(32)
    triangle_iff_witness(
        "Q(x,z,y,v) :- R1(x,z,v),R2(z,y,v),R3(y,x,v). "
        "Q(x,z,y,v) :- R1(x,z,v),R2(y,t1,v),R3(t2,x,v).",
        [random_tripartite(4, 4, 7, 0.3, rng) for _ in range(40)],
    )


def test_reduction_database_uses_bottom_for_outside_variables(ex_cycle):
    r = classify_union(ex_cycle)
    q1 = r.resolved.original.disjuncts[r.difficult_index]
    g = small_graph()
    db, _ = build_reduction_database(q1, r.plan, g)
    rel = db.relation("R1", 3)
    values = {db.decode_tuple(t)[2] for t in rel}
    assert values == {f"v|{BOT}"}


# --- V3 splitting and the V1/V2 grid ---------------------------------------


def test_split_v3_preserves_triangles():
    rng = random.Random(8)
    for _ in range(40):
        g = random_tripartite(5, 5, 11, 0.3, rng)
        parts = split_v3(g, Fraction(1, 2), Fraction(1, 2))
        assert sum(triangle_brute_force(p)[1] for p in parts) == triangle_brute_force(g)[1]


def test_split_v3_block_sizes():
    g = random_tripartite(4, 4, 10, 0.5, random.Random(9))
    parts = split_v3(g, Fraction(1, 3), Fraction(2, 3))
    # blocks of size ceil(10^(1/2)) = 4 -> 3 blocks
    assert [p.n3 for p in parts] == [4, 4, 2]


def test_split_v3_validates_exponents():
    g = small_graph()
    with pytest.raises(ReductionError):
        split_v3(g, Fraction(2, 3), Fraction(1, 3))


def test_split_v1v2_preserves_triangles():
    rng = random.Random(10)
    for _ in range(40):
        g = random_tripartite(6, 6, 8, 0.3, rng)
        parts = split_v1v2(g, 3)
        assert all(p.n1 <= 3 and p.n2 <= 3 for p in parts)
        assert sum(triangle_brute_force(p)[1] for p in parts) == triangle_brute_force(g)[1]


# --- Q_[c] family -----------------------------------------------------------


def test_generate_qc_shape():
    u = generate_qc(1)
    assert len(u.disjuncts) == 4
    q1 = u.disjuncts[0]
    assert {a.relation for a in q1.body} == {"R1", "R2", "R3", "R4", "RX1", "RY1"}
    assert len(u.head_vars) == 2
    u2 = generate_qc(2)
    assert len(u2.head_vars) == 4


def test_generate_qc_rejects_nonpositive():
    with pytest.raises(ReductionError):
        generate_qc(0)


def test_qc_witness_iff_triangle():
    rng = random.Random(12)
    for c in (1, 2):
        for _ in range(25):
            g = random_tripartite(4, 4, 6, 0.35, rng)
            has = triangle_brute_force(g)[0] is not None
            db = qc_database_from_graph(c, g)
            bot = db.lookup(BOT)
            witness = tuple([bot] * (2 * c))
            rows = list(qc_evaluate(c, db))
            assert len(rows) == len(set(rows))
            assert (witness in rows) == has


def test_qc_answer_count_formula():
    for c, n in ((1, 3), (2, 2)):
        g = random_tripartite(n, n, 2, 1.0, random.Random(0))
        db = qc_database_from_graph(c, g)
        q2 = generate_qc(c).disjuncts[1]
        assert len(brute_force_answers(q2, db)) == (n * n) ** c


def test_qc_stream_matches_brute_force_union():
    rng = random.Random(13)
    for _ in range(10):
        g = random_tripartite(3, 3, 4, 0.5, rng)
        db = qc_database_from_graph(1, g)
        got = set(qc_evaluate(1, db))
        assert got == brute_force_answers(generate_qc(1), db)


# --- hyperclique encoding ---------------------------------------------------


def test_hyperclique_k3_is_identity_graph():
    g = random_tripartite(3, 3, 4, 0.5, random.Random(14))
    h = hyperclique_encode(g, 3)
    assert h.arity == 2
    assert len(h.edges) == len(g.e12) + len(g.e23) + len(g.e13)


def test_hyperclique_counts_match():
    rng = random.Random(15)
    for _ in range(25):
        g = random_tripartite(3, 3, 9, 0.4, rng)
        want = triangle_brute_force(g)[1]
        for k in (3, 4):
            h = hyperclique_encode(g, k)
            _, count = brute_force_hyperclique(h, k)
            assert count == want, (k, format_graph(g))


def test_hyperclique_rejects_small_k():
    with pytest.raises(ReductionError):
        hyperclique_encode(small_graph(), 2)
