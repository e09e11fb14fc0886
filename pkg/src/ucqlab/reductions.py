"""Tripartite graphs, triangle algorithms, and graph↔database reductions.

The hardness side of the classifier rests on encoding unbalanced triangle
detection into query evaluation: disjoint variable sets X_1..X_ℓ of the
difficult disjunct take the roles of the three vertex parts (X_ℓ and the
middle sets jointly encode the large part as a coordinate product), and
the query's relations are filled from the edge sets so that answers
correspond to triangles.  This module selects the X-sets for each kind of
witness structure, verifies the four side conditions, builds the database,
and also houses the Q_[c] query family and the hyperclique encoding used
by the accompanying self-reductions.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Optional

from .database import Database, Relation
from .engine import (
    AnswerStream,
    cheaters_adapter,
    prepare_free_connex,
)
from .queries import Atom, ConjunctiveQuery, UnionQuery, Variable, parse_query
from .structure import (
    DifficultStructure,
    ExtendedKind,
    ExtendedStructure,
    StructureKind,
    hypergraph_of,
)

BOT = "bot"


class ReductionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# tripartite graphs


@dataclass(frozen=True)
class TripartiteGraph:
    """Vertex parts are id ranges 0..n_i-1; edges are cross-part pairs."""

    n1: int
    n2: int
    n3: int
    e12: frozenset[tuple[int, int]]
    e23: frozenset[tuple[int, int]]
    e13: frozenset[tuple[int, int]]

    def __post_init__(self):
        for (u, v), (a, b), name in (
            ((0, 0), (self.n1, self.n2), "e12"),
            ((0, 0), (self.n2, self.n3), "e23"),
            ((0, 0), (self.n1, self.n3), "e13"),
        ):
            edges = getattr(self, name)
            for x, y in edges:
                if not (0 <= x < a and 0 <= y < b):
                    raise ReductionError(f"{name} edge ({x},{y}) out of range")

    @classmethod
    def build(cls, n1, n2, n3, e12=(), e23=(), e13=()) -> "TripartiteGraph":
        return cls(n1, n2, n3, frozenset(e12), frozenset(e23), frozenset(e13))


def parse_graph(text: str) -> TripartiteGraph:
    n1 = n2 = n3 = None
    e12, e23, e13 = set(), set(), set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if fields[0] == "parts":
            if len(fields) != 4:
                raise ReductionError(f"line {lineno}: parts needs three sizes")
            n1, n2, n3 = map(int, fields[1:])
        elif fields[0] in ("e12", "e23", "e13"):
            if n1 is None:
                raise ReductionError(f"line {lineno}: edge before parts header")
            if len(fields) != 3:
                raise ReductionError(f"line {lineno}: edge needs two endpoints")
            {"e12": e12, "e23": e23, "e13": e13}[fields[0]].add(
                (int(fields[1]), int(fields[2]))
            )
        else:
            raise ReductionError(f"line {lineno}: unknown directive {fields[0]!r}")
    if n1 is None:
        raise ReductionError("missing parts header")
    return TripartiteGraph.build(n1, n2, n3, e12, e23, e13)


def load_graph(path: str | Path) -> TripartiteGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def format_graph(g: TripartiteGraph) -> str:
    lines = [f"parts {g.n1} {g.n2} {g.n3}"]
    for name in ("e12", "e23", "e13"):
        for u, v in sorted(getattr(g, name)):
            lines.append(f"{name} {u} {v}")
    return "\n".join(lines) + "\n"


def save_graph(g: TripartiteGraph, path: str | Path):
    Path(path).write_text(format_graph(g), encoding="utf-8")


def random_tripartite(
    n1: int, n2: int, n3: int, p: float, rng: random.Random
) -> TripartiteGraph:
    def flip(a, b):
        return frozenset(
            (i, j) for i in range(a) for j in range(b) if rng.random() < p
        )

    return TripartiteGraph(n1, n2, n3, flip(n1, n2), flip(n2, n3), flip(n1, n3))


def planted_triangle(
    n1: int, n2: int, n3: int, rng: random.Random, p: float = 0.0
) -> TripartiteGraph:
    g = random_tripartite(n1, n2, n3, p, rng)
    a, b, c = rng.randrange(n1), rng.randrange(n2), rng.randrange(n3)
    return TripartiteGraph(
        n1, n2, n3, g.e12 | {(a, b)}, g.e23 | {(b, c)}, g.e13 | {(a, c)}
    )


# ---------------------------------------------------------------------------
# triangle algorithms


def triangle_brute_force(
    g: TripartiteGraph,
) -> tuple[Optional[tuple[int, int, int]], int]:
    """Exhaustive triple loop; returns the first triangle and the count."""
    first = None
    count = 0
    for a in range(g.n1):
        for b in range(g.n2):
            if (a, b) not in g.e12:
                continue
            for c in range(g.n3):
                if (b, c) in g.e23 and (a, c) in g.e13:
                    count += 1
                    if first is None:
                        first = (a, b, c)
    return first, count


def triangle_list(g: TripartiteGraph) -> list[tuple[int, int, int]]:
    """All triangles via the 2-path join E12 ⋈ E23, probed against E13."""
    adj23: dict[int, list[int]] = {}
    for b, c in g.e23:
        adj23.setdefault(b, []).append(c)
    out = []
    for a, b in g.e12:
        for c in adj23.get(b, ()):
            if (a, c) in g.e13:
                out.append((a, b, c))
    return out


def triangle_detect_2path(g: TripartiteGraph) -> Optional[tuple[int, int, int]]:
    """Existence check with early exit over the same 2-path join."""
    adj23: dict[int, list[int]] = {}
    for b, c in g.e23:
        adj23.setdefault(b, []).append(c)
    for a, b in g.e12:
        for c in adj23.get(b, ()):
            if (a, c) in g.e13:
                return (a, b, c)
    return None


# ---------------------------------------------------------------------------
# splitting self-reductions


def split_v3(
    g: TripartiteGraph, alpha: float, beta: float
) -> list[TripartiteGraph]:
    """Partition V3 into blocks of size ~n^(alpha/beta); triangles are
    preserved across the union of blocks."""
    if not (0 < alpha <= beta <= 1):
        raise ReductionError("need 0 < alpha <= beta <= 1")
    if g.n1 != g.n2:
        raise ReductionError("split_v3 expects |V1| = |V2|")
    n = g.n3
    if n == 0:
        return [g]
    size = max(1, math.ceil(n ** (alpha / beta)))
    out = []
    for lo in range(0, n, size):
        hi = min(lo + size, n)
        out.append(
            TripartiteGraph(
                g.n1,
                g.n2,
                hi - lo,
                g.e12,
                frozenset((b, c - lo) for b, c in g.e23 if lo <= c < hi),
                frozenset((a, c - lo) for a, c in g.e13 if lo <= c < hi),
            )
        )
    return out


def split_v1v2(g: TripartiteGraph, block: int) -> list[TripartiteGraph]:
    """Grid partition of V1 x V2 into blocks of side <= block."""
    if block < 1:
        raise ReductionError("block must be >= 1")
    out = []
    for lo1 in range(0, max(g.n1, 1), block):
        hi1 = min(lo1 + block, g.n1)
        for lo2 in range(0, max(g.n2, 1), block):
            hi2 = min(lo2 + block, g.n2)
            out.append(
                TripartiteGraph(
                    max(hi1 - lo1, 0),
                    max(hi2 - lo2, 0),
                    g.n3,
                    frozenset(
                        (a - lo1, b - lo2)
                        for a, b in g.e12
                        if lo1 <= a < hi1 and lo2 <= b < hi2
                    ),
                    frozenset((b - lo2, c) for b, c in g.e23 if lo2 <= b < hi2),
                    frozenset((a - lo1, c) for a, c in g.e13 if lo1 <= a < hi1),
                )
            )
    return out


# ---------------------------------------------------------------------------
# X-set selection and condition checking


@dataclass(frozen=True)
class ReductionPlan:
    """Disjoint variable sets X_1..X_ℓ encoding the three graph parts.

    X_1 plays V1, X_2 plays V2, and X_3..X_ℓ jointly encode V3 as a
    coordinate product; ``alpha`` records the part-imbalance exponent."""

    x_sets: tuple[frozenset[Variable], ...]
    alpha: Fraction
    structure: object
    unprovided: Variable

    def __post_init__(self):
        if len(self.x_sets) < 3:
            raise ReductionError("need at least three X-sets")
        seen: set[Variable] = set()
        for xs in self.x_sets:
            if not xs:
                raise ReductionError("X-sets must be nonempty")
            if xs & seen:
                raise ReductionError("X-sets must be disjoint")
            seen |= xs

    @property
    def ell(self) -> int:
        return len(self.x_sets)


def _plan(q1: ConjunctiveQuery, sets, structure, v) -> ReductionPlan:
    x_sets = tuple(frozenset(s) for s in sets)
    alpha = Fraction(1, max(len(q1.free()), len(x_sets) - 2))
    return ReductionPlan(x_sets, alpha, structure, v)


def choose_reduction_sets(
    q1: ConjunctiveQuery,
    s: DifficultStructure | ExtendedStructure,
    v: Variable,
) -> ReductionPlan:
    """X-sets for the given witness structure, with `v` (the variable not
    provided by the partner disjunct) isolated in the last set."""
    if v not in s.variable_set():
        raise ReductionError(f"{v.name} is not part of {s.describe()}")

    if isinstance(s, DifficultStructure):
        vs = s.variables
        if s.kind is StructureKind.TETRA:
            rest = sorted(set(vs) - {v}, key=lambda x: x.name)
            return _plan(q1, [{x} for x in rest] + [{v}], s, v)
        if s.kind is StructureKind.CHORDLESS_CYCLE:
            i = vs.index(v)
            rot = vs[i + 1 :] + vs[: i + 1]  # rotate, keeping orientation
            return _plan(q1, [set(rot[:-2]), {rot[-2]}, {v}], s, v)
        # free-path x, z_1..z_k, y
        if v == vs[0] or v == vs[-1]:
            path = tuple(reversed(vs)) if v == vs[0] else vs
            return _plan(q1, [{path[0]}, set(path[1:-1]), {v}], s, v)
        i = vs.index(v)
        return _plan(q1, [set(vs[:i]), set(vs[i + 1 :]), {v}], s, v)

    u = s.path_or_cycle
    if s.kind is ExtendedKind.FREE_HAND_FAN:
        if v != s.center or len(u) < 3:
            raise ReductionError("free-hand-fan plan needs its center, k >= 3")
        return _plan(q1, [{u[0]}, {u[-1]}, set(u[1:-1]), {v}], s, v)
    if s.kind is ExtendedKind.FLOWER:
        if v != s.center or len(u) < 3:
            raise ReductionError("flower plan needs its center, k >= 3")
        return _plan(q1, [{u[0]}, {u[1]}, set(u[2:]), {v}], s, v)
    if s.kind is ExtendedKind.ALMOST_TETRA:
        if v != s.center:
            raise ReductionError("almost-tetra plan needs its center")
        rest = sorted(set(u) - {v}, key=lambda x: x.name)
        return _plan(q1, [{x} for x in rest] + [{v}], s, v)
    raise ReductionError(f"no X-set rule for {s.kind.value}")


_PART_INDEX_SETS = (
    lambda ell: (0, 1),
    lambda ell: tuple([0] + list(range(2, ell))),
    lambda ell: tuple([1] + list(range(2, ell))),
)


@dataclass
class ConditionReport:
    conditions: dict[str, bool] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    free_connectors: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.conditions.values())


def verify_reduction_conditions(
    q1: ConjunctiveQuery,
    q2: Optional[ConjunctiveQuery],
    plan: ReductionPlan,
) -> ConditionReport:
    """Check the four side conditions of the triangle encoding.

    1. every atom misses some X_i (bounds relation sizes);
    2. each X_i induces a connected subhypergraph (forces equal values);
    3. each of the three part-pairs has a connecting atom, where the free
       variable set may stand in as one connector;
    4. no partner homomorphism pulls more than one free variable into X_ℓ,
       or too many into the remaining sets (bounds the partner's answers).

    ``free_connectors`` records which part-pairs needed the free-variable
    connector; those edges must be re-checked per answer.
    """
    from .homomorphisms import body_homomorphisms

    report = ConditionReport()
    h = hypergraph_of(q1)
    xs = plan.x_sets
    ell = plan.ell
    allx = set().union(*xs)
    if not allx <= q1.variables():
        raise ReductionError("plan variables must come from the query")

    cond1 = all(
        any(not (a.variables() & xi) for xi in xs) for a in q1.body
    )
    report.conditions["atom_misses_some_set"] = cond1

    cond2 = all(h.is_connected_on(xi) for xi in xs)
    report.conditions["sets_connected"] = cond2

    connectors = [a.variables() for a in q1.body]
    free = q1.free()
    free_allowed = any(not (free & xi) for xi in xs)
    cond3 = True
    for k, picker in enumerate(_PART_INDEX_SETS):
        need = picker(ell)
        if any(all(c & xs[i] for i in need) for c in connectors):
            continue
        if free_allowed and all(free & xs[i] for i in need):
            report.free_connectors.append(k)
            continue
        cond3 = False
        report.notes.append(f"no connector for parts {need}")
    report.conditions["connectors_exist"] = cond3

    cond4 = True
    if q2 is not None:
        for hom in body_homomorphisms(q2, q1):
            d = hom.as_dict()
            free2 = q2.free()
            into_last = {w for w in free2 if d[w] in xs[-1]}
            if not into_last:
                continue
            into_rest = {
                w for w in free2 if any(d[w] in xs[i] for i in range(ell - 1))
            }
            if len(into_last) != 1 or len(into_rest) > ell - 2:
                cond4 = False
                report.notes.append(
                    f"homomorphism maps {len(into_last)} free variables into "
                    f"the last set and {len(into_rest)} into the others"
                )
    report.conditions["partner_answers_bounded"] = cond4
    return report


# ---------------------------------------------------------------------------
# graph -> database construction


def _coordinate_base(n3: int, coords: int) -> int:
    if n3 <= 1:
        return 1
    base = max(1, math.ceil(n3 ** (1.0 / coords) - 1e-9))
    while base**coords < n3:
        base += 1
    return base


def _digits(value: int, base: int, coords: int) -> tuple[int, ...]:
    out = []
    for _ in range(coords):
        out.append(value % base)
        value //= base
    return tuple(reversed(out))


def _undigits(digits: Iterable[int], base: int) -> int:
    value = 0
    for d in digits:
        value = value * base + d
    return value


def build_reduction_database(
    q1: ConjunctiveQuery, plan: ReductionPlan, g: TripartiteGraph
) -> tuple[Database, Callable[[tuple[str, ...]], bool]]:
    """Encode the graph in q1's relations per the reduction plan.

    Returns the database and a predicate over decoded answer tuples (in
    q1's head order) that recognizes triangle witnesses, applying the
    missing-edge post-check for part-pairs connected only through the free
    variables.  Every variable draws from its own domain (values are
    prefixed with the variable name), so q1's answers cannot collide with a
    partner disjunct's.
    """
    if g.n1 != g.n2:
        raise ReductionError("reduction expects |V1| = |V2|")
    report = verify_reduction_conditions(q1, None, plan)
    if not report.ok:
        raise ReductionError(f"plan fails conditions: {report.conditions}")

    xs = plan.x_sets
    ell = plan.ell
    coords = ell - 2
    base = _coordinate_base(g.n3, coords)

    set_of: dict[Variable, int] = {}
    for i, xi in enumerate(xs):
        for w in xi:
            set_of[w] = i

    def value(w: Variable, assignment: dict[int, int]) -> str:
        i = set_of.get(w)
        if i is None or i not in assignment:
            return f"{w.name}|{BOT}"
        return f"{w.name}|{assignment[i]}"

    def universe(i: int) -> range:
        if i == 0:
            return range(g.n1)
        if i == 1:
            return range(g.n2)
        return range(base)

    db = Database()
    for atom in q1.body:
        av = atom.variables()
        hit = {set_of[w] for w in av if w in set_of}
        if {0, 1} <= hit:
            kind = "r12"
        elif 0 in hit and set(range(2, ell)) <= hit:
            kind = "r13"
        elif 1 in hit and set(range(2, ell)) <= hit:
            kind = "r23"
        else:
            kind = "other"
        db.ensure_relation(atom.relation, atom.arity)

        def insert(assignment: dict[int, int]):
            db.add_tuple(
                atom.relation, tuple(value(a, assignment) for a in atom.args)
            )

        def fill_free(partial: dict[int, int], indices: list[int]):
            """Cartesian fill over the sets the atom hits but the edge
            does not determine."""
            free_idx = [i for i in sorted(hit) if i not in indices]
            for combo in itertools.product(*(universe(i) for i in free_idx)):
                assignment = dict(partial)
                assignment.update(zip(free_idx, combo))
                insert(assignment)

        if kind == "r13":
            for v1, v3 in g.e13:
                digits = _digits(v3, base, coords)
                insert({0: v1, **{2 + j: d for j, d in enumerate(digits)}})
        elif kind == "r23":
            for v2, v3 in g.e23:
                digits = _digits(v3, base, coords)
                insert({1: v2, **{2 + j: d for j, d in enumerate(digits)}})
        elif kind == "r12":
            for v1, v2 in g.e12:
                fill_free({0: v1, 1: v2}, [0, 1])
        else:
            fill_free({}, [])

    head_pos = {w: i for i, w in enumerate(q1.head_vars)}

    def part_value(answer: tuple[str, ...], i: int) -> Optional[int]:
        for w in xs[i]:
            pos = head_pos.get(w)
            if pos is None:
                continue
            label, _, raw = answer[pos].partition("|")
            if label != w.name or raw == BOT:
                return None
            return int(raw)
        return None

    unchecked = list(report.free_connectors)

    def is_witness(answer: tuple[str, ...]) -> bool:
        if len(answer) != len(q1.head_vars):
            return False
        for w, field_value in zip(q1.head_vars, answer):
            if not field_value.startswith(f"{w.name}|"):
                return False
        for k in unchecked:
            need = _PART_INDEX_SETS[k](ell)
            vals = [part_value(answer, i) for i in need]
            if any(x is None for x in vals):
                return False
            if k == 0:
                if (vals[0], vals[1]) not in g.e12:
                    return False
            else:
                v3 = _undigits(vals[1:], base)
                endpoint = vals[0]
                edges = g.e13 if k == 1 else g.e23
                if v3 >= g.n3 or (endpoint, v3) not in edges:
                    return False
        return True

    return db, is_witness


# ---------------------------------------------------------------------------
# the Q_[c] family


def generate_qc(c: int) -> UnionQuery:
    """The four-CQ union whose tractability tracks unbalanced triangle
    detection exactly: a guarded triangle disjunct plus three free-connex
    disjuncts whose answer counts budget the detection time."""
    if c < 1:
        raise ReductionError("c must be >= 1")
    heads = ",".join(f"v{i}" for i in range(1, 2 * c + 1))
    rx_q1 = ",".join(f"RX{i}(x)" for i in range(1, c + 1))
    ry_q1 = ",".join(f"RY{i}(y)" for i in range(1, c + 1))
    q2_atoms = ",".join(
        [f"RX{i}(v{i})" for i in range(1, c + 1)]
        + [f"RY{i}(v{c + i})" for i in range(1, c + 1)]
    )
    tail = "".join(f",v{i}" for i in range(3, 2 * c + 1))
    text = (
        f"Q1({heads}) :- R1(x,y),R2(y,z),R3(x,z),R4({heads}),{rx_q1},{ry_q1}.\n"
        f"Q2({heads}) :- {q2_atoms}.\n"
        f"Q3({heads}) :- R1(v1,t1),R2(t2,v2),R4(t3,t4{tail}).\n"
        f"Q4({heads}) :- R1(t1,v1),R2(t2,v2),R4(t3,t4{tail}).\n"
    )
    return parse_query(text)


def qc_database_from_graph(c: int, g: TripartiteGraph) -> Database:
    """R1=E12, R2=E23, R3=E13, R4={(⊥,..,⊥)}, RX_i=V1, RY_i=V2."""
    db = Database()
    for a, b in g.e12:
        db.add_tuple("R1", (f"a{a}", f"b{b}"))
    for b, cc in g.e23:
        db.add_tuple("R2", (f"b{b}", f"c{cc}"))
    for a, cc in g.e13:
        db.add_tuple("R3", (f"a{a}", f"c{cc}"))
    db.add_tuple("R4", tuple(BOT for _ in range(2 * c)))
    for i in range(1, c + 1):
        for a in range(g.n1):
            db.add_tuple(f"RX{i}", (f"a{a}",))
        for b in range(g.n2):
            db.add_tuple(f"RY{i}", (f"b{b}",))
    # make sure every relation of the union exists, even over an empty graph
    db.ensure_relation("R1", 2)
    db.ensure_relation("R2", 2)
    db.ensure_relation("R3", 2)
    for i in range(1, c + 1):
        db.ensure_relation(f"RX{i}", 1)
        db.ensure_relation(f"RY{i}", 1)
    return db


def qc_evaluate(
    c: int,
    db: Database,
    detector: Callable[[TripartiteGraph], Optional[tuple]] = triangle_detect_2path,
) -> AnswerStream:
    """Constant-delay evaluation of Q_[c]: stream the three free-connex
    disjuncts, meanwhile decide the guarded disjunct by semi-join filtering
    into a tripartite graph and either brute force (small third part) or
    the detector; on success the guarded disjunct contributes exactly R4."""
    union = generate_qc(c)
    q1 = union.disjuncts[0]
    head = union.head_vars

    def cq_stream(d: ConjunctiveQuery):
        prepared = prepare_free_connex(d, db)
        order = [d.head_vars.index(w) for w in head]
        for row in prepared.stream():
            yield tuple(row[i] for i in order)

    def q1_stream():
        rels = {
            a.relation: db.relation(a.relation, a.arity) for a in q1.body
        }
        if any(len(r) == 0 for r in rels.values()):
            return
        rx = [set(rels[f"RX{i}"].column_values(0)) for i in range(1, c + 1)]
        ry = [set(rels[f"RY{i}"].column_values(0)) for i in range(1, c + 1)]
        xs = set.intersection(*rx)
        ys = set.intersection(*ry)
        e12 = {(a, b) for a, b in rels["R1"] if a in xs and b in ys}
        e23 = {(b, z) for b, z in rels["R2"] if b in ys}
        e13 = {(a, z) for a, z in rels["R3"] if a in xs}
        v1 = sorted({a for a, _ in e12})
        v2 = sorted({b for _, b in e12})
        v3 = sorted({z for _, z in e23} & {z for _, z in e13})
        if not (v1 and v2 and v3):
            return
        # edges outside the surviving vertex sets cannot close a triangle
        e23 = {(b, z) for b, z in e23 if b in set(v2) and z in set(v3)}
        e13 = {(a, z) for a, z in e13 if a in set(v1) and z in set(v3)}
        if len(v3) <= max(len(v1), len(v2)) ** (c - 1):
            found = any(
                (a, b) in e12 and (b, z) in e23 and (a, z) in e13
                for a in v1
                for b in v2
                for z in v3
            )
        else:
            n = max(len(v1), len(v2))
            i1 = {a: i for i, a in enumerate(v1)}
            i2 = {b: i for i, b in enumerate(v2)}
            i3 = {z: i for i, z in enumerate(v3)}
            graph = TripartiteGraph(
                n,
                n,
                len(v3),
                frozenset((i1[a], i2[b]) for a, b in e12),
                frozenset((i2[b], i3[z]) for b, z in e23),
                frozenset((i1[a], i3[z]) for a, z in e13),
            )
            found = detector(graph) is not None
        if found:
            yield from rels["R4"]

    streams = [cq_stream(d) for d in union.disjuncts[1:]] + [q1_stream()]
    return cheaters_adapter(streams, dup_bound=4, pause_bound=3)


# ---------------------------------------------------------------------------
# hyperclique encoding


@dataclass(frozen=True)
class UniformHypergraph:
    arity: int
    edges: frozenset[frozenset]

    def __post_init__(self):
        for e in self.edges:
            if len(e) != self.arity:
                raise ReductionError(
                    f"edge of size {len(e)} in a {self.arity}-uniform hypergraph"
                )

    def vertices(self) -> frozenset:
        out: frozenset = frozenset()
        for e in self.edges:
            out |= e
        return out


def hyperclique_encode(g: TripartiteGraph, k: int) -> UniformHypergraph:
    """(k-1)-uniform instance whose k-hypercliques are g's triangles.

    The third part is encoded as a (k-2)-coordinate product; E13/E23 edges
    each give one hyperedge, while E12 edges are filled over every choice
    of k-3 coordinates from distinct axes."""
    if k < 3:
        raise ReductionError("k must be >= 3")
    coords = k - 2
    base = _coordinate_base(g.n3, coords)
    edges: set[frozenset] = set()

    def coord_vertex(axis: int, digit: int):
        if coords == 1:
            return ("v3", digit)
        return ("u", axis, digit)

    def rep(v3: int):
        return [
            coord_vertex(j, d) for j, d in enumerate(_digits(v3, base, coords))
        ]

    for v1, v3 in g.e13:
        edges.add(frozenset([("v1", v1)] + rep(v3)))
    for v2, v3 in g.e23:
        edges.add(frozenset([("v2", v2)] + rep(v3)))
    for v1, v2 in g.e12:
        for axes in itertools.combinations(range(coords), coords - 1):
            for combo in itertools.product(range(base), repeat=len(axes)):
                edges.add(
                    frozenset(
                        [("v1", v1), ("v2", v2)]
                        + [coord_vertex(j, d) for j, d in zip(axes, combo)]
                    )
                )
    return UniformHypergraph(k - 1, frozenset(edges))


def brute_force_hyperclique(
    h: UniformHypergraph, k: int
) -> tuple[Optional[frozenset], int]:
    """Exhaustive k-subset search: all (k-1)-subsets must be edges."""
    if k != h.arity + 1:
        raise ReductionError("hyperclique size must exceed edge arity by one")
    vertices = sorted(h.vertices(), key=repr)
    first = None
    count = 0
    for subset in itertools.combinations(vertices, k):
        if all(
            frozenset(sub) in h.edges
            for sub in itertools.combinations(subset, k - 1)
        ):
            count += 1
            if first is None:
                first = frozenset(subset)
    return first, count
