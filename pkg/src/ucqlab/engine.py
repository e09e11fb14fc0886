"""Query evaluation: a brute-force oracle and a constant-delay pipeline.

The fast path prepares a free-connex query in two stages.  Stage one runs
semi-join passes over a join tree of the body hypergraph extended with an
edge on the free variables, rooted at that edge; afterwards every tuple of
a child of the root extends to a full satisfying assignment of its subtree.
Stage two projects each such child onto its free variables and joins the
projections — themselves an acyclic family — with a second reducer, so the
final depth-first enumeration never hits a dead end and the work between
consecutive answers is bounded by the (fixed) query size.

Unions are streamed disjunct by disjunct: disjuncts that are free-connex
as written go first, their answers fill the virtual relations of extended
disjuncts, and the whole pipeline is deduplicated and rate-smoothed by
``cheaters_adapter``.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .database import Database, Relation
from .queries import Atom, ConjunctiveQuery, Constant, UnionQuery, Variable
from .structure import JoinTree, gyo_reduce, hypergraph_of, is_acyclic, is_free_connex


class EngineError(ValueError):
    pass


class StreamIntegrityError(RuntimeError):
    """A stream violated its declared duplication bound."""


# ---------------------------------------------------------------------------
# answer streams


class AnswerStream:
    """Single-consumer iterator over answers, with timing statistics."""

    def __init__(self, source: Iterable[tuple], preprocessing_seconds: float = 0.0):
        self._source = iter(source)
        self.preprocessing_seconds = preprocessing_seconds
        self.gaps: list[float] = []
        self._last: Optional[float] = None

    def __iter__(self) -> "AnswerStream":
        return self

    def __next__(self) -> tuple:
        item = next(self._source)
        now = time.perf_counter()
        if self._last is not None:
            self.gaps.append(now - self._last)
        self._last = now
        return item

    def to_set(self) -> set[tuple]:
        return set(self)

    def max_gap(self) -> float:
        return max(self.gaps, default=0.0)


def cheaters_adapter(
    streams: list, dup_bound: int = 4, pause_bound: int = 3
) -> AnswerStream:
    """Deduplicate and rate-smooth the concatenation of answer streams.

    The input may emit each distinct answer up to ``dup_bound`` times and
    stall up to ``pause_bound`` times; the output emits each answer once,
    releasing at most one answer per ``dup_bound`` items consumed so bursts
    are spread over the time already spent.  Exceeding ``dup_bound`` raises
    :class:`StreamIntegrityError` — it signals a caller bug, not bad data.
    """
    if dup_bound < 1 or pause_bound < 0:
        raise EngineError("bounds must be positive")

    def smoothed() -> Iterator[tuple]:
        counts: dict[tuple, int] = {}
        buffer: deque[tuple] = deque()
        credit = 0
        for stream in streams:
            for item in stream:
                seen = counts.get(item, 0)
                if seen >= dup_bound:
                    raise StreamIntegrityError(
                        f"answer emitted more than {dup_bound} times: {item!r}"
                    )
                counts[item] = seen + 1
                if seen == 0:
                    buffer.append(item)
                credit += 1
                if credit >= dup_bound and buffer:
                    credit -= dup_bound
                    yield buffer.popleft()
        while buffer:
            yield buffer.popleft()

    return AnswerStream(smoothed())


# ---------------------------------------------------------------------------
# brute-force oracle


def _match(atom: Atom, row: tuple[int, ...], assignment: dict, db: Database):
    """Extend `assignment` so `atom` maps onto `row`, or return None."""
    out = assignment
    copied = False
    for arg, value in zip(atom.args, row):
        if isinstance(arg, Constant):
            if db.lookup(arg.value) != value:
                return None
        else:
            bound = out.get(arg)
            if bound is None:
                if not copied:
                    out = dict(out)
                    copied = True
                out[arg] = value
            elif bound != value:
                return None
    return out


def _cq_answers(q: ConjunctiveQuery, db: Database) -> set[tuple[int, ...]]:
    atoms = sorted(q.body, key=lambda a: len(db.relation(a.relation, a.arity)))
    results: set[tuple[int, ...]] = set()

    def search(i: int, assignment: dict):
        if i == len(atoms):
            results.add(tuple(assignment[v] for v in q.head_vars))
            return
        atom = atoms[i]
        for row in db.relation(atom.relation, atom.arity):
            extended = _match(atom, row, assignment, db)
            if extended is not None:
                search(i + 1, extended)

    search(0, {})
    return results


def brute_force_answers(
    q: ConjunctiveQuery | UnionQuery, db: Database
) -> set[tuple[int, ...]]:
    """Exact answers by exhaustive backtracking search, independent of the
    constant-delay machinery.  Union answers are reported in the first
    disjunct's head order."""
    if isinstance(q, ConjunctiveQuery):
        return _cq_answers(q, db)
    head = q.head_vars
    out: set[tuple[int, ...]] = set()
    for d in q.disjuncts:
        for row in _cq_answers(d, db):
            binding = dict(zip(d.head_vars, row))
            out.add(tuple(binding[v] for v in head))
    return out


# ---------------------------------------------------------------------------
# node relations


@dataclass
class _Rel:
    """A relation over named variables in a fixed column order."""

    schema: tuple[Variable, ...]
    rows: set[tuple[int, ...]]

    def project(self, variables: Iterable[Variable]) -> "_Rel":
        vs = _canonical(variables)
        pos = [self.schema.index(v) for v in vs]
        return _Rel(vs, {tuple(row[p] for p in pos) for row in self.rows})


def _canonical(variables: Iterable[Variable]) -> tuple[Variable, ...]:
    return tuple(sorted(set(variables), key=lambda v: v.name))


def _atom_rel(atom: Atom, db: Database) -> _Rel:
    """Rows of the stored relation consistent with the atom's constants and
    repeated variables, projected onto its distinct variables."""
    stored = db.relation(atom.relation, atom.arity)
    schema = _canonical(atom.variables())
    rows: set[tuple[int, ...]] = set()
    for row in stored:
        binding = _match(atom, row, {}, db)
        if binding is not None:
            rows.add(tuple(binding[v] for v in schema))
    return _Rel(schema, rows)


def _intersect(rels: list[_Rel]) -> _Rel:
    first = rels[0]
    rows = set(first.rows)
    for other in rels[1:]:
        rows &= other.project(first.schema).rows
    return _Rel(first.schema, rows)


def _semijoin(parent: _Rel, child: _Rel) -> _Rel:
    shared = [v for v in parent.schema if v in child.schema]
    if not shared:
        return parent if child.rows else _Rel(parent.schema, set())
    keep = child.project(shared).rows
    pos = [parent.schema.index(v) for v in _canonical(shared)]
    rows = {r for r in parent.rows if tuple(r[p] for p in pos) in keep}
    return _Rel(parent.schema, rows)


def _constant_guards_hold(q: ConjunctiveQuery, db: Database) -> bool:
    """Atoms without variables are satisfied or kill the query outright."""
    for atom in q.body:
        if not atom.variables():
            stored = db.relation(atom.relation, atom.arity)
            ids = tuple(db.lookup(a.value) for a in atom.args)
            if any(i is None for i in ids) or ids not in stored.tuples:
                return False
    return True


def _edge_relations(
    q: ConjunctiveQuery, db: Database
) -> tuple[list[frozenset], dict[frozenset, _Rel]]:
    """One relation per distinct variable set, intersecting same-set atoms."""
    grouped: dict[frozenset, list[_Rel]] = {}
    order: list[frozenset] = []
    for atom in q.body:
        vs = atom.variables()
        if not vs:
            continue
        if vs not in grouped:
            grouped[vs] = []
            order.append(vs)
        grouped[vs].append(_atom_rel(atom, db))
    return order, {vs: _intersect(rels) for vs, rels in grouped.items()}


# ---------------------------------------------------------------------------
# constant-delay preparation


@dataclass
class PreparedQuery:
    """Output of :func:`prepare_free_connex`, ready for enumeration.

    ``order`` lists stage-two join-tree nodes in depth-first preorder; each
    entry carries its schema, the columns shared with its parent, and a
    bucket index keyed by those columns' values.
    """

    head: tuple[Variable, ...]
    order: list[dict] = field(default_factory=list)
    empty: bool = False
    boolean_true: bool = False

    def stream(self) -> AnswerStream:
        return AnswerStream(self._generate())

    def _generate(self) -> Iterator[tuple]:
        if self.empty:
            return
        if not self.head:
            if self.boolean_true:
                yield ()
            return
        assignment: dict[Variable, int] = {}

        def walk(i: int) -> Iterator[tuple]:
            if i == len(self.order):
                yield tuple(assignment[v] for v in self.head)
                return
            node = self.order[i]
            key = tuple(assignment[v] for v in node["link"])
            for row in node["buckets"].get(key, ()):
                for v, value in zip(node["schema"], row):
                    assignment[v] = value
                yield from walk(i + 1)

        yield from walk(0)


def prepare_free_connex(q: ConjunctiveQuery, db: Database) -> PreparedQuery:
    """Linear-time preprocessing for a free-connex query."""
    if not is_free_connex(q):
        raise EngineError(f"{q.name} is not free-connex")
    head = q.head_vars
    if not _constant_guards_hold(q, db):
        return PreparedQuery(head, empty=True)
    edge_order, rels = _edge_relations(q, db)
    if not edge_order:
        # constant-only body; the guards above already decided it
        return PreparedQuery(head, boolean_true=True)

    free = frozenset(head)
    base = gyo_reduce(hypergraph_of(q).with_edge(free) if free else hypergraph_of(q))
    acyclic, tree, _ = base
    if not acyclic or tree is None:  # pragma: no cover - guarded by is_free_connex
        raise EngineError("free-connex query has no join tree")
    if free:
        tree = tree.rerooted(len(tree.nodes) - 1)
    node_rels: list[Optional[_Rel]] = [
        rels[e] if e in rels else None for e in tree.nodes
    ]

    # stage one: bottom-up semi-joins towards the root
    for i in tree.postorder():
        p = tree.parent[i]
        if p is None or node_rels[p] is None:
            continue
        node_rels[p] = _semijoin(node_rels[p], node_rels[i])

    if not free:
        root_rel = node_rels[tree.root]
        assert root_rel is not None
        return PreparedQuery(head, boolean_true=bool(root_rel.rows))

    # stage two: project the root's children onto their free variables
    projections: dict[frozenset, _Rel] = {}
    children = tree.children()[tree.root]
    if node_rels[tree.root] is not None:
        children = children + [tree.root]
    for c in children:
        rel = node_rels[c]
        if rel is None:
            continue
        part = frozenset(tree.nodes[c]) & free
        if not part:
            if not rel.rows:
                return PreparedQuery(head, empty=True)
            continue
        proj = rel.project(part)
        if part in projections:
            projections[part] = _intersect([projections[part], proj])
        else:
            projections[part] = proj
    if not projections:  # pragma: no cover - free variables always surface
        raise EngineError("no free projection produced")

    parts = list(projections)
    from .structure import Hypergraph

    acyclic2, tree2, _ = gyo_reduce(Hypergraph.from_edges(parts))
    if not acyclic2 or tree2 is None:  # pragma: no cover
        raise EngineError("free part of a free-connex query must be acyclic")
    rel2: list[_Rel] = [projections[e] for e in tree2.nodes]

    # full reducer over the free part: bottom-up, then top-down
    for i in tree2.postorder():
        p = tree2.parent[i]
        if p is not None:
            rel2[p] = _semijoin(rel2[p], rel2[i])
    for i in reversed(tree2.postorder()):
        p = tree2.parent[i]
        if p is not None:
            rel2[i] = _semijoin(rel2[i], rel2[p])

    # preorder with bucket indexes on the columns shared with the parent
    children2 = tree2.children()
    preorder: list[int] = []
    stack = [tree2.root]
    while stack:
        i = stack.pop()
        preorder.append(i)
        stack.extend(reversed(children2[i]))

    prepared = PreparedQuery(head)
    bound: set[Variable] = set()
    for i in preorder:
        rel = rel2[i]
        link = _canonical(v for v in rel.schema if v in bound)
        pos = [rel.schema.index(v) for v in link]
        buckets: dict[tuple, list[tuple]] = {}
        for row in rel.rows:
            buckets.setdefault(tuple(row[p] for p in pos), []).append(row)
        if not rel.rows:
            return PreparedQuery(head, empty=True)
        prepared.order.append({"schema": rel.schema, "link": link, "buckets": buckets})
        bound.update(rel.schema)
    return prepared


def enumerate_prepared(p: PreparedQuery) -> AnswerStream:
    return p.stream()


def enumerate_union(u, db: Database) -> AnswerStream:
    """Stream the answers of a resolved union whose extended disjuncts are
    all free-connex.

    Disjuncts are processed in provenance order (providers before the
    disjuncts whose virtual atoms they fill).  Each virtual relation is
    populated from its provider's answers: a provider answer contributes a
    tuple when all of its free variables mapping to the same target
    variable agree.  Output tuples follow the first disjunct's head order;
    duplicates across disjuncts are absorbed by the stream adapter."""
    extended = list(u.extended)
    if not extended:
        raise EngineError("empty union")
    head = extended[0].base.head_vars

    deps = [[va.provider for va in eq.virtual_atoms] for eq in extended]
    order: list[int] = []
    pending = {i: set(d) for i, d in enumerate(deps)}
    while pending:
        ready = sorted(i for i, d in pending.items() if not d)
        if not ready:
            raise EngineError("cyclic virtual-atom provenance")
        for i in ready:
            order.append(i)
            del pending[i]
        for d in pending.values():
            d.difference_update(ready)

    def pipeline() -> Iterator[tuple]:
        overlay = Database()
        overlay._ids = db._ids
        overlay._values = db._values
        overlay.relations = dict(db.relations)
        collected: dict[int, set[tuple[int, ...]]] = {}
        for i in order:
            eq = extended[i]
            for va in eq.virtual_atoms:
                provider_head = extended[va.provider].base.head_vars
                h = va.provided.witness_hom.as_dict()
                targets = tuple(sorted(va.variables, key=lambda v: v.name))
                preimages = [
                    [
                        provider_head.index(w)
                        for w in va.provided.witness_v2
                        if h[w] == t
                    ]
                    for t in targets
                ]
                if any(not ps for ps in preimages):
                    raise EngineError(
                        f"virtual atom {va.symbol} has an uncovered variable"
                    )
                rel = overlay.relations[va.symbol] = Relation(len(targets))
                for row in collected[va.provider]:
                    tup = []
                    for ps in preimages:
                        vals = {row[p] for p in ps}
                        if len(vals) != 1:
                            tup = None
                            break
                        tup.append(vals.pop())
                    if tup is not None:
                        rel.add(tuple(tup))
            q = eq.query()
            prepared = prepare_free_connex(q, overlay)
            reorder = [q.head_vars.index(w) for w in head]
            rows = collected[i] = set()
            for row in prepared._generate():
                rows.add(row)
                yield tuple(row[p] for p in reorder)

    bound = max(2, len(extended))
    return cheaters_adapter([pipeline()], dup_bound=bound, pause_bound=bound + 1)


def evaluate_boolean(q: ConjunctiveQuery, db: Database) -> bool:
    """Satisfiability of a Boolean query; full reducer when acyclic,
    exhaustive search otherwise."""
    if not q.is_boolean():
        raise EngineError("query has free variables")
    if not _constant_guards_hold(q, db):
        return False
    if all(not a.variables() for a in q.body):
        return True
    if is_acyclic(hypergraph_of(q)):
        return prepare_free_connex(q, db).boolean_true
    return bool(_cq_answers(q, db))
