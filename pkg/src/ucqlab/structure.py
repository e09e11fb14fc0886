"""Hypergraph construction and structural analysis of conjunctive queries.

Covers GYO acyclicity with join-tree witnesses, S-connexity, free-connexity,
and exhaustive enumeration of the structures that witness intractability:
free-paths, chordless cycles, and tetras, plus the extended witnesses
(free-hand-fans, flowers, almost-tetras) used by the reduction machinery.

All searches are exponential in the query size only; queries are treated as
fixed, so this cost is acceptable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Iterable, Optional, Sequence

from .queries import ConjunctiveQuery, Variable

Vertex = Hashable


@dataclass(frozen=True)
class Hypergraph:
    vertices: frozenset
    edges: tuple[frozenset, ...]

    @classmethod
    def from_edges(cls, edges: Iterable[Iterable[Vertex]]) -> "Hypergraph":
        dedup: list[frozenset] = []
        seen: set[frozenset] = set()
        for e in edges:
            fe = frozenset(e)
            if not fe:
                raise ValueError("hyperedges must be nonempty")
            if fe not in seen:
                seen.add(fe)
                dedup.append(fe)
        verts = frozenset(v for e in dedup for v in e)
        return cls(verts, tuple(dedup))

    def neighbors(self, v: Vertex) -> frozenset:
        return frozenset(u for e in self.edges if v in e for u in e) - {v}

    def are_neighbors(self, u: Vertex, v: Vertex) -> bool:
        return any(u in e and v in e for e in self.edges)

    def covering_edge(self, vertices: Iterable[Vertex]) -> Optional[frozenset]:
        vs = frozenset(vertices)
        for e in self.edges:
            if vs <= e:
                return e
        return None

    def induced(self, vertices: Iterable[Vertex]) -> "Hypergraph":
        vs = frozenset(vertices)
        edges = [e & vs for e in self.edges if e & vs]
        if not edges:
            return Hypergraph(vs, ())
        return Hypergraph.from_edges(edges)

    def with_edge(self, extra: Iterable[Vertex]) -> "Hypergraph":
        fe = frozenset(extra)
        return Hypergraph(self.vertices | fe, self.edges + (fe,))

    def is_connected_on(self, vertices: Iterable[Vertex]) -> bool:
        """Connectedness of the subgraph induced on `vertices`."""
        vs = set(vertices)
        if not vs:
            return False
        start = next(iter(vs))
        seen = {start}
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for e in self.edges:
                if v in e:
                    for u in e & vs:
                        if u not in seen:
                            seen.add(u)
                            frontier.append(u)
        return seen == vs


def hypergraph_of(q: ConjunctiveQuery) -> Hypergraph:
    """One hyperedge per atom's variable set; constants excluded, duplicates merged."""
    edges = []
    for atom in q.body:
        vs = atom.variables()
        if vs:
            edges.append(vs)
    if not edges:
        raise ValueError("query has no variables")
    return Hypergraph.from_edges(edges)


@dataclass
class JoinTree:
    """Witness of acyclicity: nodes are hyperedges, linked by parent indexes.

    Satisfies the running-intersection property: the nodes containing any
    given vertex form a connected subtree.
    """

    nodes: list[frozenset]
    parent: list[Optional[int]]
    root: int

    def children(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.nodes]
        for i, p in enumerate(self.parent):
            if p is not None:
                out[p].append(i)
        return out

    def rerooted(self, new_root: int) -> "JoinTree":
        parent = list(self.parent)
        path = []
        i: Optional[int] = new_root
        while i is not None:
            path.append(i)
            i = parent[i]
        for child, up in zip(path, path[1:]):
            parent[up] = child
        parent[new_root] = None
        return JoinTree(list(self.nodes), parent, new_root)

    def postorder(self) -> list[int]:
        children = self.children()
        order: list[int] = []
        stack = [(self.root, False)]
        while stack:
            node, done = stack.pop()
            if done:
                order.append(node)
            else:
                stack.append((node, True))
                for c in children[node]:
                    stack.append((c, False))
        return order

    def satisfies_running_intersection(self) -> bool:
        vertices = set().union(*self.nodes) if self.nodes else set()
        for v in vertices:
            holders = [i for i, e in enumerate(self.nodes) if v in e]
            # the holders must form a connected subtree
            holder_set = set(holders)
            seen = {holders[0]}
            changed = True
            adjacency = [[] for _ in self.nodes]
            for i, p in enumerate(self.parent):
                if p is not None:
                    adjacency[i].append(p)
                    adjacency[p].append(i)
            while changed:
                changed = False
                for i in list(seen):
                    for j in adjacency[i]:
                        if j in holder_set and j not in seen:
                            seen.add(j)
                            changed = True
            if seen != holder_set:
                return False
        return True


def gyo_reduce(h: Hypergraph) -> tuple[bool, Optional[JoinTree], list[frozenset]]:
    """GYO ear removal.

    Returns ``(acyclic, join_tree, residue)``.  On success the join tree has
    one node per (deduplicated) hyperedge; on failure the residue holds the
    irreducible reduced edges.  Ears are removed lowest-index first so the
    witness is deterministic.
    """
    n = len(h.edges)
    live: dict[int, set] = {i: set(e) for i, e in enumerate(h.edges)}
    parent: list[Optional[int]] = [None] * n
    while len(live) > 1:
        # strip vertices private to a single live edge
        counts: dict[Vertex, int] = {}
        for e in live.values():
            for v in e:
                counts[v] = counts.get(v, 0) + 1
        for e in live.values():
            e -= {v for v in e if counts[v] == 1}
        removed = False
        for i in sorted(live):
            witnesses = [j for j in sorted(live) if j != i and live[i] <= live[j]]
            if witnesses:
                parent[i] = witnesses[0]
                del live[i]
                removed = True
                break
        if not removed:
            return False, None, [frozenset(live[i]) for i in sorted(live)]
    root = next(iter(live)) if live else 0
    return True, JoinTree(list(h.edges), parent, root), []


def is_acyclic(h: Hypergraph) -> bool:
    return gyo_reduce(h)[0]


def is_cyclic_by_definition(h: Hypergraph) -> bool:
    """Independent cyclicity check: a chordless cycle or a tetra exists.

    Used as an oracle against the GYO reduction.
    """
    return bool(find_chordless_cycles(h)) or bool(_find_tetras(h, min_size=3))


def is_s_connex(q: ConjunctiveQuery, s: Iterable[Variable]) -> bool:
    """Acyclic and still acyclic once an edge over `s` is added."""
    s = frozenset(s)
    h = hypergraph_of(q)
    if not s <= h.vertices | q.free():
        raise ValueError("S must be a subset of the query variables")
    if not is_acyclic(h):
        return False
    if not s:
        return True
    return is_acyclic(h.with_edge(s))


def is_s_connex_by_path_search(q: ConjunctiveQuery, s: Iterable[Variable]) -> bool:
    """Equivalent S-connexity test: acyclic and no chordless S-path."""
    s = frozenset(s)
    h = hypergraph_of(q)
    if not is_acyclic(h):
        return False
    return not list(_iter_s_paths(h, s))


def is_free_connex(q: ConjunctiveQuery) -> bool:
    return is_s_connex(q, q.free())


# --- difficult structures ----------------------------------------------------


class StructureKind(Enum):
    FREE_PATH = "free-path"
    CHORDLESS_CYCLE = "chordless-cycle"
    TETRA = "tetra"


class ExtendedKind(Enum):
    HAND_FAN = "hand-fan"
    FREE_HAND_FAN = "free-hand-fan"
    FLOWER = "flower"
    ALMOST_TETRA = "almost-tetra"


@dataclass(frozen=True)
class DifficultStructure:
    kind: StructureKind
    variables: tuple[Variable, ...]

    def variable_set(self) -> frozenset[Variable]:
        return frozenset(self.variables)

    def describe(self) -> str:
        return f"{self.kind.value}({','.join(v.name for v in self.variables)})"

    def sort_key(self):
        return (len(self.variables), self.kind.value, tuple(str(v) for v in self.variables))


@dataclass(frozen=True)
class ExtendedStructure:
    kind: ExtendedKind
    center: Optional[Variable]
    path_or_cycle: tuple[Variable, ...]

    def variable_set(self) -> frozenset[Variable]:
        out = frozenset(self.path_or_cycle)
        return out | {self.center} if self.center else out

    def describe(self) -> str:
        inner = ",".join(v.name for v in self.path_or_cycle)
        if self.center is not None:
            return f"{self.kind.value}(center={self.center.name}; {inner})"
        return f"{self.kind.value}({inner})"


def _iter_chordless_paths(h: Hypergraph, start: Vertex):
    """DFS over chordless (induced) paths starting at `start`, length >= 2 edges."""
    def extend(path: list):
        last = path[-1]
        for u in sorted(h.neighbors(last), key=repr):
            if u in path:
                continue
            # chordless: u may touch only the last vertex of the path
            if any(h.are_neighbors(u, w) for w in path[:-1]):
                continue
            path.append(u)
            if len(path) >= 3:
                yield tuple(path)
            yield from extend(path)
            path.pop()

    yield from extend([start])


def _iter_s_paths(h: Hypergraph, s: frozenset):
    """Chordless paths (x, z_1..z_k, y) with endpoints in S, interior outside S."""
    for x in sorted(s & h.vertices, key=repr):
        for path in _iter_chordless_paths(h, x):
            interior, y = path[1:-1], path[-1]
            if y in s and all(z not in s for z in interior):
                if repr(path[0]) <= repr(y):  # canonical orientation
                    yield path


def find_free_paths(q: ConjunctiveQuery) -> list[DifficultStructure]:
    h = hypergraph_of(q)
    return [
        DifficultStructure(StructureKind.FREE_PATH, p)
        for p in _iter_s_paths(h, q.free())
    ]


def find_chordless_cycles(h: Hypergraph) -> list[tuple]:
    """All chordless cycles, each in canonical rotation and direction.

    Length-3 cycles require no covering edge; longer cycles are induced
    cycles of the primal graph (a covering edge would create chords).
    """
    out: list[tuple] = []
    vertices = sorted(h.vertices, key=repr)
    # triangles
    for a, b, c in itertools.combinations(vertices, 3):
        if (
            h.are_neighbors(a, b)
            and h.are_neighbors(b, c)
            and h.are_neighbors(a, c)
            and h.covering_edge((a, b, c)) is None
        ):
            out.append((a, b, c))

    # induced cycles of length >= 4, anchored at their minimal vertex
    def extend(path: list):
        last = path[-1]
        for u in sorted(h.neighbors(last), key=repr):
            if repr(u) < repr(path[0]) or u in path:
                continue
            chord = any(h.are_neighbors(u, w) for w in path[1:-1])
            # adjacency to the anchor is vacuous while the path is a single
            # vertex; afterwards it either closes the cycle or is a chord
            closes = len(path) >= 2 and h.are_neighbors(u, path[0])
            if len(path) >= 3 and closes and not chord:
                if repr(path[1]) < repr(u):  # one direction per cycle
                    out.append(tuple(path) + (u,))
            if not chord and not closes:
                path.append(u)
                extend(path)
                path.pop()

    for v in vertices:
        extend([v])
    return out


def _iter_cliques(h: Hypergraph, must_contain: Optional[Vertex] = None):
    """All cliques of the primal graph with size >= 3."""
    vertices = sorted(h.vertices, key=repr)
    if must_contain is not None:
        base = [must_contain]
        candidates = [v for v in vertices if v != must_contain and h.are_neighbors(v, must_contain)]
    else:
        base = []
        candidates = vertices

    def extend(clique: list, pool: list):
        if len(clique) >= 3:
            yield tuple(clique)
        for idx, v in enumerate(pool):
            if all(h.are_neighbors(v, u) for u in clique):
                clique.append(v)
                yield from extend(clique, pool[idx + 1 :])
                clique.pop()

    yield from extend(base, candidates)


def _find_tetras(h: Hypergraph, min_size: int = 3) -> list[tuple]:
    """Vertex sets where every (k-1)-subset lies in an edge but no edge covers all."""
    out = []
    for clique in _iter_cliques(h):
        k = len(clique)
        if k < min_size:
            continue
        if h.covering_edge(clique) is not None:
            continue
        if all(
            h.covering_edge(sub) is not None
            for sub in itertools.combinations(clique, k - 1)
        ):
            out.append(clique)
    return out


def find_difficult_structures(q: ConjunctiveQuery) -> list[DifficultStructure]:
    """All free-paths, chordless cycles, and tetras of the query, deduplicated.

    A three-vertex tetra coincides with a chordless triangle and is reported
    once, as a cycle.  Empty exactly when the query is free-connex.
    """
    h = hypergraph_of(q)
    out = find_free_paths(q)
    out += [
        DifficultStructure(StructureKind.CHORDLESS_CYCLE, c)
        for c in find_chordless_cycles(h)
    ]
    out += [
        DifficultStructure(StructureKind.TETRA, t)
        for t in _find_tetras(h, min_size=4)
    ]
    return sorted(set(out), key=DifficultStructure.sort_key)


def structures_of_hypergraph(h: Hypergraph, free: frozenset) -> list[DifficultStructure]:
    """Like find_difficult_structures but over a raw hypergraph and free set."""
    out = [
        DifficultStructure(StructureKind.FREE_PATH, p) for p in _iter_s_paths(h, free)
    ]
    out += [
        DifficultStructure(StructureKind.CHORDLESS_CYCLE, c)
        for c in find_chordless_cycles(h)
    ]
    out += [
        DifficultStructure(StructureKind.TETRA, t) for t in _find_tetras(h, min_size=4)
    ]
    return sorted(set(out), key=DifficultStructure.sort_key)


def find_extended_structures(
    q: ConjunctiveQuery, v: Variable
) -> list[ExtendedStructure]:
    """Free-hand-fans and flowers centered at `v`, and almost-tetras whose
    unconstrained slot is `v`."""
    h = hypergraph_of(q)
    if v not in h.vertices:
        raise ValueError(f"{v} is not a variable of the query")
    out: list[ExtendedStructure] = []
    free = q.free()

    # free-hand-fans: free-paths u_1..u_k (k >= 3) avoiding v, with an edge
    # covering {v, u_i, u_i+1} for each consecutive pair
    for path in _iter_s_paths(h, free):
        if len(path) < 3 or v in path:
            continue
        if all(
            h.covering_edge((v, a, b)) is not None for a, b in zip(path, path[1:])
        ):
            out.append(ExtendedStructure(ExtendedKind.FREE_HAND_FAN, v, path))

    # flowers: chordless cycles avoiding v, covered pairwise around the cycle
    for cycle in find_chordless_cycles(h):
        if v in cycle:
            continue
        pairs = list(zip(cycle, cycle[1:])) + [(cycle[-1], cycle[0])]
        if all(h.covering_edge((v, a, b)) is not None for a, b in pairs):
            out.append(ExtendedStructure(ExtendedKind.FLOWER, v, cycle))

    # almost-tetras: x_1..x_k with x_k = v, k >= 4, an edge covering each
    # (k-1)-subset that omits x_i for i < k, and no edge covering all
    for clique in _iter_cliques(h, must_contain=v):
        if len(clique) < 4:
            continue
        others = tuple(u for u in clique if u != v)
        full = others + (v,)
        if h.covering_edge(full) is not None:
            continue
        if all(
            h.covering_edge(tuple(u for u in full if u != x)) is not None
            for x in others
        ):
            out.append(ExtendedStructure(ExtendedKind.ALMOST_TETRA, v, full))

    return sorted(set(out), key=lambda s: (s.kind.value, tuple(x.name for x in s.path_or_cycle)))
