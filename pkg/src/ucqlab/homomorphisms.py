"""Body-homomorphisms between CQs, containment, redundancy, and providing.

A body-homomorphism maps the variables of a source query onto those of a
target query so that every source atom, translated, is an atom of the
target.  Containment and the "provides" relation between disjuncts of a
union are both built on top of this search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .queries import Atom, ConjunctiveQuery, Constant, UnionQuery, Variable
from .structure import is_free_connex, is_s_connex


@dataclass(frozen=True)
class BodyHomomorphism:
    """A variable mapping witnessing that the source body embeds in the target."""

    mapping: tuple[tuple[Variable, Variable], ...]

    @classmethod
    def from_dict(cls, d: dict[Variable, Variable]) -> "BodyHomomorphism":
        return cls(tuple(sorted(d.items())))

    def as_dict(self) -> dict[Variable, Variable]:
        return dict(self.mapping)

    def apply(self, v: Variable) -> Variable:
        return dict(self.mapping)[v]

    def image(self, vs) -> frozenset[Variable]:
        d = dict(self.mapping)
        return frozenset(d[v] for v in vs)


def _atom_extensions(src: Atom, dst: Atom, partial: dict) -> dict | None:
    """Extend `partial` so that src maps onto dst, or None if inconsistent."""
    if src.relation != dst.relation or src.arity != dst.arity:
        return None
    out = dict(partial)
    for s, d in zip(src.args, dst.args):
        if isinstance(s, Constant):
            if s != d:
                return None
            continue
        if isinstance(d, Constant):
            return None  # variables only map to variables
        if s in out:
            if out[s] != d:
                return None
        else:
            out[s] = d
    return out


def body_homomorphisms(
    source: ConjunctiveQuery, target: ConjunctiveQuery
) -> list[BodyHomomorphism]:
    """All body-homomorphisms from `source` to `target`, by backtracking.

    If the target is self-join-free there is at most one.
    """
    by_symbol: dict[str, list[Atom]] = {}
    for atom in target.body:
        by_symbol.setdefault(atom.relation, []).append(atom)

    results: list[dict] = []

    def search(i: int, partial: dict):
        if i == len(source.body):
            results.append(partial)
            return
        src = source.body[i]
        for dst in by_symbol.get(src.relation, ()):
            ext = _atom_extensions(src, dst, partial)
            if ext is not None:
                search(i + 1, ext)

    search(0, {})
    seen = set()
    out = []
    for d in results:
        h = BodyHomomorphism.from_dict(d)
        if h not in seen:
            seen.add(h)
            out.append(h)
    return out


def is_contained(q1: ConjunctiveQuery, q2: ConjunctiveQuery) -> bool:
    """True iff q1(D) is a subset of q2(D) on every database.

    Holds exactly when some body-homomorphism from q2 to q1 maps q2's head
    tuple positionwise onto q1's head tuple.
    """
    if len(q1.head_vars) != len(q2.head_vars):
        raise ValueError("containment requires equal head arity")
    for h in body_homomorphisms(q2, q1):
        d = h.as_dict()
        if all(d[v2] == v1 for v2, v1 in zip(q2.head_vars, q1.head_vars)):
            return True
    return False


def make_non_redundant(u: UnionQuery) -> UnionQuery:
    """Drop every disjunct contained in another remaining disjunct."""
    kept = list(u.disjuncts)
    changed = True
    while changed:
        changed = False
        for i, cq in enumerate(kept):
            if any(
                j != i and is_contained(cq, other) for j, other in enumerate(kept)
            ):
                del kept[i]
                changed = True
                break
    return UnionQuery(tuple(kept))


@dataclass(frozen=True)
class ProvidedSet:
    """A variable set of the target query provided by another disjunct.

    ``witness_hom`` maps provider variables into the target;
    ``witness_v2`` is the provider free-variable subset whose image is
    ``target_vars``; ``witness_s`` is a superset of it for which the
    provider is S-connex.
    """

    target_vars: frozenset[Variable]
    witness_hom: BodyHomomorphism
    witness_v2: frozenset[Variable]
    witness_s: frozenset[Variable]


def provided_sets(
    q1: ConjunctiveQuery, q2: ConjunctiveQuery
) -> list[ProvidedSet]:
    """All variable sets of q1 that q2 provides.

    For each body-homomorphism h from q2 to q1 and each subset V2 of
    free(q2), the image h(V2) is provided if q2 is S-connex for some S with
    V2 <= S <= free(q2).  When q2 is free-connex, S = free(q2) always works.
    """
    free2 = sorted(q2.free())
    q2_free_connex = is_free_connex(q2)
    out: dict[frozenset, ProvidedSet] = {}
    for h in body_homomorphisms(q2, q1):
        for r in range(len(free2) + 1):
            for v2 in itertools.combinations(free2, r):
                v2set = frozenset(v2)
                target = h.image(v2set)
                if target in out:
                    continue
                s = _connex_superset(q2, v2set, q2_free_connex)
                if s is not None:
                    out[target] = ProvidedSet(target, h, v2set, s)
    return sorted(out.values(), key=lambda p: sorted(v.name for v in p.target_vars))


def _connex_superset(
    q2: ConjunctiveQuery, v2: frozenset, q2_free_connex: bool
) -> frozenset | None:
    free2 = q2.free()
    if q2_free_connex:
        return free2
    rest = sorted(free2 - v2)
    for r in range(len(rest) + 1):
        for extra in itertools.combinations(rest, r):
            s = v2 | frozenset(extra)
            if is_s_connex(q2, s):
                return s
    return None


def provides_set(q2: ConjunctiveQuery, q1: ConjunctiveQuery, vars1) -> bool:
    """Does q2 provide the given variable set of q1?"""
    vs = frozenset(vars1)
    return any(p.target_vars == vs for p in provided_sets(q1, q2))


def provides_structure(q2: ConjunctiveQuery, q1: ConjunctiveQuery, s) -> bool:
    """Does q2 provide the variable set of the given structure of q1?

    Provided sets are subset-closed, so containment in one suffices.
    """
    vs = s.variable_set()
    return any(vs <= p.target_vars for p in provided_sets(q1, q2))


def provided_variables(q1: ConjunctiveQuery, q2: ConjunctiveQuery) -> frozenset[Variable]:
    """Variables of q1 provided as singletons by q2: h(free(q2)) for the homs.

    A variable outside the image of every homomorphism's free set cannot be
    part of any provided set.
    """
    out: set[Variable] = set()
    for h in body_homomorphisms(q2, q1):
        out |= h.image(q2.free())
    return frozenset(out)
