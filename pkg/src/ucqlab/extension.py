"""Union extensions, the resolution fixpoint, and the dichotomy classifier.

A union of CQs can be tractable even when a disjunct is not free-connex:
another disjunct may *provide* the variables of each difficult structure,
letting the evaluator materialize a virtual relation over them for free.
``resolve`` adds such virtual atoms until no difficult structure is
provided anymore; ``classify_union`` decides tractability from the
fixpoint and, on the negative side, produces a reduction plan that encodes
unbalanced triangle detection into the query.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .homomorphisms import (
    BodyHomomorphism,
    ProvidedSet,
    body_homomorphisms,
    make_non_redundant,
    provided_sets,
    provided_variables,
)
from .queries import Atom, ConjunctiveQuery, UnionQuery, Variable, is_self_join_free
from .reductions import ReductionPlan, choose_reduction_sets, verify_reduction_conditions
from .structure import (
    DifficultStructure,
    ExtendedStructure,
    find_difficult_structures,
    find_extended_structures,
    is_free_connex,
)

VIRTUAL_PREFIX = "V_"
_VIRTUAL_RE = re.compile(r"V_\d+\Z")


class UnsupportedScopeError(ValueError):
    """The union falls outside the classifier's dichotomy scope."""

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


class ExtensionError(ValueError):
    pass


def is_virtual_symbol(symbol: str) -> bool:
    return _VIRTUAL_RE.match(symbol) is not None


@dataclass(frozen=True)
class VirtualAtom:
    """A fresh-symbol atom added by a resolution step.

    ``provider`` indexes the disjunct whose answers fill the relation,
    and ``provided`` witnesses that its variables are indeed provided.
    """

    symbol: str
    variables: frozenset[Variable]
    provider: int
    provided: ProvidedSet

    def atom(self) -> Atom:
        return Atom(self.symbol, tuple(sorted(self.variables, key=lambda v: v.name)))


@dataclass(frozen=True)
class ExtendedQuery:
    base: ConjunctiveQuery
    virtual_atoms: tuple[VirtualAtom, ...] = ()

    def query(self) -> ConjunctiveQuery:
        if not self.virtual_atoms:
            return self.base
        return ConjunctiveQuery(
            self.base.head_vars,
            self.base.body + tuple(v.atom() for v in self.virtual_atoms),
            self.base.name,
        )

    def is_free_connex(self) -> bool:
        return is_free_connex(self.query())


@dataclass(frozen=True)
class ResolvedUnion:
    original: UnionQuery
    extended: tuple[ExtendedQuery, ...]

    def as_union(self) -> UnionQuery:
        return UnionQuery(tuple(e.query() for e in self.extended))

    def all_free_connex(self) -> bool:
        return all(e.is_free_connex() for e in self.extended)


def _fresh_symbols(u: UnionQuery):
    used = set()
    for d in u.disjuncts:
        used |= d.relation_symbols()
    i = 1
    while True:
        name = f"{VIRTUAL_PREFIX}{i}"
        if name not in used:
            yield name
        i += 1


def _narrow_witness(p: ProvidedSet, target: frozenset[Variable]) -> ProvidedSet:
    """Restrict a provided-set witness to a subset of its target variables."""
    if p.target_vars == target:
        return p
    h = p.witness_hom.as_dict()
    v2 = frozenset(v for v in p.witness_v2 if h[v] in target)
    return ProvidedSet(target, p.witness_hom, v2, p.witness_s)


def resolve(u: UnionQuery) -> ResolvedUnion:
    """Fixpoint of resolution steps: whenever a disjunct has a difficult
    structure whose variables another disjunct provides, add a virtual atom
    over those variables.  Deterministic: disjuncts in order, structures in
    canonical order, providers by index."""
    extended = [ExtendedQuery(d) for d in u.disjuncts]
    fresh = _fresh_symbols(u)
    provided_cache: dict[tuple[int, int], list[ProvidedSet]] = {}

    def provided(i: int, j: int) -> list[ProvidedSet]:
        key = (i, j)
        if key not in provided_cache:
            provided_cache[key] = provided_sets(u.disjuncts[i], u.disjuncts[j])
        return provided_cache[key]

    changed = True
    while changed:
        changed = False
        for i, eq in enumerate(extended):
            for s in find_difficult_structures(eq.query()):
                vs = s.variable_set()
                step = None
                for j in range(len(extended)):
                    if j == i:
                        continue
                    for p in provided(i, j):
                        if vs <= p.target_vars:
                            step = VirtualAtom(
                                next(fresh), vs, j, _narrow_witness(p, vs)
                            )
                            break
                    if step:
                        break
                if step:
                    extended[i] = ExtendedQuery(
                        eq.base, eq.virtual_atoms + (step,)
                    )
                    changed = True
                    break
            if changed:
                break
    return ResolvedUnion(u, tuple(extended))


class Verdict(Enum):
    TRACTABLE = "Tractable"
    INTRACTABLE = "IntractableUnderVUTD"


@dataclass
class Classification:
    verdict: Verdict
    resolved: ResolvedUnion
    reason: str
    structure: Optional[Union[DifficultStructure, ExtendedStructure]] = None
    unprovided: Optional[Variable] = None
    plan: Optional[ReductionPlan] = None
    difficult_index: Optional[int] = None

    def to_json_dict(self) -> dict:
        out: dict = {
            "verdict": self.verdict.value,
            "reason": self.reason,
            "disjuncts": [
                {
                    "query": str(e.base),
                    "virtual_atoms": [
                        {
                            "symbol": va.symbol,
                            "variables": sorted(v.name for v in va.variables),
                            "provider": va.provider,
                            "witness_v2": sorted(
                                v.name for v in va.provided.witness_v2
                            ),
                        }
                        for va in e.virtual_atoms
                    ],
                    "free_connex": e.is_free_connex(),
                }
                for e in self.resolved.extended
            ],
        }
        if self.verdict is Verdict.INTRACTABLE:
            witness: dict = {}
            if self.structure is not None:
                witness["structure"] = self.structure.describe()
            if self.unprovided is not None:
                witness["unprovided"] = self.unprovided.name
            if self.plan is not None:
                witness["x_sets"] = [
                    sorted(v.name for v in xs) for xs in self.plan.x_sets
                ]
                witness["alpha"] = [
                    self.plan.alpha.numerator,
                    self.plan.alpha.denominator,
                ]
            out["witness"] = witness
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _body_isomorphic(q1: ConjunctiveQuery, q2: ConjunctiveQuery) -> bool:
    return bool(body_homomorphisms(q1, q2)) and bool(body_homomorphisms(q2, q1))


def _find_plan(
    q1: ConjunctiveQuery, q2: Optional[ConjunctiveQuery]
) -> Optional[tuple]:
    """Search for a verifiable reduction witness on the difficult disjunct.

    Candidate unprovided variables are tried in name order; for each, first
    the difficult structures of q1 containing it, then the extended
    structures centered at it."""
    if q2 is not None:
        provided = provided_variables(q1, q2)
    else:
        provided = frozenset()
    base_structures = find_difficult_structures(q1)
    for v in sorted(q1.variables(), key=lambda x: x.name):
        if v in provided:
            continue
        candidates: list = [
            s for s in base_structures if v in s.variable_set()
        ]
        candidates += find_extended_structures(q1, v)
        for s in candidates:
            try:
                plan = choose_reduction_sets(q1, s, v)
            except ValueError:
                continue
            report = verify_reduction_conditions(q1, q2, plan)
            if report.ok:
                return s, v, plan
    return None


def classify_union(u: UnionQuery) -> Classification:
    """Dichotomy classifier for unions of up to two self-join-free CQs."""
    nr = make_non_redundant(u)
    if len(nr.disjuncts) > 2:
        raise UnsupportedScopeError(
            "MoreThanTwoDisjuncts",
            f"classifier covers at most two disjuncts, got {len(nr.disjuncts)}",
        )
    resolved = resolve(nr)
    verdicts = [e.is_free_connex() for e in resolved.extended]
    if all(verdicts):
        return Classification(Verdict.TRACTABLE, resolved, "AllFreeConnexAfterResolution")

    difficult = [i for i, ok in enumerate(verdicts) if not ok]
    for i in difficult:
        if not is_self_join_free(nr.disjuncts[i]):
            raise UnsupportedScopeError(
                "SelfJoinInDifficultDisjunct",
                f"difficult disjunct {nr.disjuncts[i].name} has self-joins",
            )

    if len(difficult) == len(nr.disjuncts) and len(nr.disjuncts) == 2:
        q1, q2 = nr.disjuncts
        reason = (
            "TwoDifficultBodyIsomorphic"
            if _body_isomorphic(q1, q2)
            else "NotBodyIsomorphic"
        )
        found = _find_plan(q1, q2) or _find_plan(q2, q1)
        if found:
            s, v, plan = found
            return Classification(
                Verdict.INTRACTABLE, resolved, reason, s, v, plan, 0
            )
        return Classification(Verdict.INTRACTABLE, resolved, reason)

    i = difficult[0]
    q1 = nr.disjuncts[i]
    q2 = nr.disjuncts[1 - i] if len(nr.disjuncts) == 2 else None
    found = _find_plan(q1, q2)
    if found is None:
        raise ExtensionError(
            f"no verifiable reduction witness found for {q1.name}"
        )
    s, v, plan = found
    return Classification(
        Verdict.INTRACTABLE,
        resolved,
        "UnprovidedDifficultStructure",
        s,
        v,
        plan,
        i,
    )
