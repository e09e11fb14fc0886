"""Enumeration-complexity toolkit for unions of conjunctive queries."""

from .database import Database, DatabaseError, Relation, load_database, save_database
from .engine import (
    AnswerStream,
    EngineError,
    StreamIntegrityError,
    brute_force_answers,
    cheaters_adapter,
    enumerate_union,
    evaluate_boolean,
    prepare_free_connex,
)
from .extension import (
    Classification,
    ExtendedQuery,
    ExtensionError,
    ResolvedUnion,
    UnsupportedScopeError,
    Verdict,
    VirtualAtom,
    classify_union,
    is_virtual_symbol,
    resolve,
)
from .homomorphisms import (
    BodyHomomorphism,
    ProvidedSet,
    body_homomorphisms,
    is_contained,
    make_non_redundant,
    provided_sets,
    provided_variables,
    provides_set,
    provides_structure,
)
from .queries import (
    Atom,
    ConjunctiveQuery,
    Constant,
    QueryError,
    UnionQuery,
    Variable,
    is_self_join_free,
    parse_cq,
    parse_query,
)
from .reductions import (
    ReductionError,
    ReductionPlan,
    TripartiteGraph,
    UniformHypergraph,
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
from .structure import (
    DifficultStructure,
    ExtendedKind,
    ExtendedStructure,
    Hypergraph,
    JoinTree,
    StructureKind,
    find_difficult_structures,
    find_extended_structures,
    gyo_reduce,
    is_acyclic,
    is_cyclic_by_definition,
    is_free_connex,
    is_s_connex,
    structures_of_hypergraph,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
