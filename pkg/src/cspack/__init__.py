"""Sparse 3-CNF to compact set packing: reduction, exact solving, witness lifting."""

from .cnf import (
    Assignment,
    CnfFormula,
    DimacsError,
    SparsityReport,
    brute_force_sat,
    check_sparsity,
    evaluate,
    gen_random_3cnf,
    parse_dimacs,
    to_dimacs,
)
from .iss import IssFamily, build_iss, minimal_iss_universe
from .packing import (
    CompactnessReport,
    InstanceFormatError,
    SetPackingInstance,
    SolveResult,
    VerifyResult,
    audit_compactness,
    parse_instance,
    serialize_instance,
    solve_exact,
    verify_packing,
)
from .reduction import (
    ClausePartition,
    ElementLayout,
    GroupAssignments,
    WitnessFormatError,
    WitnessMap,
    enumerate_group_assignments,
    grid_edges,
    lift_packing_to_assignment,
    lower_assignment_to_packing,
    partition_clauses,
    reduce_to_packing,
    witness_from_text,
    witness_to_text,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "CnfFormula",
    "ClausePartition",
    "CompactnessReport",
    "DimacsError",
    "ElementLayout",
    "GroupAssignments",
    "InstanceFormatError",
    "IssFamily",
    "SetPackingInstance",
    "SolveResult",
    "SparsityReport",
    "VerifyResult",
    "WitnessFormatError",
    "WitnessMap",
    "audit_compactness",
    "brute_force_sat",
    "build_iss",
    "check_sparsity",
    "enumerate_group_assignments",
    "evaluate",
    "gen_random_3cnf",
    "grid_edges",
    "lift_packing_to_assignment",
    "lower_assignment_to_packing",
    "minimal_iss_universe",
    "parse_dimacs",
    "parse_instance",
    "partition_clauses",
    "reduce_to_packing",
    "serialize_instance",
    "solve_exact",
    "to_dimacs",
    "verify_packing",
    "witness_from_text",
    "witness_to_text",
]
