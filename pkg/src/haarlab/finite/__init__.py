"""Exact character theory of finite groups."""

from .characters import (
    AxiomReport,
    CharacterTable,
    OracleResult,
    check_character_equation,
    class_matrices,
    frobenius_axiom_check,
    regular_matrices,
    regular_rep_oracle,
    solve_character_equation,
    structure_constants,
    structure_constants_bruteforce,
    tables_match,
)
from .cyclotomic import Cyclotomic, format_exact, minimal_polynomial, zeta
from .determinant import FactorizationReport, group_determinant, group_matrix, verify_factorization
from .group import (
    CORPUS,
    ConjClasses,
    FiniteGroup,
    conjugacy_classes,
    from_permutations,
    from_table,
    load_group,
    named_group,
    parse_cycles,
    read_generators,
    read_table,
)

__all__ = [
    "AxiomReport", "CharacterTable", "OracleResult", "check_character_equation",
    "class_matrices", "frobenius_axiom_check", "regular_matrices", "regular_rep_oracle",
    "solve_character_equation", "structure_constants", "structure_constants_bruteforce",
    "tables_match", "Cyclotomic", "format_exact", "minimal_polynomial", "zeta",
    "FactorizationReport", "group_determinant", "group_matrix", "verify_factorization",
    "CORPUS", "ConjClasses", "conjugacy_classes", "FiniteGroup", "from_permutations", "from_table",
    "load_group", "named_group", "parse_cycles", "read_generators", "read_table",
]
