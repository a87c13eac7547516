"""Branching bisimilarity with explicit divergence.

Three independent characterisations of the equivalence (relational
conditions, coloured-trace refinement, and modal logics with until and
divergence modalities) implemented against each other, with witness
relations and distinguishing formulas as machine-checkable certificates.
"""

from .colouring import Partition, refine_to_coarsest
from .lts import ActionLabel, Lasso, Lts, Path, emit_aut, parse_aut, quotient
from .modal import (
    Formula,
    characteristic_formula,
    distinguishing_formula,
    emit_formula,
    eval_formula,
    parse_formula,
)
from .relations import (
    ConditionId,
    check_condition,
    compute_bb,
    compute_bbd,
    stuttering_closure,
    verify_equivalence_certificate,
)

__all__ = [
    "ActionLabel",
    "ConditionId",
    "Formula",
    "Lasso",
    "Lts",
    "Partition",
    "Path",
    "characteristic_formula",
    "check_condition",
    "compute_bb",
    "compute_bbd",
    "distinguishing_formula",
    "emit_aut",
    "emit_formula",
    "eval_formula",
    "parse_aut",
    "parse_formula",
    "quotient",
    "refine_to_coarsest",
    "stuttering_closure",
    "verify_equivalence_certificate",
]
