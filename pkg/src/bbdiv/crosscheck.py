"""Cross-validation of the three characterisations against each other.

For each transition system the driver confronts the signature-refinement
partition with the greatest-fixpoint partition, re-validates the witness
relation through every condition checker, re-validates synthesized formulas
through the evaluator, spot-checks the expressiveness rewrites, and checks
the implication lattice of the divergence conditions on sampled relations.
Any discrepancy is a bug by the coincidence theorems, never a property of
the input.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import relations
from .colouring import refine_to_coarsest
from .generators import RunConfig, random_relation
from .lts import Lts
from .modal import (
    TAU_LABEL,
    Div,
    FormulaRefinement,
    JustBefore,
    StrongUntil,
    TOP,
    WeakUntil,
    applicable_identities,
    denotation,
    expand_identity,
    semantically_equivalent_on,
)
from .relations import ConditionId, check_condition, compose, union_rel

#: implications between condition verdicts on one relation; (premise, conclusion)
LATTICE_EDGES = (
    (ConditionId.D, ConditionId.D0),
    (ConditionId.D0, ConditionId.D),
    (ConditionId.D2, ConditionId.D3),
    (ConditionId.D3, ConditionId.D2),
    (ConditionId.D, ConditionId.D1),
    (ConditionId.D, ConditionId.GKPP),
    (ConditionId.GKPP, ConditionId.D4),
    (ConditionId.D2, ConditionId.D1),
    (ConditionId.D1, ConditionId.D4),
    (ConditionId.D3, ConditionId.INT),
    (ConditionId.INT, ConditionId.D4),
)


@dataclass
class CrosscheckReport:
    name: str
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _rewrite_battery(lts: Lts):
    labels = [TAU_LABEL] + [lab for lab in lts.alphabet if not lab.is_tau]
    battery = [Div(TOP)]
    for lab in labels:
        battery.append(JustBefore(TOP, lab, TOP))
        battery.append(StrongUntil(Div(TOP), lab, TOP))
        battery.append(WeakUntil(TOP, lab, Div(TOP)))
    return battery


def crosscheck_lts(lts: Lts, config: RunConfig, name: str = "lts") -> CrosscheckReport:
    report = CrosscheckReport(name)
    fail = report.failures.append

    refined = {True: refine_to_coarsest(lts, True), False: refine_to_coarsest(lts, False)}
    within_bound = lts.state_count <= config.lasso_bound

    # 1. engine agreement
    if within_bound:
        if relations.compute_bbd(lts, config.lasso_bound) != refined[True]:
            fail("fixpoint and refinement disagree on the divergence-aware partition")
        if relations.compute_bb(lts) != refined[False]:
            fail("fixpoint and refinement disagree on the plain partition")

    # 2. the computed witness passes every condition checker
    if within_bound:
        for cond, rep in relations.verify_equivalence_certificate(
            lts, refined[True], config.lasso_bound
        ).items():
            if not rep.holds:
                fail(f"computed equivalence rejected by condition {cond.value}")

    # 3 & 4. synthesized formulas re-validate through the evaluator
    for with_div in (True, False):
        engine = FormulaRefinement(lts, with_div)
        if engine.final != refined[with_div]:
            fail(f"formula refinement trace disagrees (divergence={with_div})")
            continue
        blocks = engine.final.blocks()
        last = len(engine.rounds) - 1
        for i, bi in enumerate(blocks):
            members = set(bi)
            char = engine.block_formula(last, i)
            if denotation(lts, char) != frozenset(members):
                fail(f"characteristic formula wrong for block {i} (divergence={with_div})")
            for j in range(len(blocks)):
                if i == j:
                    continue
                sep = engine.separator(last, i, j)
                den = denotation(lts, sep)
                if not members <= den or den & set(blocks[j]):
                    fail(
                        f"distinguishing formula wrong for blocks {i},{j} "
                        f"(divergence={with_div})"
                    )

    # 5. expressiveness rewrites preserve the denotation
    for formula in _rewrite_battery(lts):
        for which in applicable_identities(formula):
            if not semantically_equivalent_on(lts, formula, expand_identity(formula, which)):
                fail(f"identity {which.value} broke on {name}")

    # 6. condition lattice and closure lemmas on sampled relations
    if within_bound:
        rng = random.Random(config.seed ^ 0x5EED)
        sampled = [random_relation(rng, lts) for _ in range(6)]
        verdicts = []
        for rel in sampled:
            v = {
                cond: check_condition(lts, rel, cond, config.lasso_bound).holds
                for cond in ConditionId
            }
            verdicts.append((rel, v))
        for rel, v in verdicts:
            for premise, conclusion in LATTICE_EDGES:
                if v[premise] and not v[conclusion]:
                    fail(
                        f"lattice violation: {premise.value} holds but "
                        f"{conclusion.value} fails"
                    )
        satisfying = [
            rel
            for rel, v in verdicts
            if v[ConditionId.T] and v[ConditionId.D3]
        ]
        if len(satisfying) >= 2:
            u = union_rel(satisfying[:2])
            c = compose(satisfying[0], satisfying[1])
            for probe, label in ((u, "union"), (c, "composition")):
                for cond in (ConditionId.T, ConditionId.D3):
                    if not check_condition(lts, probe, cond, config.lasso_bound).holds:
                        fail(f"{label} of satisfying relations fails {cond.value}")
    return report


def run_crosscheck(
    ltss: list[tuple[str, Lts]], config: RunConfig
) -> list[CrosscheckReport]:
    return [crosscheck_lts(lts, config, name) for name, lts in ltss]
