"""Search for witnesses that the divergence conditions do not compose.

The step condition composes; the divergence conditions D and D1 do not.
This harness searches small transition systems for pairs of relations that
each pass the conditions while their composition fails, so the phenomenon is
reproduced on concrete, checker-verified instances rather than asserted.

The search walks structured probe families first (relations built from
synchronized walks between tau-cycles and from small pair sets inside one
component), then falls back to seeded random sampling.  Found instances are
meant to be frozen as regression fixtures.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .generators import RunConfig, random_lts
from .lts import TAU, Lts
from .relations import (
    ConditionId,
    Relation,
    check_condition,
    compose,
    symmetric_closure,
)


class SearchExhausted(RuntimeError):
    """The configured search space contains no instance."""


@dataclass(frozen=True)
class CompositionWitness:
    lts: Lts
    r1: Relation
    r2: Relation
    condition: ConditionId

    def verify(self, lasso_bound: int = 16) -> bool:
        t = ConditionId.T
        c = self.condition
        return (
            check_condition(self.lts, self.r1, t, lasso_bound).holds
            and check_condition(self.lts, self.r1, c, lasso_bound).holds
            and check_condition(self.lts, self.r2, t, lasso_bound).holds
            and check_condition(self.lts, self.r2, c, lasso_bound).holds
            and not check_condition(
                self.lts, compose(self.r1, self.r2), c, lasso_bound
            ).holds
        )


def _tau_lts(n: int, edges: list[tuple[int, int]]) -> Lts:
    return Lts(n, 0, (), [(s, TAU, d) for s, d in edges])


def _functional_lts(targets: list[int | None]) -> Lts:
    edges = [(s, d) for s, d in enumerate(targets) if d is not None]
    return _tau_lts(len(targets), edges)


def _walk_orbit(targets: list[int | None], x: int, y: int) -> Relation | None:
    """Pairs collected by stepping both sides of a functional tau-graph in
    lockstep until the pair repeats; None when either side halts."""
    pairs = set()
    cur = (x, y)
    while cur not in pairs:
        pairs.add(cur)
        nx, ny = targets[cur[0]], targets[cur[1]]
        if nx is None or ny is None:
            return None
        cur = (nx, ny)
    return frozenset(pairs)


def _passes(lts: Lts, r: Relation, cond: ConditionId, bound: int) -> bool:
    return (
        check_condition(lts, r, ConditionId.T, bound).holds
        and check_condition(lts, r, cond, bound).holds
    )


def _cross(
    lts: Lts,
    pool1: list[Relation],
    pool2: list[Relation],
    cond: ConditionId,
    bound: int,
) -> CompositionWitness | None:
    for r1 in pool1:
        for r2 in pool2:
            composed = compose(r1, r2)
            if not composed:
                continue
            if not check_condition(lts, composed, cond, bound).holds:
                return CompositionWitness(lts, r1, r2, cond)
    return None


def _probe_two_component(cond: ConditionId, bound: int) -> CompositionWitness | None:
    """Family: a 2-cycle next to a functional tau-graph on four states.

    First relations are symmetric closures of lockstep walk orbits between
    the components, second relations symmetric closures of up to three pairs
    inside the second component.
    """
    b_states = [2, 3, 4, 5]
    b_pairs = [(x, y) for x in b_states for y in b_states if x != y]
    for combo in itertools.product([None, 2, 3, 4, 5], repeat=4):
        targets: list[int | None] = [1, 0, *combo]
        if all(t is None for t in combo):
            continue
        lts = _functional_lts(targets)
        pool1 = []
        for x in (0, 1):
            for y in b_states:
                orbit = _walk_orbit(targets, x, y)
                if orbit is None:
                    continue
                r1 = symmetric_closure(orbit)
                if _passes(lts, r1, cond, bound):
                    pool1.append(r1)
        if not pool1:
            continue
        pool2 = []
        for size in (1, 2, 3):
            for chosen in itertools.combinations(b_pairs, size):
                r2 = symmetric_closure(frozenset(chosen))
                if _passes(lts, r2, cond, bound):
                    pool2.append(r2)
        hit = _cross(lts, pool1, pool2, cond, bound)
        if hit is not None:
            return hit
    return None


def _probe_three_layer(cond: ConditionId, bound: int) -> CompositionWitness | None:
    """Family: a diverging state, a middle tau-cycle, a target tau-cycle;
    relations go layer to layer and need not be symmetric."""
    for mid_len, far_len in ((2, 3), (3, 2), (2, 2), (3, 3)):
        if 1 + mid_len + far_len > 6:
            continue
        mid = list(range(1, 1 + mid_len))
        far = list(range(1 + mid_len, 1 + mid_len + far_len))
        edges = [(0, 0)]
        edges += [(mid[i], mid[(i + 1) % mid_len]) for i in range(mid_len)]
        edges += [(far[i], far[(i + 1) % far_len]) for i in range(far_len)]
        lts = _tau_lts(1 + mid_len + far_len, edges)
        pool1 = []
        for size in range(1, mid_len + 1):
            for chosen in itertools.combinations([(0, m) for m in mid], size):
                r1 = frozenset(chosen)
                if _passes(lts, r1, cond, bound):
                    pool1.append(r1)
        layer_pairs = [(m, f) for m in mid for f in far]
        pool2 = []
        for size in (1, 2, 3):
            for chosen in itertools.combinations(layer_pairs, size):
                r2 = frozenset(chosen)
                if _passes(lts, r2, cond, bound):
                    pool2.append(r2)
        hit = _cross(lts, pool1, pool2, cond, bound)
        if hit is not None:
            return hit
    return None


def _random_stage(
    cond: ConditionId, config: RunConfig, attempts: int
) -> CompositionWitness | None:
    rng = random.Random(config.seed)
    n_max = min(config.max_states, 6)
    for _ in range(attempts):
        lts = random_lts(rng, n_max, tau_density=0.85, letters=("a",))
        n = lts.state_count
        pool = []
        for _ in range(24):
            k = rng.randint(1, 4)
            pairs = frozenset(
                (rng.randrange(n), rng.randrange(n)) for _ in range(k)
            )
            if rng.random() < 0.5:
                pairs = symmetric_closure(pairs)
            if pairs and _passes(lts, pairs, cond, config.lasso_bound):
                pool.append(pairs)
        hit = _cross(lts, pool, pool, cond, config.lasso_bound)
        if hit is not None:
            return hit
    return None


def find_composition_counterexample(
    cond: ConditionId, config: RunConfig, random_attempts: int = 200
) -> CompositionWitness:
    """First witness that composing two relations passing T and the given
    condition can break the condition."""
    if cond not in (ConditionId.D, ConditionId.D1):
        raise ValueError("search supports conditions D and D1")
    if config.max_states < 4:
        raise SearchExhausted(
            f"no composition counterexample for {cond.value} within "
            f"{config.max_states} states"
        )
    for stage in (_probe_three_layer, _probe_two_component):
        hit = stage(cond, config.lasso_bound)
        if hit is not None and hit.verify(config.lasso_bound):
            return hit
    hit = _random_stage(cond, config, random_attempts)
    if hit is not None and hit.verify(config.lasso_bound):
        return hit
    raise SearchExhausted(
        f"no composition counterexample for {cond.value} found in the "
        "configured search space"
    )


def search_composition_counterexamples(
    config: RunConfig,
) -> dict[ConditionId, CompositionWitness]:
    """Witnesses for both non-compositionality phenomena."""
    return {
        cond: find_composition_counterexample(cond, config)
        for cond in (ConditionId.D, ConditionId.D1)
    }
