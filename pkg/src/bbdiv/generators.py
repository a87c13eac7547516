"""Seeded random generators for transition systems and relations.

Everything is driven by an explicit :class:`random.Random` so that a given
RunConfig reproduces byte-identical outputs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import relations
from .lts import TAU_NAME, Lts

VISIBLE_LETTERS = ("a", "b")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    lasso_bound: int = 16
    sample_count: int = 100
    max_states: int = 8
    tau_density: float = 0.4

    def rng(self) -> random.Random:
        return random.Random(self.seed)


def random_lts(
    rng: random.Random,
    max_states: int,
    tau_density: float = 0.4,
    letters: tuple[str, ...] = VISIBLE_LETTERS,
) -> Lts:
    """Out-degree 0..3 per state; each edge silent with the given density."""
    n = rng.randint(1, max_states)
    shell = Lts(n, 0, letters, [])
    index = {lab.name: i for i, lab in enumerate(shell.alphabet)}
    edges = set()
    for s in range(n):
        for _ in range(rng.randint(0, 3)):
            name = TAU_NAME if rng.random() < tau_density else rng.choice(letters)
            edges.add((s, index[name], rng.randrange(n)))
    return Lts(n, 0, letters, sorted(edges))


def random_lts_exact(
    rng: random.Random,
    n_states: int,
    n_transitions: int,
    tau_density: float = 0.4,
    letters: tuple[str, ...] = VISIBLE_LETTERS,
) -> Lts:
    """Exactly the requested number of distinct transitions."""
    shell = Lts(n_states, 0, letters, [])
    index = {lab.name: i for i, lab in enumerate(shell.alphabet)}
    edges: set[tuple[int, int, int]] = set()
    while len(edges) < n_transitions:
        s = rng.randrange(n_states)
        name = TAU_NAME if rng.random() < tau_density else rng.choice(letters)
        edges.add((s, index[name], rng.randrange(n_states)))
    return Lts(n_states, 0, letters, sorted(edges))


def lts_stream(config: RunConfig):
    rng = config.rng()
    for _ in range(config.sample_count):
        yield random_lts(rng, config.max_states, config.tau_density)


RELATION_FLAVOURS = ("bbd", "bb", "uniform", "uniform_sym", "identity")


def random_relation(rng: random.Random, lts: Lts, flavour: str | None = None):
    """Relations for the implication tests: the computed equivalences populate
    the satisfying side, uniform pair sets the failing side."""
    if flavour is None:
        flavour = RELATION_FLAVOURS[rng.randrange(len(RELATION_FLAVOURS))]
    n = lts.state_count
    if flavour == "bbd":
        return relations.compute_bbd(lts).as_relation()
    if flavour == "bb":
        return relations.compute_bb(lts).as_relation()
    if flavour == "identity":
        return frozenset((s, s) for s in range(n))
    k = rng.randint(0, max(1, n * n // 3))
    pairs = {(rng.randrange(n), rng.randrange(n)) for _ in range(k)}
    rel = frozenset(pairs)
    if flavour == "uniform_sym":
        rel = relations.symmetric_closure(rel)
    return rel
