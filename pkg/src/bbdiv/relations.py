"""Binary relations on states and the divergence-condition checkers.

Conditions are checked per ordered pair exactly as written; symmetry of the
input is never assumed.  Quantifiers over infinite tau-sequences are decided
through the lasso enumeration of :mod:`bbdiv.lts`.  The greatest-fixpoint
engines for plain branching bisimilarity and for the divergence-sensitive
refinement live here as the desk-scale oracles; past the lasso bound the
divergence-sensitive computation delegates to signature refinement.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional

from . import colouring
from .colouring import Partition
from .lts import (
    DEFAULT_LASSO_BOUND,
    TAU,
    Lts,
    Path,
    backward_tau_closure,
    distinct_full_sets,
    enumerate_lassos,
    has_divergence_within,
    opt_step,
    successors,
    tau_closure,
    tau_plus,
)

Relation = frozenset  # of (state, state) pairs


class PreconditionError(ValueError):
    """A stated precondition of an operation does not hold."""


class RelationParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def make_relation(pairs: Iterable[tuple[int, int]], lts: Optional[Lts] = None) -> Relation:
    rel = frozenset((int(s), int(t)) for s, t in pairs)
    if lts is not None:
        for s, t in rel:
            if not (0 <= s < lts.state_count and 0 <= t < lts.state_count):
                raise ValueError(f"pair {(s, t)} out of range")
    return rel


def parse_relation(text: str, lts: Optional[Lts] = None) -> Relation:
    """One pair per line, two decimal state indices; ``#`` starts a comment."""
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise RelationParseError("expected two state indices", lineno)
        s, t = int(parts[0]), int(parts[1])
        if lts is not None and not (s < lts.state_count and t < lts.state_count):
            raise RelationParseError(f"state index out of range in ({s}, {t})", lineno)
        pairs.append((s, t))
    return frozenset(pairs)


def emit_relation(r: Relation) -> str:
    return "".join(f"{s} {t}\n" for s, t in sorted(r))


def symmetric_closure(r: Relation) -> Relation:
    return frozenset(r) | frozenset((t, s) for s, t in r)


def compose(r1: Relation, r2: Relation) -> Relation:
    by_first: dict[int, list[int]] = {}
    for t, u in r2:
        by_first.setdefault(t, []).append(u)
    return frozenset((s, u) for s, t in r1 for u in by_first.get(t, ()))


def union_rel(rs: Iterable[Relation]) -> Relation:
    out: set = set()
    for r in rs:
        out |= r
    return frozenset(out)


def related_to(r: Relation, t: int) -> frozenset[int]:
    """B(t): the states standing in relation to ``t`` as first component."""
    return frozenset(s for s, u in r if u == t)


def image(r: Relation, x: int) -> frozenset[int]:
    return frozenset(v for u, v in r if u == x)


# -- conditions -------------------------------------------------------------


class ConditionId(enum.Enum):
    T = "T"
    D = "D"
    D0 = "D0"
    D1 = "D1"
    D2 = "D2"
    D3 = "D3"
    D4 = "D4"
    GKPP = "GKPP"
    INT = "INT"


#: conditions whose checker enumerates lassos and is therefore gated by the
#: lasso bound; T is the only unbounded one
BOUNDED_CONDITIONS = frozenset(
    {
        ConditionId.D,
        ConditionId.D0,
        ConditionId.D1,
        ConditionId.D2,
        ConditionId.D3,
        ConditionId.D4,
        ConditionId.GKPP,
        ConditionId.INT,
    }
)

#: conditions whose premise restricts the divergence to B(t); the others
#: quantify over every divergence from s
_RESTRICTED_PREMISE = frozenset(
    {ConditionId.D, ConditionId.D0, ConditionId.D1, ConditionId.D4, ConditionId.GKPP}
)


@dataclass(frozen=True)
class Counterexample:
    pair: tuple[int, int]
    move: Optional[tuple[int, int, int]] = None
    lasso_full: Optional[frozenset[int]] = None
    lasso_tail: Optional[frozenset[int]] = None
    reason: str = ""


@dataclass(frozen=True)
class ConditionReport:
    condition: ConditionId
    holds: bool
    counterexample: Optional[Counterexample] = None


def _t_response(lts: Lts, r: Relation, s: int, t: int, a: int, s2: int):
    """First (t'', t') matching the step-transfer obligation, or None."""
    for t2 in sorted(tau_closure(lts, t)):
        if (s, t2) not in r:
            continue
        for t1 in sorted(opt_step(lts, t2, a)):
            if (s2, t1) in r:
                return t2, t1
    return None


def check_condition(
    lts: Lts, r: Relation, cond: ConditionId, lasso_bound: int = DEFAULT_LASSO_BOUND
) -> ConditionReport:
    """Decide one condition for the relation, with a replayable counterexample
    on failure.  All divergence conditions are gated by the lasso bound."""
    if cond is ConditionId.T:
        for s, t in sorted(r):
            for a, s2 in lts.out_transitions(s):
                if _t_response(lts, r, s, t, a, s2) is None:
                    return ConditionReport(
                        cond,
                        False,
                        Counterexample(
                            (s, t),
                            move=(s, a, s2),
                            reason="no matching response through silent steps",
                        ),
                    )
        return ConditionReport(cond, True)

    everything = frozenset(range(lts.state_count))
    for s, t in sorted(r):
        restriction = related_to(r, t) if cond in _RESTRICTED_PREMISE else everything
        if s not in restriction:
            continue
        lassos = enumerate_lassos(lts, s, restriction, lasso_bound)
        if cond is ConditionId.GKPP:
            seen_tails = set()
            for l in lassos:
                if l.tail_set in seen_tails:
                    continue
                seen_tails.add(l.tail_set)
                if not any(
                    (x, t1) in r
                    for t1 in successors(lts, t, TAU)
                    for x in l.tail_set
                ):
                    return ConditionReport(
                        cond,
                        False,
                        Counterexample(
                            (s, t),
                            lasso_full=l.full_set,
                            lasso_tail=l.tail_set,
                            reason="no single-step successor related to a "
                            "post-start state of the divergence",
                        ),
                    )
            continue
        for full in distinct_full_sets(lassos):
            if cond in (ConditionId.D, ConditionId.D0):
                ok = any(
                    all((x, t1) in r for x in full)
                    for t1 in successors(lts, t, TAU)
                )
                why = "no single-step successor related to every state of the divergence"
            elif cond in (ConditionId.D1, ConditionId.D2):
                ok = any(
                    (x, t1) in r
                    for t1 in successors(lts, t, TAU)
                    for x in full
                )
                why = "no single-step successor related to any state of the divergence"
            elif cond is ConditionId.D3:
                matched = frozenset(
                    v for x in full for v in image(r, x)
                )
                ok = t in matched and has_divergence_within(lts, t, matched)
                why = "no divergence through states related to the source divergence"
            elif cond in (ConditionId.D4, ConditionId.INT):
                ok = any(
                    (x, t1) in r for t1 in tau_plus(lts, t) for x in full
                )
                why = "no multi-step successor related to any state of the divergence"
            else:  # pragma: no cover
                raise ValueError(f"unknown condition {cond}")
            if not ok:
                return ConditionReport(
                    cond,
                    False,
                    Counterexample((s, t), lasso_full=full, reason=why),
                )
    return ConditionReport(cond, True)


# -- stuttering -------------------------------------------------------------


def stuttering_closure(lts: Lts, r: Relation) -> Relation:
    """Pairs bracketed by r-pairs through tau-reachability; contains r."""
    fwd = [tau_closure(lts, s) for s in lts.states()]
    bwd = [backward_tau_closure(lts, (s,)) for s in lts.states()]
    c1: set[tuple[int, int]] = set()
    c2: set[tuple[int, int]] = set()
    for u, v in r:
        for s in fwd[u]:
            for t in bwd[v]:
                c1.add((s, t))
        for s in bwd[u]:
            for t in fwd[v]:
                c2.add((s, t))
    return frozenset(c1 & c2)


def has_stuttering_property(lts: Lts, r: Relation) -> bool:
    """Whenever the endpoints of a tau-path are related to the same state,
    every state on some tau-path between them is related too."""
    fwd = [tau_closure(lts, s) for s in lts.states()]
    bwd = [backward_tau_closure(lts, (s,)) for s in lts.states()]
    partners: dict[int, set[int]] = {}
    for s, t in r:
        partners.setdefault(s, set()).add(t)
    for s, mates in partners.items():
        for t0 in mates:
            for tn in mates:
                if tn not in fwd[t0]:
                    continue
                if not (fwd[t0] & bwd[tn]) <= mates:
                    return False
    return True


def transfer_multi(
    lts: Lts, r: Relation, s: int, t: int, s_target: int
) -> Optional[tuple[int, Path]]:
    """Replay of the multi-step transfer: follow a shortest tau-path from the
    source and simulate each step through the relation.

    Returns the matched partner with the tau-path evidence from ``t``.  The
    checked preconditions raise; a mid-replay dead end (possible only when
    the relation does not satisfy the step condition) returns None.
    """
    if (s, t) not in r:
        raise PreconditionError(f"pair ({s}, {t}) not in the relation")
    if s_target not in tau_closure(lts, s):
        raise PreconditionError(f"state {s_target} not tau-reachable from {s}")
    src_path = _shortest_tau_path(lts, s, s_target)
    cur = t
    ev_states = [t]
    ev_labels: list[int] = []
    for x, _, x2 in src_path.steps():
        hit = None
        for t2 in sorted(tau_closure(lts, cur)):
            if (x, t2) not in r:
                continue
            for t1 in sorted(successors(lts, t2, TAU)):
                if (x2, t1) in r:
                    hit = (t2, t1, True)
                    break
            if hit is None and (x2, t2) in r:
                hit = (t2, t2, False)
            if hit is not None:
                break
        if hit is None:
            return None
        t2, t1, real = hit
        bridge = _shortest_tau_path(lts, cur, t2)
        ev_states.extend(bridge.states[1:])
        ev_labels.extend(bridge.labels)
        if real:
            ev_states.append(t1)
            ev_labels.append(TAU)
        cur = t1
    return cur, Path(tuple(ev_states), tuple(ev_labels))


def _shortest_tau_path(lts: Lts, src: int, dst: int) -> Path:
    if src == dst:
        return Path((src,), ())
    parent = {src: src}
    frontier = [src]
    while frontier:
        nxt = []
        for x in frontier:
            for y in lts.tau_successors(x):
                if y not in parent:
                    parent[y] = x
                    if y == dst:
                        chain = [dst]
                        while chain[-1] != src:
                            chain.append(parent[chain[-1]])
                        chain.reverse()
                        return Path(tuple(chain), (TAU,) * (len(chain) - 1))
                    nxt.append(y)
        frontier = nxt
    raise PreconditionError(f"no tau-path from {src} to {dst}")


# -- greatest-fixpoint engines ----------------------------------------------


def _gfp(lts: Lts, with_divergence: bool, lasso_bound: int) -> Partition:
    n = lts.state_count
    closures = [tau_closure(lts, s) for s in range(n)]
    minimal_fulls: list[tuple[frozenset[int], ...]] = []
    if with_divergence:
        everything = frozenset(range(n))
        for s in range(n):
            fulls = distinct_full_sets(enumerate_lassos(lts, s, everything, lasso_bound))
            minimal = [f for f in fulls if not any(g < f for g in fulls)]
            minimal_fulls.append(tuple(minimal))

    def transfer_ok(rel: set, s: int, t: int) -> bool:
        for a, s2 in lts.out_transitions(s):
            matched = False
            for t2 in closures[t]:
                if (s, t2) not in rel:
                    continue
                if a == TAU and (s2, t2) in rel:
                    matched = True
                    break
                if any((s2, t1) in rel for t1 in successors(lts, t2, a)):
                    matched = True
                    break
            if not matched:
                return False
        return True

    def divergence_ok(rel: set, s: int, t: int) -> bool:
        for full in minimal_fulls[s]:
            if not any(
                (x, t1) in rel for t1 in lts.tau_successors(t) for x in full
            ):
                return False
        return True

    def pair_ok(rel: set, s: int, t: int) -> bool:
        ok = transfer_ok(rel, s, t) and transfer_ok(rel, t, s)
        if ok and with_divergence:
            ok = divergence_ok(rel, s, t) and divergence_ok(rel, t, s)
        return ok

    # both orientations checked per pair, so the iterate stays symmetric
    rel = {(s, t) for s in range(n) for t in range(n)}
    changed = True
    while changed:
        changed = False
        keep = set()
        for s, t in rel:
            if pair_ok(rel, s, t):
                keep.add((s, t))
            else:
                changed = True
        rel = keep
    # largest symmetric relation satisfying the conditions is an equivalence
    blocks: dict[frozenset[int], list[int]] = {}
    for s in range(n):
        cls = frozenset(t for t in range(n) if (s, t) in rel)
        if s not in cls:
            raise AssertionError("fixpoint lost reflexivity")
        blocks.setdefault(cls, []).append(s)
    for cls, members in blocks.items():
        if cls != frozenset(members):
            raise AssertionError("fixpoint is not an equivalence")
    return Partition.from_blocks(blocks.values(), n)


def compute_bb(lts: Lts) -> Partition:
    """Plain branching bisimilarity as the greatest fixpoint of step-transfer
    pair deletion from the full relation."""
    return _gfp(lts, False, lasso_bound=0)


def compute_bbd(lts: Lts, lasso_bound: int = DEFAULT_LASSO_BOUND) -> Partition:
    """Branching bisimilarity with explicit divergence.

    Within the lasso bound: greatest fixpoint over step-transfer plus the
    monotone divergence-matching condition (premise over every divergence,
    conclusion through a single silent step).  Beyond the bound the
    signature-refinement engine is the authoritative algorithm.
    """
    if lts.state_count > lasso_bound:
        return colouring.refine_to_coarsest(lts, True)
    return _gfp(lts, True, lasso_bound)


def verify_equivalence_certificate(
    lts: Lts, p: Partition, lasso_bound: int = DEFAULT_LASSO_BOUND
) -> dict[ConditionId, ConditionReport]:
    """Check every condition on the equivalence induced by the partition."""
    rel = p.as_relation()
    return {
        cond: check_condition(lts, rel, cond, lasso_bound) for cond in ConditionId
    }
