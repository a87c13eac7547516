"""Finite labelled transition systems with a silent action.

States are dense 0-based integers, labels are interned into an ordered
alphabet whose index 0 is always the silent action ``tau``.  The module
also provides the tau-closure operators and the lasso enumeration that
turns quantifiers over infinite tau-sequences into finite checks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

TAU_NAME = "tau"
TAU_ALIASES = frozenset({"tau", "i"})

#: index of the silent action in every alphabet
TAU = 0

#: default gate for exhaustive lasso enumeration
DEFAULT_LASSO_BOUND = 16


class AutParseError(ValueError):
    """Malformed Aldebaran input; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class LassoBoundExceeded(RuntimeError):
    """State count exceeds the configured bound for lasso enumeration."""


@dataclass(frozen=True)
class ActionLabel:
    name: str

    def __post_init__(self):
        if not self.name or '"' in self.name:
            raise ValueError(f"bad action label: {self.name!r}")

    @property
    def is_tau(self) -> bool:
        return self.name == TAU_NAME


@dataclass(frozen=True)
class Path:
    """Alternating state/label sequence; len(states) == len(labels) + 1."""

    states: tuple[int, ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.states) != len(self.labels) + 1:
            raise ValueError("path shape mismatch")

    def steps(self) -> Iterable[tuple[int, int, int]]:
        for k, a in enumerate(self.labels):
            yield self.states[k], a, self.states[k + 1]


@dataclass(frozen=True)
class Lasso:
    """A finite tau-walk whose last state repeats an earlier one.

    Pumping the cycle forever realizes an infinite tau-sequence whose
    visited set is ``full_set`` and whose set of states at positions >= 1
    is ``tail_set``.
    """

    walk: Path
    full_set: frozenset[int]
    tail_set: frozenset[int]


class Lts:
    """Immutable transition system; all derived maps built on construction."""

    def __init__(
        self,
        state_count: int,
        initial: int,
        label_names: Iterable[str],
        transitions: Iterable[tuple[int, int, int]],
    ):
        names = [TAU_NAME]
        for n in label_names:
            if n not in names:
                names.append(n)
        self.alphabet: tuple[ActionLabel, ...] = tuple(ActionLabel(n) for n in names)
        if sum(1 for a in self.alphabet if a.is_tau) != 1:
            raise ValueError("alphabet must contain exactly one silent label")
        self.state_count = state_count
        self.initial = initial
        ts = set()
        for s, a, d in transitions:
            if not (0 <= s < state_count and 0 <= d < state_count):
                raise ValueError(f"state out of range in transition {(s, a, d)}")
            if not 0 <= a < len(self.alphabet):
                raise ValueError(f"label index out of range in {(s, a, d)}")
            ts.add((s, a, d))
        if state_count > 0 and not 0 <= initial < state_count:
            raise ValueError("initial state out of range")
        self.transitions: frozenset[tuple[int, int, int]] = frozenset(ts)

        self._succ: dict[tuple[int, int], tuple[int, ...]] = {}
        by_key: dict[tuple[int, int], set[int]] = {}
        self._tau_succ: list[tuple[int, ...]] = [() for _ in range(state_count)]
        self._tau_pred: list[tuple[int, ...]] = [() for _ in range(state_count)]
        tsucc: list[set[int]] = [set() for _ in range(state_count)]
        tpred: list[set[int]] = [set() for _ in range(state_count)]
        for s, a, d in ts:
            by_key.setdefault((s, a), set()).add(d)
            if a == TAU:
                tsucc[s].add(d)
                tpred[d].add(s)
        for key, dests in by_key.items():
            self._succ[key] = tuple(sorted(dests))
        out: list[list[tuple[int, int]]] = [[] for _ in range(state_count)]
        for s, a, d in ts:
            out[s].append((a, d))
        self._out: tuple[tuple[tuple[int, int], ...], ...] = tuple(
            tuple(sorted(edges)) for edges in out
        )
        for s in range(state_count):
            self._tau_succ[s] = tuple(sorted(tsucc[s]))
            self._tau_pred[s] = tuple(sorted(tpred[s]))

    # -- label helpers -------------------------------------------------

    def label_index(self, name: str) -> Optional[int]:
        if name in TAU_ALIASES:
            return TAU
        for i, lab in enumerate(self.alphabet):
            if lab.name == name:
                return i
        return None

    def label_name(self, index: int) -> str:
        return self.alphabet[index].name

    def transition_names(self) -> tuple[tuple[int, str, int], ...]:
        """Transitions with label names, sorted; the isomorphism-stable view."""
        return tuple(sorted((s, self.label_name(a), d) for s, a, d in self.transitions))

    def states(self) -> range:
        return range(self.state_count)

    def out_transitions(self, s: int) -> tuple[tuple[int, int], ...]:
        """Outgoing (label, target) pairs of a state, sorted."""
        return self._out[s]

    def tau_successors(self, s: int) -> tuple[int, ...]:
        return self._tau_succ[s]

    def tau_predecessors(self, s: int) -> tuple[int, ...]:
        return self._tau_pred[s]


# -- Aldebaran format ----------------------------------------------------

_HEADER_RE = re.compile(r"^\s*des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
_EDGE_RE = re.compile(r'^\s*\(\s*(\d+)\s*,\s*(?:"([^"]*)"|([^,"]+?))\s*,\s*(\d+)\s*\)\s*$')


def parse_aut(text: str) -> Lts:
    """Parse Aldebaran (.aut) text; ``tau`` and its alias ``i`` are silent."""
    lines = text.splitlines()
    if not lines:
        raise AutParseError("missing des header", 1)
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise AutParseError("malformed des header", 1)
    initial, n_edges, n_states = (int(g) for g in m.groups())
    if n_states > 0 and initial >= n_states:
        raise AutParseError(f"initial state {initial} out of range", 1)
    label_names: list[str] = []
    edges: list[tuple[int, str, int]] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        em = _EDGE_RE.match(raw)
        if not em:
            raise AutParseError("malformed transition", lineno)
        src = int(em.group(1))
        name = em.group(2) if em.group(2) is not None else em.group(3).strip()
        dst = int(em.group(4))
        if name in TAU_ALIASES:
            name = TAU_NAME
        if not name or '"' in name:
            raise AutParseError(f"bad label {name!r}", lineno)
        for state in (src, dst):
            if state >= n_states:
                raise AutParseError(f"state {state} out of range", lineno)
        if name != TAU_NAME and name not in label_names:
            label_names.append(name)
        edges.append((src, name, dst))
    if len(edges) != n_edges:
        raise AutParseError(
            f"transition count mismatch: header says {n_edges}, found {len(edges)}",
            len(lines),
        )
    lts = Lts(n_states, initial, label_names, [])
    index = {lab.name: i for i, lab in enumerate(lts.alphabet)}
    return Lts(n_states, initial, label_names, [(s, index[n], d) for s, n, d in edges])


def emit_aut(lts: Lts) -> str:
    """Deterministic .aut text; transitions sorted, tau spelled out."""
    rows = sorted(lts.transitions)
    out = [f"des ({lts.initial},{len(rows)},{lts.state_count})"]
    for s, a, d in rows:
        out.append(f'({s},"{lts.label_name(a)}",{d})')
    return "\n".join(out) + "\n"


# -- step and closure operators -------------------------------------------


def successors(lts: Lts, s: int, a: int) -> frozenset[int]:
    return frozenset(lts._succ.get((s, a), ()))


def opt_step(lts: Lts, s: int, a: int) -> frozenset[int]:
    """Targets of ``s -a-> s'`` plus ``s`` itself when ``a`` is silent."""
    base = successors(lts, s, a)
    if a == TAU:
        return base | {s}
    return base


def tau_closure(lts: Lts, s: int) -> frozenset[int]:
    """States reachable from ``s`` by zero or more tau-steps."""
    seen = {s}
    stack = [s]
    while stack:
        x = stack.pop()
        for y in lts.tau_successors(x):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(seen)


def tau_plus(lts: Lts, s: int) -> frozenset[int]:
    """States reachable from ``s`` by one or more tau-steps."""
    out: set[int] = set()
    for y in lts.tau_successors(s):
        out |= tau_closure(lts, y)
    return frozenset(out)


def backward_tau_closure(lts: Lts, targets: Iterable[int]) -> frozenset[int]:
    """All states from which some target is tau-reachable."""
    seen = set(targets)
    stack = list(seen)
    while stack:
        x = stack.pop()
        for y in lts.tau_predecessors(x):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return frozenset(seen)


def has_divergence_within(lts: Lts, s: int, members: Iterable[int]) -> bool:
    """True iff an infinite tau-sequence from ``s`` stays inside the set.

    Equivalently: a tau-cycle inside the set is reachable from ``s`` by
    tau-steps inside the set.  False when ``s`` is outside the set.
    """
    inside = members if isinstance(members, (set, frozenset)) else set(members)
    if s not in inside:
        return False
    return s in divergent_states_within(lts, inside)


def divergent_states_within(lts: Lts, members: Iterable[int]) -> frozenset[int]:
    """All states of the set admitting an infinite tau-path inside it.

    Greatest-fixpoint peeling with a worklist: drop any state whose count of
    tau-successors inside the set reaches zero, propagating to predecessors.
    """
    alive = set(members)
    count = {
        x: sum(1 for y in lts.tau_successors(x) if y in alive) for x in alive
    }
    dead = [x for x, c in count.items() if c == 0]
    while dead:
        x = dead.pop()
        alive.discard(x)
        for p in lts.tau_predecessors(x):
            if p in alive:
                count[p] -= 1
                if count[p] == 0:
                    dead.append(p)
    return frozenset(alive)


# -- lasso enumeration -----------------------------------------------------


def enumerate_lassos(
    lts: Lts, s: int, members: Iterable[int], bound: int = DEFAULT_LASSO_BOUND
) -> tuple[Lasso, ...]:
    """All (full_set, tail_set) pairs of infinite tau-sequences from ``s``
    inside the given set, each witnessed by one lasso walk.

    Exhaustive over (state, visited-set) classes; gated by ``bound`` since
    the class space is exponential in the worst case.
    """
    inside = frozenset(members)
    if s not in inside:
        raise ValueError(f"state {s} not in the restriction set")
    if lts.state_count > bound:
        raise LassoBoundExceeded(
            f"{lts.state_count} states exceeds lasso bound {bound}"
        )
    # Classes are (current state, frozen set of states at positions >= 1).
    # Extending by an already-visited state closes a lasso; every realizable
    # (full, tail) pair is reached this way.
    found: dict[tuple[frozenset[int], frozenset[int]], Path] = {}
    parent: dict[tuple[int, frozenset[int]], Optional[tuple[int, frozenset[int]]]] = {}

    def walk_to(cls: tuple[int, frozenset[int]]) -> Path:
        chain = []
        cur: Optional[tuple[int, frozenset[int]]] = cls
        while cur is not None:
            chain.append(cur[0])
            cur = parent[cur]
        chain.append(s)
        chain.reverse()
        return Path(tuple(chain), (TAU,) * (len(chain) - 1))

    stack: list[tuple[int, frozenset[int]]] = []
    for t1 in lts.tau_successors(s):
        if t1 not in inside:
            continue
        if t1 == s:
            # the first step already closes a lasso (tau self-loop)
            tail = frozenset((s,))
            found.setdefault((tail, tail), Path((s, s), (TAU,)))
        cls = (t1, frozenset((t1,)))
        if cls not in parent:
            parent[cls] = None
            stack.append(cls)
    while stack:
        cur, tail = stack.pop()
        for nxt in lts.tau_successors(cur):
            if nxt not in inside:
                continue
            new_tail = tail | {nxt}
            if nxt in tail or nxt == s:
                key = (new_tail | {s}, new_tail)
                if key not in found:
                    base = walk_to((cur, tail))
                    found[key] = Path(
                        base.states + (nxt,), base.labels + (TAU,)
                    )
            cls = (nxt, new_tail)
            if cls not in parent:
                parent[cls] = (cur, tail)
                stack.append(cls)
    lassos = [
        Lasso(path, full, tail)
        for (full, tail), path in found.items()
    ]
    lassos.sort(key=lambda l: (sorted(l.full_set), sorted(l.tail_set)))
    return tuple(lassos)


def distinct_full_sets(lassos: Iterable[Lasso]) -> tuple[frozenset[int], ...]:
    seen: list[frozenset[int]] = []
    for l in lassos:
        if l.full_set not in seen:
            seen.append(l.full_set)
    return tuple(seen)


# -- quotient --------------------------------------------------------------


def quotient(lts: Lts, partition) -> Lts:
    """One state per block; divergence-preserving treatment of tau self-loops.

    A tau-transition from a block to itself is kept only when some member of
    the block diverges inside it, so the quotient does not erase explicit
    divergence.
    """
    if lts.state_count == 0:
        return Lts(0, 0, (), [])
    block_of = partition.block_of
    n_blocks = partition.n_blocks
    blocks = partition.blocks()
    keep_self_loop = []
    for members in blocks:
        mset = set(members)
        div = divergent_states_within(lts, mset)
        keep_self_loop.append(bool(div))
    edges = set()
    for s, a, d in lts.transitions:
        bs, bd = block_of[s], block_of[d]
        if a == TAU and bs == bd and not keep_self_loop[bs]:
            continue
        edges.add((bs, a, bd))
    names = [lab.name for lab in lts.alphabet if not lab.is_tau]
    return Lts(n_blocks, block_of[lts.initial], names, sorted(edges))
