"""Coloured-trace machinery and signature-based partition refinement.

A Partition doubles as a colouring.  Consistency is decided through
length-three coloured traces (colour - action - colour), realized as
per-state signatures over tau-closures confined to the state's own block;
divergence preservation adds a per-state divergence bit.  The coarsest
consistent (and divergence-preserving) colouring is computed by splitting
blocks on full signatures until stable; this is the scalable decision
procedure of the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .lts import TAU, Lts, Path, has_divergence_within


@dataclass(frozen=True)
class Partition:
    """Equivalence on states; block ids are canonical (ordered by least member)."""

    block_of: tuple[int, ...]
    n_blocks: int

    @staticmethod
    def from_block_of(assignment: Sequence[int]) -> "Partition":
        first_seen: dict[int, int] = {}
        for s, b in enumerate(assignment):
            first_seen.setdefault(b, s)
        order = sorted(first_seen, key=lambda b: first_seen[b])
        remap = {b: i for i, b in enumerate(order)}
        return Partition(tuple(remap[b] for b in assignment), len(order))

    @staticmethod
    def from_blocks(blocks: Iterable[Iterable[int]], state_count: int) -> "Partition":
        assignment = [-1] * state_count
        for i, members in enumerate(blocks):
            for s in members:
                if assignment[s] != -1:
                    raise ValueError(f"state {s} in two blocks")
                assignment[s] = i
        if any(b == -1 for b in assignment):
            raise ValueError("partition does not cover all states")
        return Partition.from_block_of(assignment)

    @staticmethod
    def single_block(state_count: int) -> "Partition":
        return Partition((0,) * state_count, 1 if state_count else 0)

    @staticmethod
    def discrete(state_count: int) -> "Partition":
        return Partition(tuple(range(state_count)), state_count)

    def blocks(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n_blocks)]
        for s, b in enumerate(self.block_of):
            out[b].append(s)
        return tuple(tuple(sorted(members)) for members in out)

    def as_relation(self) -> frozenset[tuple[int, int]]:
        pairs = set()
        for members in self.blocks():
            for s in members:
                for t in members:
                    pairs.add((s, t))
        return frozenset(pairs)

    def same_block(self, s: int, t: int) -> bool:
        return self.block_of[s] == self.block_of[t]

    def refines(self, other: "Partition") -> bool:
        """True iff every block of self is contained in a block of other."""
        rep: dict[int, int] = {}
        for s, b in enumerate(self.block_of):
            ob = other.block_of[s]
            if rep.setdefault(b, ob) != ob:
                return False
        return True


@dataclass(frozen=True)
class Signature:
    """Length-three coloured-trace steps plus the divergence bit."""

    steps: frozenset[tuple[int, int]]
    divergent: bool


def tau_closure_within_block(lts: Lts, p: Partition, s: int) -> frozenset[int]:
    block = p.block_of[s]
    seen = {s}
    stack = [s]
    while stack:
        x = stack.pop()
        for y in lts.tau_successors(x):
            if y not in seen and p.block_of[y] == block:
                seen.add(y)
                stack.append(y)
    return frozenset(seen)


def block_members(p: Partition, s: int) -> tuple[int, ...]:
    return p.blocks()[p.block_of[s]]


def signature(lts: Lts, p: Partition, s: int) -> Signature:
    block = p.block_of[s]
    steps = set()
    for x in tau_closure_within_block(lts, p, s):
        for a, d in lts.out_transitions(x):
            if a != TAU or p.block_of[d] != block:
                steps.add((a, p.block_of[d]))
    divergent = has_divergence_within(lts, s, block_members(p, s))
    return Signature(frozenset(steps), divergent)


def is_c_divergent(lts: Lts, p: Partition, s: int) -> bool:
    """An infinite tau-sequence from ``s`` never leaving its own colour class."""
    return has_divergence_within(lts, s, block_members(p, s))


def is_consistent(lts: Lts, p: Partition) -> bool:
    """Same-coloured states have the same length-three coloured traces."""
    for members in p.blocks():
        sigs = {signature(lts, p, s).steps for s in members}
        if len(sigs) > 1:
            return False
    return True


def preserves_divergence(lts: Lts, p: Partition) -> bool:
    """No colour class mixes C-divergent and non-C-divergent states."""
    for members in p.blocks():
        bits = {is_c_divergent(lts, p, s) for s in members}
        if len(bits) > 1:
            return False
    return True


# -- coloured traces --------------------------------------------------------


def coloured_trace_of_path(p: Partition, path: Path) -> tuple:
    """Colours interleaved with actions, all C,tau,C subsequences contracted."""
    trace: list = [p.block_of[path.states[0]]]
    for (_, a, dst) in path.steps():
        colour = p.block_of[dst]
        if a == TAU and trace[-1] == colour:
            continue
        trace.append(a)
        trace.append(colour)
    return tuple(trace)


def all_coloured_traces(lts: Lts, p: Partition, s: int, max_len: int) -> frozenset[tuple]:
    """Contracted coloured traces of paths from ``s`` with at most ``max_len``
    transitions."""
    frontier: set[tuple[int, tuple]] = {(s, (p.block_of[s],))}
    traces: set[tuple] = {(p.block_of[s],)}
    for _ in range(max_len):
        nxt: set[tuple[int, tuple]] = set()
        for state, trace in frontier:
            for a, d in lts.out_transitions(state):
                colour = p.block_of[d]
                if a == TAU and trace[-1] == colour:
                    extended = trace
                else:
                    extended = trace + (a, colour)
                traces.add(extended)
                nxt.add((d, extended))
        frontier = nxt
    return frozenset(traces)


def coloured_traces_up_to(lts: Lts, p: Partition, s: int, max_actions: int) -> frozenset[tuple]:
    """Contracted coloured traces of ``s`` with at most ``max_actions``
    actions, from paths of any length (saturation over state/trace pairs).

    Bounding the trace rather than the path makes the sets comparable
    between same-coloured states: contracted silent steps consume no trace
    budget.  This is the oracle behind the length-three trace lemma."""
    start = (s, (p.block_of[s],))
    seen: set[tuple[int, tuple]] = {start}
    frontier = [start]
    traces: set[tuple] = {start[1]}
    while frontier:
        nxt: list[tuple[int, tuple]] = []
        for state, trace in frontier:
            for a, d in lts.out_transitions(state):
                colour = p.block_of[d]
                if a == TAU and trace[-1] == colour:
                    extended = trace
                elif len(trace) // 2 >= max_actions:
                    continue
                else:
                    extended = trace + (a, colour)
                pair = (d, extended)
                if pair not in seen:
                    seen.add(pair)
                    nxt.append(pair)
                    traces.add(extended)
        frontier = nxt
    return frozenset(traces)


# -- signature refinement ----------------------------------------------------


def _tarjan_sccs(n: int, adj: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    """Iterative Tarjan; SCCs are emitted with successors first."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    sccs: list[list[int]] = []
    scc_of = [-1] * n
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            while pi < len(adj[v]):
                w = adj[v][pi]
                pi += 1
                if index[w] == -1:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    scc_of[w] = len(sccs)
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return sccs, scc_of


def _split_block(
    lts: Lts,
    block_ids: list[int],
    b: int,
    members: list[int],
    with_divergence: bool,
) -> Optional[list[list[int]]]:
    """Group the members of one block by signature (and divergence bit)
    against the given block assignment; None when the block stays whole."""
    index = {x: i for i, x in enumerate(members)}
    adj = [
        [index[y] for y in lts.tau_successors(x) if block_ids[y] == b]
        for x in members
    ]
    sccs, scc_of = _tarjan_sccs(len(members), adj)
    # Tarjan emits an SCC after every SCC it reaches, so one forward pass
    # over the emission order propagates signatures and divergence.
    scc_sig: list[frozenset] = []
    scc_div: list[bool] = []
    scc_group: list[int] = []
    keys: dict[tuple, int] = {}
    for i, comp in enumerate(sccs):
        direct = set()
        cyclic = len(comp) > 1
        succs = set()
        for xi in comp:
            for a, d in lts.out_transitions(members[xi]):
                if a != TAU or block_ids[d] != b:
                    direct.add((a, block_ids[d]))
            for yi in adj[xi]:
                j = scc_of[yi]
                if j == i:
                    cyclic = True
                else:
                    succs.add(j)
        div = cyclic
        for j in succs:
            div = div or scc_div[j]
        if not direct and len(succs) == 1:
            # pass-through component: share the successor's signature object
            # so its cached hash is reused
            sig = scc_sig[next(iter(succs))]
        else:
            for j in succs:
                direct |= scc_sig[j]
            sig = frozenset(direct)
        scc_sig.append(sig)
        scc_div.append(div)
        key = (sig, div if with_divergence else False)
        scc_group.append(keys.setdefault(key, len(keys)))
    if len(keys) <= 1:
        return None
    order: dict[int, int] = {}
    groups: list[list[int]] = []
    for xi, x in enumerate(members):
        g = scc_group[scc_of[xi]]
        if g not in order:
            order[g] = len(groups)
            groups.append([])
        groups[order[g]].append(x)
    return groups


def refinement_rounds(lts: Lts, with_divergence: bool) -> list[Partition]:
    """Partitions from the single block down to the stable colouring.

    Worklist refinement over stable block ids: a block is re-examined only
    when it was split or one of its members' transition targets moved to a
    new block, which cannot change any other signature.
    """
    n = lts.state_count
    if n == 0:
        return [Partition.single_block(0)]
    rounds = [Partition.single_block(n)]
    assignment = [0] * n
    members_of: dict[int, list[int]] = {0: list(range(n))}
    pred_sets: list[set[int]] = [set() for _ in range(n)]
    for s, _, d in lts.transitions:
        pred_sets[d].add(s)
    preds = [tuple(sorted(ps)) for ps in pred_sets]
    dirty = {0}
    next_id = 1
    while dirty:
        snapshot = assignment[:]
        moved: list[int] = []
        parts: list[int] = []
        for b in sorted(dirty):
            members = members_of[b]
            if len(members) <= 1:
                continue  # singletons never split, and nobody reads their signature
            groups = _split_block(lts, snapshot, b, members, with_divergence)
            if groups is None:
                continue
            members_of[b] = groups[0]
            parts.append(b)
            for group in groups[1:]:
                members_of[next_id] = group
                parts.append(next_id)
                for x in group:
                    assignment[x] = next_id
                    moved.append(x)
                next_id += 1
        if not moved:
            break
        rounds.append(Partition.from_block_of(assignment))
        dirty = set(parts)
        for x in moved:
            for s in preds[x]:
                dirty.add(assignment[s])
    return rounds


def refine_to_coarsest(lts: Lts, with_divergence: bool) -> Partition:
    """Coarsest consistent colouring; divergence preserving when flagged."""
    return refinement_rounds(lts, with_divergence)[-1]
