"""Modal logics with until and divergence modalities.

Formulas are immutable trees.  Evaluation is denotational: every subformula
is mapped bottom-up to its set of satisfying states, with the two divergence
modalities realized as greatest fixpoints.  The module also provides the
expressiveness rewrites between the until variants, the separation of a
formula into upward/downward parts, the translation from the strong-until
logic into the just-before logic, and synthesis of distinguishing and
characteristic formulas from a refinement trace.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional

from .colouring import Partition
from .lts import (
    TAU,
    ActionLabel,
    Lts,
    backward_tau_closure,
    divergent_states_within,
    tau_closure,
)
from .relations import PreconditionError

TAU_LABEL = ActionLabel("tau")


class Formula:
    pass


@dataclass(frozen=True)
class Neg(Formula):
    arg: Formula


@dataclass(frozen=True)
class Conj(Formula):
    members: frozenset

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))


@dataclass(frozen=True)
class Disj(Formula):
    members: frozenset

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))


@dataclass(frozen=True)
class JustBefore(Formula):
    left: Formula
    label: ActionLabel
    right: Formula


@dataclass(frozen=True)
class WeakUntil(Formula):
    left: Formula
    label: ActionLabel
    right: Formula


@dataclass(frozen=True)
class StrongUntil(Formula):
    left: Formula
    label: ActionLabel
    right: Formula


@dataclass(frozen=True)
class Div(Formula):
    arg: Formula


@dataclass(frozen=True)
class SDiv(Formula):
    arg: Formula


TOP = Conj(frozenset())
BOT = Neg(TOP)

_UNTILS = (JustBefore, WeakUntil, StrongUntil)


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"at position {position}: {message}")
        self.position = position


# -- printing ----------------------------------------------------------------


def emit_formula(f: Formula) -> str:
    """Canonical text; conjunction/disjunction members sorted by their text."""
    if f == BOT:
        return "ff"
    if isinstance(f, Conj):
        if not f.members:
            return "tt"
        return "&{" + ", ".join(sorted(emit_formula(m) for m in f.members)) + "}"
    if isinstance(f, Disj):
        return "|{" + ", ".join(sorted(emit_formula(m) for m in f.members)) + "}"
    if isinstance(f, Neg):
        return "!" + _operand(f.arg)
    if isinstance(f, Div):
        return "DIV " + _operand(f.arg)
    if isinstance(f, SDiv):
        return "SDIV " + _operand(f.arg)
    if isinstance(f, _UNTILS):
        op = {JustBefore: "JU", WeakUntil: "WU", StrongUntil: "SU"}[type(f)]
        return f"{_operand(f.left)} {op}[{f.label.name}] {_operand(f.right)}"
    raise TypeError(f"not a formula: {f!r}")


def _operand(f: Formula) -> str:
    """Sides of binary operators and prefix arguments: atoms stay bare,
    anything that could swallow the context is parenthesized."""
    text = emit_formula(f)
    if isinstance(f, (Conj, Disj)) or text in ("tt", "ff"):
        return text
    return f"({text})"


# -- parsing -----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def error(self, message: str):
        raise FormulaSyntaxError(message, self.i)

    def ws(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def eat(self, token: str) -> bool:
        self.ws()
        if self.text.startswith(token, self.i):
            self.i += len(token)
            return True
        return False

    def expect(self, token: str):
        if not self.eat(token):
            self.error(f"expected {token!r}")

    def word(self) -> str:
        self.ws()
        j = self.i
        while j < len(self.text) and (self.text[j].isalnum() or self.text[j] == "_"):
            j += 1
        w = self.text[self.i : j]
        self.i = j
        return w

    def formula(self) -> Formula:
        left = self.primary()
        self.ws()
        for op, node in (("JU[", JustBefore), ("WU[", WeakUntil), ("SU[", StrongUntil)):
            if self.eat(op):
                name = self.word()
                if not name:
                    self.error("expected action label")
                self.expect("]")
                right = self.primary()
                self.ws()
                if self.text.startswith(("JU[", "WU[", "SU["), self.i):
                    self.error("until operators are non-associative; parenthesize")
                return node(left, ActionLabel(name), right)
        return left

    def primary(self) -> Formula:
        self.ws()
        if self.eat("!"):
            return Neg(self.primary())
        if self.eat("&{"):
            return Conj(frozenset(self.member_list()))
        if self.eat("|{"):
            return Disj(frozenset(self.member_list()))
        if self.eat("("):
            f = self.formula()
            self.expect(")")
            return f
        w = self.word()
        if w == "tt":
            return TOP
        if w == "ff":
            return BOT
        if w == "DIV":
            return Div(self.primary())
        if w == "SDIV":
            return SDiv(self.primary())
        self.error("expected a formula")

    def member_list(self) -> list[Formula]:
        members: list[Formula] = []
        self.ws()
        if self.eat("}"):
            return members
        members.append(self.formula())
        while self.eat(","):
            members.append(self.formula())
        self.expect("}")
        return members


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.ws()
    if p.i != len(text):
        p.error("trailing input")
    return f


# -- evaluation ---------------------------------------------------------------


def _label_successors(lts: Lts, x: int, label: ActionLabel) -> frozenset[int]:
    idx = lts.label_index(label.name)
    if idx is None:
        return frozenset()
    return frozenset(lts._succ.get((x, idx), ()))


def _bwd_tau_within(lts: Lts, allowed: frozenset[int], seeds: Iterable[int]) -> frozenset[int]:
    seen = set(seeds)
    stack = list(seen)
    while stack:
        x = stack.pop()
        for p in lts.tau_predecessors(x):
            if p in allowed and p not in seen:
                seen.add(p)
                stack.append(p)
    return frozenset(seen)


def denotation(lts: Lts, f: Formula, _memo: Optional[dict] = None) -> frozenset[int]:
    """Set of states where the formula is valid."""
    if _memo is None:
        _memo = {}
    hit = _memo.get(f)
    if hit is not None:
        return hit
    everything = frozenset(range(lts.state_count))
    if isinstance(f, Neg):
        out = everything - denotation(lts, f.arg, _memo)
    elif isinstance(f, Conj):
        out = everything
        for m in f.members:
            out &= denotation(lts, m, _memo)
    elif isinstance(f, Disj):
        out = frozenset()
        for m in f.members:
            out |= denotation(lts, m, _memo)
    elif isinstance(f, JustBefore):
        phi = denotation(lts, f.left, _memo)
        psi = denotation(lts, f.right, _memo)
        anchors = set()
        for x in phi:
            targets = _label_successors(lts, x, f.label)
            if targets & psi or (f.label.is_tau and x in psi):
                anchors.add(x)
        out = backward_tau_closure(lts, anchors)
    elif isinstance(f, (WeakUntil, StrongUntil)):
        phi = denotation(lts, f.left, _memo)
        psi = denotation(lts, f.right, _memo)
        anchors = set()
        for x in phi:
            targets = _label_successors(lts, x, f.label)
            if targets & psi:
                anchors.add(x)
            elif isinstance(f, StrongUntil) and f.label.is_tau and x in psi:
                anchors.add(x)
        out = _bwd_tau_within(lts, phi, anchors)
        if isinstance(f, WeakUntil) and f.label.is_tau:
            out |= psi
    elif isinstance(f, SDiv):
        out = divergent_states_within(lts, denotation(lts, f.arg, _memo))
    elif isinstance(f, Div):
        core = divergent_states_within(lts, denotation(lts, f.arg, _memo))
        out = backward_tau_closure(lts, core)
    else:
        raise TypeError(f"not a formula: {f!r}")
    _memo[f] = out
    return out


def eval_formula(lts: Lts, s: int, f: Formula) -> bool:
    if not 0 <= s < lts.state_count:
        raise ValueError(f"state {s} out of range")
    return s in denotation(lts, f)


def semantically_equivalent_on(lts: Lts, f: Formula, g: Formula) -> bool:
    memo: dict = {}
    return denotation(lts, f, memo) == denotation(lts, g, memo)


# -- logics -------------------------------------------------------------------


class LogicId(enum.Enum):
    JB = "JB"
    JB_DIV = "JB_DIV"
    U_DIV = "U_DIV"
    JB_SDIV = "JB_SDIV"


_ALLOWED = {
    LogicId.JB: (Neg, Conj, Disj, JustBefore),
    LogicId.JB_DIV: (Neg, Conj, Disj, JustBefore, Div),
    LogicId.U_DIV: (Neg, Conj, Disj, StrongUntil, Div),
    LogicId.JB_SDIV: (Neg, Conj, Disj, JustBefore, SDiv),
}


def in_logic(f: Formula, logic: LogicId) -> bool:
    allowed = _ALLOWED[logic]
    if not isinstance(f, allowed):
        return False
    if isinstance(f, (Neg, Div, SDiv)):
        return in_logic(f.arg, logic)
    if isinstance(f, (Conj, Disj)):
        return all(in_logic(m, logic) for m in f.members)
    if isinstance(f, _UNTILS):
        return in_logic(f.left, logic) and in_logic(f.right, logic)
    return True


# -- expressiveness identities -------------------------------------------------


class IdentityId(enum.Enum):
    WEAK_UNTIL_TAU = "wu-tau"
    STRONG_UNTIL_TAU = "su-tau"
    STRONG_UNTIL_VISIBLE = "su-visible"
    JUST_BEFORE_VIA_STRONG_UNTIL = "ju-via-su"
    DIV_VIA_SDIV = "div-via-sdiv"


def expand_identity(f: Formula, which: IdentityId) -> Formula:
    """Rewrite the root of the formula by the chosen expressiveness identity."""
    if which is IdentityId.WEAK_UNTIL_TAU:
        if isinstance(f, WeakUntil) and f.label.is_tau:
            return Disj(frozenset({f.right, StrongUntil(f.left, f.label, f.right)}))
    elif which is IdentityId.STRONG_UNTIL_TAU:
        if isinstance(f, StrongUntil) and f.label.is_tau:
            return Conj(frozenset({f.left, WeakUntil(f.left, f.label, f.right)}))
    elif which is IdentityId.STRONG_UNTIL_VISIBLE:
        if isinstance(f, StrongUntil) and not f.label.is_tau:
            return WeakUntil(f.left, f.label, f.right)
    elif which is IdentityId.JUST_BEFORE_VIA_STRONG_UNTIL:
        if isinstance(f, JustBefore):
            return StrongUntil(TOP, TAU_LABEL, StrongUntil(f.left, f.label, f.right))
    elif which is IdentityId.DIV_VIA_SDIV:
        if isinstance(f, Div):
            return JustBefore(TOP, TAU_LABEL, SDiv(f.arg))
    raise PreconditionError(f"identity {which.value} does not match {emit_formula(f)}")


def applicable_identities(f: Formula) -> tuple[IdentityId, ...]:
    out = []
    for which in IdentityId:
        try:
            expand_identity(f, which)
        except PreconditionError:
            continue
        out.append(which)
    return tuple(out)


# -- polarity and separation ----------------------------------------------------


class Polarity(enum.Enum):
    UPWARD = "upward"
    DOWNWARD = "downward"
    BOTH = "both"
    UNKNOWN = "unknown"


def classify_polarity(f: Formula) -> Polarity:
    """Syntactic propagation classes along tau-paths."""
    if not in_logic(f, LogicId.JB_DIV):
        raise PreconditionError("polarity is defined on the just-before logic with divergence")
    return _classify(f)


def _classify(f: Formula) -> Polarity:
    if isinstance(f, (JustBefore, Div)):
        return Polarity.DOWNWARD
    if isinstance(f, Neg):
        inner = _classify(f.arg)
        if inner is Polarity.DOWNWARD:
            return Polarity.UPWARD
        if inner is Polarity.BOTH:
            return Polarity.BOTH
        return Polarity.UNKNOWN
    if isinstance(f, Conj):
        inner = [_classify(m) for m in f.members]
        up = all(p in (Polarity.UPWARD, Polarity.BOTH) for p in inner)
        down = all(p in (Polarity.DOWNWARD, Polarity.BOTH) for p in inner)
        if up and down:
            return Polarity.BOTH
        if up:
            return Polarity.UPWARD
        if down:
            return Polarity.DOWNWARD
    return Polarity.UNKNOWN


def _nnf(f: Formula, negate: bool) -> Formula:
    if isinstance(f, Neg):
        return _nnf(f.arg, not negate)
    if isinstance(f, Conj):
        members = frozenset(_nnf(m, negate) for m in f.members)
        return Disj(members) if negate else Conj(members)
    if isinstance(f, Disj):
        members = frozenset(_nnf(m, negate) for m in f.members)
        return Conj(members) if negate else Disj(members)
    # until and divergence formulas are atoms here; arguments stay intact
    return Neg(f) if negate else f


def _dnf(f: Formula) -> list[frozenset]:
    """Clauses of literals; literals are (possibly negated) modal atoms."""
    if isinstance(f, Conj):
        clauses: list[frozenset] = [frozenset()]
        for m in f.members:
            clauses = [c | d for c in clauses for d in _dnf(m)]
        return clauses
    if isinstance(f, Disj):
        out: list[frozenset] = []
        for m in f.members:
            out.extend(_dnf(m))
        return out
    return [frozenset({f})]


def _conj_of(parts: list[Formula]) -> Formula:
    if not parts:
        return TOP
    if len(parts) == 1:
        return parts[0]
    return Conj(frozenset(parts))


def _separate_pairs(f: Formula) -> list[tuple[Formula, Formula]]:
    clauses = _dnf(_nnf(f, False))
    pairs = []
    seen = set()
    for clause in clauses:
        ups = [lit for lit in clause if isinstance(lit, Neg)]
        downs = [lit for lit in clause if not isinstance(lit, Neg)]
        pair = (_conj_of(sorted(ups, key=emit_formula)), _conj_of(sorted(downs, key=emit_formula)))
        if pair not in seen:
            seen.add(pair)
            pairs.append(pair)
    return pairs


def separate(f: Formula) -> Formula:
    """Disjunction of conjunctions of an upward and a downward formula,
    equivalent to the input."""
    if not in_logic(f, LogicId.JB_DIV):
        raise PreconditionError("separation is defined on the just-before logic with divergence")
    members = frozenset(
        Conj(frozenset({u, d})) for u, d in _separate_pairs(f)
    )
    return Disj(members)


# -- translation from the strong-until logic -------------------------------------


def translate_until_to_jb(f: Formula) -> Formula:
    """Equivalent formula without strong or weak until."""
    if not in_logic(f, LogicId.U_DIV):
        raise PreconditionError("input must be in the strong-until logic with divergence")
    return _translate(f)


def _translate(f: Formula) -> Formula:
    if isinstance(f, Neg):
        return Neg(_translate(f.arg))
    if isinstance(f, Conj):
        return Conj(frozenset(_translate(m) for m in f.members))
    if isinstance(f, Disj):
        return Disj(frozenset(_translate(m) for m in f.members))
    if isinstance(f, Div):
        return Div(_translate(f.arg))
    if isinstance(f, StrongUntil):
        left = _translate(f.left)
        right = _translate(f.right)
        pairs = _separate_pairs(left)
        pairs.sort(key=lambda p: (emit_formula(p[0]), emit_formula(p[1])))
        memo: dict[frozenset, Formula] = {}

        def until_of(indices: frozenset) -> Formula:
            if indices in memo:
                return memo[indices]
            if not indices:
                memo[indices] = BOT
                return BOT
            branches = []
            for i in sorted(indices):
                up, down = pairs[i]
                rest = until_of(indices - {i})
                branches.append(
                    Conj(
                        frozenset(
                            {
                                up,
                                Disj(
                                    frozenset(
                                        {
                                            JustBefore(down, f.label, right),
                                            JustBefore(down, TAU_LABEL, rest),
                                        }
                                    )
                                ),
                            }
                        )
                    )
                )
            out = Disj(frozenset(branches))
            memo[indices] = out
            return out

        return until_of(frozenset(range(len(pairs))))
    return f


# -- bounded enumeration -----------------------------------------------------


def enumerate_formulas(
    lts: Lts,
    depth: int = 3,
    conj_width: int = 2,
    include_sdiv: bool = True,
) -> list[tuple[Formula, frozenset[int]]]:
    """Formulas over the alphabet up to the given modal depth, one witness
    per distinct denotation on this transition system.

    The raw space is astronomically large; deduplicating by denotation per
    level keeps exactly the distinguishing power of the bounded logic.
    """
    labels = list(lts.alphabet)
    memo: dict = {}
    found: dict[frozenset[int], Formula] = {denotation(lts, TOP, memo): TOP}
    for _ in range(depth):
        fresh: list[Formula] = []

        def admit(candidate: Formula):
            den = denotation(lts, candidate, memo)
            if den not in found:
                found[den] = candidate
                fresh.append(candidate)

        known = list(found.values())
        for f in known:
            admit(Neg(f))
        if conj_width >= 2:
            for i, f in enumerate(known):
                for g in known[i + 1 :]:
                    admit(Conj(frozenset({f, g})))
        for f in known:
            for g in known:
                for lab in labels:
                    admit(JustBefore(f, lab, g))
        for f in known:
            admit(Div(f))
            if include_sdiv:
                admit(SDiv(f))
        if not fresh:
            break
    return [(f, den) for den, f in sorted(found.items(), key=lambda kv: sorted(kv[0]))]


# -- distinguishing and characteristic formulas -----------------------------------


class FormulaRefinement:
    """Refinement trace whose rounds carry enough provenance to synthesize
    block-level separating formulas.

    Rounds split on signatures over unconfined tau-closures (endpoint in the
    splitting block) and, when divergence-aware, on reachability of a state
    that diverges inside its own block.  Both choices make the recorded
    split reasons directly expressible: a step difference becomes a
    just-before formula over the previous round's block formulas and a
    divergence difference becomes a divergence formula, each exact on whole
    blocks of this transition system.
    """

    def __init__(self, lts: Lts, with_divergence: bool):
        self.lts = lts
        self.with_divergence = with_divergence
        self.rounds: list[Partition] = [Partition.single_block(lts.state_count)]
        self.steps: list[list[frozenset]] = []
        self.divergent: list[list[bool]] = []
        closures = [tau_closure(lts, s) for s in lts.states()]
        while True:
            p = self.rounds[-1]
            round_steps: list[frozenset] = []
            round_div: list[bool] = []
            div_in_block: list[frozenset[int]] = [
                divergent_states_within(lts, members) for members in p.blocks()
            ]
            for s in lts.states():
                block = p.block_of[s]
                sig = set()
                for x in closures[s]:
                    if p.block_of[x] != block:
                        continue
                    for a, d in lts.out_transitions(x):
                        if a != TAU or p.block_of[d] != block:
                            sig.add((a, p.block_of[d]))
                round_steps.append(frozenset(sig))
                round_div.append(
                    bool(closures[s] & div_in_block[block]) if with_divergence else False
                )
            self.steps.append(round_steps)
            self.divergent.append(round_div)
            keys: dict[tuple, int] = {}
            assignment = []
            for s in lts.states():
                key = (p.block_of[s], round_steps[s], round_div[s])
                assignment.append(keys.setdefault(key, len(keys)))
            nxt = Partition.from_block_of(assignment)
            if nxt.n_blocks == p.n_blocks:
                break
            self.rounds.append(nxt)
        self._g_memo: dict[tuple[int, int, int], Formula] = {}
        self._f_memo: dict[tuple[int, int], Formula] = {}

    @property
    def final(self) -> Partition:
        return self.rounds[-1]

    def block_formula(self, j: int, block: int) -> Formula:
        """Formula valid exactly on the given block of round ``j``."""
        key = (j, block)
        if key not in self._f_memo:
            parts = frozenset(
                self.separator(j, block, other)
                for other in range(self.rounds[j].n_blocks)
                if other != block
            )
            self._f_memo[key] = Conj(parts)
        return self._f_memo[key]

    def separator(self, j: int, bx: int, by: int) -> Formula:
        """Formula valid on all of block ``bx`` and on none of ``by`` (round j)."""
        if bx == by:
            raise ValueError("blocks must differ")
        key = (j, bx, by)
        if key in self._g_memo:
            return self._g_memo[key]
        p = self.rounds[j]
        prev = self.rounds[j - 1]
        x = min(s for s in self.lts.states() if p.block_of[s] == bx)
        y = min(s for s in self.lts.states() if p.block_of[s] == by)
        if prev.block_of[x] != prev.block_of[y]:
            out = self.separator(j - 1, prev.block_of[x], prev.block_of[y])
        else:
            parent = prev.block_of[x]
            sx, sy = self.steps[j - 1][x], self.steps[j - 1][y]
            if sx != sy:
                a, d = min(sx ^ sy)
                core = JustBefore(
                    self.block_formula(j - 1, parent),
                    self.lts.alphabet[a],
                    self.block_formula(j - 1, d),
                )
                out = core if (a, d) in sx else Neg(core)
            else:
                base = Div(self.block_formula(j - 1, parent))
                out = base if self.divergent[j - 1][x] else Neg(base)
        self._g_memo[key] = out
        return out


def distinguishing_formula(lts: Lts, s: int, t: int, with_divergence: bool = True) -> Formula:
    """A formula valid in ``s`` and not in ``t``; fails when the states are
    equivalent under the selected notion."""
    engine = FormulaRefinement(lts, with_divergence)
    if engine.final.same_block(s, t):
        raise PreconditionError(f"states {s} and {t} are equivalent")
    for j in range(1, len(engine.rounds)):
        p = engine.rounds[j]
        if p.block_of[s] != p.block_of[t]:
            return engine.separator(j, p.block_of[s], p.block_of[t])
    raise AssertionError("unreachable: states separated by no round")


def characteristic_formula(lts: Lts, s: int, with_divergence: bool = True) -> Formula:
    """A formula valid in exactly the states equivalent to ``s``."""
    engine = FormulaRefinement(lts, with_divergence)
    return engine.block_formula(len(engine.rounds) - 1, engine.final.block_of[s])
