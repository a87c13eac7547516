"""Command-line front end.

Exit codes: ``check`` returns 0 for equivalent, 1 for inequivalent, 2 for
user errors and 3 for internal cross-check failures; ``eval`` returns 0/1
for the truth value.  Everything printed is deterministic for a fixed seed,
which defaults to the BBDIV_SEED environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

from . import modal, relations
from .colouring import Partition, refine_to_coarsest
from .crosscheck import run_crosscheck
from .generators import RunConfig, random_lts
from .lts import (
    DEFAULT_LASSO_BOUND,
    AutParseError,
    LassoBoundExceeded,
    Lts,
    emit_aut,
    parse_aut,
    quotient,
)
from .relations import (
    ConditionId,
    PreconditionError,
    RelationParseError,
    check_condition,
    has_stuttering_property,
    symmetric_closure,
)

_CONDITION_ROWS = (
    ConditionId.T,
    ConditionId.D,
    ConditionId.D0,
    ConditionId.D1,
    ConditionId.D2,
    ConditionId.D3,
    ConditionId.D4,
    ConditionId.GKPP,
    ConditionId.INT,
)


class CliError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


def _load_lts(path: str) -> Lts:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return parse_aut(handle.read())
    except OSError as err:
        raise CliError(f"{path}: {err.strerror}")
    except AutParseError as err:
        raise CliError(f"{path}: {err}")


def _state(lts: Lts, raw: str) -> int:
    try:
        s = int(raw)
    except ValueError:
        raise CliError(f"not a state index: {raw!r}")
    if not 0 <= s < lts.state_count:
        raise CliError(f"state {s} out of range (0..{lts.state_count - 1})")
    return s


def _default_seed() -> int:
    return int(os.environ.get("BBDIV_SEED", "0"))


def _format_partition(p: Partition) -> str:
    return "\n".join(" ".join(str(s) for s in block) for block in p.blocks())


@dataclass(frozen=True)
class Verdict:
    """Decision plus a certificate that re-validates through the public
    checkers, and the record of which engines agreed on it."""

    equivalent: bool
    certificate: object  # Partition when equivalent, Formula otherwise
    agreement: str


def decide_pair(lts: Lts, s: int, t: int, with_divergence: bool, bound: int) -> Verdict:
    refined = refine_to_coarsest(lts, with_divergence)
    within_bound = lts.state_count <= bound
    if not within_bound:
        agreement = "refinement only (lasso bound exceeded)"
    else:
        if with_divergence:
            fixpoint = relations.compute_bbd(lts, bound)
        else:
            fixpoint = relations.compute_bb(lts)
        if fixpoint != refined:
            raise CliError("internal error: decision engines disagree", code=3)
        agreement = "refinement and fixpoint agree"
    if refined.same_block(s, t):
        if within_bound and with_divergence:
            reports = relations.verify_equivalence_certificate(lts, refined, bound)
            if not all(rep.holds for rep in reports.values()):
                raise CliError("internal error: witness failed re-validation", code=3)
        return Verdict(True, refined, agreement)
    formula = modal.distinguishing_formula(lts, s, t, with_divergence)
    if not (modal.eval_formula(lts, s, formula) and not modal.eval_formula(lts, t, formula)):
        raise CliError("internal error: certificate failed re-validation", code=3)
    return Verdict(False, formula, agreement)


def cmd_check(args) -> int:
    lts = _load_lts(args.file)
    s, t = _state(lts, args.s), _state(lts, args.t)
    verdict = decide_pair(lts, s, t, not args.plain, args.lasso_bound)
    print(f"engines: {verdict.agreement}")
    if verdict.equivalent:
        print("equivalent")
        print("witness partition:")
        print(_format_partition(verdict.certificate))
        return 0
    print("inequivalent")
    print(f"distinguishing formula: {modal.emit_formula(verdict.certificate)}")
    return 1


def cmd_minimize(args) -> int:
    lts = _load_lts(args.file)
    partition = refine_to_coarsest(lts, not args.plain)
    text = emit_aut(quotient(lts, partition))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_partition(args) -> int:
    lts = _load_lts(args.file)
    print(_format_partition(refine_to_coarsest(lts, not args.plain)))
    return 0


def cmd_conditions(args) -> int:
    lts = _load_lts(args.file)
    try:
        with open(args.rel, "r", encoding="utf-8") as handle:
            rel = relations.parse_relation(handle.read(), lts)
    except OSError as err:
        raise CliError(f"{args.rel}: {err.strerror}")
    except RelationParseError as err:
        raise CliError(f"{args.rel}: {err}")
    if args.symmetrize:
        rel = symmetric_closure(rel)
    bounded = lts.state_count <= args.lasso_bound
    for cond in _CONDITION_ROWS:
        if cond is not ConditionId.T and not bounded:
            print(f"{cond.value}: skipped(bound)")
            continue
        report = check_condition(lts, rel, cond, args.lasso_bound)
        if report.holds:
            print(f"{cond.value}: holds")
        else:
            ce = report.counterexample
            where = f"pair ({ce.pair[0]},{ce.pair[1]})"
            if ce.move is not None:
                s0, a, s1 = ce.move
                where += f", move {s0} -{lts.label_name(a)}-> {s1}"
            if ce.lasso_full is not None:
                where += f", divergence through {{{','.join(map(str, sorted(ce.lasso_full)))}}}"
            print(f"{cond.value}: fails ({where}; {ce.reason})")
    print(f"stuttering-property: {'holds' if has_stuttering_property(lts, rel) else 'fails'}")
    return 0


def cmd_eval(args) -> int:
    lts = _load_lts(args.file)
    s = _state(lts, args.state)
    try:
        formula = modal.parse_formula(args.formula)
    except modal.FormulaSyntaxError as err:
        raise CliError(f"formula: {err}")
    value = modal.eval_formula(lts, s, formula)
    print("true" if value else "false")
    return 0 if value else 1


def cmd_distinguish(args) -> int:
    lts = _load_lts(args.file)
    s, t = _state(lts, args.s), _state(lts, args.t)
    try:
        formula = modal.distinguishing_formula(lts, s, t, not args.plain)
    except PreconditionError as err:
        raise CliError(str(err))
    print(modal.emit_formula(formula))
    return 0


def cmd_crosscheck(args) -> int:
    config = RunConfig(seed=args.seed, max_states=args.max_states)
    ltss: list[tuple[str, Lts]] = [(path, _load_lts(path)) for path in args.files]
    named = len(ltss)
    rng = config.rng()
    for i in range(args.random):
        ltss.append((f"random-{i}", random_lts(rng, config.max_states, config.tau_density)))
    reports = run_crosscheck(ltss, config)
    ok = 0
    for index, ((name, lts), report) in enumerate(zip(ltss, reports)):
        if report.ok:
            ok += 1
            if index < named:
                blocks = " | ".join(
                    " ".join(map(str, block))
                    for block in refine_to_coarsest(lts, True).blocks()
                )
                print(f"{name}: OK; partition: {blocks}")
        else:
            for failure in report.failures:
                print(f"{name}: FAIL: {failure}")
            out = f"crosscheck_failure_{os.path.basename(name)}.aut"
            with open(out, "w", encoding="utf-8") as handle:
                handle.write(emit_aut(lts))
            print(f"{name}: offending system written to {out}")
    print(f"{ok}/{len(ltss)} OK")
    return 0 if ok == len(ltss) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bbdiv",
        description="decide branching bisimilarity with explicit divergence",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="decide equivalence of two states")
    check.add_argument("file")
    check.add_argument("s")
    check.add_argument("t")
    check.add_argument("--plain", action="store_true", help="ignore divergence")
    check.add_argument("--lasso-bound", type=int, default=DEFAULT_LASSO_BOUND)
    check.set_defaults(run=cmd_check)

    minimize = sub.add_parser("minimize", help="emit the quotient system")
    minimize.add_argument("file")
    minimize.add_argument("--plain", action="store_true")
    minimize.add_argument("-o", dest="output")
    minimize.set_defaults(run=cmd_minimize)

    partition = sub.add_parser("partition", help="print the equivalence classes")
    partition.add_argument("file")
    partition.add_argument("--plain", action="store_true")
    partition.set_defaults(run=cmd_partition)

    conditions = sub.add_parser("conditions", help="check a relation against every condition")
    conditions.add_argument("file")
    conditions.add_argument("rel")
    conditions.add_argument("--symmetrize", action="store_true")
    conditions.add_argument("--lasso-bound", type=int, default=DEFAULT_LASSO_BOUND)
    conditions.set_defaults(run=cmd_conditions)

    evaluate = sub.add_parser("eval", help="evaluate a formula in a state")
    evaluate.add_argument("file")
    evaluate.add_argument("state")
    evaluate.add_argument("formula")
    evaluate.set_defaults(run=cmd_eval)

    distinguish = sub.add_parser("distinguish", help="synthesize a distinguishing formula")
    distinguish.add_argument("file")
    distinguish.add_argument("s")
    distinguish.add_argument("t")
    distinguish.add_argument("--plain", action="store_true")
    distinguish.set_defaults(run=cmd_distinguish)

    crosscheck = sub.add_parser("crosscheck", help="cross-validate the decision engines")
    crosscheck.add_argument("files", nargs="*")
    crosscheck.add_argument("--random", type=int, default=0)
    crosscheck.add_argument("--seed", type=int, default=_default_seed())
    crosscheck.add_argument("--max-states", type=int, default=6)
    crosscheck.set_defaults(run=cmd_crosscheck)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except CliError as err:
        print(f"bbdiv: {err}", file=sys.stderr)
        return err.code
    except LassoBoundExceeded as err:
        print(f"bbdiv: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
