#!/usr/bin/env python3
"""Search small systems for the two non-compositionality phenomena and emit
the found instances in fixture format (system as .aut text, relations as
pair-per-line text) so they can be frozen as regression inputs.
"""

import argparse
import os
import sys

from bbdiv.generators import RunConfig
from bbdiv.lts import emit_aut
from bbdiv.relations import ConditionId, emit_relation
from bbdiv.search import SearchExhausted, search_composition_counterexamples


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=int(os.environ.get("BBDIV_SEED", "0")))
    parser.add_argument("--max-states", type=int, default=6)
    parser.add_argument("--out-dir", default=None, help="also write fixture files here")
    args = parser.parse_args(argv)
    config = RunConfig(seed=args.seed, max_states=args.max_states)
    try:
        witnesses = search_composition_counterexamples(config)
    except SearchExhausted as err:
        print(f"search exhausted: {err}", file=sys.stderr)
        return 1
    names = {ConditionId.D: "comp_d", ConditionId.D1: "comp_d1"}
    for cond, witness in witnesses.items():
        print(f"== composition of two relations passing T and {cond.value} "
              f"fails {cond.value} ==")
        sys.stdout.write(emit_aut(witness.lts))
        print("r1:")
        sys.stdout.write(emit_relation(witness.r1))
        print("r2:")
        sys.stdout.write(emit_relation(witness.r2))
        if args.out_dir:
            stem = os.path.join(args.out_dir, names[cond])
            with open(stem + ".aut", "w", encoding="utf-8") as f:
                f.write(emit_aut(witness.lts))
            with open(stem + "_r1.rel", "w", encoding="utf-8") as f:
                f.write(emit_relation(witness.r1))
            with open(stem + "_r2.rel", "w", encoding="utf-8") as f:
                f.write(emit_relation(witness.r2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
