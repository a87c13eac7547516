#!/usr/bin/env python3
"""Time the signature-refinement engine on a seeded random system and check
that the quotient re-minimizes to an isomorphic system."""

import argparse
import random
import sys
import time

from bbdiv.colouring import refine_to_coarsest
from bbdiv.generators import random_lts_exact
from bbdiv.lts import quotient


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--states", type=int, default=10_000)
    parser.add_argument("--transitions", type=int, default=40_000)
    parser.add_argument("--tau-density", type=float, default=0.4)
    parser.add_argument("--seed", type=int, default=9009)
    args = parser.parse_args(argv)

    rng = random.Random(args.seed)
    lts = random_lts_exact(rng, args.states, args.transitions, args.tau_density)
    start = time.time()
    partition = refine_to_coarsest(lts, True)
    elapsed = time.time() - start
    print(f"refined {args.states} states / {args.transitions} transitions "
          f"to {partition.n_blocks} blocks in {elapsed:.2f}s")
    minimized = quotient(lts, partition)
    again = refine_to_coarsest(minimized, True)
    stable = (
        again.n_blocks == minimized.state_count
        and quotient(minimized, again).transition_names() == minimized.transition_names()
    )
    print(f"quotient: {minimized.state_count} states, "
          f"{len(minimized.transitions)} transitions; re-minimizes to itself: {stable}")
    return 0 if stable else 1


if __name__ == "__main__":
    sys.exit(main())
