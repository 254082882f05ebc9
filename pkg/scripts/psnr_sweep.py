#!/usr/bin/env python3
"""PSNR of privatized output across a budget sweep, with and without LL pruning.

Prints one row per budget: mean PSNR and standard error over seeds, against
both the noise-free pipeline output and the original image.
"""

import argparse

from ldp_slicing.cli import SWEEP_EPSILONS
from ldp_slicing.rng import RandomnessSpec
from ldp_slicing.synthetic import natural_image
from ldp_slicing.verify import monotone_psnr_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=112)
    ap.add_argument("--image-seed", type=int, default=0)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0, help="master seed for the mechanism")
    ap.add_argument("--grayscale", action="store_true")
    args = ap.parse_args()

    img = natural_image(args.size, seed=args.image_seed, color=not args.grayscale)
    rand = RandomnessSpec(args.seed)
    print(f"{'prune':>5} {'reference':>16} " + " ".join(f"{e:>12g}" for e in SWEEP_EPSILONS))
    for prune in (True, False):
        for ref in ("mechanism_input", "original"):
            sweep = monotone_psnr_sweep(img, SWEEP_EPSILONS, args.seeds, prune=prune, rand=rand, reference=ref)
            cells = " ".join(f"{m:6.2f}+-{s:4.2f}" for m, s in zip(sweep.means, sweep.stderrs))
            print(f"{str(prune):>5} {ref:>16} {cells}")


if __name__ == "__main__":
    main()
