#!/usr/bin/env python3
"""Time end-to-end privatization of one image, single image and batched."""

import argparse
import statistics
import time

from ldp_slicing.budget import allocate
from ldp_slicing.mechanism import privatize
from ldp_slicing.rng import RandomnessSpec
from ldp_slicing.synthetic import natural_image


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=112)
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--no-ll-prune", dest="prune", action="store_false")
    args = ap.parse_args()

    img = natural_image(args.size)
    alloc = allocate(20.0)
    rand = RandomnessSpec(0)
    privatize(img, alloc, rand, prune=args.prune, workers=args.workers)
    times = []
    for _ in range(args.runs):
        t0 = time.perf_counter()
        privatize(img, alloc, rand, prune=args.prune, workers=args.workers)
        times.append(1000 * (time.perf_counter() - t0))
    times.sort()
    print(f"{args.size}x{args.size} RGB, prune={args.prune}, workers={args.workers}, runs={args.runs}")
    print(f"mean {statistics.mean(times):.2f} ms  median {statistics.median(times):.2f} ms  "
          f"p95 {times[int(0.95 * len(times)) - 1]:.2f} ms  min {times[0]:.2f} ms")


if __name__ == "__main__":
    main()
