"""Command-line interface: ``privatize``, ``certify`` and ``report``.

Exit status: 0 success, 1 a check failed, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis
from .budget import WeightTable, allocate
from .color import to_grayscale
from .errors import CertificationFailure, InvalidInputError
from .imageio import read_image, report_to_dict, write_image, write_report
from .mechanism import privatize
from .rng import RandomnessSpec
from .synthetic import natural_image
from .verify import certify_pixel_pipeline, monotone_psnr_sweep

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2

# Block-level DCT baseline: 8x8 blocks, 3 channels, DC removed, 0.5 per coefficient.
DCT_BASELINE = dict(per_coeff_eps=0.5, block_w=8, block_h=8, channels=3, removed_coeffs=1)
SWEEP_EPSILONS = (1.0, 2.4, 5.2, 12.0, 20.0, 32.0, 58.0)


@dataclass
class RunConfig:
    epsilon_total: float = 20.0
    weights: tuple[float, float, float] = (4.0, 1.0, 1.0)
    grayscale: bool = False
    prune: bool = True
    seed: int | None = None
    inputs: list[Path] = field(default_factory=list)
    output: Path = Path(".")
    report: Path | None = None
    trials: int = 1_000_000
    confidence: float = 0.999
    workers: int = 1
    alpha: str = "reject"
    miscalibrate: dict = field(default_factory=dict)
    sweep_seeds: int = 5

    def __post_init__(self):
        if not self.epsilon_total >= 0 or not math.isfinite(self.epsilon_total):
            raise InvalidInputError(f"epsilon must be finite and >= 0, got {self.epsilon_total}")
        if len(self.weights) != 3 or not all(w > 0 for w in self.weights):
            raise InvalidInputError(f"weights must be three positive numbers, got {self.weights}")

    def weight_table(self, channels) -> WeightTable:
        return WeightTable.for_channels(channels, self.weights)

    def randomness(self) -> RandomnessSpec:
        return RandomnessSpec(self.seed) if self.seed is not None else RandomnessSpec.fresh()


def _parse_weights(text: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"weights must look like 4:1:1, got {text!r}") from None
    if len(parts) != 3 or not all(p > 0 for p in parts):
        raise argparse.ArgumentTypeError(f"weights must be three positive numbers Y:Cb:Cr, got {text!r}")
    return parts


def _parse_miscalibration(text: str):
    # CHANNEL:BIT:P_KEEP, e.g. Y:8:0.9
    try:
        c, b, p = text.split(":")
        return (c, int(b)), float(p)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected CHANNEL:BIT:P_KEEP, got {text!r}") from None


def _nonneg_float(text: str) -> float:
    v = float(text)
    if not v >= 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be a finite number >= 0, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ldp-slicing", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def budget_flags(p):
        p.add_argument("--epsilon", type=_nonneg_float, default=20.0, help="per-pixel budget in nats (default 20)")
        p.add_argument("--weights", type=_parse_weights, default=(4.0, 1.0, 1.0), metavar="Y:Cb:Cr")
        p.add_argument("--grayscale", action="store_true", help="use a single luma channel")

    p = sub.add_parser("privatize", help="privatise images")
    budget_flags(p)
    p.add_argument("inputs", nargs="+", type=Path)
    p.add_argument("-o", "--output", type=Path, default=Path("."))
    p.add_argument("--seed", type=_seed, default=None, help="master seed (default: fresh random)")
    p.add_argument("--no-ll-prune", dest="prune", action="store_false")
    p.add_argument("--report", type=Path, default=None, help="single report file instead of one per image")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--alpha", choices=("reject", "strip"), default="reject")

    p = sub.add_parser("certify", help="statistically certify the mechanism")
    budget_flags(p)
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--confidence", type=float, default=0.999)
    p.add_argument("--seed", type=_seed, default=None)
    p.add_argument("--no-ll-prune", dest="prune", action="store_false")
    p.add_argument("--sweep-seeds", type=int, default=5)
    p.add_argument("--report", type=Path, default=None, help="write the certification JSON here")
    p.add_argument(
        "--inject-miscalibration",
        type=_parse_miscalibration,
        action="append",
        default=[],
        metavar="CHANNEL:BIT:P_KEEP",
        help=argparse.SUPPRESS,
    )

    p = sub.add_parser("report", help="print the allocation and privacy bounds")
    budget_flags(p)
    p.add_argument("--json", action="store_true", help="print a report document instead of a table")
    return parser


def config_from_args(args) -> RunConfig:
    return RunConfig(
        epsilon_total=args.epsilon,
        weights=args.weights,
        grayscale=args.grayscale,
        prune=getattr(args, "prune", True),
        seed=getattr(args, "seed", None),
        inputs=list(getattr(args, "inputs", [])),
        output=getattr(args, "output", Path(".")),
        report=getattr(args, "report", None),
        trials=getattr(args, "trials", 1_000_000),
        confidence=getattr(args, "confidence", 0.999),
        workers=getattr(args, "workers", 1),
        alpha=getattr(args, "alpha", "reject"),
        miscalibrate=dict(getattr(args, "inject_miscalibration", [])),
        sweep_seeds=getattr(args, "sweep_seeds", 5),
    )


def _privatize_one(path: Path, cfg: RunConfig, rand: RandomnessSpec):
    img = read_image(path, alpha=cfg.alpha)
    if cfg.grayscale:
        img = to_grayscale(img)
    alloc = allocate(cfg.epsilon_total, cfg.weight_table(img.channel_names()))
    # One stream per file name: identical images in a batch get independent noise.
    out, report = privatize(img, alloc, rand.derive(path.name), prune=cfg.prune)
    dest = cfg.output / path.name
    if cfg.grayscale and dest.suffix.lower() == ".ppm":
        dest = dest.with_suffix(".pgm")
    write_image(out, dest)
    doc = report_to_dict(report)
    doc["seed"] = rand.seed
    return dest, doc


def cmd_privatize(cfg: RunConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    rand = cfg.randomness()
    cfg.output.mkdir(parents=True, exist_ok=True)

    def job(path):
        try:
            return path, _privatize_one(path, cfg, rand), None
        except (OSError, InvalidInputError) as exc:
            return path, None, exc

    with ThreadPoolExecutor(max(1, cfg.workers)) as pool:
        results = list(pool.map(job, cfg.inputs))

    status = EXIT_OK
    docs = {}
    for path, res, exc in results:
        if exc is not None:
            print(f"error: {path}: {exc}", file=sys.stderr)
            status = EXIT_USAGE
            continue
        dest, doc = res
        docs[path.name] = doc
        if cfg.report is None:
            write_report(doc, dest.with_name(dest.stem + ".report.json"))
        psnr = doc["psnr_db"]
        psnr_txt = psnr if isinstance(psnr, str) else f"{psnr:.2f}"
        print(f"{path} -> {dest}  eps={doc['epsilon_total']:g}  psnr={psnr_txt} dB", file=out)
    if cfg.report is not None and docs:
        single = len(cfg.inputs) == 1
        payload = next(iter(docs.values())) if single else docs
        cfg.report.parent.mkdir(parents=True, exist_ok=True)
        cfg.report.write_text(json.dumps(payload, indent=2) + "\n")
    print(f"seed={rand.seed}", file=out)
    return status


def _tv_spot_checks(rng: np.random.Generator) -> tuple[bool, str]:
    worst = -math.inf
    for d in (1, 2, 3, 4):
        for _ in range(5):
            eps = rng.uniform(0, 3, d)
            bound = analysis.tv_bound(eps.sum())
            for x in range(2**d):
                for y in range(2**d):
                    worst = max(worst, analysis.exact_tv_reduced(eps, x, y) - bound)
    tight = abs(analysis.exact_tv_reduced([math.log(3)], 0, 1) - 0.5) < 1e-12
    return worst <= 1e-12 and tight, f"max(TV - bound) = {worst:.3e}, single-bit tight = {tight}"


def cmd_certify(cfg: RunConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    rand = cfg.randomness()
    channels = ("GRAY",) if cfg.grayscale else ("Y", "Cb", "Cr")
    alloc = allocate(cfg.epsilon_total, cfg.weight_table(channels))
    checks = []

    try:
        planes = certify_pixel_pipeline(
            alloc, cfg.trials, rand.derive("certify"), cfg.confidence, keep_overrides=cfg.miscalibrate
        )
        failed = []
    except CertificationFailure as exc:
        planes, failed = exc.results, exc.failed
    detail = "all planes pass" if not failed else "failed planes: " + ", ".join(f"{r.channel}/b{r.bit}" for r in failed)
    checks.append(("per-bit LDP", not failed, detail))

    ok, detail = _tv_spot_checks(np.random.default_rng(rand.derive("tv").seed))
    checks.append(("TV bound", ok, detail))

    img = natural_image(112, color=not cfg.grayscale)
    sweep = monotone_psnr_sweep(
        img,
        SWEEP_EPSILONS,
        cfg.sweep_seeds,
        weights=alloc.weights,
        prune=cfg.prune,
        rand=rand.derive("sweep"),
    )
    means = ", ".join(f"{m:.2f}" for m in sweep.means)
    checks.append(("PSNR monotone", sweep.monotone, f"mean PSNR [{means}] dB"))

    adv = analysis.advantage_bound(alloc.composed_epsilon)
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}", file=out)
    print(f"certified per-pixel epsilon = {alloc.composed_epsilon:g}, advantage_bound = {adv:.6g}", file=out)
    print(f"seed={rand.seed}", file=out)

    if cfg.report is not None:
        doc = {
            "epsilon_total": alloc.composed_epsilon,
            "advantage_bound": adv,
            "seed": rand.seed,
            "passed": all(ok for _, ok, _ in checks),
            "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in checks],
            "planes": [r.to_dict() for r in planes],
        }
        cfg.report.parent.mkdir(parents=True, exist_ok=True)
        cfg.report.write_text(json.dumps(doc, indent=2) + "\n")

    failing = [n for n, ok, _ in checks if not ok]
    if failing:
        print(f"certification failed: {', '.join(failing)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_report(cfg: RunConfig, as_json: bool = False, out=None) -> int:
    out = sys.stdout if out is None else out
    channels = ("GRAY",) if cfg.grayscale else ("Y", "Cb", "Cr")
    alloc = allocate(cfg.epsilon_total, cfg.weight_table(channels))
    report = analysis.privacy_report(alloc)
    block = analysis.blocklevel_to_pixel_epsilon(**DCT_BASELINE)
    if as_json:
        print(json.dumps(report_to_dict(report), indent=2), file=out)
        return EXIT_OK

    print(f"epsilon_total = {report.epsilon_total:g}  weights = {':'.join(f'{w:g}' for w in alloc.weights.channel_weights)}", file=out)
    print("channel  " + "  ".join(f"b{b:<7d}" for b in range(8, 0, -1)), file=out)
    for i, c in enumerate(alloc.channels):
        row = "  ".join(f"{alloc.epsilons[i, b - 1]:<8.4f}" for b in range(8, 0, -1))
        print(f"{c:<7}  {row}", file=out)
    print(f"tv_bound        = {report.tv_bound:.10g}", file=out)
    print(f"advantage_bound = {report.advantage_bound:.10g}", file=out)
    print(f"block-level DCT baseline per-pixel epsilon = {block:g}", file=out)
    if report.epsilon_total > 0:
        ratio = analysis.strictness_ratio(block, report.epsilon_total)
        print(f"strictness ratio vs baseline = {ratio:.4g}x", file=out)
    else:
        print("strictness ratio vs baseline = n/a (epsilon_total = 0)", file=out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "privatize":
            return cmd_privatize(cfg)
        if args.command == "certify":
            return cmd_certify(cfg)
        return cmd_report(cfg, as_json=args.json)
    except (InvalidInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
