"""Lossless image I/O (PNG, binary PPM/PGM) and the JSON report format."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from PIL import Image

from .analysis import PrivacyReport
from .color import PixelImage
from .errors import InvalidInputError

REPORT_VERSION = 1
REPORT_KEYS = (
    "version",
    "epsilon_total",
    "weights",
    "allocation",
    "tv_bound",
    "advantage_bound",
    "psnr_db",
    "prune",
    "seed",
)
LOSSLESS_FORMATS = {"PNG", "PPM"}
_SUFFIX_FORMAT = {".png": "PNG", ".ppm": "PPM", ".pgm": "PPM", ".pnm": "PPM"}


def read_image(path, alpha: str = "reject") -> PixelImage:
    """Load an 8-bit PNG, PPM (P6) or PGM (P5) image.

    Args:
        alpha: ``"reject"`` raises on images with an alpha channel,
            ``"strip"`` drops it.

    Raises:
        InvalidInputError: lossy or unsupported formats, 16-bit samples,
            or alpha when ``alpha="reject"``.
    """
    if alpha not in ("reject", "strip"):
        raise InvalidInputError(f"alpha must be 'reject' or 'strip', got {alpha!r}")
    with Image.open(path) as im:
        if im.format not in LOSSLESS_FORMATS:
            raise InvalidInputError(
                f"{path}: {im.format} is not accepted; only lossless PNG/PPM/PGM input is "
                "supported because lossy re-encoding would alter the released bits"
            )
        mode = im.mode
        if mode.startswith("I") or mode == "F":
            raise InvalidInputError(f"{path}: only 8-bit samples are supported (mode {mode})")
        if mode == "P":
            im = im.convert("RGBA" if "transparency" in im.info else "RGB")
        elif mode == "1":
            im = im.convert("L")
        elif mode not in ("L", "LA", "RGB", "RGBA"):
            raise InvalidInputError(f"{path}: unsupported image mode {mode}")
        if im.mode in ("LA", "RGBA"):
            if alpha == "reject":
                raise InvalidInputError(f"{path}: image has an alpha channel (use alpha='strip')")
            im = im.convert(im.mode[:-1])
        arr = np.asarray(im, dtype=np.uint8)
    return PixelImage(arr, "GRAY" if arr.ndim == 2 else "RGB")


def write_image(img: PixelImage, path) -> None:
    """Write losslessly; the format follows the file suffix (.png, .ppm, .pgm)."""
    path = Path(path)
    fmt = _SUFFIX_FORMAT.get(path.suffix.lower())
    if fmt is None:
        raise InvalidInputError(f"{path}: unsupported output suffix, use .png, .ppm or .pgm")
    if img.colorspace == "YCbCr":
        raise InvalidInputError("convert YCbCr images to RGB before writing")
    if path.suffix.lower() == ".pgm" and img.channels != 1:
        raise InvalidInputError("PGM output needs a single-channel image")
    if path.suffix.lower() == ".ppm" and img.channels != 3:
        raise InvalidInputError("PPM output needs a 3-channel image")
    data = img.samples[:, :, 0] if img.channels == 1 else img.samples
    Image.fromarray(np.ascontiguousarray(data), "L" if img.channels == 1 else "RGB").save(path, fmt)


def _num(x):
    if x is None:
        return None
    return "inf" if math.isinf(x) else float(x)


def report_to_dict(report: PrivacyReport) -> dict:
    probs = report.p_keep
    alloc = report.allocation
    return {
        "version": REPORT_VERSION,
        "epsilon_total": report.epsilon_total,
        "weights": alloc.weights.to_dict(),
        "allocation": [
            {"channel": c, "bit": b, "epsilon": eps, "p_keep": float(probs[alloc.channels.index(c), b - 1])}
            for c, b, eps in alloc.planes()
        ],
        "tv_bound": report.tv_bound,
        "advantage_bound": report.advantage_bound,
        "psnr_db": _num(report.psnr_db),
        "prune": report.prune,
        "seed": report.seed,
    }


def write_report(report: PrivacyReport | dict, path) -> None:
    doc = report if isinstance(report, dict) else report_to_dict(report)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def read_report(path) -> dict:
    """Load and validate a report document.

    Raises:
        InvalidInputError: on unknown or missing keys, wrong version, or an
            allocation that does not sum to ``epsilon_total``.
    """
    doc = json.loads(Path(path).read_text())
    return validate_report(doc)


def validate_report(doc: dict) -> dict:
    if not isinstance(doc, dict):
        raise InvalidInputError("report must be a JSON object")
    unknown = set(doc) - set(REPORT_KEYS)
    if unknown:
        raise InvalidInputError(f"unknown report keys: {sorted(unknown)}")
    missing = set(REPORT_KEYS) - set(doc)
    if missing:
        raise InvalidInputError(f"missing report keys: {sorted(missing)}")
    if doc["version"] != REPORT_VERSION:
        raise InvalidInputError(f"unsupported report version {doc['version']}")
    for entry in doc["allocation"]:
        if set(entry) != {"channel", "bit", "epsilon", "p_keep"}:
            raise InvalidInputError(f"malformed allocation entry: {entry}")
    total = math.fsum(e["epsilon"] for e in doc["allocation"])
    if abs(total - doc["epsilon_total"]) > 1e-9:
        raise InvalidInputError(f"allocation sums to {total}, report claims {doc['epsilon_total']}")
    psnr_db = doc["psnr_db"]
    if not (psnr_db is None or psnr_db == "inf" or isinstance(psnr_db, (int, float))):
        raise InvalidInputError(f"psnr_db must be a number or 'inf', got {psnr_db!r}")
    return doc
