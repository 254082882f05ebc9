"""Regenerate the small lossless fixture corpus under tests/fixtures/."""

from pathlib import Path

import numpy as np

from ldp_slicing.color import PixelImage
from ldp_slicing.imageio import write_image
from ldp_slicing.synthetic import natural_image

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    write_image(natural_image(112, seed=0), OUT / "face_like_112.png")
    write_image(natural_image(112, seed=3), OUT / "scene_112.ppm")
    write_image(natural_image(64, seed=1, color=False), OUT / "gray_64.pgm")
    odd = natural_image(40, seed=2).samples[:33, :17]
    write_image(PixelImage(odd, "RGB"), OUT / "odd_33x17.png")
    # 2x2 P6 written by hand so the reader is checked against known bytes.
    pixels = bytes([255, 0, 0, 0, 255, 0, 0, 0, 255, 10, 20, 30])
    (OUT / "tiny_2x2.ppm").write_bytes(b"P6\n2 2\n255\n" + pixels)
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
