from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from ldp_slicing.color import PixelImage, rgb_to_ycbcr, round_half_away, to_grayscale, ycbcr_to_rgb
from ldp_slicing.errors import InvalidInputError


def pixel(rgb, space="RGB"):
    return PixelImage(np.array([[rgb]], dtype=np.uint8), space)


def test_pixel_image_invariants():
    with pytest.raises(InvalidInputError):
        PixelImage(np.zeros((2, 2, 3), np.uint8), "GRAY")
    with pytest.raises(InvalidInputError):
        PixelImage(np.zeros((2, 2, 1), np.uint8), "RGB")
    with pytest.raises(InvalidInputError):
        PixelImage(np.full((2, 2, 3), 256), "RGB")
    with pytest.raises(InvalidInputError):
        PixelImage(np.zeros((0, 2, 3), np.uint8), "RGB")
    img = PixelImage(np.zeros((3, 5), np.int64), "GRAY")
    assert img.shape == (3, 5, 1) and img.samples.dtype == np.uint8


@pytest.mark.parametrize(
    "rgb, ycc",
    [((128, 128, 128), (128, 128, 128)), ((0, 0, 0), (0, 128, 128))],
)
def test_achromatic_fixed_points(rgb, ycc):
    assert tuple(rgb_to_ycbcr(pixel(rgb)).samples.ravel()) == ycc
    assert tuple(ycbcr_to_rgb(pixel(ycc, "YCbCr")).samples.ravel()) == rgb


def test_pure_red_golden():
    # Exact rational evaluation of the JFIF matrix, then round half up and clamp.
    r = Fraction(255)
    y = Fraction(299, 1000) * r
    cb = 128 - Fraction(168736, 1000000) * r
    cr = 128 + Fraction(1, 2) * r
    expected = tuple(min(255, int(v + Fraction(1, 2))) for v in (y, cb, cr))
    assert expected == (76, 85, 255)
    got = tuple(int(v) for v in rgb_to_ycbcr(pixel((255, 0, 0))).samples.ravel())
    assert got == expected
    # Pillow's integer JPEG conversion truncates; it agrees to within one level.
    ref = np.asarray(Image.fromarray(np.array([[[255, 0, 0]]], np.uint8)).convert("YCbCr")).ravel()
    assert np.abs(np.array(got) - ref.astype(int)).max() <= 1


def test_lattice_roundtrip_within_one():
    v = np.minimum(np.arange(0, 257, 16), 255)
    grid = np.stack(np.meshgrid(v, v, v, indexing="ij"), -1).reshape(17, 289, 3).astype(np.uint8)
    back = ycbcr_to_rgb(rgb_to_ycbcr(PixelImage(grid, "RGB")))
    assert np.abs(back.samples.astype(int) - grid).max() <= 1


@settings(max_examples=50, deadline=None)
@given(arrays(np.uint8, (6, 7, 3)))
def test_roundtrip_within_one(a):
    back = ycbcr_to_rgb(rgb_to_ycbcr(PixelImage(a, "RGB")))
    assert np.abs(back.samples.astype(int) - a).max() <= 1


@settings(max_examples=30, deadline=None)
@given(arrays(np.uint8, (4, 5, 3)), st.randoms(use_true_random=False))
def test_conversion_commutes_with_pixel_permutation(a, r):
    perm = list(range(20))
    r.shuffle(perm)
    flat = a.reshape(20, 1, 3)
    direct = rgb_to_ycbcr(PixelImage(flat, "RGB")).samples[perm]
    permuted = rgb_to_ycbcr(PixelImage(flat[perm], "RGB")).samples
    assert np.array_equal(direct, permuted)


def test_wrong_colorspace_rejected():
    with pytest.raises(InvalidInputError):
        rgb_to_ycbcr(pixel((1, 2, 3), "YCbCr"))
    with pytest.raises(InvalidInputError):
        ycbcr_to_rgb(pixel((1, 2, 3), "RGB"))
    with pytest.raises(InvalidInputError):
        rgb_to_ycbcr(PixelImage(np.zeros((2, 2), np.uint8), "GRAY"))


def test_round_half_away_from_zero():
    x = np.array([-2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 2.4999])
    assert round_half_away(x).tolist() == [-3, -2, -1, 1, 2, 3, 2]


def test_to_grayscale_takes_luma():
    img = pixel((255, 0, 0))
    g = to_grayscale(img)
    assert g.colorspace == "GRAY" and int(g.samples[0, 0, 0]) == 76
    assert to_grayscale(g) is g
