import json
import math

import numpy as np
import pytest
from PIL import Image

from ldp_slicing.analysis import privacy_report
from ldp_slicing.budget import allocate
from ldp_slicing.color import PixelImage
from ldp_slicing.errors import InvalidInputError
from ldp_slicing.imageio import (
    REPORT_KEYS,
    read_image,
    read_report,
    report_to_dict,
    write_image,
    write_report,
)


def test_hand_written_ppm(fixture_dir):
    img = read_image(fixture_dir / "tiny_2x2.ppm")
    assert img.colorspace == "RGB"
    assert img.samples.tolist() == [
        [[255, 0, 0], [0, 255, 0]],
        [[0, 0, 255], [10, 20, 30]],
    ]


def test_fixture_corpus_reads(fixture_dir):
    for path in sorted(fixture_dir.iterdir()):
        img = read_image(path)
        assert img.samples.dtype == np.uint8
    assert read_image(fixture_dir / "gray_64.pgm").colorspace == "GRAY"
    assert read_image(fixture_dir / "odd_33x17.png").shape == (33, 17, 3)


@pytest.mark.parametrize("suffix", [".png", ".ppm"])
def test_rgb_roundtrip(tmp_path, random_rgb, suffix):
    img = random_rgb(13, 21)
    write_image(img, tmp_path / f"x{suffix}")
    assert read_image(tmp_path / f"x{suffix}") == img


@pytest.mark.parametrize("suffix", [".png", ".pgm"])
def test_gray_roundtrip(tmp_path, rng, suffix):
    img = PixelImage(rng.integers(0, 256, (9, 4, 1), dtype=np.uint8), "GRAY")
    write_image(img, tmp_path / f"g{suffix}")
    back = read_image(tmp_path / f"g{suffix}")
    assert back == img and back.channels == 1


def test_alpha_strip_and_reject(tmp_path, rng):
    rgba = rng.integers(0, 256, (5, 6, 4), dtype=np.uint8)
    Image.fromarray(rgba, "RGBA").save(tmp_path / "a.png")
    with pytest.raises(InvalidInputError, match="alpha"):
        read_image(tmp_path / "a.png")
    img = read_image(tmp_path / "a.png", alpha="strip")
    assert img.channels == 3 and np.array_equal(img.samples, rgba[..., :3])


def test_jpeg_rejected(tmp_path, random_rgb):
    Image.fromarray(random_rgb().samples).save(tmp_path / "x.jpg", "JPEG")
    with pytest.raises(InvalidInputError, match="lossless"):
        read_image(tmp_path / "x.jpg")
    # Content decides, not the suffix.
    Image.fromarray(random_rgb().samples).save(tmp_path / "disguised.png", "JPEG")
    with pytest.raises(InvalidInputError):
        read_image(tmp_path / "disguised.png")


def test_sixteen_bit_rejected(tmp_path):
    Image.fromarray(np.full((4, 4), 40000, np.uint16)).save(tmp_path / "deep.png")
    with pytest.raises(InvalidInputError, match="8-bit"):
        read_image(tmp_path / "deep.png")
    (tmp_path / "deep.pgm").write_bytes(b"P5\n2 1\n65535\n" + bytes([1, 2, 3, 4]))
    with pytest.raises(InvalidInputError):
        read_image(tmp_path / "deep.pgm")


def test_write_validation(tmp_path, random_rgb):
    with pytest.raises(InvalidInputError):
        write_image(random_rgb(), tmp_path / "x.jpg")
    with pytest.raises(InvalidInputError):
        write_image(random_rgb(), tmp_path / "x.pgm")
    with pytest.raises(InvalidInputError):
        write_image(PixelImage(random_rgb().samples, "YCbCr"), tmp_path / "x.png")
    with pytest.raises(OSError):
        write_image(random_rgb(), tmp_path / "missing" / "dir" / "x.png")


def test_png_has_no_extra_metadata(tmp_path, random_rgb):
    write_image(random_rgb(8, 8), tmp_path / "x.png")
    with Image.open(tmp_path / "x.png") as im:
        assert im.text == {}
        assert im.mode == "RGB" and im.size == (8, 8)


def report(psnr_db=31.5):
    return privacy_report(allocate(20.0), prune=True, seed=7, psnr_db=psnr_db)


def test_report_document_schema(tmp_path):
    doc = report_to_dict(report())
    assert tuple(doc) == REPORT_KEYS
    assert doc["version"] == 1 and doc["seed"] == 7 and doc["prune"] is True
    assert len(doc["allocation"]) == 24
    assert set(doc["allocation"][0]) == {"channel", "bit", "epsilon", "p_keep"}
    assert abs(math.fsum(e["epsilon"] for e in doc["allocation"]) - doc["epsilon_total"]) <= 1e-9
    write_report(report(), tmp_path / "r.json")
    assert read_report(tmp_path / "r.json") == json.loads(json.dumps(doc))


def test_report_infinite_psnr(tmp_path):
    write_report(report(math.inf), tmp_path / "r.json")
    assert read_report(tmp_path / "r.json")["psnr_db"] == "inf"


def test_report_rejects_unknown_and_inconsistent(tmp_path):
    doc = report_to_dict(report())
    bad = dict(doc, extra=1)
    (tmp_path / "a.json").write_text(json.dumps(bad))
    with pytest.raises(InvalidInputError, match="unknown"):
        read_report(tmp_path / "a.json")
    bad = dict(doc, epsilon_total=doc["epsilon_total"] + 1e-6)
    (tmp_path / "b.json").write_text(json.dumps(bad))
    with pytest.raises(InvalidInputError, match="sums"):
        read_report(tmp_path / "b.json")
    bad = {k: v for k, v in doc.items() if k != "version"}
    (tmp_path / "c.json").write_text(json.dumps(bad))
    with pytest.raises(InvalidInputError, match="missing"):
        read_report(tmp_path / "c.json")
