import json

import numpy as np
import pytest

from jointaug.manifest import (ManifestError, UnsupportedFormatError,
                               entry_from_json, entry_to_json, read_image,
                               read_manifest, write_image, write_manifest)
from jointaug.paired import (BlurSpec, ColorSpec, CropRegion,
                             PairManifestEntry, ViewParams)


def make_entry(index=0, branch=None, blur=False, color=False):
    crop_a = CropRegion(3, 5, 100, 120, 224, 224)
    crop_b = CropRegion(10, 0, 214, 200, 224, 224)
    blur_a = BlurSpec(1.234567890123, 23) if blur else None
    color_a = ColorSpec(1.1, 0.9) if color else None
    view_a = ViewParams(crop_a, blur_a, blur, color_a)
    view_b = ViewParams(crop_b, blur_a, False, color_a)
    return PairManifestEntry("img0001", index, "joint-crop", -1.5, 42,
                             view_a, view_b, branch)


class TestEntryJson:
    def test_round_trip(self):
        for entry in (make_entry(), make_entry(3, "blur", blur=True),
                      make_entry(9, color=True)):
            assert entry_from_json(entry_to_json(entry)) == entry

    def test_serialization_is_byte_stable(self):
        e = make_entry(blur=True, color=True)
        assert entry_to_json(e) == entry_to_json(e)
        # compact separators, no spaces
        assert " " not in entry_to_json(e)

    def test_key_order_fixed(self):
        keys = list(json.loads(entry_to_json(make_entry())).keys())
        assert keys == ["schema_version", "image_id", "index", "mode", "beta",
                        "seed", "branch", "view_a", "view_b"]

    def test_float_precision_survives(self):
        e = make_entry(blur=True)
        back = entry_from_json(entry_to_json(e))
        assert back.view_a.blur.sigma == e.view_a.blur.sigma

    def test_unknown_keys_tolerated(self):
        doc = json.loads(entry_to_json(make_entry()))
        doc["future_field"] = {"x": 1}
        assert entry_from_json(json.dumps(doc)) == make_entry()

    def test_version_mismatch_rejected(self):
        doc = json.loads(entry_to_json(make_entry()))
        doc["schema_version"] = 99
        with pytest.raises(ManifestError, match="schema_version"):
            entry_from_json(json.dumps(doc))


class TestManifestFiles:
    def test_round_trip_and_byte_identical(self, tmp_path):
        entries = [make_entry(i, blur=(i % 2 == 0), color=(i % 3 == 0))
                   for i in range(10)]
        p1 = tmp_path / "m1.jsonl"
        p2 = tmp_path / "m2.jsonl"
        write_manifest(entries, p1)
        write_manifest(entries, p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert read_manifest(p1) == entries

    def test_blank_lines_skipped(self, tmp_path):
        p = tmp_path / "m.jsonl"
        p.write_text(entry_to_json(make_entry()) + "\n\n\n")
        assert len(read_manifest(p)) == 1

    def test_truncated_line_names_line_number(self, tmp_path):
        p = tmp_path / "m.jsonl"
        good = entry_to_json(make_entry())
        p.write_text(good + "\n" + good[:40] + "\n")
        with pytest.raises(ManifestError, match="line 2"):
            read_manifest(p)

    def test_missing_field_names_line_number(self, tmp_path):
        doc = json.loads(entry_to_json(make_entry()))
        del doc["view_a"]
        p = tmp_path / "m.jsonl"
        p.write_text(json.dumps(doc) + "\n")
        with pytest.raises(ManifestError, match="line 1"):
            read_manifest(p)


class TestRasterIO:
    @pytest.mark.parametrize("channels,suffix", [(3, ".png"), (1, ".png"),
                                                 (3, ".ppm"), (1, ".pgm")])
    def test_round_trip(self, tmp_path, channels, suffix):
        rng = np.random.default_rng(channels)
        img = rng.integers(0, 256, (17, 23, channels), dtype=np.uint8)
        p = tmp_path / f"im{suffix}"
        write_image(img, p)
        assert np.array_equal(read_image(p), img)

    def test_one_by_one_image(self, tmp_path):
        img = np.array([[[200]]], dtype=np.uint8)
        p = tmp_path / "dot.pgm"
        write_image(img, p)
        assert np.array_equal(read_image(p), img)

    def test_ppm_writes_are_byte_identical(self, tmp_path):
        img = np.random.default_rng(0).integers(0, 256, (5, 7, 3), dtype=np.uint8)
        a, b = tmp_path / "a.ppm", tmp_path / "b.ppm"
        write_image(img, a)
        write_image(img, b)
        assert a.read_bytes() == b.read_bytes()

    def test_pnm_header_comments_tolerated(self, tmp_path):
        img = np.arange(6, dtype=np.uint8).reshape(2, 3, 1)
        p = tmp_path / "c.pgm"
        p.write_bytes(b"P5\n# a comment\n3 2\n# another\n255\n" + img.tobytes())
        assert np.array_equal(read_image(p), img)

    def test_truncated_pnm_rejected(self, tmp_path):
        p = tmp_path / "t.pgm"
        p.write_bytes(b"P5\n4 4\n255\n\x00\x01")
        with pytest.raises(UnsupportedFormatError, match="truncated"):
            read_image(p)

    def test_16_bit_png_rejected(self, tmp_path):
        from PIL import Image
        p = tmp_path / "deep.png"
        Image.fromarray(np.zeros((4, 4), dtype=np.uint16)).save(p)
        with pytest.raises(UnsupportedFormatError):
            read_image(p)

    def test_rgba_png_rejected(self, tmp_path):
        from PIL import Image
        p = tmp_path / "alpha.png"
        Image.fromarray(np.zeros((4, 4, 4), dtype=np.uint8), mode="RGBA").save(p)
        with pytest.raises(UnsupportedFormatError):
            read_image(p)

    def test_channel_format_mismatch(self, tmp_path):
        gray = np.zeros((4, 4, 1), dtype=np.uint8)
        rgb = np.zeros((4, 4, 3), dtype=np.uint8)
        with pytest.raises(UnsupportedFormatError):
            write_image(gray, tmp_path / "x.ppm")
        with pytest.raises(UnsupportedFormatError):
            write_image(rgb, tmp_path / "x.pgm")

    def test_unknown_formats_rejected(self, tmp_path):
        img = np.zeros((4, 4, 3), dtype=np.uint8)
        with pytest.raises(UnsupportedFormatError):
            write_image(img, tmp_path / "x.bmp")
        junk = tmp_path / "junk.dat"
        junk.write_bytes(b"not an image at all")
        with pytest.raises(UnsupportedFormatError):
            read_image(junk)
