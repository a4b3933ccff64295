"""Persistence: JSONL pair manifests and lossless raster I/O.

Manifest lines are JSON objects with a fixed key order, so identical inputs
always produce byte-identical files (reals use Python's shortest round-trip
repr).  The reader tolerates unknown keys for forward compatibility.

Rasters: 8-bit PNG (gray or RGB, via Pillow) and binary PPM/PGM.  Anything
else (16-bit, palette, alpha) is rejected explicitly rather than converted.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, List, Union

import numpy as np
from PIL import Image

from .paired import (SCHEMA_VERSION, BlurSpec, ColorSpec, CropRegion,
                     PairManifestEntry, ViewParams)

PathLike = Union[str, Path]


class ManifestError(ValueError):
    pass


class UnsupportedFormatError(ValueError):
    pass


def _view_to_dict(view: ViewParams) -> dict:
    crop = view.crop
    out = {
        "crop": {"i": crop.i, "j": crop.j, "w": crop.w, "h": crop.h,
                 "image_w": crop.image_w, "image_h": crop.image_h},
        "blur": None,
        "color": None,
    }
    if view.blur is not None:
        out["blur"] = {"sigma": view.blur.sigma,
                       "kernel_size": view.blur.kernel_size,
                       "apply": view.blur_apply}
    if view.color is not None:
        out["color"] = {"brightness": view.color.brightness,
                        "contrast": view.color.contrast}
    return out


def _view_from_dict(d: dict) -> ViewParams:
    crop = CropRegion(**{k: int(d["crop"][k])
                         for k in ("i", "j", "w", "h", "image_w", "image_h")})
    blur = None
    blur_apply = False
    if d.get("blur") is not None:
        blur = BlurSpec(float(d["blur"]["sigma"]), int(d["blur"]["kernel_size"]))
        blur_apply = bool(d["blur"]["apply"])
    color = None
    if d.get("color") is not None:
        color = ColorSpec(float(d["color"]["brightness"]),
                          float(d["color"]["contrast"]))
    return ViewParams(crop, blur, blur_apply, color)


def entry_to_json(entry: PairManifestEntry) -> str:
    """One manifest line; key order is part of the format."""
    doc = {
        "schema_version": entry.schema_version,
        "image_id": entry.image_id,
        "index": entry.index,
        "mode": entry.mode,
        "beta": entry.beta,
        "seed": entry.seed,
        "branch": entry.branch,
        "view_a": _view_to_dict(entry.view_a),
        "view_b": _view_to_dict(entry.view_b),
    }
    return json.dumps(doc, separators=(",", ":"))


def entry_from_json(line: str) -> PairManifestEntry:
    doc = json.loads(line)
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ManifestError(f"unsupported schema_version {version!r}; "
                            f"this reader handles {SCHEMA_VERSION}")
    return PairManifestEntry(
        image_id=str(doc["image_id"]),
        index=int(doc["index"]),
        mode=str(doc["mode"]),
        beta=float(doc["beta"]),
        seed=int(doc["seed"]),
        view_a=_view_from_dict(doc["view_a"]),
        view_b=_view_from_dict(doc["view_b"]),
        branch=doc.get("branch"),
        schema_version=int(version),
    )


def write_manifest(entries: Iterable[PairManifestEntry], path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for entry in entries:
            fh.write(entry_to_json(entry))
            fh.write("\n")


def read_manifest(path: PathLike) -> List[PairManifestEntry]:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                entries.append(entry_from_json(stripped))
            except ManifestError:
                raise
            except (ValueError, KeyError, TypeError) as exc:
                raise ManifestError(f"malformed manifest line {lineno}: {exc}") from exc
    return entries


# ---------------------------------------------------------------------------
# Raster I/O


def _from_pil(im: Image.Image) -> np.ndarray:
    if im.mode == "L":
        return np.asarray(im, dtype=np.uint8)[:, :, None]
    if im.mode == "RGB":
        return np.asarray(im, dtype=np.uint8)
    raise UnsupportedFormatError(
        f"unsupported PNG mode {im.mode!r}; only 8-bit L and RGB are handled")


def _read_pnm(path: Path) -> np.ndarray:
    data = path.read_bytes()
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise UnsupportedFormatError(f"not a binary PGM/PPM file: {path}")
    # Header: magic, width, height, maxval as whitespace-separated tokens,
    # with '#' comments allowed.
    tokens, pos = [], 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(int(data[start:pos]))
    pos += 1  # single whitespace after maxval
    width, height, maxval = tokens
    if maxval != 255:
        raise UnsupportedFormatError(f"unsupported PNM maxval {maxval}; need 255")
    channels = 1 if magic == b"P5" else 3
    expected = width * height * channels
    raster = data[pos:pos + expected]
    if len(raster) != expected:
        raise UnsupportedFormatError(f"truncated PNM raster in {path}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width, channels)


def read_image(path: PathLike) -> np.ndarray:
    """Load a PNG/PPM/PGM raster as a (H, W, C) uint8 array, C in {1, 3}."""
    path = Path(path)
    head = path.read_bytes()[:8]
    if head.startswith(b"\x89PNG"):
        with Image.open(path) as im:
            return _from_pil(im)
    if head[:2] in (b"P5", b"P6"):
        return _read_pnm(path)
    raise UnsupportedFormatError(f"unrecognized raster format: {path}")


def write_image(img: np.ndarray, path: PathLike) -> None:
    """Write a (H, W, C) uint8 array losslessly; format from the extension."""
    path = Path(path)
    img = np.asarray(img)
    if img.dtype != np.uint8 or img.ndim != 3 or img.shape[2] not in (1, 3):
        raise ValueError("expected (H, W, {1,3}) uint8 array")
    suffix = path.suffix.lower()
    if suffix == ".png":
        if img.shape[2] == 1:
            Image.fromarray(img[:, :, 0], mode="L").save(path, format="PNG")
        else:
            Image.fromarray(img, mode="RGB").save(path, format="PNG")
    elif suffix in (".ppm", ".pgm"):
        if suffix == ".pgm" and img.shape[2] != 1:
            raise UnsupportedFormatError("PGM holds a single channel")
        if suffix == ".ppm" and img.shape[2] != 3:
            raise UnsupportedFormatError("PPM holds three channels")
        magic = b"P5" if suffix == ".pgm" else b"P6"
        header = magic + b"\n%d %d\n255\n" % (img.shape[1], img.shape[0])
        path.write_bytes(header + img.tobytes())
    else:
        raise UnsupportedFormatError(f"unsupported output format {suffix!r}")
