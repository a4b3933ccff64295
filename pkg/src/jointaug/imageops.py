"""Pixel-level transforms: crop+resize, separable Gaussian blur, color.

Images are uint8 numpy arrays of shape (H, W) or (H, W, C) with C in {1, 3}.
Transforms work in a float32 workspace and re-quantize with
round-half-away-from-zero, so repeated runs are byte-stable.

Conventions (fixed so outputs are byte-comparable across implementations):
  * resize is bilinear with half-pixel centers,
  * blur uses a normalized truncated Gaussian kernel and reflect borders
    (edge pixel not repeated),
  * the pipeline order is crop -> color -> blur.
"""

from __future__ import annotations

import numpy as np

from .paired import BlurSpec, CropRegion, ViewParams

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def _check_image(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.dtype != np.uint8:
        raise ValueError(f"expected uint8 image, got {img.dtype}")
    if img.ndim == 2:
        return img[:, :, None]
    if img.ndim == 3 and img.shape[2] in (1, 3):
        return img
    raise ValueError(f"expected (H, W) or (H, W, {{1,3}}) image, got shape {img.shape}")


def _quantize(work: np.ndarray) -> np.ndarray:
    """Round half away from zero and clamp to the 8-bit range."""
    return np.clip(np.floor(work.astype(np.float64) + 0.5), 0.0, 255.0).astype(np.uint8)


def _resize_axis_coords(n_out: int, n_in: int):
    """Half-pixel-center source coordinates plus gather indices and weights."""
    x = (np.arange(n_out, dtype=np.float64) + 0.5) * (n_in / n_out) - 0.5
    x = np.clip(x, 0.0, n_in - 1.0)
    i0 = np.floor(x).astype(np.int64)
    i0 = np.minimum(i0, n_in - 1)
    i1 = np.minimum(i0 + 1, n_in - 1)
    frac = x - i0
    return i0, i1, frac


def crop_resize(img: np.ndarray, region: CropRegion, out_w: int,
                out_h: int) -> np.ndarray:
    """Extract `region` and resize to (out_w, out_h) with bilinear sampling."""
    img = _check_image(img)
    h_in, w_in = img.shape[:2]
    if region.image_w != w_in or region.image_h != h_in:
        raise ValueError(f"region declared for {region.image_w}x{region.image_h}, "
                         f"image is {w_in}x{h_in}")
    if out_w < 1 or out_h < 1:
        raise ValueError("output dims must be >= 1")
    if (region.h, region.w) == (out_h, out_w):
        return img[region.j:region.j + region.h,
                   region.i:region.i + region.w].copy()
    patch = img[region.j:region.j + region.h,
                region.i:region.i + region.w].astype(np.float32)
    j0, j1, fy = _resize_axis_coords(out_h, region.h)
    i0, i1, fx = _resize_axis_coords(out_w, region.w)
    top = patch[j0][:, i0] * (1.0 - fx)[None, :, None] + patch[j0][:, i1] * fx[None, :, None]
    bot = patch[j1][:, i0] * (1.0 - fx)[None, :, None] + patch[j1][:, i1] * fx[None, :, None]
    out = top * (1.0 - fy)[:, None, None] + bot * fy[:, None, None]
    return _quantize(out)


def kernel_size_for(side: int) -> int:
    """Kernel size convention: 10% of the view side, forced odd, at least 3."""
    if side < 8:
        raise ValueError("side must be >= 8")
    k = int(side // 10)
    if k % 2 == 0:
        k += 1
    return max(k, 3)


def gaussian_kernel(sigma: float, kernel_size: int) -> np.ndarray:
    """Normalized 1-D Gaussian taps; weights sum to 1."""
    if kernel_size % 2 == 0 or kernel_size < 3:
        raise ValueError("kernel_size must be an odd integer >= 3")
    radius = kernel_size // 2
    d = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-0.5 * (d / sigma) ** 2)
    return w / w.sum()


def _convolve_axis(work: np.ndarray, taps: np.ndarray, axis: int) -> np.ndarray:
    radius = len(taps) // 2
    pad = [(0, 0)] * work.ndim
    pad[axis] = (radius, radius)
    padded = np.pad(work, pad, mode="reflect")
    out = np.zeros_like(work, dtype=np.float64)
    n = work.shape[axis]
    for t, weight in enumerate(taps):
        sl = [slice(None)] * work.ndim
        sl[axis] = slice(t, t + n)
        out += weight * padded[tuple(sl)]
    return out


def gaussian_blur(img: np.ndarray, spec: BlurSpec) -> np.ndarray:
    """Separable Gaussian blur (horizontal then vertical pass)."""
    img = _check_image(img)
    if spec.kernel_size > min(img.shape[0], img.shape[1]):
        raise ValueError("kernel larger than image")
    taps = gaussian_kernel(spec.sigma, spec.kernel_size)
    work = img.astype(np.float64)
    work = _convolve_axis(work, taps, axis=1)
    work = _convolve_axis(work, taps, axis=0)
    return _quantize(work)


def adjust_brightness(img: np.ndarray, b: float) -> np.ndarray:
    img = _check_image(img)
    if not np.isfinite(b) or b < 0.0:
        raise ValueError("brightness factor must be finite and >= 0")
    return _quantize(img.astype(np.float64) * b)


def adjust_contrast(img: np.ndarray, c: float) -> np.ndarray:
    """Blend each sample against the mean luma of the input."""
    img = _check_image(img)
    if not np.isfinite(c) or c < 0.0:
        raise ValueError("contrast factor must be finite and >= 0")
    if img.shape[2] == 3:
        gray = (LUMA_WEIGHTS[0] * img[:, :, 0].astype(np.float64)
                + LUMA_WEIGHTS[1] * img[:, :, 1]
                + LUMA_WEIGHTS[2] * img[:, :, 2])
    else:
        gray = img[:, :, 0].astype(np.float64)
    m = gray.mean()
    return _quantize(m * (1.0 - c) + img.astype(np.float64) * c)


def apply_view(img: np.ndarray, view: ViewParams, out_w: int, out_h: int) -> np.ndarray:
    """Realize one view: crop -> color -> blur, in that fixed order."""
    out = crop_resize(img, view.crop, out_w, out_h)
    if view.color is not None:
        out = adjust_brightness(out, view.color.brightness)
        out = adjust_contrast(out, view.color.contrast)
    if view.blur is not None and view.blur_apply:
        out = gaussian_blur(out, view.blur)
    return out
