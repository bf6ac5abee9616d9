"""Richardson-Lucy deconvolution of visibility maps and image-quality metrics."""

from __future__ import annotations

import numpy as np
from scipy.signal import fftconvolve

from .detection import VisibilityMap
from .errors import DimensionMismatch, KernelMismatch

__all__ = ["richardson_lucy", "rmse"]

_EPS = 1e-12


def _convolve_reflect(img: np.ndarray, psf: np.ndarray) -> np.ndarray:
    """'same'-size convolution with reflective border padding."""
    py = psf.shape[0] // 2
    px = psf.shape[1] // 2
    padded = np.pad(img, ((py, py), (px, px)), mode="reflect")
    return fftconvolve(padded, psf, mode="valid")


def richardson_lucy(img: VisibilityMap, psf: np.ndarray, iterations: int) -> VisibilityMap:
    """Standard multiplicative Richardson-Lucy update, initialized at the data.

    ``psf`` is the blur kernel already mapped to image pixels (normalized,
    odd-sized).  The output is not clipped.
    """
    if iterations < 0:
        raise ValueError("iteration count must be non-negative")
    psf = np.asarray(psf, dtype=float)
    if psf.shape[0] > img.values.shape[0] or psf.shape[1] > img.values.shape[1]:
        raise KernelMismatch("deconvolution kernel is larger than the image")
    if psf.shape[0] % 2 == 0 or psf.shape[1] % 2 == 0:
        raise KernelMismatch("kernel must be odd-sized")
    if np.any(img.values < 0):
        raise ValueError("image must be non-negative (clip the visibility first)")

    data = img.values.astype(float)
    u = data.copy()
    mirrored = psf[::-1, ::-1]
    for _ in range(iterations):
        blurred = _convolve_reflect(u, psf)
        ratio = data / np.maximum(blurred, _EPS)
        u = u * _convolve_reflect(ratio, mirrored)
    return VisibilityMap(values=u, clipped=img.clipped.copy(), pitch=img.pitch)


def rmse(a: VisibilityMap, b: VisibilityMap, region: tuple[int, int, int, int] | None = None) -> float:
    """Root mean square difference over a pixel box (x0, x1, y0, y1)."""
    if a.values.shape != b.values.shape:
        raise DimensionMismatch("visibility maps differ in shape")
    if region is None:
        da = a.values
        db = b.values
    else:
        x0, x1, y0, y1 = region
        ny, nx = a.values.shape
        if not (0 <= x0 < x1 <= nx and 0 <= y0 < y1 <= ny):
            raise DimensionMismatch("region outside the image bounds")
        da = a.values[y0:y1, x0:x1]
        db = b.values[y0:y1, x0:x1]
    return float(np.sqrt(np.mean((da - db) ** 2)))
