"""Convolution approximation of the pointwise visibility.

The visibility at a detector pixel is the object transmittance blurred by the
normalized source kernel, evaluated at the object point conjugate to the
pixel.  For aligned setups this is a single shift-invariant convolution; lens
misalignments enter as phase modulations of the kernel, which stay a (complex)
convolution as long as the extra phase is linear in the idler momentum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .detection import VisibilityMap
from .errors import PhaseObjectError, TruncationError, UnsupportedMisalignment
from .optics import OpticalSetup
from .scene import ObjectMask
from .source import KernelGrid

__all__ = [
    "convolve_object",
    "ShiftVariantKernelFamily",
    "build_shift_variant_family",
    "shift_variant_convolve",
    "detector_psf",
]


def _object_geometry(setup: OpticalSetup):
    """Detector pixel centers mapped to the object plane, plus per-pixel q_s.

    Returns (rho_x, rho_y, qs_grid, drho_du) where drho_du converts kernel
    momentum offsets to object-plane position offsets.
    """
    det = setup.detector
    xs, ys = det.pixel_centers()
    gx, gy = np.meshgrid(xs, ys)
    qs = setup.signal_pixel_to_q(gx, gy)
    rho = setup.object_points_q(-qs)
    drho_du = setup.focal_length_idler / setup.k_idler_vac
    return rho[..., 0], rho[..., 1], qs, drho_du


def _resample_kernel(kernel: KernelGrid, du: float) -> np.ndarray:
    """Kernel weights on a grid with momentum step du, renormalized to sum 1."""
    if abs(kernel.values.sum() * kernel.cell_area - 1.0) > 1e-6:
        raise TruncationError("kernel is not normalized")
    hx = int(math.ceil(kernel.qx[-1] / du))
    hy = int(math.ceil(kernel.qy[-1] / du))
    ux = (np.arange(-hx, hx + 1)) * du
    uy = (np.arange(-hy, hy + 1)) * du
    gx, gy = np.meshgrid(ux, uy)
    w = kernel.interpolate(gx, gy)
    s = w.sum()
    if s <= 0:
        raise TruncationError("resampled kernel has no mass")
    return w / s, ux, uy


def _oversample_factor(kernel: KernelGrid, setup: OpticalSetup, du_pixel: float) -> int:
    """Fine-grid refinement so object edges are resolved by the quadrature.

    Quadrature error for a discontinuous object is first order in the grid
    step; stepping at ~1/300 of the kernel support keeps it below ~3e-3.
    """
    target = float(max(kernel.qx[-1], kernel.qy[-1])) / 150.0
    del setup
    return max(1, int(math.ceil(du_pixel / target)))


def _convolution_grids(setup: OpticalSetup, kernel: KernelGrid, oversample: int | None):
    """Shared geometry of the fast-path convolution.

    Returns (w, cos-kernel axes ux/uy, object samples grid positions, the
    decimation factor, and the fine object-plane step).
    """
    rho_x, rho_y, qs, drho_du = _object_geometry(setup)
    du_pixel = setup.detector.pitch * setup.k_idler_vac / (
        setup.magnification() * setup.focal_length_idler
    )
    os_ = oversample if oversample is not None else _oversample_factor(kernel, setup, du_pixel)
    du = du_pixel / os_
    w, ux, uy = _resample_kernel(kernel, du)
    drho = du * drho_du
    nx, ny = rho_x.shape[1], rho_x.shape[0]
    hx, hy = ux.size // 2, uy.size // 2
    nxf = (nx - 1) * os_ + 1
    nyf = (ny - 1) * os_ + 1
    xs = rho_x[0, 0] + (np.arange(-hx, nxf + hx)) * drho
    ys = rho_y[0, 0] + (np.arange(-hy, nyf + hy)) * drho
    return w, ux, uy, xs, ys, os_, qs


def convolve_object(
    kernel: KernelGrid,
    mask: ObjectMask,
    t_i: float,
    setup: OpticalSetup,
    oversample: int | None = None,
) -> VisibilityMap:
    """Shift-invariant visibility: V = t_i * (kernel convolved with t_o).

    Valid for phase-free masks and aligned setups.
    """
    if mask.has_phase:
        raise PhaseObjectError("mask carries phase; use the shift-variant path")
    w, ux, uy, xs, ys, os_, _ = _convolution_grids(setup, kernel, oversample)
    gx, gy = np.meshgrid(xs, ys)
    t_o, _ = mask.sample(np.stack([gx, gy], axis=-1))
    v = t_i * fftconvolve(t_o, w[::-1, ::-1], mode="valid")[::os_, ::os_]
    v = np.clip(v, 0.0, t_i)
    return VisibilityMap(values=v, clipped=np.zeros(v.shape, dtype=bool), pitch=setup.detector.pitch)


@dataclass(frozen=True)
class ShiftVariantKernelFamily:
    """Per-pixel kernels g^2(u) * cos(pixel phase + linear idler phase).

    ``pixel_phase[iy, ix]`` collects the phase terms constant across the
    kernel; ``linear_coeff`` is the gradient of the idler phase with respect
    to the kernel momentum offset (exactly linear for transversally shifted
    thin lenses).
    """

    setup: OpticalSetup
    kernel: KernelGrid
    pixel_phase: np.ndarray
    linear_coeff: tuple[float, float]

    def kernel_at(self, ix: int, iy: int) -> np.ndarray:
        """Explicit kernel weights for one detector pixel (for inspection)."""
        gx, gy = np.meshgrid(self.kernel.qx, self.kernel.qy)
        phase = self.pixel_phase[iy, ix] + self.linear_coeff[0] * gx + self.linear_coeff[1] * gy
        return self.kernel.values * np.cos(phase)


def _linear_fit_phase(setup: OpticalSetup, qs_grid: np.ndarray, kernel: KernelGrid):
    """Split chi_i(q_i) into a per-pixel constant and a global linear term in u.

    q_i = -q_s + u; returns (chi at u=0 per pixel, du coefficients).  Raises
    UnsupportedMisalignment when chi_i is not linear in u to 1e-6 rad over the
    kernel support (only pure transverse-shift misalignments qualify).
    """
    h = float(max(kernel.qx[-1], kernel.qy[-1]))
    q0 = -qs_grid.reshape(-1, 2)
    base = setup.idler_phase(q0)
    cx = (setup.idler_phase(q0 + [h, 0.0]) - setup.idler_phase(q0 - [h, 0.0])) / (2 * h)
    cy = (setup.idler_phase(q0 + [0.0, h]) - setup.idler_phase(q0 - [0.0, h])) / (2 * h)
    if cx.size > 1 and (np.ptp(cx) > 1e-9 * (1 + np.abs(cx).max()) or np.ptp(cy) > 1e-9 * (1 + np.abs(cy).max())):
        raise UnsupportedMisalignment("idler phase gradient varies across pixels")
    c = (float(cx.flat[0]), float(cy.flat[0]))
    # curvature check at a representative pixel
    mid = q0[q0.shape[0] // 2]
    for dv, cc in (([h, 0.0], c[0]), ([0.0, h], c[1])):
        pred = setup.idler_phase(mid[None, :]) + cc * h
        act = setup.idler_phase((mid + dv)[None, :])
        if abs(float((act - pred)[0])) > 1e-6:
            raise UnsupportedMisalignment("idler phase is not linear over the kernel support")
    return base.reshape(qs_grid.shape[:-1]), c


def build_shift_variant_family(setup: OpticalSetup, kernel: KernelGrid) -> ShiftVariantKernelFamily:
    """Assemble per-pixel phase-modulated kernels for a misaligned setup."""
    rho_x, rho_y, qs, _ = _object_geometry(setup)
    del rho_x, rho_y
    chi_s = setup.signal_phase(qs.reshape(-1, 2)).reshape(qs.shape[:-1])
    chi_i0, coeff = _linear_fit_phase(setup, qs, kernel)
    return ShiftVariantKernelFamily(
        setup=setup, kernel=kernel, pixel_phase=chi_s + chi_i0, linear_coeff=coeff
    )


def shift_variant_convolve(
    family: ShiftVariantKernelFamily, mask: ObjectMask, oversample: int | None = None
) -> VisibilityMap:
    """Visibility with a different (phase-modulated) kernel per detector pixel.

    Because the in-kernel phase is linear in the momentum offset, the pixel
    sums reduce to one complex convolution plus a per-pixel phase rotation.
    """
    setup = family.setup
    w, ux, uy, xs, ys, os_, _ = _convolution_grids(setup, family.kernel, oversample)
    gx, gy = np.meshgrid(xs, ys)
    t_o, phi_o = mask.sample(np.stack([gx, gy], axis=-1))

    kx, ky = np.meshgrid(ux, uy)
    wc = w * np.exp(1j * (family.linear_coeff[0] * kx + family.linear_coeff[1] * ky))
    field = t_o * np.exp(1j * phi_o)
    acc = fftconvolve(field, wc[::-1, ::-1], mode="valid")[::os_, ::os_]
    v = setup.idler_transmittance * np.real(np.exp(1j * family.pixel_phase) * acc)
    clipped = np.zeros(v.shape, dtype=bool)
    return VisibilityMap(values=v, clipped=clipped, pitch=setup.detector.pitch)


def detector_psf(setup: OpticalSetup, kernel: KernelGrid, pitch: float | None = None) -> np.ndarray:
    """Kernel mapped to detector pixels (for deconvolution), normalized to sum 1."""
    if pitch is None:
        pitch = setup.detector.pitch
    du = pitch * setup.k_idler_vac / (setup.magnification() * setup.focal_length_idler)
    w, _, _ = _resample_kernel(kernel, du)
    return w
