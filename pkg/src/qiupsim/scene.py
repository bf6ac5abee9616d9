"""Imaged objects: amplitude transmittance and phase over the object plane.

Masks are immutable and sampled as pure functions of the object-plane position.
Outside the mask extent there is no object: (t_o, phi_o) = (1, 0).  Feature
edges belong to the opaque feature (closed-boundary convention).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["ObjectMask", "RectFeature", "bar_target", "three_slit", "uniform_mask",
           "grid_mask", "sample_mask", "load_mask", "save_mask"]


@dataclass(frozen=True)
class RectFeature:
    """Axis-aligned rectangle overriding (t_o, phi_o) inside its bounds (edges inclusive)."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    transmittance: float = 0.0
    phase: float = 0.0


@dataclass(frozen=True)
class ObjectMask:
    """Object defined either by analytic rectangles or by a sampled grid.

    Grid masks carry per-cell transmittance (bilinear interpolation) and phase
    (nearest neighbor).  ``extent`` is (width, height) in meters, centered on
    the optical axis.
    """

    extent: tuple[float, float]
    features: tuple[RectFeature, ...] = ()
    background: float = 1.0
    grid_t: np.ndarray | None = None
    grid_phi: np.ndarray | None = None

    def __post_init__(self):
        if self.grid_t is not None:
            t = np.asarray(self.grid_t, dtype=float)
            if t.min() < 0.0 or t.max() > 1.0:
                raise ValueError("grid transmittance must lie in [0, 1]")
        for f in self.features:
            if not 0.0 <= f.transmittance <= 1.0:
                raise ValueError("feature transmittance must lie in [0, 1]")

    @property
    def has_phase(self) -> bool:
        if self.grid_phi is not None and np.any(self.grid_phi != 0.0):
            return True
        return any(f.phase != 0.0 for f in self.features)

    def sample(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(t_o, phi_o) at object-plane points of shape (..., 2)."""
        points = np.asarray(points, dtype=float)
        x = points[..., 0]
        y = points[..., 1]
        hw, hh = self.extent[0] / 2.0, self.extent[1] / 2.0
        inside = (np.abs(x) <= hw) & (np.abs(y) <= hh)

        if self.grid_t is not None:
            t, phi = self._sample_grid(x, y)
        else:
            t = np.full(x.shape, self.background)
            phi = np.zeros(x.shape)
            for f in self.features:
                hit = (x >= f.x_min) & (x <= f.x_max) & (y >= f.y_min) & (y <= f.y_max)
                t = np.where(hit, f.transmittance, t)
                phi = np.where(hit, f.phase, phi)

        t = np.where(inside, t, 1.0)
        phi = np.where(inside, phi, 0.0)
        return np.clip(t, 0.0, 1.0), phi

    def _sample_grid(self, x, y):
        ny, nx = self.grid_t.shape
        hw, hh = self.extent[0] / 2.0, self.extent[1] / 2.0
        # cell centers span the extent
        fx = (x + hw) / self.extent[0] * nx - 0.5
        fy = (y + hh) / self.extent[1] * ny - 0.5
        ix = np.clip(np.floor(fx).astype(int), 0, nx - 2)
        iy = np.clip(np.floor(fy).astype(int), 0, ny - 2)
        tx = np.clip(fx - ix, 0.0, 1.0)
        ty = np.clip(fy - iy, 0.0, 1.0)
        g = self.grid_t
        t = (
            g[iy, ix] * (1 - tx) * (1 - ty)
            + g[iy, ix + 1] * tx * (1 - ty)
            + g[iy + 1, ix] * (1 - tx) * ty
            + g[iy + 1, ix + 1] * tx * ty
        )
        if self.grid_phi is not None:
            jx = np.clip(np.rint(fx).astype(int), 0, nx - 1)
            jy = np.clip(np.rint(fy).astype(int), 0, ny - 1)
            phi = self.grid_phi[jy, jx]
        else:
            phi = np.zeros(x.shape)
        return t, phi


def sample_mask(mask: ObjectMask, point) -> tuple[float, float]:
    """(t_o, phi_o) at a single object-plane point."""
    t, phi = mask.sample(np.asarray(point, dtype=float))
    return float(t), float(phi)


def bar_target() -> ObjectMask:
    """4x4 mm^2 target: three horizontal and two vertical 200 um opaque bars.

    Horizontal bars are separated by 200 um gaps; the vertical bars are
    separated by 1000 um (centers 1200 um apart).
    """
    w = 200e-6
    half = 2e-3
    feats = []
    for yc in (-400e-6, 0.0, 400e-6):
        feats.append(RectFeature(-half, half, yc - w / 2, yc + w / 2))
    for xc in (-600e-6, 600e-6):
        feats.append(RectFeature(xc - w / 2, xc + w / 2, -half, half))
    return ObjectMask(extent=(4e-3, 4e-3), features=tuple(feats))


def three_slit(d: float, height: float = 4e-3) -> ObjectMask:
    """Opaque field with three transparent vertical slits of width d, gaps d."""
    if d <= 0:
        raise ValueError("slit width must be positive")
    width = max(10 * d, 4e-3)
    feats = [
        RectFeature(xc - d / 2, xc + d / 2, -height / 2, height / 2, transmittance=1.0)
        for xc in (-2 * d, 0.0, 2 * d)
    ]
    return ObjectMask(extent=(width, height), features=tuple(feats), background=0.0)


def uniform_mask(t: float = 1.0, phi: float = 0.0, extent: float = 10e-3) -> ObjectMask:
    """Constant-transmittance object (useful as a no-object reference)."""
    return ObjectMask(
        extent=(extent, extent),
        features=(RectFeature(-extent / 2, extent / 2, -extent / 2, extent / 2, t, phi),),
    )


def grid_mask(t: np.ndarray, extent: tuple[float, float], phi: np.ndarray | None = None) -> ObjectMask:
    return ObjectMask(extent=extent, grid_t=np.asarray(t, dtype=float),
                      grid_phi=None if phi is None else np.asarray(phi, dtype=float))


# ---- file round trip --------------------------------------------------------


def save_mask(mask: ObjectMask, path, resolution: float = 1e-6, phase_path=None):
    """Rasterize a mask to 16-bit PGM (and optionally its phase to a companion file)."""
    from .gridio import write_pgm16

    nx = int(round(mask.extent[0] / resolution))
    ny = int(round(mask.extent[1] / resolution))
    xs = (np.arange(nx) + 0.5) * resolution - mask.extent[0] / 2
    ys = (np.arange(ny) + 0.5) * resolution - mask.extent[1] / 2
    gx, gy = np.meshgrid(xs, ys)
    t, phi = mask.sample(np.stack([gx, gy], axis=-1))
    write_pgm16(path, np.rint(t * 65535).astype(np.uint16))
    if phase_path is not None:
        enc = np.rint((phi + np.pi) / (2 * np.pi) * 65535).astype(np.uint16)
        write_pgm16(phase_path, enc)


def load_mask(path, extent: tuple[float, float] | None = None, phase_path=None) -> ObjectMask:
    """Read a 16-bit PGM as transmittance, optional companion PGM as phase.

    Without an explicit extent the raster is interpreted at 1 um per pixel.
    """
    from .gridio import read_pgm16

    t16 = read_pgm16(path)
    t = t16.astype(float) / 65535.0
    phi = None
    if phase_path is not None:
        p16 = read_pgm16(phase_path)
        if p16.shape != t16.shape:
            raise ValueError("phase raster shape differs from transmittance raster")
        phi = p16.astype(float) / 65535.0 * 2 * np.pi - np.pi
    if extent is None:
        extent = (t.shape[1] * 1e-6, t.shape[0] * 1e-6)
    return grid_mask(t, extent, phi)
