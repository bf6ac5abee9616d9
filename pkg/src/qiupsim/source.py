"""Biphoton source models.

The default source is a Gaussian pump envelope times a sinc quasi-phase-matching
factor.  It maps a pair of photon momenta (signal, idler) to a real, non-negative
transition amplitude.  Alternative evaluators can be plugged in through the
``SourceModel`` protocol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol, runtime_checkable

import numpy as np

from .errors import TruncationError

C = 299792458.0  # speed of light, m/s

__all__ = [
    "C",
    "PhotonMomentum",
    "CrystalSpec",
    "PumpSpec",
    "SourceModel",
    "GaussianSincModel",
    "KernelGrid",
    "phase_mismatch",
    "transition_amplitude",
    "normalized_kernel",
]


@dataclass(frozen=True)
class PhotonMomentum:
    """A forward-propagating wavevector (rad/m) with its angular frequency (rad/s)."""

    kx: float
    ky: float
    kz: float
    omega: float

    def __post_init__(self):
        if not self.kz > 0:
            raise ValueError("kz must be positive (forward propagation)")

    @classmethod
    def from_transverse(cls, qx: float, qy: float, omega: float, n: float = 1.0) -> "PhotonMomentum":
        """Build a momentum from its transverse components, with |k| = n*omega/c."""
        k = n * omega / C
        kz2 = k * k - qx * qx - qy * qy
        if kz2 <= 0:
            raise ValueError("transverse momentum exceeds |k|")
        return cls(qx, qy, math.sqrt(kz2), omega)

    @property
    def q(self) -> np.ndarray:
        """Transverse part (kx, ky)."""
        return np.array([self.kx, self.ky])

    @property
    def slope(self) -> np.ndarray:
        """Paraxial ray slope (kx/kz, ky/kz)."""
        return np.array([self.kx / self.kz, self.ky / self.kz])

    def norm_error(self, n: float = 1.0) -> float:
        """Relative deviation of |k| from n*omega/c."""
        k = math.sqrt(self.kx**2 + self.ky**2 + self.kz**2)
        return abs(k - n * self.omega / C) / (n * self.omega / C)


@dataclass(frozen=True)
class CrystalSpec:
    """Periodically poled crystal parameters.

    ``index_model`` maps a vacuum wavelength in meters to a refractive index.
    """

    length_z: float
    poling_period: float
    temperature_c: float
    index_model: Callable[[float], float]

    def __post_init__(self):
        if self.length_z <= 0:
            raise ValueError("crystal length must be positive")
        if self.poling_period <= 0:
            raise ValueError("poling period must be positive")


@dataclass(frozen=True)
class PumpSpec:
    """Pump laser parameters. ``waist`` is the 1/e^2 intensity radius."""

    wavelength: float
    waist: float
    power: float = 50e-3

    def __post_init__(self):
        if self.wavelength <= 0:
            raise ValueError("pump wavelength must be positive")
        if self.waist <= 0:
            raise ValueError("pump waist must be positive")


@runtime_checkable
class SourceModel(Protocol):
    """Pure evaluator mapping momentum pairs to transition amplitudes."""

    omega_pump: float
    omega_signal: float
    omega_idler: float

    def amplitude_q(self, qs: np.ndarray, qi: np.ndarray) -> np.ndarray:
        """Amplitude for transverse momenta qs, qi of shape (..., 2)."""
        ...

    def domain_halfwidth(self) -> float:
        """Half-width (rad/m) of a box in qi that captures >= 1 - 1e-4 of g^2 mass."""
        ...


def _index_of(model: Callable[[float], float], wavelength: float) -> float:
    n = float(model(wavelength))
    if not n > 0:
        raise ValueError("refractive index must be positive")
    return n


@dataclass(frozen=True)
class GaussianSincModel:
    """Gaussian pump envelope x sinc quasi-phase-matching amplitude.

    g(k_s, k_i) = A * exp(-|q_s + q_i|^2 w_p^2 / 4) * sinc(dk_z L / 2)
    with dk_z the longitudinal quasi-phase mismatch inside the crystal.
    """

    crystal: CrystalSpec
    pump: PumpSpec
    signal_wavelength: float
    amplitude_scale: float = 1.0
    # derived internal wavenumbers, filled in __post_init__
    _k_pump: float = field(init=False, repr=False, default=0.0)
    _k_signal: float = field(init=False, repr=False, default=0.0)
    _k_idler: float = field(init=False, repr=False, default=0.0)

    def __post_init__(self):
        w_p = self.pump.wavelength
        w_s = self.signal_wavelength
        if w_s <= w_p:
            raise ValueError("signal wavelength must exceed pump wavelength")
        idx = self.crystal.index_model
        object.__setattr__(self, "_k_pump", 2 * math.pi * _index_of(idx, w_p) / w_p)
        object.__setattr__(self, "_k_signal", 2 * math.pi * _index_of(idx, w_s) / w_s)
        w_i = self.idler_wavelength
        object.__setattr__(self, "_k_idler", 2 * math.pi * _index_of(idx, w_i) / w_i)

    @property
    def omega_pump(self) -> float:
        return 2 * math.pi * C / self.pump.wavelength

    @property
    def omega_signal(self) -> float:
        return 2 * math.pi * C / self.signal_wavelength

    @property
    def omega_idler(self) -> float:
        return self.omega_pump - self.omega_signal

    @property
    def idler_wavelength(self) -> float:
        return 2 * math.pi * C / self.omega_idler

    def delta_kz_q(self, qs: np.ndarray, qi: np.ndarray) -> np.ndarray:
        """Longitudinal quasi-phase mismatch for transverse momenta (..., 2)."""
        qs = np.asarray(qs, dtype=float)
        qi = np.asarray(qi, dtype=float)
        qp = qs + qi
        kpz = np.sqrt(self._k_pump**2 - np.sum(qp * qp, axis=-1))
        ksz = np.sqrt(self._k_signal**2 - np.sum(qs * qs, axis=-1))
        kiz = np.sqrt(self._k_idler**2 - np.sum(qi * qi, axis=-1))
        return kpz - ksz - kiz - 2 * math.pi / self.crystal.poling_period

    def amplitude_q(self, qs: np.ndarray, qi: np.ndarray) -> np.ndarray:
        qs = np.asarray(qs, dtype=float)
        qi = np.asarray(qi, dtype=float)
        qp = qs + qi
        envelope = np.exp(-np.sum(qp * qp, axis=-1) * self.pump.waist**2 / 4.0)
        arg = self.delta_kz_q(qs, qi) * self.crystal.length_z / 2.0
        return self.amplitude_scale * envelope * np.sinc(arg / math.pi)

    def domain_halfwidth(self) -> float:
        # g^2 envelope is exp(-|u|^2 w^2 / 2); 5/w leaves < 1e-6 of the mass outside.
        return 5.0 / self.pump.waist

    def coverage(self, halfwidth: float) -> float:
        """Fraction of the g^2 envelope mass inside a centered box of given half-width."""
        z = halfwidth * self.pump.waist / math.sqrt(2.0)
        one_axis = math.erf(z)
        return one_axis * one_axis


def _check_energy(model, k_s: PhotonMomentum, k_i: PhotonMomentum):
    w_p = model.omega_pump
    if abs(k_s.omega + k_i.omega - w_p) > 1e-9 * w_p:
        raise ValueError("energy conservation violated: omega_s + omega_i != omega_p")


def phase_mismatch(model: GaussianSincModel, k_s: PhotonMomentum, k_i: PhotonMomentum) -> float:
    """Quasi-phase mismatch dk_z = k_pz - k_sz - k_iz - 2*pi/poling_period (rad/m)."""
    _check_energy(model, k_s, k_i)
    return float(model.delta_kz_q(k_s.q, k_i.q))


def transition_amplitude(model: SourceModel, k_s: PhotonMomentum, k_i: PhotonMomentum) -> float:
    """Amplitude that the source emits the momentum pair (k_s, k_i)."""
    _check_energy(model, k_s, k_i)
    return float(model.amplitude_q(k_s.q, k_i.q))


@dataclass(frozen=True)
class KernelGrid:
    """Sampled normalized transition probability on a transverse-momentum grid.

    The axes hold offsets from the envelope center (the idler momentum mirroring
    ``center_ks``): ``values[iy, ix]`` is the probability density at idler
    momentum ``-center_ks.q + (qx[ix], qy[iy])``.  The kernel integrates to one:
    sum(values) * cell_area == 1.
    """

    qx: np.ndarray
    qy: np.ndarray
    values: np.ndarray
    center_ks: PhotonMomentum

    def __post_init__(self):
        if self.qx.size % 2 == 0 or self.qy.size % 2 == 0:
            raise ValueError("kernel grid must have odd sample counts")
        if self.values.shape != (self.qy.size, self.qx.size):
            raise ValueError("values shape must be (ny, nx)")

    @property
    def extent(self) -> float:
        return float(max(self.qx[-1], self.qy[-1]))

    @property
    def cell_area(self) -> float:
        return float((self.qx[1] - self.qx[0]) * (self.qy[1] - self.qy[0]))

    def interpolate(self, ux: np.ndarray, uy: np.ndarray) -> np.ndarray:
        """Bilinear interpolation; zero outside the grid."""
        dx = self.qx[1] - self.qx[0]
        dy = self.qy[1] - self.qy[0]
        fx = (np.asarray(ux) - self.qx[0]) / dx
        fy = (np.asarray(uy) - self.qy[0]) / dy
        ix = np.floor(fx).astype(int)
        iy = np.floor(fy).astype(int)
        tx = fx - ix
        ty = fy - iy
        eps = 1e-9  # keep boundary nodes inside despite index rounding
        valid = (
            (fx >= -eps) & (fx <= self.qx.size - 1 + eps)
            & (fy >= -eps) & (fy <= self.qy.size - 1 + eps)
        )
        ixc = np.clip(ix, 0, self.qx.size - 2)
        iyc = np.clip(iy, 0, self.qy.size - 2)
        tx = fx - ixc
        ty = fy - iyc
        v = self.values
        out = (
            v[iyc, ixc] * (1 - tx) * (1 - ty)
            + v[iyc, ixc + 1] * tx * (1 - ty)
            + v[iyc + 1, ixc] * (1 - tx) * ty
            + v[iyc + 1, ixc + 1] * tx * ty
        )
        return np.where(valid, out, 0.0)


def normalized_kernel(
    model: SourceModel,
    center_ks: PhotonMomentum | None = None,
    extent: float | None = None,
    nx: int = 129,
    ny: int = 129,
) -> KernelGrid:
    """Sample g(center_ks, k_i)^2 over transverse idler momenta and normalize.

    The grid is centered on the idler momentum that maximizes the pump envelope
    (q_i = -q_s).  Raises TruncationError when the boundary is not below 1e-4 of
    the peak.
    """
    if center_ks is None:
        center_ks = PhotonMomentum.from_transverse(0.0, 0.0, model.omega_signal)
    if extent is None:
        extent = model.domain_halfwidth()
    if nx % 2 == 0 or ny % 2 == 0:
        raise ValueError("nx and ny must be odd")

    qs = center_ks.q
    ux = np.linspace(-extent, extent, nx)
    uy = np.linspace(-extent, extent, ny)
    gx, gy = np.meshgrid(-qs[0] + ux, -qs[1] + uy)
    qi = np.stack([gx, gy], axis=-1)
    g = model.amplitude_q(qs, qi)
    values = g * g

    peak = values.max()
    if peak <= 0:
        raise TruncationError("kernel is identically zero on the grid")
    boundary = max(values[0].max(), values[-1].max(), values[:, 0].max(), values[:, -1].max())
    if boundary > 1e-4 * peak:
        raise TruncationError(
            f"kernel boundary value {boundary / peak:.3e} of peak exceeds 1e-4; enlarge the grid"
        )

    cell = (ux[1] - ux[0]) * (uy[1] - uy[0])
    values = values / (values.sum() * cell)
    return KernelGrid(qx=ux, qy=uy, values=values, center_ks=center_ks)
