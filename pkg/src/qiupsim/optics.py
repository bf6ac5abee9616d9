"""Paraxial propagation model.

Arms are ordered lists of free-space gaps and ideal thin lenses.  Rays start at
the origin of the source plane (point-source assumption); tracing yields the
terminal transverse position, slope, and an accumulated equivalent path length
that carries the parabolic lens phase.

Phase convention: a lens at transverse position ``t`` contributes
``(x - t)^2 / (2 f)`` to the equivalent path, so the phase difference between a
shifted and an aligned lens at fixed ray position x_L is
``pi * (t^2 - 2 x_L t) / (f lambda)`` -- the transversal-shift phase of the
parabolic lens model (shift direction convention: positive t moves the lens
with the +x axis).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .errors import NoSolution, ParaxialError
from .source import C, PhotonMomentum, SourceModel

PARAXIAL_BOUND = 0.2  # rad

__all__ = [
    "Gap",
    "LensElement",
    "ArmPath",
    "RayState",
    "DetectorSpec",
    "OpticalSetup",
    "trace_ray",
    "detector_point",
    "object_point",
    "match_signal_momentum",
    "magnification",
    "total_phase_difference",
]


@dataclass(frozen=True)
class Gap:
    """Free-space propagation over a fixed distance (m)."""

    length: float

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("gap length must be non-negative")


@dataclass(frozen=True)
class LensElement:
    """Ideal thin lens, optionally displaced transversally."""

    focal_length: float
    transverse_shift: tuple[float, float] = (0.0, 0.0)
    axial_position: float = 0.0

    def __post_init__(self):
        if self.focal_length == 0:
            raise ValueError("focal length must be nonzero")


Element = Union[Gap, LensElement]


@dataclass(frozen=True)
class ArmPath:
    """A beam path from one plane to another, with a constant transmittance."""

    elements: tuple[Element, ...]
    transmittance: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.transmittance <= 1.0:
            raise ValueError("transmittance must lie in [0, 1]")

    def aligned(self) -> "ArmPath":
        """Copy with every lens shift zeroed."""
        out = []
        for el in self.elements:
            if isinstance(el, LensElement) and el.transverse_shift != (0.0, 0.0):
                out.append(replace(el, transverse_shift=(0.0, 0.0)))
            else:
                out.append(el)
        return ArmPath(tuple(out), self.transmittance)

    @property
    def is_aligned(self) -> bool:
        return all(
            not isinstance(el, LensElement) or el.transverse_shift == (0.0, 0.0)
            for el in self.elements
        )


@dataclass
class RayState:
    """Transverse position/slope arrays of shape (..., 2) and path length (...)."""

    position: np.ndarray
    slope: np.ndarray
    path_length: np.ndarray


def _trace_arrays(arm: ArmPath, slope: np.ndarray, check_paraxial: bool = True) -> RayState:
    slope = np.asarray(slope, dtype=float)
    if check_paraxial and np.any(np.abs(slope) >= PARAXIAL_BOUND):
        raise ParaxialError("ray slope exceeds the paraxial bound of 0.2 rad")
    pos = np.zeros_like(slope)
    theta = slope.copy()
    length = np.zeros(slope.shape[:-1])
    for el in arm.elements:
        if isinstance(el, Gap):
            length = length + el.length * (1.0 + 0.5 * np.sum(theta * theta, axis=-1))
            pos = pos + el.length * theta
        else:
            rel = pos - np.asarray(el.transverse_shift)
            length = length + np.sum(rel * rel, axis=-1) / (2.0 * el.focal_length)
            theta = theta - rel / el.focal_length
    return RayState(position=pos, slope=theta, path_length=length)


def trace_ray(arm: ArmPath, k: PhotonMomentum) -> RayState:
    """Trace the ray defined by a photon momentum from the arm's source plane."""
    return _trace_arrays(arm, k.slope)


def _affine(arm: ArmPath) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Affine position/slope map of an arm for a ray starting at position zero.

    Returns (B, D, offsets) with terminal position = B * slope + off_pos and
    terminal slope = D * slope + off_slope, per transverse axis.
    """
    basis = np.array([[0.0, 0.0], [1e-3, 1e-3]])
    st = _trace_arrays(arm, basis, check_paraxial=False)
    off_pos = st.position[0]
    off_slope = st.slope[0]
    b = (st.position[1] - off_pos) / 1e-3
    d = (st.slope[1] - off_slope) / 1e-3
    return b, d, np.concatenate([off_pos, off_slope])


@dataclass(frozen=True)
class DetectorSpec:
    """Pixel grid of the camera at the detector plane."""

    nx: int
    ny: int
    pitch: float
    efficiency: float = 1.0

    def __post_init__(self):
        if self.pitch <= 0:
            raise ValueError("detector pitch must be positive")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in [0, 1]")

    def pixel_centers(self) -> tuple[np.ndarray, np.ndarray]:
        xs = (np.arange(self.nx) - (self.nx - 1) / 2.0) * self.pitch
        ys = (np.arange(self.ny) - (self.ny - 1) / 2.0) * self.pitch
        return xs, ys


@dataclass(frozen=True)
class OpticalSetup:
    """Arms, sources, and detector of one interferometer configuration.

    Arms: ``arm_s1``/``arm_s2`` run from the source planes to the detector,
    ``arm_i1`` from source 1 to the object plane, ``arm_relay`` from the object
    plane to the plane of source 2.
    """

    model1: SourceModel
    model2: SourceModel
    arm_s1: ArmPath
    arm_s2: ArmPath
    arm_i1: ArmPath
    arm_relay: ArmPath
    detector: DetectorSpec
    focal_length_idler: float
    focal_length_detector: float
    phase_p1: float = 0.0
    phase_p2: float = 0.0
    idler_transmittance: float = 1.0
    config: object = None

    # ---- wavelengths -------------------------------------------------

    @property
    def lambda_signal(self) -> float:
        return 2 * math.pi * C / self.model1.omega_signal

    @property
    def lambda_idler(self) -> float:
        return 2 * math.pi * C / self.model1.omega_idler

    @property
    def k_signal_vac(self) -> float:
        return self.model1.omega_signal / C

    @property
    def k_idler_vac(self) -> float:
        return self.model1.omega_idler / C

    @property
    def is_aligned(self) -> bool:
        return (
            self.arm_s1.is_aligned
            and self.arm_s2.is_aligned
            and self.arm_i1.is_aligned
            and self.arm_relay.is_aligned
        )

    def aligned_copy(self) -> "OpticalSetup":
        return replace(
            self,
            arm_s1=self.arm_s1.aligned(),
            arm_s2=self.arm_s2.aligned(),
            arm_i1=self.arm_i1.aligned(),
            arm_relay=self.arm_relay.aligned(),
        )

    # ---- geometric maps ----------------------------------------------

    def signal_pixel_to_q(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Signal transverse momentum focused onto detector position (x, y).

        Uses the shift-suppressed source-1 arm (transverse lens shifts are pure
        phase perturbations in this model).
        """
        b, _, off = _affine(self.arm_s1.aligned())
        if np.any(b == 0):
            raise NoSolution("signal arm does not map momentum to detector position")
        sx = (np.asarray(x, dtype=float) - off[0]) / b[0]
        sy = (np.asarray(y, dtype=float) - off[1]) / b[1]
        return np.stack([sx, sy], axis=-1) * self.k_signal_vac

    def object_points_q(self, qi: np.ndarray) -> np.ndarray:
        """Object-plane point probed by idler transverse momentum qi (..., 2)."""
        b, _, off = _affine(self.arm_i1)
        return np.asarray(qi) / self.k_idler_vac * b + off[:2]

    def match_signal_q(self, qs: np.ndarray) -> np.ndarray:
        """Source-2 signal momentum landing on the same detector point (aligned maps)."""
        b1, _, off1 = _affine(self.arm_s1.aligned())
        b2, _, off2 = _affine(self.arm_s2.aligned())
        if np.any(b2 == 0):
            raise NoSolution("source-2 signal arm map is singular")
        x = np.asarray(qs) / self.k_signal_vac * b1 + off1[:2]
        return (x - off2[:2]) / b2 * self.k_signal_vac

    def match_idler_q(self, qi: np.ndarray) -> np.ndarray:
        """Source-2 idler momentum aligned with the relayed source-1 idler.

        The match is evaluated on the shift-suppressed arms: transverse lens
        shifts perturb only the phase, not the mode matching.
        """
        bi, di, offi = _affine(self.arm_i1.aligned())
        br, dr, offr = _affine(self.arm_relay.aligned())
        theta = np.asarray(qi) / self.k_idler_vac
        pos_obj = bi * theta + offi[:2]
        slope_obj = di * theta + offi[2:]
        slope_p2 = dr * slope_obj + offr[2:] + pos_obj * 0.0
        # relay slope map also depends on the object-plane position
        b_basis = _relay_position_coupling(self.arm_relay.aligned())
        slope_p2 = slope_p2 + b_basis * pos_obj
        return slope_p2 * self.k_idler_vac

    def magnification(self) -> float:
        """Object-to-image scale f_D * lambda_s / (f_i * lambda_i)."""
        return (
            self.focal_length_detector
            * self.lambda_signal
            / (self.focal_length_idler * self.lambda_idler)
        )

    # ---- phases --------------------------------------------------------

    def signal_phase(self, qs: np.ndarray) -> np.ndarray:
        """Misalignment phase of the signal arms, chi_s(q_s) (rad).

        Difference of the source-1 and matched source-2 signal paths relative
        to their aligned baselines, plus the pump phase offsets.
        """
        qs = np.asarray(qs, dtype=float)
        base = self.phase_p1 - self.phase_p2
        if self.arm_s1.is_aligned and self.arm_s2.is_aligned:
            return np.full(qs.shape[:-1], base)
        w_s = self.model1.omega_signal / C
        theta1 = qs / self.k_signal_vac
        d1 = _trace_arrays(self.arm_s1, theta1).path_length - _trace_arrays(
            self.arm_s1.aligned(), theta1
        ).path_length
        theta2 = self.match_signal_q(qs) / self.k_signal_vac
        d2 = _trace_arrays(self.arm_s2, theta2).path_length - _trace_arrays(
            self.arm_s2.aligned(), theta2
        ).path_length
        return base + w_s * (d1 - d2)

    def idler_phase(self, qi: np.ndarray) -> np.ndarray:
        """Misalignment phase of the idler path, chi_i(q_i) (rad).

        Source-1 idler traced to the object plane, plus the relay traversed by
        the aligned continuation ray, each relative to the aligned baseline.
        """
        qi = np.asarray(qi, dtype=float)
        if self.arm_i1.is_aligned and self.arm_relay.is_aligned:
            return np.zeros(qi.shape[:-1])
        w_i = self.model1.omega_idler / C
        theta = qi / self.k_idler_vac
        d1 = _trace_arrays(self.arm_i1, theta).path_length - _trace_arrays(
            self.arm_i1.aligned(), theta
        ).path_length
        phase = w_i * d1
        if not self.arm_relay.is_aligned:
            st = _trace_arrays(self.arm_i1.aligned(), theta)
            act = _trace_from(self.arm_relay, st.position, st.slope)
            ali = _trace_from(self.arm_relay.aligned(), st.position, st.slope)
            phase = phase - w_i * (act.path_length - ali.path_length)
        return phase

    def phase_difference_q(self, qs: np.ndarray, qi: np.ndarray, phi_o: np.ndarray) -> np.ndarray:
        """Interference phase for momentum pair (qs, qi) with object phase phi_o."""
        return np.asarray(phi_o) + self.signal_phase(qs) + self.idler_phase(qi)


def _trace_from(arm: ArmPath, pos: np.ndarray, slope: np.ndarray) -> RayState:
    """Trace through an arm from an arbitrary starting ray state."""
    pos = np.array(pos, dtype=float)
    theta = np.array(slope, dtype=float)
    length = np.zeros(theta.shape[:-1])
    for el in arm.elements:
        if isinstance(el, Gap):
            length = length + el.length * (1.0 + 0.5 * np.sum(theta * theta, axis=-1))
            pos = pos + el.length * theta
        else:
            rel = pos - np.asarray(el.transverse_shift)
            length = length + np.sum(rel * rel, axis=-1) / (2.0 * el.focal_length)
            theta = theta - rel / el.focal_length
    return RayState(position=pos, slope=theta, path_length=length)


def _relay_position_coupling(arm: ArmPath) -> float:
    """d(slope_out)/d(position_in) for a ray entering the arm off axis."""
    st0 = _trace_from(arm, np.array([[0.0, 0.0]]), np.array([[0.0, 0.0]]))
    st1 = _trace_from(arm, np.array([[1e-3, 1e-3]]), np.array([[0.0, 0.0]]))
    return float((st1.slope[0, 0] - st0.slope[0, 0]) / 1e-3)


# ---- spec-level convenience operations -------------------------------------


def detector_point(setup: OpticalSetup, k_s: PhotonMomentum, which_source: int = 1) -> np.ndarray:
    """Detector-plane position where the signal momentum is focused."""
    arm = setup.arm_s1 if which_source == 1 else setup.arm_s2
    return trace_ray(arm, k_s).position


def object_point(setup: OpticalSetup, k_i: PhotonMomentum) -> np.ndarray:
    """Object-plane position probed by the idler momentum."""
    return trace_ray(setup.arm_i1, k_i).position


def match_signal_momentum(setup: OpticalSetup, k_s1: PhotonMomentum) -> PhotonMomentum:
    """Source-2 signal momentum whose detector point coincides with k_s1's."""
    q2 = setup.match_signal_q(k_s1.q)
    return PhotonMomentum.from_transverse(q2[0], q2[1], k_s1.omega)


def magnification(setup: OpticalSetup) -> float:
    return setup.magnification()


def total_phase_difference(
    setup: OpticalSetup,
    k_s1: PhotonMomentum,
    k_i1: PhotonMomentum,
    k_s2: PhotonMomentum | None = None,
    k_i2: PhotonMomentum | None = None,
    phi_o: float = 0.0,
) -> float:
    """Interference phase of Eq-style biphoton superposition, baseline-subtracted.

    The aligned configuration cancels exactly, leaving the object phase plus
    misalignment-induced phase differences.
    """
    del k_s2, k_i2  # matching is derived from the arm maps
    return float(setup.phase_difference_q(k_s1.q, k_i1.q, np.asarray(phi_o)))
