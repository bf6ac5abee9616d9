"""Setup configuration: JSON schema, presets, and construction of optical setups.

A setup is described by a single JSON document with units spelled out in the
key names (``focal_length_idler_mm``).  Unknown keys are rejected with the
offending key path.  Two presets, ``setup1`` and ``setup2``, ship with the
package; their pump refractive indices are tuned so the central collinear
signal/idler pair is exactly quasi-phase-matched.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import PhysicsError, SchemaError
from .optics import ArmPath, DetectorSpec, Gap, LensElement, OpticalSetup
from .source import CrystalSpec, GaussianSincModel, PumpSpec

__all__ = [
    "SetupConfig",
    "PRESETS",
    "preset",
    "validate_document",
    "load_setup_file",
    "serialize_setup",
    "build_setup",
    "parse_length",
]

IndexEntry = float | tuple[float, ...]


@dataclass(frozen=True)
class SetupConfig:
    """Validated setup parameters in SI units (temperature in Celsius)."""

    name: str
    pump_wavelength: float
    signal_wavelength: float
    pump_waist: float
    pump_power: float
    crystal_length: float
    poling_period: float
    temperature_c: float
    n_pump: IndexEntry
    n_signal: IndexEntry
    n_idler: IndexEntry
    focal_length_idler: float
    focal_length_detector: float
    detector_nx: int
    detector_ny: int
    detector_pitch: float
    detector_efficiency: float
    lens_shift_i1: tuple[float, float] = (0.0, 0.0)
    idler_transmittance: float = 1.0
    transmittance_s1: float = 1.0
    transmittance_s2: float = 1.0
    phase_p1: float = 0.0
    phase_p2: float = 0.0
    amplitude_scale: float = 1.0
    gap_i1_before: float | None = None
    gap_i1_after: float | None = None

    @property
    def idler_wavelength(self) -> float:
        lp, ls = self.pump_wavelength, self.signal_wavelength
        return lp * ls / (ls - lp)

    def to_dict(self) -> dict:
        """Canonical JSON document (the inverse of validate_document)."""
        def idx(v):
            return list(v) if isinstance(v, tuple) else v

        doc = {
            "name": self.name,
            "pump_wavelength_nm": self.pump_wavelength * 1e9,
            "signal_wavelength_nm": self.signal_wavelength * 1e9,
            "pump_waist_um": self.pump_waist * 1e6,
            "pump_power_mw": self.pump_power * 1e3,
            "crystal_length_mm": self.crystal_length * 1e3,
            "poling_period_um": self.poling_period * 1e6,
            "temperature_c": self.temperature_c,
            "refractive_indices": {
                "n_pump": idx(self.n_pump),
                "n_signal": idx(self.n_signal),
                "n_idler": idx(self.n_idler),
            },
            "focal_length_idler_mm": self.focal_length_idler * 1e3,
            "focal_length_detector_mm": self.focal_length_detector * 1e3,
            "detector": {
                "pixels_x": self.detector_nx,
                "pixels_y": self.detector_ny,
                "pitch_um": self.detector_pitch * 1e6,
                "efficiency": self.detector_efficiency,
            },
            "lens_shift_i1_um": [self.lens_shift_i1[0] * 1e6, self.lens_shift_i1[1] * 1e6],
            "idler_transmittance": self.idler_transmittance,
            "signal_transmittance_1": self.transmittance_s1,
            "signal_transmittance_2": self.transmittance_s2,
            "phase_p1_rad": self.phase_p1,
            "phase_p2_rad": self.phase_p2,
            "amplitude_scale": self.amplitude_scale,
        }
        if self.gap_i1_before is not None:
            doc["gap_i1_before_mm"] = self.gap_i1_before * 1e3
        if self.gap_i1_after is not None:
            doc["gap_i1_after_mm"] = self.gap_i1_after * 1e3
        return doc


# ---- schema ------------------------------------------------------------------


def _number(doc, key, path, scale=1.0, optional=False, default=None, low=None, high=None):
    if key not in doc:
        if optional:
            return default
        raise SchemaError(f"{path}{key}", "missing required key")
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{path}{key}", f"expected a number, got {type(v).__name__}")
    v = float(v) * scale
    if low is not None and v < low:
        raise PhysicsError(f"{path}{key}: value {v:g} below {low:g}")
    if high is not None and v > high:
        raise PhysicsError(f"{path}{key}: value {v:g} above {high:g}")
    return v


def _integer(doc, key, path, low=1):
    if key not in doc:
        raise SchemaError(f"{path}{key}", "missing required key")
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"{path}{key}", f"expected an integer, got {type(v).__name__}")
    if v < low:
        raise PhysicsError(f"{path}{key}: must be >= {low}")
    return v


def _index_entry(doc, key, path) -> IndexEntry:
    if key not in doc:
        raise SchemaError(f"{path}{key}", "missing required key")
    v = doc[key]
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        if v <= 0:
            raise PhysicsError(f"{path}{key}: refractive index must be positive")
        return float(v)
    if isinstance(v, list) and v and all(
        isinstance(c, (int, float)) and not isinstance(c, bool) for c in v
    ):
        return tuple(float(c) for c in v)
    raise SchemaError(f"{path}{key}", "expected a number or a coefficient list")


def _reject_unknown(doc, known, path=""):
    for key in doc:
        if key not in known:
            raise SchemaError(f"{path}{key}", "unknown key")


_TOP_KEYS = {
    "name", "pump_wavelength_nm", "signal_wavelength_nm", "pump_waist_um",
    "pump_power_mw", "crystal_length_mm", "poling_period_um", "temperature_c",
    "refractive_indices", "focal_length_idler_mm", "focal_length_detector_mm",
    "detector", "lens_shift_i1_um", "idler_transmittance",
    "signal_transmittance_1", "signal_transmittance_2", "phase_p1_rad",
    "phase_p2_rad", "amplitude_scale", "gap_i1_before_mm", "gap_i1_after_mm",
}


def validate_document(doc: dict) -> SetupConfig:
    """Validate a setup JSON document and convert to SI units."""
    if not isinstance(doc, dict):
        raise SchemaError("$", "setup document must be a JSON object")
    _reject_unknown(doc, _TOP_KEYS)

    name = doc.get("name", "custom")
    if not isinstance(name, str):
        raise SchemaError("name", "expected a string")

    lam_p = _number(doc, "pump_wavelength_nm", "", 1e-9, low=1e-9)
    lam_s = _number(doc, "signal_wavelength_nm", "", 1e-9, low=1e-9)
    if lam_s <= lam_p:
        raise PhysicsError("signal_wavelength_nm: signal must be longer than the pump")
    waist = _number(doc, "pump_waist_um", "", 1e-6)
    if waist <= 0:
        raise PhysicsError("pump_waist_um: waist must be positive")

    idx_doc = doc.get("refractive_indices")
    if not isinstance(idx_doc, dict):
        raise SchemaError("refractive_indices", "missing or not an object")
    _reject_unknown(idx_doc, {"n_pump", "n_signal", "n_idler"}, "refractive_indices.")

    det_doc = doc.get("detector")
    if not isinstance(det_doc, dict):
        raise SchemaError("detector", "missing or not an object")
    _reject_unknown(det_doc, {"pixels_x", "pixels_y", "pitch_um", "efficiency"}, "detector.")

    shift = doc.get("lens_shift_i1_um", [0.0, 0.0])
    if (
        not isinstance(shift, list)
        or len(shift) != 2
        or not all(isinstance(s, (int, float)) and not isinstance(s, bool) for s in shift)
    ):
        raise SchemaError("lens_shift_i1_um", "expected a pair of numbers [dx, dy]")

    return SetupConfig(
        name=name,
        pump_wavelength=lam_p,
        signal_wavelength=lam_s,
        pump_waist=waist,
        pump_power=_number(doc, "pump_power_mw", "", 1e-3, optional=True, default=50e-3, low=0.0),
        crystal_length=_number(doc, "crystal_length_mm", "", 1e-3, low=1e-9),
        poling_period=_number(doc, "poling_period_um", "", 1e-6, low=1e-12),
        temperature_c=_number(doc, "temperature_c", ""),
        n_pump=_index_entry(idx_doc, "n_pump", "refractive_indices."),
        n_signal=_index_entry(idx_doc, "n_signal", "refractive_indices."),
        n_idler=_index_entry(idx_doc, "n_idler", "refractive_indices."),
        focal_length_idler=_number(doc, "focal_length_idler_mm", "", 1e-3, low=1e-6),
        focal_length_detector=_number(doc, "focal_length_detector_mm", "", 1e-3, low=1e-6),
        detector_nx=_integer(det_doc, "pixels_x", "detector."),
        detector_ny=_integer(det_doc, "pixels_y", "detector."),
        detector_pitch=_number(det_doc, "pitch_um", "detector.", 1e-6, low=1e-9),
        detector_efficiency=_number(det_doc, "efficiency", "detector.", optional=True,
                                    default=1.0, low=0.0, high=1.0),
        lens_shift_i1=(float(shift[0]) * 1e-6, float(shift[1]) * 1e-6),
        idler_transmittance=_number(doc, "idler_transmittance", "", optional=True,
                                    default=1.0, low=0.0, high=1.0),
        transmittance_s1=_number(doc, "signal_transmittance_1", "", optional=True,
                                 default=1.0, low=0.0, high=1.0),
        transmittance_s2=_number(doc, "signal_transmittance_2", "", optional=True,
                                 default=1.0, low=0.0, high=1.0),
        phase_p1=_number(doc, "phase_p1_rad", "", optional=True, default=0.0),
        phase_p2=_number(doc, "phase_p2_rad", "", optional=True, default=0.0),
        amplitude_scale=_number(doc, "amplitude_scale", "", optional=True, default=1.0, low=0.0),
        gap_i1_before=_number(doc, "gap_i1_before_mm", "", 1e-3, optional=True, low=0.0),
        gap_i1_after=_number(doc, "gap_i1_after_mm", "", 1e-3, optional=True, low=0.0),
    )


def serialize_setup(cfg: SetupConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"


def load_setup_file(path) -> SetupConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"not valid JSON: {exc}") from exc
    return validate_document(doc)


# ---- presets -----------------------------------------------------------------

# n_pump values solve n_p/lambda_p = n_s/lambda_s + n_i/lambda_i + 1/poling_period
# so the collinear central pair has zero quasi-phase mismatch.
_PRESET_DOCS = {
    "setup1": {
        "name": "setup1",
        "pump_wavelength_nm": 532.0,
        "signal_wavelength_nm": 810.0,
        "pump_waist_um": 300.0,
        "pump_power_mw": 50.0,
        "crystal_length_mm": 1.0,
        "poling_period_um": 9.675,
        "temperature_c": 85.0,
        "refractive_indices": {
            "n_pump": 1.890033993684,
            "n_signal": 1.845,
            "n_idler": 1.816,
        },
        "focal_length_idler_mm": 75.0,
        "focal_length_detector_mm": 150.0,
        "detector": {"pixels_x": 1000, "pixels_y": 1000, "pitch_um": 5.0, "efficiency": 1.0},
    },
    "setup2": {
        "name": "setup2",
        "pump_wavelength_nm": 405.0,
        "signal_wavelength_nm": 842.0,
        "pump_waist_um": 300.0,
        "pump_power_mw": 50.0,
        "crystal_length_mm": 1.0,
        "poling_period_um": 5.33,
        "temperature_c": 75.0,
        "refractive_indices": {
            "n_pump": 1.921175014372,
            "n_signal": 1.840,
            "n_idler": 1.850,
        },
        "focal_length_idler_mm": 75.0,
        "focal_length_detector_mm": 150.0,
        "detector": {"pixels_x": 1000, "pixels_y": 1000, "pitch_um": 5.0, "efficiency": 1.0},
    },
}

PRESETS = {name: validate_document(dict(doc)) for name, doc in _PRESET_DOCS.items()}


def preset(name: str) -> SetupConfig:
    if name not in PRESETS:
        raise SchemaError("setup", f"unknown preset {name!r}")
    return PRESETS[name]


def with_overrides(cfg: SetupConfig, **kwargs) -> SetupConfig:
    return dataclasses.replace(cfg, **kwargs)


# ---- unit parsing (CLI flag values like "0.3mm") -------------------------------

_LENGTH_UNITS = {"nm": 1e-9, "um": 1e-6, "mm": 1e-3, "cm": 1e-2, "m": 1.0}


def parse_length(text: str) -> float:
    """Parse a length with unit suffix: '0.3mm', '200um', '1.5e-3m'."""
    text = text.strip()
    for unit in sorted(_LENGTH_UNITS, key=len, reverse=True):
        if text.endswith(unit):
            try:
                return float(text[: -len(unit)]) * _LENGTH_UNITS[unit]
            except ValueError:
                break
    raise SchemaError("length", f"cannot parse length {text!r} (expected e.g. '0.3mm')")


# ---- construction --------------------------------------------------------------


def _index_model(cfg: SetupConfig):
    """Wavelength-to-index callable from the configured constants/polynomials.

    Constant entries apply to their configured wavelength; polynomial entries
    are evaluated in ascending powers of the wavelength in micrometers.
    """
    refs = [
        (cfg.pump_wavelength, cfg.n_pump),
        (cfg.signal_wavelength, cfg.n_signal),
        (cfg.idler_wavelength, cfg.n_idler),
    ]

    def model(wavelength: float) -> float:
        ref, entry = min(refs, key=lambda r: abs(r[0] - wavelength))
        if abs(ref - wavelength) > 0.005 * ref:
            raise PhysicsError(
                f"no refractive index configured near wavelength {wavelength * 1e9:.1f} nm"
            )
        if isinstance(entry, tuple):
            return float(np.polynomial.polynomial.polyval(wavelength * 1e6, entry))
        return entry

    return model


def build_setup(cfg: SetupConfig) -> OpticalSetup:
    """Construct the full interferometer from a validated configuration."""
    crystal = CrystalSpec(
        length_z=cfg.crystal_length,
        poling_period=cfg.poling_period,
        temperature_c=cfg.temperature_c,
        index_model=_index_model(cfg),
    )
    pump = PumpSpec(wavelength=cfg.pump_wavelength, waist=cfg.pump_waist, power=cfg.pump_power)
    model = GaussianSincModel(
        crystal=crystal,
        pump=pump,
        signal_wavelength=cfg.signal_wavelength,
        amplitude_scale=cfg.amplitude_scale,
    )

    f_i = cfg.focal_length_idler
    f_d = cfg.focal_length_detector
    g_before = cfg.gap_i1_before if cfg.gap_i1_before is not None else f_i
    g_after = cfg.gap_i1_after if cfg.gap_i1_after is not None else f_i

    arm_i1 = ArmPath(
        (
            Gap(g_before),
            LensElement(f_i, transverse_shift=cfg.lens_shift_i1, axial_position=g_before),
            Gap(g_after),
        )
    )
    arm_relay = ArmPath((Gap(f_i), LensElement(f_i, axial_position=f_i), Gap(f_i)))
    # source 1 signal: 4f relay onto the plane of source 2, then the far-field stage
    arm_s1 = ArmPath(
        (
            Gap(f_i),
            LensElement(f_i, axial_position=f_i),
            Gap(2 * f_i),
            LensElement(f_i, axial_position=3 * f_i),
            Gap(f_i + f_d),
            LensElement(f_d, axial_position=4 * f_i + f_d),
            Gap(f_d),
        ),
        transmittance=cfg.transmittance_s1,
    )
    arm_s2 = ArmPath(
        (Gap(f_d), LensElement(f_d, axial_position=f_d), Gap(f_d)),
        transmittance=cfg.transmittance_s2,
    )
    detector = DetectorSpec(
        nx=cfg.detector_nx,
        ny=cfg.detector_ny,
        pitch=cfg.detector_pitch,
        efficiency=cfg.detector_efficiency,
    )
    return OpticalSetup(
        model1=model,
        model2=model,
        arm_s1=arm_s1,
        arm_s2=arm_s2,
        arm_i1=arm_i1,
        arm_relay=arm_relay,
        detector=detector,
        focal_length_idler=f_i,
        focal_length_detector=f_d,
        phase_p1=cfg.phase_p1,
        phase_p2=cfg.phase_p2,
        idler_transmittance=cfg.idler_transmittance,
        config=cfg,
    )
