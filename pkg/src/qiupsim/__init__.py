"""Simulator for quantum imaging with undetected photons.

A pair of nonlinear crystals emits signal/idler photon pairs; the idler probes
an object and is never detected, while the interference of the signal beams
carries the image.  The package provides the biphoton source model, paraxial
arm optics, a quasi-Monte Carlo detector simulation, a fast convolution
approximation of the visibility, Richardson-Lucy restoration, and resolution
analysis, plus a CLI and an HTTP service.
"""

from .analysis import (
    ResolutionResult,
    measure_magnification,
    resolution_limit,
    slit_ratio,
    stripe_period,
    waist_sweep,
)
from .config import PRESETS, SetupConfig, build_setup, preset
from .detection import (
    DetectorImage,
    QmcSampler,
    VisibilityMap,
    add_noise,
    render_detector_images,
    visibility_map,
)
from .fastpath import (
    ShiftVariantKernelFamily,
    build_shift_variant_family,
    convolve_object,
    detector_psf,
    shift_variant_convolve,
)
from .gridio import read_csv_matrix, read_pgm16, write_csv_matrix, write_pgm16
from .optics import ArmPath, DetectorSpec, Gap, LensElement, OpticalSetup, trace_ray
from .restore import richardson_lucy, rmse
from .scene import (
    ObjectMask,
    RectFeature,
    bar_target,
    grid_mask,
    load_mask,
    save_mask,
    three_slit,
    uniform_mask,
)
from .source import (
    CrystalSpec,
    GaussianSincModel,
    KernelGrid,
    PhotonMomentum,
    PumpSpec,
    normalized_kernel,
    phase_mismatch,
    transition_amplitude,
)

__version__ = "0.1.0"

__all__ = [
    "ArmPath", "CrystalSpec", "DetectorImage", "DetectorSpec", "Gap",
    "GaussianSincModel", "KernelGrid", "LensElement", "ObjectMask",
    "OpticalSetup", "PRESETS", "PhotonMomentum", "PumpSpec", "QmcSampler",
    "RectFeature", "ResolutionResult", "SetupConfig", "ShiftVariantKernelFamily",
    "VisibilityMap", "add_noise", "bar_target", "build_setup",
    "build_shift_variant_family", "convolve_object", "detector_psf", "grid_mask",
    "load_mask", "measure_magnification", "normalized_kernel", "phase_mismatch",
    "preset", "read_csv_matrix", "read_pgm16", "render_detector_images",
    "resolution_limit", "richardson_lucy", "rmse", "save_mask",
    "shift_variant_convolve", "slit_ratio", "stripe_period", "three_slit",
    "trace_ray", "transition_amplitude", "uniform_mask", "visibility_map",
    "waist_sweep", "write_csv_matrix", "write_pgm16",
]
