"""HTTP facade over the fast path and the resolution analysis.

Stateless JSON endpoints for the interactive UI.  Grids travel as base64
little-endian float32 with the dimensions in a header object.  The full QMC
engine is deliberately not exposed here (minutes-scale runtimes).
"""

from __future__ import annotations

import argparse
import base64
import dataclasses

import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import analysis, config, fastpath
from .errors import (
    FeatureNotFound,
    NoBracket,
    PhysicsError,
    QiupError,
    SchemaError,
    UnsupportedMisalignment,
)
from .scene import bar_target, three_slit, uniform_mask
from .source import normalized_kernel

__all__ = ["app", "main"]

app = FastAPI(title="qiupsim", version="0.1")
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)

DEFAULT_GRID = 512


@app.exception_handler(QiupError)
async def _qiup_error(request: Request, exc: QiupError):
    status = 422
    if isinstance(exc, SchemaError):
        status = 400
    elif isinstance(exc, UnsupportedMisalignment):
        status = 409
    body = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, SchemaError):
        body["key"] = exc.path
    return JSONResponse(status_code=status, content=body)


def _encode_grid(values: np.ndarray, pitch: float) -> dict:
    data = np.ascontiguousarray(values, dtype="<f4")
    return {
        "width": int(values.shape[1]),
        "height": int(values.shape[0]),
        "pitch_um": pitch * 1e6,
        "dtype": "float32-le",
        "data": base64.b64encode(data.tobytes()).decode("ascii"),
    }


def _resolve_setup(body: dict) -> config.SetupConfig:
    preset_name = body.get("preset", "setup1")
    if not isinstance(preset_name, str):
        raise SchemaError("preset", "expected a preset name string")
    if preset_name not in config.PRESETS:
        return None  # handled by caller as 404
    doc = dict(config._PRESET_DOCS[preset_name])
    overrides = body.get("overrides", {})
    if not isinstance(overrides, dict):
        raise SchemaError("overrides", "expected an object")
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(doc.get(key), dict):
            doc[key] = {**doc[key], **value}
        else:
            doc[key] = value
    return config.validate_document(doc)


def _resolve_object(body: dict):
    spec = body.get("object", {"kind": "bars"})
    if not isinstance(spec, dict):
        raise SchemaError("object", "expected an object descriptor")
    kind = spec.get("kind", "bars")
    if kind == "bars":
        return bar_target()
    if kind == "uniform":
        return uniform_mask()
    if kind == "slits":
        width = spec.get("slit_width_um")
        if not isinstance(width, (int, float)) or isinstance(width, bool):
            raise SchemaError("object.slit_width_um", "expected a number")
        if width <= 0:
            raise PhysicsError("object.slit_width_um: slit width must be positive")
        return three_slit(float(width) * 1e-6)
    raise SchemaError("object.kind", f"unknown object kind {kind!r}")


def _grid_override(body: dict, cfg: config.SetupConfig) -> config.SetupConfig:
    grid = body.get("grid", {})
    if not isinstance(grid, dict):
        raise SchemaError("grid", "expected an object")
    pixels = grid.get("pixels", DEFAULT_GRID)
    pitch = grid.get("pitch_um", cfg.detector_pitch * 1e6)
    if not isinstance(pixels, int) or isinstance(pixels, bool) or pixels < 1:
        raise SchemaError("grid.pixels", "expected a positive integer")
    if not isinstance(pitch, (int, float)) or isinstance(pitch, bool) or pitch <= 0:
        raise SchemaError("grid.pitch_um", "expected a positive number")
    return dataclasses.replace(
        cfg, detector_nx=pixels, detector_ny=pixels, detector_pitch=float(pitch) * 1e-6
    )


@app.post("/v1/visibility")
async def visibility(body: dict):
    cfg = _resolve_setup(body)
    if cfg is None:
        return JSONResponse(status_code=404, content={"error": "unknown preset"})
    cfg = _grid_override(body, cfg)
    setup = config.build_setup(cfg)
    mask = _resolve_object(body)
    kernel = normalized_kernel(setup.model1)
    if setup.is_aligned and not mask.has_phase:
        vis = fastpath.convolve_object(kernel, mask, setup.idler_transmittance, setup)
    else:
        family = fastpath.build_shift_variant_family(setup, kernel)
        vis = fastpath.shift_variant_convolve(family, mask)
    return {
        "grid": _encode_grid(vis.values, vis.pitch),
        "summary": {
            "min": float(vis.values.min()),
            "max": float(vis.values.max()),
            "magnification": setup.magnification(),
        },
    }


def _resolution_csv(waists, results, deconvolve) -> str:
    lines = ["waist_um,d_limit_um,deconvolved"]
    for w, res in zip(waists, results):
        if isinstance(res, Exception):
            lines.append(f"{w * 1e6:.9g},,{str(deconvolve).lower()}")
        else:
            lines.append(f"{w * 1e6:.9g},{res.d_limit * 1e6:.9g},{str(res.deconvolved).lower()}")
    return "\n".join(lines) + "\n"


@app.post("/v1/resolution")
async def resolution(body: dict):
    cfg = _resolve_setup(body)
    if cfg is None:
        return JSONResponse(status_code=404, content={"error": "unknown preset"})
    waists_um = body.get("waists_um")
    if not isinstance(waists_um, list) or not waists_um or not all(
        isinstance(w, (int, float)) and not isinstance(w, bool) and w > 0 for w in waists_um
    ):
        raise SchemaError("waists_um", "expected a non-empty list of positive numbers")
    deconvolve = bool(body.get("deconvolve", False))
    setup = config.build_setup(cfg)
    waists = [float(w) * 1e-6 for w in waists_um]
    results = analysis.waist_sweep(setup, waists, deconvolve=deconvolve)
    points = []
    for w, res in zip(waists, results):
        if isinstance(res, (NoBracket, FeatureNotFound)):
            points.append({"waist_um": w * 1e6, "error": str(res)})
        else:
            points.append({
                "waist_um": w * 1e6,
                "d_limit_um": res.d_limit * 1e6,
                "deconvolved": res.deconvolved,
                "samples": [[d * 1e6, r] for d, r in res.samples],
            })
    return {"points": points, "csv": _resolution_csv(waists, results, deconvolve)}


@app.get("/v1/kernel")
async def kernel(setup: str = Query("setup1"), waist: float = Query(None)):
    if setup not in config.PRESETS:
        return JSONResponse(status_code=404, content={"error": "unknown preset"})
    cfg = config.preset(setup)
    if waist is not None:
        if waist <= 0:
            raise PhysicsError("waist: pump waist must be positive")
        cfg = dataclasses.replace(cfg, pump_waist=waist * 1e-6)
    model = config.build_setup(cfg).model1
    grid = normalized_kernel(model)
    step = float(grid.qx[1] - grid.qx[0])
    return {
        "grid": {
            "width": int(grid.qx.size),
            "height": int(grid.qy.size),
            "step_inv_m": step,
            "dtype": "float32-le",
            "data": base64.b64encode(
                np.ascontiguousarray(grid.values, dtype="<f4").tobytes()
            ).decode("ascii"),
        },
        "sum_times_area": float(grid.values.sum() * grid.cell_area),
        "extent_inv_m": grid.extent,
    }


def main(argv=None) -> None:
    import uvicorn

    parser = argparse.ArgumentParser(prog="qiupsim-service")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--bind", default="127.0.0.1")
    args = parser.parse_args(argv)
    uvicorn.run(app, host=args.bind, port=args.port)


if __name__ == "__main__":
    main()
