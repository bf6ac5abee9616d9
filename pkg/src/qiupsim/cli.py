"""Command-line interface: simulate, kernel, convolve, deconvolve, resolve, sweep."""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import analysis, config, fastpath, restore
from .detection import QmcSampler, add_noise, render_detector_images, visibility_map
from .errors import QiupError
from .gridio import write_csv_matrix, write_metadata, write_scaled_pgm
from .scene import bar_target, load_mask, three_slit, uniform_mask
from .source import normalized_kernel

__all__ = ["main", "parse_setup", "run_command"]


def parse_setup(spec: str) -> config.SetupConfig:
    """Resolve a --setup value: preset name or path to a JSON document."""
    if spec in config.PRESETS:
        return config.preset(spec)
    return config.load_setup_file(spec)


def _parse_object(spec: str):
    if spec == "bars":
        return bar_target()
    if spec == "uniform":
        return uniform_mask()
    if spec.startswith("slits:"):
        return three_slit(float(spec.split(":", 1)[1]) * 1e-6)
    if spec.startswith("file:"):
        return load_mask(spec.split(":", 1)[1])
    raise QiupError(f"unknown object {spec!r} (use bars, uniform, slits:<d_um>, file:<path>)")


def _apply_flags(cfg: config.SetupConfig, args) -> config.SetupConfig:
    updates = {}
    if getattr(args, "lens_shift_i1", None):
        updates["lens_shift_i1"] = (config.parse_length(args.lens_shift_i1), 0.0)
    if getattr(args, "waist", None):
        updates["pump_waist"] = config.parse_length(args.waist)
    if getattr(args, "pixels", None):
        updates["detector_nx"] = args.pixels
        updates["detector_ny"] = args.pixels
    if getattr(args, "pitch", None):
        updates["detector_pitch"] = config.parse_length(args.pitch)
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_map(out: Path, stem: str, values: np.ndarray, meta: dict):
    scale = write_scaled_pgm(out / f"{stem}.pgm", np.maximum(values, 0.0))
    write_csv_matrix(out / f"{stem}.csv", values)
    write_metadata(out / f"{stem}.json", {**meta, "pgm_scale": scale})


def _cmd_simulate(args) -> int:
    cfg = _apply_flags(parse_setup(args.setup), args)
    setup = config.build_setup(cfg)
    mask = _parse_object(args.object)
    sampler = QmcSampler(n=args.samples, seed=args.seed)
    plus, minus = render_detector_images(setup, mask, sampler, workers=args.workers)
    if args.noise_sigma > 0:
        plus = add_noise(plus, args.noise_sigma, args.noise_region, seed=args.seed)
        minus = add_noise(minus, args.noise_sigma, args.noise_region, seed=args.seed + 1)
    vis = visibility_map(plus, minus, clip=args.noise_sigma > 0)
    out = _outdir(args)
    _write_map(out, "gamma_plus", plus.values, plus.meta)
    _write_map(out, "gamma_minus", minus.values, minus.meta)
    _write_map(out, "visibility", vis.values, plus.meta)
    summary = f"visibility min {vis.values.min():.4f} max {vis.values.max():.4f}"
    if args.object == "bars":
        m = analysis.measure_magnification(vis.values, setup.detector.pitch, setup.magnification())
        summary += f", measured magnification {m:.4f}"
    print(summary)
    return 0


def _cmd_kernel(args) -> int:
    cfg = _apply_flags(parse_setup(args.setup), args)
    setup = config.build_setup(cfg)
    kernel = normalized_kernel(setup.model1)
    out = _outdir(args)
    write_csv_matrix(out / "kernel.csv", kernel.values)
    write_metadata(out / "kernel.json", {
        "extent_inv_m": kernel.extent,
        "nx": kernel.qx.size,
        "ny": kernel.qy.size,
        "cell_area": kernel.cell_area,
    })
    print(f"kernel sum*area {kernel.values.sum() * kernel.cell_area:.9f}")
    return 0


def _fastpath_visibility(setup, mask):
    kernel = normalized_kernel(setup.model1)
    if setup.is_aligned and not mask.has_phase:
        return fastpath.convolve_object(kernel, mask, setup.idler_transmittance, setup)
    family = fastpath.build_shift_variant_family(setup, kernel)
    return fastpath.shift_variant_convolve(family, mask)


def _cmd_convolve(args) -> int:
    cfg = _apply_flags(parse_setup(args.setup), args)
    setup = config.build_setup(cfg)
    vis = _fastpath_visibility(setup, _parse_object(args.object))
    out = _outdir(args)
    _write_map(out, "visibility_fast", vis.values, {"setup": cfg.name})
    print(f"visibility min {vis.values.min():.4f} max {vis.values.max():.4f}")
    return 0


def _cmd_deconvolve(args) -> int:
    cfg = _apply_flags(parse_setup(args.setup), args)
    setup = config.build_setup(cfg)
    kernel = normalized_kernel(setup.model1)
    if args.input:
        from .gridio import read_csv_matrix
        from .detection import VisibilityMap
        values = np.clip(read_csv_matrix(args.input), 0.0, None)
        vis = VisibilityMap(values=values, clipped=np.zeros(values.shape, dtype=bool),
                            pitch=setup.detector.pitch)
    else:
        vis = _fastpath_visibility(setup, _parse_object(args.object))
    psf = fastpath.detector_psf(setup, kernel)
    restored = restore.richardson_lucy(vis, psf, args.iterations)
    out = _outdir(args)
    _write_map(out, "visibility_deconvolved", restored.values,
               {"setup": cfg.name, "iterations": args.iterations})
    print(f"deconvolved min {restored.values.min():.4f} max {restored.values.max():.4f}")
    return 0


def _cmd_resolve(args) -> int:
    cfg = _apply_flags(parse_setup(args.setup), args)
    setup = config.build_setup(cfg)
    result = analysis.resolution_limit(setup, deconvolve=args.deconvolve,
                                       iterations=args.iterations)
    print(f"d_limit {result.d_limit * 1e6:.2f} um (waist {result.waist * 1e6:.0f} um, "
          f"deconvolved {result.deconvolved})")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _apply_flags(parse_setup(args.setup), args)
    setup = config.build_setup(cfg)
    waists = [config.parse_length(w) for w in args.waists.split(",")]
    results = analysis.waist_sweep(setup, waists, deconvolve=args.deconvolve,
                                   iterations=args.iterations)
    out = _outdir(args)
    lines = ["waist_um,d_limit_um,deconvolved,R_trace_file"]
    for w, res in zip(waists, results):
        if isinstance(res, Exception):
            print(f"waist {w * 1e6:.0f} um: {type(res).__name__}: {res}", file=sys.stderr)
            lines.append(f"{w * 1e6:.9g},,{str(args.deconvolve).lower()},")
            continue
        trace = out / f"r_trace_{int(round(w * 1e6))}um.csv"
        write_csv_matrix(trace, np.array(res.samples))
        lines.append(
            f"{w * 1e6:.9g},{res.d_limit * 1e6:.9g},{str(res.deconvolved).lower()},{trace.name}"
        )
    (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    print(f"swept {len(waists)} waists -> {out / 'sweep.csv'}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qiupsim", description="Undetected-photon imaging simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_object=True):
        p.add_argument("--setup", default="setup1", help="preset name or JSON file path")
        if with_object:
            p.add_argument("--object", default="bars",
                           help="bars | uniform | slits:<d_um> | file:<path>")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--lens-shift-i1", default=None, help="transverse lens shift, e.g. 0.3mm")
        p.add_argument("--waist", default=None, help="pump waist override, e.g. 200um")
        p.add_argument("--pixels", type=int, default=None, help="square detector crop override")
        p.add_argument("--pitch", default=None, help="detector pitch override, e.g. 10um")
        p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("simulate", help="full QMC detector images + visibility")
    common(p)
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--noise-region", default="all", choices=["left", "right", "all", "none"])
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("kernel", help="export the normalized source kernel")
    common(p, with_object=False)
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("convolve", help="fast-path visibility map")
    common(p)
    p.set_defaults(func=_cmd_convolve)

    p = sub.add_parser("deconvolve", help="Richardson-Lucy restoration")
    common(p)
    p.add_argument("--iterations", type=int, default=50)
    p.add_argument("--input", default=None, help="visibility CSV to restore (default: compute)")
    p.set_defaults(func=_cmd_deconvolve)

    p = sub.add_parser("resolve", help="three-slit resolution limit")
    common(p, with_object=False)
    p.add_argument("--deconvolve", action="store_true")
    p.add_argument("--iterations", type=int, default=50)
    p.set_defaults(func=_cmd_resolve)

    p = sub.add_parser("sweep", help="resolution limit vs pump waist")
    common(p, with_object=False)
    p.add_argument("--waists", required=True, help="comma list, e.g. 100um,200um,300um")
    p.add_argument("--deconvolve", action="store_true")
    p.add_argument("--iterations", type=int, default=50)
    p.set_defaults(func=_cmd_sweep)
    return parser


def run_command(argv) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QiupError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
