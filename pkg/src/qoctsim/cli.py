"""Command-line front end.

Subcommands: calibrate, ascan, compare, phantom, volume, slice, surface.
Data goes to files and standard output only; diagnostics go to the error
stream. Exit codes: 0 success, 1 usage error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import datetime
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classical import envelope_fwhm, interferogram
from .config import RunConfig, parse_config
from .engine import ascan, dip_fwhm
from .errors import QoctError
from .figures import (
    save_ascan_figure,
    save_comparison_figure,
    save_section_figure,
    save_topography_figure,
)
from .formats import (
    parse_stack_file,
    read_volume,
    write_comparison_csv,
    write_curve_csv,
    write_manifest,
    write_pgm,
    write_surface_csv,
    write_volume,
)
from .phantom import generate
from .sample import LayerStack, vacuum_like_layer
from .scan import bscan, cscan, detect_surface, run_volume
from .spectrum import calibrate_bandwidth


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        raise UsageError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="run configuration file")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one configuration key (repeatable)",
    )
    parser.add_argument("--outdir", metavar="DIR", help="output directory")
    parser.add_argument(
        "--no-figures", action="store_true", help="skip rendering PNG figures"
    )


def build_parser() -> _Parser:
    parser = _Parser(
        prog="qoctsim",
        description="Coincidence-dip tomography simulator for layered dispersive samples.",
    )
    parser.add_argument("--version", action="version", version=f"qoctsim {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("calibrate", help="print the bandwidth for a target dip width")
    p.add_argument("--dip-fwhm-um", type=float, required=True)

    p = sub.add_parser("ascan", help="single coincidence depth scan")
    _add_common(p)
    p.add_argument("--stack", metavar="FILE", help="stack description file")
    p.add_argument(
        "--mirror",
        metavar="DEPTH_UM:R",
        default="0:1",
        help="single mirror sample (ignored when --stack is given)",
    )

    p = sub.add_parser("compare", help="coincidence dip versus classical envelope under dispersion")
    _add_common(p)
    p.add_argument("--beta2-l-fs2", type=float, default=360.0,
                   help="accumulated group-velocity dispersion in fs^2")
    p.add_argument("--length-mm", type=float, default=10.0,
                   help="thickness of the dispersive layer")
    p.add_argument("--depth-um", type=float, default=0.0, help="mirror depth")

    p = sub.add_parser("phantom", help="generate the synthetic sample and its manifest")
    _add_common(p)

    p = sub.add_parser("volume", help="full volumetric acquisition")
    _add_common(p)
    p.add_argument("--workers", type=int, default=1, help="parallel column workers")

    p = sub.add_parser("slice", help="extract a section image from a volume file")
    _add_common(p)
    p.add_argument("volume", metavar="VOLUME", help="volume file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--cscan", type=int, metavar="K", help="transverse section at z index K")
    group.add_argument("--bscan-x", type=int, metavar="I", help="y-z section at x index I")
    group.add_argument("--bscan-y", type=int, metavar="J", help="x-z section at y index J")
    p.add_argument("--vmin", type=float, help="intensity mapped to black")
    p.add_argument("--vmax", type=float, help="intensity mapped to white")

    p = sub.add_parser("surface", help="extract the surface topography from a volume file")
    _add_common(p)
    p.add_argument("volume", metavar="VOLUME", help="volume file")
    p.add_argument("--threshold", type=float, default=0.9,
                   help="a column needs a dip below this value to count")

    return parser


def _setup(args) -> tuple[RunConfig, Path]:
    cfg = parse_config(args.config, args.overrides)
    outdir = Path(args.outdir) if args.outdir else Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    return cfg, outdir


def _info() -> dict:
    return {
        "generator": f"qoctsim {__version__}",
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


def _emit_manifest(outdir: Path, cfg: RunConfig, extra: dict, warnings=()) -> None:
    sections = cfg.manifest_sections()
    sections.update(extra)
    write_manifest(outdir / "manifest.txt", sections, warnings=warnings, info=_info())


def _sample_stack(args, cfg: RunConfig) -> LayerStack:
    if args.stack:
        return parse_stack_file(args.stack)
    try:
        depth_text, _, r_text = args.mirror.partition(":")
        return LayerStack.single_mirror(float(depth_text), float(r_text or "1"))
    except ValueError as exc:
        raise UsageError(f"--mirror expects DEPTH_UM:R, got '{args.mirror}'") from exc


def _cmd_calibrate(args) -> int:
    sigma = calibrate_bandwidth(args.dip_fwhm_um * 1e-6)
    print(f"{sigma:.6e}")
    return 0


def _cmd_ascan(args) -> int:
    cfg, outdir = _setup(args)
    spectrum = cfg.source.build()
    stack = _sample_stack(args, cfg)
    scan_cfg = cfg.scan
    curve = ascan(
        spectrum,
        stack,
        scan_cfg.z_start_um,
        scan_cfg.z_step_um,
        scan_cfg.z_count,
        washout_trials=scan_cfg.washout_trials,
        rng_seed=cfg.counting.seed,
    )
    csv_path = outdir / "ascan.csv"
    write_curve_csv(csv_path, curve)
    files = {"ascan_csv": csv_path.name}
    if not args.no_figures:
        save_ascan_figure(outdir / "ascan.png", curve)
        files["ascan_png"] = "ascan.png"
    _emit_manifest(outdir, cfg, {"files": files})
    print(f"ascan: {curve.z_um.size} points, minimum {curve.values.min():.4f} "
          f"at z = {curve.z_um[np.argmin(curve.values)]:g} um -> {csv_path}")
    return 0


def _cmd_compare(args) -> int:
    cfg, outdir = _setup(args)
    spectrum = cfg.source.build()
    length_um = args.length_mm * 1000.0
    beta2 = (args.beta2_l_fs2 * 1e-30) / (args.length_mm * 1e-3) if args.length_mm else 0.0
    layer = vacuum_like_layer(length_um, spectrum.center_frequency, beta2_s2_per_m=beta2)
    stack = LayerStack.single_mirror(args.depth_um, 1.0, layers_above=layer)

    z_step = 0.05
    half_range = 45.0
    n_steps = int(2 * half_range / z_step) + 1
    curve = ascan(spectrum, stack, args.depth_um - half_range, z_step, n_steps)
    ig = interferogram(spectrum, stack, curve.z_um)

    csv_path = outdir / "compare.csv"
    write_comparison_csv(csv_path, curve.z_um, curve.values, ig.envelope)
    files = {"compare_csv": csv_path.name}
    if not args.no_figures:
        save_comparison_figure(outdir / "compare.png", curve.z_um, curve.values, ig.envelope)
        files["compare_png"] = "compare.png"

    qoct_width = dip_fwhm(curve)
    oct_width = envelope_fwhm(ig)
    _emit_manifest(
        outdir,
        cfg,
        {
            "comparison": {
                "beta2_l_fs2": args.beta2_l_fs2,
                "qoct_fwhm_um": qoct_width,
                "oct_fwhm_um": oct_width,
            },
            "files": files,
        },
    )
    print("qoct_fwhm_um,oct_fwhm_um,beta2L_fs2")
    print(f"{qoct_width:.6g},{oct_width:.6g},{args.beta2_l_fs2:.6g}")
    return 0


def _cmd_phantom(args) -> int:
    cfg, outdir = _setup(args)
    sample = generate(cfg.phantom)
    files = {}
    if not args.no_figures:
        xs = np.arange(0.0, cfg.phantom.x_extent_um + 1e-9, 1.0)
        ys = np.arange(0.0, cfg.phantom.y_extent_um + 1e-9, 1.0)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        depth = cfg.phantom.z_offset_um - sample.surface_height(gx.ravel(), gy.ravel())
        save_topography_figure(
            outdir / "phantom_surface.png", xs, ys, depth.reshape(gx.shape)
        )
        files["phantom_surface_png"] = "phantom_surface.png"
    _emit_manifest(outdir, cfg, {"files": files} if files else {})
    print(f"phantom: seed {cfg.phantom.seed}, cells "
          f"{cfg.phantom.cell_width_um:g} x {cfg.phantom.cell_length_um:g} um -> "
          f"{outdir / 'manifest.txt'}")
    return 0


def _cmd_volume(args) -> int:
    cfg, outdir = _setup(args)
    spectrum = cfg.source.build()
    sample = generate(cfg.phantom)
    volume = run_volume(sample, spectrum, cfg.scan, n_workers=args.workers)
    vol_path = outdir / "volume.qvol"
    write_volume(vol_path, volume)
    _emit_manifest(outdir, cfg, {"files": {"volume": vol_path.name}})
    nx, ny, nz = volume.dims
    print(f"volume dims ({nx}, {ny}, {nz}) pitch "
          f"({volume.pitch_um[0]:g}, {volume.pitch_um[1]:g}, {volume.pitch_um[2]:g}) um "
          f"-> {vol_path}")
    return 0


def _cmd_slice(args) -> int:
    cfg, outdir = _setup(args)
    volume = read_volume(args.volume)
    x0, y0, z0 = volume.origin_um
    px, py, pz = volume.pitch_um
    nx, ny, nz = volume.dims

    if args.cscan is not None:
        image = cscan(volume, args.cscan)  # (nx, ny); PGM rows run along y
        name = f"cscan_z{args.cscan:03d}"
        pgm_image = image.T
        extent = (x0, x0 + (nx - 1) * px, y0, y0 + (ny - 1) * py)
        labels = ("x (µm)", "y (µm)")
    elif args.bscan_x is not None:
        image = bscan(volume, "yz", args.bscan_x)  # (ny, nz); rows along z
        name = f"bscan_x{args.bscan_x:03d}"
        pgm_image = image.T
        extent = (y0, y0 + (ny - 1) * py, z0, z0 + (nz - 1) * pz)
        labels = ("y (µm)", "z (µm)")
    else:
        image = bscan(volume, "xz", args.bscan_y)
        name = f"bscan_y{args.bscan_y:03d}"
        pgm_image = image.T
        extent = (x0, x0 + (nx - 1) * px, z0, z0 + (nz - 1) * pz)
        labels = ("x (µm)", "z (µm)")

    pgm_path = outdir / f"{name}.pgm"
    mapping = write_pgm(pgm_path, pgm_image, vmin=args.vmin, vmax=args.vmax)
    files = {"pgm": pgm_path.name}
    if not args.no_figures:
        save_section_figure(
            outdir / f"{name}.png", image, extent, labels[0], labels[1],
            vmin=mapping["min"], vmax=mapping["max"],
        )
        files["png"] = f"{name}.png"
    warnings = [mapping["warning"]] if mapping["warning"] else []
    write_manifest(
        outdir / f"{name}_manifest.txt",
        {
            "slice": {"source_volume": str(args.volume), "section": name},
            "mapping": {"min": mapping["min"], "max": mapping["max"]},
            "files": files,
        },
        warnings=warnings,
        info=_info(),
    )
    print(f"{name}: {pgm_image.shape[1]} x {pgm_image.shape[0]} px -> {pgm_path}")
    return 0


def _cmd_surface(args) -> int:
    cfg, outdir = _setup(args)
    volume = read_volume(args.volume)
    topo = detect_surface(volume, depth_threshold=args.threshold)
    xs = volume.x_coordinates()
    ys = volume.y_coordinates()
    csv_path = outdir / "surface.csv"
    write_surface_csv(csv_path, xs, ys, topo)
    files = {"surface_csv": csv_path.name}
    if not args.no_figures:
        save_topography_figure(outdir / "surface.png", xs, ys, topo)
        files["surface_png"] = "surface.png"
    write_manifest(
        outdir / "surface_manifest.txt",
        {
            "surface": {
                "source_volume": str(args.volume),
                "threshold": args.threshold,
                "detected_columns": int(np.count_nonzero(~np.isnan(topo))),
            },
            "files": files,
        },
        info=_info(),
    )
    print(f"surface: {int(np.count_nonzero(~np.isnan(topo)))} of {topo.size} "
          f"columns detected -> {csv_path}")
    return 0


_DISPATCH = {
    "calibrate": _cmd_calibrate,
    "ascan": _cmd_ascan,
    "compare": _cmd_compare,
    "phantom": _cmd_phantom,
    "volume": _cmd_volume,
    "slice": _cmd_slice,
    "surface": _cmd_surface,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing command (try --help)")
        return _DISPATCH[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (QoctError, OSError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
