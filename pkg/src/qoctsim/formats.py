"""File emission and parsing: CSV curves, PGM sections, volumes, manifests.

All data formats round-trip: CSV floats are printed with shortest
round-trip precision, volume files are bit-exact binary, and PGM images
follow the plain binary (P5) convention with 16-bit big-endian samples.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .sample import Interface, Layer, LayerStack
from .scan import Volume

VOLUME_MAGIC = b"QOCTVOL1"
PGM_MAXVAL = 65535
_PGM_MIDGRAY = 32768


def _fmt(value: float) -> str:
    return repr(float(value))


def write_curve_csv(path, curve) -> None:
    """A-scan as `z_um,value` rows with an LF-terminated header."""
    lines = ["z_um,value"]
    lines.extend(f"{_fmt(z)},{_fmt(v)}" for z, v in zip(curve.z_um, curve.values))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def write_comparison_csv(path, z_um, qoct, oct_envelope) -> None:
    """Engine comparison as `z_um,qoct,oct_envelope` rows."""
    lines = ["z_um,qoct,oct_envelope"]
    lines.extend(
        f"{_fmt(z)},{_fmt(q)},{_fmt(o)}" for z, q, o in zip(z_um, qoct, oct_envelope)
    )
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def write_surface_csv(path, x_um, y_um, depth_map) -> None:
    """Topography map as `x_um,y_um,z_um` rows; undetected columns read nan."""
    lines = ["x_um,y_um,z_um"]
    depth_map = np.asarray(depth_map, dtype=float)
    for i, x in enumerate(x_um):
        for j, y in enumerate(y_um):
            lines.append(f"{_fmt(x)},{_fmt(y)},{_fmt(depth_map[i, j])}")
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Read back a CSV written by this module: (header fields, row array)."""
    text = Path(path).read_text()
    lines = [line for line in text.splitlines() if line]
    header = lines[0].split(",")
    rows = np.array([[float(cell) for cell in line.split(",")] for line in lines[1:]])
    return header, rows


def write_pgm(path, image, vmin: float | None = None, vmax: float | None = None) -> dict:
    """16-bit binary PGM with a linear [vmin, vmax] -> [0, 65535] mapping.

    Low values render dark. A degenerate mapping (vmin == vmax) produces a
    uniform mid-gray image; the returned dict records the mapping actually
    used plus a warning string in that case, for inclusion in the manifest.
    """
    img = np.asarray(image, dtype=float)
    if img.ndim != 2:
        raise ValueError("PGM image must be two-dimensional")
    if vmin is None:
        vmin = float(img.min())
    if vmax is None:
        vmax = float(img.max())
    warning = None
    if vmax <= vmin:
        data = np.full(img.shape, _PGM_MIDGRAY, dtype=">u2")
        warning = (
            f"degenerate intensity mapping (min == max == {vmin:g}); "
            "emitted uniform mid-gray"
        )
    else:
        scaled = np.clip((img - vmin) / (vmax - vmin), 0.0, 1.0)
        data = np.round(scaled * PGM_MAXVAL).astype(">u2")
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n{PGM_MAXVAL}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes(order="C"))
    return {"min": float(vmin), "max": float(vmax), "warning": warning}


def write_volume(path, volume: Volume) -> None:
    """Binary volume: magic, dims as little-endian int64, pitch and origin as
    little-endian float64, then row-major float64 voxels."""
    with open(path, "wb") as fh:
        fh.write(VOLUME_MAGIC)
        fh.write(struct.pack("<3q", *volume.dims))
        fh.write(struct.pack("<3d", *volume.pitch_um))
        fh.write(struct.pack("<3d", *volume.origin_um))
        fh.write(np.ascontiguousarray(volume.values, dtype="<f8").tobytes())


def read_volume(path) -> Volume:
    data = Path(path).read_bytes()
    if data[:8] != VOLUME_MAGIC:
        raise ConfigError(f"{path}: not a volume file (bad magic)")
    nx, ny, nz = struct.unpack_from("<3q", data, 8)
    pitch = struct.unpack_from("<3d", data, 32)
    origin = struct.unpack_from("<3d", data, 56)
    expected = 80 + nx * ny * nz * 8
    if len(data) != expected:
        raise ConfigError(f"{path}: truncated volume file")
    voxels = np.frombuffer(data, dtype="<f8", count=nx * ny * nz, offset=80)
    return Volume(
        values=voxels.reshape(nx, ny, nz).copy(),
        pitch_um=tuple(pitch),
        origin_um=tuple(origin),
    )


def parse_stack_file(path) -> LayerStack:
    """Read a plain-text stack description.

    Interface lines hold `z_um re_r im_r [theta_rad]`. A line of the form
    `layer L_um beta1_s_per_m beta2_s2_per_m [beta0_rad_per_m]` attaches the
    material to the gap above the next interface. `#` starts a comment.
    """
    pending: list[Layer] = []
    interfaces: list[Interface] = []
    media: list[tuple[Layer, ...]] = []
    last_layer_line = 0
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        if parts[0] == "layer":
            if len(parts) not in (4, 5):
                raise ConfigError(
                    f"{path}:{line_no}: layer lines need 3 or 4 numbers "
                    "(L_um beta1 beta2 [beta0])"
                )
            try:
                numbers = [float(p) for p in parts[1:]]
            except ValueError:
                raise ConfigError(f"{path}:{line_no}: malformed layer numbers") from None
            beta0 = numbers[3] if len(numbers) == 4 else 0.0
            pending.append(Layer(numbers[0], numbers[1], numbers[2], beta0))
            last_layer_line = line_no
        else:
            if len(parts) not in (3, 4):
                raise ConfigError(
                    f"{path}:{line_no}: interface lines need 3 or 4 numbers "
                    "(z_um re_r im_r [theta_rad])"
                )
            try:
                numbers = [float(p) for p in parts]
            except ValueError:
                raise ConfigError(f"{path}:{line_no}: malformed interface numbers") from None
            theta = numbers[3] if len(numbers) == 4 else 0.0
            interfaces.append(Interface(numbers[0], complex(numbers[1], numbers[2]), theta))
            media.append(tuple(pending))
            pending = []
    if pending:
        raise ConfigError(
            f"{path}:{last_layer_line}: layer lines with no following interface"
        )
    try:
        return LayerStack(interfaces, media)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def write_manifest(path, sections: dict, warnings=(), info: dict | None = None) -> None:
    """Plain-text run manifest.

    `sections` maps a section name to {key: value} or {key: (value, note)};
    notes mark where each value came from (default, configured, ...). The
    trailing informational block (timestamps and similar) is not part of the
    reproducibility contract.
    """
    lines = []
    for name, entries in sections.items():
        lines.append(f"[{name}]")
        for key, value in entries.items():
            note = None
            if isinstance(value, tuple) and len(value) == 2:
                value, note = value
            line = f"{key} = {value}"
            if note:
                line += f"  # {note}"
            lines.append(line)
        lines.append("")
    if warnings:
        lines.append("[warnings]")
        lines.extend(str(w) for w in warnings)
        lines.append("")
    if info:
        lines.append("[info]")
        lines.extend(f"{key} = {value}" for key, value in info.items())
        lines.append("")
    Path(path).write_text("\n".join(lines), newline="\n")
