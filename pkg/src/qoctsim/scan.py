"""Volumetric acquisition: one A-scan per transverse position.

Columns are independent work units with seed-isolated random streams, so
parallel and serial execution produce bit-identical volumes. The assembled
volume slices into transverse (x, y) sections and axial (y, z) or (x, z)
sections, and per-column dip positions yield a surface topography map.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .counting import CountingConfig, acquire_counts
from .engine import ascan
from .errors import NormalizationError
from .rng import mix64
from .spectrum import SpectralDensity

_GRID_TOL = 1e-9


@dataclass(frozen=True)
class ScanConfig:
    """Transverse and axial scan grid plus acquisition options."""

    x_extent_um: float = 75.0
    y_extent_um: float = 100.0
    transverse_step_um: float = 5.0
    z_start_um: float = -15.0
    z_step_um: float = 1.0
    z_count: int = 31
    stochastic: bool = False
    washout_trials: int = 0
    counting: CountingConfig = field(default_factory=CountingConfig)

    def __post_init__(self) -> None:
        if self.x_extent_um <= 0 or self.y_extent_um <= 0:
            raise ValueError("scan extents must be positive")
        if self.transverse_step_um <= 0:
            raise ValueError("transverse step must be positive")
        if self.z_step_um <= 0:
            raise ValueError("z step must be positive")
        if self.z_count < 2:
            raise ValueError("z count must be at least 2")
        if self.washout_trials < 0:
            raise ValueError("washout trials must be nonnegative")

    def transverse_grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Inclusive-endpoint transverse positions (xs, ys) in micrometers."""
        nx = int(np.floor(self.x_extent_um / self.transverse_step_um + _GRID_TOL)) + 1
        ny = int(np.floor(self.y_extent_um / self.transverse_step_um + _GRID_TOL)) + 1
        xs = np.arange(nx, dtype=float) * self.transverse_step_um
        ys = np.arange(ny, dtype=float) * self.transverse_step_um
        return xs, ys

    def z_grid(self) -> np.ndarray:
        return self.z_start_um + np.arange(self.z_count, dtype=float) * self.z_step_um


@dataclass
class Volume:
    """Normalized coincidence voxels on the (x, y, z) scan grid."""

    values: np.ndarray  # (nx, ny, nz)
    pitch_um: tuple[float, float, float]
    origin_um: tuple[float, float, float]

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.values.shape  # type: ignore[return-value]

    def x_coordinates(self) -> np.ndarray:
        return self.origin_um[0] + np.arange(self.dims[0]) * self.pitch_um[0]

    def y_coordinates(self) -> np.ndarray:
        return self.origin_um[1] + np.arange(self.dims[1]) * self.pitch_um[1]

    def z_coordinates(self) -> np.ndarray:
        return self.origin_um[2] + np.arange(self.dims[2]) * self.pitch_um[2]


def run_volume(
    sample,
    spectrum: SpectralDensity,
    config: ScanConfig,
    n_workers: int = 1,
) -> Volume:
    """Acquire the full volume for any sample exposing local_stack(x, y).

    In stochastic mode each ideal curve is converted to expected counts,
    Poisson-sampled per voxel with stream id (i, j, k), and renormalized by
    the sampled first-point count, mirroring the measurement procedure
    including its normalization noise. Normalization failures carry the
    offending column indices.
    """
    xs, ys = config.transverse_grid()
    z_count = config.z_count
    values = np.empty((xs.size, ys.size, z_count), dtype=float)

    def column(i: int, j: int) -> np.ndarray:
        stack = sample.local_stack(float(xs[i]), float(ys[j]))
        try:
            curve = ascan(
                spectrum,
                stack,
                config.z_start_um,
                config.z_step_um,
                z_count,
                washout_trials=config.washout_trials,
                rng_seed=mix64(config.counting.seed, i, j),
            )
            col = curve.values
            if config.stochastic:
                records = acquire_counts(curve, config.counting, stream_prefix=(i, j))
                counts = np.array([rec.sampled for rec in records], dtype=float)
                if counts[0] <= 0:
                    raise NormalizationError("sampled first-point count is zero")
                col = counts / counts[0]
        except NormalizationError as exc:
            raise NormalizationError(
                f"column (i={i}, j={j}) at (x={xs[i]:g}, y={ys[j]:g}) um: {exc}"
            ) from exc
        return col

    pairs = [(i, j) for i in range(xs.size) for j in range(ys.size)]
    if n_workers <= 1:
        for i, j in pairs:
            values[i, j] = column(i, j)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            for (i, j), col in zip(pairs, pool.map(lambda p: column(*p), pairs)):
                values[i, j] = col

    step = config.transverse_step_um
    return Volume(
        values=values,
        pitch_um=(step, step, config.z_step_um),
        origin_um=(0.0, 0.0, config.z_start_um),
    )


def cscan(volume: Volume, z_index: int) -> np.ndarray:
    """Transverse section at one depth index, shaped (nx, ny)."""
    nz = volume.dims[2]
    if not 0 <= z_index < nz:
        raise IndexError(f"z index {z_index} out of range 0..{nz - 1}")
    return volume.values[:, :, z_index].copy()


def bscan(volume: Volume, axis: str, index: int) -> np.ndarray:
    """Axial section: axis 'yz' fixes x (gives ny x nz); 'xz' fixes y (nx x nz)."""
    if axis == "yz":
        nx = volume.dims[0]
        if not 0 <= index < nx:
            raise IndexError(f"x index {index} out of range 0..{nx - 1}")
        return volume.values[index, :, :].copy()
    if axis == "xz":
        ny = volume.dims[1]
        if not 0 <= index < ny:
            raise IndexError(f"y index {index} out of range 0..{ny - 1}")
        return volume.values[:, index, :].copy()
    raise ValueError("axis must be 'yz' or 'xz'")


def detect_surface(volume: Volume, depth_threshold: float = 0.9) -> np.ndarray:
    """Per-column dip depth in micrometers; NaN where no dip qualifies.

    The global minimum of each column must fall below `depth_threshold`;
    interior minima are refined to sub-step accuracy with a three-point
    parabolic fit.
    """
    nx, ny, nz = volume.dims
    z = volume.z_coordinates()
    dz = volume.pitch_um[2]
    out = np.full((nx, ny), np.nan)
    for i in range(nx):
        for j in range(ny):
            col = volume.values[i, j]
            k = int(np.argmin(col))
            if col[k] >= depth_threshold:
                continue
            z_min = z[k]
            if 0 < k < nz - 1:
                a, b, c = col[k - 1], col[k], col[k + 1]
                curvature = a - 2.0 * b + c
                if curvature > 0:
                    z_min = z[k] + 0.5 * (a - c) / curvature * dz
            out[i, j] = z_min
    return out
