"""Procedural onion-skin sample with known ground truth.

Elongated cells tile the plane on a jittered rectangular lattice. Each cell
carries a domed top surface whose reflectance is enhanced where the coating
sits, separated from neighbors by flat wall strips of lower reflectance. A
lateral point-spread blur mixes the two reflectances near the walls. At any
transverse position the phantom reduces to a small layer stack: the top
surface plus an optional lower membrane one cell thickness deeper, with a
dispersive intracellular medium in between.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT
from .errors import OutOfBoundsError
from .rng import substream
from .sample import Interface, Layer, LayerStack

_JITTER_STREAM = 0x1E55
_GAUSS_FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))

# Water-like placeholders for the intracellular medium, evaluated at the
# default 812 nm center: phase index 1.33, group index 1.34, 25 fs^2/mm GVD.
# These are configuration defaults, not measured tissue values.
DEFAULT_MEDIUM_BETA0 = 1.33 * 2.0 * math.pi / 812e-9
DEFAULT_MEDIUM_BETA1 = 1.34 / SPEED_OF_LIGHT
DEFAULT_MEDIUM_BETA2 = 25e-30 / 1e-3


@dataclass(frozen=True)
class PhantomConfig:
    """Geometry, reflectance, and medium parameters of the synthetic sample.

    The lattice origin is chosen so that one cell center sits at
    (37.5, 50) um, centered in the default 75 x 100 um scan window. The base
    plane depth `z_offset_um` registers the sample against the delay origin;
    with the defaults the dome apex sits at z = 2 um.
    """

    cell_width_um: float = 75.0
    cell_length_um: float = 300.0
    cell_thickness_um: float = 12.0
    dome_sag_um: float = 6.0
    top_reflectance: float = 0.07
    wall_reflectance: float = 0.02
    bottom_reflectance: float = 0.02
    orientation_rad: float = 0.0
    jitter_fraction: float = 0.0
    lateral_psf_fwhm_um: float = 12.0
    wall_width_um: float = 5.3
    z_offset_um: float = 8.0
    x_extent_um: float = 75.0
    y_extent_um: float = 100.0
    grid_origin_um: tuple[float, float] = (0.0, -100.0)
    medium_beta0_rad_per_m: float = DEFAULT_MEDIUM_BETA0
    medium_beta1_s_per_m: float = DEFAULT_MEDIUM_BETA1
    medium_beta2_s2_per_m: float = DEFAULT_MEDIUM_BETA2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.cell_width_um <= 0 or self.cell_length_um <= 0:
            raise ValueError("cell dimensions must be positive")
        if self.cell_thickness_um <= 0:
            raise ValueError("cell thickness must be positive")
        if self.dome_sag_um < 0:
            raise ValueError("dome sag must be nonnegative")
        for name in ("top_reflectance", "wall_reflectance", "bottom_reflectance"):
            value = getattr(self, name)
            if not 0.0 <= value < 1.0:
                raise ValueError(f"{name} must be in [0, 1)")
        budget = math.sqrt(max(self.top_reflectance, self.wall_reflectance))
        budget += math.sqrt(self.bottom_reflectance)
        if budget > 1.0:
            raise ValueError("per-column amplitude reflectances exceed the passive limit")
        if not 0.0 <= self.jitter_fraction <= 0.3:
            raise ValueError("jitter fraction must be in [0, 0.3]")
        if self.lateral_psf_fwhm_um <= 0:
            raise ValueError("lateral PSF FWHM must be positive")
        if not 0.0 <= self.wall_width_um < min(self.cell_width_um, self.cell_length_um):
            raise ValueError("wall width must be nonnegative and smaller than a cell")
        if self.x_extent_um <= 0 or self.y_extent_um <= 0:
            raise ValueError("phantom extents must be positive")


class Phantom:
    """Immutable procedural sample; every query is a pure function of the config."""

    def __init__(self, config: PhantomConfig) -> None:
        self.config = config
        sigma = config.lateral_psf_fwhm_um / _GAUSS_FWHM_PER_SIGMA
        self.psf_sigma_um = sigma
        taps = np.arange(-3, 4, dtype=float)
        weights = np.exp(-0.5 * taps**2)
        self._stencil_offsets_um = taps * sigma
        self._stencil_weights = weights / weights.sum()

    # -- tessellation -----------------------------------------------------

    def _rotate(self, x, y):
        theta = self.config.orientation_rad
        if theta == 0.0:
            return x, y
        c, s = math.cos(theta), math.sin(theta)
        return c * x + s * y, -s * x + c * y

    def _site_centers(self, i: np.ndarray, j: np.ndarray):
        """Jittered cell centers for index arrays, in the rotated frame."""
        cfg = self.config
        cx = cfg.grid_origin_um[0] + (i + 0.5) * cfg.cell_width_um
        cy = cfg.grid_origin_um[1] + (j + 0.5) * cfg.cell_length_um
        if cfg.jitter_fraction > 0.0:
            dx = np.empty(i.shape)
            dy = np.empty(i.shape)
            for idx in np.ndindex(i.shape):
                rng = substream(cfg.seed, _JITTER_STREAM, int(i[idx]), int(j[idx]))
                dx[idx], dy[idx] = rng.uniform(-0.5, 0.5, size=2)
            cx = cx + cfg.jitter_fraction * cfg.cell_width_um * dx
            cy = cy + cfg.jitter_fraction * cfg.cell_length_um * dy
        return cx, cy

    def _nearest_site(self, xr: np.ndarray, yr: np.ndarray):
        """Center of the nearest site in the width/length-scaled metric."""
        cfg = self.config
        w, l = cfg.cell_width_um, cfg.cell_length_um
        i0 = np.floor((xr - cfg.grid_origin_um[0]) / w).astype(np.int64)
        j0 = np.floor((yr - cfg.grid_origin_um[1]) / l).astype(np.int64)
        best = np.full(xr.shape, np.inf)
        cx = np.zeros(xr.shape)
        cy = np.zeros(xr.shape)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                sx, sy = self._site_centers(i0 + di, j0 + dj)
                dist = ((xr - sx) / w) ** 2 + ((yr - sy) / l) ** 2
                closer = dist < best
                best[closer] = dist[closer]
                cx[closer] = sx[closer] if np.ndim(sx) else sx
                cy[closer] = sy[closer] if np.ndim(sy) else sy
        return cx, cy

    # -- surface queries ---------------------------------------------------

    def surface_height(self, x_um, y_um):
        """Dome height above the cell base plane, in micrometers.

        Within each cell the height follows an elliptic paraboloid clipped
        at zero: sag * max(0, 1 - (2u/width)^2 - (2v/length)^2) in cell-local
        coordinates.
        """
        x = np.asarray(x_um, dtype=float)
        y = np.asarray(y_um, dtype=float)
        scalar = x.ndim == 0
        x, y = np.atleast_1d(x), np.atleast_1d(y)
        xr, yr = self._rotate(x, y)
        cx, cy = self._nearest_site(xr, yr)
        cfg = self.config
        ellipse = (2.0 * (xr - cx) / cfg.cell_width_um) ** 2
        ellipse += (2.0 * (yr - cy) / cfg.cell_length_um) ** 2
        height = cfg.dome_sag_um * np.maximum(0.0, 1.0 - ellipse)
        return float(height[0]) if scalar else height

    def on_cell(self, x_um, y_um):
        """True inside a cell interior, false on the wall strips between cells."""
        x = np.asarray(x_um, dtype=float)
        y = np.asarray(y_um, dtype=float)
        scalar = x.ndim == 0
        x, y = np.atleast_1d(x), np.atleast_1d(y)
        xr, yr = self._rotate(x, y)
        cx, cy = self._nearest_site(xr, yr)
        cfg = self.config
        half_u = cfg.cell_width_um / 2.0 - cfg.wall_width_um / 2.0
        half_v = cfg.cell_length_um / 2.0 - cfg.wall_width_um / 2.0
        inside = (np.abs(xr - cx) <= half_u) & (np.abs(yr - cy) <= half_v)
        return bool(inside[0]) if scalar else inside

    def blur(self, x_um, y_um):
        """PSF-weighted cell-presence average in [0, 1].

        Gaussian-weighted 7 x 7 stencil with taps one PSF sigma apart, so
        reflectance rolls off smoothly across cell walls.
        """
        x = np.asarray(x_um, dtype=float)
        y = np.asarray(y_um, dtype=float)
        scalar = x.ndim == 0
        x, y = np.atleast_1d(x), np.atleast_1d(y)
        # accumulate the wall-side complement so full coverage is exactly 1
        off = np.zeros(x.shape)
        for wi, du in zip(self._stencil_weights, self._stencil_offsets_um):
            for wj, dv in zip(self._stencil_weights, self._stencil_offsets_um):
                off += (wi * wj) * ~self.on_cell(x + du, y + dv)
        total = np.clip(1.0 - off, 0.0, 1.0)
        return float(total[0]) if scalar else total

    def top_reflectance_amplitude(self, x_um, y_um):
        """Amplitude reflectance of the top surface after the lateral blur."""
        cfg = self.config
        b = self.blur(x_um, y_um)
        return math.sqrt(cfg.top_reflectance) * b + math.sqrt(cfg.wall_reflectance) * (1.0 - b)

    # -- stack construction -------------------------------------------------

    def local_stack(self, x_um: float, y_um: float) -> LayerStack:
        """Layer stack seen by the beam at one transverse position.

        Top surface at depth z_offset - height(x, y); when the bottom
        reflectance is nonzero, a lower membrane sits one cell thickness
        deeper with the intracellular medium filling the gap.
        """
        cfg = self.config
        if not (0.0 <= x_um <= cfg.x_extent_um and 0.0 <= y_um <= cfg.y_extent_um):
            raise OutOfBoundsError(
                f"({x_um:g}, {y_um:g}) um outside the phantom extent "
                f"{cfg.x_extent_um:g} x {cfg.y_extent_um:g} um"
            )
        top_depth = cfg.z_offset_um - self.surface_height(x_um, y_um)
        interfaces = [Interface(top_depth, self.top_reflectance_amplitude(x_um, y_um))]
        media: list = [None]
        if cfg.bottom_reflectance > 0.0:
            interfaces.append(
                Interface(top_depth + cfg.cell_thickness_um, math.sqrt(cfg.bottom_reflectance))
            )
            media.append(
                Layer(
                    thickness_um=cfg.cell_thickness_um,
                    beta1_s_per_m=cfg.medium_beta1_s_per_m,
                    beta2_s2_per_m=cfg.medium_beta2_s2_per_m,
                    beta0_rad_per_m=cfg.medium_beta0_rad_per_m,
                )
            )
        return LayerStack(interfaces, media)


def generate(config: PhantomConfig) -> Phantom:
    """Build an immutable phantom from a validated configuration."""
    return Phantom(config)
