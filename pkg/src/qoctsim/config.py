"""Flat `section.key = value` run configuration with strict validation.

Unknown keys, duplicate keys, and type mismatches are rejected with the
offending location. Every resolved value is exposed for the manifest along
with a note saying whether it was configured explicitly, defaulted, or
overridden by the environment.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .counting import CollectionMode, CountingConfig
from .errors import ConfigError
from .phantom import PhantomConfig
from .scan import ScanConfig
from .spectrum import SpectralDensity, SpectralShape, calibrate_bandwidth, make_spectrum

ENV_SEED = "QOCT_SEED"


@dataclass(frozen=True)
class SourceConfig:
    """Light-source description; bandwidth given directly or via a dip width."""

    center_wavelength_nm: float = 812.0
    shape: SpectralShape = SpectralShape.GAUSSIAN
    sigma_rad_s: float | None = None
    target_dip_fwhm_um: float = 7.5
    n_samples: int = 1025

    def sigma(self) -> float:
        if self.sigma_rad_s is not None:
            return self.sigma_rad_s
        return calibrate_bandwidth(self.target_dip_fwhm_um * 1e-6)

    def build(self) -> SpectralDensity:
        return make_spectrum(
            self.center_wavelength_nm * 1e-9, self.shape, self.sigma(), self.n_samples
        )


@dataclass(frozen=True)
class RunConfig:
    source: SourceConfig = field(default_factory=SourceConfig)
    counting: CountingConfig = field(default_factory=CountingConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    phantom: PhantomConfig = field(default_factory=PhantomConfig)
    output_dir: str = "qoct_out"
    explicit: frozenset = frozenset()
    env_overrides: frozenset = frozenset()

    def note_for(self, key: str) -> str:
        if key in self.env_overrides:
            return "environment"
        return "configured" if key in self.explicit else "default"

    def manifest_sections(self) -> dict:
        sections: dict = {}

        def put(section: str, name: str, value) -> None:
            sections.setdefault(section, {})[name] = (value, self.note_for(f"{section}.{name}"))

        src = self.source
        put("source", "center_wavelength_nm", src.center_wavelength_nm)
        put("source", "shape", src.shape.value)
        if src.sigma_rad_s is not None:
            put("source", "sigma_rad_s", src.sigma_rad_s)
        else:
            put("source", "target_dip_fwhm_um", src.target_dip_fwhm_um)
            sections["source"]["sigma_rad_s"] = (src.sigma(), "derived")
        put("source", "n_samples", src.n_samples)

        cnt = self.counting
        put("counting", "flux_pairs_per_s", cnt.flux_pairs_per_s)
        put("counting", "accumulation_s", cnt.accumulation_s)
        put("counting", "window_s", cnt.coincidence_window_s)
        put("counting", "mode", cnt.mode.value)
        put("counting", "visibility", cnt.visibility)
        put("counting", "efficiency", cnt.efficiency)
        put("counting", "seed", cnt.seed)

        scn = self.scan
        put("scan", "x_extent_um", scn.x_extent_um)
        put("scan", "y_extent_um", scn.y_extent_um)
        put("scan", "transverse_step_um", scn.transverse_step_um)
        put("scan", "z_start_um", scn.z_start_um)
        put("scan", "z_step_um", scn.z_step_um)
        put("scan", "z_count", scn.z_count)
        put("scan", "stochastic", scn.stochastic)
        put("scan", "washout_trials", scn.washout_trials)

        ph = self.phantom
        put("phantom", "cell_width_um", ph.cell_width_um)
        put("phantom", "cell_length_um", ph.cell_length_um)
        put("phantom", "cell_thickness_um", ph.cell_thickness_um)
        put("phantom", "dome_sag_um", ph.dome_sag_um)
        put("phantom", "top_reflectance", ph.top_reflectance)
        put("phantom", "wall_reflectance", ph.wall_reflectance)
        put("phantom", "bottom_reflectance", ph.bottom_reflectance)
        put("phantom", "orientation_rad", ph.orientation_rad)
        put("phantom", "jitter_fraction", ph.jitter_fraction)
        put("phantom", "lateral_psf_fwhm_um", ph.lateral_psf_fwhm_um)
        put("phantom", "wall_width_um", ph.wall_width_um)
        put("phantom", "z_offset_um", ph.z_offset_um)
        put("phantom", "x_extent_um", ph.x_extent_um)
        put("phantom", "y_extent_um", ph.y_extent_um)
        put("phantom", "medium_beta0_rad_per_m", ph.medium_beta0_rad_per_m)
        put("phantom", "medium_beta1_s_per_m", ph.medium_beta1_s_per_m)
        put("phantom", "medium_beta2_s2_per_m", ph.medium_beta2_s2_per_m)
        put("phantom", "seed", ph.seed)

        put("output", "dir", self.output_dir)
        return sections


def _parse_float(text: str) -> float:
    return float(text)


def _parse_int(text: str) -> int:
    value = float(text)
    if value != int(value):
        raise ValueError("not an integer")
    return int(value)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError("not a boolean")


def _positive(value):
    if value <= 0:
        raise ValueError("must be positive")
    return value


def _nonnegative(value):
    if value < 0:
        raise ValueError("must be nonnegative")
    return value


def _unit_interval(value):
    if not 0.0 <= value < 1.0:
        raise ValueError("must be in [0, 1)")
    return value


def _identity(value):
    return value


# key -> (section attribute on RunConfig, field name, parser, check)
_SCHEMA = {
    "source.center_wavelength_nm": ("source", "center_wavelength_nm", _parse_float, _positive),
    "source.shape": ("source", "shape", SpectralShape, _identity),
    "source.sigma_rad_s": ("source", "sigma_rad_s", _parse_float, _positive),
    "source.target_dip_fwhm_um": ("source", "target_dip_fwhm_um", _parse_float, _positive),
    "source.n_samples": ("source", "n_samples", _parse_int, _positive),
    "counting.flux_pairs_per_s": ("counting", "flux_pairs_per_s", _parse_float, _positive),
    "counting.accumulation_s": ("counting", "accumulation_s", _parse_float, _positive),
    "counting.window_s": ("counting", "coincidence_window_s", _parse_float, _nonnegative),
    "counting.mode": ("counting", "mode", CollectionMode, _identity),
    "counting.visibility": ("counting", "visibility", _parse_float, _identity),
    "counting.efficiency": ("counting", "efficiency", _parse_float, _identity),
    "counting.seed": ("counting", "seed", _parse_int, _identity),
    "scan.x_extent_um": ("scan", "x_extent_um", _parse_float, _positive),
    "scan.y_extent_um": ("scan", "y_extent_um", _parse_float, _positive),
    "scan.transverse_step_um": ("scan", "transverse_step_um", _parse_float, _positive),
    "scan.z_start_um": ("scan", "z_start_um", _parse_float, _identity),
    "scan.z_step_um": ("scan", "z_step_um", _parse_float, _positive),
    "scan.z_count": ("scan", "z_count", _parse_int, _positive),
    "scan.stochastic": ("scan", "stochastic", _parse_bool, _identity),
    "scan.washout_trials": ("scan", "washout_trials", _parse_int, _nonnegative),
    "phantom.cell_width_um": ("phantom", "cell_width_um", _parse_float, _positive),
    "phantom.cell_length_um": ("phantom", "cell_length_um", _parse_float, _positive),
    "phantom.cell_thickness_um": ("phantom", "cell_thickness_um", _parse_float, _positive),
    "phantom.dome_sag_um": ("phantom", "dome_sag_um", _parse_float, _nonnegative),
    "phantom.top_reflectance": ("phantom", "top_reflectance", _parse_float, _unit_interval),
    "phantom.wall_reflectance": ("phantom", "wall_reflectance", _parse_float, _unit_interval),
    "phantom.bottom_reflectance": ("phantom", "bottom_reflectance", _parse_float, _unit_interval),
    "phantom.orientation_rad": ("phantom", "orientation_rad", _parse_float, _identity),
    "phantom.jitter_fraction": ("phantom", "jitter_fraction", _parse_float, _identity),
    "phantom.lateral_psf_fwhm_um": ("phantom", "lateral_psf_fwhm_um", _parse_float, _positive),
    "phantom.wall_width_um": ("phantom", "wall_width_um", _parse_float, _nonnegative),
    "phantom.z_offset_um": ("phantom", "z_offset_um", _parse_float, _identity),
    "phantom.x_extent_um": ("phantom", "x_extent_um", _parse_float, _positive),
    "phantom.y_extent_um": ("phantom", "y_extent_um", _parse_float, _positive),
    "phantom.medium_beta0_rad_per_m": ("phantom", "medium_beta0_rad_per_m", _parse_float, _identity),
    "phantom.medium_beta1_s_per_m": ("phantom", "medium_beta1_s_per_m", _parse_float, _identity),
    "phantom.medium_beta2_s2_per_m": ("phantom", "medium_beta2_s2_per_m", _parse_float, _identity),
    "phantom.seed": ("phantom", "seed", _parse_int, _identity),
    "output.dir": ("output", "dir", str, _identity),
}


def _read_entries(path) -> dict[str, tuple[str, str]]:
    """Read `key = value` lines; values kept as raw strings with locations."""
    entries: dict[str, tuple[str, str]] = {}
    text = Path(path).read_text()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        where = f"{path}:{line_no}"
        if key not in _SCHEMA:
            raise ConfigError(f"{where}: unknown key '{key}'")
        if key in entries:
            raise ConfigError(f"{where}: duplicate key '{key}'")
        entries[key] = (value, where)
    return entries


def parse_config(path=None, overrides=()) -> RunConfig:
    """Build a validated RunConfig from an optional file plus overrides.

    `overrides` is a sequence of `key=value` strings (command-line --set).
    The QOCT_SEED environment variable, when set, replaces both the
    counting seed and the phantom seed.
    """
    entries: dict[str, tuple[str, str]] = {}
    if path is not None:
        if not Path(path).exists():
            raise ConfigError(f"config file not found: {path}")
        entries = _read_entries(path)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}': expected key=value")
        key, _, value = item.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"override: unknown key '{key}'")
        entries[key] = (value, f"override '{item}'")

    parsed: dict[str, dict] = {"source": {}, "counting": {}, "scan": {}, "phantom": {}, "output": {}}
    for key, (raw, where) in entries.items():
        section, name, parser, check = _SCHEMA[key]
        try:
            value = check(parser(raw))
        except (ValueError, KeyError):
            raise ConfigError(f"{where}: invalid value for '{key}': '{raw}'") from None
        parsed[section][name] = value

    explicit = frozenset(entries)
    if "source.sigma_rad_s" in entries and "source.target_dip_fwhm_um" in entries:
        raise ConfigError(
            "source.sigma_rad_s and source.target_dip_fwhm_um are mutually exclusive"
        )

    env_overrides: set[str] = set()
    env_seed = os.environ.get(ENV_SEED)
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError:
            raise ConfigError(f"{ENV_SEED} must be an integer, got '{env_seed}'") from None
        parsed["counting"]["seed"] = seed
        parsed["phantom"]["seed"] = seed
        env_overrides.update(("counting.seed", "phantom.seed"))

    # The phantom extent follows the scan extent unless set explicitly.
    scan_kwargs = dict(parsed["scan"])
    phantom_kwargs = dict(parsed["phantom"])
    try:
        counting = CountingConfig(**parsed["counting"])
        scan_cfg = ScanConfig(**scan_kwargs, counting=counting)
        if "phantom.x_extent_um" not in entries:
            phantom_kwargs["x_extent_um"] = scan_cfg.x_extent_um
        if "phantom.y_extent_um" not in entries:
            phantom_kwargs["y_extent_um"] = scan_cfg.y_extent_um
        phantom_cfg = PhantomConfig(**phantom_kwargs)
        source_cfg = SourceConfig(**parsed["source"])
        source_cfg.build()  # validate the spectrum parameters eagerly
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    return RunConfig(
        source=source_cfg,
        counting=counting,
        scan=scan_cfg,
        phantom=phantom_cfg,
        output_dir=parsed["output"].get("dir", "qoct_out"),
        explicit=explicit,
        env_overrides=frozenset(env_overrides),
    )
