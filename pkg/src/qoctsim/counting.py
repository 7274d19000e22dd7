"""Photon counting: expected coincidence counts, accidentals, Poisson draws.

Converts ideal normalized coincidence values into count records for a given
pair flux, accumulation time, and coincidence window. All draws come from
counter-based streams keyed by (seed, stream id), so a scan produces the
same counts whether evaluated serially or in parallel.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .rng import substream

_COUNT_STREAM = 0xC0DE


class CollectionMode(str, enum.Enum):
    PBS_QWP = "pbs_qwp"  # polarizing splitter with quarter-wave plates
    NPBS = "npbs"        # single non-polarizing splitter


def collection_factor(mode: CollectionMode | str) -> float:
    """Coincidence collection efficiency relative to the polarizing arrangement.

    The non-polarizing splitter loses half the photons in each arm, giving a
    factor of four fewer coincidences than the polarizing arrangement (valid
    for samples that do not alter polarization).
    """
    mode = CollectionMode(mode)
    return 1.0 if mode is CollectionMode.PBS_QWP else 0.25


def accidental_rate(singles1: float, singles2: float, window_s: float) -> float:
    """Uncorrelated background coincidence rate for two singles rates."""
    if singles1 < 0 or singles2 < 0 or window_s < 0:
        raise ValueError("singles rates and window must be nonnegative")
    return singles1 * singles2 * window_s


@dataclass(frozen=True)
class CountingConfig:
    """Detection parameters for stochastic acquisition."""

    flux_pairs_per_s: float = 1.0e6
    accumulation_s: float = 5.0
    coincidence_window_s: float = 3.5e-9
    mode: CollectionMode = CollectionMode.PBS_QWP
    visibility: float = 0.9
    efficiency: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", CollectionMode(self.mode))
        if self.flux_pairs_per_s <= 0:
            raise ValueError("pair flux must be positive")
        if self.accumulation_s <= 0:
            raise ValueError("accumulation time must be positive")
        if self.coincidence_window_s < 0:
            raise ValueError("coincidence window must be nonnegative")
        if not 0.0 < self.visibility <= 1.0:
            raise ValueError("visibility must be in (0, 1]")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError("detector efficiency must be in (0, 1]")

    def singles_rate(self) -> float:
        """Singles rate per detector: one photon of each pair, after losses.

        Scales with the square root of the collection factor so that both
        true and accidental coincidences carry the full factor.
        """
        return (
            self.efficiency
            * self.flux_pairs_per_s
            * math.sqrt(collection_factor(self.mode))
        )


def expected_counts(curve_value, config: CountingConfig):
    """Mean coincidence counts for a normalized curve value in [0, 2].

    True coincidences scale as 1 - V * (1 - value); accidentals follow from
    the per-detector singles rate and the coincidence window. Both terms are
    proportional to the collection factor, so the two collection modes
    differ by exactly that factor at every point.
    """
    values = np.asarray(curve_value, dtype=float)
    if np.any(values < 0.0) or np.any(values > 2.0):
        raise ValueError("curve value outside [0, 2]")
    kappa = collection_factor(config.mode)
    eta = config.efficiency
    flux = config.flux_pairs_per_s
    true_term = 1.0 - config.visibility * (1.0 - values)
    accidental_term = flux * config.coincidence_window_s
    out = config.accumulation_s * kappa * eta * eta * flux * (true_term + accidental_term)
    return float(out) if values.ndim == 0 else out


def sample_counts(expected: float, seed: int, stream_id) -> int:
    """One Poisson draw with the given mean from stream (seed, stream_id).

    `stream_id` may be an integer or a tuple of integers (for instance the
    voxel indices of a volumetric scan). Identical inputs give identical
    outputs on every platform.
    """
    if expected < 0:
        raise ValueError("expected counts must be nonnegative")
    path = tuple(stream_id) if isinstance(stream_id, (tuple, list)) else (stream_id,)
    rng = substream(seed, _COUNT_STREAM, *path)
    return int(rng.poisson(expected))


@dataclass(frozen=True)
class CountRecord:
    """One scan point: delay position, mean counts, and the Poisson draw."""

    z_um: float
    expected: float
    sampled: int

    def __post_init__(self) -> None:
        if self.expected < 0 or self.sampled < 0:
            raise ValueError("counts must be nonnegative")


def acquire_counts(curve, config: CountingConfig, stream_prefix=()) -> list[CountRecord]:
    """Count record for a normalized coincidence curve.

    Pure function of (curve, config, stream_prefix): each point k draws from
    stream (seed, *stream_prefix, k), so records are reproducible and
    independent of acquisition order.
    """
    means = expected_counts(curve.values, config)
    prefix = tuple(stream_prefix)
    return [
        CountRecord(
            z_um=float(z),
            expected=float(mean),
            sampled=sample_counts(float(mean), config.seed, prefix + (k,)),
        )
        for k, (z, mean) in enumerate(zip(curve.z_um, means))
    ]
