"""Biphoton detuning spectrum, reused as the classical source spectrum.

The spectral density lives on a symmetric detuning grid around the center
frequency. Evenness is guaranteed bit-exactly by construction (the negative
half is a mirror of the nonnegative half) and the composite-trapezoid
weights are rescaled so the quadrature integral of the density is one.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT

MIN_SAMPLES = 257

# Half-span of the detuning grid in units of sigma.
_HALF_SPAN_SIGMAS = 4.0 * math.sqrt(2.0)


class SpectralShape(str, enum.Enum):
    GAUSSIAN = "gaussian"
    SINC_SQUARED = "sinc_squared"


@dataclass(frozen=True)
class SpectralDensity:
    """Normalized symmetric spectral density on a detuning grid.

    Attributes
    ----------
    center_frequency : float
        Degenerate center frequency in rad/s.
    shape : SpectralShape
        Functional form of the density.
    sigma : float
        Width scale in rad/s (standard deviation for the Gaussian shape).
    detunings : ndarray
        Odd-length grid of detunings in rad/s, symmetric about zero.
    weights : ndarray
        Composite-trapezoid quadrature weights in rad/s.
    density : ndarray
        Density samples; sum(weights * density) == 1.
    """

    center_frequency: float
    shape: SpectralShape
    sigma: float
    detunings: np.ndarray
    weights: np.ndarray
    density: np.ndarray

    def __post_init__(self) -> None:
        for name in ("detunings", "weights", "density"):
            getattr(self, name).setflags(write=False)

    @property
    def n_samples(self) -> int:
        return self.detunings.size

    @property
    def upper_band(self) -> np.ndarray:
        """Frequencies center + detuning."""
        return self.center_frequency + self.detunings

    @property
    def lower_band(self) -> np.ndarray:
        """Frequencies center - detuning."""
        return self.center_frequency - self.detunings


def make_spectrum(
    center_wavelength: float,
    shape: SpectralShape | str,
    sigma: float,
    n_samples: int = 1025,
) -> SpectralDensity:
    """Build a spectral density for the given center wavelength (meters).

    The grid spans +-4*sqrt(2) sigma. For the sinc-squared shape the span is
    widened to the next zero of the density so that both the density and its
    derivative vanish at the endpoints; without this the slowly decaying
    tails dominate the trapezoid error and downstream values would not be
    stable under grid refinement.
    """
    shape = SpectralShape(shape)
    if center_wavelength <= 0:
        raise ValueError("center wavelength must be positive")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if n_samples % 2 == 0:
        raise ValueError("n_samples must be odd so zero detuning is sampled")
    if n_samples < MIN_SAMPLES:
        raise ValueError(f"n_samples must be at least {MIN_SAMPLES}")

    center_frequency = 2.0 * math.pi * SPEED_OF_LIGHT / center_wavelength
    if sigma >= center_frequency / 4.0:
        raise ValueError(
            "sigma must be below a quarter of the center frequency "
            "(narrowband model validity)"
        )

    half = (n_samples - 1) // 2
    half_span = _HALF_SPAN_SIGMAS * sigma
    if shape is SpectralShape.SINC_SQUARED:
        half_span = math.pi * math.ceil(_HALF_SPAN_SIGMAS / math.pi) * sigma

    step = half_span / half
    offsets = np.arange(half + 1, dtype=float) * step
    if shape is SpectralShape.GAUSSIAN:
        rho_half = np.exp(-(offsets**2) / (2.0 * sigma**2))
    else:
        rho_half = np.sinc(offsets / (sigma * math.pi)) ** 2

    detunings = np.concatenate([-offsets[:0:-1], offsets])
    density = np.concatenate([rho_half[:0:-1], rho_half])
    weights = np.full(n_samples, step)
    weights[0] = weights[-1] = step / 2.0
    density = density / np.sum(weights * density)

    return SpectralDensity(center_frequency, shape, sigma, detunings, weights, density)


def calibrate_bandwidth(target_dip_fwhm: float) -> float:
    """Width scale whose single-mirror coincidence dip has the given FWHM.

    The Gaussian dip envelope is exp(-8 sigma^2 dz^2 / c^2); inverting the
    full width at half depth F gives sigma = (c / F) * sqrt(ln 2 / 2).
    `target_dip_fwhm` is in meters, the result in rad/s.
    """
    if target_dip_fwhm <= 0:
        raise ValueError("target dip FWHM must be positive")
    return (SPEED_OF_LIGHT / target_dip_fwhm) * math.sqrt(math.log(2.0) / 2.0)
