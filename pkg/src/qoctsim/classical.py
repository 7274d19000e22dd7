"""Second-order (classical) interferometric reference engine.

Uses the same spectral density as the coincidence engine so that resolution
and dispersion behavior can be compared on identical inputs. Quadratic
spectral phase does not cancel here, so the envelope broadens with
accumulated group-velocity dispersion while the coincidence dip does not.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT, UM
from .fwhm import peak_full_width
from .sample import LayerStack
from .spectrum import SpectralDensity


@dataclass
class Interferogram:
    """Fringe pattern and its analytic-signal envelope versus delay position."""

    z_um: np.ndarray
    fringes: np.ndarray
    envelope: np.ndarray


def interferogram(
    spectrum: SpectralDensity, stack: LayerStack, z_um
) -> Interferogram:
    """Broadband interferogram of the sample over the given delay positions.

    The fringes are the real part of the spectrally weighted response
    sum(w * S * H * exp(-2i omega z / c)); the envelope is the magnitude of
    the same sum taken as a complex (analytic) signal.
    """
    z_um = np.asarray(z_um, dtype=float)
    omega = spectrum.upper_band
    response = stack.term_matrix(omega, spectrum.center_frequency).sum(axis=0)
    weighted = spectrum.weights * spectrum.density * response
    tau = 2.0 * (z_um * UM) / SPEED_OF_LIGHT
    analytic = weighted @ np.exp(-1j * np.outer(omega, tau))
    return Interferogram(z_um=z_um, fringes=analytic.real, envelope=np.abs(analytic))


def envelope_fwhm(ig: Interferogram) -> float:
    """Full width at half maximum of the envelope peak, in micrometers."""
    return peak_full_width(ig.z_um, ig.envelope)
