"""Fourth-order coincidence engine for the delay-scanned interferometer.

The coincidence rate at delay position z is C(z) = B - I(z), where B is a
delay-independent baseline and I the interference term built from the
product of the sample response at mirrored frequencies around the center.
Because even-order spectral phase cancels in that product, the
single-interface dips keep their width under group-velocity dispersion;
pairs of interfaces add cross features halfway between their dips, and
those average away under interface phase jitter.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import SPEED_OF_LIGHT, UM
from .errors import (
    InternalConsistencyError,
    NormalizationError,
    NoSignalError,
)
from .fwhm import dip_full_width
from .rng import substream
from .sample import LayerStack
from .spectrum import SpectralDensity

IMAG_TOLERANCE = 1e-10
_BOUND_TOL = 1e-9
_FIRST_POINT_FLOOR = 0.99
_WASHOUT_STREAM = 0xA5CA


@dataclass
class CoincidenceCurve:
    """Coincidence A-scan normalized to its first sample.

    `baseline` keeps the raw (unnormalized) delay-independent rate so that
    bounds like C <= 2 * baseline remain checkable after normalization.
    """

    z_um: np.ndarray
    values: np.ndarray
    baseline: float
    normalization_index: int = 0


def _delay_s(z_um) -> np.ndarray:
    return 2.0 * (np.asarray(z_um, dtype=float) * UM) / SPEED_OF_LIGHT


def _band_products(
    spectrum: SpectralDensity,
    stack: LayerStack,
    trial_phases: np.ndarray | None = None,
) -> np.ndarray:
    """weights * density * H(upper) * conj(H(lower)) on the detuning grid.

    With `trial_phases` of shape (n_trials, n_interfaces), each interface
    amplitude is rotated by its drawn phase and the product averaged over
    trials; averaging before the delay transform is exact because the
    transform is linear.
    """
    upper = stack.term_matrix(spectrum.upper_band, spectrum.center_frequency)
    lower = stack.term_matrix(spectrum.lower_band, spectrum.center_frequency)
    wrho = spectrum.weights * spectrum.density
    if trial_phases is None:
        return wrho * (upper.sum(axis=0) * np.conj(lower.sum(axis=0)))
    acc = np.zeros(spectrum.n_samples, dtype=complex)
    for phases in trial_phases:
        rot = np.exp(1j * phases)[:, None]
        acc += (upper * rot).sum(axis=0) * np.conj((lower * rot).sum(axis=0))
    return wrho * (acc / len(trial_phases))


def coincidence_baseline(spectrum: SpectralDensity, stack: LayerStack) -> float:
    """Delay-independent coincidence level; zero only for a dark sample."""
    upper = stack.term_matrix(spectrum.upper_band, spectrum.center_frequency).sum(axis=0)
    lower = stack.term_matrix(spectrum.lower_band, spectrum.center_frequency).sum(axis=0)
    wrho = spectrum.weights * spectrum.density
    return float(0.5 * np.sum(wrho * (np.abs(upper) ** 2 + np.abs(lower) ** 2)))


def interference_complex(spectrum, stack, z_um, trial_phases=None) -> np.ndarray:
    """Raw complex interference term at the given delay positions.

    Diagnostic entry point: evenness of the density makes the exact value
    real, so the imaginary part measures quadrature-grid corruption.
    """
    products = _band_products(spectrum, stack, trial_phases)
    kernel = np.exp(-2j * np.outer(spectrum.detunings, _delay_s(z_um)))
    return products @ kernel


def _interference_real(spectrum, stack, z_um, baseline, trial_phases=None) -> np.ndarray:
    values = interference_complex(spectrum, stack, z_um, trial_phases)
    worst = float(np.max(np.abs(values.imag), initial=0.0))
    if worst > IMAG_TOLERANCE * baseline:
        raise InternalConsistencyError(
            f"imaginary interference term {worst:.3e} exceeds "
            f"{IMAG_TOLERANCE:g} * baseline ({baseline:.3e}); detuning grid corrupted"
        )
    return values.real


def interference_profile(spectrum, stack, z_um) -> np.ndarray:
    """Interference term (real part, consistency-checked) over a z array."""
    baseline = coincidence_baseline(spectrum, stack)
    return _interference_real(spectrum, stack, z_um, baseline)


def interference_term(spectrum, stack, z_um: float) -> float:
    """Interference term at a single delay position (micrometers)."""
    return float(interference_profile(spectrum, stack, [z_um])[0])


def _check_bounds(rates: np.ndarray, baseline: float) -> None:
    tol = _BOUND_TOL * max(baseline, 1e-300)
    if np.any(rates < -tol) or np.any(rates > 2.0 * baseline + tol):
        raise InternalConsistencyError(
            "coincidence rate outside [0, 2 * baseline]; "
            f"got range [{rates.min():.6g}, {rates.max():.6g}] with baseline {baseline:.6g}"
        )


def coincidence_rate(spectrum, stack, z_um: float) -> float:
    """Expected coincidence rate C(z) = baseline - interference term."""
    baseline = coincidence_baseline(spectrum, stack)
    if baseline <= 0.0:
        raise NoSignalError("sample is dark: coincidence baseline is zero")
    value = baseline - _interference_real(spectrum, stack, [z_um], baseline)
    _check_bounds(value, baseline)
    return float(max(value[0], 0.0))


def ascan(
    spectrum: SpectralDensity,
    stack: LayerStack,
    z_start_um: float,
    z_step_um: float,
    n_steps: int,
    washout_trials: int = 0,
    rng_seed: int = 0,
) -> CoincidenceCurve:
    """Coincidence curve over a uniform delay grid, normalized to its first point.

    With `washout_trials` > 0 the curve is averaged over that many draws of
    per-interface phase jitter, uniform on [0, 2 pi), from a deterministic
    stream keyed by `rng_seed`. Jitter cancels identically in single-surface
    terms and suppresses pairwise cross features, mimicking the return from
    rough surfaces. The baseline is evaluated once from the configured stack
    and is untouched by the averaging.

    The first grid point must lie away from any interference feature; it is
    rejected if it falls below 0.99 * baseline.
    """
    if n_steps < 2:
        raise ValueError("an A-scan needs at least two points")
    if z_step_um <= 0:
        raise ValueError("z step must be positive")
    z_um = z_start_um + np.arange(n_steps, dtype=float) * z_step_um

    baseline = coincidence_baseline(spectrum, stack)
    if baseline <= 0.0:
        raise NormalizationError("sample is dark: coincidence baseline is zero")

    trial_phases = None
    if washout_trials > 0:
        rng = substream(rng_seed, _WASHOUT_STREAM)
        trial_phases = rng.uniform(0.0, 2.0 * np.pi, size=(washout_trials, stack.n_interfaces))

    rates = baseline - _interference_real(spectrum, stack, z_um, baseline, trial_phases)
    _check_bounds(rates, baseline)
    # a fully extinguished dip can round to a few ulp below zero
    rates = np.maximum(rates, 0.0)

    first = rates[0]
    if first < _FIRST_POINT_FLOOR * baseline:
        raise NormalizationError(
            f"first scan point at z = {z_um[0]:g} um lies on an interference "
            f"feature (rate {first:.6g} < {_FIRST_POINT_FLOOR} * baseline {baseline:.6g})"
        )
    return CoincidenceCurve(z_um=z_um, values=rates / first, baseline=baseline)


def dip_fwhm(curve: CoincidenceCurve) -> float:
    """Full width at half depth of the deepest dip, in micrometers."""
    return dip_full_width(curve.z_um, curve.values, baseline=1.0)


def interference_profile_fft(
    spectrum: SpectralDensity,
    stack: LayerStack,
    n_fft: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Interference term on the FFT's natural delay grid.

    Independent evaluation path used to cross-check the pointwise
    quadrature: the same weighted band products are zero-padded and
    transformed at once. Returns (z_um ascending, values).
    """
    products = _band_products(spectrum, stack)
    n = spectrum.n_samples
    half = (n - 1) // 2
    d_omega = spectrum.detunings[1] - spectrum.detunings[0]
    if n_fft is None:
        n_fft = 1 << max(15, (4 * n - 1).bit_length())
    if n_fft < n:
        raise ValueError("n_fft must be at least the number of spectral samples")

    transform = np.fft.fft(products, n_fft)
    m_signed = np.fft.fftfreq(n_fft) * n_fft
    tau = np.pi * m_signed / (n_fft * d_omega)
    values = np.exp(2j * half * d_omega * tau) * transform

    order = np.argsort(tau)
    z_um = (SPEED_OF_LIGHT * tau[order] / 2.0) / UM
    return z_um, values[order].real
