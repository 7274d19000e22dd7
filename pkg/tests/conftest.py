import numpy as np
import pytest

from qoctsim import (
    Interface,
    Layer,
    LayerStack,
    SpectralShape,
    calibrate_bandwidth,
    make_spectrum,
)

SIGMA_7P5 = calibrate_bandwidth(7.5e-6)


@pytest.fixture(scope="session")
def spectrum():
    """Default source: 812 nm Gaussian calibrated to a 7.5 um dip."""
    return make_spectrum(812e-9, SpectralShape.GAUSSIAN, SIGMA_7P5, 1025)


@pytest.fixture(scope="session")
def mirror():
    return LayerStack.single_mirror(0.0, 1.0)


def random_stack(rng: np.random.Generator, n_interfaces: int = 3) -> LayerStack:
    """Seeded random stack with dispersive gaps, for property checks."""
    depths = np.sort(rng.uniform(-5.0, 45.0, size=n_interfaces))
    while np.any(np.diff(depths) < 1.0):
        depths = np.sort(rng.uniform(-5.0, 45.0, size=n_interfaces))
    amps = rng.uniform(0.05, 0.9 / n_interfaces, size=n_interfaces)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n_interfaces)
    jitters = rng.uniform(0.0, 2.0 * np.pi, size=n_interfaces)
    interfaces = [
        Interface(float(z), float(a) * np.exp(1j * float(p)), float(t))
        for z, a, p, t in zip(depths, amps, phases, jitters)
    ]
    media = [None]
    for j in range(1, n_interfaces):
        gap = depths[j] - depths[j - 1]
        thickness = rng.uniform(0.0, gap)
        media.append(
            Layer(
                thickness_um=float(thickness),
                beta1_s_per_m=rng.uniform(3.3e-9, 5.0e-9),
                beta2_s2_per_m=rng.uniform(0.0, 1e-25),
                beta0_rad_per_m=rng.uniform(0.0, 2e7),
            )
        )
    return LayerStack(interfaces, media)
