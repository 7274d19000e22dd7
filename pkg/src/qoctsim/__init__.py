"""Coincidence-dip tomography simulator.

Simulates axial sectioning of layered dispersive samples read from the
coincidence dip of a two-photon interferometer, alongside a classical
interferometric reference engine, stochastic photon counting, a procedural
cell phantom, and volumetric scan orchestration.
"""

__version__ = "0.1.0"

from .classical import Interferogram, envelope_fwhm, interferogram
from .counting import (
    CollectionMode,
    CountingConfig,
    CountRecord,
    accidental_rate,
    acquire_counts,
    collection_factor,
    expected_counts,
    sample_counts,
)
from .engine import (
    CoincidenceCurve,
    ascan,
    coincidence_baseline,
    coincidence_rate,
    dip_fwhm,
    interference_profile,
    interference_profile_fft,
    interference_term,
)
from .errors import (
    ConfigError,
    EdgeFeatureError,
    InternalConsistencyError,
    NoFeatureError,
    NormalizationError,
    NoSignalError,
    OutOfBoundsError,
    QoctError,
)
from .phantom import Phantom, PhantomConfig, generate
from .sample import Interface, Layer, LayerStack, UniformSample, vacuum_like_layer
from .scan import ScanConfig, Volume, bscan, cscan, detect_surface, run_volume
from .spectrum import SpectralDensity, SpectralShape, calibrate_bandwidth, make_spectrum
