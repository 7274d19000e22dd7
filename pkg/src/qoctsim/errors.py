"""Exception types raised by the simulation and I/O layers."""


class QoctError(Exception):
    """Base class for domain-specific errors."""


class NoSignalError(QoctError):
    """The sample reflects no light, so there is no coincidence signal."""


class NoFeatureError(QoctError):
    """The curve has no dip or peak deep enough to measure."""


class EdgeFeatureError(QoctError):
    """The feature touches the scan boundary, so its width is undefined."""


class NormalizationError(QoctError):
    """The first scan point cannot serve as the normalization reference."""


class InternalConsistencyError(QoctError):
    """A numerical invariant of the engine was violated."""


class OutOfBoundsError(QoctError):
    """A query point lies outside the sample extent."""


class ConfigError(QoctError):
    """A configuration file, override, or input file could not be parsed."""
