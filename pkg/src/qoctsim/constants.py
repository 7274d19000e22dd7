"""Physical constants and unit conversion factors shared across the package."""

SPEED_OF_LIGHT = 299_792_458.0  # m/s

UM = 1e-6    # meters per micrometer
FS2 = 1e-30  # seconds^2 per femtosecond^2
