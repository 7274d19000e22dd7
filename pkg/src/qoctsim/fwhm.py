"""Width measurement on sampled curves by linear interpolation at half level."""
from __future__ import annotations

import numpy as np

from .errors import EdgeFeatureError, NoFeatureError

DIP_THRESHOLD = 0.99


def _left_crossing(z, values, i_extreme, level, decreasing_toward_extreme):
    """Position where the curve crosses `level` on the left flank."""
    before = values[:i_extreme]
    if decreasing_toward_extreme:
        candidates = np.nonzero(before >= level)[0]
    else:
        candidates = np.nonzero(before <= level)[0]
    if candidates.size == 0:
        raise EdgeFeatureError("feature touches the start of the grid")
    i = int(candidates[-1])
    v0, v1 = values[i], values[i + 1]
    if v0 == v1:
        return z[i]
    return z[i] + (z[i + 1] - z[i]) * (v0 - level) / (v0 - v1)


def _right_crossing(z, values, i_extreme, level, decreasing_toward_extreme):
    after = values[i_extreme:]
    if decreasing_toward_extreme:
        candidates = np.nonzero(after >= level)[0]
    else:
        candidates = np.nonzero(after <= level)[0]
    if candidates.size == 0:
        raise EdgeFeatureError("feature touches the end of the grid")
    i = i_extreme + int(candidates[0])
    v0, v1 = values[i - 1], values[i]
    if v0 == v1:
        return z[i]
    return z[i - 1] + (z[i] - z[i - 1]) * (v0 - level) / (v0 - v1)


def dip_full_width(z, values, baseline: float = 1.0) -> float:
    """Full width of the global minimum at half depth below `baseline`.

    The half level is (baseline + minimum) / 2. Flanks are located by linear
    interpolation between the bracketing samples. Raises NoFeatureError when
    no unique minimum falls below 0.99 * baseline, and EdgeFeatureError when
    a flank never recrosses the half level inside the grid.
    """
    z = np.asarray(z, dtype=float)
    values = np.asarray(values, dtype=float)
    i_min = int(np.argmin(values))
    v_min = values[i_min]
    if not v_min < DIP_THRESHOLD * baseline:
        raise NoFeatureError(
            f"no dip below {DIP_THRESHOLD:g} * baseline (minimum {v_min:.6g})"
        )
    if int(np.count_nonzero(values == v_min)) != 1:
        raise NoFeatureError("global minimum is not unique")
    level = 0.5 * (baseline + v_min)
    left = _left_crossing(z, values, i_min, level, decreasing_toward_extreme=True)
    right = _right_crossing(z, values, i_min, level, decreasing_toward_extreme=True)
    return float(right - left)


def peak_full_width(z, values) -> float:
    """Full width at half maximum of the global peak above a zero baseline."""
    z = np.asarray(z, dtype=float)
    values = np.asarray(values, dtype=float)
    i_max = int(np.argmax(values))
    v_max = values[i_max]
    if v_max <= 0 or (v_max - values.min()) <= 1e-12 * max(abs(v_max), 1.0):
        raise NoFeatureError("envelope is flat")
    level = 0.5 * v_max
    left = _left_crossing(z, values, i_max, level, decreasing_toward_extreme=False)
    right = _right_crossing(z, values, i_max, level, decreasing_toward_extreme=False)
    return float(right - left)
