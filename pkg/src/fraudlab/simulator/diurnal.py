"""
Daily activity curve of regular users and timestamp sampling against it.
"""
import numpy as np

# (hour, weight) knots of the curve; ``None`` stands for the night trough.
# Hour 25 is hour 1 of the next day, so hours in [0, 1) interpolate
# between the evening peak and the trough.
_KNOTS = ((1.0, None), (7.0, None), (12.0, 1.0), (16.0, 0.75), (20.0, 1.0), (25.0, None))


def diurnal_intensity(hour: float, night_attenuation: float = 0.2) -> float:
    """
    Relative activity of regular users at ``hour`` of the UTC day.

    The curve is flat at ``night_attenuation`` over [1, 7), rises linearly to
    a noon peak of 1.0, dips to 0.75 at 16h, peaks again at 20h and falls back
    to the trough at 1h.

    Args:
        hour: hour of day in [0, 24)
        night_attenuation: trough weight in [0, 1]
    """
    if not 0.0 <= hour < 24.0:
        raise ValueError(f"hour must lie in [0, 24), got {hour!r}")
    if hour < 1.0:
        hour += 24.0
    knots = [(h, night_attenuation if w is None else w) for h, w in _KNOTS]
    for (h0, w0), (h1, w1) in zip(knots, knots[1:]):
        if h0 <= hour <= h1:
            return w0 + (w1 - w0) * (hour - h0) / (h1 - h0)
    raise AssertionError("unreachable")


def hour_weights(night_attenuation: float = 0.2) -> np.ndarray:
    """
    Sampling probability of each of the 24 hour bins.
    """
    weights = np.array([diurnal_intensity(float(h), night_attenuation) for h in range(24)])
    return weights / weights.sum()


def sample_diurnal(
    rng: np.random.Generator,
    day_starts: np.ndarray,
    night_attenuation: float = 0.2,
) -> np.ndarray:
    """
    One timestamp per entry of ``day_starts`` (epoch seconds at 00:00 UTC),
    with the hour drawn from the diurnal curve and the second uniform inside it.
    """
    n = len(day_starts)
    hours = rng.choice(24, size=n, p=hour_weights(night_attenuation))
    seconds = rng.integers(0, 3600, size=n)
    return np.asarray(day_starts, dtype=np.int64) + hours * 3600 + seconds


def sample_uniform(rng: np.random.Generator, start: int, end: int, n: int) -> np.ndarray:
    """
    ``n`` timestamps uniform over [start, end).
    """
    return rng.integers(start, end, size=n, dtype=np.int64)
