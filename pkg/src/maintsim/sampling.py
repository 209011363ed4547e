"""Weibull failure-time sampling for repairable components.

Component lifetimes follow a Weibull law with scale ``alpha`` (hours) and
shape ``beta``.  Repairs are minimal: a repaired component keeps its
accumulated repair age ``R``, so the next interarrival is drawn from the
residual-life distribution conditioned on survival past ``R``:

    t = F^-1(1 - U * [1 - F(R)]) - R

which reduces to ``F^-1(1 - U)`` for a fresh component (``R = 0``).  With
``beta = 1`` the draw is memoryless and independent of ``R``.

All functions accept scalars or numpy arrays and broadcast.
"""

from __future__ import annotations

import numpy as np

_TINY = np.finfo(np.float64).tiny


def _check_positive(name: str, value) -> None:
    if np.any(np.asarray(value) <= 0.0):
        raise ValueError(f"{name} must be strictly positive")


def weibull_cdf(t, scale, shape):
    """Probability that a fresh component fails within ``t`` hours."""
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0.0):
        raise ValueError("time must be non-negative")
    _check_positive("scale", scale)
    _check_positive("shape", shape)
    out = -np.expm1(-((t / scale) ** shape))
    return float(out) if out.ndim == 0 else out


def _check_u(u) -> None:
    if np.any((np.asarray(u) <= 0.0) | (np.asarray(u) >= 1.0)):
        raise ValueError("u must lie strictly inside (0, 1)")


def sample_first_interarrival(scale, shape, u):
    """Inverse-CDF draw of a fresh component's failure interarrival time."""
    _check_positive("scale", scale)
    _check_positive("shape", shape)
    _check_u(u)
    out = scale * (-np.log(u)) ** (1.0 / np.asarray(shape, dtype=np.float64))
    return float(out) if np.ndim(out) == 0 else out


def sample_conditional_interarrival(scale, shape, repair_age, u):
    """Residual-life draw for a component with accumulated repair age.

    Strictly positive for u < 1 and strictly decreasing in u; equal to
    ``sample_first_interarrival`` when ``repair_age`` is zero.
    """
    _check_positive("scale", scale)
    _check_positive("shape", shape)
    _check_u(u)
    r = np.asarray(repair_age, dtype=np.float64)
    if np.any(r < 0.0):
        raise ValueError("repair_age must be non-negative")
    shape = np.asarray(shape, dtype=np.float64)
    aged = (r / scale) ** shape
    out = scale * (aged - np.log(u)) ** (1.0 / shape) - r
    # Guard against rounding to zero at very large repair ages.
    out = np.maximum(out, _TINY)
    return float(out) if np.ndim(out) == 0 else out


def cms_detects(p_detect, u):
    """Whether a condition-monitoring check reports the pending failure."""
    p = np.asarray(p_detect, dtype=np.float64)
    if np.any((p < 0.0) | (p > 1.0)):
        raise ValueError("detection probability must lie in [0, 1]")
    out = np.asarray(u) < p
    return bool(out) if out.ndim == 0 else out
