"""Sine and cosine integrals used by the induced-EMF impedance formulas."""

import numpy as np
from scipy.special import sici


def sine_integral(x):
    """Si(x) = int_0^x sin(t)/t dt, vectorised over ``x``."""
    si, _ = sici(np.asarray(x, dtype=float))
    return si[()] if np.ndim(si) == 0 else si


def cosine_integral(x):
    """Ci(x) = -int_x^inf cos(t)/t dt for x > 0.

    Raises
    ------
    ValueError
        If any ``x <= 0`` (Ci diverges at 0 and is complex below it).
    """
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("cosine_integral is only defined for x > 0")
    _, ci = sici(x)
    return ci[()] if np.ndim(ci) == 0 else ci
