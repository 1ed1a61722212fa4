"""Rectangular array geometry and far-field steering matrices.

Antennas sit on an ``m x n`` grid: ``c = 0..m-1`` indexes the position along a
row (phase term in ``cos(phi)``) and ``e = 0..n-1`` indexes the row (phase term
in ``sin(phi)``).  The flat antenna index is ``k = e * m + c``, i.e. the
column-major vectorisation of an ``(m, n)`` grid indexed ``[c, e]``.  The
impedance matrix in :mod:`coupledmimo.coupling` uses the same ordering, so its
blocks are ``m x m`` and there are ``n x n`` of them.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ArrayGeometry",
    "IncidentDirections",
    "build_geometry",
    "grid_for_count",
    "antenna_positions",
    "steering_element",
    "steering_matrix",
    "sample_directions",
]


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform rectangular array; spacing ``d`` is in wavelengths."""

    m: int
    n: int
    d: float
    wavelength: float = 1.0

    def __post_init__(self):
        if int(self.m) != self.m or int(self.n) != self.n:
            raise ValueError("antenna counts must be integers")
        if self.m < 1 or self.n < 1:
            raise ValueError(f"antenna counts must be >= 1, got m={self.m}, n={self.n}")
        if not self.d > 0:
            raise ValueError(f"antenna spacing must be positive, got {self.d}")
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")

    @property
    def M(self) -> int:
        return self.m * self.n

    @property
    def a(self) -> float:
        """Array length in wavelengths."""
        return self.d * (self.m - 1)

    @property
    def b(self) -> float:
        """Array width in wavelengths."""
        return self.d * (self.n - 1)


@dataclass(frozen=True)
class IncidentDirections:
    """``P`` azimuths sharing a single elevation, all in radians."""

    azimuths: np.ndarray
    elevation: float

    def __post_init__(self):
        az = np.atleast_1d(np.asarray(self.azimuths, dtype=float))
        if az.ndim != 1 or az.size < 1:
            raise ValueError("need at least one azimuth")
        half_pi = np.pi / 2
        if np.any(np.abs(az) > half_pi) or abs(self.elevation) > half_pi:
            raise ValueError("angles must lie in [-pi/2, pi/2]")
        az.setflags(write=False)
        object.__setattr__(self, "azimuths", az)
        object.__setattr__(self, "elevation", float(self.elevation))

    @property
    def P(self) -> int:
        return self.azimuths.size


def build_geometry(m, n, d_over_lambda, wavelength=1.0) -> ArrayGeometry:
    return ArrayGeometry(int(m), int(n), float(d_over_lambda), float(wavelength))


def grid_for_count(M, aspect=2.0):
    """Pick the ``(m, n)`` factorisation of ``M`` whose ``(m-1)/(n-1)`` is closest to ``aspect``.

    ``M = 1`` gives ``(1, 1)``; a prime ``M`` falls back to a single row.
    """
    M = int(M)
    if M < 1:
        raise ValueError("M must be >= 1")
    if M == 1:
        return (1, 1)
    best, best_err = (M, 1), np.inf
    for n in range(2, M + 1):
        if M % n:
            continue
        m = M // n
        if m < n:
            break
        err = abs((m - 1) / (n - 1) - aspect)
        if err < best_err:
            best, best_err = (m, n), err
    return best


def antenna_positions(geometry: ArrayGeometry):
    """Integer grid coordinates ``(c, e)`` of every antenna in flat-index order."""
    k = np.arange(geometry.M)
    return k % geometry.m, k // geometry.m


def steering_element(geometry: ArrayGeometry, c, e, azimuth, elevation):
    """Phase response of the antenna at 1-based grid position ``(c, e)``."""
    if not (1 <= c <= geometry.m and 1 <= e <= geometry.n):
        raise ValueError(f"grid index ({c}, {e}) outside {geometry.m}x{geometry.n} array")
    s = np.sin(elevation)
    phase = 2 * np.pi * geometry.d * ((c - 1) * np.cos(azimuth) * s + (e - 1) * np.sin(azimuth) * s)
    return complex(np.exp(1j * phase))


def steering_matrix(geometry: ArrayGeometry, directions: IncidentDirections) -> np.ndarray:
    """``M x P`` steering matrix; column ``q`` is the vectorised grid response to azimuth ``q``."""
    c, e = antenna_positions(geometry)
    s = np.sin(directions.elevation)
    u = np.cos(directions.azimuths) * s
    v = np.sin(directions.azimuths) * s
    phase = 2 * np.pi * geometry.d * (np.outer(c, u) + np.outer(e, v))
    return np.exp(1j * phase)


def sample_directions(P, rng: np.random.Generator) -> IncidentDirections:
    """Draw one shared elevation, then ``P`` azimuths, uniformly from ``[-pi/2, pi/2]``.

    The elevation comes first so that, from equal streams, the azimuths for
    ``P`` are a prefix of those for any larger ``P``.
    """
    if P < 1:
        raise ValueError("P must be >= 1")
    elevation = rng.uniform(-np.pi / 2, np.pi / 2)
    azimuths = rng.uniform(-np.pi / 2, np.pi / 2, size=int(P))
    return IncidentDirections(azimuths, elevation)
