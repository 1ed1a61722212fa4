"""Dipole self/mutual impedances (induced-EMF method) and the coupling matrix.

All lengths are in wavelengths.  Every antenna is an identical thin dipole with
the same orientation, so each pair is a side-by-side configuration whose mutual
impedance depends only on the Euclidean grid distance.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import toeplitz

from coupledmimo.array import ArrayGeometry
from coupledmimo.errors import SingularSystemError
from coupledmimo.specfun import cosine_integral as Ci
from coupledmimo.specfun import sine_integral as Si

__all__ = [
    "ETA0",
    "DipoleParams",
    "CouplingModel",
    "mutual_impedance",
    "self_impedance",
    "offset_table",
    "impedance_matrix",
    "coupling_matrix",
    "coupling_model",
]

ETA0 = 376.730313  # free-space wave impedance, Ohm
EULER_GAMMA = np.euler_gamma


@dataclass(frozen=True)
class DipoleParams:
    length: float = 0.5
    radius: float = 0.0005
    load_impedance: complex = 50.0

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("dipole length must be positive")
        if not self.radius > 0:
            raise ValueError("dipole radius must be positive")
        if not self.radius < self.length / 50:
            raise ValueError("thin-wire model needs radius < length / 50")
        if not complex(self.load_impedance).real > 0:
            raise ValueError("load impedance must have a positive real part")

    @classmethod
    def from_diameter(cls, length, diameter, load_impedance=50.0):
        return cls(float(length), float(diameter) / 2, complex(load_impedance))


@dataclass(frozen=True)
class CouplingModel:
    Z_M: np.ndarray
    K: np.ndarray


def mutual_impedance(d, dipole: DipoleParams = DipoleParams()):
    """Mutual impedance (Ohm) of two side-by-side parallel dipoles ``d`` wavelengths apart.

    The closed form is exact for half-wave dipoles (referenced to the feed
    current).  Accepts scalar or array ``d``.
    """
    d = np.asarray(d, dtype=float)
    if np.any(~(d > 0)):
        raise ValueError("separation must be positive; use self_impedance for d = 0")
    k = 2 * np.pi
    l = dipole.length
    root = np.sqrt(d**2 + l**2)
    u0 = k * d
    u1 = k * (root + l)
    u2 = k * (root - l)
    R = ETA0 / (4 * np.pi) * (2 * Ci(u0) - Ci(u1) - Ci(u2))
    X = -ETA0 / (4 * np.pi) * (2 * Si(u0) - Si(u1) - Si(u2))
    z = R + 1j * X
    return complex(z) if z.ndim == 0 else z


def self_impedance(dipole: DipoleParams = DipoleParams()) -> complex:
    """Input impedance of an isolated finite-radius dipole by the induced-EMF method.

    The radius only enters the reactance, through ``Ci(2 k a^2 / l)``, and its
    coefficient ``sin(kl)`` vanishes for a half-wave dipole.
    """
    k = 2 * np.pi
    l, a = dipole.length, dipole.radius
    kl = k * l
    g = EULER_GAMMA
    R = ETA0 / (2 * np.pi) * (
        g + np.log(kl) - Ci(kl)
        + 0.5 * np.sin(kl) * (Si(2 * kl) - 2 * Si(kl))
        + 0.5 * np.cos(kl) * (g + np.log(kl / 2) + Ci(2 * kl) - 2 * Ci(kl))
    )
    X = ETA0 / (4 * np.pi) * (
        2 * Si(kl)
        + np.cos(kl) * (2 * Si(kl) - Si(2 * kl))
        - np.sin(kl) * (2 * Ci(kl) - Ci(2 * kl) - Ci(2 * k * a**2 / l))
    )
    return complex(R, X)


def offset_table(geometry: ArrayGeometry, dipole: DipoleParams) -> np.ndarray:
    """Impedance for every grid offset ``(|dc|, |de|)``; shape ``(m, n)``, self-impedance at ``[0, 0]``.

    These ``m * n`` values are all the distinct entries of the impedance matrix.
    """
    dc, de = np.meshgrid(np.arange(geometry.m), np.arange(geometry.n), indexing="ij")
    dist = geometry.d * np.sqrt(dc**2 + de**2)
    table = np.empty(dist.shape, dtype=complex)
    off = dist > 0
    table[off] = mutual_impedance(dist[off], dipole)
    table[0, 0] = self_impedance(dipole)
    return table


def impedance_matrix(geometry: ArrayGeometry, dipole: DipoleParams = DipoleParams()) -> np.ndarray:
    """Symmetric block-Toeplitz ``M x M`` mutual impedance matrix.

    Block ``(s, t)`` couples grid rows ``s`` and ``t`` and only depends on
    ``|s - t|``; each block is itself a symmetric Toeplitz matrix along the row.
    """
    table = offset_table(geometry, dipole)
    blocks = [toeplitz(table[:, j], table[:, j]) for j in range(geometry.n)]
    return np.block([[blocks[abs(s - t)] for t in range(geometry.n)] for s in range(geometry.n)])


def coupling_matrix(Z_M, Z_L=50.0) -> np.ndarray:
    """Solve ``K (Z_L I + Z_M) = Z_L I`` for the coupling matrix ``K``."""
    Z_M = np.asarray(Z_M, dtype=complex)
    M = Z_M.shape[0]
    system = Z_L * np.eye(M) + Z_M
    cond = np.linalg.cond(system)
    if not np.isfinite(cond) or cond > 1 / np.finfo(float).eps:
        raise SingularSystemError("Z_L*I + Z_M is numerically singular", cond)
    # K A = Z_L I  <=>  A^T K^T = Z_L I
    return np.linalg.solve(system.T, Z_L * np.eye(M, dtype=complex)).T


@lru_cache(maxsize=64)
def coupling_model(geometry: ArrayGeometry, dipole: DipoleParams = DipoleParams()) -> CouplingModel:
    """Impedance and coupling matrices for an array; cached, results are read-only."""
    Z_M = impedance_matrix(geometry, dipole)
    K = coupling_matrix(Z_M, dipole.load_impedance)
    Z_M.setflags(write=False)
    K.setflags(write=False)
    return CouplingModel(Z_M, K)
