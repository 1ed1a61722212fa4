"""Eigenmode precoding, phase-only RF/baseband factorisation and the ZF baseline."""

from dataclasses import dataclass

import numpy as np

from coupledmimo.channel import ChannelRealization
from coupledmimo.errors import SingularSystemError, UnsupportedConfigurationError

__all__ = [
    "Precoder",
    "DetectionMatrix",
    "power_allocation",
    "optimal_precoder",
    "rf_baseband_factorization",
    "zf_precoder",
    "default_detection_matrix",
    "optimal_detection_matrix",
    "rf_chain_savings",
]


@dataclass(frozen=True)
class Precoder:
    F_eq: np.ndarray
    f_sq: np.ndarray
    F_RF: np.ndarray
    F_BB: np.ndarray
    N_s: int
    rf_chains_used: int
    rf_chains_saved: int


@dataclass(frozen=True)
class DetectionMatrix:
    W_eq: np.ndarray


def power_allocation(singular_values, N_s, snr) -> np.ndarray:
    """Eigenmode powers ``f_i^2`` maximising the sum rate under ``sum f_i^2 = N_s^2``.

    Closed-form Lagrange solution over the active modes,
    ``f_i^2 = (N_s^2 + (N_s/snr) * sum_k 1/lam_k^2) / r - (N_s/snr) / lam_i^2``.
    Whenever that goes negative the weakest active mode is switched off and the
    allocation is recomputed, which is ordinary water-filling.

    Parameters
    ----------
    singular_values : array_like
        Positive channel singular values ``lam_i``, sorted nonincreasing.
    N_s : int
        Stream count; sets the power budget ``N_s^2`` and the noise term ``N_s/snr``.
    snr : float
        Linear transmit SNR.

    Returns
    -------
    np.ndarray
        ``f_i^2`` for every input mode, zero for switched-off modes.
    """
    lam = np.asarray(singular_values, dtype=float)
    if lam.ndim != 1 or lam.size < 1:
        raise ValueError("need at least one singular value")
    if np.any(lam <= 0):
        raise ValueError("singular values must be positive")
    if np.any(np.diff(lam) > 0):
        raise ValueError("singular values must be sorted nonincreasing")
    if not snr > 0:
        raise ValueError("snr must be positive")
    noise = N_s / snr
    inv = 1.0 / lam**2
    f_sq = np.zeros_like(lam)
    for active in range(lam.size, 0, -1):
        level = (N_s**2 + noise * inv[:active].sum()) / active
        alloc = level - noise * inv[:active]
        if alloc[-1] >= 0:
            f_sq[:active] = alloc
            return f_sq
    raise AssertionError("strongest mode must always be active")  # pragma: no cover


def rf_baseband_factorization(F_eq):
    """Split ``F_eq`` into a unit-modulus ``F_RF`` (``M x 2N_s``) and a real ``F_BB`` (``2N_s x N_s``).

    Each entry ``f`` of column ``j`` is the sum of two unit phasors scaled by
    ``b_j = max|f_.j| / 2``, at angles ``arg f -/+ arccos(|f| / 2 b_j)``.  An
    all-zero column gets ``b_j = 0`` and zero phases.
    """
    F_eq = np.asarray(F_eq, dtype=complex)
    M, N_s = F_eq.shape
    F_RF = np.ones((M, 2 * N_s), dtype=complex)
    F_BB = np.zeros((2 * N_s, N_s))
    mag = np.abs(F_eq)
    ang = np.angle(F_eq)
    for j in range(N_s):
        b = 0.5 * mag[:, j].max()
        if b == 0:
            continue
        spread = np.arccos(np.clip(mag[:, j] / (2 * b), -1.0, 1.0))
        F_RF[:, 2 * j] = np.exp(1j * (ang[:, j] - spread))
        F_RF[:, 2 * j + 1] = np.exp(1j * (ang[:, j] + spread))
        F_BB[2 * j, j] = F_BB[2 * j + 1, j] = b
    return F_RF, F_BB


def rf_chain_savings(M, N_s) -> int:
    if M < 1 or N_s < 1:
        raise ValueError("M and N_s must be >= 1")
    return max(int(M) - 2 * int(N_s), 0)


def optimal_precoder(realization: ChannelRealization, N_s, snr) -> Precoder:
    """Align ``N_s`` streams with the strongest right singular vectors and water-fill.

    ``F_eq = V_H[:, :N_s] diag(f)`` so ``F_eq^H F_eq = diag(f^2)``.

    Raises
    ------
    UnsupportedConfigurationError
        If ``N_s`` exceeds the channel rank.
    """
    N_s = int(N_s)
    if N_s < 1:
        raise ValueError("N_s must be >= 1")
    if N_s > realization.r:
        raise UnsupportedConfigurationError(
            f"{N_s} streams requested but the equivalent channel has rank {realization.r}"
        )
    f_sq = power_allocation(realization.singular_values[:N_s], N_s, snr)
    F_eq = realization.V[:, :N_s] * np.sqrt(f_sq)
    F_RF, F_BB = rf_baseband_factorization(F_eq)
    M = F_eq.shape[0]
    return Precoder(
        F_eq=F_eq,
        f_sq=f_sq,
        F_RF=F_RF,
        F_BB=F_BB,
        N_s=N_s,
        rf_chains_used=2 * N_s,
        rf_chains_saved=rf_chain_savings(M, N_s),
    )


def zf_precoder(H_eq, N_s) -> np.ndarray:
    """Right pseudo-inverse of the first ``N_s`` rows of ``H_eq``, scaled to ``||F||_F^2 = N_s^2``."""
    H_eq = np.asarray(H_eq)
    N_s = int(N_s)
    if not 1 <= N_s <= H_eq.shape[0]:
        raise ValueError(f"N_s must be in [1, {H_eq.shape[0]}]")
    rows = H_eq[:N_s]
    s = np.linalg.svd(rows, compute_uv=False)
    if s[-1] <= max(rows.shape) * s[0] * np.finfo(float).eps:
        cond = np.inf if s[-1] == 0 else s[0] / s[-1]
        raise SingularSystemError("leading rows of H_eq are rank deficient", cond)
    F = rows.conj().T @ np.linalg.inv(rows @ rows.conj().T)
    return F * (N_s / np.linalg.norm(F))


def default_detection_matrix(N, N_s) -> DetectionMatrix:
    if N_s < 1 or N < N_s:
        raise ValueError(f"need 1 <= N_s <= N, got N={N}, N_s={N_s}")
    return DetectionMatrix(np.eye(N, N_s, dtype=complex))


def optimal_detection_matrix(realization: ChannelRealization, N_s) -> DetectionMatrix:
    """Left singular vectors of the ``N_s`` strongest modes; orthonormal columns."""
    if N_s > realization.r:
        raise UnsupportedConfigurationError(
            f"{N_s} streams requested but the equivalent channel has rank {realization.r}"
        )
    return DetectionMatrix(realization.U[:, :N_s])
