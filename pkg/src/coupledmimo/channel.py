"""Small-scale fading and the coupled equivalent channel."""

from dataclasses import dataclass

import numpy as np

__all__ = ["ChannelRealization", "sample_fading", "equivalent_channel", "numerical_rank", "realize"]


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the downlink channel.

    ``H_eq = H @ A.T @ K`` has shape ``(N, M)``; ``U``, ``singular_values`` and
    ``Vh`` are its thin SVD, with ``r`` the numerical rank.
    """

    H: np.ndarray
    A: np.ndarray
    K: np.ndarray
    H_eq: np.ndarray
    U: np.ndarray
    singular_values: np.ndarray
    Vh: np.ndarray
    r: int
    beta: float = 1.0

    @property
    def N(self) -> int:
        return self.H_eq.shape[0]

    @property
    def M(self) -> int:
        return self.H_eq.shape[1]

    @property
    def V(self) -> np.ndarray:
        return self.Vh.conj().T


def sample_fading(N, P, rng: np.random.Generator) -> np.ndarray:
    """``N x P`` matrix of i.i.d. CN(0, 1) entries (real and imaginary variance 0.5 each).

    Drawn direction by direction, so from equal streams the first ``P`` columns
    do not depend on how many more directions are requested.
    """
    if N < 1 or P < 1:
        raise ValueError("N and P must be >= 1")
    z = rng.standard_normal((P, N, 2)) * np.sqrt(0.5)
    return (z[..., 0] + 1j * z[..., 1]).T


def numerical_rank(singular_values, shape) -> int:
    s = np.asarray(singular_values)
    if s.size == 0 or s[0] == 0:
        return 0
    tol = max(shape) * s[0] * 1e-12
    return int(np.count_nonzero(s > tol))


def equivalent_channel(H, A, K):
    """Form ``H_eq = H A^T K`` and its thin SVD.

    Returns ``(H_eq, U, s, Vh, r)`` with ``s`` nonincreasing.
    """
    H, A, K = np.asarray(H), np.asarray(A), np.asarray(K)
    if H.ndim != 2 or A.ndim != 2 or K.ndim != 2:
        raise ValueError("H, A and K must be 2-D")
    N, P = H.shape
    M = A.shape[0]
    if A.shape[1] != P:
        raise ValueError(f"A has {A.shape[1]} directions but H has {P}")
    if K.shape != (M, M):
        raise ValueError(f"K must be {M}x{M}, got {K.shape}")
    H_eq = H @ (A.T @ K)
    U, s, Vh = np.linalg.svd(H_eq, full_matrices=False)
    return H_eq, U, s, Vh, numerical_rank(s, H_eq.shape)


def realize(H, A, K, beta=1.0) -> ChannelRealization:
    H_eq, U, s, Vh, r = equivalent_channel(H, A, K)
    return ChannelRealization(H=H, A=A, K=K, H_eq=H_eq, U=U, singular_values=s, Vh=Vh, r=r, beta=beta)
