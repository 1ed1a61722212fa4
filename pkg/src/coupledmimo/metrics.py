"""Achievable rate, receive diversity gain and effective capacity."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from coupledmimo.array import ArrayGeometry, sample_directions, steering_matrix
from coupledmimo.channel import ChannelRealization, realize, sample_fading
from coupledmimo.coupling import DipoleParams, coupling_model
from coupledmimo.errors import SingularSystemError
from coupledmimo.precoding import optimal_precoder

__all__ = [
    "QosParams",
    "Estimate",
    "shannon_rate",
    "max_rate_closed_form",
    "trial_generators",
    "draw_realization",
    "receive_snr",
    "receive_snr_samples",
    "receive_snr_expectation",
    "diversity_gain_antenna_number",
    "diversity_gain_spacing",
    "effective_capacity",
    "effective_capacity_bootstrap",
    "effective_capacity_upper_bound",
]

LN2 = np.log(2.0)


@dataclass(frozen=True)
class QosParams:
    """QoS exponent ``theta`` (1/bit), frame duration ``T`` (s), bandwidth ``B`` (Hz)."""

    theta: float
    T: float = 1e-3
    B: float = 1e6

    def __post_init__(self):
        if not (self.theta > 0 and self.T > 0 and self.B > 0):
            raise ValueError("theta, T and B must all be positive")


class Estimate(NamedTuple):
    value: float
    stderr: float
    trials: int
    ci_low: float = np.nan
    ci_high: float = np.nan


def shannon_rate(H_eq, F_eq, W_eq, snr, N_s) -> float:
    """``log2 det(I + snr/N_s * W^H H F F^H H^H W (W^H W)^-1)`` in bit/s/Hz."""
    H_eq, F_eq, W_eq = (np.atleast_2d(np.asarray(x, dtype=complex)) for x in (H_eq, F_eq, W_eq))
    R = W_eq.conj().T @ W_eq
    cond = np.linalg.cond(R)
    if not np.isfinite(cond) or cond > 1 / np.finfo(float).eps:
        raise SingularSystemError("W_eq^H W_eq is singular", cond)
    G = W_eq.conj().T @ H_eq @ F_eq
    X = G @ G.conj().T
    X_Rinv = np.linalg.solve(R.T, X.T).T
    sign, logdet = np.linalg.slogdet(np.eye(R.shape[0]) + (snr / N_s) * X_Rinv)
    return max(float(logdet) / LN2, 0.0)


def max_rate_closed_form(singular_values, f_sq, N_s, snr, r=None) -> float:
    """Rate of the eigenmode precoder, ``sum_i log2(1 + snr/N_s * f_i^2 lam_i^2)``.

    Same value as ``r log2(snr/N_s) + sum_i log2(N_s/snr + f_i^2 lam_i^2)`` but
    without the cancellation of the two large terms.
    """
    lam = np.asarray(singular_values, dtype=float)
    f_sq = np.asarray(f_sq, dtype=float)
    r = f_sq.size if r is None else int(r)
    gain = f_sq[:r] * lam[:r] ** 2
    return float(np.sum(np.log1p((snr / N_s) * gain)) / LN2)


def trial_generators(seed, trials):
    """Independent per-trial generators; the same ``seed`` always yields the same streams."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.default_rng(child) for child in ss.spawn(int(trials))]


def draw_realization(geometry: ArrayGeometry, dipole: DipoleParams, N, P, rng, beta=1.0) -> ChannelRealization:
    """One realization; directions and fading come from separate child streams of ``rng``.

    Draws are nested in ``P``: with equal streams, a larger ``P`` only appends
    scatterers to those of a smaller one.
    """
    dir_rng, fade_rng = rng.spawn(2)
    directions = sample_directions(P, dir_rng)
    A = steering_matrix(geometry, directions)
    H = sample_fading(N, P, fade_rng)
    K = coupling_model(geometry, dipole).K
    return realize(H, A, K, beta)


def receive_snr(realization: ChannelRealization, F_eq, snr) -> float:
    """UE receive SNR after MRC, ``snr * N * beta * ||F^H H_eq^H H_eq F||_F``."""
    G = realization.H_eq @ F_eq
    return float(snr * realization.N * realization.beta * np.linalg.norm(G.conj().T @ G))


def receive_snr_samples(geometry, dipole, N, P, N_s, snr, beta=1.0, trials=500, seed=0) -> np.ndarray:
    out = np.empty(int(trials))
    for t, rng in enumerate(trial_generators(seed, trials)):
        real = draw_realization(geometry, dipole, N, P, rng, beta)
        prec = optimal_precoder(real, N_s, snr)
        out[t] = receive_snr(real, prec.F_eq, snr)
    return out


def _summary(samples) -> Estimate:
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    se = samples.std(ddof=1) / np.sqrt(n) if n > 1 else np.nan
    return Estimate(float(samples.mean()), float(se), n)


def receive_snr_expectation(geometry, dipole, N, P, N_s, snr, beta=1.0, trials=500, seed=0) -> Estimate:
    """Monte-Carlo mean of the receive SNR with its standard error."""
    return _summary(receive_snr_samples(geometry, dipole, N, P, N_s, snr, beta, trials, seed))


def diversity_gain_antenna_number(
    geometry: ArrayGeometry, dipole, N, P, N_s, snr, baseline=(1, 1), beta=1.0, trials=500, seed=0
) -> Estimate:
    """Receive-SNR gain of ``geometry`` over a ``baseline`` grid at the same spacing.

    Both terms use the same trial streams, so the estimate is a paired difference.
    """
    base = ArrayGeometry(baseline[0], baseline[1], geometry.d, geometry.wavelength)
    a = receive_snr_samples(geometry, dipole, N, P, N_s, snr, beta, trials, seed)
    b = receive_snr_samples(base, dipole, N, P, N_s, snr, beta, trials, seed)
    return _summary(a - b)


def diversity_gain_spacing(
    geometry: ArrayGeometry, dipole, N, P, N_s, snr, d_min=0.1, beta=1.0, trials=500, seed=0
) -> Estimate:
    """Receive-SNR gain of ``geometry`` over the same grid at spacing ``d_min`` (paired)."""
    base = ArrayGeometry(geometry.m, geometry.n, d_min, geometry.wavelength)
    a = receive_snr_samples(geometry, dipole, N, P, N_s, snr, beta, trials, seed)
    b = receive_snr_samples(base, dipole, N, P, N_s, snr, beta, trials, seed)
    return _summary(a - b)


def effective_capacity(rate_samples, qos: QosParams) -> float:
    """``-1/(theta T) ln E[exp(-theta T B R)]`` in bit/s, evaluated in the log domain.

    ``rate_samples`` are spectral efficiencies in bit/s/Hz.
    """
    R = np.asarray(rate_samples, dtype=float).ravel()
    if R.size == 0:
        raise ValueError("need at least one rate sample")
    s = qos.theta * qos.T
    log_mgf = logsumexp(-s * qos.B * R, b=1.0 / R.size)
    return float(-log_mgf / s)


def effective_capacity_bootstrap(rate_samples, qos: QosParams, n_boot=1000, level=0.95, rng=None) -> Estimate:
    """Effective capacity with a percentile-bootstrap confidence interval and bootstrap standard error."""
    R = np.asarray(rate_samples, dtype=float).ravel()
    value = effective_capacity(R, qos)
    if R.size < 2 or n_boot < 2:
        return Estimate(value, np.nan, R.size)
    rng = np.random.default_rng(rng)
    idx = rng.integers(0, R.size, size=(int(n_boot), R.size))
    s = qos.theta * qos.T
    boot = -logsumexp(-s * qos.B * R[idx], b=1.0 / R.size, axis=1) / s
    alpha = (1 - level) / 2
    lo, hi = np.quantile(boot, [alpha, 1 - alpha])
    return Estimate(value, float(boot.std(ddof=1)), R.size, float(lo), float(hi))


def effective_capacity_upper_bound(A, K, r, N_s, snr, P, B) -> float:
    """Closed-form effective-capacity bound in bit/s; independent of the QoS exponent.

    ``B (r log2(snr/N_s) + r log2(N_s/r^2 (N_s + r/snr) (tr(A^T K K^H A^*) + P r)))``.
    ``A`` may be a single ``M x P`` steering matrix or a stack ``(T, M, P)``, in
    which case the trace is averaged over the stack.
    """
    A = np.asarray(A)
    K = np.asarray(K)
    if r < 1:
        raise ValueError("rank must be >= 1")
    AtK = np.swapaxes(A, -1, -2) @ K
    trace = float(np.mean(np.sum(np.abs(AtK) ** 2, axis=(-2, -1))))
    inner = (N_s / r**2) * (N_s + r / snr) * (trace + P * r)
    return float(B * (r * np.log2(snr / N_s) + r * np.log2(inner)))
