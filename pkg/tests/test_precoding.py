import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coupledmimo.channel import realize
from coupledmimo.errors import SingularSystemError, UnsupportedConfigurationError
from coupledmimo.metrics import max_rate_closed_form
from coupledmimo.precoding import (
    default_detection_matrix,
    optimal_detection_matrix,
    optimal_precoder,
    power_allocation,
    rf_baseband_factorization,
    rf_chain_savings,
    zf_precoder,
)
from tests.conftest import crandn
from tests.oracles import allocation_by_projected_gradient, sum_rate

singular_sets = st.lists(st.floats(1e-2, 1e2), min_size=1, max_size=6).map(lambda v: sorted(v, reverse=True))


def test_equal_modes_share_power():
    np.testing.assert_allclose(power_allocation(np.ones(4), 2, 3.0), np.ones(4), rtol=1e-14)


def test_single_mode_takes_all_power():
    assert power_allocation([0.7], 3, 0.2) == pytest.approx([9.0])


def test_small_example_against_projected_gradient():
    lam = np.array([2.0, 1.0, 0.5])
    f_sq = power_allocation(lam, 1, 10.0)
    ref = allocation_by_projected_gradient(lam, 1, 10.0)
    np.testing.assert_allclose(f_sq, ref, atol=1e-6)
    assert sum_rate(f_sq, lam, 1, 10.0) >= sum_rate(ref, lam, 1, 10.0) - 1e-12


def test_weak_mode_switched_off_at_low_snr():
    f_sq = power_allocation([10.0, 0.01], 1, 0.1)
    assert f_sq[1] == 0.0 and f_sq[0] == pytest.approx(1.0)


@pytest.mark.parametrize("lam, snr", [([], 1.0), ([1.0, 0.0], 1.0), ([1.0, 2.0], 1.0), ([1.0], 0.0)])
def test_allocation_validation(lam, snr):
    with pytest.raises(ValueError):
        power_allocation(lam, 1, snr)


@given(singular_sets, st.integers(1, 4), st.floats(1e-3, 1e3))
def test_allocation_properties(lam, N_s, snr):
    f_sq = power_allocation(lam, N_s, snr)
    assert np.all(f_sq >= 0)
    assert f_sq.sum() == pytest.approx(N_s**2, rel=1e-10)
    assert np.all(np.diff(f_sq) <= 1e-9 * N_s**2)


@given(st.lists(st.floats(0.05, 20), min_size=1, max_size=4).map(lambda v: sorted(v, reverse=True)),
       st.integers(1, 4), st.sampled_from([0.1, 1.0, 10.0]))
def test_allocation_is_optimal(lam, N_s, snr):
    lam = np.array(lam)
    ours = sum_rate(power_allocation(lam, N_s, snr), lam, N_s, snr)
    ref = sum_rate(allocation_by_projected_gradient(lam, N_s, snr, iters=500), lam, N_s, snr)
    assert ours >= ref * (1 - 1e-6) - 1e-12


def _diag_realization(lam, N, M):
    H_eq = np.zeros((N, M), dtype=complex)
    H_eq[np.arange(len(lam)), np.arange(len(lam))] = lam
    return realize(H_eq, np.eye(M), np.eye(M))


def test_diagonal_channel_gives_diagonal_precoder():
    real = _diag_realization([3.0, 2.0], 2, 4)
    prec = optimal_precoder(real, 2, 10.0)
    expected = np.zeros((4, 2))
    expected[0, 0], expected[1, 1] = np.sqrt(prec.f_sq)
    np.testing.assert_allclose(np.abs(prec.F_eq), expected, atol=1e-14)


def test_streams_beyond_rank_rejected():
    real = _diag_realization([3.0], 2, 4)
    assert real.r == 1
    with pytest.raises(UnsupportedConfigurationError):
        optimal_precoder(real, 2, 1.0)
    with pytest.raises(UnsupportedConfigurationError):
        optimal_detection_matrix(real, 2)


@given(st.integers(1, 4), st.integers(1, 4), st.integers(2, 12), st.integers(0, 2**32 - 1), st.floats(0.05, 100))
def test_optimal_precoder_properties(N, N_s, M, seed, snr):
    rng = np.random.default_rng(seed)
    real = realize(crandn(rng, N, M), np.eye(M), np.eye(M))
    N_s = min(N_s, real.r)
    prec = optimal_precoder(real, N_s, snr)
    gram = prec.F_eq.conj().T @ prec.F_eq
    np.testing.assert_allclose(gram, np.diag(prec.f_sq), atol=1e-10 * N_s**2)
    assert prec.f_sq.sum() == pytest.approx(N_s**2, rel=1e-10)
    assert np.linalg.norm(prec.F_RF @ prec.F_BB - prec.F_eq) < 1e-9 * max(1, np.linalg.norm(prec.F_eq))
    assert prec.rf_chains_used == 2 * N_s
    assert prec.rf_chains_saved == max(M - 2 * N_s, 0)
    rate = max_rate_closed_form(real.singular_values, prec.f_sq, N_s, snr)
    assert rate >= 0


def test_factorization_extremes():
    F = np.array([[2.0 * np.exp(0.4j)], [0.0], [1.0j]])
    F_RF, F_BB = rf_baseband_factorization(F)
    assert F_BB[0, 0] == F_BB[1, 0] == 1.0
    assert F_RF[0, 0] == pytest.approx(F_RF[0, 1], abs=1e-15)
    assert np.angle(F_RF[0, 0]) == pytest.approx(0.4, abs=1e-14)
    assert F_RF[1, 0] + F_RF[1, 1] == pytest.approx(0, abs=1e-15)
    np.testing.assert_allclose(F_RF @ F_BB, F, atol=1e-15)


def test_factorization_zero_column(rng):
    F = np.zeros((5, 2), dtype=complex)
    F[:, 1] = crandn(rng, 5)
    F_RF, F_BB = rf_baseband_factorization(F)
    np.testing.assert_array_equal(F_RF[:, :2], np.ones((5, 2)))
    np.testing.assert_array_equal(F_BB[:, 0], 0)
    np.testing.assert_allclose(F_RF @ F_BB, F, atol=1e-14)


def test_factorization_random_8x2(rng):
    F = crandn(rng, 8, 2)
    F_RF, F_BB = rf_baseband_factorization(F)
    assert F_RF.shape == (8, 4) and F_BB.shape == (4, 2) and F_BB.dtype == float
    assert np.linalg.norm(F_RF @ F_BB - F) < 1e-12


@given(st.integers(1, 128), st.integers(1, 4), st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_factorization_properties(M, N_s, seed, scale):
    F = crandn(np.random.default_rng(seed), M, N_s) * scale
    F_RF, F_BB = rf_baseband_factorization(F)
    assert np.linalg.norm(F_RF @ F_BB - F) / np.linalg.norm(F) < 1e-9
    np.testing.assert_allclose(np.abs(F_RF), 1.0, atol=1e-12)


def test_zf_unitary_channel(rng):
    Q, _ = np.linalg.qr(crandn(rng, 3, 3))
    F = zf_precoder(Q, 3)
    P = Q @ F
    np.testing.assert_allclose(P, P[0, 0] * np.eye(3), atol=1e-12)
    np.testing.assert_allclose(F, Q.conj().T * np.sqrt(3), atol=1e-12)
    assert np.linalg.norm(F) ** 2 == pytest.approx(9.0)


def test_zf_single_stream_is_matched(rng):
    h = crandn(rng, 1, 6)
    F = zf_precoder(h, 1)
    np.testing.assert_allclose(F, h.conj().T / np.linalg.norm(h), atol=1e-14)


def test_zf_nulls_interference(rng):
    H = crandn(rng, 2, 8)
    G = H[:2] @ zf_precoder(H, 2)
    off = G - np.diag(np.diag(G))
    assert np.max(np.abs(off)) < 1e-10 * np.min(np.abs(np.diag(G)))


def test_zf_rank_deficient_rows():
    H = np.ones((2, 4), dtype=complex)
    with pytest.raises(SingularSystemError):
        zf_precoder(H, 2)
    with pytest.raises(ValueError):
        zf_precoder(H, 3)


def test_default_detection():
    np.testing.assert_array_equal(default_detection_matrix(3, 3).W_eq, np.eye(3))
    W = default_detection_matrix(4, 2).W_eq
    assert W.shape == (4, 2)
    np.testing.assert_array_equal(W[:2], np.eye(2))
    np.testing.assert_array_equal(W[2:], 0)
    with pytest.raises(ValueError):
        default_detection_matrix(1, 2)


def test_optimal_detection_orthonormal(rng):
    real = realize(crandn(rng, 4, 6), np.eye(6), np.eye(6))
    W = optimal_detection_matrix(real, 3).W_eq
    np.testing.assert_allclose(W.conj().T @ W, np.eye(3), atol=1e-12)


@pytest.mark.parametrize("M, N_s, saved", [(128, 1, 126), (2, 1, 0), (8, 2, 4), (3, 2, 0)])
def test_rf_chain_savings(M, N_s, saved):
    assert rf_chain_savings(M, N_s) == saved
