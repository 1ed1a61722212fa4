import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coupledmimo import cosine_integral, sine_integral
from tests.oracles import ci_ref, si_ref

# frozen from the 50-digit series oracle
SI_PI = 1.8519370519824663
CI_ONE = 0.33740392290096816


def test_si_zero():
    assert sine_integral(0.0) == 0.0


def test_si_pi_matches_frozen_value():
    assert sine_integral(np.pi) == pytest.approx(SI_PI, abs=1e-12)
    assert si_ref(np.pi) == pytest.approx(SI_PI, abs=1e-15)


def test_ci_one_matches_frozen_value():
    assert cosine_integral(1.0) == pytest.approx(CI_ONE, abs=1e-12)
    assert ci_ref(1.0) == pytest.approx(CI_ONE, abs=1e-15)


@pytest.mark.parametrize("x", [0.0, -1.0, -1e-300])
def test_ci_rejects_nonpositive(x):
    with pytest.raises(ValueError):
        cosine_integral(x)


def test_ci_rejects_nonpositive_inside_array():
    with pytest.raises(ValueError):
        cosine_integral(np.array([1.0, 0.0]))


def test_scalar_in_scalar_out_and_vectorised():
    assert np.isscalar(sine_integral(1.0))
    x = np.array([0.5, 1.0, 2.0])
    np.testing.assert_allclose(sine_integral(x), [sine_integral(v) for v in x])
    np.testing.assert_allclose(cosine_integral(x), [cosine_integral(v) for v in x])


@given(st.floats(min_value=1e-3, max_value=300.0))
def test_against_series_oracle(x):
    assert sine_integral(x) == pytest.approx(si_ref(x), abs=1e-10)
    assert cosine_integral(x) == pytest.approx(ci_ref(x), abs=1e-10)


@given(st.floats(min_value=0.0, max_value=1e3))
def test_si_is_odd(x):
    assert sine_integral(-x) == -sine_integral(x)


def test_large_argument_limits():
    assert sine_integral(1e6) == pytest.approx(np.pi / 2, abs=1e-5)
    assert abs(cosine_integral(1e6)) < 1e-5
