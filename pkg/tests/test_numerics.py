import math
from fractions import Fraction

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from oeb import numerics as nm

floats = st.floats(-1e6, 1e6, allow_nan=False)


@given(st.lists(floats, min_size=1, max_size=60))
def test_cumulative_sum_tracks_exact_sum(xs):
    got = nm.cumulative_sum(xs)
    exact = Fraction(0)
    for i, x in enumerate(xs):
        exact += Fraction(x)
        assert abs(got[i] - float(exact)) <= 1e-12 * max(1.0, sum(abs(v) for v in xs[: i + 1]))


def test_compensated_sum_cancellation():
    assert nm.compensated_sum([1e16, 1.0, -1e16]) == 1.0


@given(st.lists(st.floats(1e-4, 1.0), min_size=1, max_size=80))
def test_cumprod_matches_log_oracle(fs):
    linear, log_abs = nm.cumprod(fs)
    ref = np.cumsum(np.log(fs))
    np.testing.assert_allclose(log_abs, ref, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(linear, np.exp(ref), rtol=1e-11)


def test_cumprod_survives_underflow():
    linear, log_abs = nm.cumprod([1e-200] * 3)
    assert math.isclose(log_abs[-1], 3 * math.log(1e-200), rel_tol=1e-14)
    assert linear[-1] == 0.0 or linear[-1] < 1e-300


def test_signed_cumprod_zero_and_sign():
    sign, log_abs = nm.signed_log_cumprod([0.5, -0.5, 0.0, 2.0])
    assert list(sign) == [1, -1, 0, 0]
    assert log_abs[2] == -math.inf and log_abs[3] == -math.inf
