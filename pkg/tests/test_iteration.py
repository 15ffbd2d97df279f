import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oeb import iteration as it
from oeb import mappings as mp
from oeb import schedules as sch
from oeb.errors import OutOfDomain, StartAtFixedPoint
from oeb.iteration import Scheme, Status
from oeb.mappings import Domain

WIDE = Domain.interval(-1.0, 2.0)
ONE = sch.constant(1.0)
ZERO = sch.constant(0.0)


def upper_pair(a1=0.5, a2=0.2):
    return mp.pair_catalog("extremal-upper", a1, a2, x_star=0.0, domain=WIDE)


def test_ishikawa_step_on_extremal_pair():
    y, xn = it.step_ishikawa(1.0, 1.0, 1.0, upper_pair())
    assert y[0] == 0.5
    assert xn[0] == pytest.approx(0.1, abs=1e-16)
    assert 1 - 1 + 0.2 * 1 * (1 - 1 + 0.5) == pytest.approx(0.1)


def test_inert_steps():
    y, xn = it.step_ishikawa(0.7, 0.0, 0.0, upper_pair())
    assert y[0] == 0.7 and xn[0] == 0.7
    y, xn = it.step_modified_ishikawa(0.7, 0.3, 0.0, upper_pair())
    assert xn[0] == y[0] == pytest.approx(0.7 * 0.7 + 0.3 * 0.35)


def test_ishikawa_step_on_reference_pair():
    pair = mp.pair_catalog("reference", 0.5, 0.2)
    y, xn = it.step_ishikawa(2.0, 1.0, 1.0, pair)
    assert y[0] == pytest.approx(1.22474487, abs=1e-8)
    assert xn[0] == pytest.approx(0.2 * math.sin(math.sqrt(1.5) - 1) + 1, abs=1e-15)
    assert xn[0] == pytest.approx(1.04457, abs=1e-5)


def test_modified_step_on_extremal_pair():
    y, xn = it.step_modified_ishikawa(1.0, 1.0, 1.0, upper_pair())
    assert y[0] == 0.5
    assert xn[0] == pytest.approx((1 - 1 + 0.5) * (1 - 1 + 0.2), abs=1e-16)


def test_reductions_of_single_steps():
    pair = mp.pair_catalog("reference", 0.5, 0.2)
    y, xn = it.step_ishikawa(2.0, 0.0, 0.3, pair)
    assert y[0] == 2.0
    assert xn[0] == it.step_mann(2.0, 0.3, pair.T2)[0]
    assert it.step_mann(2.0, 1.0, pair.T2)[0] == it.step_picard(2.0, pair.T2)[0]


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9, 1.0])
def test_picard_geometric_decay(alpha):
    pair = mp.pair_catalog("extremal-upper", 0.5, alpha)
    tr = it.run(Scheme.PICARD, pair, None, None, 2.0, 60)
    n = np.arange(61)
    np.testing.assert_allclose(tr.err, alpha ** n, rtol=(n.max() + 1) * 2.0**-52, atol=0)
    assert tr.err[0] == 1.0 and tr.status is Status.COMPLETED


def test_reference_first_error():
    tr = it.run(Scheme.ISHIKAWA, mp.pair_catalog("reference", 0.5, 0.2), ONE, ONE, 2.0, 5)
    exact = 0.2 * math.sin(math.sqrt(1.5) - 1)  # x_1 - 1, and |x_0 - 1| = 1
    assert tr.err[1] == pytest.approx(exact, rel=1e-14)
    assert tr.err[1] == pytest.approx(0.0445714, abs=5e-7)
    assert tr.x[1, 0] == pytest.approx(1.04457, abs=1e-5)


def test_picard_log_mode_far_below_underflow():
    pair = mp.pair_catalog("extremal-upper", 0.5, 0.5)
    tr = it.run(Scheme.PICARD, pair, None, None, 2.0, 2000)
    assert tr.status is Status.COMPLETED and tr.steps == 2000
    n = np.arange(2001)
    np.testing.assert_allclose(tr.log10_err, n * math.log10(0.5), rtol=1e-13, atol=1e-13)
    assert tr.err[-1] == 0.0  # underflowed, but the log column carries on


def test_nonaffine_pair_stalls_at_underflow():
    tr = it.run(Scheme.ISHIKAWA, mp.pair_catalog("reference", 0.5, 0.2), ONE, ONE, 2.0, 2000)
    assert tr.status is Status.STALLED
    assert tr.steps < 2000
    assert np.all(np.isfinite(tr.log10_err))
    assert len(tr.x) == len(tr.err) == tr.steps + 1


def test_floor_stops_early():
    pair = mp.pair_catalog("extremal-upper", 0.5, 0.5)
    tr = it.run(Scheme.PICARD, pair, None, None, 2.0, 100, floor=1e-3)
    assert tr.status is Status.CONVERGED_EARLY
    assert tr.steps == 10 and tr.err[-1] < 1e-3 <= tr.err[-2]


def test_start_at_fixed_point():
    with pytest.warns(StartAtFixedPoint):
        tr = it.run(Scheme.ISHIKAWA, mp.pair_catalog("reference", 0.5, 0.2), ONE, ONE, 1.0, 5)
    assert tr.status is Status.START_AT_FIXED_POINT
    assert np.all(tr.err == 0)


def test_start_outside_domain():
    with pytest.raises(OutOfDomain):
        it.run(Scheme.PICARD, mp.pair_catalog("reference", 0.5, 0.2), None, None, 5.0, 5)


def test_escape_is_detected():
    dom = mp.REFERENCE_DOMAIN
    bad = mp.custom_map(lambda x: 2 * x - 1, 1.0, dom, 1.0, id="expanding")
    pair = mp.MapPair(bad, bad, (1.0,))
    with pytest.raises(OutOfDomain):
        it.run(Scheme.PICARD, pair, None, None, 2.5, 5)


def test_engine_matches_natural_steps():
    pair = mp.pair_catalog("reference", 0.5, 0.2)
    a, b = sch.catalog("eqbn-a"), sch.catalog("eqbn-test3")
    N = 200
    for scheme, step in ((Scheme.ISHIKAWA, it.step_ishikawa),
                         (Scheme.MODIFIED_ISHIKAWA, it.step_modified_ishikawa)):
        tr = it.run(scheme, pair, a, b, 2.0, N)
        x = np.array([2.0])
        av, bv = sch.terms(a, N), sch.terms(b, N)
        for n in range(N):
            y, x = step(x, av[n], bv[n], pair)
            assert tr.y[n, 0] == pytest.approx(y[0], rel=1e-13, abs=1e-15)
            assert tr.x[n + 1, 0] == pytest.approx(x[0], rel=1e-13, abs=1e-15)


alphas = st.floats(0.05, 1.0)


@given(alphas, alphas, st.floats(-0.9, 0.9).filter(lambda v: abs(v) > 1e-6),
       st.integers(0, 2**20), st.integers(1, 150))
def test_scheme_reductions_are_bitwise(a1, a2, x0, seed, N):
    pair = mp.pair_catalog("extremal-upper", a1, a2, x_star=0.0, domain=WIDE)
    b = sch.random_uniform(seed, 1)
    ish = it.run(Scheme.ISHIKAWA, pair, ZERO, b, x0, N)
    mann = it.run(Scheme.MANN, pair, None, b, x0, N)
    assert np.array_equal(ish.x, mann.x) and np.array_equal(ish.err, mann.err)
    mann1 = it.run(Scheme.MANN, pair, None, ONE, x0, N)
    pic = it.run(Scheme.PICARD, pair, None, None, x0, N)
    assert np.array_equal(mann1.x, pic.x) and np.array_equal(mann1.log10_err, pic.log10_err)


@given(alphas, alphas, st.integers(0, 2**20), st.integers(1, 100))
def test_ishikawa_error_is_nonincreasing(a1, a2, seed, N):
    pair = mp.pair_catalog("reference", a1, a2)
    tr = it.run(Scheme.ISHIKAWA, pair, sch.random_uniform(seed, 0), sch.random_uniform(seed, 1), 2.0, N)
    assert np.all(np.diff(tr.err) <= 1e-15)


def test_vector_run_matches_componentwise_bound():
    box = Domain.symmetric([0.0, 0.0], 1.0)
    pair = mp.MapPair(mp.make_extremal_upper(0.5, [0.0, 0.0], box),
                      mp.make_extremal_upper(0.2, [0.0, 0.0], box), (0.0, 0.0))
    tr = it.run(Scheme.ISHIKAWA, pair, ONE, ONE, [0.6, -0.8], 30)
    np.testing.assert_allclose(tr.err, 0.1 ** np.arange(31), rtol=1e-13)


def test_scheme_aliases():
    assert Scheme.parse("im") is Scheme.MODIFIED_ISHIKAWA
    assert Scheme.parse("I") is Scheme.ISHIKAWA
    with pytest.raises(ValueError):
        Scheme.parse("halpern")


def test_no_warnings_on_ordinary_run():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        it.run(Scheme.MODIFIED_ISHIKAWA, mp.pair_catalog("reference", 0.5, 0.2),
               sch.catalog("im-test1-a"), sch.catalog("im-test1-b"), 2.0, 3000)
