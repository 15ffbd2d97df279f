import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oeb import bounds as bd
from oeb import iteration as it
from oeb import mappings as mp
from oeb import schedules as sch
from oeb.bounds import Tri
from oeb.errors import BadAlpha, LowerUndefined, PreconditionViolated
from oeb.iteration import Scheme
from oeb.schedules import SeriesClass

C, D, U = SeriesClass.CONVERGENT, SeriesClass.DIVERGENT, SeriesClass.UNKNOWN
c = sch.constant
N = 40
n = np.arange(N + 1)


def product_oracle(factor: Fraction, count: int) -> list[float]:
    return [float(factor ** (k + 1)) for k in range(count)]


# -- Ishikawa OUEB ----------------------------------------------------------

def test_oueb_ishikawa_examples():
    assert np.all(bd.oueb_ishikawa(c(0.3), c(0.0), 0.5, 0.2, N).U == 1.0)
    t = bd.oueb_ishikawa(c(1.0), c(1.0), 0.5, 0.2, N)
    np.testing.assert_allclose(t.u_factors, 0.1, rtol=1e-15)
    np.testing.assert_allclose(t.U, product_oracle(Fraction(1, 10), N + 1), rtol=1e-13)
    for alpha in (0.3, 0.9):
        t = bd.oueb_ishikawa(c(0.0), c(1.0), 0.5, alpha, N)
        np.testing.assert_allclose(t.U, alpha ** (n + 1), rtol=1e-13)


def test_oleb_ishikawa_examples():
    assert np.all(bd.oleb_ishikawa(c(0.4), c(0.0), 0.5, 0.2, N).L == 1.0)
    t = bd.oleb_ishikawa(c(1.0), c(0.5), 0.5, 0.2, N)
    assert t.L[0] == pytest.approx(0.45, abs=1e-15)
    np.testing.assert_allclose(t.L, 0.45 ** (n + 1), rtol=1e-13)
    with pytest.raises(LowerUndefined) as exc:
        bd.oleb_ishikawa(c(1.0), c(1.0), 0.5, 0.2, N)
    assert exc.value.index == 0 and exc.value.factor == pytest.approx(-0.1)


# -- modified Ishikawa ------------------------------------------------------

def test_oueb_modified_examples():
    assert np.all(bd.oueb_modified(c(0.0), c(0.0), 0.5, 0.2, N).U == 1.0)
    t = bd.oueb_modified(c(1.0), c(1.0), 0.5, 0.2, N)
    np.testing.assert_allclose(t.U, 0.1 ** (n + 1), rtol=1e-13)
    b = sch.catalog("eqbn-test3")
    t = bd.oueb_modified(c(1.0), b, 1.0, 0.2, N)
    bv = sch.terms(b, N + 1)
    np.testing.assert_allclose(t.u_factors, 1 - bv + 0.2 * bv, rtol=1e-15)


def test_oleb_modified_examples():
    assert np.all(bd.oleb_modified(c(0.0), c(0.0), 0.5, 0.2, N).L == 1.0)
    t = bd.oleb_modified(c(0.25), c(0.25), 0.5, 0.2, N)
    assert t.L[0] == pytest.approx(0.4375, abs=1e-15)
    with pytest.raises(LowerUndefined) as exc:
        bd.oleb_modified(c(0.7), c(0.1), 0.5, 0.2, N)
    assert exc.value.which == "a" and exc.value.index == 0


def test_modified_lower_needs_both_parts_positive():
    # both parts negative: the product is positive but the bound is undefined
    t = bd.bounds(Scheme.MODIFIED_ISHIKAWA, c(0.9), c(0.9), 0.5, 0.5, 5)
    assert np.all(t.l_factors > 0)
    assert not t.lower_defined and t.first_undefined == 0 and t.L is None


def test_bad_alphas():
    for a1, a2 in ((-0.1, 0.5), (0.5, 1.5), (0.0, 0.0), (1.0, 1.0)):
        with pytest.raises(BadAlpha):
            bd.bounds(Scheme.ISHIKAWA, c(0.5), c(0.5), a1, a2, 3)


def test_long_products_do_not_underflow_in_log():
    t = bd.bounds(Scheme.ISHIKAWA, c(1.0), c(1.0), 0.5, 0.2, 2000)
    assert t.U[-1] == 0.0
    assert t.log_U[-1] == pytest.approx(2001 * math.log(0.1), rel=1e-13)


# -- convergence criteria ---------------------------------------------------

BRANCHES = [
    # scheme, alpha1, alpha2, class_a, class_b, class_ab, upper, lower
    (Scheme.ISHIKAWA, 0.5, 0.2, U, D, None, Tri.YES, Tri.YES),
    (Scheme.ISHIKAWA, 0.5, 0.2, D, C, None, Tri.NO, Tri.NO),
    (Scheme.ISHIKAWA, 0.5, 1.0, D, D, C, Tri.NO, Tri.YES),
    (Scheme.ISHIKAWA, 0.5, 1.0, D, D, D, Tri.YES, Tri.YES),
    (Scheme.MODIFIED_ISHIKAWA, 0.5, 0.5, C, C, None, Tri.NO, Tri.NO),
    (Scheme.MODIFIED_ISHIKAWA, 0.5, 0.5, D, C, None, Tri.YES, Tri.YES),
    (Scheme.MODIFIED_ISHIKAWA, 1.0, 0.5, D, C, None, Tri.NO, Tri.YES),
    (Scheme.MODIFIED_ISHIKAWA, 0.5, 1.0, C, D, None, Tri.NO, Tri.YES),
]


@pytest.mark.parametrize("scheme,a1,a2,ca,cb,cab,upper,lower", BRANCHES)
def test_predict_convergence_branches(scheme, a1, a2, ca, cb, cab, upper, lower):
    p = bd.predict_convergence(scheme, a1, a2, ca, cb, class_ab=cab)
    assert (p.upper_to_zero, p.lower_to_zero) == (upper, lower)
    assert p.chi_alpha2_eq_1 == (a2 == 1.0)


def test_unknown_only_where_relevant():
    p = bd.predict_convergence(Scheme.ISHIKAWA, 0.5, 0.2, U, D)
    assert p.upper_to_zero is Tri.YES
    p = bd.predict_convergence(Scheme.ISHIKAWA, 0.5, 1.0, D, D)
    assert p.upper_to_zero is Tri.UNKNOWN
    p = bd.predict_convergence(Scheme.MODIFIED_ISHIKAWA, 0.5, 0.5, U, C)
    assert p.upper_to_zero is Tri.UNKNOWN and p.lower_to_zero is Tri.UNKNOWN
    assert bd.predict_convergence(Scheme.PICARD, 0.0, 0.5).upper_to_zero is Tri.YES


# -- logarithmic sandwiches -------------------------------------------------

def test_log_sandwich_ishikawa_example():
    s = bd.log_sandwich(Scheme.ISHIKAWA, c(1.0), c(0.5), 0.5, 0.2, 100)
    Sb = 0.5 * 101
    assert s.lower_sum == pytest.approx((0.1 - 1) / 0.1 * Sb)
    assert s.upper_sum == pytest.approx(-0.8 * Sb)
    assert s.lower_sum <= s.logU <= s.upper_sum
    assert s.contains()


def test_log_sandwich_zero_b():
    s = bd.log_sandwich(Scheme.ISHIKAWA, c(0.5), c(0.0), 0.5, 0.2, 50)
    assert s.lower_sum == 0 and s.upper_sum == 0 and s.logU == 0


def test_log_sandwich_modified_lower_example():
    s = bd.log_sandwich(Scheme.MODIFIED_ISHIKAWA, c(0.25), c(0.25), 0.5, 0.5, 100)
    k = 101
    lo = -k * 2 * (1.5 * 0.25 / (1 - 1.5 * 0.25))
    hi = -k * 2 * 1.5 * 0.25
    assert s.L_lower_sum == pytest.approx(lo) and s.L_upper_sum == pytest.approx(hi)
    assert lo <= s.logL <= hi and s.contains()


unit = st.floats(0.0, 1.0)


@given(st.floats(0.01, 1.0), st.floats(0.01, 0.99), st.integers(0, 2**20), st.integers(1, 300),
       st.sampled_from([Scheme.ISHIKAWA, Scheme.MODIFIED_ISHIKAWA]))
def test_log_sandwich_always_contains(a1, a2, seed, N, scheme):
    a = sch.random_uniform(seed, 0)
    b = sch.random_uniform(seed, 1)
    assume(0 < a1 + a2 < 2)
    assert bd.log_sandwich(scheme, a, b, a1, a2, N).contains(tol=1e-10)


# -- bracketing on the reference pair ---------------------------------------

@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.integers(0, 2**20),
       st.sampled_from([Scheme.ISHIKAWA, Scheme.MODIFIED_ISHIKAWA]))
def test_reference_pair_is_bracketed(a1, a2, seed, scheme):
    N = 120
    # keep every lower factor positive
    a = sch.rational([seed % 4 + 1.0], [10.0, 1.0])  # a_n <= 0.4
    b = sch.rational([1.0], [4.0, 1.0])
    tr = it.run(scheme, mp.pair_catalog("reference", a1, a2), a, b, 2.0, N)
    t = bd.bounds(scheme, a, b, a1, a2, tr.steps - 1)
    err = tr.err[1:]
    assert np.all(err <= t.U * (1 + 1e-12))
    assert t.lower_defined
    assert np.all(err >= t.L * (1 - 1e-12))


# -- series equivalence witness ---------------------------------------------

def test_series_witness_examples():
    w = bd.series_equiv_witness(sch.catalog("eqbn-test3"), 0.0, 1000)
    assert w.termwise_lower_ok and w.ratio_tail == 0.0
    harmonic = sch.rational([1.0], [2.0, 1.0])
    w = bd.series_equiv_witness(harmonic, 1.0, 10_000)
    assert w.termwise_lower_ok and w.ratio_tail <= 2e-4
    with pytest.raises(PreconditionViolated):
        bd.series_equiv_witness(c(0.9), 1.2, 10)


@given(st.floats(0.5, 3.0), st.floats(0.0, 1.0))
def test_series_witness_ratio_vanishes(p, u):
    a = sch.custom("power", exponent=p, shift=2.0)
    w1 = bd.series_equiv_witness(a, u, 400)
    w2 = bd.series_equiv_witness(a, u, 4000)
    assert w1.termwise_lower_ok and w2.termwise_lower_ok
    assert w2.ratio_tail <= w1.ratio_tail + 1e-15


def test_restart_floor():
    f = np.array([-0.2, 0.5, 0.5, 0.5])
    assert bd.last_nonpositive(f) == 0
    assert bd.restart_floor(f, 0.8, 1, 3) == pytest.approx(0.8 * 0.125)
    with pytest.raises(LowerUndefined):
        bd.restart_floor(f, 1.0, 0, 3)
