import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oeb import rng
from oeb import schedules as sch
from oeb.errors import ConditionUnsatisfiable, DegenerateSchedule, FormulaOutOfRange, UnknownSchedule
from oeb.schedules import SeriesClass


def exact_term4(n: int) -> Fraction:
    return Fraction(2 * n + 3, 3 * (n + 1) ** 3 + 1)


def test_eval_examples():
    t4 = sch.catalog("eqbn-test4")
    assert sch.eval(t4, 0) == 0.75
    assert sch.eval(sch.constant(0.2), 17) == 0.2
    assert sch.eval(sch.constant(0.0), 5) == 0.0


def test_partial_sum_examples():
    assert sch.partial_sum(sch.constant(0.2), 10) == pytest.approx(2.0, abs=1e-15)
    assert sch.partial_sum(sch.constant(0.0), 1000) == 0.0
    # brute-force rational oracle over n = 0, 1, 2
    oracle = float(sum(exact_term4(n) for n in range(3)))
    assert sch.partial_sum(sch.catalog("eqbn-test4"), 3) == pytest.approx(oracle, rel=1e-15)
    assert oracle == pytest.approx(0.75 + 5 / 25 + 7 / 82, rel=1e-15)


@given(st.integers(0, 3000))
def test_test4_terms_match_rational_oracle(n):
    assert sch.eval(sch.catalog("eqbn-test4"), n) == pytest.approx(float(exact_term4(n)), rel=1e-15)


def test_classify_empirical():
    lin = sch.classify_empirical(sch.constant(0.5), 4096)
    assert lin.growth_exponent_estimate == pytest.approx(1.0, abs=0.05)
    sq = sch.custom("power", series_class=SeriesClass.CONVERGENT, exponent=2.0)
    assert sch.classify_empirical(sq, 4096).growth_exponent_estimate == pytest.approx(0.0, abs=0.05)
    with pytest.raises(DegenerateSchedule) as exc:
        sch.classify_empirical(sch.constant(0.0), 4096)
    assert exc.value.report.degenerate


def test_derived_schedule_with_zero_base_is_uniform():
    d = sch.derived_comparison_schedule(sch.constant(0.0), 0.5, 0.2, seed=9, stream=3)
    np.testing.assert_array_equal(sch.terms(d, 200), rng.uniform(9, 3, np.arange(200)))


def test_derived_schedule_offset():
    d = sch.derived_comparison_schedule(sch.constant(0.2), 0.5, 0.2, seed=1, stream=0)
    u = rng.uniform(1, 0, np.arange(50))
    a = sch.terms(d, 50)
    keep = a < 1
    assert keep.any()
    np.testing.assert_allclose((a - u)[keep], 0.24 / 0.52, rtol=1e-14)
    assert 0.24 / 0.52 == pytest.approx(0.461538, abs=1e-6)


def test_derived_schedule_unsatisfiable():
    d = sch.derived_comparison_schedule(sch.constant(0.5), 0.5, 0.2)
    assert sch.comparison_threshold(0.5, 0.2) == pytest.approx(0.5 / 1.1)
    with pytest.raises(ConditionUnsatisfiable):
        sch.terms(d, 3)


def test_catalog_entries():
    t2 = sch.catalog("eqbn-test2")
    n = np.arange(50.0)
    m = n + 1
    np.testing.assert_allclose(sch.terms(t2, 50), (np.sqrt(m) + np.sin(m)) / (2 * np.sqrt(m) + 3), rtol=1e-15)
    assert t2.series_class is SeriesClass.DIVERGENT
    im2 = sch.catalog("im-test2-a")
    np.testing.assert_allclose(sch.terms(im2, 50), 1 / (2 * n + 5), rtol=1e-15)
    assert im2.series_class is SeriesClass.DIVERGENT
    z = sch.catalog("zero")
    assert z.series_class is SeriesClass.CONVERGENT and not np.any(sch.terms(z, 10))
    with pytest.raises(UnknownSchedule):
        sch.catalog("no-such-key")
    assert {"eqbn-test1", "eqbn-test2", "eqbn-test3", "eqbn-test4"} <= set(sch.catalog_keys())


@pytest.mark.parametrize("key", sch.catalog_keys())
def test_every_catalog_schedule_stays_in_unit_interval(key):
    v = sch.terms(sch.catalog(key), 5000)
    assert np.all((v >= 0) & (v <= 1))


@pytest.mark.parametrize("key", [k for k in sch.catalog_keys() if k not in ("zero", "one", "rand")])
def test_declared_class_agrees_with_tail_mass(key):
    # divergent series here decay no faster than ~1/(3n), so the mass between
    # N/16 and N is at least ln(16)/3; the convergent ones decay like n^(-4/3)
    # or faster
    s = sch.catalog(key)
    v = sch.terms(s, 1 << 16)
    tail = math.fsum(v[1 << 12:])
    if s.series_class is SeriesClass.DIVERGENT:
        assert tail > 0.5
    else:
        assert tail < 0.2


def test_terms_read_only_and_cached():
    s = sch.catalog("eqbn-test3")
    v = sch.terms(s, 10)
    with pytest.raises(ValueError):
        v[0] = 0.5
    assert sch.terms(s, 10) is v


def test_out_of_range_formula():
    s = sch.rational([3.0], [1.0, 1.0])  # 3 / (n+1) exceeds 1 at n = 0
    with pytest.raises(FormulaOutOfRange):
        sch.eval(s, 0)
    assert sch.eval(s, 2) == 1.0


@given(st.integers(0, 2**31), st.integers(1, 400))
def test_seeded_randomness_is_deterministic(seed, N):
    a = sch.random_uniform(seed, 2)
    assert np.array_equal(sch.terms(a, N), sch.terms(sch.random_uniform(seed, 2), N))
    prefix = sch.terms(a, N)[: N // 2]
    assert np.array_equal(prefix, sch.terms(a, N // 2))


def test_with_seed_reseeds_base():
    d = sch.derived_comparison_schedule(sch.random_uniform(1, 0), 0.5, 0.2, seed=1)
    e = d.with_seed(2)
    assert e.seed == 2 and e.base.seed == 2
    f = sch.derived_comparison_schedule(sch.constant(0.1), 0.5, 0.2, seed=1)
    assert f.with_seed(2).base.seed is None
    assert not np.array_equal(sch.terms(f, 20), sch.terms(f.with_seed(2), 20))


def test_n0_limit_of_exponential_factor():
    # the factor exp(1 - 1/n) is continued by its limit 0 at n = 0
    s = sch.catalog("an-fig1b-test3")
    assert sch.eval(s, 0) == pytest.approx(1 / (4 * math.sin(1.0)), rel=1e-15)
    g = math.exp(1 - 1 / 3)
    assert sch.eval(s, 3) == pytest.approx((2 * g + 1) / (4 * 64 * abs(math.sin(4)) + 2 * g), rel=1e-14)
