"""Parameter sequences (a_n), (b_n) in [0, 1] and their series diagnostics.

A :class:`Schedule` is an immutable description of a sequence.  Terms are
produced by :func:`terms` (a cached, read-only array of the first ``N``
terms) or :func:`eval` (a single term).  Every term is checked to lie in
[0, 1].

Whether ``sum(b_n)`` diverges cannot be decided by a finite computation, so
each schedule carries an analyst-declared :class:`SeriesClass`.  The
convergence predicates in :mod:`oeb.bounds` read that declaration;
:func:`classify_empirical` is only a diagnostic.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import rng
from .errors import (
    ConditionUnsatisfiable,
    DegenerateSchedule,
    FormulaOutOfRange,
    UnknownSchedule,
)
from .numerics import compensated_sum


class FormulaKind(str, enum.Enum):
    CONSTANT = "constant"
    RATIONAL = "rational"
    RANDOM = "random"
    DERIVED = "derived"
    CUSTOM = "custom"


class SeriesClass(str, enum.Enum):
    DIVERGENT = "divergent"
    CONVERGENT = "convergent"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Schedule:
    """A sequence in [0, 1].

    ``params`` is a tuple of ``(name, value)`` pairs so the object stays
    hashable.  Which names are read depends on ``kind``:

    * ``constant``: ``value``
    * ``rational``: ``p0, p1, ...`` and ``q0, q1, ...``; term n is
      ``sum(p_i n^i) / sum(q_j n^j)``
    * ``random``: optional ``stream``; term n is ``rand([0,1])``
    * ``derived``: ``alpha1``, ``alpha2``, optional ``stream``; built from
      ``base`` by :func:`derived_comparison_schedule`
    * ``custom``: whatever the named ``formula`` reads
    """

    id: str
    kind: FormulaKind
    params: tuple[tuple[str, float], ...] = ()
    seed: int | None = None
    series_class: SeriesClass = SeriesClass.UNKNOWN
    formula: str | None = None
    base: Schedule | None = None
    note: str = field(default="", compare=False)

    def param(self, name: str, default: float | None = None) -> float:
        for key, value in self.params:
            if key == name:
                return value
        if default is None:
            raise KeyError(f"schedule {self.id!r} has no parameter {name!r}")
        return default

    @property
    def param_dict(self) -> dict[str, float]:
        return dict(self.params)

    def with_seed(self, seed: int) -> Schedule:
        """Copy with every random component (including ``base``) reseeded."""
        base = self.base.with_seed(seed) if self.base is not None else None
        new_seed = seed if self.seed is not None else None
        return replace(self, seed=new_seed, base=base)


@dataclass(frozen=True)
class SeriesReport:
    schedule_id: str
    horizon: int
    partial_sum: float
    growth_exponent_estimate: float
    declared_class: SeriesClass
    degenerate: bool = False


# ---------------------------------------------------------------------------
# formulas

Formula = Callable[[np.ndarray, Schedule], np.ndarray]

FORMULAS: dict[str, Formula] = {}


def formula(name: str):
    def register(func: Formula) -> Formula:
        FORMULAS[name] = func
        return func

    return register


def _rand(n: np.ndarray, s: Schedule) -> np.ndarray:
    seed = rng.DEFAULT_SEED if s.seed is None else s.seed
    return rng.uniform(seed, int(s.param("stream", 0.0)), n.astype(np.uint64))


@formula("eqbn-test2")
def _(n, s):
    m = n + 1
    return (np.sqrt(m) + np.sin(m)) / (2 * np.sqrt(m) + 3)


@formula("eqbn-test3")
def _(n, s):
    m = n + 1
    return (n + 2) / (3 * m * np.cbrt(m) + 4)


@formula("eqbn-test4")
def _(n, s):
    m = n + 1
    return (2 * n + 3) / (3 * m**3 + 1)


@formula("bn-fig1b-div")
def _(n, s):
    m = n + 1
    return (2 * m**2 + 1) / (3 * m**2 * np.sqrt(m) + 4)


@formula("bn-fig1b-conv")
def _(n, s):
    m = n + 1
    return (n + 4) / (4 * m**3 + 5)


@formula("an-fig1b-test2")
def _(n, s):
    m = n + 1
    return np.sin(m) ** 2 / np.sqrt(m**2 + 10)


@formula("an-fig1b-test3")
def _(n, s):
    m = n + 1
    # exp(1 - 1/n) at n = 0 is taken as its one-sided limit 0
    with np.errstate(divide="ignore"):
        g = np.where(n > 0, np.exp(1 - 1 / np.where(n > 0, n, 1.0)), 0.0)
    return (2 * g + 1) / (4 * m**3 * np.abs(np.sin(m)) + 2 * g)


@formula("power")
def _(n, s):
    # (n + shift)^(-exponent) scaled by coef
    return s.param("coef", 1.0) * (n + s.param("shift", 1.0)) ** (-s.param("exponent"))


@formula("rand-over-n")
def _(n, s):
    return _rand(n, s) / (n + 1)


@formula("eqna-a")
def _(n, s):
    return (n + 3) / (2 * n + 3)


@formula("eqnb-a")
def _(n, s):
    m = n + 1
    return (2 * m**2 + np.cos(m)) / (3 * m**2 + 2)


@formula("eqnb-b")
def _(n, s):
    m = n + 1
    return (2 * m**2 + 1) / (4 * m**3 + np.sin(m))


@formula("eqna2-a")
def _(n, s):
    m = n + 1
    return np.sqrt(2 * m**2 + 1) / (4 * m**2 + 3)


@formula("eqna2-b")
def _(n, s):
    return 1 / np.sqrt(2 * n + 3)


@formula("im-test1-a")
def _(n, s):
    m = n + 1
    return (m**2 + 1) / (3 * m**2 + 5)


@formula("im-test1-b")
def _(n, s):
    m = n + 1
    return (m**3 + 1) / (4 * m**3 - 1)


@formula("im-test2-a")
def _(n, s):
    return 1 / (2 * n + 5)


@formula("im-test2-b")
def _(n, s):
    return np.sin(n) ** 4 / ((n + 1) ** 2 + 5)


@formula("im-test3-a")
def _(n, s):
    m = n + 1
    return np.abs(np.sin(m)) / (m ** (4 / 3) + 2)


@formula("im-test3-b")
def _(n, s):
    m = n + 1
    return (n + 2) / (3 * m**2 + 4)


@formula("im-test4-a")
def _(n, s):
    m = n + 1
    return 1 / (2 * m**1.5 + 5)


@formula("im-test4-b")
def _(n, s):
    return 1 / ((n + 1) ** 2 + 1)


@formula("cmp-test1-a")
def _(n, s):
    return (2 * n + 1) / (2 * n + 3) ** 2


@formula("cmp-b-fifth")
def _(n, s):
    return (n + 2) / (5 * n + 9)


@formula("cmp-test2-a")
def _(n, s):
    m = n + 1
    return np.sqrt(2 * m**2 + 1) / (4 * m**3 + 5)


@formula("cmp-b-sine")
def _(n, s):
    return np.abs(np.sin(n + 1)) / np.sqrt(6 * n + 5)


# ---------------------------------------------------------------------------
# evaluation


def comparison_threshold(alpha1: float, alpha2: float) -> float:
    """Largest b for which some a in [0, 1] satisfies the I-vs-IM condition."""
    return (1 - alpha1) / (1 + alpha1 * alpha2)


def comparison_offset(b, alpha1: float, alpha2: float):
    """Smallest a_n allowed by the I-vs-IM condition for a given b_n."""
    return (1 + alpha2) * b / ((1 - alpha1) * (1 + alpha2 * b))


def _raw_terms(s: Schedule, n: np.ndarray) -> np.ndarray:
    if s.kind is FormulaKind.CONSTANT:
        return np.full(n.shape, s.param("value"))
    if s.kind is FormulaKind.RATIONAL:
        p = _coefficients(s, "p")
        q = _coefficients(s, "q")
        return np.polyval(p[::-1], n) / np.polyval(q[::-1], n)
    if s.kind is FormulaKind.RANDOM:
        return _rand(n, s)
    if s.kind is FormulaKind.DERIVED:
        alpha1 = s.param("alpha1")
        alpha2 = s.param("alpha2")
        b = _raw_checked(s.base, n)
        limit = comparison_threshold(alpha1, alpha2)
        bad = np.flatnonzero(b > limit)
        if bad.size:
            k = int(bad[0])
            raise ConditionUnsatisfiable(int(n[k]), float(b[k]), limit)
        return np.minimum(1.0, _rand(n, s) + comparison_offset(b, alpha1, alpha2))
    if s.kind is FormulaKind.CUSTOM:
        try:
            func = FORMULAS[s.formula]
        except KeyError:
            raise UnknownSchedule(f"no formula named {s.formula!r}") from None
        return np.asarray(func(n, s), dtype=float)
    raise ValueError(f"unsupported schedule kind {s.kind!r}")


def _coefficients(s: Schedule, prefix: str) -> np.ndarray:
    coeffs = {}
    for key, value in s.params:
        if key.startswith(prefix) and key[1:].isdigit():
            coeffs[int(key[1:])] = value
    if not coeffs:
        raise ValueError(f"rational schedule {s.id!r} has no {prefix}-coefficients")
    out = np.zeros(max(coeffs) + 1)
    for i, value in coeffs.items():
        out[i] = value
    return out


def _raw_checked(s: Schedule, n: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        values = _raw_terms(s, n)
    values = np.broadcast_to(values, n.shape).astype(float)
    bad = np.flatnonzero(~((values >= 0.0) & (values <= 1.0)))
    if bad.size:
        k = int(bad[0])
        raise FormulaOutOfRange(s.id, int(n[k]), float(values[k]))
    return values


@functools.lru_cache(maxsize=512)
def _cached_terms(s: Schedule, N: int) -> np.ndarray:
    values = _raw_checked(s, np.arange(N, dtype=float))
    values.setflags(write=False)
    return values


def terms(s: Schedule, N: int) -> np.ndarray:
    """The first ``N`` terms as a read-only float array."""
    if N < 0:
        raise ValueError("N must be non-negative")
    return _cached_terms(s, int(N))


def eval(s: Schedule, n: int) -> float:  # noqa: A001 - mirrors the operation name
    """Term ``n`` of the schedule."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return float(_raw_checked(s, np.array([float(n)]))[0])


def partial_sum(s: Schedule, N: int) -> float:
    """Compensated sum of the first ``N`` terms; 0 for ``N = 0``."""
    if N < 0:
        raise ValueError("N must be non-negative")
    return compensated_sum(terms(s, N))


def classify_empirical(s: Schedule, N: int) -> SeriesReport:
    """Estimate how the partial sums grow, for comparison with the declared class.

    The exponent is the least-squares slope of ``log S(M)`` against ``log M``
    over the checkpoints ``M = 16, 32, ..., <= N``.  A slope near 1 means
    linear growth, near 0 a plateau.
    """
    if N < 16:
        raise ValueError("N must be at least 16")
    values = terms(s, N)
    total = compensated_sum(values)
    if not np.any(values > 0):
        report = SeriesReport(s.id, N, 0.0, 0.0, s.series_class, degenerate=True)
        raise DegenerateSchedule(f"schedule {s.id!r} is identically zero", report)
    checkpoints = []
    M = 16
    while M <= N:
        checkpoints.append(M)
        M *= 2
    if checkpoints[-1] != N:
        checkpoints.append(N)
    xs, ys = [], []
    for M in checkpoints:
        S = compensated_sum(values[:M])
        if S > 0:
            xs.append(math.log(M))
            ys.append(math.log(S))
    slope = float(np.polyfit(xs, ys, 1)[0]) if len(xs) >= 2 else 0.0
    return SeriesReport(s.id, N, total, slope, s.series_class)


# ---------------------------------------------------------------------------
# constructors


def _pairs(**kwargs) -> tuple[tuple[str, float], ...]:
    return tuple((k, float(v)) for k, v in kwargs.items())


def constant(value: float, id: str | None = None, series_class: SeriesClass | None = None) -> Schedule:
    if series_class is None:
        series_class = SeriesClass.CONVERGENT if value == 0 else SeriesClass.DIVERGENT
    return Schedule(id or f"const-{value!r}", FormulaKind.CONSTANT, _pairs(value=value),
                    series_class=series_class)


def rational(numerator, denominator, id: str = "rational",
             series_class: SeriesClass = SeriesClass.UNKNOWN) -> Schedule:
    """``sum(numerator[i] n^i) / sum(denominator[j] n^j)``."""
    params = tuple((f"p{i}", float(c)) for i, c in enumerate(numerator))
    params += tuple((f"q{j}", float(c)) for j, c in enumerate(denominator))
    return Schedule(id, FormulaKind.RATIONAL, params, series_class=series_class)


def random_uniform(seed: int = rng.DEFAULT_SEED, stream: int = 0, id: str = "rand") -> Schedule:
    return Schedule(id, FormulaKind.RANDOM, _pairs(stream=stream), seed=seed,
                    series_class=SeriesClass.DIVERGENT, note="rand([0,1])")


def custom(name: str, id: str | None = None, series_class: SeriesClass = SeriesClass.UNKNOWN,
           seed: int | None = None, note: str = "", **params) -> Schedule:
    if name not in FORMULAS:
        raise UnknownSchedule(f"no formula named {name!r}")
    return Schedule(id or name, FormulaKind.CUSTOM, _pairs(**params), seed=seed,
                    series_class=series_class, formula=name, note=note)


def derived_comparison_schedule(b: Schedule, alpha1: float, alpha2: float,
                                seed: int = rng.DEFAULT_SEED, stream: int = 0,
                                id: str | None = None) -> Schedule:
    """a_n = min(1, rand + (1+alpha2) b_n / ((1-alpha1)(1+alpha2 b_n))).

    Such an (a_n) satisfies the termwise condition under which the modified
    Ishikawa process beats the Ishikawa one.  Evaluating a term where
    ``b_n > (1-alpha1)/(1+alpha1*alpha2)`` raises
    :class:`~oeb.errors.ConditionUnsatisfiable`.
    """
    if not 0 <= alpha1 < 1:
        raise ValueError("alpha1 must lie in [0, 1)")
    if not 0 <= alpha2 <= 1:
        raise ValueError("alpha2 must lie in [0, 1]")
    return Schedule(id or f"derived({b.id})", FormulaKind.DERIVED,
                    _pairs(alpha1=alpha1, alpha2=alpha2, stream=stream), seed=seed,
                    series_class=SeriesClass.DIVERGENT, base=b)


# ---------------------------------------------------------------------------
# catalog

D = SeriesClass.DIVERGENT
C = SeriesClass.CONVERGENT

# the comparison experiments fix alpha1 = 1/2, alpha2 = 1/5
_CMP_ALPHA = (0.5, 0.2)


def _entries() -> dict[str, tuple[Callable[[], Schedule], str]]:
    e: dict[str, tuple[Callable[[], Schedule], str]] = {}

    def add(key, anchor, build):
        e[key] = (build, anchor)

    def cus(key, name, cls, note="", **params):
        return lambda: custom(name, id=key, series_class=cls, note=note, **params)

    def rnd(key, stream):
        return lambda: random_uniform(stream=stream, id=key)

    add("zero", "trivial zero schedule", lambda: constant(0.0, "zero"))
    add("one", "b_n = 1 (Picard)", lambda: constant(1.0, "one"))
    add("rand", "rand([0,1]), stream 0", rnd("rand", 0))

    # Ishikawa convergence tests (fig1a, fig1b, fig2a, fig2b)
    add("eqbn-a", "b_n convergence tests, a_n = rand([0,1])", rnd("eqbn-a", 1))
    add("eqbn-test1", "b_n convergence tests, Test 1", rnd("eqbn-test1", 2))
    add("eqbn-test2", "b_n convergence tests, Test 2", cus("eqbn-test2", "eqbn-test2", D, "~ 1/2"))
    add("eqbn-test3", "b_n convergence tests, Test 3", cus("eqbn-test3", "eqbn-test3", D, "~ (n+1)^(-1/3)"))
    add("eqbn-test4", "b_n convergence tests, Test 4", cus("eqbn-test4", "eqbn-test4", C, "~ (n+1)^(-2)"))

    # insensitivity to (a_n)
    add("bn-fig1b-div", "a_n convergence tests, divergent b_n", cus("bn-fig1b-div", "bn-fig1b-div", D, "~ (n+1)^(-1/2)"))
    add("bn-fig1b-conv", "a_n convergence tests, convergent b_n", cus("bn-fig1b-conv", "bn-fig1b-conv", C, "~ (n+1)^(-2)"))
    add("an-fig1b-test1", "a_n convergence tests, Test 1", rnd("an-fig1b-test1", 3))
    add("an-fig1b-test2", "a_n convergence tests, Test 2", cus("an-fig1b-test2", "an-fig1b-test2", D, "~ sin^2(n+1)/(n+1)"))
    add("an-fig1b-test3", "a_n convergence tests, Test 3", cus("an-fig1b-test3", "an-fig1b-test3", C, "~ (n+1)^(-3)"))

    # alpha2 = 1 tests (fig3)
    add("eqanbn-test1-a", "modified scheme tests, Test 1 a_n",
        cus("eqanbn-test1-a", "power", D, exponent=1.0))
    add("eqanbn-test1-b", "modified scheme tests, Test 1 b_n", rnd("eqanbn-test1-b", 4))
    add("eqanbn-test2-a", "modified scheme tests, Test 2 a_n",
        cus("eqanbn-test2-a", "power", D, exponent=2 / 3))
    add("eqanbn-test2-b", "modified scheme tests, Test 2 b_n",
        cus("eqanbn-test2-b", "power", D, exponent=3 / 4))
    add("eqanbn-test3-a", "modified scheme tests, Test 3 a_n",
        cus("eqanbn-test3-a", "power", D, exponent=1.0))
    add("eqanbn-test3-b", "modified scheme tests, Test 3 b_n",
        lambda: custom("rand-over-n", id="eqanbn-test3-b", series_class=D,
                       seed=rng.DEFAULT_SEED, stream=5))
    add("eqanbn-test4-a", "modified scheme tests, Test 4 a_n",
        cus("eqanbn-test4-a", "power", D, exponent=0.5))
    add("eqanbn-test4-b", "modified scheme tests, Test 4 b_n",
        cus("eqanbn-test4-b", "power", C, exponent=2.0))

    # rate experiments (fig5a to fig6b)
    add("eqna-a", "rate example A, a_n", cus("eqna-a", "eqna-a", D, "~ 1/2"))
    add("eqna-b", "rate example A, b_n", lambda: constant(0.2, "eqna-b"))
    add("eqnb-a", "rate example B, a_n", cus("eqnb-a", "eqnb-a", D, "~ 2/3"))
    add("eqnb-b", "rate example B, b_n", cus("eqnb-b", "eqnb-b", D, "~ 1/(2(n+1))"))
    add("eqna2-a", "rate example C, a_n", cus("eqna2-a", "eqna2-a", D, "~ 1/(2 sqrt(2) (n+1))"))
    add("eqna2-b", "rate example C, b_n", cus("eqna2-b", "eqna2-b", D, "~ (2n)^(-1/2)"))

    # modified Ishikawa convergence tests (fig4a, fig4b)
    add("im-test1-a", "IM Test 1 a_n", cus("im-test1-a", "im-test1-a", D, "~ 1/3"))
    add("im-test1-b", "IM Test 1 b_n", cus("im-test1-b", "im-test1-b", D, "~ 1/4"))
    add("im-test2-a", "IM Test 2 a_n", cus("im-test2-a", "im-test2-a", D, "~ 1/(n+1)"))
    add("im-test2-b", "IM Test 2 b_n", cus("im-test2-b", "im-test2-b", C))
    add("im-test3-a", "IM Test 3 a_n", cus("im-test3-a", "im-test3-a", C))
    add("im-test3-b", "IM Test 3 b_n", cus("im-test3-b", "im-test3-b", D, "~ 1/(3(n+1))"))
    add("im-test4-a", "IM Test 4 a_n", cus("im-test4-a", "im-test4-a", C))
    add("im-test4-b", "IM Test 4 b_n", cus("im-test4-b", "im-test4-b", C))

    # comparison experiments (fig8*, figcompare-*)
    add("cmp-test1-a", "comparison Test 1 a_n", cus("cmp-test1-a", "cmp-test1-a", D, "~ 1/(n+1)"))
    add("cmp-test1-b", "comparison Test 1 b_n", cus("cmp-test1-b", "cmp-b-fifth", D, "~ 1/5"))
    add("cmp-test2-a", "comparison Test 2 a_n", cus("cmp-test2-a", "cmp-test2-a", C, "~ (n+1)^(-2)"))
    add("cmp-test2-b", "comparison Test 2 b_n", cus("cmp-test2-b", "cmp-b-sine", D, "~ (n+1)^(-1/2)"))
    add("cmp-test3-b", "comparison Test 3 b_n", cus("cmp-test3-b", "cmp-b-fifth", D))
    add("cmp-test4-b", "comparison Test 4 b_n", cus("cmp-test4-b", "cmp-b-sine", D))
    add("cmp-test3-a", "comparison tests, a_n for Test 3",
        lambda: derived_comparison_schedule(catalog("cmp-test3-b"), *_CMP_ALPHA,
                                            stream=6, id="cmp-test3-a"))
    add("cmp-test4-a", "comparison tests, a_n for Test 4",
        lambda: derived_comparison_schedule(catalog("cmp-test4-b"), *_CMP_ALPHA,
                                            stream=7, id="cmp-test4-a"))
    return e


_CATALOG = _entries()


def catalog_keys() -> list[str]:
    return list(_CATALOG)


def catalog_anchor(name: str) -> str:
    return _CATALOG[name][1]


def catalog(name: str) -> Schedule:
    """Look up a frozen catalog key (see ``oeb catalog`` for the list)."""
    try:
        build, _ = _CATALOG[name]
    except KeyError:
        raise UnknownSchedule(f"unknown schedule {name!r}") from None
    return build()

