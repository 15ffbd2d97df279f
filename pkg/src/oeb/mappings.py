"""Non-expansive self-maps of a box, the reference pair, and the extremal affine maps.

Besides the plain evaluation :func:`apply`, each rule has an offset form
:func:`displace` computing ``T(x* + e) - x*`` without cancellation.  The
iteration engine works on offsets, which keeps errors far below the spacing
of floating-point numbers near ``x*`` accurate.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import AsymmetricDomain, OutOfDomain, UnknownMap

EPS = np.finfo(float).eps


class NormKind(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    MAX = "max"
    SUM = "sum"


_ORD = {NormKind.EUCLIDEAN: 2, NormKind.MAX: np.inf, NormKind.SUM: 1}


def norm(v, kind: NormKind = NormKind.EUCLIDEAN) -> float:
    if isinstance(v, float):
        return abs(v)
    v = np.asarray(v, dtype=float)
    if v.size == 1:
        return abs(float(v.reshape(-1)[0]))
    return float(np.linalg.norm(v.reshape(-1), ord=_ORD[kind]))


def as_vector(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float)).reshape(-1)


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box ``[lower, upper]`` with a chosen norm."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    norm_kind: NormKind = NormKind.EUCLIDEAN

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lower))
        hi = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lo) != len(hi) or not lo:
            raise ValueError("lower and upper must have the same positive length")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError("lower must not exceed upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "norm_kind", NormKind(self.norm_kind))

    @classmethod
    def interval(cls, lower: float, upper: float) -> Domain:
        return cls((lower,), (upper,))

    @classmethod
    def symmetric(cls, center, radius: float = 1.0, norm_kind=NormKind.EUCLIDEAN) -> Domain:
        c = as_vector(center)
        return cls(tuple(c - radius), tuple(c + radius), norm_kind)

    @property
    def dimension(self) -> int:
        return len(self.lower)

    @property
    def lo(self) -> np.ndarray:
        return np.array(self.lower)

    @property
    def hi(self) -> np.ndarray:
        return np.array(self.upper)

    def norm(self, v) -> float:
        return norm(v, self.norm_kind)

    def escape(self, x) -> float:
        """Largest signed distance of a component outside the box (<= 0 inside)."""
        x = as_vector(x)
        return float(np.max(np.maximum(self.lo - x, x - self.hi)))

    def slack(self) -> float:
        scale = max(1.0, *(abs(v) for v in self.lower + self.upper))
        return 4 * EPS * scale

    def contains(self, x, slack: float | None = None) -> bool:
        if slack is None:
            slack = self.slack()
        return self.escape(x) <= slack

    def is_symmetric_about(self, center) -> bool:
        c = as_vector(center)
        mid = (self.lo + self.hi) / 2
        return bool(np.all(np.abs(mid - c) <= self.slack()))


REFERENCE_DOMAIN = Domain.interval(0.25, 3.0)


class Rule(str, enum.Enum):
    AFFINE_TOWARD = "affine-toward"
    AFFINE_REFLECTED = "affine-reflected"
    SQRT = "sqrt"
    SINE = "sine"
    CUSTOM = "custom"


AFFINE_RULES = (Rule.AFFINE_TOWARD, Rule.AFFINE_REFLECTED)


@dataclass(frozen=True)
class NonExpansiveMap:
    """A map with claimed constant ``alpha``: ``|T(x) - T(y)| <= alpha |x - y|``.

    ``x_star`` is the fixed point the rule is built around: the target of
    the affine rules, and the all-ones vector for the square-root and sine maps.
    ``func`` is only used by ``Rule.CUSTOM``.
    """

    id: str
    alpha: float
    domain: Domain
    rule: Rule
    x_star: tuple[float, ...] | None = None
    func: Callable | None = None

    @property
    def slope(self) -> float:
        """Signed gain of an affine rule around its fixed point."""
        if self.rule is Rule.AFFINE_TOWARD:
            return self.alpha
        if self.rule is Rule.AFFINE_REFLECTED:
            return -self.alpha
        raise ValueError(f"{self.rule.value} is not affine")


@dataclass(frozen=True)
class MapPair:
    T1: NonExpansiveMap
    T2: NonExpansiveMap
    common_fixed_point: tuple[float, ...]

    def __post_init__(self):
        xs = tuple(float(v) for v in as_vector(self.common_fixed_point))
        object.__setattr__(self, "common_fixed_point", xs)
        if self.T1.domain != self.T2.domain:
            raise ValueError("T1 and T2 must share a domain")
        if len(xs) != self.domain.dimension:
            raise ValueError("fixed point dimension does not match the domain")
        if not self.domain.contains(xs):
            raise OutOfDomain(f"common fixed point {xs} lies outside the domain")
        tol = 4 * EPS * norm(np.array(xs)) + 1e-300
        for T in (self.T1, self.T2):
            r = fixed_point_residual(T, xs)
            if r > tol:
                raise ValueError(f"{T.id} moves the declared fixed point by {r!r}")

    @property
    def domain(self) -> Domain:
        return self.T1.domain

    @property
    def x_star(self) -> np.ndarray:
        return np.array(self.common_fixed_point)

    @property
    def alphas(self) -> tuple[float, float]:
        return self.T1.alpha, self.T2.alpha

    @property
    def is_affine(self) -> bool:
        return self.T1.rule in AFFINE_RULES and self.T2.rule in AFFINE_RULES


# ---------------------------------------------------------------------------
# evaluation


def _check(T: NonExpansiveMap, x) -> np.ndarray:
    x = as_vector(x)
    if x.size != T.domain.dimension:
        raise OutOfDomain(f"{T.id}: point of dimension {x.size}, domain has {T.domain.dimension}")
    if not T.domain.contains(x):
        raise OutOfDomain(f"{T.id}: {x.tolist()} is outside the domain")
    return x


def apply(T: NonExpansiveMap, x) -> np.ndarray:
    """Evaluate ``T`` at ``x``; raises :class:`OutOfDomain` outside the box."""
    x = _check(T, x)
    if T.rule is Rule.AFFINE_TOWARD:
        xs = np.array(T.x_star)
        return T.alpha * x + (1 - T.alpha) * xs
    if T.rule is Rule.AFFINE_REFLECTED:
        xs = np.array(T.x_star)
        return -T.alpha * x + (1 + T.alpha) * xs
    if T.rule is Rule.SQRT:
        return np.sqrt(T.alpha * x + 1 - T.alpha)
    if T.rule is Rule.SINE:
        return T.alpha * np.sin(x - 1) + 1
    return as_vector(T.func(x))


def displace(T: NonExpansiveMap, e, x_star=None):
    """``T(x* + e) - x*`` evaluated in a cancellation-free form.

    ``e`` may be a Python float (one-dimensional fast path) or an array.
    ``x_star`` is only needed for custom rules.
    """
    scalar = isinstance(e, float)
    rule = T.rule
    if rule is Rule.AFFINE_TOWARD:
        return T.alpha * e
    if rule is Rule.AFFINE_REFLECTED:
        return -T.alpha * e
    if rule is Rule.SQRT:
        # sqrt(1 + a e) - 1 = a e / (sqrt(1 + a e) + 1)
        t = T.alpha * e
        root = math.sqrt(1 + t) if scalar else np.sqrt(1 + t)
        return t / (root + 1)
    if rule is Rule.SINE:
        return T.alpha * (math.sin(e) if scalar else np.sin(e))
    xs = as_vector(x_star if x_star is not None else T.x_star)
    out = as_vector(T.func(xs + e)) - xs
    return float(out[0]) if scalar else out


def fixed_point_residual(T: NonExpansiveMap, x) -> float:
    """``|T(x) - x|`` in the domain's norm."""
    x = _check(T, x)
    return T.domain.norm(apply(T, x) - x)


# ---------------------------------------------------------------------------
# constructors


def _alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    return alpha


def make_extremal_upper(alpha: float, x_star, domain: Domain, id: str = "extremal-upper") -> NonExpansiveMap:
    """``T(x) = alpha x + (1 - alpha) x*``: attains the upper bounds with equality."""
    xs = as_vector(x_star)
    if not domain.contains(xs):
        raise OutOfDomain(f"x* = {xs.tolist()} is outside the domain")
    return NonExpansiveMap(id, _alpha(alpha), domain, Rule.AFFINE_TOWARD, tuple(xs.tolist()))


def make_extremal_lower(alpha: float, x_star, domain: Domain, id: str = "extremal-lower") -> NonExpansiveMap:
    """``T(x) = -alpha x + (1 + alpha) x*``: attains the lower bounds with equality.

    The reflection only maps the box into itself when the box is symmetric
    about ``x*``.
    """
    xs = as_vector(x_star)
    if not domain.contains(xs):
        raise OutOfDomain(f"x* = {xs.tolist()} is outside the domain")
    if not domain.is_symmetric_about(xs):
        raise AsymmetricDomain(
            f"domain [{domain.lower}, {domain.upper}] is not symmetric about x* = {xs.tolist()}"
        )
    return NonExpansiveMap(id, _alpha(alpha), domain, Rule.AFFINE_REFLECTED, tuple(xs.tolist()))


def sqrt_map(alpha1: float, domain: Domain = REFERENCE_DOMAIN) -> NonExpansiveMap:
    """``sqrt(alpha1 x + 1 - alpha1)``, fixed point 1."""
    return NonExpansiveMap("paper-T1", _alpha(alpha1), domain, Rule.SQRT,
                           (1.0,) * domain.dimension)


def sine_map(alpha2: float, domain: Domain = REFERENCE_DOMAIN) -> NonExpansiveMap:
    """``alpha2 sin(x - 1) + 1``, fixed point 1."""
    return NonExpansiveMap("paper-T2", _alpha(alpha2), domain, Rule.SINE,
                           (1.0,) * domain.dimension)


def custom_map(func: Callable, alpha: float, domain: Domain, x_star=None, id: str = "custom") -> NonExpansiveMap:
    xs = None if x_star is None else tuple(as_vector(x_star).tolist())
    return NonExpansiveMap(id, _alpha(alpha), domain, Rule.CUSTOM, xs, func)


MAP_KEYS = {
    "paper-T1": "T1(x) = sqrt(alpha1 x + 1 - alpha1) on [1/4, 3]",
    "paper-T2": "T2(x) = alpha2 sin(x - 1) + 1 on [1/4, 3]",
    "extremal-upper": "alpha x + (1 - alpha) x*  (equality case of the OUEB)",
    "extremal-lower": "-alpha x + (1 + alpha) x* on a box symmetric about x* (OLEB)",
}

PAIR_KEYS = {
    "reference": "(paper-T1, paper-T2) on [1/4, 3], x* = 1",
    "extremal-upper": "both maps extremal-upper; OUEB equality for I and IM",
    "extremal-lower": "T1 extremal-upper, T2 extremal-lower on a symmetric box; Ishikawa OLEB equality",
    "extremal-im-lower": "both maps extremal-lower on a symmetric box; modified Ishikawa OLEB equality",
}


def map_catalog(key: str, alpha: float, x_star=None, domain: Domain | None = None) -> NonExpansiveMap:
    if key == "paper-T1":
        return sqrt_map(alpha, domain or REFERENCE_DOMAIN)
    if key == "paper-T2":
        return sine_map(alpha, domain or REFERENCE_DOMAIN)
    if key in ("extremal-upper", "extremal-lower"):
        xs = as_vector(1.0 if x_star is None else x_star)
        if key == "extremal-upper":
            return make_extremal_upper(alpha, xs, domain or REFERENCE_DOMAIN)
        return make_extremal_lower(alpha, xs, domain or Domain.symmetric(xs))
    raise UnknownMap(f"unknown map {key!r}")


def pair_catalog(key: str, alpha1: float, alpha2: float, x_star=None,
                 domain: Domain | None = None) -> MapPair:
    """Build a shipped pair.  Extremal pairs default to ``x* = 1``; the lower
    ones default to the symmetric box ``[x* - 1, x* + 1]``."""
    if key == "reference":
        d = domain or REFERENCE_DOMAIN
        return MapPair(sqrt_map(alpha1, d), sine_map(alpha2, d), (1.0,) * d.dimension)
    xs = as_vector(1.0 if x_star is None else x_star)
    if key == "extremal-upper":
        d = domain or REFERENCE_DOMAIN
        return MapPair(make_extremal_upper(alpha1, xs, d, "extremal-upper-T1"),
                       make_extremal_upper(alpha2, xs, d, "extremal-upper-T2"), xs)
    if key == "extremal-lower":
        d = domain or Domain.symmetric(xs)
        return MapPair(make_extremal_upper(alpha1, xs, d, "extremal-upper-T1"),
                       make_extremal_lower(alpha2, xs, d, "extremal-lower-T2"), xs)
    if key == "extremal-im-lower":
        d = domain or Domain.symmetric(xs)
        return MapPair(make_extremal_lower(alpha1, xs, d, "extremal-lower-T1"),
                       make_extremal_lower(alpha2, xs, d, "extremal-lower-T2"), xs)
    raise UnknownMap(f"unknown pair {key!r}")


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class NonExpansiveReport:
    max_ratio: float
    max_escape: float
    alpha: float
    pairs: int

    @property
    def passed(self) -> bool:
        return self.max_ratio <= self.alpha * (1 + 1e-12) and self.max_escape <= 0.0


def verify_nonexpansive(T: NonExpansiveMap, sample_count: int, seed: int = 0,
                        min_separation: float = 1e-3) -> NonExpansiveReport:
    """Sample pairs in the box and measure the worst Lipschitz ratio and escape.

    Pairs closer than ``min_separation`` times the box diameter are skipped:
    below that the rounding error of ``T(x) - T(y)`` dominates the ratio.
    """
    if sample_count < 2:
        raise ValueError("sample_count must be at least 2")
    d = T.domain
    gen = np.random.default_rng(seed)
    lo, hi = d.lo, d.hi
    xs = lo + (hi - lo) * gen.random((sample_count, d.dimension))
    ys = lo + (hi - lo) * gen.random((sample_count, d.dimension))
    diam = d.norm(hi - lo)
    max_ratio = 0.0
    max_escape = -np.inf
    used = 0
    for x, y in zip(xs, ys):
        tx = apply(T, x)
        ty = apply(T, y)
        max_escape = max(max_escape, d.escape(tx), d.escape(ty))
        dist = d.norm(x - y)
        if dist <= min_separation * diam:
            continue
        used += 1
        max_ratio = max(max_ratio, d.norm(tx - ty) / dist)
    return NonExpansiveReport(max_ratio, float(max_escape), T.alpha, used)
