"""Picard, Mann, Ishikawa and modified Ishikawa processes.

:func:`run` iterates the offset ``e_n = x_n - x*`` rather than ``x_n``.
The step formulas are affine in the maps' displacements, so this is the same
process, but it keeps ``Err_n`` accurate long after ``x_n`` has become
indistinguishable from ``x*`` in floating point.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import schedules as sch
from .errors import OutOfDomain, StartAtFixedPoint
from .mappings import MapPair, NonExpansiveMap, Rule, apply, as_vector, displace

# offsets below this are treated as underflowed
TINY = 1e-300


class Scheme(str, enum.Enum):
    PICARD = "picard"
    MANN = "mann"
    ISHIKAWA = "ishikawa"
    MODIFIED_ISHIKAWA = "modified-ishikawa"

    @classmethod
    def parse(cls, value) -> Scheme:
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"i": "ishikawa", "im": "modified-ishikawa", "modified": "modified-ishikawa",
                   "modifiedishikawa": "modified-ishikawa"}
        return cls(aliases.get(key, key))


class Status(str, enum.Enum):
    COMPLETED = "completed"
    CONVERGED_EARLY = "converged-early"
    STALLED = "stalled"
    START_AT_FIXED_POINT = "start-at-fixed-point"


@dataclass(frozen=True)
class IterationTrace:
    """One run.  Row ``n`` of ``x`` is ``x_n``; row ``n`` of ``y`` is ``y_n``.

    ``offset`` holds ``x_n - x*`` as computed by the engine.  ``log10_err``
    stays finite after ``err`` underflows to 0 on affine pairs.
    """

    scheme: Scheme
    x0: np.ndarray
    x_star: np.ndarray
    x: np.ndarray
    y: np.ndarray
    offset: np.ndarray
    y_offset: np.ndarray
    err: np.ndarray
    log10_err: np.ndarray
    status: Status
    horizon: int

    @property
    def steps(self) -> int:
        """Number of steps actually taken (``len(x) - 1``)."""
        return len(self.err) - 1

    @property
    def log_err(self) -> np.ndarray:
        """Natural log of ``err``."""
        return self.log10_err * math.log(10.0)

    def x_scalar(self) -> np.ndarray:
        return self.x[:, 0]


# ---------------------------------------------------------------------------
# single steps in natural coordinates


def step_ishikawa(x, a: float, b: float, pair: MapPair) -> tuple[np.ndarray, np.ndarray]:
    """``y = (1-a) x + a T1(x)``, ``x' = (1-b) x + b T2(y)``."""
    x = as_vector(x)
    y = (1 - a) * x + a * apply(pair.T1, x)
    return y, (1 - b) * x + b * apply(pair.T2, y)


def step_modified_ishikawa(x, a: float, b: float, pair: MapPair) -> tuple[np.ndarray, np.ndarray]:
    """``y = (1-a) x + a T1(x)``, ``x' = (1-b) y + b T2(y)``."""
    x = as_vector(x)
    y = (1 - a) * x + a * apply(pair.T1, x)
    return y, (1 - b) * y + b * apply(pair.T2, y)


def step_mann(x, b: float, T: NonExpansiveMap) -> np.ndarray:
    x = as_vector(x)
    return (1 - b) * x + b * apply(T, x)


def step_picard(x, T: NonExpansiveMap) -> np.ndarray:
    return apply(T, as_vector(x))


# ---------------------------------------------------------------------------
# engine


def _scalar_displacement(T: NonExpansiveMap, x_star: np.ndarray):
    """A float -> float version of :func:`displace` for one-dimensional runs."""
    alpha = T.alpha
    if T.rule is Rule.AFFINE_TOWARD:
        return lambda e: alpha * e
    if T.rule is Rule.AFFINE_REFLECTED:
        return lambda e: -alpha * e
    if T.rule is Rule.SQRT:
        sqrt = math.sqrt

        def f(e):
            t = alpha * e
            return t / (sqrt(1 + t) + 1)
        return f
    if T.rule is Rule.SINE:
        sin = math.sin
        return lambda e: alpha * sin(e)
    return lambda e: displace(T, float(e), x_star)


def _affine_factor(scheme: Scheme, s1: float, s2: float, a: float, b: float) -> float:
    """Exact per-step multiplier of the offset for affine pairs with slopes s1, s2."""
    if scheme is Scheme.PICARD:
        return s2
    if scheme is Scheme.MANN:
        return 1 - b + b * s2
    inner = 1 - a + a * s1
    if scheme is Scheme.ISHIKAWA:
        return 1 - b + b * s2 * inner
    return inner * (1 - b + b * s2)


def _neumaier(s: float, c: float, v: float) -> tuple[float, float]:
    t = s + v
    if abs(s) >= abs(v):
        c += (s - t) + v
    else:
        c += (v - t) + s
    return t, c


def run(scheme, pair: MapPair, a: sch.Schedule | None, b: sch.Schedule | None, x0, N: int,
        floor: float = 0.0) -> IterationTrace:
    """Iterate ``scheme`` for ``N`` steps from ``x0``.

    Picard iterates ``T2`` and ignores both schedules; Mann iterates ``T2``
    with weights ``b``.  When ``floor > 0`` the run stops at the first ``n``
    with ``|x_n - x*| < floor |x_0 - x*|`` (status ``CONVERGED_EARLY``).

    Once the offset drops below 1e-300, affine pairs continue with an exact
    log-space recurrence; other pairs stop with status ``STALLED``.
    """
    scheme = Scheme.parse(scheme)
    if N < 1:
        raise ValueError("N must be at least 1")
    if floor < 0:
        raise ValueError("floor must be non-negative")
    dom = pair.domain
    x0 = as_vector(x0)
    if x0.size != dom.dimension:
        raise OutOfDomain(f"x0 has dimension {x0.size}, domain has {dom.dimension}")
    if not dom.contains(x0):
        raise OutOfDomain(f"x0 = {x0.tolist()} is outside the domain")
    xs = pair.x_star

    if scheme is Scheme.PICARD:
        av = [0.0] * N
        bv = [1.0] * N
    else:
        if b is None:
            raise ValueError(f"{scheme.value} needs a b schedule")
        bv = sch.terms(b, N).tolist()
        if scheme is Scheme.MANN:
            av = [0.0] * N
        else:
            if a is None:
                raise ValueError(f"{scheme.value} needs an a schedule")
            av = sch.terms(a, N).tolist()

    e0 = x0 - xs
    norm = dom.norm
    n0 = norm(e0)
    if n0 == 0.0:
        warnings.warn("x0 is the common fixed point; every error is 0", StartAtFixedPoint, stacklevel=2)
        return _at_fixed_point(scheme, x0, xs, N)

    scalar = dom.dimension == 1
    if scalar:
        d1 = _scalar_displacement(pair.T1, xs)
        d2 = _scalar_displacement(pair.T2, xs)
        e = float(e0[0])
    else:
        def d1(v):
            return displace(pair.T1, v, xs)

        def d2(v):
            return displace(pair.T2, v, xs)
        e = e0.copy()

    affine = pair.is_affine
    s1 = pair.T1.slope if affine else 0.0
    s2 = pair.T2.slope if affine else 0.0
    has_y = scheme is not Scheme.PICARD
    floor_abs = floor * n0

    offs = [e]
    yoffs = []
    logs = [0.0]
    status = Status.COMPLETED
    log_mode = False
    # log10 |e| / |e0| and its compensation, plus the sign/direction in log mode
    L, Lc = 0.0, 0.0
    sign, direction = 1.0, 1.0
    log_n0 = math.log10(n0)
    for n in range(N):
        an, bn = av[n], bv[n]
        if log_mode:
            if has_y:
                inner = 1.0 if scheme is Scheme.MANN else 1 - an + an * s1
                yoffs.append(inner * offs[-1])
            f = _affine_factor(scheme, s1, s2, an, bn)
            if f == 0.0:
                L, Lc = -math.inf, 0.0
            elif L != -math.inf:
                L, Lc = _neumaier(L, Lc, math.log10(abs(f)))
                if f < 0:
                    sign = -sign
            with np.errstate(under="ignore"):
                mag = 10.0 ** (L + Lc + log_n0) if L != -math.inf else 0.0
            offs.append(sign * mag * direction)
            logs.append(L + Lc)
            continue

        if scheme is Scheme.PICARD:
            y = None
            e = d2(e)
        elif scheme is Scheme.MANN:
            y = e
            e = (1 - bn) * e + bn * d2(e)
        else:
            y = (1 - an) * e + an * d1(e)
            if scheme is Scheme.ISHIKAWA:
                e = (1 - bn) * e + bn * d2(y)
            else:
                e = (1 - bn) * y + bn * d2(y)
        if has_y:
            yoffs.append(y)
        offs.append(e)
        cur = abs(e) if scalar else norm(e)
        logs.append(math.log10(cur / n0) if cur > 0 else -math.inf)

        if 0.0 < cur < TINY:
            if affine:
                log_mode = True
                L, Lc = logs[-1], 0.0
                if scalar:
                    sign, direction = math.copysign(1.0, e), 1.0
                else:
                    sign, direction = 1.0, e / cur
            else:
                status = Status.STALLED
                break
        if floor_abs > 0 and cur < floor_abs:
            status = Status.CONVERGED_EARLY
            break

    return _assemble(scheme, pair, x0, xs, offs, yoffs if has_y else [], logs, status, N)


def _assemble(scheme, pair, x0, xs, offs, yoffs, logs, status, N) -> IterationTrace:
    d = len(xs)
    off = np.array(offs, dtype=float).reshape(len(offs), d)
    yoff = (np.array(yoffs, dtype=float).reshape(len(yoffs), d) if yoffs
            else np.empty((0, d)))
    x = xs + off
    y = xs + yoff
    x[0] = x0
    dom = pair.domain
    slack = dom.slack()
    for name, arr in (("x", x), ("y", y)):
        if arr.size:
            esc = np.max(np.maximum(dom.lo - arr, arr - dom.hi), axis=1)
            bad = np.flatnonzero(esc > slack)
            if bad.size:
                k = int(bad[0])
                raise OutOfDomain(f"{name}_{k} = {arr[k].tolist()} left the domain")
    log10_err = np.array(logs, dtype=float)
    with np.errstate(under="ignore"):
        err = np.power(10.0, log10_err)
    # direct ratios where no underflow happened, so Err_0 = 1 exactly
    norms = np.array([dom.norm(v) for v in off]) if d > 1 else np.abs(off[:, 0])
    direct = norms / norms[0]
    live = norms >= TINY
    err[live] = direct[live]
    err[norms == 0] = 0.0
    return IterationTrace(scheme, x0, xs.copy(), x, y, off, yoff, err, log10_err, status, N)


def _at_fixed_point(scheme: Scheme, x0, xs, N: int) -> IterationTrace:
    d = len(xs)
    x = np.tile(x0, (N + 1, 1))
    off = np.zeros((N + 1, d))
    ny = 0 if scheme is Scheme.PICARD else N
    return IterationTrace(scheme, x0, xs.copy(), x, np.tile(x0, (ny, 1)), off, np.zeros((ny, d)),
                          np.zeros(N + 1), np.full(N + 1, -np.inf), Status.START_AT_FIXED_POINT, N)
