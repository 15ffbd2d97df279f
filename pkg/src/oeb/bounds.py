"""Optimal upper and lower error bounds (OUEB / OLEB) and the criteria built on them.

Indexing: ``U[n]`` multiplies the factors ``k = 0..n`` and bounds
``Err_{n+1}``, i.e. ``|x_{n+1} - x*| <= U[n] |x_0 - x*|``.  For Picard this
makes ``U[n] = alpha^(n+1)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import schedules as sch
from .errors import BadAlpha, LowerUndefined, NonpositiveFactor, PreconditionViolated
from .iteration import Scheme
from .numerics import compensated_sum, cumprod
from .schedules import SeriesClass


def check_alphas(alpha1: float, alpha2: float) -> None:
    for name, v in (("alpha1", alpha1), ("alpha2", alpha2)):
        if not (0.0 <= v <= 1.0):
            raise BadAlpha(f"{name} = {v!r} is outside [0, 1]")
    if not 0.0 < alpha1 + alpha2 < 2.0:
        raise BadAlpha(f"alpha1 + alpha2 = {alpha1 + alpha2!r} must lie in (0, 2)")


@dataclass(frozen=True)
class BoundsTrace:
    """Bound sequences over ``n = 0..N``.

    ``L`` is ``None`` unless every lower factor is positive; ``signed_L`` is
    the raw product regardless.  ``log_U`` / ``log_L`` are natural logs and
    stay finite where the linear products underflow.
    """

    scheme: Scheme
    U: np.ndarray | None
    log_U: np.ndarray | None
    u_factors: np.ndarray | None
    L: np.ndarray | None
    log_L: np.ndarray | None
    signed_L: np.ndarray | None
    l_factors: np.ndarray | None
    lower_defined: bool
    first_undefined: int | None = None
    A: np.ndarray | None = None


def _schedules(scheme: Scheme, a, b, N: int) -> tuple[np.ndarray, np.ndarray]:
    if scheme is Scheme.PICARD:
        return np.zeros(N + 1), np.ones(N + 1)
    bv = np.asarray(sch.terms(b, N + 1))
    if scheme is Scheme.MANN or a is None:
        return np.zeros(N + 1), bv
    return np.asarray(sch.terms(a, N + 1)), bv


def upper_factors(scheme, av, bv, alpha1: float, alpha2: float) -> np.ndarray:
    scheme = Scheme.parse(scheme)
    inner = 1 - av + alpha1 * av
    if scheme is Scheme.MODIFIED_ISHIKAWA:
        return inner * (1 - bv + alpha2 * bv)
    return 1 - bv + alpha2 * bv * inner


def lower_factors(scheme, av, bv, alpha1: float, alpha2: float):
    """Per-step OLEB factors; for the modified scheme also the two parts."""
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.MODIFIED_ISHIKAWA:
        fa = 1 - av - alpha1 * av
        fb = 1 - bv - alpha2 * bv
        return fa * fb, fa, fb
    A = 1 + alpha2 * (1 - av + alpha1 * av)
    return 1 - bv * A, A, None


def _first_nonpositive(f: np.ndarray) -> int | None:
    bad = np.flatnonzero(f <= 0)
    return int(bad[0]) if bad.size else None


def bounds(scheme, a, b, alpha1: float, alpha2: float, N: int) -> BoundsTrace:
    """OUEB and (when defined) OLEB for ``n = 0..N``; never raises on the lower side."""
    scheme = Scheme.parse(scheme)
    check_alphas(alpha1, alpha2)
    if N < 0:
        raise ValueError("N must be non-negative")
    av, bv = _schedules(scheme, a, b, N)
    uf = upper_factors(scheme, av, bv, alpha1, alpha2)
    U, log_U = cumprod(uf)
    lf, extra, fb = lower_factors(scheme, av, bv, alpha1, alpha2)
    if scheme is Scheme.MODIFIED_ISHIKAWA:
        # both parts must be positive, not just their product
        first = _first_nonpositive(np.minimum(extra, fb))
        A = None
    else:
        first = _first_nonpositive(lf)
        A = extra
    signed, _ = cumprod(lf)
    L = log_L = None
    if first is None:
        L, log_L = cumprod(lf)
    return BoundsTrace(scheme, U, log_U, uf, L, log_L, signed, lf, first is None, first, A)


def oueb_ishikawa(a, b, alpha1: float, alpha2: float, N: int) -> BoundsTrace:
    """``U_n = prod_{k<=n} (1 - b_k + alpha2 b_k (1 - a_k + alpha1 a_k))``."""
    t = bounds(Scheme.ISHIKAWA, a, b, alpha1, alpha2, N)
    return BoundsTrace(t.scheme, t.U, t.log_U, t.u_factors, None, None, None, None, False)


def oleb_ishikawa(a, b, alpha1: float, alpha2: float, N: int) -> BoundsTrace:
    """``L_n = prod_{k<=n} (1 - b_k A_k)`` with ``A_k = 1 + alpha2 (1 - a_k + alpha1 a_k)``.

    Raises :class:`LowerUndefined` at the first non-positive factor.
    """
    t = bounds(Scheme.ISHIKAWA, a, b, alpha1, alpha2, N)
    if not t.lower_defined:
        k = t.first_undefined
        raise LowerUndefined(k, float(t.l_factors[k]))
    return BoundsTrace(t.scheme, None, None, None, t.L, t.log_L, t.signed_L, t.l_factors, True, None, t.A)


def oueb_modified(a, b, alpha1: float, alpha2: float, N: int) -> BoundsTrace:
    """``U_n = prod_{k<=n} (1 - a_k + alpha1 a_k)(1 - b_k + alpha2 b_k)``."""
    t = bounds(Scheme.MODIFIED_ISHIKAWA, a, b, alpha1, alpha2, N)
    return BoundsTrace(t.scheme, t.U, t.log_U, t.u_factors, None, None, None, None, False)


def oleb_modified(a, b, alpha1: float, alpha2: float, N: int) -> BoundsTrace:
    """``L_n = prod_{k<=n} (1 - a_k - alpha1 a_k)(1 - b_k - alpha2 b_k)``.

    Both parts must be positive; :class:`LowerUndefined` names the one that is not.
    """
    t = bounds(Scheme.MODIFIED_ISHIKAWA, a, b, alpha1, alpha2, N)
    if not t.lower_defined:
        k = t.first_undefined
        av, bv = _schedules(Scheme.MODIFIED_ISHIKAWA, a, b, N)
        fa = 1 - av[k] - alpha1 * av[k]
        fb = 1 - bv[k] - alpha2 * bv[k]
        which, value = ("a", fa) if fa <= 0 else ("b", fb)
        raise LowerUndefined(k, float(value), which)
    return BoundsTrace(t.scheme, None, None, None, t.L, t.log_L, t.signed_L, t.l_factors, True)


# ---------------------------------------------------------------------------
# convergence criteria


class Tri(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


def _tri(c: SeriesClass) -> Tri:
    c = SeriesClass(c)
    return {SeriesClass.DIVERGENT: Tri.YES, SeriesClass.CONVERGENT: Tri.NO}.get(c, Tri.UNKNOWN)


def _any_divergent(*classes) -> Tri:
    """Divergence of a sum of non-negative series."""
    tris = [_tri(c) for c in classes]
    if Tri.YES in tris:
        return Tri.YES
    if Tri.UNKNOWN in tris:
        return Tri.UNKNOWN
    return Tri.NO


@dataclass(frozen=True)
class ConvergencePrediction:
    scheme: Scheme
    upper_to_zero: Tri
    lower_to_zero: Tri
    rationale: str
    chi_alpha2_eq_1: bool


def predict_convergence(scheme, alpha1: float, alpha2: float, class_a=SeriesClass.UNKNOWN,
                        class_b=SeriesClass.UNKNOWN, class_ab=None, class_a_plus_b=None) -> ConvergencePrediction:
    """Decide from declared series classes whether ``U_n -> 0`` and ``L_n -> 0``.

    ``class_ab`` (for sum a_k b_k) defaults to Convergent when either factor
    series converges, else Unknown.  ``class_a_plus_b`` defaults to the class
    implied by ``class_a`` and ``class_b``.  Only the classes a branch
    actually depends on can make its answer Unknown.
    """
    scheme = Scheme.parse(scheme)
    check_alphas(alpha1, alpha2)
    class_a, class_b = SeriesClass(class_a), SeriesClass(class_b)
    if scheme is Scheme.MANN:
        class_a = class_ab = SeriesClass.CONVERGENT
    elif scheme is Scheme.PICARD:
        class_a = class_ab = SeriesClass.CONVERGENT
        class_b = SeriesClass.DIVERGENT
    if class_ab is None:
        if SeriesClass.CONVERGENT in (class_a, class_b):
            class_ab = SeriesClass.CONVERGENT
        else:
            class_ab = SeriesClass.UNKNOWN
    if class_a_plus_b is None:
        class_a_plus_b = {Tri.YES: SeriesClass.DIVERGENT, Tri.NO: SeriesClass.CONVERGENT,
                          Tri.UNKNOWN: SeriesClass.UNKNOWN}[_any_divergent(class_a, class_b)]
    chi = alpha2 == 1.0
    if scheme is Scheme.MODIFIED_ISHIKAWA:
        relevant = []
        if alpha1 < 1:
            relevant.append(class_a)
        if alpha2 < 1:
            relevant.append(class_b)
        upper = _any_divergent(*relevant)
        lower = _tri(class_a_plus_b)
        why = "IM upper: (1-alpha1) sum a_k + (1-alpha2) sum b_k diverges; IM lower: sum (a_k + b_k) diverges"
    else:
        if chi:
            upper = _tri(class_ab)
            why = "upper (alpha2 = 1): sum a_k b_k diverges"
        else:
            upper = _tri(class_b)
            why = "upper (alpha2 < 1): sum b_k diverges"
        lower = _tri(class_b)
        why += "; lower: sum b_k diverges"
    return ConvergencePrediction(scheme, upper, lower, why, chi)


# ---------------------------------------------------------------------------
# logarithmic sandwiches


@dataclass(frozen=True)
class LogSandwich:
    """Both sides of the log-inequality estimates at horizon ``N`` (natural log).

    ``lower_sum <= logU <= upper_sum`` and, when the OLEB is defined,
    ``L_lower_sum <= logL <= L_upper_sum``.  ``lower_sum`` is ``None`` for the
    Ishikawa scheme when ``alpha1 * alpha2 = 0``.
    """

    lower_sum: float | None
    upper_sum: float
    logU: float
    logL: float | None
    L_lower_sum: float | None
    L_upper_sum: float | None

    def contains(self, tol: float = 1e-12) -> bool:
        def within(lo, v, hi):
            scale = tol * max(1.0, abs(v))
            return (lo is None or lo - scale <= v) and v <= hi + scale
        ok = within(self.lower_sum, self.logU, self.upper_sum)
        if self.logL is not None:
            ok = ok and within(self.L_lower_sum, self.logL, self.L_upper_sum)
        return ok


def log_sandwich(scheme, a, b, alpha1: float, alpha2: float, N: int) -> LogSandwich:
    scheme = Scheme.parse(scheme)
    check_alphas(alpha1, alpha2)
    av, bv = _schedules(scheme, a, b, N)
    uf = upper_factors(scheme, av, bv, alpha1, alpha2)
    k = _first_nonpositive(uf)
    if k is not None:
        raise NonpositiveFactor(k, float(uf[k]))
    logU = compensated_sum(np.log(uf))
    lf, _, _ = lower_factors(scheme, av, bv, alpha1, alpha2)
    lower_ok = _first_nonpositive(lf) is None
    if scheme is Scheme.MODIFIED_ISHIKAWA:
        fa = 1 - av - alpha1 * av
        fb = 1 - bv - alpha2 * bv
        lower_ok = lower_ok and _first_nonpositive(np.minimum(fa, fb)) is None
        ia = 1 - av + alpha1 * av
        ib = 1 - bv + alpha2 * bv
        lo = -(1 - alpha1) * compensated_sum(av / ia) - (1 - alpha2) * compensated_sum(bv / ib)
        hi = -(1 - alpha1) * compensated_sum(av) - (1 - alpha2) * compensated_sum(bv)
        logL = Llo = Lhi = None
        if lower_ok:
            s1, s2 = 1 + alpha1, 1 + alpha2
            logL = compensated_sum(np.log(lf))
            Llo = -compensated_sum(np.concatenate([s1 * av / (1 - s1 * av), s2 * bv / (1 - s2 * bv)]))
            Lhi = -compensated_sum(np.concatenate([s1 * av, s2 * bv]))
        return LogSandwich(lo, hi, logU, logL, Llo, Lhi)
    p = alpha1 * alpha2
    Sb = compensated_sum(bv)
    lo = (p - 1) / p * Sb if p > 0 else None
    hi = (alpha2 - 1) * Sb
    logL = Llo = Lhi = None
    if lower_ok:
        A = 1 + alpha2 * (1 - av + alpha1 * av)
        logL = compensated_sum(np.log(lf))
        Llo = -(1 + alpha2) * compensated_sum(bv / (1 - bv * A))
        Lhi = -(1 + p) * Sb
    return LogSandwich(lo, hi, logU, logL, Llo, Lhi)


# ---------------------------------------------------------------------------
# series equivalence


@dataclass(frozen=True)
class SeriesWitness:
    termwise_lower_ok: bool
    ratio_tail: float


def series_equiv_witness(a, u, N: int, u_max: float | None = None) -> SeriesWitness:
    """Check ``a_k / (1 - a_k u_k) >= a_k`` and how fast the ratio tends to 1.

    ``a`` is a :class:`~oeb.schedules.Schedule` or an array of length ``N+1``;
    ``u`` is a schedule, an array, a callable ``k -> u_k`` or a constant.
    """
    av = np.asarray(sch.terms(a, N + 1) if isinstance(a, sch.Schedule) else a, dtype=float)[: N + 1]
    k = np.arange(N + 1, dtype=float)
    if isinstance(u, sch.Schedule):
        uv = np.asarray(sch.terms(u, N + 1))
    elif callable(u):
        uv = np.asarray(u(k), dtype=float)
    else:
        uv = np.broadcast_to(np.asarray(u, dtype=float), k.shape)[: N + 1]
    if u_max is not None and np.any((uv < 0) | (uv > u_max)):
        raise PreconditionViolated(f"u_k must lie in [0, {u_max}]")
    denom = 1 - av * uv
    bad = np.flatnonzero(denom <= 0)
    if bad.size:
        j = int(bad[0])
        raise PreconditionViolated(f"1 - a_k u_k = {denom[j]!r} <= 0 at k={j}")
    mod = av / denom
    ok = bool(np.all(mod >= av))
    start = N + 1 - max(1, (N + 1) // 4)
    tail = slice(start, N + 1)
    pos = av[tail] > 0
    ratio_tail = float(np.max(np.abs(mod[tail][pos] / av[tail][pos] - 1))) if np.any(pos) else 0.0
    return SeriesWitness(ok, ratio_tail)


def restart_floor(l_factors: np.ndarray, err_start: float, start: int, end: int) -> float:
    """``err_start * prod_{k=start}^{end} l_k``: a lower bound for ``Err_{end+1}``.

    Applies the OLEB from index ``start`` onward when the earliest factors
    are not positive.  ``math.fsum`` of the logs keeps long products exact.
    """
    f = np.asarray(l_factors[start:end + 1], dtype=float)
    if np.any(f <= 0):
        raise LowerUndefined(start + int(np.flatnonzero(f <= 0)[0]), float(f[f <= 0][0]))
    return err_start * math.exp(math.fsum(np.log(f)))


def last_nonpositive(l_factors: np.ndarray) -> int | None:
    bad = np.flatnonzero(np.asarray(l_factors) <= 0)
    return int(bad[-1]) if bad.size else None


__all__ = [
    "BoundsTrace", "ConvergencePrediction", "LogSandwich", "SeriesWitness", "Tri",
    "bounds", "check_alphas", "last_nonpositive", "log_sandwich", "lower_factors",
    "oleb_ishikawa", "oleb_modified", "oueb_ishikawa", "oueb_modified", "predict_convergence",
    "restart_floor", "series_equiv_witness", "upper_factors",
]
