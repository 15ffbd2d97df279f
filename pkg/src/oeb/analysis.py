"""Rate ratios with their theoretical sandwich, and the Ishikawa vs modified comparison."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import bounds as bd
from . import schedules as sch
from .errors import HypothesisUnavailable, MismatchedRuns
from .iteration import TINY, IterationTrace, Scheme
from .mappings import NormKind, norm
from .numerics import cumulative_sum
from .schedules import SeriesClass

LN10 = math.log(10.0)


def ratio(u, x, p, norm_kind: NormKind = NormKind.EUCLIDEAN) -> float:
    """Piecewise ratio ``|u - p| / |x - p|``.

    Returns 1 when ``x == p`` but ``u != p`` and 0 when ``u == x == p``.
    Equality is an exact comparison of the stored values.
    """
    u, x, p = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (u, x, p))
    if np.array_equal(x, p):
        return 0.0 if np.array_equal(u, x) else 1.0
    return norm(u - p, norm_kind) / norm(x - p, norm_kind)


# ---------------------------------------------------------------------------
# rates


@dataclass(frozen=True)
class RateReport:
    """``sigma[n] = -ln(Err_{n+1}) / denominator[n]`` for ``n = 0..steps-1``.

    Undefined entries (zero denominator or zero error) are NaN.
    ``beta_max`` is the bound the proof guarantees (NaN when unavailable);
    ``beta_max_paper`` is the tighter min-form constant for the modified
    scheme and equals ``beta_max`` for Ishikawa.
    """

    scheme: Scheme
    sigma: np.ndarray
    err_next: np.ndarray
    denominator: np.ndarray
    beta_min: float
    beta_max: float
    beta_max_paper: float
    delta: float
    epsilon: float
    epsilon1: float
    epsilon2: float
    hypotheses: dict = field(default_factory=dict)

    def within(self, n_lo: int = 10, n_hi: int | None = None, rtol: float = 1e-12) -> bool:
        """True when every defined sigma_n with ``n_lo <= n <= n_hi`` lies in the sandwich."""
        if math.isnan(self.beta_max):
            return False
        s = self.sigma[n_lo:None if n_hi is None else n_hi + 1]
        s = s[~np.isnan(s)]
        if s.size == 0:
            return False
        lo = self.beta_min * (1 - rtol)
        hi = self.beta_max * (1 + rtol)
        return bool(np.all((s >= lo) & (s <= hi)))


def _sigma(trace: IterationTrace, per_step: np.ndarray):
    steps = trace.steps
    denom = cumulative_sum(per_step[:steps])
    log_err = trace.log10_err[1: steps + 1] * LN10
    with np.errstate(divide="ignore", invalid="ignore"):
        sigma = np.where((denom > 0) & np.isfinite(log_err), -log_err / denom, np.nan)
        err_next = np.power(10.0, trace.log10_err[1: steps + 1])
    return sigma, denom, err_next


def _check_scheme(trace: IterationTrace, expected: Scheme) -> None:
    if trace.scheme is not expected:
        raise ValueError(f"expected a {expected.value} trace, got {trace.scheme.value}")


def rate_ishikawa(trace: IterationTrace, a: sch.Schedule, b: sch.Schedule, alpha1: float, alpha2: float,
                  strict: bool = True) -> RateReport:
    """Rate sandwich for the Ishikawa scheme.

    ``beta_min = 1 - alpha2``.  With ``eps`` the smallest lower factor and
    ``delta`` the largest ``b_k`` over the realized horizon,
    ``beta_max = min((1+alpha2)/eps, (1+alpha2)/(1-(1+alpha2) delta))``,
    dropping each branch whose denominator is not positive.
    """
    _check_scheme(trace, Scheme.ISHIKAWA)
    bd.check_alphas(alpha1, alpha2)
    steps = trace.steps
    av = np.asarray(sch.terms(a, steps))
    bv = np.asarray(sch.terms(b, steps))
    sigma, denom, err_next = _sigma(trace, bv)
    lf, _, _ = bd.lower_factors(Scheme.ISHIKAWA, av, bv, alpha1, alpha2)
    eps = float(np.min(lf)) if steps else math.nan
    delta = float(np.max(bv)) if steps else math.nan
    branches = []
    if eps > 0:
        branches.append((1 + alpha2) / eps)
    d = 1 - (1 + alpha2) * delta
    if d > 0:
        branches.append((1 + alpha2) / d)
    beta_max = min(branches) if branches else math.nan
    flags = {"eps_positive": bool(eps > 0), "delta_small": bool(delta < 1 / (1 + alpha2)),
             "im_eps_positive": False}
    report = RateReport(Scheme.ISHIKAWA, sigma, err_next, denom, 1 - alpha2, beta_max, beta_max,
                        delta, eps, math.nan, math.nan, flags)
    if not branches and strict:
        raise HypothesisUnavailable(
            f"no admissible upper rate constant: eps = {eps!r}, 1 - (1+alpha2) delta = {d!r}", report)
    return report


def rate_modified(trace: IterationTrace, a: sch.Schedule, b: sch.Schedule, alpha1: float, alpha2: float,
                  strict: bool = True) -> RateReport:
    """Rate sandwich for the modified scheme, over ``sum (a_k + b_k)``.

    ``beta_min = min(1 - alpha1, 1 - alpha2)``; the guaranteed
    ``beta_max = max((1+alpha1)/eps1, (1+alpha2)/eps2)`` and
    ``beta_max_paper`` uses ``min`` instead.
    """
    _check_scheme(trace, Scheme.MODIFIED_ISHIKAWA)
    bd.check_alphas(alpha1, alpha2)
    steps = trace.steps
    av = np.asarray(sch.terms(a, steps))
    bv = np.asarray(sch.terms(b, steps))
    sigma, denom, err_next = _sigma(trace, av + bv)
    eps1 = float(np.min(1 - av - alpha1 * av)) if steps else math.nan
    eps2 = float(np.min(1 - bv - alpha2 * bv)) if steps else math.nan
    ok = eps1 > 0 and eps2 > 0
    if ok:
        c1, c2 = (1 + alpha1) / eps1, (1 + alpha2) / eps2
        beta_max, beta_tight = max(c1, c2), min(c1, c2)
    else:
        beta_max = beta_tight = math.nan
    flags = {"eps_positive": False, "delta_small": False, "im_eps_positive": bool(ok)}
    report = RateReport(Scheme.MODIFIED_ISHIKAWA, sigma, err_next, denom,
                        min(1 - alpha1, 1 - alpha2), beta_max, beta_tight,
                        float(np.max(bv)) if steps else math.nan, math.nan, eps1, eps2, flags)
    if not ok and strict:
        raise HypothesisUnavailable(f"eps1 = {eps1!r}, eps2 = {eps2!r}; both must be positive", report)
    return report


# ---------------------------------------------------------------------------
# comparison


class Verdict(str, enum.Enum):
    FASTER_IM = "faster-im"
    POSITIVE_LIMIT = "positive-limit"
    INCONCLUSIVE = "inconclusive"


# last-quartile relative variation below which the ratio counts as flat
FLAT_TOLERANCE = 0.10


@dataclass(frozen=True)
class ComparisonReport:
    """``ratio[n] = R(x_n^IM, x_n^I, x*)`` and the verdict drawn from it.

    ``ratio_bound[n]`` is ``prod_{k<n} (1 - b_k + alpha2 b_k)``, which bounds
    ``ratio[n]`` whenever the termwise condition holds.
    """

    ratio: np.ndarray
    log10_ratio: np.ndarray
    ratio_bound: np.ndarray
    cond_I_IM_a_holds: bool
    first_violation: int | None
    verdict: Verdict
    tail_variation: float
    warnings: tuple[str, ...] = ()


def comparison_condition(av: np.ndarray, bv: np.ndarray, alpha1: float, alpha2: float) -> np.ndarray:
    """Termwise ``b_k <= (1 - alpha1) a_k / (1 + alpha2 (1 - a_k + alpha1 a_k))``."""
    return bv <= (1 - alpha1) * av / (1 + alpha2 * (1 - av + alpha1 * av))


def _ratio_series(t_im: IterationTrace, t_i: IterationTrace) -> tuple[np.ndarray, np.ndarray]:
    n_im = np.linalg.norm(t_im.offset, axis=1) if t_im.offset.shape[1] > 1 else np.abs(t_im.offset[:, 0])
    n_i = np.linalg.norm(t_i.offset, axis=1) if t_i.offset.shape[1] > 1 else np.abs(t_i.offset[:, 0])
    l_im, l_i = t_im.log10_err, t_i.log10_err
    r = np.empty(len(n_i))
    lr = np.empty(len(n_i))
    for k in range(len(n_i)):
        if l_i[k] == -np.inf:
            r[k] = 0.0 if l_im[k] == -np.inf else 1.0
        elif n_i[k] >= TINY and n_im[k] >= TINY:
            r[k] = n_im[k] / n_i[k]
        else:
            with np.errstate(under="ignore"):
                r[k] = 10.0 ** (l_im[k] - l_i[k])
        if n_i[k] >= TINY and n_im[k] >= TINY:
            lr[k] = math.log10(r[k]) if r[k] > 0 else -np.inf
        elif l_i[k] == -np.inf:
            lr[k] = -np.inf if r[k] == 0 else 0.0
        else:
            lr[k] = l_im[k] - l_i[k]
    return r, lr


def tail_variation(values: np.ndarray) -> float:
    """``(max - min) / max`` over the last quarter of ``values``."""
    v = np.asarray(values, dtype=float)
    tail = v[len(v) - max(1, len(v) // 4):]
    top = float(np.max(tail))
    return float((top - np.min(tail)) / top) if top > 0 else math.inf


def compare_schemes(trace_im: IterationTrace, trace_i: IterationTrace, a: sch.Schedule, b: sch.Schedule,
                    alpha1: float, alpha2: float) -> ComparisonReport:
    """Compare a modified Ishikawa run with an Ishikawa run from the same start.

    ``FASTER_IM`` needs the termwise condition over the horizon and a
    Divergent declaration for ``b``.  ``POSITIVE_LIMIT`` is reported when the
    condition fails, both schemes are predicted to converge, and the ratio is
    flat (< 10 % relative variation) over the last quarter of the horizon.
    """
    _check_scheme(trace_im, Scheme.MODIFIED_ISHIKAWA)
    _check_scheme(trace_i, Scheme.ISHIKAWA)
    if trace_im.horizon != trace_i.horizon or trace_im.steps != trace_i.steps:
        raise MismatchedRuns(f"horizons differ: {trace_im.steps} vs {trace_i.steps}")
    if not (np.array_equal(trace_im.x0, trace_i.x0) and np.array_equal(trace_im.x_star, trace_i.x_star)):
        raise MismatchedRuns("runs start from different points or target different fixed points")
    bd.check_alphas(alpha1, alpha2)
    steps = trace_i.steps
    av = np.asarray(sch.terms(a, steps))
    bv = np.asarray(sch.terms(b, steps))
    r, lr = _ratio_series(trace_im, trace_i)
    ok = comparison_condition(av, bv, alpha1, alpha2)
    bad = np.flatnonzero(~ok)
    first = int(bad[0]) if bad.size else None
    divergent = SeriesClass(b.series_class) is SeriesClass.DIVERGENT
    holds = first is None and divergent
    _, bound_log = _bound_products(bv, alpha2)
    with np.errstate(under="ignore"):
        bound = np.exp(bound_log)

    notes = []
    lf, _, _ = bd.lower_factors(Scheme.ISHIKAWA, av, bv, alpha1, alpha2)
    if np.any(lf <= 0):
        k = int(np.flatnonzero(lf <= 0)[0])
        notes.append(f"Ishikawa lower-bound factor is not positive at k={k}; "
                     "the joint-convergence equivalence is not asserted")
    var = tail_variation(r)
    if holds:
        verdict = Verdict.FASTER_IM
    else:
        pi = bd.predict_convergence(Scheme.ISHIKAWA, alpha1, alpha2, a.series_class, b.series_class)
        pim = bd.predict_convergence(Scheme.MODIFIED_ISHIKAWA, alpha1, alpha2, a.series_class, b.series_class)
        both = pi.upper_to_zero is bd.Tri.YES and pim.upper_to_zero is bd.Tri.YES
        verdict = Verdict.POSITIVE_LIMIT if both and var < FLAT_TOLERANCE else Verdict.INCONCLUSIVE
        if first is not None:
            notes.append(f"termwise comparison condition fails first at k={first}")
        if not divergent:
            notes.append(f"b is declared {SeriesClass(b.series_class).value}, not divergent")
    return ComparisonReport(r, lr, bound, holds, first, verdict, var, tuple(notes))


def _bound_products(bv: np.ndarray, alpha2: float) -> tuple[np.ndarray, np.ndarray]:
    f = 1 - bv + alpha2 * bv
    logs = np.concatenate([[0.0], cumulative_sum(np.log(f))]) if f.size else np.zeros(1)
    return f, logs


__all__ = [
    "ComparisonReport", "RateReport", "Verdict", "compare_schemes", "comparison_condition",
    "rate_ishikawa", "rate_modified", "ratio", "tail_variation",
]
