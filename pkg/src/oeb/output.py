"""CSV writers.

Every number is written with 17 significant digits (``%.16e``) so doubles
round-trip exactly; blank cells mean "undefined".  Files use "\\n" line
endings and always start with a header row.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .analysis import ComparisonReport, RateReport
from .bounds import BoundsTrace
from .iteration import IterationTrace, Scheme


def fmt(v) -> str:
    if v is None:
        return ""
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.16e}"


def write_rows(path, header: list[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else (str(c) if isinstance(c, (int, np.integer)) else fmt(c))
                        for c in row])
    return path


def _vec_cols(name: str, d: int) -> list[str]:
    return [name] if d == 1 else [f"{name}[{i}]" for i in range(d)]


def write_trace(path, t: IterationTrace) -> Path:
    d = t.x.shape[1]
    header = ["n", *_vec_cols("x_n", d), *_vec_cols("y_n", d), "err_n", "log10_err_n"]
    rows = []
    for n in range(len(t.err)):
        y = list(t.y[n]) if n < len(t.y) else [""] * d
        rows.append([n, *t.x[n], *y, t.err[n], t.log10_err[n]])
    return write_rows(path, header, rows)


def write_bounds(path, b: BoundsTrace) -> Path:
    header = ["n", "U_n", "L_n", "u_factor", "l_factor", "A_k", "ln_U_n", "ln_L_n"]
    L, log_L = b.L, b.log_L
    if L is None and b.signed_L is not None:
        # L_n only involves factors 0..n, so it is defined before the first bad one
        L = np.where(np.arange(len(b.U)) < b.first_undefined, b.signed_L, np.nan)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_L = np.log(L)
    rows = []
    for n in range(len(b.U)):
        lo = L is not None and not np.isnan(L[n])
        rows.append([
            n, b.U[n],
            L[n] if lo else "",
            b.u_factors[n],
            b.l_factors[n] if b.l_factors is not None else "",
            b.A[n] if b.A is not None else "",
            b.log_U[n],
            log_L[n] if lo else "",
        ])
    return write_rows(path, header, rows)


def write_rate(path, r: RateReport) -> Path:
    header = ["n", "err_next", "log10_err_next", "denom", "sigma_n", "beta_min",
              "beta_max_guaranteed"]
    im = r.scheme is Scheme.MODIFIED_ISHIKAWA
    if im:
        header.append("beta_max_paper")
    header.append("flags")
    flags = ";".join(f"{k}={int(v)}" for k, v in r.hypotheses.items())
    rows = []
    with np.errstate(divide="ignore"):
        l10 = np.log10(r.err_next)
    for n in range(len(r.sigma)):
        row = [n, r.err_next[n], l10[n], r.denominator[n], r.sigma[n], r.beta_min, r.beta_max]
        if im:
            row.append(r.beta_max_paper)
        row.append(flags)
        rows.append(row)
    return write_rows(path, header, rows)


def write_compare(path, c: ComparisonReport, t_i: IterationTrace, t_im: IterationTrace) -> Path:
    header = ["n", "err_I", "err_IM", "ratio", "log10_ratio", "log10_err_I", "log10_err_IM"]
    rows = [[n, t_i.err[n], t_im.err[n], c.ratio[n], c.log10_ratio[n], t_i.log10_err[n], t_im.log10_err[n]]
            for n in range(len(c.ratio))]
    return write_rows(path, header, rows)
