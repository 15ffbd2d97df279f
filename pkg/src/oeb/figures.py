"""Figure recipes: each expands into independent sub-runs that write plot-ready CSVs.

A recipe never draws anything.  It writes one CSV per curve plus a
``manifest.json`` with the series labels, axis labels and a scale hint.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import analysis as an
from . import iteration as it
from . import mappings as mp
from . import schedules as sch
from .iteration import Scheme
from .output import write_rows

X0 = 2.0
ALPHA = (0.5, 0.2)


@dataclass(frozen=True)
class CurveFile:
    label: str
    file: str
    columns: list[str]
    status: str = ""


@dataclass(frozen=True)
class SubRun:
    """One independent computation producing one or more curve files."""

    name: str
    work: Callable[[Path], list[CurveFile]]


@dataclass(frozen=True)
class FigureRecipe:
    figure_id: str
    title: str
    anchor: str
    x_label: str
    y_label: str
    scale: str
    alpha1: float
    alpha2: float
    horizon: int
    runs: tuple[SubRun, ...]
    curves: int
    notes: tuple[str, ...] = field(default=())


def _pair(alpha1: float, alpha2: float) -> mp.MapPair:
    return mp.pair_catalog("reference", alpha1, alpha2)


def _error_run(name, label, scheme, a_key, b_key, alpha1, alpha2, N) -> SubRun:
    def work(out: Path) -> list[CurveFile]:
        a = sch.catalog(a_key) if a_key else None
        b = sch.catalog(b_key)
        t = it.run(scheme, _pair(alpha1, alpha2), a, b, X0, N)
        cols = ["n", "err_n", "log10_err_n"]
        write_rows(out / f"{name}.csv", cols,
                   ([n, t.err[n], t.log10_err[n]] for n in range(len(t.err))))
        return [CurveFile(label, f"{name}.csv", cols, t.status.value)]
    return SubRun(name, work)


def _rate_run(name, scheme, a_key, b_key, alpha1, alpha2, N) -> SubRun:
    def work(out: Path) -> list[CurveFile]:
        a, b = sch.catalog(a_key), sch.catalog(b_key)
        t = it.run(scheme, _pair(alpha1, alpha2), a, b, X0, N + 1)
        fn = an.rate_ishikawa if scheme is Scheme.ISHIKAWA else an.rate_modified
        r = fn(t, a, b, alpha1, alpha2, strict=False)
        cols = ["n", "X", "neg_ln_err_next", "sigma_n"]
        write_rows(out / f"{name}.csv", cols,
                   ([n, r.denominator[n], -math.log(10) * t.log10_err[n + 1], r.sigma[n]]
                    for n in range(len(r.sigma))))
        files = [CurveFile("observed -ln Err_{n+1}", f"{name}.csv", cols, t.status.value)]
        X = r.denominator
        for tag, beta in (("beta_min", r.beta_min), ("beta_max", r.beta_max)):
            write_rows(out / f"{name}-{tag}.csv", ["X", "Y", "beta"],
                       ([x, beta * x, beta] for x in X))
            label = f"Y = {tag} X" + ("" if not math.isnan(beta) else " (undefined)")
            files.append(CurveFile(label, f"{name}-{tag}.csv", ["X", "Y", "beta"]))
        return files
    return SubRun(name, work)


def _compare_runs(name, k, N, what) -> SubRun:
    def work(out: Path) -> list[CurveFile]:
        alpha1, alpha2 = ALPHA
        a, b = sch.catalog(f"cmp-test{k}-a"), sch.catalog(f"cmp-test{k}-b")
        pair = _pair(alpha1, alpha2)
        ti = it.run(Scheme.ISHIKAWA, pair, a, b, X0, N)
        tm = it.run(Scheme.MODIFIED_ISHIKAWA, pair, a, b, X0, N)
        if what == "errors":
            files = []
            for tag, t in (("I", ti), ("IM", tm)):
                cols = ["n", "err_n", "log10_err_n"]
                write_rows(out / f"{name}-{tag}.csv", cols,
                           ([n, t.err[n], t.log10_err[n]] for n in range(len(t.err))))
                lab = "Ishikawa" if tag == "I" else "modified Ishikawa"
                files.append(CurveFile(f"{lab}, Test {k}", f"{name}-{tag}.csv", cols, t.status.value))
            return files
        if what == "ishikawa":
            cols = ["n", "err_n", "log10_err_n"]
            write_rows(out / f"{name}.csv", cols,
                       ([n, ti.err[n], ti.log10_err[n]] for n in range(len(ti.err))))
            return [CurveFile(f"Ishikawa, Test {k}", f"{name}.csv", cols, ti.status.value)]
        rep = an.compare_schemes(tm, ti, a, b, alpha1, alpha2)
        cols = ["n", "ratio", "log10_ratio"]
        write_rows(out / f"{name}.csv", cols,
                   ([n, rep.ratio[n], rep.log10_ratio[n]] for n in range(len(rep.ratio))))
        return [CurveFile(f"log R(x_n^IM, x_n^I, x*), Test {k} [{rep.verdict.value}]",
                          f"{name}.csv", cols)]
    return SubRun(name, work)


_ERR = dict(x_label="n", y_label="Err_n", scale="log-y")


def _convergence(fid, title, anchor, tests, alpha2, N, a_key="eqbn-a") -> FigureRecipe:
    runs = tuple(_error_run(f"test{k}", f"Test {k}", Scheme.ISHIKAWA, a_key, f"eqbn-test{k}",
                            ALPHA[0], alpha2, N) for k in tests)
    return FigureRecipe(fid, title, anchor, alpha1=ALPHA[0], alpha2=alpha2, horizon=N,
                        runs=runs, curves=len(runs), **_ERR)


def _recipes() -> dict[str, Callable[[], FigureRecipe]]:
    r: dict[str, Callable[[], FigureRecipe]] = {}
    a1, a2 = ALPHA
    r["fig1a"] = lambda: _convergence("fig1a", "Ishikawa errors, four b_n tests", "b_n group, short horizon",
                                      (1, 2, 3, 4), a2, 50)
    r["fig1b"] = lambda: _convergence("fig1b", "Ishikawa errors, Tests 3 and 4", "b_n group, long horizon",
                                      (3, 4), a2, 500)
    r["fig2a"] = lambda: _convergence("fig2a", "Ishikawa errors with alpha2 = 1", "b_n group at alpha2 = 1, short horizon",
                                      (1, 2, 3, 4), 1.0, 50)
    r["fig2b"] = lambda: _convergence("fig2b", "Ishikawa errors with alpha2 = 1, Tests 3 and 4",
                                      "b_n group at alpha2 = 1, long horizon", (3, 4), 1.0, 500)

    def fig1c():
        runs = []
        for tag, b_key in (("div", "bn-fig1b-div"), ("conv", "bn-fig1b-conv")):
            for k in (1, 2, 3):
                runs.append(_error_run(f"{tag}-test{k}", f"{tag} b_n, a_n Test {k}", Scheme.ISHIKAWA,
                                       f"an-fig1b-test{k}", b_key, a1, a2, 500))
        return FigureRecipe("fig1c", "insensitivity to a_n (both panels)", "a_n group",
                            alpha1=a1, alpha2=a2, horizon=500, runs=tuple(runs), curves=6,
                            notes=("first three curves: divergent b_n panel; last three: convergent b_n panel",),
                            **_ERR)
    r["fig1c"] = fig1c

    def fig3():
        runs = tuple(_error_run(f"test{k}", f"Test {k}", Scheme.ISHIKAWA, f"eqanbn-test{k}-a",
                                f"eqanbn-test{k}-b", a1, 1.0, 500) for k in (1, 2, 3, 4))
        return FigureRecipe("fig3", "Ishikawa errors for joint a_n, b_n choices, alpha2 = 1", "joint a_n, b_n group",
                            alpha1=a1, alpha2=1.0, horizon=500, runs=runs, curves=4, **_ERR)
    r["fig3"] = fig3

    def fig4(fid, N, panel):
        def build():
            runs = tuple(_error_run(f"test{k}", f"Test ({k})", Scheme.MODIFIED_ISHIKAWA,
                                    f"im-test{k}-a", f"im-test{k}-b", a1, a2, N) for k in (1, 2, 3, 4))
            return FigureRecipe(fid, f"modified Ishikawa errors, N = {N}", f"modified Ishikawa group ({panel})",
                                alpha1=a1, alpha2=a2, horizon=N, runs=runs, curves=4, **_ERR)
        return build
    r["fig4a"] = fig4("fig4a", 20, "a")
    r["fig4b"] = fig4("fig4b", 100_000, "b")

    def rate(fid, scheme, a_key, b_key, anchor, denom):
        def build():
            runs = (_rate_run("rate", scheme, a_key, b_key, a1, a2, 2000),)
            return FigureRecipe(fid, f"rate estimate, {scheme.value}", anchor, x_label=denom,
                                y_label="-ln Err_{n+1}", scale="linear (log of error on y)",
                                alpha1=a1, alpha2=a2, horizon=2000, runs=runs, curves=3)
        return build
    r["fig5a"] = rate("fig5a", Scheme.ISHIKAWA, "eqna-a", "eqna-b", "rate group, Ishikawa (a)", "sum_{k<=n} b_k")
    r["fig5b"] = rate("fig5b", Scheme.ISHIKAWA, "eqnb-a", "eqnb-b", "rate group, Ishikawa (b)", "sum_{k<=n} b_k")
    r["fig6a"] = rate("fig6a", Scheme.MODIFIED_ISHIKAWA, "eqna-a", "eqna-b", "rate group, modified Ishikawa (a)",
                      "sum_{k<=n} (a_k + b_k)")
    r["fig6b"] = rate("fig6b", Scheme.MODIFIED_ISHIKAWA, "eqna2-a", "eqna2-b", "rate group, modified Ishikawa (b)",
                      "sum_{k<=n} (a_k + b_k)")

    def cmp(fid, k, what, anchor, curves, y_label):
        def build():
            return FigureRecipe(fid, f"comparison Test {k}", anchor, x_label="n", y_label=y_label,
                                scale="log-y" if what != "ratio" else "linear (log10 ratio on y)",
                                alpha1=a1, alpha2=a2, horizon=500,
                                runs=(_compare_runs(what, k, 500, what),), curves=curves)
        return build
    r["fig8a"] = cmp("fig8a", 1, "errors", "comparison group 1 (a)", 2, "Err_n")
    r["fig8b"] = cmp("fig8b", 2, "errors", "comparison group 1 (b)", 2, "Err_n")
    r["fig8c"] = cmp("fig8c", 1, "ratio", "comparison group 1 (c)", 1, "log10 R_n")
    r["fig8d"] = cmp("fig8d", 2, "ratio", "comparison group 1 (d)", 1, "log10 R_n")
    r["figcompare-a"] = cmp("figcompare-a", 3, "ishikawa", "comparison group 2 (a)", 1, "Err_n")
    r["figcompare-b"] = cmp("figcompare-b", 4, "ishikawa", "comparison group 2 (b)", 1, "Err_n")
    r["figcompare-c"] = cmp("figcompare-c", 3, "ratio", "comparison group 2 (c)", 1, "log10 R_n")
    r["figcompare-d"] = cmp("figcompare-d", 4, "ratio", "comparison group 2 (d)", 1, "log10 R_n")
    return r


RECIPES = _recipes()


def figure_ids() -> list[str]:
    return list(RECIPES)


def recipe(figure_id: str) -> FigureRecipe:
    key = figure_id.strip().lower()
    if key not in RECIPES:
        raise KeyError(f"unknown figure {figure_id!r}; known: {', '.join(RECIPES)}")
    return RECIPES[key]()


@dataclass(frozen=True)
class FigureResult:
    manifest: dict
    failures: tuple[tuple[str, str], ...]


def render(figure_id: str, out_dir, workers: int | None = None) -> FigureResult:
    """Run every sub-run of a recipe in a thread pool and write the manifest.

    Sub-run failures are collected rather than raised; the manifest lists
    only the curves that were written.
    """
    rec = recipe(figure_id)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results: dict[str, list[CurveFile]] = {}
    failures = []
    with ThreadPoolExecutor(max_workers=workers or min(8, len(rec.runs))) as pool:
        futures = {run.name: pool.submit(run.work, out) for run in rec.runs}
        for name, fut in futures.items():
            try:
                results[name] = fut.result()
            except Exception as exc:  # noqa: BLE001 - reported per sub-run
                failures.append((name, f"{type(exc).__name__}: {exc}"))
    curves = [c for run in rec.runs for c in results.get(run.name, [])]
    manifest = {
        "figure": rec.figure_id,
        "title": rec.title,
        "anchor": rec.anchor,
        "x_label": rec.x_label,
        "y_label": rec.y_label,
        "scale": rec.scale,
        "alpha1": rec.alpha1,
        "alpha2": rec.alpha2,
        "x0": X0,
        "horizon": rec.horizon,
        "expected_curves": rec.curves,
        "curves": [{"label": c.label, "file": c.file, "columns": c.columns,
                    **({"status": c.status} if c.status else {})} for c in curves],
        "notes": list(rec.notes),
        "failures": [{"run": n, "error": e} for n, e in failures],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, allow_nan=False,
                                                  default=_json_default) + "\n")
    return FigureResult(manifest, tuple(failures))


def _json_default(v):
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(type(v).__name__)
