"""Command-line entry point: ``oeb run | figure | verify | catalog``.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 runtime error, 4 figure sub-run failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import acceptance, figures
from . import analysis as an
from . import bounds as bd
from . import iteration as it
from . import mappings as mp
from . import output
from . import schedules as sch
from .config import ConfigError, RunConfig, load
from .errors import OEBError
from .iteration import Scheme

log = logging.getLogger("oeb")

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_RUNTIME, EXIT_FIGURE = 0, 1, 2, 3, 4


def _resolve(path: str, base: Path | None) -> Path:
    p = Path(path)
    return p if p.is_absolute() or base is None else base / p


def execute(cfg: RunConfig, base: Path | None = None) -> list[Path]:
    """Run one configuration and write every requested output."""
    pair = cfg.pair_obj()
    a, b = cfg.schedules()
    written = []
    trace = None
    kinds = {o.kind for o in cfg.outputs}
    if kinds & {"trace", "rate"} or not cfg.outputs:
        trace = it.run(cfg.scheme, pair, a, b, cfg.x0, cfg.N, cfg.floor)
        log.info("%s: %d steps, status %s, final Err %.3e", cfg.name or cfg.scheme.value,
                 trace.steps, trace.status.value, trace.err[-1])
    for o in cfg.outputs:
        path = _resolve(o.path, base)
        if o.kind == "trace":
            written.append(output.write_trace(path, trace))
        elif o.kind == "bounds":
            bt = bd.bounds(cfg.scheme, a, b, cfg.alpha1, cfg.alpha2, cfg.N - 1)
            written.append(output.write_bounds(path, bt))
        elif o.kind == "rate":
            if cfg.scheme is Scheme.ISHIKAWA:
                r = an.rate_ishikawa(trace, a, b, cfg.alpha1, cfg.alpha2, strict=False)
            elif cfg.scheme is Scheme.MODIFIED_ISHIKAWA:
                r = an.rate_modified(trace, a, b, cfg.alpha1, cfg.alpha2, strict=False)
            else:
                raise ConfigError("rate output needs the ishikawa or modified-ishikawa scheme", "outputs")
            if r.beta_max != r.beta_max:
                log.warning("no admissible upper rate constant; beta_max written as nan")
            written.append(output.write_rate(path, r))
        elif o.kind == "compare":
            ti = it.run(Scheme.ISHIKAWA, pair, a, b, cfg.x0, cfg.N, cfg.floor)
            tm = it.run(Scheme.MODIFIED_ISHIKAWA, pair, a, b, cfg.x0, cfg.N, cfg.floor)
            rep = an.compare_schemes(tm, ti, a, b, cfg.alpha1, cfg.alpha2)
            for w in rep.warnings:
                log.warning(w)
            log.info("comparison verdict: %s", rep.verdict.value)
            written.append(output.write_compare(path, rep, ti, tm))
    return written


def cmd_run(args) -> int:
    try:
        cf = load(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    base = Path(args.out) if args.out else None
    if cf.figure is not None:
        return _figure(cf.figure, _resolve(cf.out_dir or f"figures/{cf.figure}", base))
    try:
        for cfg in cf.runs:
            for p in execute(cfg, base):
                print(p)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OEBError as exc:
        print(f"runtime error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _figure(figure_id: str, out) -> int:
    try:
        res = figures.render(figure_id, out)
    except KeyError as exc:
        print(f"config error: {exc.args[0]}", file=sys.stderr)
        return EXIT_CONFIG
    for name, err in res.failures:
        print(f"sub-run {name} failed: {err}", file=sys.stderr)
    print(Path(out) / "manifest.json")
    return EXIT_FIGURE if res.failures else EXIT_OK


def cmd_figure(args) -> int:
    return _figure(args.figure_id, args.out or f"figures/{args.figure_id}")


def cmd_verify(args) -> int:
    results = acceptance.run_all(args.level)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} passed")
    if failed:
        print("failing: " + ", ".join(f"{r.criterion} ({r.name})" for r in failed))
        return EXIT_VERIFY
    return EXIT_OK


def cmd_catalog(args) -> int:
    print("schedules:")
    for key in sch.catalog_keys():
        s = sch.catalog(key)
        print(f"  {key:<16} {s.series_class.value:<10} {sch.catalog_anchor(key)}")
    print("maps:")
    for key, desc in mp.MAP_KEYS.items():
        print(f"  {key:<16} {desc}")
    print("pairs:")
    for key, desc in mp.PAIR_KEYS.items():
        print(f"  {key:<18} {desc}")
    print("figures:")
    for fid in figures.figure_ids():
        rec = figures.recipe(fid)
        print(f"  {fid:<14} {rec.curves} curve(s), N={rec.horizon}  {rec.anchor}: {rec.title}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oeb", description="Ishikawa-type iterations and their optimal error bounds.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a configuration file")
    r.add_argument("config")
    r.add_argument("--out", help="directory that relative output paths are resolved against")
    r.set_defaults(func=cmd_run)
    f = sub.add_parser("figure", help="write the CSVs and manifest for one figure")
    f.add_argument("figure_id")
    f.add_argument("--out", help="output directory (default figures/<id>)")
    f.set_defaults(func=cmd_figure)
    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("--level", choices=("fast", "full"), default="fast")
    v.set_defaults(func=cmd_verify)
    c = sub.add_parser("catalog", help="list schedules, maps and figure recipes")
    c.set_defaults(func=cmd_catalog)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except OEBError as exc:
        print(f"runtime error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
