"""Run configuration: a YAML document describing one run or a list of runs.

See ``docs/config.md`` for the schema.  Parsing keeps the user's schedule and
pair specs as written (catalog key or mapping) so that :func:`dump` and
:func:`parse` round-trip; :meth:`RunConfig.schedules` and
:meth:`RunConfig.pair_obj` resolve them.
"""
from __future__ import annotations

import copy
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from . import mappings as mp
from . import schedules as sch
from .errors import ConfigError, OEBError
from .iteration import Scheme
from .rng import DEFAULT_SEED

OUTPUT_KINDS = ("trace", "bounds", "rate", "compare")
SEED_ENV = "OEB_SEED"

_KEYS = {"scheme", "pair", "alpha1", "alpha2", "schedule_a", "schedule_b", "x0", "x_star",
         "domain", "N", "seed", "outputs", "floor", "name"}


@dataclass(frozen=True)
class Output:
    kind: str
    path: str


@dataclass(frozen=True)
class RunConfig:
    scheme: Scheme
    pair: Any
    alpha1: float
    alpha2: float
    schedule_a: Any
    schedule_b: Any
    x0: tuple[float, ...]
    N: int
    seed: int = DEFAULT_SEED
    outputs: tuple[Output, ...] = ()
    floor: float = 0.0
    x_star: tuple[float, ...] | None = None
    domain: Any = None
    name: str | None = None

    # -- resolution -------------------------------------------------------

    def schedules(self) -> tuple[sch.Schedule | None, sch.Schedule | None]:
        a = None if self.schedule_a is None else resolve_schedule(self.schedule_a, self.seed, "schedule_a")
        b = None if self.schedule_b is None else resolve_schedule(self.schedule_b, self.seed, "schedule_b")
        return a, b

    def pair_obj(self) -> mp.MapPair:
        return resolve_pair(self.pair, self.alpha1, self.alpha2, self.x_star, self.domain)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {}
        if self.name is not None:
            d["name"] = self.name
        d["scheme"] = self.scheme.value
        d["pair"] = copy.deepcopy(self.pair)
        d["alpha1"] = self.alpha1
        d["alpha2"] = self.alpha2
        if self.schedule_a is not None:
            d["schedule_a"] = copy.deepcopy(self.schedule_a)
        if self.schedule_b is not None:
            d["schedule_b"] = copy.deepcopy(self.schedule_b)
        d["x0"] = list(self.x0)
        if self.x_star is not None:
            d["x_star"] = list(self.x_star)
        if self.domain is not None:
            d["domain"] = copy.deepcopy(self.domain)
        d["N"] = self.N
        d["seed"] = self.seed
        d["floor"] = self.floor
        d["outputs"] = [{"kind": o.kind, "path": o.path} for o in self.outputs]
        return d


# ---------------------------------------------------------------------------
# schedules and maps from specs


def resolve_schedule(spec, seed: int | None = None, where: str = "schedule") -> sch.Schedule:
    """A catalog key or an inline ``{kind, params, seed, series_class}`` mapping."""
    try:
        if isinstance(spec, str):
            s = sch.catalog(spec)
        elif isinstance(spec, (int, float)) and not isinstance(spec, bool):
            s = sch.constant(float(spec))
        elif isinstance(spec, dict):
            s = _inline_schedule(spec, where)
        else:
            raise ConfigError(f"expected a catalog key or a mapping, got {spec!r}", where)
    except ConfigError:
        raise
    except OEBError as exc:
        raise ConfigError(str(exc), where) from None
    if isinstance(spec, dict) and "seed" in spec:
        return s
    if seed is not None and (s.seed is not None or s.base is not None):
        s = s.with_seed(seed)
    return s


def _inline_schedule(spec: dict, where: str) -> sch.Schedule:
    kind = str(spec.get("kind", "")).lower()
    params = dict(spec.get("params") or {})
    cls = spec.get("series_class")
    try:
        cls = None if cls is None else sch.SeriesClass(str(cls).lower())
    except ValueError:
        raise ConfigError(f"series_class must be divergent, convergent or unknown, got {cls!r}", where) from None
    sid = spec.get("id")
    seed = spec.get("seed")
    if seed is not None and (not isinstance(seed, int) or seed < 0):
        raise ConfigError("seed must be a non-negative integer", where)
    if kind == "constant":
        if "value" not in params:
            raise ConfigError("constant schedule needs params.value", where)
        return sch.constant(float(params["value"]), sid, cls)
    if kind == "rational":
        num = params.get("numerator")
        den = params.get("denominator")
        if not num or not den:
            raise ConfigError("rational schedule needs params.numerator and params.denominator", where)
        return sch.rational(num, den, sid or "rational", cls or sch.SeriesClass.UNKNOWN)
    if kind == "random":
        return sch.random_uniform(DEFAULT_SEED if seed is None else seed,
                                  int(params.get("stream", 0)), sid or "rand")
    if kind == "derived":
        if "base" not in spec:
            raise ConfigError("derived schedule needs a base schedule", where)
        base = resolve_schedule(spec["base"], seed, f"{where}.base")
        return sch.derived_comparison_schedule(
            base, float(params["alpha1"]), float(params["alpha2"]),
            DEFAULT_SEED if seed is None else seed, int(params.get("stream", 0)), sid)
    if kind == "custom":
        name = spec.get("formula")
        if not name:
            raise ConfigError("custom schedule needs a formula name", where)
        return sch.custom(name, sid, cls or sch.SeriesClass.UNKNOWN, seed, **params)
    raise ConfigError(f"unknown schedule kind {kind!r}", where)


def _domain(spec, where: str = "domain") -> mp.Domain | None:
    if spec is None:
        return None
    if not isinstance(spec, dict) or "lower" not in spec or "upper" not in spec:
        raise ConfigError("domain needs lower and upper", where)
    try:
        return mp.Domain(spec["lower"], spec["upper"], spec.get("norm", "euclidean"))
    except ValueError as exc:
        raise ConfigError(str(exc), where) from None


def _map(spec, alpha: float, x_star, domain: mp.Domain | None, where: str) -> mp.NonExpansiveMap:
    if isinstance(spec, str):
        return mp.map_catalog(spec, alpha, x_star, domain)
    if not isinstance(spec, dict):
        raise ConfigError(f"expected a map key or mapping, got {spec!r}", where)
    rule = str(spec.get("rule", ""))
    alpha = float(spec.get("alpha", alpha))
    dom = _domain(spec.get("domain"), f"{where}.domain") or domain
    params = spec.get("params") or {}
    xs = params.get("x_star", x_star)
    if rule in mp.MAP_KEYS:
        return mp.map_catalog(rule, alpha, xs, dom)
    try:
        rule_e = mp.Rule(rule)
    except ValueError:
        raise ConfigError(f"unknown map rule {rule!r}", where) from None
    dom = dom or mp.REFERENCE_DOMAIN
    if rule_e is mp.Rule.AFFINE_TOWARD:
        return mp.make_extremal_upper(alpha, 1.0 if xs is None else xs, dom)
    if rule_e is mp.Rule.AFFINE_REFLECTED:
        return mp.make_extremal_lower(alpha, 1.0 if xs is None else xs, dom)
    if rule_e is mp.Rule.SQRT:
        return mp.sqrt_map(alpha, dom)
    if rule_e is mp.Rule.SINE:
        return mp.sine_map(alpha, dom)
    raise ConfigError("custom map rules cannot be expressed in a config file", where)


def resolve_pair(spec, alpha1: float, alpha2: float, x_star=None, domain=None) -> mp.MapPair:
    try:
        dom = _domain(domain) if isinstance(domain, dict) or domain is None else domain
        if isinstance(spec, str):
            return mp.pair_catalog(spec, alpha1, alpha2, x_star, dom)
        if isinstance(spec, dict):
            xs = spec.get("x_star", x_star)
            dom = _domain(spec.get("domain"), "pair.domain") or dom
            T1 = _map(spec.get("T1"), alpha1, xs, dom, "pair.T1")
            T2 = _map(spec.get("T2"), alpha2, xs, dom, "pair.T2")
            fp = xs if xs is not None else (T1.x_star or T2.x_star)
            return mp.MapPair(T1, T2, fp)
    except ConfigError:
        raise
    except (OEBError, ValueError) as exc:
        raise ConfigError(str(exc), "pair") from None
    raise ConfigError(f"expected a pair key or mapping, got {spec!r}", "pair")


# ---------------------------------------------------------------------------
# parsing


def _vector(v, where: str) -> tuple[float, ...]:
    try:
        if isinstance(v, (list, tuple)):
            return tuple(float(t) for t in v)
        return (float(v),)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number or list of numbers, got {v!r}", where) from None


def _number(d: dict, key: str, default=None, *, required: bool = False) -> float:
    if key not in d:
        if required:
            raise ConfigError("missing required field", key)
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"expected a number, got {v!r}", key)
    return float(v)


def parse_run(d: dict, env: dict | None = None) -> RunConfig:
    """Validate one run mapping and build a :class:`RunConfig`."""
    if not isinstance(d, dict):
        raise ConfigError("a run must be a mapping")
    unknown = set(d) - _KEYS
    if unknown:
        raise ConfigError(f"unknown field(s) {sorted(unknown)}", sorted(unknown)[0])
    if "scheme" not in d:
        raise ConfigError("missing required field", "scheme")
    try:
        scheme = Scheme.parse(d["scheme"])
    except ValueError:
        raise ConfigError(f"unknown scheme {d['scheme']!r}", "scheme") from None
    alpha2 = _number(d, "alpha2", required=True)
    alpha1 = _number(d, "alpha1", 0.0 if scheme in (Scheme.PICARD, Scheme.MANN) else None,
                     required=scheme not in (Scheme.PICARD, Scheme.MANN))
    N = d.get("N")
    if isinstance(N, bool) or not isinstance(N, int) or N < 1:
        raise ConfigError(f"N must be an integer >= 1, got {N!r}", "N")
    seed = d.get("seed", DEFAULT_SEED)
    env = os.environ if env is None else env
    if env.get(SEED_ENV):
        try:
            seed = int(env[SEED_ENV])
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer", SEED_ENV) from None
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}", "seed")
    floor = _number(d, "floor", 0.0)
    if floor < 0:
        raise ConfigError("floor must be non-negative", "floor")
    if "x0" not in d:
        raise ConfigError("missing required field", "x0")
    outputs = []
    for i, o in enumerate(d.get("outputs") or []):
        if not isinstance(o, dict) or o.get("kind") not in OUTPUT_KINDS or not o.get("path"):
            raise ConfigError(f"each output needs kind in {OUTPUT_KINDS} and a path", f"outputs[{i}]")
        outputs.append(Output(o["kind"], str(o["path"])))
    need_a = scheme in (Scheme.ISHIKAWA, Scheme.MODIFIED_ISHIKAWA)
    need_b = scheme is not Scheme.PICARD
    if any(o.kind == "compare" for o in outputs):
        need_a = need_b = True
    for key, needed in (("schedule_a", need_a), ("schedule_b", need_b)):
        if needed and key not in d:
            raise ConfigError("missing required field", key)
    cfg = RunConfig(
        scheme=scheme,
        pair=d.get("pair", "reference"),
        alpha1=alpha1,
        alpha2=alpha2,
        schedule_a=d.get("schedule_a"),
        schedule_b=d.get("schedule_b"),
        x0=_vector(d["x0"], "x0"),
        N=N,
        seed=seed,
        outputs=tuple(outputs),
        floor=floor,
        x_star=None if d.get("x_star") is None else _vector(d["x_star"], "x_star"),
        domain=d.get("domain"),
        name=d.get("name"),
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    from .bounds import check_alphas
    from .errors import BadAlpha

    try:
        check_alphas(cfg.alpha1, cfg.alpha2)
    except BadAlpha as exc:
        raise ConfigError(str(exc), "alpha1/alpha2") from None
    pair = cfg.pair_obj()
    if len(cfg.x0) != pair.domain.dimension:
        raise ConfigError(f"x0 has dimension {len(cfg.x0)}, domain has {pair.domain.dimension}", "x0")
    if not pair.domain.contains(cfg.x0):
        raise ConfigError(f"{list(cfg.x0)} lies outside the domain "
                          f"[{pair.domain.lower}, {pair.domain.upper}]", "x0")
    cfg.schedules()


@dataclass(frozen=True)
class ConfigFile:
    runs: tuple[RunConfig, ...] = ()
    figure: str | None = None
    out_dir: str | None = None
    raw: dict = field(default_factory=dict, compare=False)


def parse(text: str, env: dict | None = None) -> ConfigFile:
    """Parse a config document.

    The document is either a single run, a mapping with ``runs:`` (each
    entry overrides the top-level fields), or ``figure: <id>`` with an
    optional ``out_dir``.
    """
    try:
        d = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}") from None
    if not isinstance(d, dict):
        raise ConfigError("the document must be a mapping")
    if "figure" in d:
        extra = set(d) - {"figure", "out_dir"}
        if extra:
            raise ConfigError(f"figure configs only take figure and out_dir, got {sorted(extra)}",
                              sorted(extra)[0])
        return ConfigFile((), str(d["figure"]), d.get("out_dir"), d)
    if "runs" in d:
        base = {k: v for k, v in d.items() if k != "runs"}
        runs = d["runs"]
        if not isinstance(runs, list) or not runs:
            raise ConfigError("runs must be a non-empty list", "runs")
        out = []
        for i, r in enumerate(runs):
            if not isinstance(r, dict):
                raise ConfigError("each run must be a mapping", f"runs[{i}]")
            try:
                out.append(parse_run({**base, **r}, env))
            except ConfigError as exc:
                raise ConfigError(str(exc), f"runs[{i}]") from None
        return ConfigFile(tuple(out), None, None, d)
    return ConfigFile((parse_run(d, env),), None, None, d)


def load(path, env: dict | None = None) -> ConfigFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse(text, env)


def dump(cfg: RunConfig | ConfigFile) -> str:
    if isinstance(cfg, RunConfig):
        return yaml.safe_dump(cfg.to_dict(), sort_keys=False)
    if cfg.figure is not None:
        d = {"figure": cfg.figure}
        if cfg.out_dir is not None:
            d["out_dir"] = cfg.out_dir
        return yaml.safe_dump(d, sort_keys=False)
    return yaml.safe_dump({"runs": [r.to_dict() for r in cfg.runs]}, sort_keys=False)
