from pathlib import Path

import numpy as np
import pytest
import yaml
from hypothesis import given
from hypothesis import strategies as st

from oeb import config as cf
from oeb import schedules as sch
from oeb.errors import ConfigError
from oeb.iteration import Scheme

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

BASE = {"scheme": "ishikawa", "alpha1": 0.5, "alpha2": 0.2, "schedule_a": "eqbn-a",
        "schedule_b": "eqbn-test1", "x0": [2.0], "N": 10}


def test_minimal_picard_config():
    c = cf.load(CONFIGS / "picard.yaml").runs[0]
    assert c.scheme is Scheme.PICARD and c.alpha2 == 0.5 and c.N == 10
    assert list(c.pair_obj().x_star) == [1.0]


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.yaml")), ids=lambda p: p.name)
def test_shipped_configs_parse(path):
    f = cf.load(path)
    assert f.runs or f.figure


def test_runs_merge_over_top_level():
    f = cf.load(CONFIGS / "figure1.yaml")
    assert [r.schedule_b for r in f.runs] == [f"eqbn-test{k}" for k in (1, 2, 3, 4)]
    assert all(r.schedule_a == "eqbn-a" and r.N == 50 for r in f.runs)


@pytest.mark.parametrize("patch,field", [
    ({"scheme": "halpern"}, "scheme"),
    ({"alpha2": 1.5}, "alpha1/alpha2"),
    ({"N": 0}, "N"),
    ({"N": True}, "N"),
    ({"x0": [5.0]}, "x0"),
    ({"x0": [1.0, 2.0]}, "x0"),
    ({"bogus": 1}, "bogus"),
    ({"seed": -1}, "seed"),
    ({"floor": -1.0}, "floor"),
    ({"schedule_b": "no-such"}, "schedule_b"),
    ({"schedule_b": {"kind": "weird"}}, "schedule_b"),
    ({"schedule_b": {"kind": "rational", "params": {"numerator": [1]}}}, "schedule_b"),
    ({"pair": "nope"}, "pair"),
    ({"outputs": [{"kind": "plot", "path": "x"}]}, "outputs[0]"),
])
def test_invalid_fields_are_named(patch, field):
    with pytest.raises(ConfigError) as exc:
        cf.parse_run({**BASE, **patch}, env={})
    assert exc.value.field == field


def test_missing_required():
    for key in ("scheme", "x0", "schedule_b", "alpha2"):
        d = {k: v for k, v in BASE.items() if k != key}
        with pytest.raises(ConfigError) as exc:
            cf.parse_run(d, env={})
        assert exc.value.field == key
    # Picard needs neither schedule
    cf.parse_run({"scheme": "picard", "alpha2": 0.5, "x0": [2.0], "N": 3}, env={})


def test_seed_env_override():
    d = {**BASE, "schedule_b": {"kind": "random", "params": {"stream": 4}}}
    a = cf.parse_run(d, env={}).schedules()[1]
    b = cf.parse_run(d, env={"OEB_SEED": "7"}).schedules()[1]
    assert a.seed == 42 and b.seed == 7
    assert not np.array_equal(sch.terms(a, 10), sch.terms(b, 10))
    with pytest.raises(ConfigError):
        cf.parse_run(d, env={"OEB_SEED": "x"})


def test_inline_schedules():
    d = {**BASE,
         "schedule_a": {"kind": "rational", "params": {"numerator": [1], "denominator": [2, 1]}},
         "schedule_b": 0.25}
    a, b = cf.parse_run(d, env={}).schedules()
    np.testing.assert_allclose(sch.terms(a, 5), 1 / (np.arange(5) + 2))
    assert sch.eval(b, 9) == 0.25


def test_inline_pair():
    d = {**BASE, "pair": {"T1": {"rule": "affine-toward", "alpha": 0.5},
                          "T2": {"rule": "affine-reflected", "alpha": 0.2},
                          "x_star": [0.0], "domain": {"lower": [-1.0], "upper": [1.0]}},
         "x0": [0.5]}
    p = cf.parse_run(d, env={}).pair_obj()
    assert p.is_affine and p.T2.slope == -0.2


run_dicts = st.fixed_dictionaries({
    "scheme": st.sampled_from(["ishikawa", "modified-ishikawa", "mann"]),
    "alpha1": st.floats(0.05, 0.95),
    "alpha2": st.floats(0.05, 0.95),
    "schedule_a": st.sampled_from(["eqbn-a", "im-test1-a", 0.3]),
    "schedule_b": st.sampled_from(["eqbn-test2", "im-test1-b", 0.1]),
    "x0": st.floats(0.25, 3.0).map(lambda v: [v]),
    "N": st.integers(1, 10_000),
    "seed": st.integers(0, 2**31),
})


@given(run_dicts)
def test_dump_parse_round_trip(d):
    c = cf.parse_run(d, env={})
    again = cf.parse(cf.dump(c), env={}).runs[0]
    assert again == c
    assert yaml.safe_load(cf.dump(c))["scheme"] == c.scheme.value
