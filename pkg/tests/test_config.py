import pytest
from hypothesis import given, settings, strategies as st

from collmind.config import (DEFAULT_REPLICAS, ConfigError, build_params, dump_scenario, flatten_params,
                             get_preset, load_scenario, parse_scenario, presets)
from collmind.simulation import ModelParameters

SCENARIO = """
[scenario]
name = demo
description = short troll burst

[model]
lambda_f = 0.5
alpha = 3.0, 2.0, 1.0
literal_update = yes

[influence.1]
kind = troll
start = 10
end = 20
strength = 2.0
target_topic = 7

[ensemble]
replicas = 12
seed = 99
"""


def test_defaults_round_trip_through_flat_keys():
    p = ModelParameters()
    assert build_params(flatten_params(p)) == p
    assert build_params({}) == p


def test_parse_scenario_sets_every_section():
    sc = parse_scenario(SCENARIO)
    assert sc.name == "demo" and sc.description == "short troll burst"
    assert sc.params.lambda_f == 0.5
    assert sc.params.filter.alpha == (3.0, 2.0, 1.0)
    assert sc.params.update.literal_form is True
    assert sc.replicas == 12 and sc.seed == 99
    (entry,) = sc.schedule.entries
    assert (entry.kind, entry.start, entry.end, entry.strength, entry.target_topic) == ("troll", 10, 20, 2.0, 7)


def test_dump_then_parse_is_identity():
    sc = parse_scenario(SCENARIO)
    again = parse_scenario(dump_scenario(sc))
    assert again == sc


@pytest.mark.parametrize("name", sorted(presets()))
def test_presets_round_trip(name):
    sc = get_preset(name)
    assert parse_scenario(dump_scenario(sc)) == sc
    assert sc.replicas == DEFAULT_REPLICAS


@pytest.mark.parametrize("text, match", [
    ("[model]\nlambda_q = 1\n", "unknown model key"),
    ("[model]\nlambda_f = fast\n", "bad value"),
    ("[model]\nlambda_m = 1.5\n", "lambda_m"),
    ("[colour]\nx = 1\n", "unknown section"),
    ("[scenario]\nowner = me\n", "unknown scenario keys"),
    ("[ensemble]\nworkers = 3\n", "unknown ensemble key"),
    ("[ensemble]\nreplicas = 0\n", "replicas"),
    ("[influence.1]\nkind = troll\nstart = 1\nend = 5\n", "missing strength"),
    ("[influence.1]\nkind = gossip\nstart = 1\nend = 5\nstrength = 2\n", "unknown influence kind"),
    ("[influence.1]\nkind = troll\nstart = 1\nend = 5\nstrength = 2\ntarget_topic = 3\ncolour = red\n", "unknown keys"),
    ("[influence.1]\nkind = troll\nstart = 400\nend = 900\nstrength = 2\ntarget_topic = 3\n", "horizon"),
    ("[model\n", None),
])
def test_bad_configs_are_config_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_scenario(text)


def test_load_scenario_uses_file_stem(tmp_path):
    path = tmp_path / "quiet.ini"
    path.write_text("[model]\nhorizon = 50\n")
    sc = load_scenario(path)
    assert sc.name == "quiet" and sc.params.horizon == 50
    with pytest.raises(ConfigError, match="cannot read"):
        load_scenario(tmp_path / "missing.ini")


def test_unknown_preset():
    with pytest.raises(ConfigError, match="unknown preset"):
        get_preset("nope")


def test_counterspeech_presets_run_trolls_until_the_end():
    sc = get_preset("counterspeech_3_t150")
    kinds = {e.kind: e for e in sc.schedule.entries}
    assert kinds["troll"].start == 100 and kinds["troll"].end == 500
    assert kinds["counterspeech"].start == 150 and kinds["counterspeech"].strength == 3.0


@settings(max_examples=50, deadline=None)
@given(lf=st.floats(0, 5), lm=st.floats(0, 1), eta=st.floats(0, 1, exclude_min=True),
       horizon=st.integers(0, 1000))
def test_flat_values_survive_ini_text(lf, lm, eta, horizon):
    sc = parse_scenario(f"[model]\nlambda_f = {lf!r}\nlambda_m = {lm!r}\neta = {eta!r}\nhorizon = {horizon}\n")
    assert parse_scenario(dump_scenario(sc)) == sc
    assert sc.params.lambda_f == lf and sc.params.update.eta == eta
