"""Scenario files (INI) and the shipped influence presets.

A scenario has a ``[scenario]`` section, a flat ``[model]`` section whose keys
override the calibrated defaults, any number of ``[influence.<label>]``
sections, and an ``[ensemble]`` section. Unknown sections or keys are errors.
"""
from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass, field
from pathlib import Path

from .comments import CommentParams
from .filtering import FilterParams
from .influence import Influence, InfluenceSchedule, ScheduleError
from .network import InitParams
from .rng import LogNormalParams
from .simulation import ModelParameters
from .update import UpdateParams


class ConfigError(ValueError):
    pass


DEFAULT_SEED = 20240601
DEFAULT_REPLICAS = 500
DEFAULT_SNAPSHOT_EVERY = 25

_MODEL_KEYS = {
    # key: (type, getter(ModelParameters) -> value)
    "n_topics": (int, lambda p: p.n_topics),
    "n_events": (int, lambda p: p.n_events),
    "n_tiers": (int, lambda p: p.n_tiers),
    "horizon": (int, lambda p: p.horizon),
    "lambda_f": (float, lambda p: p.lambda_f),
    "lambda_m": (float, lambda p: p.lambda_m),
    "lambda_e": (float, lambda p: p.lambda_e),
    "track_topic": (int, lambda p: p.track_topic),
    "quantile": (float, lambda p: p.quantile),
    "alpha_c": (float, lambda p: p.init.alpha_c),
    "weight_a": (float, lambda p: p.init.weight_dist.a),
    "weight_b": (float, lambda p: p.init.weight_dist.b),
    "weight_s": (float, lambda p: p.init.weight_dist.s),
    "sigma_fp": (float, lambda p: p.init.sigma_fp),
    "sigma_wp": (float, lambda p: p.init.sigma_wp),
    "alpha": (tuple, lambda p: p.filter.alpha),
    "r1": (float, lambda p: p.filter.r1),
    "r2": (float, lambda p: p.filter.r2),
    "comment_a": (float, lambda p: p.comments.comment_mass_dist.a),
    "comment_b": (float, lambda p: p.comments.comment_mass_dist.b),
    "comment_s": (float, lambda p: p.comments.comment_mass_dist.s),
    "zero_ratio_slopes": (tuple, lambda p: p.comments.zero_ratio_slopes),
    "rate_coeffs": (tuple, lambda p: p.comments.rate_coeffs),
    "rate_decay": (float, lambda p: p.comments.rate_decay),
    "c_com": (float, lambda p: p.comments.c_com),
    "eta": (float, lambda p: p.update.eta),
    "w_max": (float, lambda p: p.update.w_max),
    "sigma_wn": (float, lambda p: p.update.sigma_wn),
    "literal_update": (bool, lambda p: p.update.literal_form),
}
_INFLUENCE_KEYS = {"kind", "start", "end", "strength", "target_topic", "target_tier"}
_ENSEMBLE_KEYS = {"replicas": int, "seed": int, "snapshot_every": int}


@dataclass
class Scenario:
    name: str
    params: ModelParameters = field(default_factory=ModelParameters)
    schedule: InfluenceSchedule = field(default_factory=InfluenceSchedule)
    replicas: int = DEFAULT_REPLICAS
    seed: int = DEFAULT_SEED
    snapshot_every: int = DEFAULT_SNAPSHOT_EVERY
    description: str = ""

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)


def build_params(values: dict, base: ModelParameters | None = None) -> ModelParameters:
    """Apply flat model keys on top of ``base`` (the calibrated defaults)."""
    base = base or ModelParameters()
    flat = {k: get(base) for k, (_, get) in _MODEL_KEYS.items()}
    for k, v in values.items():
        if k not in _MODEL_KEYS:
            raise ConfigError(f"unknown model key {k!r}")
        flat[k] = v
    try:
        return ModelParameters(
            n_topics=flat["n_topics"], n_events=flat["n_events"], n_tiers=flat["n_tiers"],
            horizon=flat["horizon"], lambda_f=flat["lambda_f"], lambda_m=flat["lambda_m"],
            lambda_e=flat["lambda_e"], track_topic=flat["track_topic"], quantile=flat["quantile"],
            init=InitParams(flat["alpha_c"], LogNormalParams(flat["weight_a"], flat["weight_b"], flat["weight_s"]),
                            flat["sigma_fp"], flat["sigma_wp"]),
            filter=FilterParams(tuple(flat["alpha"]), flat["r1"], flat["r2"]),
            comments=CommentParams(LogNormalParams(flat["comment_a"], flat["comment_b"], flat["comment_s"]),
                                   tuple(flat["zero_ratio_slopes"]), tuple(flat["rate_coeffs"]),
                                   flat["rate_decay"], flat["c_com"]),
            update=UpdateParams(flat["eta"], flat["w_max"], flat["sigma_wn"], bool(flat["literal_update"])),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def flatten_params(p: ModelParameters) -> dict:
    return {k: get(p) for k, (_, get) in _MODEL_KEYS.items()}


def _parse_value(kind, raw: str, key: str):
    try:
        if kind is bool:
            low = raw.strip().lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if kind is tuple:
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if kind is int:
            return int(raw)
        return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


PROVENANCE_SECTIONS = ("run", "digests")


def parse_scenario(text: str, default_name: str = "scenario") -> Scenario:
    """Parse scenario INI text. A run manifest is accepted too: its provenance
    sections are skipped, so ``--config out/manifest.ini`` repeats the run."""
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc

    name, description = default_name, ""
    model_vals, entries = {}, []
    ens = {"replicas": DEFAULT_REPLICAS, "seed": DEFAULT_SEED, "snapshot_every": DEFAULT_SNAPSHOT_EVERY}
    for section in cp.sections():
        items = dict(cp.items(section))
        if section == "scenario":
            extra = set(items) - {"name", "description"}
            if extra:
                raise ConfigError(f"unknown scenario keys {sorted(extra)}")
            name = items.get("name", name)
            description = items.get("description", "")
        elif section == "model":
            for k, raw in items.items():
                if k not in _MODEL_KEYS:
                    raise ConfigError(f"unknown model key {k!r}")
                model_vals[k] = _parse_value(_MODEL_KEYS[k][0], raw, k)
        elif section.startswith("influence"):
            extra = set(items) - _INFLUENCE_KEYS
            if extra:
                raise ConfigError(f"[{section}]: unknown keys {sorted(extra)}")
            for req in ("kind", "start", "end", "strength"):
                if req not in items:
                    raise ConfigError(f"[{section}]: missing {req}")
            try:
                entries.append(Influence(
                    kind=items["kind"].strip(),
                    start=int(items["start"]), end=int(items["end"]),
                    strength=float(items["strength"]),
                    target_topic=int(items["target_topic"]) if "target_topic" in items else None,
                    target_tier=int(items["target_tier"]) if "target_tier" in items else None,
                ))
            except ScheduleError as exc:
                raise ConfigError(f"[{section}]: {exc}") from exc
            except ValueError as exc:
                raise ConfigError(f"[{section}]: {exc}") from exc
        elif section in PROVENANCE_SECTIONS:
            continue
        elif section == "ensemble":
            for k, raw in items.items():
                if k not in _ENSEMBLE_KEYS:
                    raise ConfigError(f"unknown ensemble key {k!r}")
                ens[k] = _parse_value(int, raw, k)
        else:
            raise ConfigError(f"unknown section [{section}]")

    params = build_params(model_vals)
    try:
        schedule = InfluenceSchedule(tuple(entries))
        schedule.validate(params.horizon, params.n_topics, params.n_tiers)
    except ScheduleError as exc:
        raise ConfigError(str(exc)) from exc
    if ens["replicas"] < 1:
        raise ConfigError("replicas must be >= 1")
    return Scenario(name, params, schedule, ens["replicas"], ens["seed"], ens["snapshot_every"], description)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_scenario(text, default_name=path.stem)


def dump_scenario(sc: Scenario, extra_sections: dict | None = None) -> str:
    """Serialize a scenario (all model keys resolved) to INI text."""
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    cp.optionxform = str
    cp["scenario"] = {"name": sc.name, "description": sc.description}
    cp["model"] = {k: _fmt(v) for k, v in flatten_params(sc.params).items()}
    for i, e in enumerate(sc.schedule.entries, 1):
        sec = {"kind": e.kind, "start": str(e.start), "end": str(e.end), "strength": _fmt(float(e.strength))}
        if e.target_topic is not None:
            sec["target_topic"] = str(e.target_topic)
        if e.target_tier is not None:
            sec["target_tier"] = str(e.target_tier)
        cp[f"influence.{i}"] = sec
    cp["ensemble"] = {"replicas": str(sc.replicas), "seed": str(sc.seed), "snapshot_every": str(sc.snapshot_every)}
    for name, values in (extra_sections or {}).items():
        cp[name] = {k: str(v) for k, v in values.items()}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


# --- presets ---------------------------------------------------------------

TARGET_TOPIC = 24   # 25th most frequent topic of the general network
TARGET_TIER = 1     # second tier
WINDOW = (100, 300)
FAR = {"sigma_fp": 1.0, "sigma_wp": 0.05}


def _preset(name, description, model=None, entries=()):
    params = build_params(model or {})
    return Scenario(name, params, InfluenceSchedule(tuple(entries)), description=description)


def presets() -> dict[str, Scenario]:
    s, e = WINDOW
    out = [
        _preset("baseline", "no influence; filter 0.2, memory 0.9"),
        _preset("baseline_far", "no influence, community starts perturbed away from the general network",
                model=FAR),
        _preset("alignment", "filter strength raised from 0.2 to 0.8 during [100, 300)",
                entries=[Influence("alignment", s, e, 0.8)]),
        _preset("alignment_far", "alignment from a perturbed starting community",
                model=FAR, entries=[Influence("alignment", s, e, 0.8)]),
        _preset("amplification", "editors perceive topic 24 as 25x more frequent during [100, 300)",
                entries=[Influence("amplification", s, e, 25.0, TARGET_TOPIC)]),
        _preset("reframing", "tier-2 topic swapped for topic 24 with probability 0.04 during [100, 300)",
                entries=[Influence("reframing", s, e, 0.04, TARGET_TOPIC, TARGET_TIER)]),
        _preset("turnover", "memory strength dropped from 0.99 to 0.95 during [100, 300)",
                model={"lambda_m": 0.99}, entries=[Influence("turnover", s, e, 0.95)]),
        _preset("turnover_far", "turnover from a perturbed starting community",
                model={"lambda_m": 0.99, **FAR}, entries=[Influence("turnover", s, e, 0.95)]),
        _preset("troll", "comments on topic 24 boosted 1.5x during [100, 300)",
                entries=[Influence("troll", s, e, 1.5, TARGET_TOPIC)]),
    ]
    for cs_start in (300, 150):
        for s_cs in (1.5, 3.0):
            out.append(_preset(
                f"counterspeech_{s_cs:g}_t{cs_start}".replace(".", "p"),
                f"trolls (1.5x, topic 24) from t=100; on-topic comments boosted {s_cs:g}x from t={cs_start}",
                entries=[Influence("counterspeech", cs_start, 500, s_cs),
                         Influence("troll", 100, 500, 1.5, TARGET_TOPIC)]))
    out += [
        _preset("external_shock", "topic 24 boosted 20x in the general network during [100, 150)",
                entries=[Influence("external_shock", 100, 150, 20.0, TARGET_TOPIC)]),
        _preset("hypersensitive", "filter strength 3.0 (general-avoiding editors), mild initial perturbation",
                model={"lambda_f": 3.0, "sigma_fp": 0.2}),
    ]
    return {sc.name: sc for sc in out}


def get_preset(name: str) -> Scenario:
    table = presets()
    if name not in table:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(table)}")
    return table[name]
