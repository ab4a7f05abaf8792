"""Time-windowed influences and the hooks they apply to the model processes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .network import SemanticNetwork, frequency_support, rank_quantize

KINDS = ("alignment", "amplification", "reframing", "turnover", "troll", "counterspeech",
         "external_shock")
_NEEDS_TARGET = {"amplification", "reframing", "troll", "external_shock"}


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class Influence:
    """One influence active on the half-open step window ``[start, end)``."""

    kind: str
    start: int
    end: int
    strength: float
    target_topic: Optional[int] = None
    target_tier: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ScheduleError(f"unknown influence kind {self.kind!r}; expected one of {KINDS}")
        if not 0 <= self.start < self.end:
            raise ScheduleError(f"{self.kind}: window [{self.start}, {self.end}) is empty or negative")
        if not self.strength > 0:
            raise ScheduleError(f"{self.kind}: strength must be positive")
        if self.kind in _NEEDS_TARGET and self.target_topic is None:
            raise ScheduleError(f"{self.kind} needs target_topic")
        if self.kind == "reframing":
            if self.target_tier is None:
                raise ScheduleError("reframing needs target_tier")
            if self.strength > 1:
                raise ScheduleError("reframing strength is a probability and must be <= 1")
        if self.kind in ("amplification", "external_shock", "troll", "counterspeech") and self.strength < 1:
            raise ScheduleError(f"{self.kind}: multiplier strength must be >= 1")

    def active(self, t: int) -> bool:
        return self.start <= t < self.end


@dataclass(frozen=True)
class InfluenceSchedule:
    entries: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        by_kind: dict[str, list[Influence]] = {}
        for e in self.entries:
            by_kind.setdefault(e.kind, []).append(e)
        for kind, items in by_kind.items():
            items = sorted(items, key=lambda e: e.start)
            for a, b in zip(items, items[1:]):
                if b.start < a.end:
                    raise ScheduleError(f"overlapping {kind} windows [{a.start},{a.end}) and [{b.start},{b.end})")

    def validate(self, horizon: int, n_topics: int, n_tiers: int) -> None:
        for e in self.entries:
            if e.end > horizon:
                raise ScheduleError(f"{e.kind} window ends at {e.end}, beyond horizon {horizon}")
            if e.target_topic is not None and not 0 <= e.target_topic < n_topics:
                raise ScheduleError(f"{e.kind}: target_topic {e.target_topic} out of range")
            if e.target_tier is not None and not 0 <= e.target_tier < n_tiers:
                raise ScheduleError(f"{e.kind}: target_tier {e.target_tier} out of range")

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class ResolvedStepParams:
    """Effective influence settings for a single step; neutral values when idle."""

    lambda_f: float
    lambda_m: float
    s_amp: float = 1.0
    amp_target: Optional[int] = None
    p_ref: float = 0.0
    ref_target: Optional[int] = None
    ref_tier: Optional[int] = None
    s_tr: float = 1.0
    troll_target: Optional[int] = None
    s_cs: float = 1.0
    shock_boost: float = 1.0
    shock_target: Optional[int] = None
    active: tuple = field(default=())


def resolve_schedule(schedule: InfluenceSchedule, lambda_f: float, lambda_m: float, t: int) -> ResolvedStepParams:
    values = dict(lambda_f=lambda_f, lambda_m=lambda_m)
    active = []
    for e in schedule.entries:
        if not e.active(t):
            continue
        active.append(e.kind)
        if e.kind == "alignment":
            values["lambda_f"] = e.strength
        elif e.kind == "turnover":
            values["lambda_m"] = e.strength
        elif e.kind == "amplification":
            values.update(s_amp=e.strength, amp_target=e.target_topic)
        elif e.kind == "reframing":
            values.update(p_ref=e.strength, ref_target=e.target_topic, ref_tier=e.target_tier)
        elif e.kind == "troll":
            values.update(s_tr=e.strength, troll_target=e.target_topic)
        elif e.kind == "counterspeech":
            values["s_cs"] = e.strength
        elif e.kind == "external_shock":
            values.update(shock_boost=e.strength, shock_target=e.target_topic)
    return ResolvedStepParams(active=tuple(active), **values)


def apply_amplified_general_view(general_freq, s_amp: float, target_topic: Optional[int]) -> np.ndarray:
    """General frequencies as the editors perceive them: target boosted, then renormalized."""
    f = np.asarray(general_freq, dtype=float)
    if s_amp < 1:
        raise ValueError("s_amp must be >= 1")
    if s_amp == 1 or target_topic is None:
        return f
    out = f.copy()
    out[target_topic] *= s_amp
    return out / out.sum()


def apply_reframing(news: np.ndarray, p_ref: float, target_topic: Optional[int],
                    target_tier: Optional[int], stream: np.random.Generator) -> np.ndarray:
    """Swap the target tier of each news item for ``target_topic`` with probability ``p_ref``.

    Items already containing the target are left alone. One uniform is drawn per
    item whenever ``p_ref > 0``.
    """
    if not 0.0 <= p_ref <= 1.0:
        raise ValueError("p_ref must lie in [0, 1]")
    if p_ref == 0 or news.shape[0] == 0:
        return news
    hit = stream.random(news.shape[0]) < p_ref
    hit &= ~(news == target_topic).any(axis=1)
    if not hit.any():
        return news
    out = news.copy()
    out[hit, target_tier] = target_topic
    return out


def apply_external_shock(general: SemanticNetwork, shock_boost: float, target_topic: Optional[int],
                         alpha_c: float = 1.0) -> SemanticNetwork:
    """Boost one general-network frequency and put the result back on the rank support."""
    if shock_boost < 1:
        raise ValueError("shock_boost must be >= 1")
    if shock_boost == 1 or target_topic is None:
        return general
    f = general.frequency.copy()
    f[target_topic] *= shock_boost
    f /= f.sum()
    support = frequency_support(general.n_topics, alpha_c)
    return general.with_values(frequency=rank_quantize(f, support, tiebreak=general.ranks))
