"""Pattern registry and pattern-based intent detection.

Patterns are plain word or phrase triggers, matched on lemmas, optionally
gated to specific agent stages. Stage-gated patterns outrank global ones and
longer patterns outrank shorter ones; there is no scoring beyond that fixed
priority order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..acts import FeedbackLabel, SlotName, UserIntent
from ..errors import PatternRegistryError
from ..state import AgentStage
from .lemmatizer import lemmatize

# Intents that must be reachable through patterns; Reveal and RemovePreference
# are driven by slot filling instead.
_PATTERN_INTENTS = (
    UserIntent.HI,
    UserIntent.BYE,
    UserIntent.ACCEPT,
    UserIntent.REJECT,
    UserIntent.CONTINUE_RECOMMENDATION,
    UserIntent.INQUIRE,
    UserIntent.ACKNOWLEDGE,
    UserIntent.DENY,
)


def _lemmas(phrase: str) -> tuple[str, ...]:
    return tuple(t.lemma for t in lemmatize(phrase))


@dataclass(frozen=True)
class IntentPattern:
    intent: UserIntent
    lemmas: tuple[str, ...]
    stages: frozenset[AgentStage] | None = None
    slot: SlotName | None = None
    feedback: FeedbackLabel | None = None


@dataclass(frozen=True)
class IntentMatch:
    intent: UserIntent
    slot: SlotName | None = None
    feedback: FeedbackLabel | None = None


@dataclass(frozen=True)
class PatternRegistry:
    intent_patterns: tuple[IntentPattern, ...]
    polarity_cues: tuple[tuple[str, ...], ...]
    removal_cues: tuple[tuple[str, ...], ...]
    dont_care_cues: tuple[tuple[str, ...], ...]
    role_cues: dict[SlotName, tuple[tuple[str, ...], ...]]
    title_cues: tuple[tuple[str, ...], ...]
    coordinators: frozenset[str]
    two_digit_decade_century: int = 1900


def _cue_list(phrases: list[str]) -> tuple[tuple[str, ...], ...]:
    cues = {_lemmas(p) for p in phrases if p.strip()}
    return tuple(sorted(cues, key=lambda c: (-len(c), c)))


def load_patterns(path: str | Path | None = None) -> PatternRegistry:
    """Load a registry from a JSON file; None means the bundled default."""
    if path is None:
        raw = resources.files("cinebot").joinpath("data/patterns.json").read_text("utf-8")
    else:
        raw = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(raw)
        patterns: list[IntentPattern] = []
        for entry in data["intents"]:
            intent = UserIntent(entry["intent"])
            stages = entry.get("stages")
            slot = entry.get("slot")
            feedback = entry.get("feedback")
            for phrase in entry["patterns"]:
                patterns.append(
                    IntentPattern(
                        intent=intent,
                        lemmas=_lemmas(phrase),
                        stages=frozenset(AgentStage(s) for s in stages) if stages else None,
                        slot=SlotName.parse(slot) if slot else None,
                        feedback=FeedbackLabel(feedback) if feedback else None,
                    )
                )
        registry = PatternRegistry(
            intent_patterns=tuple(patterns),
            polarity_cues=_cue_list(data.get("polarity_cues", [])),
            removal_cues=_cue_list(data.get("removal_cues", [])),
            dont_care_cues=_cue_list(data.get("dont_care_cues", [])),
            role_cues={
                SlotName.parse(slot): _cue_list(cues)
                for slot, cues in data.get("role_cues", {}).items()
            },
            title_cues=_cue_list(data.get("title_cues", [])),
            coordinators=frozenset(data.get("coordinators", ["but", "and"])),
            two_digit_decade_century=int(data.get("two_digit_decade_century", 1900)),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise PatternRegistryError(f"bad pattern registry: {exc}") from exc

    covered = {p.intent for p in registry.intent_patterns}
    missing = [i.value for i in _PATTERN_INTENTS if i not in covered]
    if missing:
        raise PatternRegistryError(f"no patterns for user intents: {missing}")
    return registry


def _contains(haystack: list[str], needle: tuple[str, ...]) -> bool:
    n = len(needle)
    if n == 0 or n > len(haystack):
        return False
    return any(tuple(haystack[i : i + n]) == needle for i in range(len(haystack) - n + 1))


def detect_intent(
    utterance: str, stage: AgentStage, registry: PatternRegistry
) -> IntentMatch:
    """Highest-priority pattern match, or the UNKNOWN sentinel.

    Stage-gated patterns are tried before global ones; within each group
    longer patterns win. Feeding the result into the act list is the parser's
    job, which also lets slot filling take precedence.
    """
    lemmas = [t.lemma for t in lemmatize(utterance)]
    gated = [
        p
        for p in registry.intent_patterns
        if p.stages is not None and stage in p.stages
    ]
    global_ = [p for p in registry.intent_patterns if p.stages is None]
    by_length = lambda p: (-len(p.lemmas), p.intent.value)  # noqa: E731
    for pattern in sorted(gated, key=by_length) + sorted(global_, key=by_length):
        if _contains(lemmas, pattern.lemmas):
            return IntentMatch(pattern.intent, pattern.slot, pattern.feedback)
    return IntentMatch(UserIntent.UNKNOWN)
