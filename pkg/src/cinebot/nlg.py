"""Template-based generation: utterances, the preference recap, and buttons.

Each (intent, signature) pair maps to a list of templates and one is drawn
uniformly with the caller's seeded generator, so output is deterministic
under a fixed seed. A missing template is a configuration bug and raises; it
never degrades into a silent fallback string.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .acts import (
    AgentIntent,
    Author,
    Constraint,
    DialogueAct,
    FeedbackLabel,
    Operator,
    SlotName,
    UserIntent,
    agent_act,
    user_act,
)
from .catalog import Catalog
from .errors import TemplateError
from .policy import DEFAULT_ELICITATION_ORDER, INQUIRABLE_SLOTS
from .state import AgentStage, DialogueContext, DialogueState, InformationNeed

_KNOWN_PLACEHOLDERS = {"slot", "value", "count", "title", "year"}

SLOT_DISPLAY = {
    SlotName.GENRES: "genres",
    SlotName.KEYWORDS: "keywords",
    SlotName.ACTORS: "actors",
    SlotName.DIRECTORS: "directors",
    SlotName.TITLE: "title",
    SlotName.RELEASE_YEAR: "release year",
    SlotName.DURATION: "duration",
    SlotName.RATING: "rating",
    SlotName.PLOT: "plot",
}

EMPTY_RECAP = "You have not told me any preferences yet."


class TemplateSet:
    """Validated (intent, signature) -> templates mapping."""

    def __init__(self, entries: dict[tuple[str, str], tuple[str, ...]]):
        for (intent, signature), templates in entries.items():
            if not templates:
                raise TemplateError(f"no templates for ({intent}, {signature})")
            if intent in (AgentIntent.ELICIT.value, AgentIntent.INFORM.value) and len(templates) < 2:
                raise TemplateError(
                    f"({intent}, {signature}) needs at least two templates for variety"
                )
        self._entries = entries

    def get(self, intent: AgentIntent, signature: str) -> tuple[str, ...]:
        try:
            return self._entries[(intent.value, signature)]
        except KeyError:
            raise TemplateError(
                f"no template for intent {intent.value!r} with signature {signature!r}"
            ) from None

    def pairs(self) -> set[tuple[str, str]]:
        return set(self._entries)


def load_templates(path: str | Path | None = None) -> TemplateSet:
    if path is None:
        raw = resources.files("cinebot").joinpath("data/templates.json").read_text("utf-8")
    else:
        raw = Path(path).read_text(encoding="utf-8")
    data = json.loads(raw)
    entries: dict[tuple[str, str], tuple[str, ...]] = {}
    for row in data:
        key = (row["intent"], row["signature"])
        entries[key] = tuple(row["templates"])
    return TemplateSet(entries)


def signature_of(act: DialogueAct, state: DialogueState) -> str:
    """The template signature an agent act selects."""
    if act.intent is AgentIntent.ELICIT or act.intent is AgentIntent.INFORM:
        return act.constraints[0].slot.value
    if act.intent is AgentIntent.TOO_MANY_RESULTS:
        return "count"
    if act.intent is AgentIntent.RECOMMEND:
        return "item"
    if act.intent is AgentIntent.NO_RESULTS:
        # matches existed but were all shown already
        return "exhausted" if state.matching_count > 0 else "default"
    if act.intent is AgentIntent.ACKNOWLEDGE:
        if act.feedback is FeedbackLabel.ACCEPTED:
            return "accepted"
        if act.item_id is not None:
            return "item"
    return "default"


def _display_value(constraint: Constraint, act: DialogueAct, catalog: Catalog | None) -> str:
    value = constraint.value
    if catalog is None:
        return str(value)
    if constraint.slot in (SlotName.ACTORS, SlotName.DIRECTORS):
        return catalog.display_name(str(value))
    if constraint.slot is SlotName.PLOT and act.item_id and act.item_id in catalog:
        return catalog.get(act.item_id).plot or str(value)
    return str(value)


def _bindings(act: DialogueAct, catalog: Catalog | None) -> dict[str, str]:
    bindings: dict[str, str] = {}
    if act.constraints:
        bindings["slot"] = SLOT_DISPLAY[act.constraints[0].slot]
        values = [_display_value(c, act, catalog) for c in act.constraints if not c.is_ask]
        if values:
            bindings["value"] = ", ".join(values)
    if act.count is not None:
        bindings["count"] = str(act.count)
    if act.item_id is not None and catalog is not None and act.item_id in catalog:
        item = catalog.get(act.item_id)
        bindings["title"] = item.title
        bindings["year"] = str(item.release_year)
    return bindings


class _Strict(dict):
    def __missing__(self, key: str) -> str:
        raise TemplateError(f"unbound placeholder {{{key}}}")


def render(
    act: DialogueAct,
    state: DialogueState,
    rng: random.Random | int,
    templates: TemplateSet,
    catalog: Catalog | None = None,
) -> str:
    """Render one agent act; deterministic for a fixed seed."""
    if act.author is not Author.AGENT:
        raise TemplateError("only agent acts are rendered")
    if isinstance(rng, int):
        rng = random.Random(rng)
    choices = templates.get(act.intent, signature_of(act, state))
    template = rng.choice(choices)
    try:
        return template.format_map(_Strict(_bindings(act, catalog)))
    except (ValueError, IndexError) as exc:
        raise TemplateError(f"bad template {template!r}: {exc}") from exc


def _numeric_phrase(pairs: tuple[tuple[Operator, object], ...]) -> str:
    lower = [v for op, v in pairs if op in (Operator.GEQ, Operator.GT)]
    upper = [v for op, v in pairs if op in (Operator.LEQ, Operator.LT)]
    if len(pairs) == 2 and len(lower) == 1 and len(upper) == 1:
        return f"between {lower[0]} and {upper[0]}"
    parts = []
    for op, value in pairs:
        if op is Operator.GEQ:
            parts.append(f"from {value}")
        elif op is Operator.GT:
            parts.append(f"after {value}")
        elif op is Operator.LT:
            parts.append(f"before {value}")
        elif op is Operator.LEQ:
            parts.append(f"up to {value}")
        elif op is Operator.NEQ:
            parts.append(f"not {value}")
        else:
            parts.append(str(value))
    return ", ".join(parts)


def summarize_in(in_: InformationNeed, catalog: Catalog | None = None) -> str:
    """Readable recap of every constrained slot, in revealment order."""
    if in_.is_empty:
        return EMPTY_RECAP
    parts: list[str] = []
    for slot, pairs in in_.constraints.items():
        if slot.is_numeric:
            parts.append(f"{SLOT_DISPLAY[slot]} {_numeric_phrase(pairs)}")
            continue
        rendered = []
        for op, value in pairs:
            shown = str(value)
            if catalog is not None and slot in (SlotName.ACTORS, SlotName.DIRECTORS):
                shown = catalog.display_name(shown)
            rendered.append(f"not {shown}" if op is Operator.NEQ else shown)
        parts.append(f"{SLOT_DISPLAY[slot]} {' and '.join(rendered)}")
    return "Your preferences so far: " + "; ".join(parts) + "."


@dataclass(frozen=True)
class ButtonSpec:
    """One quick-reply option: an act payload or a slash command."""

    label: str
    act: DialogueAct | None = None
    command: str | None = None

    def __post_init__(self) -> None:
        if (self.act is None) == (self.command is None):
            raise ValueError("button carries exactly one of act or command")
        if self.act is not None and self.act.author is not Author.USER:
            raise ValueError("button payloads are user acts")


def _ambiguity_buttons(in_: InformationNeed, catalog: Catalog | None) -> list[ButtonSpec]:
    actors = {v for op, v in in_.pairs(SlotName.ACTORS) if op is Operator.EQ}
    directors = {v for op, v in in_.pairs(SlotName.DIRECTORS) if op is Operator.EQ}
    buttons: list[ButtonSpec] = []
    for value in sorted(actors & directors, key=str):
        shown = catalog.display_name(str(value)) if catalog else str(value)
        for slot in (SlotName.ACTORS, SlotName.DIRECTORS):
            buttons.append(
                ButtonSpec(
                    label=f"Remove {SLOT_DISPLAY[slot]} preference: {shown}",
                    act=user_act(
                        UserIntent.REMOVE_PREFERENCE,
                        [Constraint(slot, Operator.EQ, value)],
                    ),
                )
            )
    return buttons


def options_for(
    state: DialogueState,
    context: DialogueContext,
    catalog: Catalog | None = None,
) -> list[ButtonSpec]:
    """Stage-dependent quick replies accompanying the agent's turn."""
    del context
    buttons = _ambiguity_buttons(state.info_need, catalog)

    if state.agent_stage is AgentStage.AWAITING_FEEDBACK:
        buttons += [
            ButtonSpec(
                "I like this recommendation.",
                act=user_act(UserIntent.ACCEPT, feedback=FeedbackLabel.ACCEPTED),
            ),
            ButtonSpec(
                "I have already seen this one.",
                act=user_act(UserIntent.REJECT, feedback=FeedbackLabel.WATCHED),
            ),
            ButtonSpec(
                "I don't like it.",
                act=user_act(UserIntent.REJECT, feedback=FeedbackLabel.DONT_LIKE),
            ),
            ButtonSpec("Tell me more about it.", act=user_act(UserIntent.INQUIRE)),
        ]
    elif state.agent_stage is AgentStage.INFORMING:
        for slot in INQUIRABLE_SLOTS:
            if slot in state.inquired_attributes:
                continue
            buttons.append(
                ButtonSpec(
                    SLOT_DISPLAY[slot].capitalize(),
                    act=user_act(
                        UserIntent.INQUIRE, [Constraint(slot, Operator.EQ, "")]
                    ),
                )
            )
        buttons.append(
            ButtonSpec(
                "Continue recommendation",
                act=user_act(UserIntent.CONTINUE_RECOMMENDATION),
            )
        )
    elif state.agent_stage is AgentStage.RECOMMENDING:
        buttons += [
            ButtonSpec(
                "I would like a similar recommendation.",
                act=user_act(UserIntent.CONTINUE_RECOMMENDATION),
            ),
            ButtonSpec("Restart", command="/restart"),
            ButtonSpec("Quit", command="/exit"),
        ]

    if any(a.intent is AgentIntent.NO_RESULTS for a in state.last_agent_acts):
        if not any(b.command == "/restart" for b in buttons):
            buttons.append(ButtonSpec("Restart", command="/restart"))

    return buttons


def policy_signatures(
    elicitation_order: tuple[SlotName, ...] = DEFAULT_ELICITATION_ORDER,
) -> set[tuple[str, str]]:
    """Every (intent, signature) pair the dialogue policy can emit."""
    pairs: set[tuple[str, str]] = {
        (AgentIntent.WELCOME.value, "default"),
        (AgentIntent.TOO_MANY_RESULTS.value, "count"),
        (AgentIntent.RECOMMEND.value, "item"),
        (AgentIntent.NO_RESULTS.value, "default"),
        (AgentIntent.NO_RESULTS.value, "exhausted"),
        (AgentIntent.ACKNOWLEDGE.value, "default"),
        (AgentIntent.ACKNOWLEDGE.value, "accepted"),
        (AgentIntent.ACKNOWLEDGE.value, "item"),
        (AgentIntent.CANT_HELP.value, "default"),
        (AgentIntent.BYE.value, "default"),
    }
    for slot in elicitation_order:
        pairs.add((AgentIntent.ELICIT.value, slot.value))
    for slot in INQUIRABLE_SLOTS:
        pairs.add((AgentIntent.INFORM.value, slot.value))
    return pairs
