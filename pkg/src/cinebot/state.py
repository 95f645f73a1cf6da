"""Information need, dialogue context, and dialogue state.

Every type here is an immutable value; the update operations are pure
functions that return new values and never touch their inputs, so state can
be shared freely across threads.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace

from .acts import (
    AgentIntent,
    Author,
    Constraint,
    DialogueAct,
    FeedbackLabel,
    Operator,
    SlotName,
    UserIntent,
)

logger = logging.getLogger(__name__)

# How many matching item ids the state keeps verbatim; above this only the
# exact count is retained and the policy re-queries the catalog when it needs
# the ranked list.
MATCHING_ITEMS_CAP = 100


@dataclass(frozen=True)
class InformationNeed:
    """Accumulated user preferences: per-slot (operator, value) pairs.

    Slots appear in first-revealment order and never hold duplicate pairs.
    Slots the user declared they do not care about sit in ``dont_care`` and
    hold no constraints.
    """

    constraints: dict[SlotName, tuple[tuple[Operator, str | int | float], ...]] = field(
        default_factory=dict
    )
    dont_care: frozenset[SlotName] = frozenset()

    @property
    def is_empty(self) -> bool:
        return not self.constraints

    def pairs(self, slot: SlotName) -> tuple[tuple[Operator, str | int | float], ...]:
        return self.constraints.get(slot, ())

    def slots(self) -> tuple[SlotName, ...]:
        return tuple(self.constraints)

    def as_constraints(self) -> tuple[Constraint, ...]:
        return tuple(
            Constraint(slot, op, value)
            for slot, pairs in self.constraints.items()
            for op, value in pairs
        )

    def added(self, constraint: Constraint) -> "InformationNeed":
        pair = (constraint.op, constraint.value)
        existing = self.constraints.get(constraint.slot, ())
        if pair in existing:
            return self
        new = dict(self.constraints)
        new[constraint.slot] = existing + (pair,)
        dont_care = self.dont_care
        if constraint.slot in dont_care:
            # A concrete preference overrides an earlier dont-care.
            dont_care = dont_care - {constraint.slot}
        return InformationNeed(new, dont_care)

    def removed(self, slot: SlotName, value: str | int | float) -> "InformationNeed":
        """Drop every (op, value) pair for ``slot`` matching ``value``, any op."""
        existing = self.constraints.get(slot)
        if existing is None:
            return self
        kept = tuple(pair for pair in existing if pair[1] != value)
        if kept == existing:
            return self
        new = dict(self.constraints)
        if kept:
            new[slot] = kept
        else:
            del new[slot]
        return InformationNeed(new, self.dont_care)

    def marked_dont_care(self, slot: SlotName) -> "InformationNeed":
        new = {s: pairs for s, pairs in self.constraints.items() if s is not slot}
        return InformationNeed(new, self.dont_care | {slot})

    def unmarked_dont_care(self, slot: SlotName) -> "InformationNeed":
        if slot not in self.dont_care:
            return self
        return InformationNeed(dict(self.constraints), self.dont_care - {slot})


def apply_user_act(in_: InformationNeed, act: DialogueAct) -> InformationNeed:
    """Fold a reveal or remove-preference act into the information need."""
    if act.author is not Author.USER:
        raise ValueError("only user acts update the information need")
    if act.intent is UserIntent.REVEAL:
        out = in_
        for c in act.constraints:
            if c.is_dont_care:
                out = out.marked_dont_care(c.slot)
            else:
                out = out.added(c)
        return out
    if act.intent is UserIntent.REMOVE_PREFERENCE:
        out = in_
        for c in act.constraints:
            if c.is_dont_care:
                out = out.unmarked_dont_care(c.slot)
                continue
            before = out
            out = out.removed(c.slot, c.value)
            if out is before:
                logger.info(
                    "remove-preference had no effect: %s=%r not in the "
                    "information need",
                    c.slot.value,
                    c.value,
                )
        return out
    raise ValueError(f"act {act.intent!r} does not update the information need")


def preference_count(in_: InformationNeed) -> int:
    """Number of slots holding at least one constraint (dont-care excluded)."""
    return len(in_.constraints)


@dataclass(frozen=True)
class DialogueContext:
    """Per-item feedback history for one conversation.

    Keys are item ids in first-mention order; values keep every feedback
    label in arrival order. An item enters the context as soon as it is
    recommended, which is what keeps it from being recommended twice.
    """

    entries: dict[str, tuple[FeedbackLabel, ...]] = field(default_factory=dict)

    def __contains__(self, item_id: str) -> bool:
        return item_id in self.entries

    @property
    def is_empty(self) -> bool:
        return not self.entries

    def labels(self, item_id: str) -> tuple[FeedbackLabel, ...]:
        return self.entries.get(item_id, ())

    def item_ids(self) -> tuple[str, ...]:
        return tuple(self.entries)


def record_feedback(
    dc: DialogueContext, item_id: str, label: FeedbackLabel
) -> DialogueContext:
    """Append ``label`` to the item's history, creating the entry if absent."""
    new = dict(dc.entries)
    new[item_id] = new.get(item_id, ()) + (label,)
    return DialogueContext(new)


def register_item(dc: DialogueContext, item_id: str) -> DialogueContext:
    """Ensure an (initially feedback-less) entry exists for ``item_id``."""
    if item_id in dc.entries:
        return dc
    new = dict(dc.entries)
    new[item_id] = ()
    return DialogueContext(new)


class AgentStage(str, enum.Enum):
    """Where the agent stands in the conversation flow.

    greeting          before the first preference exchange
    eliciting         a preference question is pending
    awaiting_feedback a recommendation is on the table (accept/reject/inquire)
    informing         the user is inquiring about the recommended item
    recommending      the user accepted; continue / restart / quit is pending
    closing           the conversation has ended
    """

    GREETING = "greeting"
    ELICITING = "eliciting"
    RECOMMENDING = "recommending"
    INFORMING = "informing"
    AWAITING_FEEDBACK = "awaiting_feedback"
    CLOSING = "closing"


# Stages during which a recommendation is on the table.
RECOMMENDATION_STAGES = frozenset(
    {AgentStage.RECOMMENDING, AgentStage.INFORMING, AgentStage.AWAITING_FEEDBACK}
)


@dataclass(frozen=True)
class DialogueState:
    """Full per-conversation snapshot used by the policy and the NLU."""

    last_user_acts: tuple[DialogueAct, ...] = ()
    last_agent_acts: tuple[DialogueAct, ...] = ()
    info_need: InformationNeed = field(default_factory=InformationNeed)
    matching_items: tuple[str, ...] = ()
    matching_count: int = 0
    current_recommendation: str | None = None
    agent_stage: AgentStage = AgentStage.GREETING
    elicit_count: int = 0
    inquired_attributes: frozenset[SlotName] = frozenset()

    def __post_init__(self) -> None:
        has_rec = self.current_recommendation is not None
        if has_rec != (self.agent_stage in RECOMMENDATION_STAGES):
            raise ValueError(
                f"current_recommendation={self.current_recommendation!r} is "
                f"inconsistent with stage {self.agent_stage.value}"
            )
        if self.elicit_count < 0:
            raise ValueError("elicit_count must be non-negative")
        if self.matching_count < 0:
            raise ValueError("matching_count must be non-negative")

    def with_recommendation(self, item_id: str | None, stage: AgentStage) -> "DialogueState":
        changed = item_id != self.current_recommendation
        return replace(
            self,
            current_recommendation=item_id,
            agent_stage=stage,
            # Inquiry history belongs to one recommendation only.
            inquired_attributes=frozenset() if changed else self.inquired_attributes,
        )


def elicited_slot(state: DialogueState) -> SlotName | None:
    """The slot the agent most recently asked about, if any."""
    for act in reversed(state.last_agent_acts):
        if act.intent is AgentIntent.ELICIT and act.constraints:
            return act.constraints[0].slot
    return None


def restart(state: DialogueState) -> DialogueState:
    """Blank state for the same session: empty need, no recommendation history.

    The caller is responsible for dropping its DialogueContext alongside,
    since the context lives next to (not inside) the state.
    """
    del state
    return DialogueState()
