"""Dialogue-act algebra: slots, operators, constraints, intents, acts.

An utterance is represented as ``intent((slot1, op1, value1), ...)``. These
types are the shared vocabulary between the NLU, the dialogue manager, the
NLG, and the wire protocol. All of them are immutable values.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .errors import ConstraintKindError, UnknownSlotError

# Value revealed for a slot the user explicitly does not care about. It is a
# marker, not a real preference value: it moves the slot into the information
# need's dont-care set instead of narrowing the matching items.
DONT_CARE = "dont_care"

_WS = re.compile(r"\s+")


def canonical_value(text: str) -> str:
    """Canonical string form: case-folded, internal whitespace collapsed."""
    return _WS.sub(" ", text.strip()).casefold()


class SlotKind(enum.Enum):
    CATEGORICAL = "categorical"
    PERSON = "person"
    FREE_TEXT = "free_text"
    NUMERIC = "numeric"


class SlotName(str, enum.Enum):
    """The closed set of item attributes preferences can be stated over."""

    GENRES = "genres"
    KEYWORDS = "keywords"
    ACTORS = "actors"
    DIRECTORS = "directors"
    TITLE = "title"
    RELEASE_YEAR = "release_year"
    DURATION = "duration"
    RATING = "rating"
    PLOT = "plot"

    @classmethod
    def parse(cls, name: str) -> "SlotName":
        try:
            return cls(name)
        except ValueError:
            raise UnknownSlotError(f"unknown slot name: {name!r}") from None

    @property
    def kind(self) -> SlotKind:
        return _SLOT_KINDS[self]

    @property
    def multi_valued(self) -> bool:
        return self in _MULTI_VALUED

    @property
    def is_numeric(self) -> bool:
        return self.kind is SlotKind.NUMERIC


_SLOT_KINDS = {
    SlotName.GENRES: SlotKind.CATEGORICAL,
    SlotName.KEYWORDS: SlotKind.CATEGORICAL,
    SlotName.ACTORS: SlotKind.PERSON,
    SlotName.DIRECTORS: SlotKind.PERSON,
    SlotName.TITLE: SlotKind.FREE_TEXT,
    SlotName.RELEASE_YEAR: SlotKind.NUMERIC,
    SlotName.DURATION: SlotKind.NUMERIC,
    SlotName.RATING: SlotKind.NUMERIC,
    SlotName.PLOT: SlotKind.FREE_TEXT,
}

_MULTI_VALUED = frozenset(
    {SlotName.GENRES, SlotName.KEYWORDS, SlotName.ACTORS, SlotName.DIRECTORS}
)

# Slots with a prebuilt value lexicon for the NLU.
LEXICON_SLOTS = (
    SlotName.GENRES,
    SlotName.KEYWORDS,
    SlotName.ACTORS,
    SlotName.DIRECTORS,
    SlotName.TITLE,
)

NUMERIC_SLOTS = (SlotName.RELEASE_YEAR, SlotName.DURATION, SlotName.RATING)


class Operator(str, enum.Enum):
    """Relationship between a slot and its value. Exactly six members."""

    EQ = "eq"
    NEQ = "neq"
    LT = "lt"
    GT = "gt"
    LEQ = "leq"
    GEQ = "geq"

    @property
    def is_relational(self) -> bool:
        return self in (Operator.LT, Operator.GT, Operator.LEQ, Operator.GEQ)


@dataclass(frozen=True)
class Constraint:
    """One (slot, operator, value) triple.

    String values are stored canonically. An empty string value marks a
    constraint whose value is still being asked for (elicit / inquire).
    """

    slot: SlotName
    op: Operator
    value: str | int | float

    def __post_init__(self) -> None:
        if isinstance(self.value, bool):
            raise ConstraintKindError(f"boolean value for slot {self.slot.value}")
        if isinstance(self.value, str):
            canon = canonical_value(self.value)
            if canon != self.value:
                object.__setattr__(self, "value", canon)
            if canon in ("", DONT_CARE):
                # Ask and dont-care markers apply to any slot, no kind check.
                return
            if self.slot.is_numeric:
                raise ConstraintKindError(
                    f"string value {canon!r} for numeric slot {self.slot.value}"
                )
        else:
            if not self.slot.is_numeric:
                raise ConstraintKindError(
                    f"numeric value {self.value!r} for {self.slot.kind.value} "
                    f"slot {self.slot.value}"
                )
        if self.op.is_relational and not self.slot.is_numeric:
            raise ConstraintKindError(
                f"operator {self.op.value} is only valid on numeric slots, "
                f"got {self.slot.value}"
            )

    @property
    def is_ask(self) -> bool:
        return self.value == ""

    @property
    def is_dont_care(self) -> bool:
        return self.value == DONT_CARE


class Author(str, enum.Enum):
    USER = "user"
    AGENT = "agent"


class UserIntent(str, enum.Enum):
    """Intents a user turn can carry.

    UNKNOWN is the sentinel for unintelligible input; the policy maps it to
    the agent's cant-help response.
    """

    REVEAL = "reveal"
    REMOVE_PREFERENCE = "remove_preference"
    INQUIRE = "inquire"
    ACCEPT = "accept"
    REJECT = "reject"
    CONTINUE_RECOMMENDATION = "continue_recommendation"
    HI = "hi"
    ACKNOWLEDGE = "acknowledge"
    DENY = "deny"
    BYE = "bye"
    UNKNOWN = "unknown"


class AgentIntent(str, enum.Enum):
    """Intents an agent turn can carry."""

    ELICIT = "elicit"
    TOO_MANY_RESULTS = "too_many_results"
    RECOMMEND = "recommend"
    NO_RESULTS = "no_results"
    INFORM = "inform"
    WELCOME = "welcome"
    ACKNOWLEDGE = "acknowledge"
    CANT_HELP = "cant_help"
    BYE = "bye"


Intent = UserIntent | AgentIntent


class FeedbackLabel(str, enum.Enum):
    """Per-item feedback recorded in the dialogue context. Closed set."""

    ACCEPTED = "accepted"
    REJECTED = "rejected"
    DONT_LIKE = "dont_like"
    WATCHED = "watched"
    INQUIRED = "inquired"


@dataclass(frozen=True)
class DialogueAct:
    """An intent plus an ordered list of constraints, tagged with its author.

    ``item_id`` carries the referenced catalog item for recommend-style acts;
    ``feedback`` carries the accept/reject flavor so reject-watched and
    reject-dont-like stay distinguishable all the way to the context.
    """

    intent: Intent
    constraints: tuple[Constraint, ...] = ()
    author: Author = Author.USER
    item_id: str | None = None
    feedback: FeedbackLabel | None = None
    count: int | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.constraints, tuple):
            object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.author is Author.USER and not isinstance(self.intent, UserIntent):
            raise ValueError(f"user act with agent intent {self.intent!r}")
        if self.author is Author.AGENT and not isinstance(self.intent, AgentIntent):
            raise ValueError(f"agent act with user intent {self.intent!r}")
        if self.intent is AgentIntent.ELICIT:
            if len(self.constraints) != 1 or not self.constraints[0].is_ask:
                raise ValueError("elicit must carry exactly one empty-valued constraint")
        if self.intent is AgentIntent.INFORM:
            if not self.constraints or any(c.is_ask for c in self.constraints):
                raise ValueError("inform constraints must carry filled values")
        if self.intent is AgentIntent.RECOMMEND and not self.item_id:
            raise ValueError("recommend must reference exactly one item id")
        if self.feedback is not None and self.intent not in (
            UserIntent.ACCEPT,
            UserIntent.REJECT,
            AgentIntent.ACKNOWLEDGE,
        ):
            raise ValueError(f"feedback label not allowed on intent {self.intent!r}")
        if self.count is not None:
            if self.intent is not AgentIntent.TOO_MANY_RESULTS:
                raise ValueError(f"count not allowed on intent {self.intent!r}")
            if self.count < 0:
                raise ValueError("count must be non-negative")

    @property
    def slots(self) -> tuple[SlotName, ...]:
        return tuple(c.slot for c in self.constraints)


def user_act(
    intent: UserIntent,
    constraints: tuple[Constraint, ...] | list[Constraint] = (),
    *,
    item_id: str | None = None,
    feedback: FeedbackLabel | None = None,
) -> DialogueAct:
    return DialogueAct(
        intent, tuple(constraints), Author.USER, item_id=item_id, feedback=feedback
    )


def agent_act(
    intent: AgentIntent,
    constraints: tuple[Constraint, ...] | list[Constraint] = (),
    *,
    item_id: str | None = None,
    feedback: FeedbackLabel | None = None,
    count: int | None = None,
) -> DialogueAct:
    return DialogueAct(
        intent,
        tuple(constraints),
        Author.AGENT,
        item_id=item_id,
        feedback=feedback,
        count=count,
    )
