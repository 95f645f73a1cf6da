"""Canonical JSON encoding of the core dialogue values.

One shape is used everywhere a value crosses a boundary: the turn API, the
session snapshots, and the transcript logs. Field names follow the type
definitions exactly, and every encoder has a matching decoder so records
round-trip losslessly.
"""

from __future__ import annotations

import json
from typing import Any

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
from .errors import ConstraintKindError, UnknownSlotError, WireFormatError
from .state import AgentStage, DialogueContext, DialogueState, InformationNeed


def constraint_to_dict(c: Constraint) -> dict[str, Any]:
    return {"slot": c.slot.value, "op": c.op.value, "value": c.value}


def constraint_from_dict(d: dict[str, Any]) -> Constraint:
    try:
        return Constraint(SlotName.parse(d["slot"]), Operator(d["op"]), d["value"])
    except (KeyError, ValueError, TypeError, UnknownSlotError, ConstraintKindError) as exc:
        raise WireFormatError(f"bad constraint record: {d!r}") from exc


def act_to_dict(act: DialogueAct) -> dict[str, Any]:
    out: dict[str, Any] = {
        "intent": act.intent.value,
        "author": act.author.value,
        "constraints": [constraint_to_dict(c) for c in act.constraints],
    }
    if act.item_id is not None:
        out["item_id"] = act.item_id
    if act.feedback is not None:
        out["feedback"] = act.feedback.value
    if act.count is not None:
        out["count"] = act.count
    return out


def act_from_dict(d: dict[str, Any]) -> DialogueAct:
    try:
        author = Author(d["author"])
        intent = (
            UserIntent(d["intent"]) if author is Author.USER else AgentIntent(d["intent"])
        )
        constraints = tuple(constraint_from_dict(c) for c in d.get("constraints", []))
        feedback = d.get("feedback")
        return DialogueAct(
            intent,
            constraints,
            author,
            item_id=d.get("item_id"),
            feedback=FeedbackLabel(feedback) if feedback is not None else None,
            count=d.get("count"),
        )
    except WireFormatError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise WireFormatError(f"bad dialogue act record: {d!r}") from exc


def info_need_to_dict(in_: InformationNeed) -> dict[str, Any]:
    return {
        "constraints": {
            slot.value: [[op.value, value] for op, value in pairs]
            for slot, pairs in in_.constraints.items()
        },
        "dont_care": sorted(s.value for s in in_.dont_care),
    }


def info_need_from_dict(d: dict[str, Any]) -> InformationNeed:
    try:
        constraints = {
            SlotName.parse(slot): tuple((Operator(op), value) for op, value in pairs)
            for slot, pairs in d.get("constraints", {}).items()
        }
        dont_care = frozenset(SlotName.parse(s) for s in d.get("dont_care", []))
        return InformationNeed(constraints, dont_care)
    except (ValueError, TypeError, UnknownSlotError) as exc:
        raise WireFormatError(f"bad information need record: {d!r}") from exc


def context_to_dict(dc: DialogueContext) -> dict[str, Any]:
    return {item: [label.value for label in labels] for item, labels in dc.entries.items()}


def context_from_dict(d: dict[str, Any]) -> DialogueContext:
    try:
        return DialogueContext(
            {item: tuple(FeedbackLabel(v) for v in labels) for item, labels in d.items()}
        )
    except (ValueError, TypeError, AttributeError) as exc:
        raise WireFormatError(f"bad dialogue context record: {d!r}") from exc


def state_to_dict(state: DialogueState) -> dict[str, Any]:
    return {
        "last_user_acts": [act_to_dict(a) for a in state.last_user_acts],
        "last_agent_acts": [act_to_dict(a) for a in state.last_agent_acts],
        "info_need": info_need_to_dict(state.info_need),
        "matching_items": list(state.matching_items),
        "matching_count": state.matching_count,
        "current_recommendation": state.current_recommendation,
        "agent_stage": state.agent_stage.value,
        "elicit_count": state.elicit_count,
        "inquired_attributes": sorted(s.value for s in state.inquired_attributes),
    }


def state_from_dict(d: dict[str, Any]) -> DialogueState:
    try:
        return DialogueState(
            last_user_acts=tuple(act_from_dict(a) for a in d.get("last_user_acts", [])),
            last_agent_acts=tuple(act_from_dict(a) for a in d.get("last_agent_acts", [])),
            info_need=info_need_from_dict(d.get("info_need", {})),
            matching_items=tuple(d.get("matching_items", [])),
            matching_count=d.get("matching_count", 0),
            current_recommendation=d.get("current_recommendation"),
            agent_stage=AgentStage(d.get("agent_stage", "greeting")),
            elicit_count=d.get("elicit_count", 0),
            inquired_attributes=frozenset(
                SlotName.parse(s) for s in d.get("inquired_attributes", [])
            ),
        )
    except WireFormatError:
        raise
    except (ValueError, TypeError, UnknownSlotError) as exc:
        raise WireFormatError(f"bad dialogue state record: {d!r}") from exc


def dumps(record: dict[str, Any]) -> str:
    """Canonical single-line JSON: sorted keys would scramble arrival order,
    so key order is preserved; separators are fixed for byte-stable output."""
    return json.dumps(record, ensure_ascii=False, separators=(", ", ": "))
