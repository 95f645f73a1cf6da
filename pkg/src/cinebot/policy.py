"""Dialogue manager: the three-stage state tracker update and the policy.

update_state folds the user's acts into the information need and the
feedback context, recomputes the matching items, and then asks the policy for
the agent's next acts. Everything is pure: same inputs, same outputs.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

from .acts import (
    DONT_CARE,
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
from .catalog import Catalog, filter_items
from .state import (
    MATCHING_ITEMS_CAP,
    RECOMMENDATION_STAGES,
    AgentStage,
    DialogueContext,
    DialogueState,
    InformationNeed,
    apply_user_act,
    elicited_slot,
    record_feedback,
    register_item,
)

logger = logging.getLogger(__name__)

DEFAULT_ELICITATION_ORDER = (
    SlotName.GENRES,
    SlotName.KEYWORDS,
    SlotName.ACTORS,
    SlotName.DIRECTORS,
    SlotName.RELEASE_YEAR,
)

# Attributes of the current recommendation the user may inquire about.
INQUIRABLE_SLOTS = (
    SlotName.GENRES,
    SlotName.KEYWORDS,
    SlotName.ACTORS,
    SlotName.DIRECTORS,
    SlotName.RELEASE_YEAR,
    SlotName.DURATION,
    SlotName.RATING,
    SlotName.PLOT,
)


@dataclass(frozen=True)
class PolicyConfig:
    """Knobs of the elicitation loop; defaults suit the bundled catalog."""

    result_threshold: int = 20
    max_elicit_questions: int = 5
    elicitation_order: tuple[SlotName, ...] = DEFAULT_ELICITATION_ORDER
    count_disclosure: bool = True
    recap_on_elicit: bool = True
    trace: bool = False

    def __post_init__(self) -> None:
        if self.result_threshold < 1 or self.max_elicit_questions < 1:
            raise ValueError("thresholds must be >= 1")
        if len(set(self.elicitation_order)) != len(self.elicitation_order):
            raise ValueError("elicitation_order has duplicates")
        for slot in self.elicitation_order:
            if slot in (SlotName.PLOT,):
                raise ValueError(f"slot {slot.value} cannot be elicited")

    @classmethod
    def from_file(cls, path: str | Path) -> "PolicyConfig":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if "elicitation_order" in data:
            data["elicitation_order"] = tuple(
                SlotName.parse(s) for s in data["elicitation_order"]
            )
        return cls(**data)


@dataclass(frozen=True)
class TurnOutcome:
    agent_acts: tuple[DialogueAct, ...]
    new_state: DialogueState
    new_context: DialogueContext

    def __post_init__(self) -> None:
        if not self.agent_acts:
            raise ValueError("a turn always produces at least one agent act")


def _trace(config: PolicyConfig, rule: str, **detail) -> None:
    if config.trace:
        logger.info("policy rule %s %s", rule, detail or "")


def _normalize(act: DialogueAct, state: DialogueState) -> DialogueAct:
    """Read bare yes/no in feedback positions as accept/reject, and a bare
    deny while eliciting as 'no preference' for the asked slot."""
    if act.intent is UserIntent.ACKNOWLEDGE and state.agent_stage is AgentStage.AWAITING_FEEDBACK:
        return user_act(UserIntent.ACCEPT, feedback=FeedbackLabel.ACCEPTED)
    if act.intent is UserIntent.DENY and state.agent_stage is AgentStage.AWAITING_FEEDBACK:
        return user_act(UserIntent.REJECT, feedback=FeedbackLabel.REJECTED)
    if act.intent is UserIntent.DENY and state.agent_stage is AgentStage.ELICITING:
        slot = elicited_slot(state)
        if slot is not None:
            return user_act(
                UserIntent.REVEAL, [Constraint(slot, Operator.EQ, DONT_CARE)]
            )
    return act


def _next_elicit_slot(in_: InformationNeed, config: PolicyConfig) -> SlotName | None:
    for slot in config.elicitation_order:
        if slot not in in_.constraints and slot not in in_.dont_care:
            return slot
    return None


def recommend(
    state: DialogueState,
    context: DialogueContext,
    catalog: Catalog,
    config: PolicyConfig,
    ranked: list[str] | None = None,
) -> str | None:
    """Top-ranked matching item that has not been recommended before."""
    del config
    if ranked is None:
        ranked = filter_items(catalog, state.info_need)
    for item_id in ranked:
        if item_id not in context:
            return item_id
    return None


def similar_recommendation(
    state: DialogueState,
    context: DialogueContext,
    catalog: Catalog,
    accepted: str,
) -> str | None:
    """Most similar not-yet-recommended match, by Jaccard over genres and
    keywords; ties fall back to the canonical ranking."""
    reference = catalog.get(accepted)
    profile = reference.genres | reference.keywords
    best_id: str | None = None
    best_score = -1.0
    for item_id in filter_items(catalog, state.info_need):
        if item_id in context:
            continue
        candidate = catalog.get(item_id)
        other = candidate.genres | candidate.keywords
        union = profile | other
        score = len(profile & other) / len(union) if union else 0.0
        if score > best_score:
            best_id, best_score = item_id, score
    return best_id


def _inform_constraints(catalog: Catalog, item_id: str, slot: SlotName) -> list[Constraint]:
    item = catalog.get(item_id)
    if slot in (SlotName.GENRES, SlotName.KEYWORDS, SlotName.ACTORS, SlotName.DIRECTORS):
        values = sorted(getattr(item, slot.value))
        # sparse catalogs (converted exports) may lack cast or keywords
        if not values:
            return [Constraint(slot, Operator.EQ, "not on record")]
        return [Constraint(slot, Operator.EQ, v) for v in values]
    if slot is SlotName.PLOT:
        return [Constraint(slot, Operator.EQ, item.plot or "not on record")]
    value = getattr(item, slot.value)
    return [Constraint(slot, Operator.EQ, value)]


@dataclass
class _Decision:
    acts: list[DialogueAct] = field(default_factory=list)
    stage: AgentStage | None = None  # None keeps the previous stage
    current: str | None = None
    current_set: bool = False
    elicit_increment: int = 0

    def set_current(self, item_id: str | None) -> None:
        self.current = item_id
        self.current_set = True


def _elicit_or_recommend(
    in_: InformationNeed,
    context: DialogueContext,
    ranked: list[str],
    elicit_count: int,
    config: PolicyConfig,
) -> tuple[_Decision, DialogueContext]:
    decision = _Decision()
    count = len(ranked)
    if count == 0:
        _trace(config, "no-results", count=0)
        decision.acts.append(agent_act(AgentIntent.NO_RESULTS))
        decision.stage = AgentStage.ELICITING
        decision.set_current(None)
        return decision, context
    next_slot = _next_elicit_slot(in_, config)
    if (
        count > config.result_threshold
        and elicit_count < config.max_elicit_questions
        and next_slot is not None
    ):
        if not in_.is_empty and config.count_disclosure:
            decision.acts.append(agent_act(AgentIntent.TOO_MANY_RESULTS, count=count))
        decision.acts.append(
            agent_act(AgentIntent.ELICIT, [Constraint(next_slot, Operator.EQ, "")])
        )
        decision.elicit_increment = 1
        decision.stage = AgentStage.ELICITING
        decision.set_current(None)
        _trace(config, "elicit", slot=next_slot.value, count=count)
        return decision, context
    candidate = next((i for i in ranked if i not in context), None)
    if candidate is None:
        # matches exist but every one was already recommended; the NLG reads
        # this off the state (matching_count > 0) and words it as exhaustion
        _trace(config, "exhausted", count=count)
        decision.acts.append(agent_act(AgentIntent.NO_RESULTS))
        decision.stage = AgentStage.ELICITING
        decision.set_current(None)
        return decision, context
    _trace(config, "recommend", item=candidate, count=count)
    decision.acts.append(agent_act(AgentIntent.RECOMMEND, item_id=candidate))
    decision.stage = AgentStage.AWAITING_FEEDBACK
    decision.set_current(candidate)
    return decision, register_item(context, candidate)


def next_agent_acts(
    state: DialogueState,
    context: DialogueContext,
    catalog: Catalog,
    config: PolicyConfig,
) -> list[DialogueAct]:
    """The agent's next acts for an already-updated state."""
    decision, _ = _decide(state, context, catalog, config)
    return list(decision.acts)


def _decide(
    state: DialogueState,
    context: DialogueContext,
    catalog: Catalog,
    config: PolicyConfig,
    user_acts: tuple[DialogueAct, ...] | None = None,
    ranked: list[str] | None = None,
) -> tuple[_Decision, DialogueContext]:
    """Policy rules, evaluated in a fixed order against the updated state."""
    acts = user_acts if user_acts is not None else state.last_user_acts
    if ranked is None:
        ranked = filter_items(catalog, state.info_need)
    intents = [a.intent for a in acts]
    decision = _Decision()

    if UserIntent.BYE in intents:
        _trace(config, "bye")
        decision.acts.append(agent_act(AgentIntent.BYE))
        decision.stage = AgentStage.CLOSING
        decision.set_current(None)
        return decision, context

    if UserIntent.REVEAL in intents or UserIntent.REMOVE_PREFERENCE in intents:
        if UserIntent.HI in intents and state.agent_stage is AgentStage.GREETING:
            prefix, context = _elicit_or_recommend(
                state.info_need, context, ranked, state.elicit_count, config
            )
            prefix.acts.insert(0, agent_act(AgentIntent.WELCOME))
            return prefix, context
        return _elicit_or_recommend(
            state.info_need, context, ranked, state.elicit_count, config
        )

    if UserIntent.INQUIRE in intents:
        if state.current_recommendation is None:
            decision.acts.append(agent_act(AgentIntent.CANT_HELP))
            return decision, context
        inquire = next(a for a in acts if a.intent is UserIntent.INQUIRE)
        if inquire.constraints:
            slot = inquire.constraints[0].slot
            _trace(config, "inform", slot=slot.value)
            decision.acts.append(
                agent_act(
                    AgentIntent.INFORM,
                    _inform_constraints(catalog, state.current_recommendation, slot),
                    item_id=state.current_recommendation,
                )
            )
        else:
            _trace(config, "inquire-prompt")
            decision.acts.append(
                agent_act(AgentIntent.ACKNOWLEDGE, item_id=state.current_recommendation)
            )
        decision.stage = AgentStage.INFORMING
        return decision, context

    if UserIntent.ACCEPT in intents:
        if state.current_recommendation is None:
            decision.acts.append(agent_act(AgentIntent.CANT_HELP))
            return decision, context
        _trace(config, "accepted", item=state.current_recommendation)
        decision.acts.append(
            agent_act(AgentIntent.ACKNOWLEDGE, feedback=FeedbackLabel.ACCEPTED)
        )
        decision.stage = AgentStage.RECOMMENDING
        return decision, context

    if UserIntent.REJECT in intents:
        if state.current_recommendation is None:
            decision.acts.append(agent_act(AgentIntent.CANT_HELP))
            return decision, context
        return _elicit_or_recommend(
            state.info_need, context, ranked, state.elicit_count, config
        )

    if UserIntent.CONTINUE_RECOMMENDATION in intents:
        if state.current_recommendation is None:
            decision.acts.append(agent_act(AgentIntent.CANT_HELP))
            return decision, context
        similar = similar_recommendation(
            state, context, catalog, state.current_recommendation
        )
        if similar is None:
            _trace(config, "exhausted-similar")
            decision.acts.append(agent_act(AgentIntent.NO_RESULTS))
            decision.stage = AgentStage.ELICITING
            decision.set_current(None)
            return decision, context
        _trace(config, "similar", item=similar)
        decision.acts.append(agent_act(AgentIntent.RECOMMEND, item_id=similar))
        decision.stage = AgentStage.AWAITING_FEEDBACK
        decision.set_current(similar)
        return decision, register_item(context, similar)

    if UserIntent.HI in intents:
        if state.agent_stage is AgentStage.GREETING:
            follow, context = _elicit_or_recommend(
                state.info_need, context, ranked, state.elicit_count, config
            )
            follow.acts.insert(0, agent_act(AgentIntent.WELCOME))
            _trace(config, "welcome")
            return follow, context
        decision.acts.append(agent_act(AgentIntent.ACKNOWLEDGE))
        return decision, context

    if UserIntent.ACKNOWLEDGE in intents or UserIntent.DENY in intents:
        decision.acts.append(agent_act(AgentIntent.ACKNOWLEDGE))
        return decision, context

    _trace(config, "cant-help")
    decision.acts.append(agent_act(AgentIntent.CANT_HELP))
    return decision, context


def update_state(
    state: DialogueState,
    context: DialogueContext,
    user_acts: list[DialogueAct] | tuple[DialogueAct, ...],
    catalog: Catalog,
    config: PolicyConfig,
) -> TurnOutcome:
    """One full tracker update: fold acts in, re-filter, pick agent acts."""
    acts = tuple(_normalize(a, state) for a in user_acts)
    if any(a.author is not Author.USER for a in acts):
        raise ValueError("update_state only consumes user acts")

    # stage (i): preferences and feedback
    in_ = state.info_need
    ctx = context
    inquired_now: set[SlotName] = set()
    for act in acts:
        if act.intent in (UserIntent.REVEAL, UserIntent.REMOVE_PREFERENCE):
            in_ = apply_user_act(in_, act)
        elif act.intent is UserIntent.ACCEPT and state.current_recommendation:
            ctx = record_feedback(
                ctx, state.current_recommendation, act.feedback or FeedbackLabel.ACCEPTED
            )
        elif act.intent is UserIntent.REJECT and state.current_recommendation:
            ctx = record_feedback(
                ctx, state.current_recommendation, act.feedback or FeedbackLabel.REJECTED
            )
        elif act.intent is UserIntent.INQUIRE and state.current_recommendation:
            ctx = record_feedback(
                ctx, state.current_recommendation, FeedbackLabel.INQUIRED
            )
            if act.constraints:
                inquired_now.add(act.constraints[0].slot)

    # stage (ii): candidate recommendations under the updated need
    ranked = filter_items(catalog, in_)

    # stage (iii): agent acts
    working = replace(
        state,
        info_need=in_,
        matching_items=tuple(ranked[:MATCHING_ITEMS_CAP]),
        matching_count=len(ranked),
    )
    decision, ctx = _decide(working, ctx, catalog, config, acts, ranked)

    new_current = decision.current if decision.current_set else state.current_recommendation
    new_stage = decision.stage if decision.stage is not None else state.agent_stage
    if new_current is None and new_stage in RECOMMENDATION_STAGES:
        new_stage = AgentStage.ELICITING
    if new_current != state.current_recommendation:
        inquired = frozenset()
    else:
        inquired = state.inquired_attributes | inquired_now

    elicit_count = state.elicit_count + decision.elicit_increment
    assert elicit_count <= config.max_elicit_questions

    new_state = DialogueState(
        last_user_acts=acts,
        last_agent_acts=tuple(decision.acts),
        info_need=in_,
        matching_items=tuple(ranked[:MATCHING_ITEMS_CAP]),
        matching_count=len(ranked),
        current_recommendation=new_current,
        agent_stage=new_stage,
        elicit_count=elicit_count,
        inquired_attributes=inquired,
    )
    return TurnOutcome(tuple(decision.acts), new_state, ctx)
