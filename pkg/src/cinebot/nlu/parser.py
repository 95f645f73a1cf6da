"""Top of the NLU: turn one utterance into a list of dialogue acts."""

from __future__ import annotations

from ..acts import (
    DONT_CARE,
    Constraint,
    DialogueAct,
    Operator,
    UserIntent,
    user_act,
)
from ..state import AgentStage, DialogueState, elicited_slot
from .lemmatizer import lemmatize
from .patterns import PatternRegistry, detect_intent
from .slots import Annotation, LexiconIndex, fill_slots, removal_scopes


def _has_cue(utterance: str, cues: tuple[tuple[str, ...], ...]) -> bool:
    lemmas = [t.lemma for t in lemmatize(utterance)]
    for cue in cues:
        n = len(cue)
        if n and any(tuple(lemmas[i : i + n]) == cue for i in range(len(lemmas) - n + 1)):
            return True
    return False


def _acts_from_annotations(
    annotations: list[Annotation], utterance: str, registry: PatternRegistry
) -> list[DialogueAct]:
    """Split annotations into remove-preference and reveal acts.

    Annotations sitting inside a removal-cue clause turn into a
    RemovePreference act; everything else is one Reveal. Acts come out in
    utterance order.
    """
    scopes = removal_scopes(utterance, registry)
    removals = [a for a in annotations if any(s <= a.start < e for s, e in scopes)]
    reveals = [a for a in annotations if a not in removals]

    acts: list[tuple[int, DialogueAct]] = []
    if removals:
        acts.append(
            (
                removals[0].start,
                user_act(
                    UserIntent.REMOVE_PREFERENCE,
                    [Constraint(a.slot, a.op, a.value) for a in removals],
                ),
            )
        )
    if reveals:
        acts.append(
            (
                reveals[0].start,
                user_act(
                    UserIntent.REVEAL,
                    [Constraint(a.slot, a.op, a.value) for a in reveals],
                ),
            )
        )
    acts.sort(key=lambda pair: pair[0])
    return [act for _, act in acts]


def parse(
    utterance: str,
    state: DialogueState,
    index: LexiconIndex,
    registry: PatternRegistry,
) -> list[DialogueAct]:
    """Dialogue acts for a free-text utterance, given the current state.

    Never fails: input that matches nothing yields the UNKNOWN sentinel act,
    which the policy answers with cant-help. Structured button payloads do
    not pass through here at all.
    """
    annotations = fill_slots(utterance, index, registry)

    if annotations:
        return _acts_from_annotations(annotations, utterance, registry)

    if state.agent_stage is AgentStage.ELICITING and _has_cue(
        utterance, registry.dont_care_cues
    ):
        slot = elicited_slot(state)
        if slot is not None:
            return [user_act(UserIntent.REVEAL, [Constraint(slot, Operator.EQ, DONT_CARE)])]

    match = detect_intent(utterance, state.agent_stage, registry)
    if match.intent is UserIntent.INQUIRE:
        constraints = [Constraint(match.slot, Operator.EQ, "")] if match.slot else []
        return [user_act(UserIntent.INQUIRE, constraints)]
    if match.intent in (UserIntent.ACCEPT, UserIntent.REJECT):
        return [user_act(match.intent, feedback=match.feedback)]
    return [user_act(match.intent)]
