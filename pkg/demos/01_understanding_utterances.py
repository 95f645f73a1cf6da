#!/usr/bin/env python3
"""Walk through the NLU: lemmas, slot annotations, and full dialogue acts.

Run from the repository root after `pip install -e .`:

    python demos/01_understanding_utterances.py
"""

from cinebot.catalog import default_catalog
from cinebot.nlu import LexiconIndex, fill_slots, lemmatize, load_patterns, parse
from cinebot.state import AgentStage, DialogueState
from cinebot.wire import act_to_dict

catalog, report = default_catalog()
index = LexiconIndex(catalog)
registry = load_patterns()
print(f"catalog: {len(catalog)} items ({report.summary()})\n")

# 1. Tokenization and lemmatization keep the original character offsets.
utterance = "I want romance and comedy movies, starring Meryl Streep from the 90s"
print(f"utterance: {utterance!r}")
for token in lemmatize(utterance):
    marker = "" if token.surface.lower() == token.lemma else f"  (lemma: {token.lemma})"
    print(f"  [{token.start:2d}:{token.end:2d}] {token.surface}{marker}")

# 2. Slot filling matches n-grams against the catalog lexicons and the year
#    patterns, resolving span conflicts (longer match wins, then priority).
print("\nannotations:")
for annotation in fill_slots(utterance, index, registry):
    print(
        f"  {annotation.slot.value} {annotation.op.value} {annotation.value!r}"
        f"  span={annotation.span} source={annotation.source}"
    )

# 3. parse() composes intent detection and slot filling into dialogue acts.
state = DialogueState(agent_stage=AgentStage.ELICITING)
examples = [
    utterance,
    "I want movies on the civil war",
    "I want action movies but not directed by Brad Pitt",
    "Tom Hanks",
    "I don't want to see any sports movies anymore.",
    "something weird and unparseable blorp",
]
print("\nparsed acts:")
for text in examples:
    acts = parse(text, state, index, registry)
    print(f"  {text!r}")
    for act in acts:
        print(f"    -> {act_to_dict(act)}")
