#!/usr/bin/env python3
"""Drive a complete conversation through the engine, as the web UI would.

    python demos/03_scripted_conversation.py
"""

import tempfile

from cinebot.catalog import default_catalog
from cinebot.nlg import load_templates
from cinebot.nlu import load_patterns
from cinebot.policy import PolicyConfig
from cinebot.service import Engine, SessionStore

catalog, _ = default_catalog()
engine = Engine(
    catalog=catalog,
    registry=load_patterns(),
    templates=load_templates(),
    config=PolicyConfig(),
    store=SessionStore(tempfile.mkdtemp(prefix="cinebot-demo-")),
)

# A fixed seed makes the whole conversation reproducible, templates included.
response = engine.create_session(seed=2020)
session_id = response.session_id


def show(response):
    for utterance in response.utterances:
        print(f"  bot> {utterance}")
    if response.recap:
        print(f"       ({response.recap})")
    if response.recommendation:
        card = response.recommendation
        print(f"       card: {card['title']} ({card['year']}), rating {card['rating']}")
    if response.buttons:
        print(f"       buttons: {[b.label for b in response.buttons]}")


show(response)
script = [
    "hi",
    "I want action movies",
    "I don't care",
    "movies with Tom Cruise",
    "who directed it?",
    "how long is it?",
    "I like this recommendation.",
    "I would like a similar recommendation.",
    "bye",
]
for utterance in script:
    print(f"\nyou> {utterance}")
    show(engine.post_turn(session_id, utterance=utterance))

print("\n--- plain-text transcript ---")
print(engine.export_transcript(session_id, "text"))
