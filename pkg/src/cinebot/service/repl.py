"""Terminal front end. Drives the same engine as the HTTP API: type free
text, or pick a numbered button."""

from __future__ import annotations

import sys
from typing import IO, Any

from ..wire import act_to_dict
from .engine import Engine, TurnResponse


def _show(response: TurnResponse, out: IO[str]) -> None:
    for utterance in response.utterances:
        out.write(f"bot> {utterance}\n")
    if response.recap:
        out.write(f"bot> ({response.recap})\n")
    if response.recommendation:
        card = response.recommendation
        out.write(
            f"     [{card['title']} ({card['year']}) rated {card['rating']} "
            f"- {card['item_url']}]\n"
        )
    for i, button in enumerate(response.buttons, 1):
        out.write(f"     [{i}] {button.label}\n")
    out.flush()


def run_repl(
    engine: Engine,
    seed: int | None = None,
    stdin: IO[str] | None = None,
    stdout: IO[str] | None = None,
) -> list[dict[str, Any]]:
    """Run one conversation; returns the agent acts of every turn (handy for
    checking both fronts produce identical behavior)."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout

    response = engine.create_session(seed)
    session_id = response.session_id
    all_acts: list[dict[str, Any]] = [a for a in response.to_dict()["acts"]]
    _show(response, stdout)
    buttons = list(response.buttons)

    for line in stdin:
        line = line.strip()
        if not line:
            continue
        if line.isdigit() and buttons:
            pick = int(line)
            if not 1 <= pick <= len(buttons):
                stdout.write(f"bot> Pick a number between 1 and {len(buttons)}.\n")
                continue
            chosen = buttons[pick - 1]
            payload = (
                {"command": chosen.command}
                if chosen.command
                else {"act": act_to_dict(chosen.act)}
            )
            response = engine.post_turn(session_id, payload=payload)
        else:
            response = engine.post_turn(session_id, utterance=line)
        all_acts.extend(response.to_dict()["acts"])
        _show(response, stdout)
        buttons = list(response.buttons)
        if response.agent_stage.value == "closing":
            break
    return all_acts
