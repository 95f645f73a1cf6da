"""Session engine: ties NLU, tracker, policy, and NLG into turns.

The engine is transport-agnostic; the HTTP app and the terminal REPL both
drive exactly this code. Each session is a sequential actor: its turns run
one at a time under a per-session lock, while distinct sessions share nothing
mutable and proceed concurrently.
"""

from __future__ import annotations

import datetime as _dt
import random
import threading
import time
import uuid
from dataclasses import dataclass, field, replace
from typing import Any

from ..acts import AgentIntent, Author, DialogueAct, UserIntent, agent_act, user_act
from ..catalog import Catalog
from ..errors import (
    SessionClosedError,
    SessionNotFoundError,
    UtteranceTooLongError,
    WireFormatError,
)
from ..nlg import ButtonSpec, TemplateSet, options_for, render, summarize_in
from ..nlu import LexiconIndex, PatternRegistry, parse
from ..policy import PolicyConfig, update_state
from ..state import AgentStage, DialogueContext, DialogueState, restart
from ..wire import (
    act_from_dict,
    act_to_dict,
    context_from_dict,
    context_to_dict,
    state_from_dict,
    state_to_dict,
)
from .store import SessionStore

MAX_UTTERANCE_CHARS = 1024
DEFAULT_IDLE_TTL = 24 * 3600

HELP_TEXT = (
    "You can describe the movie you want in plain words (genres, keywords, "
    "actors, directors, a time period) or tap the offered buttons. "
    "Commands: /start begin again, /restart wipe my notes and begin again, "
    "/exit end the conversation, /help show this message."
)
RESTART_CONFIRM = "Okay, I cleared your preferences and the recommendations so far."
UNKNOWN_COMMAND = "I don't know that command. Try /help."


@dataclass
class Session:
    id: str
    seed: int
    created_at: float
    last_active: float
    turn_index: int = 0
    closed: bool = False
    state: DialogueState = field(default_factory=DialogueState)
    context: DialogueContext = field(default_factory=DialogueContext)

    def snapshot(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "seed": self.seed,
            "created_at": self.created_at,
            "last_active": self.last_active,
            "turn_index": self.turn_index,
            "closed": self.closed,
            "state": state_to_dict(self.state),
            "context": context_to_dict(self.context),
        }

    @classmethod
    def from_snapshot(cls, data: dict[str, Any]) -> "Session":
        return cls(
            id=data["id"],
            seed=data["seed"],
            created_at=data["created_at"],
            last_active=data["last_active"],
            turn_index=data.get("turn_index", 0),
            closed=data.get("closed", False),
            state=state_from_dict(data["state"]),
            context=context_from_dict(data["context"]),
        )


@dataclass(frozen=True)
class TurnResponse:
    session_id: str
    utterances: tuple[str, ...]
    buttons: tuple[ButtonSpec, ...]
    agent_stage: AgentStage
    acts: tuple[DialogueAct, ...]
    recap: str | None = None
    recommendation: dict[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "utterances": list(self.utterances),
            "buttons": [
                {
                    "label": b.label,
                    "payload": {"act": act_to_dict(b.act)} if b.act else {"command": b.command},
                }
                for b in self.buttons
            ],
            "agent_stage": self.agent_stage.value,
            "acts": [act_to_dict(a) for a in self.acts],
            "recap": self.recap,
            "recommendation": self.recommendation,
        }


@dataclass(frozen=True)
class _Step:
    """Pure result of executing one turn against (state, context)."""

    user_acts: tuple[DialogueAct, ...]
    agent_acts: tuple[DialogueAct, ...]
    state: DialogueState
    context: DialogueContext
    utterances: tuple[str, ...]
    recap: str | None
    recommendation: dict[str, Any] | None
    closed: bool
    restarted: bool


def _now_iso() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat()


class Engine:
    def __init__(
        self,
        catalog: Catalog,
        registry: PatternRegistry,
        templates: TemplateSet,
        config: PolicyConfig,
        store: SessionStore,
        idle_ttl: float = DEFAULT_IDLE_TTL,
        clock=time.time,
    ):
        self.catalog = catalog
        self.registry = registry
        self.templates = templates
        self.config = config
        self.store = store
        self.idle_ttl = idle_ttl
        self._clock = clock
        self.index = LexiconIndex(catalog)
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    # -- session plumbing ---------------------------------------------------

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def _get_session(self, session_id: str) -> Session:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is None:
            session = Session.from_snapshot(self.store.read_snapshot(session_id))
            with self._registry_lock:
                session = self._sessions.setdefault(session_id, session)
        return session

    def _persist(self, session: Session) -> None:
        self.store.save_snapshot(session.id, session.snapshot())

    # -- rendering ----------------------------------------------------------

    def _turn_rng(self, seed: int, turn_index: int) -> random.Random:
        return random.Random(f"{seed}:{turn_index}")

    def _card(self, agent_acts: tuple[DialogueAct, ...]) -> dict[str, Any] | None:
        for act in agent_acts:
            if act.intent is AgentIntent.RECOMMEND and act.item_id:
                item = self.catalog.get(act.item_id)
                return {
                    "id": item.id,
                    "title": item.title,
                    "year": item.release_year,
                    "rating": item.rating,
                    "plot": item.plot,
                    "item_url": item.item_url,
                    "cover_url": item.cover_url,
                }
        return None

    def _render_turn(
        self, agent_acts: tuple[DialogueAct, ...], state: DialogueState, rng: random.Random
    ) -> tuple[tuple[str, ...], str | None]:
        utterances = tuple(
            render(act, state, rng, self.templates, self.catalog) for act in agent_acts
        )
        recap = None
        if (
            self.config.recap_on_elicit
            and not state.info_need.is_empty
            and any(a.intent is AgentIntent.ELICIT for a in agent_acts)
        ):
            recap = summarize_in(state.info_need, self.catalog)
        return utterances, recap

    # -- the pure turn function ----------------------------------------------

    def _step(
        self,
        state: DialogueState,
        context: DialogueContext,
        seed: int,
        turn_index: int,
        utterance: str | None,
        payload: dict[str, Any] | None,
    ) -> _Step:
        rng = self._turn_rng(seed, turn_index)

        command: str | None = None
        acts: list[DialogueAct] = []
        if payload is not None:
            if "command" in payload:
                command = str(payload["command"])
            elif "act" in payload:
                act = act_from_dict(payload["act"])
                if act.author is not Author.USER:
                    raise WireFormatError("button payloads must be user acts")
                acts = [act]
            else:
                raise WireFormatError(f"bad turn payload: {payload!r}")
        else:
            assert utterance is not None
            if utterance.startswith("/"):
                command = utterance.split()[0] if utterance.split() else utterance
            else:
                acts = parse(utterance, state, self.index, self.registry)

        if command is not None:
            if command == "/help":
                return _Step((), (), state, context, (HELP_TEXT,), None, None, False, False)
            if command in ("/restart", "/start"):
                new_state = restart(state)
                welcome = agent_act(AgentIntent.WELCOME)
                new_state = replace(new_state, last_agent_acts=(welcome,))
                rendered = render(welcome, new_state, rng, self.templates, self.catalog)
                utterances = (
                    (RESTART_CONFIRM, rendered) if command == "/restart" else (rendered,)
                )
                return _Step(
                    (), (welcome,), new_state, DialogueContext(), utterances,
                    None, None, False, True,
                )
            if command == "/exit":
                acts = [user_act(UserIntent.BYE)]
            else:
                return _Step((), (), state, context, (UNKNOWN_COMMAND,), None, None, False, False)

        outcome = update_state(state, context, acts, self.catalog, self.config)
        utterances, recap = self._render_turn(outcome.agent_acts, outcome.new_state, rng)
        closed = any(a.intent is AgentIntent.BYE for a in outcome.agent_acts)
        return _Step(
            tuple(acts),
            outcome.agent_acts,
            outcome.new_state,
            outcome.new_context,
            utterances,
            recap,
            self._card(outcome.agent_acts),
            closed,
            False,
        )

    # -- public operations ----------------------------------------------------

    def create_session(self, seed: int | None = None) -> TurnResponse:
        if seed is None:
            seed = random.SystemRandom().randrange(2**31)
        session = Session(
            id=uuid.uuid4().hex,
            seed=int(seed),
            created_at=self._clock(),
            last_active=self._clock(),
        )
        welcome = agent_act(AgentIntent.WELCOME)
        session.state = replace(session.state, last_agent_acts=(welcome,))
        rng = self._turn_rng(session.seed, 0)
        utterance = render(welcome, session.state, rng, self.templates, self.catalog)
        with self._registry_lock:
            self._sessions[session.id] = session
        self.store.append_transcript(
            session.id,
            {
                "t": _now_iso(),
                "turn": 0,
                "author": "agent",
                "utterances": [utterance],
                "acts": [act_to_dict(welcome)],
            },
        )
        self._persist(session)
        return TurnResponse(
            session_id=session.id,
            utterances=(utterance,),
            buttons=tuple(options_for(session.state, session.context, self.catalog)),
            agent_stage=session.state.agent_stage,
            acts=(welcome,),
        )

    def post_turn(
        self,
        session_id: str,
        utterance: str | None = None,
        payload: dict[str, Any] | None = None,
    ) -> TurnResponse:
        if (utterance is None) == (payload is None):
            raise WireFormatError("a turn carries either an utterance or a payload")
        if utterance is not None and len(utterance) > MAX_UTTERANCE_CHARS:
            raise UtteranceTooLongError(
                f"utterance exceeds {MAX_UTTERANCE_CHARS} characters"
            )
        lock = self._lock_for(session_id)
        with lock:
            session = self._get_session(session_id)
            now = self._clock()
            if session.closed:
                raise SessionClosedError(f"session {session_id} has ended")
            if now - session.last_active > self.idle_ttl:
                session.closed = True
                self._persist(session)
                raise SessionClosedError(f"session {session_id} expired")

            session.turn_index += 1
            step = self._step(
                session.state,
                session.context,
                session.seed,
                session.turn_index,
                utterance,
                payload,
            )
            session.state = step.state
            session.context = step.context
            session.closed = step.closed
            session.last_active = now

            self.store.append_transcript(
                session_id,
                {
                    "t": _now_iso(),
                    "turn": session.turn_index,
                    "author": "user",
                    "utterance": utterance,
                    "payload": payload,
                    "acts": [act_to_dict(a) for a in step.user_acts],
                },
            )
            self.store.append_transcript(
                session_id,
                {
                    "t": _now_iso(),
                    "turn": session.turn_index,
                    "author": "agent",
                    "utterances": list(step.utterances),
                    "acts": [act_to_dict(a) for a in step.agent_acts],
                },
            )
            self._persist(session)

            return TurnResponse(
                session_id=session_id,
                utterances=step.utterances,
                buttons=tuple(options_for(session.state, session.context, self.catalog)),
                agent_stage=session.state.agent_stage,
                acts=step.agent_acts,
                recap=step.recap,
                recommendation=step.recommendation,
            )

    def export_transcript(self, session_id: str, format: str = "structured"):
        """Complete ordered transcript; 'structured' or 'text' ('plain-text'
        is accepted as an alias)."""
        records = self.store.read_transcript(session_id)
        if format == "plain-text":
            format = "text"
        if format == "structured":
            session = self._get_session(session_id)
            return {
                "session_id": session_id,
                "seed": session.seed,
                "created_at": session.created_at,
                "turns": records,
            }
        if format == "text":
            lines = []
            for record in records:
                if record["author"] == "user":
                    said = record.get("utterance")
                    if said is None:
                        said = f"[button] {record.get('payload')}"
                    lines.append(f"user: {said}")
                else:
                    for said in record.get("utterances", []):
                        lines.append(f"agent: {said}")
            return "\n".join(lines)
        raise ValueError(f"unknown transcript format {format!r}")

    def replay(self, session_id: str) -> tuple[DialogueState, DialogueContext]:
        """Rebuild a session's state purely from its transcript.

        Persisted snapshots must always equal this replay; that is the
        crash-safety contract."""
        session = self._get_session(session_id)
        state, context = DialogueState(), DialogueContext()
        welcome = agent_act(AgentIntent.WELCOME)
        state = replace(state, last_agent_acts=(welcome,))
        for record in self.store.read_transcript(session_id):
            if record["author"] != "user":
                continue
            step = self._step(
                state,
                context,
                session.seed,
                record["turn"],
                record.get("utterance"),
                record.get("payload"),
            )
            state, context = step.state, step.context
        return state, context

    def forget(self, session_id: str) -> None:
        """Drop the in-memory copy; next access reloads from disk."""
        with self._registry_lock:
            self._sessions.pop(session_id, None)
            self._locks.pop(session_id, None)
