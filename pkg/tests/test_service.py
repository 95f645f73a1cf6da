from __future__ import annotations

import io
import json
import random
import threading

import pytest
from fastapi.testclient import TestClient

from cinebot.errors import (
    SessionClosedError,
    SessionNotFoundError,
    UtteranceTooLongError,
    WireFormatError,
)
from cinebot.service.engine import MAX_UTTERANCE_CHARS
from cinebot.service.http import create_app
from cinebot.service.repl import run_repl
from cinebot.state import AgentStage
from cinebot.wire import context_to_dict, state_to_dict

SCRIPT = [
    "hi",
    "I want action movies",
    "I don't care",
    "movies with Tom Cruise",
    "who directed it?",
    "I like this recommendation.",
    "I would like a similar recommendation.",
    "bye",
]
SCRIPT_INTENTS = [
    ["welcome", "elicit"],
    ["too_many_results", "elicit"],
    ["too_many_results", "elicit"],
    ["recommend"],
    ["inform"],
    ["acknowledge"],
    ["recommend"],
    ["bye"],
]


def drive(engine, utterances, seed=11):
    created = engine.create_session(seed=seed)
    responses = [created]
    for utterance in utterances:
        responses.append(engine.post_turn(created.session_id, utterance=utterance))
    return created.session_id, responses


class TestCreateSession:
    def test_first_response_is_welcome(self, engine):
        response = engine.create_session(seed=1)
        assert [a.intent.value for a in response.acts] == ["welcome"]
        assert response.agent_stage is AgentStage.GREETING
        assert response.utterances

    def test_two_sessions_have_distinct_ids(self, engine):
        a = engine.create_session(seed=1)
        b = engine.create_session(seed=1)
        assert a.session_id != b.session_id

    def test_fixed_seed_replays_byte_identical(self, engine):
        _, first = drive(engine, SCRIPT, seed=1234)
        _, second = drive(engine, SCRIPT, seed=1234)
        assert [r.utterances for r in first] == [r.utterances for r in second]


class TestScriptedPath:
    def test_agent_intent_sequence(self, engine):
        _, responses = drive(engine, SCRIPT, seed=5)
        got = [[a.intent.value for a in r.acts] for r in responses[1:]]
        assert got == SCRIPT_INTENTS

    def test_recommendation_card_present_iff_recommend(self, engine):
        _, responses = drive(engine, SCRIPT, seed=5)
        for response in responses[1:]:
            has_recommend = any(a.intent.value == "recommend" for a in response.acts)
            assert (response.recommendation is not None) == has_recommend

    def test_every_response_has_an_utterance(self, engine):
        _, responses = drive(engine, SCRIPT, seed=5)
        assert all(r.utterances for r in responses)


class TestCommands:
    def test_restart_blanks_state(self, engine):
        created = engine.create_session(seed=2)
        engine.post_turn(created.session_id, utterance="I want action movies")
        response = engine.post_turn(created.session_id, utterance="/restart")
        assert any("cleared" in u.lower() for u in response.utterances)
        assert response.agent_stage is AgentStage.GREETING
        session = engine._get_session(created.session_id)
        assert session.state.info_need.is_empty
        assert session.context.is_empty
        assert session.state.elicit_count == 0

    def test_help_lists_commands(self, engine):
        created = engine.create_session(seed=2)
        response = engine.post_turn(created.session_id, utterance="/help")
        text = " ".join(response.utterances)
        for command in ("/start", "/restart", "/exit", "/help"):
            assert command in text

    def test_exit_closes_session(self, engine):
        created = engine.create_session(seed=2)
        response = engine.post_turn(created.session_id, utterance="/exit")
        assert [a.intent.value for a in response.acts] == ["bye"]
        with pytest.raises(SessionClosedError):
            engine.post_turn(created.session_id, utterance="hi")

    def test_unknown_command(self, engine):
        created = engine.create_session(seed=2)
        response = engine.post_turn(created.session_id, utterance="/frobnicate")
        assert "command" in response.utterances[0].lower()


class TestButtonFlow:
    def test_accept_button_leads_to_continue_restart_quit(self, engine):
        created = engine.create_session(seed=3)
        sid = created.session_id
        engine.post_turn(sid, utterance="movies with Tom Cruise")
        response = engine.post_turn(sid, utterance="I want action movies")
        assert response.recommendation is not None
        buttons = {b.label: b for b in response.buttons}
        accept = buttons["I like this recommendation."]
        payload = {"act": json.loads(json.dumps(_act_dict(accept.act)))}
        after = engine.post_turn(sid, payload=payload)
        labels = [b.label for b in after.buttons]
        assert labels == [
            "I would like a similar recommendation.",
            "Restart",
            "Quit",
        ]

    def test_tell_me_more_then_attribute_buttons_shrink(self, engine):
        created = engine.create_session(seed=3)
        sid = created.session_id
        engine.post_turn(sid, utterance="movies with Tom Cruise")
        rec = engine.post_turn(sid, utterance="action")
        tell_more = next(b for b in rec.buttons if b.label == "Tell me more about it.")
        grid = engine.post_turn(sid, payload={"act": _act_dict(tell_more.act)})
        attribute_buttons = [b for b in grid.buttons if b.act and b.act.intent.value == "inquire"]
        n = len(attribute_buttons)
        assert n > 0
        pick = attribute_buttons[0]
        after = engine.post_turn(sid, payload={"act": _act_dict(pick.act)})
        remaining = [b for b in after.buttons if b.act and b.act.intent.value == "inquire"]
        assert len(remaining) == n - 1
        assert pick.label not in [b.label for b in remaining]


class TestErrors:
    def test_unknown_session(self, engine):
        with pytest.raises(SessionNotFoundError):
            engine.post_turn("deadbeef", utterance="hi")

    def test_oversized_utterance(self, engine):
        created = engine.create_session(seed=4)
        with pytest.raises(UtteranceTooLongError):
            engine.post_turn(created.session_id, utterance="x" * (MAX_UTTERANCE_CHARS + 1))

    def test_turn_needs_exactly_one_body(self, engine):
        created = engine.create_session(seed=4)
        with pytest.raises(WireFormatError):
            engine.post_turn(created.session_id)
        with pytest.raises(WireFormatError):
            engine.post_turn(created.session_id, utterance="hi", payload={"command": "/help"})

    def test_expired_session_conflicts(self, engine_factory):
        engine = engine_factory(idle_ttl=0.0)
        created = engine.create_session(seed=4)
        with pytest.raises(SessionClosedError):
            engine.post_turn(created.session_id, utterance="hi")


class TestTranscriptExport:
    def test_fresh_session_has_only_the_welcome_turn(self, engine):
        created = engine.create_session(seed=6)
        doc = engine.export_transcript(created.session_id, "structured")
        assert len(doc["turns"]) == 1
        assert doc["turns"][0]["author"] == "agent"
        assert doc["turns"][0]["acts"][0]["intent"] == "welcome"

    def test_replay_reproduces_persisted_state(self, engine):
        sid, _ = drive(engine, SCRIPT[:-1], seed=7)
        state, context = engine.replay(sid)
        session = engine._get_session(sid)
        assert state_to_dict(state) == state_to_dict(session.state)
        assert context_to_dict(context) == context_to_dict(session.context)

    def test_plain_text_contains_every_utterance_in_order(self, engine):
        sid, responses = drive(engine, SCRIPT[:4], seed=8)
        text = engine.export_transcript(sid, "text")
        position = -1
        for response in responses:
            for utterance in response.utterances:
                next_position = text.find(utterance, position + 1)
                assert next_position > position
                position = next_position

    def test_plain_text_alias(self, engine):
        created = engine.create_session(seed=6)
        assert engine.export_transcript(created.session_id, "plain-text").startswith("agent:")
        with pytest.raises(ValueError):
            engine.export_transcript(created.session_id, "csv")

    def test_unknown_session_export(self, engine):
        with pytest.raises(SessionNotFoundError):
            engine.export_transcript("deadbeef")


class TestCrashSafety:
    def test_restarted_engine_resumes_identically(self, engine_factory, tmp_path):
        directory = tmp_path / "store"
        first = engine_factory(session_dir=directory)
        sid, _ = drive(first, SCRIPT[:5], seed=9)
        snapshot = first._get_session(sid).snapshot()

        resumed = engine_factory(session_dir=directory)  # fresh process, same disk
        session = resumed._get_session(sid)
        assert session.snapshot() == snapshot
        state, context = resumed.replay(sid)
        assert state_to_dict(state) == snapshot["state"]
        assert context_to_dict(context) == snapshot["context"]

    def test_resumed_session_continues(self, engine_factory, tmp_path):
        directory = tmp_path / "store"
        first = engine_factory(session_dir=directory)
        created = first.create_session(seed=10)
        first.post_turn(created.session_id, utterance="I want action movies")

        resumed = engine_factory(session_dir=directory)
        response = resumed.post_turn(created.session_id, utterance="movies with Tom Cruise")
        assert response.utterances


class TestConcurrency:
    def test_turns_on_one_session_serialize(self, engine):
        created = engine.create_session(seed=12)
        sid = created.session_id
        errors = []

        def worker(n):
            try:
                engine.post_turn(sid, utterance=f"I want action movies {n}")
            except Exception as exc:  # noqa: BLE001
                errors.append(exc)

        threads = [threading.Thread(target=worker, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        session = engine._get_session(sid)
        assert session.turn_index == 8
        records = engine.store.read_transcript(sid)
        # welcome + 8 (user, agent) pairs, strictly alternating per turn
        assert len(records) == 1 + 16
        for i in range(1, 16, 2):
            assert records[i]["author"] == "user"
            assert records[i + 1]["author"] == "agent"
            assert records[i]["turn"] == records[i + 1]["turn"]

    def test_sessions_are_independent(self, engine):
        ids = [engine.create_session(seed=i).session_id for i in range(4)]

        def worker(sid):
            engine.post_turn(sid, utterance="I want action movies")
            engine.post_turn(sid, utterance="movies with Tom Cruise")

        threads = [threading.Thread(target=worker, args=(sid,)) for sid in ids]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        states = [engine._get_session(sid).state for sid in ids]
        assert all(s.matching_count == states[0].matching_count for s in states)


class TestReplParity:
    def test_repl_and_engine_produce_identical_acts(self, engine_factory, tmp_path):
        api_engine = engine_factory(session_dir=tmp_path / "api")
        _, responses = drive(api_engine, SCRIPT, seed=77)
        api_acts = [a for r in responses for a in (ad for ad in r.to_dict()["acts"])]

        repl_engine = engine_factory(session_dir=tmp_path / "repl")
        stdin = io.StringIO("\n".join(SCRIPT) + "\n")
        stdout = io.StringIO()
        repl_acts = run_repl(repl_engine, seed=77, stdin=stdin, stdout=stdout)
        assert repl_acts == api_acts
        assert "bot> " in stdout.getvalue()


class TestHttpApi:
    @pytest.fixture()
    def client(self, engine):
        return TestClient(create_app(engine))

    def test_full_round_trip(self, client):
        created = client.post("/api/sessions", json={"seed": 21}).json()
        sid = created["session_id"]
        assert created["response"]["acts"][0]["intent"] == "welcome"

        turn = client.post(
            f"/api/sessions/{sid}/turns", json={"utterance": "I want action movies"}
        )
        assert turn.status_code == 200
        body = turn.json()
        assert body["agent_stage"] == "eliciting"
        assert body["utterances"]

        rec = client.post(
            f"/api/sessions/{sid}/turns", json={"utterance": "movies with Tom Cruise"}
        ).json()
        assert rec["recommendation"] is not None
        button = rec["buttons"][0]
        echoed = client.post(
            f"/api/sessions/{sid}/turns", json={"payload": button["payload"]}
        )
        assert echoed.status_code == 200

        transcript = client.get(f"/api/sessions/{sid}/transcript")
        assert transcript.status_code == 200
        assert transcript.json()["turns"]

        text = client.get(f"/api/sessions/{sid}/transcript", params={"format": "text"})
        assert "agent:" in text.text

    def test_http_error_mapping(self, client):
        assert client.post("/api/sessions/nope/turns", json={"utterance": "hi"}).status_code == 404
        created = client.post("/api/sessions", json={}).json()
        sid = created["session_id"]
        too_long = client.post(
            f"/api/sessions/{sid}/turns",
            json={"utterance": "x" * (MAX_UTTERANCE_CHARS + 1)},
        )
        assert too_long.status_code == 422
        client.post(f"/api/sessions/{sid}/turns", json={"utterance": "/exit"})
        conflict = client.post(f"/api/sessions/{sid}/turns", json={"utterance": "hi"})
        assert conflict.status_code == 409

    def test_health(self, client):
        body = client.get("/api/health").json()
        assert body["status"] == "ok"
        assert body["catalog_items"] > 0


def _act_dict(act):
    from cinebot.wire import act_to_dict

    return act_to_dict(act)


class TestDegenerateInputs:
    def test_empty_utterance_yields_cant_help(self, engine):
        created = engine.create_session(seed=31)
        response = engine.post_turn(created.session_id, utterance="")
        assert [a.intent.value for a in response.acts] == ["cant_help"]

    def test_bare_slash_is_an_unknown_command(self, engine):
        created = engine.create_session(seed=31)
        response = engine.post_turn(created.session_id, utterance="/")
        assert "command" in response.utterances[0].lower()

    def test_malformed_payload_is_a_wire_error(self, engine):
        from cinebot.errors import WireFormatError

        created = engine.create_session(seed=31)
        with pytest.raises(WireFormatError):
            engine.post_turn(created.session_id, payload={"nonsense": 1})
        with pytest.raises(WireFormatError):
            engine.post_turn(
                created.session_id,
                payload={"act": {"intent": "recommend", "author": "agent", "constraints": [], "item_id": "x"}},
            )
