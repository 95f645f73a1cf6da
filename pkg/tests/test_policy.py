from __future__ import annotations

import random

import pytest

from cinebot.acts import (
    AgentIntent,
    Constraint,
    FeedbackLabel,
    Operator,
    SlotName,
    UserIntent,
    agent_act,
    user_act,
)
from cinebot.catalog import filter_items
from cinebot.policy import (
    PolicyConfig,
    next_agent_acts,
    recommend,
    similar_recommendation,
    update_state,
)
from cinebot.state import (
    AgentStage,
    DialogueContext,
    DialogueState,
    InformationNeed,
    register_item,
)

from .oracles import oracle_count
from .simulator import Pools, run_conversation


def need(*constraints: Constraint) -> InformationNeed:
    out = InformationNeed()
    for c in constraints:
        out = out.added(c)
    return out


def genres(value: str) -> Constraint:
    return Constraint(SlotName.GENRES, Operator.EQ, value)


class TestPolicyConfig:
    def test_defaults(self):
        config = PolicyConfig()
        assert config.result_threshold == 20
        assert config.max_elicit_questions == 5
        assert config.elicitation_order[0] is SlotName.GENRES

    def test_validation(self):
        with pytest.raises(ValueError):
            PolicyConfig(result_threshold=0)
        with pytest.raises(ValueError):
            PolicyConfig(elicitation_order=(SlotName.GENRES, SlotName.GENRES))

    def test_from_file(self, tmp_path):
        path = tmp_path / "policy.json"
        path.write_text(
            '{"result_threshold": 7, "elicitation_order": ["keywords", "genres"]}'
        )
        config = PolicyConfig.from_file(path)
        assert config.result_threshold == 7
        assert config.elicitation_order == (SlotName.KEYWORDS, SlotName.GENRES)


class TestUpdateState:
    def test_hi_at_greeting_welcomes_then_elicits(self, catalog, config):
        outcome = update_state(
            DialogueState(), DialogueContext(), [user_act(UserIntent.HI)], catalog, config
        )
        assert [a.intent for a in outcome.agent_acts] == [
            AgentIntent.WELCOME,
            AgentIntent.ELICIT,
        ]
        assert outcome.agent_acts[1].constraints[0].slot is config.elicitation_order[0]
        assert outcome.new_state.agent_stage is AgentStage.ELICITING
        assert outcome.new_state.elicit_count == 1

    def test_accept_records_feedback_and_offers_continuation(self, catalog, config):
        state = DialogueState(
            current_recommendation="mv0001",
            agent_stage=AgentStage.AWAITING_FEEDBACK,
        )
        context = register_item(DialogueContext(), "mv0001")
        outcome = update_state(
            state, context, [user_act(UserIntent.ACCEPT)], catalog, config
        )
        assert outcome.new_context.labels("mv0001") == (FeedbackLabel.ACCEPTED,)
        assert [a.intent for a in outcome.agent_acts] == [AgentIntent.ACKNOWLEDGE]
        assert outcome.agent_acts[0].feedback is FeedbackLabel.ACCEPTED
        assert outcome.new_state.agent_stage is AgentStage.RECOMMENDING

    def test_bye_closes_at_any_stage(self, catalog, config):
        for state in [
            DialogueState(),
            DialogueState(agent_stage=AgentStage.ELICITING),
            DialogueState(
                current_recommendation="mv0001",
                agent_stage=AgentStage.INFORMING,
            ),
        ]:
            outcome = update_state(
                state, DialogueContext(), [user_act(UserIntent.BYE)], catalog, config
            )
            assert [a.intent for a in outcome.agent_acts] == [AgentIntent.BYE]
            assert outcome.new_state.agent_stage is AgentStage.CLOSING
            assert outcome.new_state.current_recommendation is None

    def test_reject_moves_to_next_candidate(self, catalog, config):
        in_ = need(genres("action"))
        ranked = filter_items(catalog, in_)
        first, second = ranked[0], ranked[1]
        state = DialogueState(
            info_need=in_,
            matching_items=tuple(ranked[:10]),
            matching_count=len(ranked),
            current_recommendation=first,
            agent_stage=AgentStage.AWAITING_FEEDBACK,
            elicit_count=config.max_elicit_questions,
        )
        context = register_item(DialogueContext(), first)
        outcome = update_state(
            state,
            context,
            [user_act(UserIntent.REJECT, feedback=FeedbackLabel.WATCHED)],
            catalog,
            config,
        )
        assert outcome.new_context.labels(first) == (FeedbackLabel.WATCHED,)
        assert outcome.agent_acts[0].intent is AgentIntent.RECOMMEND
        assert outcome.agent_acts[0].item_id == second

    def test_inquire_informs_and_tracks_attribute(self, catalog, config):
        item_id = next(iter(catalog.items))
        state = DialogueState(
            current_recommendation=item_id,
            agent_stage=AgentStage.AWAITING_FEEDBACK,
        )
        context = register_item(DialogueContext(), item_id)
        outcome = update_state(
            state,
            context,
            [user_act(UserIntent.INQUIRE, [Constraint(SlotName.GENRES, Operator.EQ, "")])],
            catalog,
            config,
        )
        inform = outcome.agent_acts[0]
        assert inform.intent is AgentIntent.INFORM
        assert {c.value for c in inform.constraints} == set(catalog.get(item_id).genres)
        assert outcome.new_state.inquired_attributes == frozenset({SlotName.GENRES})
        assert FeedbackLabel.INQUIRED in outcome.new_context.labels(item_id)
        assert outcome.new_state.agent_stage is AgentStage.INFORMING

    def test_unknown_maps_to_cant_help(self, catalog, config):
        outcome = update_state(
            DialogueState(), DialogueContext(), [user_act(UserIntent.UNKNOWN)], catalog, config
        )
        assert [a.intent for a in outcome.agent_acts] == [AgentIntent.CANT_HELP]

    def test_acknowledge_after_recommendation_reads_as_accept(self, catalog, config):
        state = DialogueState(
            current_recommendation="mv0001",
            agent_stage=AgentStage.AWAITING_FEEDBACK,
        )
        outcome = update_state(
            state, DialogueContext(), [user_act(UserIntent.ACKNOWLEDGE)], catalog, config
        )
        assert outcome.new_context.labels("mv0001") == (FeedbackLabel.ACCEPTED,)


class TestNextAgentActs:
    def test_too_many_results_then_elicit_with_oracle_count(self, catalog, config):
        in_ = need(genres("action"))
        ranked = filter_items(catalog, in_)
        assert len(ranked) > config.result_threshold
        state = DialogueState(
            last_user_acts=(user_act(UserIntent.REVEAL, [genres("action")]),),
            info_need=in_,
            matching_items=tuple(ranked[:100]),
            matching_count=len(ranked),
            agent_stage=AgentStage.ELICITING,
        )
        acts = next_agent_acts(state, DialogueContext(), catalog, config)
        assert [a.intent for a in acts] == [AgentIntent.TOO_MANY_RESULTS, AgentIntent.ELICIT]
        assert acts[0].count == oracle_count(catalog, in_)
        assert acts[1].constraints[0].slot is SlotName.KEYWORDS

    def test_no_results_when_nothing_matches(self, catalog, config):
        in_ = need(genres("no such genre"))
        state = DialogueState(
            last_user_acts=(user_act(UserIntent.REVEAL, [genres("no such genre")]),),
            info_need=in_,
            matching_items=(),
            matching_count=0,
            agent_stage=AgentStage.ELICITING,
        )
        acts = next_agent_acts(state, DialogueContext(), catalog, config)
        assert acts[0].intent is AgentIntent.NO_RESULTS

    def test_elicit_cap_forces_recommendation(self, catalog, config):
        in_ = need(genres("drama"))
        ranked = filter_items(catalog, in_)
        assert len(ranked) > config.result_threshold
        state = DialogueState(
            last_user_acts=(user_act(UserIntent.REVEAL, [genres("drama")]),),
            info_need=in_,
            matching_items=tuple(ranked[:100]),
            matching_count=len(ranked),
            agent_stage=AgentStage.ELICITING,
            elicit_count=config.max_elicit_questions,
        )
        acts = next_agent_acts(state, DialogueContext(), catalog, config)
        assert acts[0].intent is AgentIntent.RECOMMEND
        assert acts[0].item_id == ranked[0]

    def test_count_disclosure_can_be_silenced(self, catalog):
        config = PolicyConfig(count_disclosure=False)
        in_ = need(genres("action"))
        ranked = filter_items(catalog, in_)
        state = DialogueState(
            last_user_acts=(user_act(UserIntent.REVEAL, [genres("action")]),),
            info_need=in_,
            matching_count=len(ranked),
            matching_items=tuple(ranked[:100]),
            agent_stage=AgentStage.ELICITING,
        )
        acts = next_agent_acts(state, DialogueContext(), catalog, config)
        assert [a.intent for a in acts] == [AgentIntent.ELICIT]

    def test_no_count_disclosure_on_empty_need(self, catalog, config):
        state = DialogueState(
            last_user_acts=(user_act(UserIntent.ACKNOWLEDGE),),
            agent_stage=AgentStage.GREETING,
        )
        # an empty IN matching the whole catalog never brags about the count
        acts = next_agent_acts(
            DialogueState(
                last_user_acts=(user_act(UserIntent.REVEAL, []),),
                matching_items=tuple(catalog.ranked_ids[:100]),
                matching_count=len(catalog),
            ),
            DialogueContext(),
            catalog,
            config,
        )
        assert AgentIntent.TOO_MANY_RESULTS not in [a.intent for a in acts]


class TestRecommend:
    def test_excludes_context_items(self, catalog, config):
        in_ = need(genres("action"))
        ranked = filter_items(catalog, in_)
        state = DialogueState(
            info_need=in_, matching_items=tuple(ranked[:100]), matching_count=len(ranked),
        )
        context = register_item(DialogueContext(), ranked[0])
        assert recommend(state, context, catalog, config) == ranked[1]

    def test_top_of_canonical_ranking_when_context_empty(self, catalog, config):
        in_ = need(genres("sport"))
        ranked = filter_items(catalog, in_)
        # independent oracle for the expected top pick
        expected = sorted(
            (i for i in catalog.items.values() if "sport" in i.genres),
            key=lambda i: (-i.rating, -i.votes, i.id),
        )[0].id
        state = DialogueState(info_need=in_, matching_count=len(ranked))
        assert recommend(state, DialogueContext(), catalog, config) == expected

    def test_none_when_all_matches_consumed(self, catalog, config):
        in_ = need(genres("sport"))
        ranked = filter_items(catalog, in_)
        context = DialogueContext()
        for item_id in ranked:
            context = register_item(context, item_id)
        state = DialogueState(info_need=in_, matching_count=len(ranked))
        assert recommend(state, context, catalog, config) is None


class TestSimilarRecommendation:
    def test_jaccard_dominance(self, catalog):
        accepted = next(
            i.id for i in catalog.items.values() if {"action", "crime"} <= i.genres
        )
        state = DialogueState()
        best = similar_recommendation(
            state, register_item(DialogueContext(), accepted), catalog, accepted
        )
        reference = catalog.get(accepted)
        profile = reference.genres | reference.keywords

        def jaccard(other_id):
            other = catalog.get(other_id)
            pool = other.genres | other.keywords
            return len(profile & pool) / len(profile | pool)

        # exhaustive pairwise oracle
        scores = {i: jaccard(i) for i in catalog.items if i != accepted}
        assert best is not None
        assert jaccard(best) == max(scores.values())

    def test_single_remaining_candidate_wins_regardless(self, catalog):
        in_ = need(genres("sport"))
        ranked = filter_items(catalog, in_)
        context = DialogueContext()
        for item_id in ranked[:-1]:
            context = register_item(context, item_id)
        state = DialogueState(info_need=in_)
        assert similar_recommendation(state, context, catalog, ranked[0]) == ranked[-1]

    def test_none_when_exhausted(self, catalog):
        in_ = need(genres("sport"))
        context = DialogueContext()
        for item_id in filter_items(catalog, in_):
            context = register_item(context, item_id)
        state = DialogueState(info_need=in_)
        assert similar_recommendation(state, context, catalog, "mv0001") is None


class TestPolicyProperties:
    def test_random_simulations_respect_invariants(self, catalog, config):
        pools = Pools.from_catalog(catalog)
        rng = random.Random(99)
        for _ in range(150):
            conversation = run_conversation(catalog, config, pools, rng)
            recommended: list[str] = []
            for turn in conversation.turns:
                assert turn.state.elicit_count <= config.max_elicit_questions
                for act in turn.agent_acts:
                    if act.intent is AgentIntent.RECOMMEND:
                        assert act.item_id not in turn.pre_context_ids
                        recommended.append(act.item_id)
                    if act.intent is AgentIntent.TOO_MANY_RESULTS:
                        assert act.count == oracle_count(catalog, turn.state.info_need)
                    if act.intent is AgentIntent.ELICIT:
                        slot = act.constraints[0].slot
                        assert slot not in turn.state.info_need.constraints
                        assert slot not in turn.state.info_need.dont_care
            assert len(recommended) == len(set(recommended))
            if conversation.suffix_agent_turns_to_terminal is not None:
                assert (
                    conversation.suffix_agent_turns_to_terminal
                    <= config.max_elicit_questions + 3
                )

    def test_reveal_suffix_always_terminates(self, catalog, config):
        pools = Pools.from_catalog(catalog)
        rng = random.Random(1234)
        for _ in range(60):
            conversation = run_conversation(catalog, config, pools, rng, prefix_turns=4)
            closing = conversation.turns and conversation.turns[-1].state.agent_stage is AgentStage.CLOSING
            if not closing and conversation.turns:
                assert conversation.suffix_agent_turns_to_terminal is not None

    def test_agent_is_deterministic_given_user_acts(self, catalog, config):
        pools = Pools.from_catalog(catalog)

        def run(seed):
            rng = random.Random(seed)
            conversation = run_conversation(catalog, config, pools, rng)
            return [
                [ (a.intent.value, a.item_id, a.count) for a in t.agent_acts ]
                for t in conversation.turns
            ]

        assert run(4242) == run(4242)


class TestSparseItems:
    def test_inquiring_missing_attributes_still_informs(self, config):
        import json

        from cinebot.catalog import load_catalog
        from cinebot.state import register_item

        record = {
            "id": "x1", "title": "Castless", "genres": ["drama"],
            "release_year": 2000, "rating": 5.0,
            "keywords": [], "actors": [], "directors": [], "plot": "",
        }
        catalog, _ = load_catalog([json.dumps(record)])
        state = DialogueState(
            current_recommendation="x1", agent_stage=AgentStage.AWAITING_FEEDBACK
        )
        context = register_item(DialogueContext(), "x1")
        for slot in (SlotName.ACTORS, SlotName.KEYWORDS, SlotName.PLOT):
            outcome = update_state(
                state,
                context,
                [user_act(UserIntent.INQUIRE, [Constraint(slot, Operator.EQ, "")])],
                catalog,
                config,
            )
            inform = outcome.agent_acts[0]
            assert inform.intent is AgentIntent.INFORM
            assert inform.constraints[0].value == "not on record"
