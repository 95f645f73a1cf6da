"""Conversational movie recommender engine.

Pipeline: rule-based NLU -> dialogue state tracker -> policy -> templated
NLG, over a constraint-filterable movie catalog, served through a terminal
REPL and a turn-based session API.
"""

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
from .catalog import Catalog, Item, count_items, default_catalog, filter_items, lexicon, load_catalog
from .nlg import ButtonSpec, TemplateSet, load_templates, options_for, render, summarize_in
from .nlu import LexiconIndex, PatternRegistry, load_patterns, parse
from .policy import PolicyConfig, TurnOutcome, next_agent_acts, recommend, similar_recommendation, update_state
from .state import (
    AgentStage,
    DialogueContext,
    DialogueState,
    InformationNeed,
    apply_user_act,
    preference_count,
    record_feedback,
    restart,
)

__version__ = "0.1.0"
