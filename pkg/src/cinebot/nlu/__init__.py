"""Rule-based natural language understanding: intents and slot filling."""

from .lemmatizer import Token, lemma, lemma_key, lemmatize
from .parser import elicited_slot, parse
from .patterns import IntentMatch, PatternRegistry, detect_intent, load_patterns
from .slots import Annotation, LexiconIndex, fill_slots, resolve_spans
from .years import parse_year_expression

__all__ = [
    "Annotation",
    "IntentMatch",
    "LexiconIndex",
    "PatternRegistry",
    "Token",
    "detect_intent",
    "elicited_slot",
    "fill_slots",
    "lemma",
    "lemma_key",
    "lemmatize",
    "load_patterns",
    "parse",
    "parse_year_expression",
    "resolve_spans",
]
