"""Slot filling: n-gram lexicon matching, span claiming, and conflict rules."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from ..acts import Operator, SlotName
from ..catalog import Catalog, lexicon
from .lemmatizer import Token, lemma_key, lemmatize
from .patterns import PatternRegistry

logger = logging.getLogger(__name__)

MAX_NGRAM = 8

# Equal-span conflicts are settled by this slot priority (the keyword slot
# beats the genre slot, which is what keeps "civil war" from also tagging the
# war genre). Year patterns are the most specific source of all.
_PRIORITY = {
    "year_pattern": 5,
    SlotName.KEYWORDS: 4,
    SlotName.TITLE: 3,
    SlotName.ACTORS: 2,
    SlotName.DIRECTORS: 2,
    SlotName.GENRES: 1,
}


@dataclass(frozen=True)
class Annotation:
    """One detected slot value with its character span in the utterance."""

    slot: SlotName
    op: Operator
    value: str | int | float
    start: int
    end: int
    source: str  # lexicon | synonym | year_pattern | person_ambiguous

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def priority(self) -> int:
        if self.source == "year_pattern":
            return _PRIORITY["year_pattern"]
        return _PRIORITY.get(self.slot, 0)


class LexiconIndex:
    """Lemma-keyed lookup tables for every lexicon-bearing slot.

    Person names live in one merged table flagged with the roles they occur
    in, because a name alone does not say whether it is an actor or a
    director preference.
    """

    def __init__(self, catalog: Catalog):
        self.keywords = {lemma_key(v): v for v in lexicon(catalog, SlotName.KEYWORDS)}
        self.titles = {lemma_key(v): v for v in lexicon(catalog, SlotName.TITLE)}
        self.genres = {lemma_key(v): v for v in lexicon(catalog, SlotName.GENRES)}
        self.genre_synonyms: dict[str, str] = {}
        for genre, synonyms in catalog.genre_synonyms.items():
            for synonym in synonyms:
                self.genre_synonyms[lemma_key(synonym)] = genre
        actors = lexicon(catalog, SlotName.ACTORS)
        directors = lexicon(catalog, SlotName.DIRECTORS)
        self.persons: dict[str, tuple[str, bool, bool]] = {}
        for name in actors | directors:
            self.persons[lemma_key(name)] = (name, name in actors, name in directors)


def _overlaps(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def _cue_before(
    tokens: list[Token], index: int, cues: tuple[tuple[str, ...], ...], window: int = 4
) -> int:
    """Distance to the nearest cue ending just before ``index``; -1 if none."""
    for back in range(1, window + 1):
        end = index - back + 1
        for cue in cues:
            start = end - len(cue)
            if start < 0 or end > index:
                continue
            if tuple(t.lemma for t in tokens[start:end]) == cue:
                return back
    return -1


def _person_annotations(
    tokens: list[Token],
    i: int,
    span: tuple[int, int],
    entry: tuple[str, bool, bool],
    registry: PatternRegistry,
) -> list[Annotation]:
    value, in_actors, in_directors = entry
    director_cue = _cue_before(tokens, i, registry.role_cues.get(SlotName.DIRECTORS, ()))
    actor_cue = _cue_before(tokens, i, registry.role_cues.get(SlotName.ACTORS, ()))
    start, end = span
    if director_cue >= 0 and (actor_cue < 0 or director_cue < actor_cue):
        return [Annotation(SlotName.DIRECTORS, Operator.EQ, value, start, end, "lexicon")]
    if actor_cue >= 0:
        return [Annotation(SlotName.ACTORS, Operator.EQ, value, start, end, "lexicon")]
    if in_actors and in_directors:
        # No role cue and the name fits both slots: keep the pair and let the
        # user remove one via the disambiguation options.
        return [
            Annotation(SlotName.ACTORS, Operator.EQ, value, start, end, "person_ambiguous"),
            Annotation(SlotName.DIRECTORS, Operator.EQ, value, start, end, "person_ambiguous"),
        ]
    slot = SlotName.ACTORS if in_actors else SlotName.DIRECTORS
    return [Annotation(slot, Operator.EQ, value, start, end, "lexicon")]


def _removal_cue_token_ranges(
    tokens: list[Token], registry: PatternRegistry
) -> list[tuple[int, int]]:
    ranges = []
    for i in range(len(tokens)):
        for cue in registry.removal_cues:
            if i + len(cue) <= len(tokens) and tuple(
                t.lemma for t in tokens[i : i + len(cue)]
            ) == cue:
                ranges.append((i, i + len(cue)))
    return ranges


def _negation_scopes(
    tokens: list[Token], registry: PatternRegistry, utterance_len: int
) -> list[tuple[int, int]]:
    """Character ranges negated by a polarity cue, each ending at the next
    coordinating conjunction (or the end of the utterance).

    A polarity word that is part of a removal cue ("no" inside "no more")
    marks removal, not negation, and is skipped here."""
    removal_ranges = _removal_cue_token_ranges(tokens, registry)
    scopes: list[tuple[int, int]] = []
    for i, token in enumerate(tokens):
        if (token.lemma,) not in registry.polarity_cues:
            continue
        if any(lo <= i < hi for lo, hi in removal_ranges):
            continue
        end = utterance_len
        for later in tokens[i + 1 :]:
            if later.lemma in registry.coordinators:
                end = later.start
                break
        scopes.append((token.end, end))
    return scopes


def removal_scopes(
    utterance: str, registry: PatternRegistry
) -> list[tuple[int, int]]:
    """Character ranges governed by a remove-preference cue.

    A cue like "don't want" or "anymore" marks the clause it sits in; the
    scope runs from the start of the clause (the previous coordinator) to the
    next coordinator, so "no more sports, but keep comedy" only removes
    sports.
    """
    tokens = lemmatize(utterance)
    scopes: list[tuple[int, int]] = []
    n = len(tokens)
    for i in range(n):
        for cue in registry.removal_cues:
            if i + len(cue) > n:
                continue
            if tuple(t.lemma for t in tokens[i : i + len(cue)]) != cue:
                continue
            start = 0
            for j in range(i - 1, -1, -1):
                if tokens[j].lemma in registry.coordinators:
                    start = tokens[j].end
                    break
            end = len(utterance)
            for later in tokens[i + len(cue) :]:
                if later.lemma in registry.coordinators:
                    end = later.start
                    break
            scopes.append((start, end))
    return scopes


def fill_slots(
    utterance: str, index: LexiconIndex, registry: PatternRegistry
) -> list[Annotation]:
    """All slot annotations for an utterance, longest n-grams first.

    Spans are claimed as they match, so a value embedded in a longer match is
    never annotated twice; remaining same-length conflicts are settled by
    resolve_spans. Polarity cues in scope flip EQ to NEQ, except on year
    ranges, which have no conjunctive negation and are dropped instead.
    """
    tokens = lemmatize(utterance)
    annotations: list[Annotation] = []
    claimed: list[tuple[int, int]] = []

    for n in range(min(MAX_NGRAM, len(tokens)), 0, -1):
        for i in range(len(tokens) - n + 1):
            span = (tokens[i].start, tokens[i + n - 1].end)
            if any(_overlaps(span, c) for c in claimed):
                continue
            key = " ".join(t.lemma for t in tokens[i : i + n])
            hits: list[Annotation] = []
            if key in index.keywords:
                hits.append(
                    Annotation(SlotName.KEYWORDS, Operator.EQ, index.keywords[key], *span, "lexicon")
                )
            if key in index.titles and (
                n >= 2 or _cue_before(tokens, i, registry.title_cues) >= 0
            ):
                hits.append(
                    Annotation(SlotName.TITLE, Operator.EQ, index.titles[key], *span, "lexicon")
                )
            if key in index.genres:
                hits.append(
                    Annotation(SlotName.GENRES, Operator.EQ, index.genres[key], *span, "lexicon")
                )
            elif key in index.genre_synonyms:
                hits.append(
                    Annotation(SlotName.GENRES, Operator.EQ, index.genre_synonyms[key], *span, "synonym")
                )
            if key in index.persons:
                hits.extend(_person_annotations(tokens, i, span, index.persons[key], registry))
            if hits:
                annotations.extend(hits)
                claimed.append(span)

    from .years import parse_year_expression  # local import, avoids a cycle

    # Year annotations are not span-blocked by lexicon claims: resolve_spans
    # arbitrates instead, so a longer lexicon match (a title containing a
    # year) still wins while an equal-length one loses to the more specific
    # year pattern.
    annotations.extend(
        parse_year_expression(utterance, registry.two_digit_decade_century)
    )

    scopes = _negation_scopes(tokens, registry, len(utterance))
    negated = []
    for annotation in annotations:
        in_scope = any(s <= annotation.start < e for s, e in scopes)
        if not in_scope:
            negated.append(annotation)
        elif annotation.op is Operator.EQ:
            negated.append(replace(annotation, op=Operator.NEQ))
        elif annotation.source == "year_pattern":
            # "not in [a, b)" has no conjunctive representation; drop it
            logger.debug("dropping negated year range %s", annotation)
        else:
            negated.append(annotation)

    return resolve_spans(negated)


def _exempt(a: Annotation, b: Annotation) -> bool:
    if a.span != b.span:
        return False
    if a.source == b.source == "person_ambiguous":
        return True
    # a single year expression may expand into a lower and an upper bound
    return a.source == b.source == "year_pattern" and a.slot is b.slot


def resolve_spans(annotations: list[Annotation]) -> list[Annotation]:
    """Drop overlapping annotations: longer spans win, then slot priority.

    Ambiguous-person pairs and year bound pairs share their span by design
    and are kept together.
    """
    ordered = sorted(
        annotations,
        key=lambda a: (-(a.end - a.start), -a.priority(), a.start, a.slot.value),
    )
    kept: list[Annotation] = []
    for annotation in ordered:
        conflict = any(
            _overlaps(annotation.span, other.span) and not _exempt(annotation, other)
            for other in kept
        )
        if conflict:
            logger.debug("span conflict, dropping %s", annotation)
            continue
        kept.append(annotation)
    kept.sort(key=lambda a: (a.start, -a.priority(), a.op.value))
    return kept
