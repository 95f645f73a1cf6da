"""Deterministic rule-based tokenizer and lemmatizer.

Both user utterances and lexicon entries pass through the same rules, so the
occasional linguistic imperfection cancels out: matching only requires the
two sides to agree. Irregular forms live in a small bundled exception table.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

_TOKEN_RE = re.compile(r"[\w']+", re.UNICODE)
_VOWELS = set("aeiou")


@lru_cache(maxsize=1)
def _exceptions() -> dict[str, str]:
    text = resources.files("cinebot").joinpath("data/lemma_exceptions.json").read_text("utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    start: int
    end: int


def _undouble(word: str) -> str:
    if len(word) >= 2 and word[-1] == word[-2] and word[-1] not in _VOWELS:
        return word[:-1]
    return word


def lemma(word: str) -> str:
    """Lemma of a single token: lowercase, plural and -ing/-ed stripping."""
    w = word.casefold()
    exc = _exceptions()
    if w in exc:
        return w if w == exc[w] else lemma(exc[w])
    if w.endswith("'s"):
        w = w[:-2]
        if w in exc:
            return exc[w]
    # plural endings
    if w.endswith("ies") and len(w) > 4:
        w = w[:-3] + "y"
    elif w.endswith("es") and len(w) > 3 and (
        w[:-2].endswith(("s", "x", "z", "ch", "sh", "o"))
    ):
        w = w[:-2]
    elif w.endswith("s") and len(w) > 3 and not w.endswith(("ss", "us", "is")):
        w = w[:-1]
    if w in exc:
        return exc[w]
    # participle endings
    if w.endswith("ing") and len(w) > 5:
        w = _undouble(w[:-3])
    elif w.endswith("ed") and len(w) > 4:
        w = _undouble(w[:-2])
    return w


def lemmatize(utterance: str) -> list[Token]:
    """Tokens with original character offsets preserved."""
    tokens: list[Token] = []
    for match in _TOKEN_RE.finditer(utterance):
        surface = match.group(0)
        start, end = match.start(), match.end()
        # trim stray apostrophes so "'90s" and "movie'" tokenize cleanly
        while surface.startswith("'"):
            surface, start = surface[1:], start + 1
        while surface.endswith("'"):
            surface, end = surface[:-1], end - 1
        if not surface:
            continue
        tokens.append(Token(surface, lemma(surface), start, end))
    return tokens


def lemma_key(phrase: str) -> str:
    """Lemmatized phrase used as a lookup key: lemmas joined by one space."""
    return " ".join(t.lemma for t in lemmatize(phrase))
