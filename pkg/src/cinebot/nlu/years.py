"""Release-year expression parsing: decades, exact years, centuries, bounds."""

from __future__ import annotations

import re

from ..acts import Operator, SlotName
from .slots import Annotation

_DECADE_FULL = re.compile(r"\b(1[89]\d{2}|20\d{2})s\b")
_DECADE_SHORT = re.compile(r"\b(\d)0s\b")
_CENTURY = re.compile(r"\b(\d{1,2})(?:st|nd|rd|th)[ \t]+century\b", re.IGNORECASE)
_YEAR = re.compile(r"\b(1[89]\d{2}|20\d{2})\b")
_BETWEEN = re.compile(
    r"\bbetween[ \t]+(1[89]\d{2}|20\d{2})[ \t]+and[ \t]+(1[89]\d{2}|20\d{2})\b",
    re.IGNORECASE,
)
_WORD = re.compile(r"[a-z']+")

# modifier word -> (op for an exact year, (lo_op, hi_op) replacement for a range)
_MODIFIERS = {
    "before": Operator.LT,
    "after": Operator.GT,
    "since": Operator.GEQ,
    "until": Operator.LEQ,
}


def _preceding_modifier(utterance: str, start: int) -> str | None:
    words = _WORD.findall(utterance[:start].lower())
    for word in reversed(words[-3:]):
        if word in _MODIFIERS:
            return word
        if word not in ("the", "a", "year"):
            return None
    return None


def _range_annotations(
    span: tuple[int, int], lo: int, hi: int, modifier: str | None
) -> list[Annotation]:
    """[lo, hi) by default; 'before' keeps only the lower bound as an upper
    limit, 'after' flips to everything from the range's end on."""
    start, end = span
    make = lambda op, value: Annotation(  # noqa: E731
        SlotName.RELEASE_YEAR, op, value, start, end, "year_pattern"
    )
    if modifier == "before":
        return [make(Operator.LT, lo)]
    if modifier == "after":
        return [make(Operator.GEQ, hi)]
    if modifier == "since":
        return [make(Operator.GEQ, lo)]
    if modifier == "until":
        return [make(Operator.LT, hi)]
    return [make(Operator.GEQ, lo), make(Operator.LT, hi)]


def parse_year_expression(
    utterance: str, two_digit_decade_century: int = 1900
) -> list[Annotation]:
    """All release-year annotations found in the utterance.

    Unparseable temporal text yields nothing. Bare two-digit decades ("90s")
    resolve into ``two_digit_decade_century``.
    """
    annotations: list[Annotation] = []
    claimed: list[tuple[int, int]] = []

    def claim(start: int, end: int) -> bool:
        if any(start < e and s < end for s, e in claimed):
            return False
        claimed.append((start, end))
        return True

    for m in _BETWEEN.finditer(utterance):
        if not claim(m.start(), m.end()):
            continue
        lo, hi = int(m.group(1)), int(m.group(2))
        annotations.append(
            Annotation(SlotName.RELEASE_YEAR, Operator.GEQ, lo, m.start(), m.end(), "year_pattern")
        )
        annotations.append(
            Annotation(SlotName.RELEASE_YEAR, Operator.LEQ, hi, m.start(), m.end(), "year_pattern")
        )

    for m in _CENTURY.finditer(utterance):
        if not claim(m.start(), m.end()):
            continue
        nth = int(m.group(1))
        lo = (nth - 1) * 100
        annotations.extend(
            _range_annotations((m.start(), m.end()), lo, lo + 100, _preceding_modifier(utterance, m.start()))
        )

    for m in _DECADE_FULL.finditer(utterance):
        if not claim(m.start(), m.end()):
            continue
        lo = int(m.group(1))
        annotations.extend(
            _range_annotations((m.start(), m.end()), lo, lo + 10, _preceding_modifier(utterance, m.start()))
        )

    for m in _DECADE_SHORT.finditer(utterance):
        if not claim(m.start(), m.end()):
            continue
        lo = two_digit_decade_century + int(m.group(1)) * 10
        annotations.extend(
            _range_annotations((m.start(), m.end()), lo, lo + 10, _preceding_modifier(utterance, m.start()))
        )

    for m in _YEAR.finditer(utterance):
        if not claim(m.start(), m.end()):
            continue
        year = int(m.group(1))
        modifier = _preceding_modifier(utterance, m.start())
        op = _MODIFIERS.get(modifier or "", Operator.EQ)
        annotations.append(
            Annotation(SlotName.RELEASE_YEAR, op, year, m.start(), m.end(), "year_pattern")
        )

    annotations.sort(key=lambda a: (a.start, a.op.value))
    return annotations
