"""Item catalog: ingestion, validation, lexicons, and constraint filtering.

The catalog is loaded once from a newline-delimited JSON file (see
docs/catalog_format.md), validated, and then treated as immutable: every
query here is read-only and safe for any number of concurrent readers.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Iterator

from .acts import (
    LEXICON_SLOTS,
    Constraint,
    Operator,
    SlotName,
    canonical_value,
)
from .errors import CatalogError, LexiconSlotError
from .state import InformationNeed

logger = logging.getLogger(__name__)

# Attributes without which an item is dropped at load time.
ESSENTIAL_FIELDS = ("id", "title", "genres", "release_year", "rating")

YEAR_RANGE = (1870, 2100)
RATING_RANGE = (0.0, 10.0)


@dataclass(frozen=True)
class Item:
    id: str
    title: str
    genres: frozenset[str]
    keywords: frozenset[str]
    actors: frozenset[str]
    directors: frozenset[str]
    release_year: int
    duration: int
    rating: float
    votes: int
    plot: str
    item_url: str
    cover_url: str


@dataclass(frozen=True)
class LoadReport:
    kept: int
    dropped: int
    malformed: int
    diagnostics: tuple[str, ...] = ()

    def summary(self) -> dict[str, int]:
        return {"kept": self.kept, "dropped": self.dropped, "malformed": self.malformed}


def _ranking_key(item: Item) -> tuple[float, int, str]:
    # Canonical order: rating desc, votes desc, id asc. Total and
    # deterministic because ids are unique.
    return (-item.rating, -item.votes, item.id)


class Catalog:
    """Immutable item collection with slot-indexed lexicons."""

    def __init__(
        self,
        items: list[Item],
        genre_synonyms: dict[str, set[str]] | None = None,
        display_names: dict[str, str] | None = None,
    ):
        if not items:
            raise CatalogError("catalog has no items")
        self._items = {item.id: item for item in items}
        self._ranked_ids = tuple(i.id for i in sorted(items, key=_ranking_key))
        self._lexicons: dict[SlotName, frozenset[str]] = {
            SlotName.GENRES: frozenset(v for i in items for v in i.genres),
            SlotName.KEYWORDS: frozenset(v for i in items for v in i.keywords),
            SlotName.ACTORS: frozenset(v for i in items for v in i.actors),
            SlotName.DIRECTORS: frozenset(v for i in items for v in i.directors),
            SlotName.TITLE: frozenset(canonical_value(i.title) for i in items),
        }
        # Only synonyms whose target genre actually occurs are kept.
        self.genre_synonyms: dict[str, frozenset[str]] = {}
        for genre, synonyms in (genre_synonyms or {}).items():
            genre = canonical_value(genre)
            if genre in self._lexicons[SlotName.GENRES]:
                self.genre_synonyms[genre] = frozenset(canonical_value(s) for s in synonyms)
            else:
                logger.warning("dropping synonyms for unknown genre %r", genre)
        # Display forms for NLG (canonical -> as written in the data).
        self._display: dict[str, str] = dict(display_names or {})

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, item_id: str) -> bool:
        return item_id in self._items

    @property
    def items(self) -> dict[str, Item]:
        return self._items

    @property
    def ranked_ids(self) -> tuple[str, ...]:
        return self._ranked_ids

    def get(self, item_id: str) -> Item:
        return self._items[item_id]

    def display_name(self, canonical: str) -> str:
        return self._display.get(canonical, canonical.title())


def _canonical_set(values: Iterable[str]) -> frozenset[str]:
    return frozenset(canonical_value(v) for v in values if str(v).strip())


def _display_pairs(record: dict) -> dict[str, str]:
    pairs = {}
    for field_name in ("actors", "directors"):
        for name in record.get(field_name, []) or []:
            raw = str(name).strip()
            if raw:
                pairs.setdefault(canonical_value(raw), raw)
    return pairs


def _parse_record(record: dict, line_no: int) -> tuple[Item | None, str | None]:
    """Returns (item, None), (None, reason) for a drop, and raises ValueError
    for a malformed record."""
    if not isinstance(record, dict):
        raise ValueError("record is not an object")
    for name in ESSENTIAL_FIELDS:
        value = record.get(name)
        if value is None or value == "" or value == []:
            return None, f"line {line_no}: missing essential attribute {name!r}"
    item_id = str(record["id"])
    try:
        release_year = int(record["release_year"])
        rating = float(record["rating"])
        duration = int(record.get("duration", 0))
        votes = int(record.get("votes", 0))
    except (TypeError, ValueError) as exc:
        raise ValueError(f"non-numeric field: {exc}") from exc
    if not (YEAR_RANGE[0] <= release_year <= YEAR_RANGE[1]):
        return None, f"line {line_no}: release_year {release_year} out of range"
    if not (RATING_RANGE[0] <= rating <= RATING_RANGE[1]):
        return None, f"line {line_no}: rating {rating} out of range"
    genres = _canonical_set(record["genres"])
    if not genres:
        return None, f"line {line_no}: missing essential attribute 'genres'"
    item = Item(
        id=item_id,
        title=str(record["title"]),
        genres=genres,
        keywords=_canonical_set(record.get("keywords", [])),
        actors=_canonical_set(record.get("actors", [])),
        directors=_canonical_set(record.get("directors", [])),
        release_year=release_year,
        duration=duration,
        rating=rating,
        votes=votes,
        plot=str(record.get("plot", "")),
        item_url=str(record.get("item_url", "")),
        cover_url=str(record.get("cover_url", "")),
    )
    return item, None


def load_catalog(
    source: str | Path | IO[str] | Iterable[str],
    synonyms: dict[str, set[str]] | None = None,
) -> tuple[Catalog, LoadReport]:
    """Read newline-delimited item records, dropping incomplete ones.

    Items missing an essential attribute are dropped and counted; lines that
    are not valid records are skipped with a per-line diagnostic. An empty
    result is a fatal error.
    """
    if isinstance(source, (str, Path)):
        try:
            lines: Iterable[str] = Path(source).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise CatalogError(f"cannot read catalog {source}: {exc}") from exc
    else:
        lines = source

    items: list[Item] = []
    seen_ids: set[str] = set()
    display_names: dict[str, str] = {}
    dropped = 0
    malformed = 0
    diagnostics: list[str] = []
    for line_no, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
            item, drop_reason = _parse_record(record, line_no)
        except (json.JSONDecodeError, ValueError) as exc:
            malformed += 1
            diagnostics.append(f"line {line_no}: malformed record ({exc})")
            continue
        if item is None:
            dropped += 1
            diagnostics.append(drop_reason or f"line {line_no}: dropped")
            continue
        if item.id in seen_ids:
            malformed += 1
            diagnostics.append(f"line {line_no}: duplicate id {item.id!r}, keeping first")
            continue
        seen_ids.add(item.id)
        items.append(item)
        for canon, raw in _display_pairs(record).items():
            display_names.setdefault(canon, raw)

    if not items:
        raise CatalogError("no usable items in catalog source")
    report = LoadReport(len(items), dropped, malformed, tuple(diagnostics))
    logger.info("catalog loaded: %s", report.summary())
    for diag in diagnostics:
        logger.warning("catalog: %s", diag)
    return Catalog(items, synonyms, display_names), report


def load_genre_synonyms(path: str | Path) -> dict[str, set[str]]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return {genre: set(values) for genre, values in data.items()}


def default_catalog() -> tuple[Catalog, LoadReport]:
    """The bundled desk-scale sample catalog with its synonym table."""
    data = resources.files("cinebot").joinpath("data")
    synonyms = json.loads(data.joinpath("genre_synonyms.json").read_text(encoding="utf-8"))
    lines = data.joinpath("sample_catalog.jsonl").read_text(encoding="utf-8").splitlines()
    return load_catalog(lines, {g: set(v) for g, v in synonyms.items()})


def _satisfies(item: Item, constraint: Constraint) -> bool:
    slot, op, value = constraint.slot, constraint.op, constraint.value
    if slot in (SlotName.GENRES, SlotName.KEYWORDS, SlotName.ACTORS, SlotName.DIRECTORS):
        values: frozenset[str] = getattr(item, slot.value)
        return (value in values) if op is Operator.EQ else (value not in values)
    if slot is SlotName.TITLE:
        title = canonical_value(item.title)
        return (title == value) if op is Operator.EQ else (title != value)
    if slot is SlotName.PLOT:
        plot = canonical_value(item.plot)
        contained = str(value) in plot
        return contained if op is Operator.EQ else not contained
    actual: float = getattr(item, slot.value)
    if op is Operator.EQ:
        return actual == value
    if op is Operator.NEQ:
        return actual != value
    if op is Operator.LT:
        return actual < value
    if op is Operator.GT:
        return actual > value
    if op is Operator.LEQ:
        return actual <= value
    return actual >= value


def matches(item: Item, in_: InformationNeed) -> bool:
    """True when the item satisfies every constraint of every slot.

    Within a multi-valued slot, EQ constraints are conjunctive containment
    (asking for romance and comedy requires both); dont-care slots hold no
    constraints and therefore never narrow anything.
    """
    return all(_satisfies(item, c) for c in in_.as_constraints())


def _matching_items(catalog: Catalog, in_: InformationNeed) -> Iterator[Item]:
    constraints = in_.as_constraints()
    for item_id in catalog.ranked_ids:
        item = catalog.get(item_id)
        if all(_satisfies(item, c) for c in constraints):
            yield item


def filter_items(catalog: Catalog, in_: InformationNeed) -> list[str]:
    """Ids of all items satisfying the need, in canonical ranking order."""
    return [item.id for item in _matching_items(catalog, in_)]


def count_items(catalog: Catalog, in_: InformationNeed) -> int:
    """len(filter_items(...)) without materializing the ranked list."""
    return sum(1 for _ in _matching_items(catalog, in_))


def lexicon(catalog: Catalog, slot: SlotName) -> frozenset[str]:
    """The canonical value set for a lexicon-bearing slot."""
    if slot not in LEXICON_SLOTS:
        raise LexiconSlotError(f"slot {slot.value} carries no lexicon")
    return catalog._lexicons[slot]
