"""Convert MovieLens-style CSV exports into the catalog JSONL format.

Usage:
    python -m cinebot.movielens MOVIES.csv [RATINGS.csv] [TAGS.csv] -o out.jsonl

movies.csv must have movieId,title,genres (genres pipe-separated, title
usually ending in "(YYYY)"). ratings.csv (userId,movieId,rating,timestamp)
yields a 0-10 rating (mean of the 0.5-5 stars, doubled) and a vote count;
tags.csv (userId,movieId,tag,timestamp) fills the keywords. Records without
a parseable year or any rating are dropped, mirroring the loader's
essential-attribute rule. Cast and crew are not part of MovieLens exports,
so actors and directors come out empty unless you merge them from elsewhere.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from collections import Counter, defaultdict
from pathlib import Path

_TITLE_YEAR = re.compile(r"^(?P<title>.*?)\s*\((?P<year>\d{4})\)\s*$")


def _read_ratings(path: Path) -> dict[str, tuple[float, int]]:
    totals: dict[str, list[float]] = defaultdict(list)
    with path.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            totals[row["movieId"]].append(float(row["rating"]))
    return {
        movie_id: (round(2 * sum(values) / len(values), 1), len(values))
        for movie_id, values in totals.items()
    }


def _read_tags(path: Path, per_movie: int = 8) -> dict[str, list[str]]:
    counts: dict[str, Counter] = defaultdict(Counter)
    with path.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            tag = row["tag"].strip().lower()
            if tag:
                counts[row["movieId"]][tag] += 1
    return {
        movie_id: [tag for tag, _ in counter.most_common(per_movie)]
        for movie_id, counter in counts.items()
    }


def convert(
    movies_csv: Path,
    ratings_csv: Path | None,
    tags_csv: Path | None,
    out,
) -> tuple[int, int]:
    ratings = _read_ratings(ratings_csv) if ratings_csv else {}
    tags = _read_tags(tags_csv) if tags_csv else {}
    written = dropped = 0
    with movies_csv.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            movie_id = row["movieId"]
            match = _TITLE_YEAR.match(row["title"])
            rating = ratings.get(movie_id)
            if match is None or rating is None:
                dropped += 1
                continue
            genres = [g.strip().lower() for g in row["genres"].split("|")]
            genres = [g for g in genres if g and g != "(no genres listed)"]
            if not genres:
                dropped += 1
                continue
            record = {
                "id": f"ml{movie_id}",
                "title": match["title"],
                "genres": genres,
                "keywords": tags.get(movie_id, []),
                "actors": [],
                "directors": [],
                "release_year": int(match["year"]),
                "duration": 0,
                "rating": rating[0],
                "votes": rating[1],
                "plot": "",
                "item_url": f"https://movielens.org/movies/{movie_id}",
                "cover_url": "",
            }
            out.write(json.dumps(record, ensure_ascii=False) + "\n")
            written += 1
    return written, dropped


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("movies", type=Path, help="movies.csv")
    parser.add_argument("ratings", type=Path, nargs="?", help="ratings.csv")
    parser.add_argument("tags", type=Path, nargs="?", help="tags.csv")
    parser.add_argument("-o", "--output", type=Path, required=True)
    args = parser.parse_args(argv)
    with args.output.open("w", encoding="utf-8") as out:
        written, dropped = convert(args.movies, args.ratings, args.tags, out)
    print(f"wrote {written} records, dropped {dropped}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
