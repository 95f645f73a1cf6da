#!/usr/bin/env python3
"""Build information needs by hand and query the catalog with them.

    python demos/02_filtering_the_catalog.py
"""

from cinebot.acts import Constraint, Operator, SlotName, UserIntent, user_act
from cinebot.catalog import count_items, default_catalog, filter_items, lexicon
from cinebot.nlg import summarize_in
from cinebot.state import InformationNeed, apply_user_act, preference_count

catalog, _ = default_catalog()

# The information need accumulates (slot, operator, value) preferences.
need = InformationNeed()
need = apply_user_act(
    need,
    user_act(
        UserIntent.REVEAL,
        [
            Constraint(SlotName.GENRES, Operator.EQ, "romance"),
            Constraint(SlotName.GENRES, Operator.EQ, "comedy"),
            Constraint(SlotName.ACTORS, Operator.EQ, "Meryl Streep"),
            Constraint(SlotName.RELEASE_YEAR, Operator.GEQ, 1990),
            Constraint(SlotName.RELEASE_YEAR, Operator.LT, 2000),
        ],
    ),
)
print("recap:", summarize_in(need, catalog))
print("constrained slots:", preference_count(need))

matches = filter_items(catalog, need)
print(f"\n{len(matches)} match(es):")
for item_id in matches:
    item = catalog.get(item_id)
    print(f"  {item.title} ({item.release_year})  rating {item.rating}")

# Multi-valued EQ constraints are conjunctive: romance AND comedy.
# Dropping one widens the result set again.
relaxed = apply_user_act(
    need,
    user_act(
        UserIntent.REMOVE_PREFERENCE,
        [Constraint(SlotName.GENRES, Operator.EQ, "comedy")],
    ),
)
print("\nwithout the comedy requirement:", count_items(catalog, relaxed), "matches")

# Counting queries skip list materialization; handy for the policy's
# "too many results" disclosure.
action_only = apply_user_act(
    InformationNeed(),
    user_act(UserIntent.REVEAL, [Constraint(SlotName.GENRES, Operator.EQ, "action")]),
)
print("action movies in the catalog:", count_items(catalog, action_only))

# Lexicons power the NLU; genres also have a synonym table.
print("\ngenre lexicon:", ", ".join(sorted(lexicon(catalog, SlotName.GENRES))))
print("synonyms for sci-fi:", sorted(catalog.genre_synonyms.get("sci-fi", ())))
