"""Shared generators for randomized tests.

Cases built here are flat: every argument is an entity or an attribute
symbol, never a nested compound.  That keeps the exhaustive matching
oracle tractable while still exercising the full correspondence logic.
"""

from __future__ import annotations

import random

from groundschool.facts import Case, Fact, entity, percept, predicate

ATTRS = tuple(percept(n) for n in ("CVRed", "CVBlue", "CVGreen", "CVBox", "CVSphere"))
PREDS = tuple(predicate(n) for n in ("isa", "dc", "left", "near", "held"))


def random_flat_case(
    rng: random.Random,
    max_facts: int = 6,
    entity_names: tuple[str, ...] = ("a", "b", "c", "d"),
) -> Case:
    pool = tuple(entity(n) for n in entity_names)
    facts = set()
    for _ in range(rng.randint(1, max_facts)):
        pred = rng.choice(PREDS)
        if pred.name == "isa":
            facts.add(Fact(pred, (rng.choice(pool), rng.choice(ATTRS))))
        elif pred.name == "held":
            facts.add(Fact(pred, (rng.choice(pool),)))
        else:
            a, b = rng.choice(pool), rng.choice(pool)
            facts.add(Fact(pred, (a, b)))
    return Case(facts)
