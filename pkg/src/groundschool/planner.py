"""Iterative-deepening planning over the primitive tabletop actions.

The planner searches for the shortest primitive sequence whose simulated
outcome satisfies a conjunction of qualitative goal facts.  Placement
positions are drawn by constraint-region sampling, so the search tree stays
tiny: pick-up branches over objects, place contributes a single sampled
position per node.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import PlanningFailure, PreconditionViolated, Unsatisfiable
from .facts import CDC_NAMES, Fact, RCC8_NAMES, Symbol, fact_key
from .world import Action, PickUp, Place, SceneSnapshot, apply_action, sample_point, state_facts

# Swapping the argument order of a directional relation flips it across the
# origin; topological relations are symmetric apart from the containment pair.
CDC_CONVERSE = {
    "n": "s", "s": "n", "e": "w", "w": "e",
    "ne": "sw", "sw": "ne", "nw": "se", "se": "nw",
}
RCC8_CONVERSE = {
    "dc": "dc", "ec": "ec", "po": "po", "eq": "eq",
    "tpp": "tppi", "tppi": "tpp", "ntpp": "ntppi", "ntppi": "ntpp",
}
_QSR_NAMES = set(RCC8_NAMES) | set(CDC_NAMES)


def converse(relation: str) -> str:
    if relation in CDC_CONVERSE:
        return CDC_CONVERSE[relation]
    if relation in RCC8_CONVERSE:
        return RCC8_CONVERSE[relation]
    raise KeyError(relation)


@dataclass(frozen=True)
class ActionModel:
    """Precondition/effect schema for one primitive.

    Simulation delegates to the world transition function, so the schema's
    qualitative consequences always agree with it; `effects` reports the
    actual add/delete fact sets for a concrete application.
    """

    name: str
    preconditions: tuple[str, ...]
    adds: tuple[str, ...]
    deletes: tuple[str, ...]

    def simulate(self, snapshot: SceneSnapshot, action: Action) -> SceneSnapshot:
        return apply_action(snapshot, action)

    def effects(self, snapshot: SceneSnapshot, action: Action) -> tuple[frozenset[Fact], frozenset[Fact]]:
        before = state_facts(snapshot).facts
        after = state_facts(self.simulate(snapshot, action)).facts
        return after - before, before - after


PICK_UP_MODEL = ActionModel(
    "pick-up",
    preconditions=("(hand-empty)", "(on-table ?o)"),
    adds=("(held ?o)",),
    deletes=("(?qsr ?o ?other)", "(?qsr ?other ?o)"),
)
PLACE_MODEL = ActionModel(
    "place",
    preconditions=("(held ?o)", "(in-bounds ?pos)"),
    adds=("(?qsr ?o ?other)", "(?qsr ?other ?o)"),
    deletes=("(held ?o)",),
)
POINT_MODEL = ActionModel(
    "point",
    preconditions=("(on-table ?o)",),
    adds=(),
    deletes=(),
)
ACTION_MODELS = {m.name: m for m in (PICK_UP_MODEL, PLACE_MODEL, POINT_MODEL)}


class Planner:
    def __init__(self, rng: random.Random | None = None, depth_cap: int = 4):
        self.rng = rng or random.Random(0)
        self.depth_cap = depth_cap

    def plan(self, snapshot: SceneSnapshot, goal: Iterable[Fact]) -> list[Action]:
        """Shortest primitive sequence reaching a state satisfying every goal fact."""
        wanted = frozenset(goal)
        for limit in range(self.depth_cap + 1):
            found = self._dfs(snapshot, wanted, limit)
            if found is not None:
                return found
        raise PlanningFailure(
            f"no plan within {self.depth_cap} steps for {len(wanted)} goal facts"
        )

    def _dfs(self, snapshot: SceneSnapshot, goal: frozenset[Fact], remaining: int) -> list[Action] | None:
        if goal <= state_facts(snapshot).facts:
            return []
        if remaining == 0:
            return None
        for action in self._proposals(snapshot, goal):
            try:
                nxt = apply_action(snapshot, action)
            except PreconditionViolated:
                continue
            tail = self._dfs(nxt, goal, remaining - 1)
            if tail is not None:
                return [action, *tail]
        return None

    def _proposals(self, snapshot: SceneSnapshot, goal: frozenset[Fact]) -> Iterator[Action]:
        held = snapshot.held_object()
        if held is None:
            unsat = goal - state_facts(snapshot).facts
            movers = []
            for fact in sorted(unsat, key=fact_key):
                if fact.args and isinstance(fact.args[0], Symbol):
                    movers.append(fact.args[0])
            seen: set[Symbol] = set()
            ordered = [m for m in movers if not (m in seen or seen.add(m))]
            rest = sorted(
                (o.obj_id for o in snapshot.objects if o.obj_id not in seen),
                key=lambda s: s.name,
            )
            for obj_id in [*ordered, *rest]:
                try:
                    snapshot.get(obj_id)
                except KeyError:
                    continue
                yield PickUp(obj_id)
            return

        constraints = self._placement_constraints(held.obj_id, goal)
        try:
            pos = sample_point(
                constraints, snapshot, self.rng, (held.half_w, held.half_h)
            )
        except (Unsatisfiable, KeyError):
            return
        yield Place(pos)

    def _placement_constraints(self, held_id: Symbol, goal: frozenset[Fact]) -> dict[Symbol, set[str]]:
        constraints: dict[Symbol, set[str]] = {}
        for fact in goal:
            name = fact.predicate.name
            if name not in _QSR_NAMES or len(fact.args) != 2:
                continue
            a, b = fact.args
            if not (isinstance(a, Symbol) and isinstance(b, Symbol)):
                continue
            if a == held_id and b != held_id:
                constraints.setdefault(b, set()).add(name)
            elif b == held_id and a != held_id:
                constraints.setdefault(a, set()).add(converse(name))
        return constraints
