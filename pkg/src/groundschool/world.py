"""A 2-D top-down tabletop with qualitative spatial relations.

Objects are axis-aligned rectangles with ground-truth shape/color percepts.
Scene snapshots convert to fact cases: one isa fact per attribute and, for
every ordered pair of unheld objects, one cardinal-direction fact and one
RCC8 fact.  There is no physics: placements stay exactly where they are put,
which deliberately removes the scene-drift noise a physical simulation would
add to exam scores.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from .errors import Indeterminate, PreconditionViolated, Unsatisfiable
from .facts import (
    CDC_PREDICATES,
    Case,
    Fact,
    HELD,
    ISA,
    RCC8_PREDICATES,
    Symbol,
    entity,
    percept,
)

COLOR_WORDS: dict[str, Symbol] = {
    "green": percept("CVGreen"),
    "blue": percept("CVBlue"),
    "red": percept("CVRed"),
    "yellow": percept("CVYellow"),
    "purple": percept("CVPurple"),
}
SHAPE_WORDS: dict[str, Symbol] = {
    "box": percept("CVBox"),
    "cone": percept("CVCone"),
    "ball": percept("CVSphere"),
    "cylinder": percept("CVCylinder"),
}
_PERCEPT_TO_WORD = {sym.name: word for word, sym in (*COLOR_WORDS.items(), *SHAPE_WORDS.items())}

CDC_EPSILON = 1e-6


@dataclass(frozen=True)
class TableBounds:
    x_min: float = 0.0
    y_min: float = 0.0
    x_max: float = 10.0
    y_max: float = 10.0

    def contains_box(self, box: tuple[float, float, float, float]) -> bool:
        x0, y0, x1, y1 = box
        return self.x_min <= x0 and x1 <= self.x_max and self.y_min <= y0 and y1 <= self.y_max

    def contains_point(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max


@dataclass(frozen=True)
class WorldObject:
    obj_id: Symbol
    shape: Symbol
    color: Symbol
    x: float
    y: float
    half_w: float = 0.4
    half_h: float = 0.4
    held: bool = False

    def box(self) -> tuple[float, float, float, float]:
        return (self.x - self.half_w, self.y - self.half_h, self.x + self.half_w, self.y + self.half_h)


@dataclass(frozen=True)
class SceneSnapshot:
    objects: tuple[WorldObject, ...]
    bounds: TableBounds = TableBounds()

    def __post_init__(self) -> None:
        seen = set()
        for obj in self.objects:
            if obj.obj_id in seen:
                raise ValueError(f"duplicate object id {obj.obj_id.name}")
            seen.add(obj.obj_id)
            if not obj.held and not self.bounds.contains_box(obj.box()):
                raise ValueError(f"object {obj.obj_id.name} is off the table")
        if sum(1 for o in self.objects if o.held) > 1:
            raise ValueError("at most one object may be held")

    def get(self, obj_id: Symbol) -> WorldObject:
        for obj in self.objects:
            if obj.obj_id == obj_id:
                return obj
        raise KeyError(obj_id.name)

    def held_object(self) -> WorldObject | None:
        for obj in self.objects:
            if obj.held:
                return obj
        return None


# ---------------------------------------------------------------------------
# Qualitative calculi
# ---------------------------------------------------------------------------

def compute_rcc8(a: tuple[float, float, float, float], b: tuple[float, float, float, float]) -> str:
    """The unique RCC8 relation between two axis-aligned rectangles."""
    ax0, ay0, ax1, ay1 = a
    bx0, by0, bx1, by1 = b
    if a == b:
        return "eq"
    a_in_b = bx0 <= ax0 and ax1 <= bx1 and by0 <= ay0 and ay1 <= by1
    b_in_a = ax0 <= bx0 and bx1 <= ax1 and ay0 <= by0 and by1 <= ay1
    if a_in_b:
        boundary = ax0 == bx0 or ax1 == bx1 or ay0 == by0 or ay1 == by1
        return "tpp" if boundary else "ntpp"
    if b_in_a:
        boundary = ax0 == bx0 or ax1 == bx1 or ay0 == by0 or ay1 == by1
        return "tppi" if boundary else "ntppi"
    interiors = ax0 < bx1 and bx0 < ax1 and ay0 < by1 and by0 < ay1
    if interiors:
        return "po"
    closures = ax0 <= bx1 and bx0 <= ax1 and ay0 <= by1 and by0 <= ay1
    return "ec" if closures else "dc"


def compute_cdc(a: tuple[float, float], b: tuple[float, float]) -> str:
    """Cardinal direction of point a relative to point b.

    East is +x, north is +y.  Pure cardinal octants span an open 45-degree
    band (+/-22.5 around the axis); a displacement landing exactly on a band
    boundary belongs to the diagonal octant.
    """
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    if math.hypot(dx, dy) < CDC_EPSILON:
        raise Indeterminate("coincident positions have no direction")
    deg = math.degrees(math.atan2(dy, dx))
    if -22.5 < deg < 22.5:
        return "e"
    if 22.5 <= deg <= 67.5:
        return "ne"
    if 67.5 < deg < 112.5:
        return "n"
    if 112.5 <= deg <= 157.5:
        return "nw"
    if deg > 157.5 or deg < -157.5:
        return "w"
    if -157.5 <= deg <= -112.5:
        return "sw"
    if -112.5 < deg < -67.5:
        return "s"
    return "se"


# ---------------------------------------------------------------------------
# Scene conversion
# ---------------------------------------------------------------------------

def scene_to_case(snapshot: SceneSnapshot) -> Case:
    """Percept and spatial facts for a scene.

    Emits exactly two isa facts per object (color, shape) and, for each
    ordered pair of distinct unheld objects, one cardinal-direction fact and
    one RCC8 fact.  Held objects keep their isa facts but drop out of spatial
    relations entirely.
    """
    out: list[Fact] = []
    for obj in snapshot.objects:
        out.append(Fact(ISA, (obj.obj_id, obj.color)))
        out.append(Fact(ISA, (obj.obj_id, obj.shape)))
    placed = [o for o in snapshot.objects if not o.held]
    for a in placed:
        for b in placed:
            if a.obj_id == b.obj_id:
                continue
            out.append(Fact(CDC_PREDICATES[compute_cdc((a.x, a.y), (b.x, b.y))], (a.obj_id, b.obj_id)))
            out.append(Fact(RCC8_PREDICATES[compute_rcc8(a.box(), b.box())], (a.obj_id, b.obj_id)))
    return Case(out)


def state_facts(snapshot: SceneSnapshot) -> Case:
    """Scene facts plus held markers; the full qualitative state of the world."""
    extra = [Fact(HELD, (o.obj_id,)) for o in snapshot.objects if o.held]
    return scene_to_case(snapshot).union(extra)


# ---------------------------------------------------------------------------
# Constraint-region sampling
# ---------------------------------------------------------------------------

def sample_point(
    constraints: Mapping[Symbol, set[str]],
    snapshot: SceneSnapshot,
    rng: random.Random,
    half_extent: tuple[float, float] = (0.4, 0.4),
    max_draws: int = 10_000,
) -> tuple[float, float]:
    """Seeded rejection sampling of a placement satisfying relation constraints.

    `constraints` maps anchor object ids to the set of relation names (CDC
    and/or RCC8) that must hold of (placed, anchor).  Raises Unsatisfiable
    once the draw budget is spent.
    """
    hw, hh = half_extent
    b = snapshot.bounds
    lo_x, hi_x = b.x_min + hw, b.x_max - hw
    lo_y, hi_y = b.y_min + hh, b.y_max - hh
    if lo_x > hi_x or lo_y > hi_y:
        raise Unsatisfiable("object larger than the table")
    anchors = {aid: snapshot.get(aid) for aid in constraints}
    for _ in range(max_draws):
        x = rng.uniform(lo_x, hi_x)
        y = rng.uniform(lo_y, hi_y)
        box = (x - hw, y - hh, x + hw, y + hh)
        ok = True
        for aid, wanted in constraints.items():
            anchor = anchors[aid]
            got = {
                compute_cdc((x, y), (anchor.x, anchor.y)),
                compute_rcc8(box, anchor.box()),
            }
            if not wanted <= got:
                ok = False
                break
        if ok:
            return (x, y)
    raise Unsatisfiable(f"no placement satisfying {sorted(v for s in constraints.values() for v in s)} within {max_draws} draws")


# ---------------------------------------------------------------------------
# Primitive actions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PickUp:
    obj_id: Symbol


@dataclass(frozen=True)
class Place:
    position: tuple[float, float]


@dataclass(frozen=True)
class Point:
    obj_id: Symbol


Action = PickUp | Place | Point


def apply_action(snapshot: SceneSnapshot, action: Action) -> SceneSnapshot:
    """Pure state transition; raises PreconditionViolated on a bad action."""
    if isinstance(action, PickUp):
        if snapshot.held_object() is not None:
            raise PreconditionViolated("gripper already holds an object")
        snapshot.get(action.obj_id)  # existence check
        objects = tuple(replace(o, held=True) if o.obj_id == action.obj_id else o for o in snapshot.objects)
        return SceneSnapshot(objects, snapshot.bounds)
    if isinstance(action, Place):
        held = snapshot.held_object()
        if held is None:
            raise PreconditionViolated("nothing is held")
        x, y = action.position
        moved = replace(held, x=x, y=y, held=False)
        if not snapshot.bounds.contains_box(moved.box()):
            raise PreconditionViolated("placement is off the table")
        objects = tuple(moved if o.obj_id == held.obj_id else o for o in snapshot.objects)
        return SceneSnapshot(objects, snapshot.bounds)
    if isinstance(action, Point):
        snapshot.get(action.obj_id)  # must exist
        return snapshot
    raise TypeError(f"unknown action {action!r}")


# ---------------------------------------------------------------------------
# World container
# ---------------------------------------------------------------------------

class World:
    """Mutable wrapper holding the current snapshot and the perception layer.

    Percepts are ground truth unless a small corruption rate is configured,
    in which case observation occasionally swaps an attribute for a random
    wrong percept of the same family.
    """

    def __init__(
        self,
        snapshot: SceneSnapshot | None = None,
        percept_error_rate: float = 0.0,
        seed: int = 0,
    ):
        if not 0.0 <= percept_error_rate < 0.001:
            raise ValueError("percept error rate must stay below 0.1%")
        self.snapshot = snapshot or SceneSnapshot(())
        self.percept_error_rate = percept_error_rate
        self._rng = random.Random(seed)

    def set_scene(self, snapshot: SceneSnapshot) -> None:
        self.snapshot = snapshot

    def apply(self, action: Action) -> SceneSnapshot:
        self.snapshot = apply_action(self.snapshot, action)
        return self.snapshot

    def observe(self, snapshot: SceneSnapshot | None = None) -> SceneSnapshot:
        target = snapshot if snapshot is not None else self.snapshot
        if self.percept_error_rate <= 0.0:
            return target
        objects = []
        for obj in target.objects:
            color, shape = obj.color, obj.shape
            if self._rng.random() < self.percept_error_rate:
                color = self._rng.choice([c for c in COLOR_WORDS.values() if c != color])
            if self._rng.random() < self.percept_error_rate:
                shape = self._rng.choice([s for s in SHAPE_WORDS.values() if s != shape])
            objects.append(replace(obj, color=color, shape=shape))
        return SceneSnapshot(tuple(objects), target.bounds)


# ---------------------------------------------------------------------------
# Scene JSON
# ---------------------------------------------------------------------------

def make_object(
    obj_id: str,
    shape: str,
    color: str,
    x: float,
    y: float,
    half_w: float = 0.4,
    half_h: float = 0.4,
    held: bool = False,
) -> WorldObject:
    if shape not in SHAPE_WORDS:
        raise ValueError(f"unknown shape {shape!r}")
    if color not in COLOR_WORDS:
        raise ValueError(f"unknown color {color!r}")
    return WorldObject(entity(obj_id), SHAPE_WORDS[shape], COLOR_WORDS[color], x, y, half_w, half_h, held)


def snapshot_to_json(snapshot: SceneSnapshot) -> dict:
    return {
        "bounds": {
            "x_min": snapshot.bounds.x_min,
            "y_min": snapshot.bounds.y_min,
            "x_max": snapshot.bounds.x_max,
            "y_max": snapshot.bounds.y_max,
        },
        "objects": [
            {
                "id": o.obj_id.name,
                "shape": _PERCEPT_TO_WORD[o.shape.name],
                "color": _PERCEPT_TO_WORD[o.color.name],
                "x": o.x,
                "y": o.y,
                "w": o.half_w,
                "h": o.half_h,
                "held": o.held,
            }
            for o in snapshot.objects
        ],
    }


def snapshot_from_json(payload: Mapping) -> SceneSnapshot:
    bounds_payload = payload.get("bounds") or {}
    bounds = TableBounds(
        x_min=float(bounds_payload.get("x_min", 0.0)),
        y_min=float(bounds_payload.get("y_min", 0.0)),
        x_max=float(bounds_payload.get("x_max", 10.0)),
        y_max=float(bounds_payload.get("y_max", 10.0)),
    )
    objects = tuple(
        make_object(
            obj["id"],
            obj["shape"],
            obj["color"],
            float(obj["x"]),
            float(obj["y"]),
            float(obj.get("w", 0.4)),
            float(obj.get("h", 0.4)),
            bool(obj.get("held", False)),
        )
        for obj in payload.get("objects", [])
    )
    return SceneSnapshot(objects, bounds)


def snapshot_to_text(snapshot: SceneSnapshot) -> str:
    return json.dumps(snapshot_to_json(snapshot), indent=2, sort_keys=True)
