"""Trainer-side evaluation harness: seeded teaching trials with exams.

Each trial teaches one concept family through inform lessons and measures,
after every lesson, a fixed exam battery: five verify lessons on scenes that
contain the probed concept (generality) and five on scenes that do not
(specificity).  Per-lesson store counts and both scores are averaged across
trials into learning curves.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .agent import DemonstrationScript, Lesson, Signal, TabletopAgent
from .errors import ConfigError
from .memory import ConceptKind
from .world import (
    COLOR_WORDS,
    PickUp,
    Place,
    SHAPE_WORDS,
    SceneSnapshot,
    WorldObject,
    compute_cdc,
    compute_rcc8,
    make_object,
    sample_point,
)

# The trainer shares the camera frame: "left of" is toward +x (east),
# "behind" is away from the viewer (+y, north).
RELATION_SEMANTICS: dict[str, tuple[str, str]] = {
    "left of": ("e", "dc"),
    "right of": ("w", "dc"),
    "behind": ("n", "dc"),
    "in front of": ("s", "dc"),
}
_OCTANTS = ("n", "ne", "e", "se", "s", "sw", "w", "nw")

DEFAULT_COLORS = tuple(COLOR_WORDS)
DEFAULT_SHAPES = tuple(SHAPE_WORDS)
DEFAULT_RELATIONS = tuple(RELATION_SEMANTICS)

_DEFAULT_LESSONS = {ConceptKind.VISUAL: 25, ConceptKind.SPATIAL: 30, ConceptKind.ACTION: 30}
_DEFAULT_TRIALS = {ConceptKind.VISUAL: 10, ConceptKind.SPATIAL: 10, ConceptKind.ACTION: 5}


@dataclass(frozen=True)
class TrialConfig:
    kind: ConceptKind
    colors: tuple[str, ...] = DEFAULT_COLORS
    shapes: tuple[str, ...] = DEFAULT_SHAPES
    relations: tuple[str, ...] = DEFAULT_RELATIONS
    verb: str = "move"
    lessons: int | None = None
    trials: int | None = None
    exam_size: int = 5
    max_distractors: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        unknown = [c for c in self.colors if c not in COLOR_WORDS]
        unknown += [s for s in self.shapes if s not in SHAPE_WORDS]
        unknown += [r for r in self.relations if r not in RELATION_SEMANTICS]
        if unknown:
            raise ConfigError(f"unknown vocabulary entries: {unknown}")
        if not self.colors or not self.shapes:
            raise ConfigError("need at least one color and one shape")
        if self.kind != ConceptKind.VISUAL:
            if not self.relations:
                raise ConfigError("spatial and action curricula need relations")
            # pair lessons name two objects; distinct colors keep them apart
            if len(self.colors) < 2:
                raise ConfigError("pair lessons need at least two colors")
        if self.exam_size < 1 or self.max_distractors < 0:
            raise ConfigError("exam_size must be >= 1 and max_distractors >= 0")

    @property
    def lesson_count(self) -> int:
        return self.lessons if self.lessons is not None else _DEFAULT_LESSONS[self.kind]

    @property
    def trial_count(self) -> int:
        return self.trials if self.trials is not None else _DEFAULT_TRIALS[self.kind]


@dataclass(frozen=True)
class LessonRecord:
    lesson: int
    stores: int
    creates: int
    generality: int
    specificity: int


@dataclass
class TrialRecord:
    trial: int
    seed: int
    lessons: list[LessonRecord] = field(default_factory=list)
    memory_snapshot: dict | None = None


@dataclass
class ExperimentResult:
    config: TrialConfig
    records: list[TrialRecord]

    def curves(self) -> list[dict]:
        out = []
        n = len(self.records)
        for i in range(self.config.lesson_count):
            rows = [r.lessons[i] for r in self.records]
            out.append(
                {
                    "lesson": i + 1,
                    "mean_stores": sum(r.stores for r in rows) / n,
                    "mean_generality": sum(r.generality for r in rows) / n,
                    "mean_specificity": sum(r.specificity for r in rows) / n,
                }
            )
        return out


# ---------------------------------------------------------------------------
# Attribute scheduling
# ---------------------------------------------------------------------------


class _FeatureCycle:
    """Shuffled without-replacement draws, reshuffling when the pool empties.

    Guarantees the first len(items) draws are all distinct, which is what
    drives incidental attributes below the probability threshold after the
    second teaching example of a concept.
    """

    def __init__(self, rng: random.Random, items: Sequence):
        self.rng = rng
        self.items = list(items)
        self.pool: list = []

    def draw(self, exclude: Iterable = ()):
        banned = set(exclude)
        if not self.pool or all(v in banned for v in self.pool):
            self.pool = list(self.items)
            self.rng.shuffle(self.pool)
        for i, v in enumerate(self.pool):
            if v not in banned:
                return self.pool.pop(i)
        return self.pool.pop(0)


_OPPOSITE_OCTANT = {
    "n": "s", "s": "n", "e": "w", "w": "e",
    "ne": "sw", "sw": "ne", "nw": "se", "se": "nw",
}


class _PairStreams:
    """Per-concept attribute schedule for lessons naming two objects.

    Consecutive lessons of one concept share no color or shape in any role
    and never mirror the starting direction.  Without that, two examples can
    merge with mover and anchor swapped: the swap drops the role-bearing
    facts below the probability threshold and the concept stops matching
    anything until later examples wash the accident out.
    """

    def __init__(self, rng: random.Random, colors, shapes):
        self.mover_color = _FeatureCycle(rng, colors)
        self.mover_shape = _FeatureCycle(rng, shapes)
        self.anchor_color = _FeatureCycle(rng, colors)
        self.anchor_shape = _FeatureCycle(rng, shapes)
        self.octants = _FeatureCycle(rng, _OCTANTS)
        self.prev_colors: set[str] = set()
        self.prev_shapes: set[str] = set()
        self.prev_octant: str | None = None

    def next_pair(self) -> tuple[tuple[str, str], tuple[str, str]]:
        mc = self.mover_color.draw(exclude=self.prev_colors)
        ms = self.mover_shape.draw(exclude=self.prev_shapes)
        ac = self.anchor_color.draw(exclude={mc, *self.prev_colors})
        sh = self.anchor_shape.draw(exclude=self.prev_shapes)
        self.prev_colors = {mc, ac}
        self.prev_shapes = {ms, sh}
        return (mc, ms), (ac, sh)

    def next_octant(self) -> str:
        banned = set()
        if self.prev_octant is not None:
            banned = {self.prev_octant, _OPPOSITE_OCTANT[self.prev_octant]}
        octant = self.octants.draw(exclude=banned)
        self.prev_octant = octant
        return octant


# ---------------------------------------------------------------------------
# Scene construction
# ---------------------------------------------------------------------------

_MARGIN = 0.8


def _random_position(rng: random.Random) -> tuple[float, float]:
    return (rng.uniform(_MARGIN, 10 - _MARGIN), rng.uniform(_MARGIN, 10 - _MARGIN))


def _central_position(rng: random.Random) -> tuple[float, float]:
    # anchors of relation scenes stay central so every octant has room
    return (rng.uniform(3.0, 7.0), rng.uniform(3.0, 7.0))


def _pick_attrs(rng: random.Random, colors, shapes, exclude=()) -> tuple[str, str]:
    while True:
        pair = (rng.choice(colors), rng.choice(shapes))
        if pair not in exclude:
            return pair


def _object(oid: str, attrs: tuple[str, str], pos: tuple[float, float]) -> WorldObject:
    color, shape = attrs
    return make_object(oid, shape, color, pos[0], pos[1])


def _place_related(
    rng: random.Random,
    anchor: WorldObject,
    relation_facts: set[str],
) -> tuple[float, float]:
    probe = SceneSnapshot((anchor,))
    return sample_point({anchor.obj_id: relation_facts}, probe, rng)


def _distractors(
    rng: random.Random,
    config: TrialConfig,
    start_index: int,
    exclude_attrs: Iterable[tuple[str, str]],
) -> list[WorldObject]:
    count = rng.randint(0, config.max_distractors)
    out = []
    for i in range(count):
        attrs = _pick_attrs(rng, config.colors, config.shapes, tuple(exclude_attrs))
        out.append(_object(f"d{start_index + i}", attrs, _random_position(rng)))
    return out


def _relation_holds(relation: str, target: WorldObject, anchor: WorldObject) -> bool:
    cdc, rcc8 = RELATION_SEMANTICS[relation]
    got_cdc = compute_cdc((target.x, target.y), (anchor.x, anchor.y))
    got_rcc8 = compute_rcc8(target.box(), anchor.box())
    return got_cdc == cdc and got_rcc8 == rcc8


# ---------------------------------------------------------------------------
# Exam construction (fixed per trial)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExamLesson:
    lesson: Lesson
    expect_success: bool


def _visual_exams(rng: random.Random, config: TrialConfig) -> list[ExamLesson]:
    words = list(config.colors) + list(config.shapes)
    exams: list[ExamLesson] = []
    for i in range(config.exam_size):
        word = rng.choice(words)
        is_color = word in COLOR_WORDS
        # generality: one object carrying the probed attribute, plus clutter
        attrs = (
            (word, rng.choice(config.shapes))
            if is_color
            else (rng.choice(config.colors), word)
        )
        objs = [_object(f"g{i}", attrs, _random_position(rng))]
        objs += _distractors(rng, config, 100 + 10 * i, [attrs])
        exams.append(ExamLesson(Lesson(word, Signal.VERIFY, SceneSnapshot(tuple(objs))), True))
    for i in range(config.exam_size):
        word = rng.choice(words)
        is_color = word in COLOR_WORDS
        if is_color:
            pool_colors = [c for c in config.colors if c != word]
            pool_shapes = list(config.shapes)
        else:
            pool_colors = list(config.colors)
            pool_shapes = [s for s in config.shapes if s != word]
        count = 1 + rng.randint(0, config.max_distractors)
        objs = [
            _object(
                f"s{i}x{j}",
                (rng.choice(pool_colors), rng.choice(pool_shapes)),
                _random_position(rng),
            )
            for j in range(count)
        ]
        probed = (COLOR_WORDS if is_color else SHAPE_WORDS)[word]
        for obj in objs:  # constructive ground truth: nothing matches the word
            assert probed not in (obj.color, obj.shape)
        exams.append(ExamLesson(Lesson(word, Signal.VERIFY, SceneSnapshot(tuple(objs))), False))
    return exams


def _spatial_pair_scene(
    rng: random.Random,
    config: TrialConfig,
    relation: str,
    truthful: bool,
    prefix: str,
) -> tuple[SceneSnapshot, str]:
    attrs1 = _pick_attrs(rng, config.colors, config.shapes)
    safe_colors = [c for c in config.colors if c != attrs1[0]]
    attrs2 = (rng.choice(safe_colors), rng.choice(config.shapes))
    anchor = _object(f"{prefix}b", attrs2, _central_position(rng))
    cdc, rcc8 = RELATION_SEMANTICS[relation]
    if truthful:
        wanted = {cdc, rcc8}
    else:
        wrong = rng.choice([o for o in _OCTANTS if o != cdc])
        wanted = {wrong, "dc"}
    pos = _place_related(rng, anchor, wanted)
    target = _object(f"{prefix}a", attrs1, pos)
    assert _relation_holds(relation, target, anchor) is truthful
    distractors = _distractors(rng, config, 200, [attrs1, attrs2])
    scene = SceneSnapshot(tuple([target, anchor, *distractors]))
    utterance = f"{attrs1[0]} {attrs1[1]} {relation} {attrs2[0]} {attrs2[1]}"
    return scene, utterance


def _spatial_exams(rng: random.Random, config: TrialConfig) -> list[ExamLesson]:
    exams: list[ExamLesson] = []
    for i in range(config.exam_size):
        relation = rng.choice(config.relations)
        scene, utterance = _spatial_pair_scene(rng, config, relation, True, f"ge{i}")
        exams.append(ExamLesson(Lesson(utterance, Signal.VERIFY, scene), True))
    for i in range(config.exam_size):
        relation = rng.choice(config.relations)
        scene, utterance = _spatial_pair_scene(rng, config, relation, False, f"se{i}")
        exams.append(ExamLesson(Lesson(utterance, Signal.VERIFY, scene), False))
    return exams


def _demo_script(
    rng: random.Random,
    config: TrialConfig,
    stated: str,
    achieved: str,
    prefix: str,
    attrs: tuple[tuple[str, str], tuple[str, str]] | None = None,
    start_octant: str | None = None,
    with_distractors: bool = True,
) -> tuple[DemonstrationScript, str]:
    """A two-primitive demonstration: the mover ends in `achieved` relation.

    The mover starts disconnected from the anchor in `start_octant` (random
    when unset); direction variety across demonstrations keeps the starting
    geometry from looking like part of the action's meaning.
    """
    if attrs is None:
        attrs1 = _pick_attrs(rng, config.colors, config.shapes)
        safe_colors = [c for c in config.colors if c != attrs1[0]]
        attrs2 = (rng.choice(safe_colors), rng.choice(config.shapes))
    else:
        attrs1, attrs2 = attrs
    anchor = _object(f"{prefix}n", attrs2, _central_position(rng))
    octant = start_octant or rng.choice(_OCTANTS)
    start = _place_related(rng, anchor, {octant, "dc"})
    mover = _object(f"{prefix}m", attrs1, start)
    distractors = (
        _distractors(rng, config, 300, [attrs1, attrs2]) if with_distractors else []
    )
    initial = SceneSnapshot(tuple([mover, anchor, *distractors]))

    cdc, rcc8 = RELATION_SEMANTICS[achieved]
    final_pos = _place_related(rng, anchor, {cdc, rcc8})
    placed = _object(f"{prefix}m", attrs1, final_pos)
    assert _relation_holds(achieved, placed, anchor)
    script = DemonstrationScript(initial, (PickUp(mover.obj_id), Place(final_pos)))
    utterance = f"{config.verb} {attrs1[0]} {attrs1[1]} {stated} {attrs2[0]} {attrs2[1]}"
    return script, utterance


def _action_exams(rng: random.Random, config: TrialConfig) -> list[ExamLesson]:
    exams: list[ExamLesson] = []
    for i in range(config.exam_size):
        relation = rng.choice(config.relations)
        script, utterance = _demo_script(rng, config, relation, relation, f"ga{i}")
        exams.append(ExamLesson(Lesson(utterance, Signal.VERIFY, script), True))
    for i in range(config.exam_size):
        stated = rng.choice(config.relations)
        achieved = rng.choice([r for r in config.relations if r != stated])
        script, utterance = _demo_script(rng, config, stated, achieved, f"sa{i}")
        exams.append(ExamLesson(Lesson(utterance, Signal.VERIFY, script), False))
    return exams


# ---------------------------------------------------------------------------
# Inform lessons
# ---------------------------------------------------------------------------


class _InformPlan:
    """Per-trial schedule of inform lessons.

    Concepts cycle in shuffled without-replacement sweeps so every concept is
    revisited with fresh partners; pure uniform sampling can starve a concept
    for a whole trial and stall the learning curve.
    """

    def __init__(self, rng: random.Random, config: TrialConfig):
        self.rng = rng
        self.config = config
        if config.kind == ConceptKind.VISUAL:
            self.combo = _FeatureCycle(rng, [(c, s) for c in config.colors for s in config.shapes])
        else:
            self.relation = _FeatureCycle(rng, config.relations)
            self.per_relation = {
                r: _PairStreams(random.Random(rng.randrange(1 << 30)), config.colors, config.shapes)
                for r in config.relations
            }

    def next_lesson(self, index: int) -> Lesson:
        kind = self.config.kind
        if kind == ConceptKind.VISUAL:
            color, shape = self.combo.draw()
            scene = SceneSnapshot((_object(f"i{index}", (color, shape), _random_position(self.rng)),))
            return Lesson(f"{color} {shape}", Signal.INFORM, scene)
        relation = self.relation.draw()
        streams = self.per_relation[relation]
        attrs1, attrs2 = streams.next_pair()
        if kind == ConceptKind.SPATIAL:
            anchor = _object(f"i{index}b", attrs2, _central_position(self.rng))
            cdc, rcc8 = RELATION_SEMANTICS[relation]
            pos = _place_related(self.rng, anchor, {cdc, rcc8})
            target = _object(f"i{index}a", attrs1, pos)
            assert _relation_holds(relation, target, anchor)
            scene = SceneSnapshot((target, anchor))
            return Lesson(
                f"{attrs1[0]} {attrs1[1]} {relation} {attrs2[0]} {attrs2[1]}",
                Signal.INFORM,
                scene,
            )
        script, utterance = _demo_script(
            self.rng,
            self.config,
            relation,
            relation,
            f"i{index}",
            attrs=(attrs1, attrs2),
            start_octant=streams.next_octant(),
            with_distractors=False,
        )
        return Lesson(utterance, Signal.INFORM, script)


# ---------------------------------------------------------------------------
# Prerequisites
# ---------------------------------------------------------------------------


def train_visual_vocabulary(
    agent: TabletopAgent, rng: random.Random, colors=DEFAULT_COLORS, shapes=DEFAULT_SHAPES
) -> None:
    combos = [(c, s) for c in colors for s in shapes]
    rng.shuffle(combos)
    for i, (color, shape) in enumerate(combos):
        scene = SceneSnapshot((_object(f"p{i}", (color, shape), _random_position(rng)),))
        agent.process_lesson(Lesson(f"{color} {shape}", Signal.INFORM, scene))


def train_spatial_vocabulary(
    agent: TabletopAgent,
    rng: random.Random,
    relations=DEFAULT_RELATIONS,
    colors=DEFAULT_COLORS,
    shapes=DEFAULT_SHAPES,
    rounds: int = 3,
) -> None:
    streams = {r: _PairStreams(random.Random(rng.randrange(1 << 30)), colors, shapes) for r in relations}
    for round_no in range(rounds):
        for relation in relations:
            attrs1, attrs2 = streams[relation].next_pair()
            anchor = _object(f"q{round_no}b", attrs2, _central_position(rng))
            cdc, rcc8 = RELATION_SEMANTICS[relation]
            pos = _place_related(rng, anchor, {cdc, rcc8})
            target = _object(f"q{round_no}a", attrs1, pos)
            scene = SceneSnapshot((target, anchor))
            agent.process_lesson(
                Lesson(
                    f"{attrs1[0]} {attrs1[1]} {relation} {attrs2[0]} {attrs2[1]}",
                    Signal.INFORM,
                    scene,
                )
            )


def prerequisite_snapshot(config: TrialConfig, seed: int) -> dict | None:
    """Pre-trained memory for the concept families the trial assumes known."""
    if config.kind == ConceptKind.VISUAL:
        return None
    agent = TabletopAgent(seed=seed)
    rng = random.Random(seed)
    train_visual_vocabulary(agent, rng, config.colors, config.shapes)
    if config.kind == ConceptKind.ACTION:
        train_spatial_vocabulary(agent, rng, config.relations, config.colors, config.shapes)
    return agent.snapshot()


# ---------------------------------------------------------------------------
# Trials and experiments
# ---------------------------------------------------------------------------


def run_trial(
    config: TrialConfig,
    trial_index: int,
    trial_seed: int,
    prereq: dict | None = None,
) -> TrialRecord:
    rng = random.Random(trial_seed)
    if prereq is None:
        agent = TabletopAgent(seed=trial_seed)
    else:
        agent = TabletopAgent.restore(prereq, seed=trial_seed)

    exam_builders = {
        ConceptKind.VISUAL: _visual_exams,
        ConceptKind.SPATIAL: _spatial_exams,
        ConceptKind.ACTION: _action_exams,
    }
    exams = exam_builders[config.kind](rng, config)
    plan = _InformPlan(rng, config)

    record = TrialRecord(trial=trial_index, seed=trial_seed)
    for i in range(config.lesson_count):
        lesson = plan.next_lesson(i)
        response = agent.process_lesson(lesson)
        generality = specificity = 0
        for exam in exams:
            outcome = agent.process_lesson(exam.lesson)
            if exam.expect_success:
                generality += 1 if outcome.ok else 0
            else:
                specificity += 1 if not outcome.ok else 0
        record.lessons.append(
            LessonRecord(
                lesson=i + 1,
                stores=response.stores,
                creates=response.creates,
                generality=generality,
                specificity=specificity,
            )
        )
    record.memory_snapshot = agent.snapshot()
    return record


def run_experiment(config: TrialConfig) -> ExperimentResult:
    base = random.Random(config.seed)
    prereq_seed = base.randrange(1 << 32)
    trial_seeds = [base.randrange(1 << 32) for _ in range(config.trial_count)]
    prereq = prerequisite_snapshot(config, prereq_seed)
    records = [run_trial(config, i, s, prereq) for i, s in enumerate(trial_seeds)]
    return ExperimentResult(config, records)


def export_curves(result: ExperimentResult, out_dir: str | Path) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    curves = result.curves()

    csv_path = out / "curves.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["lesson", "mean_stores", "mean_generality", "mean_specificity"]
        )
        writer.writeheader()
        writer.writerows(curves)

    json_path = out / "curves.json"
    payload = {
        "kind": result.config.kind.value,
        "trials": result.config.trial_count,
        "lessons": result.config.lesson_count,
        "seed": result.config.seed,
        "curves": curves,
    }
    json_path.write_text(json.dumps(payload, indent=2))

    paths = {"csv": csv_path, "json": json_path}
    for record in result.records:
        p = out / f"trial_{record.trial:02d}_memory.json"
        p.write_text(json.dumps(record.memory_snapshot, indent=2, sort_keys=True))
        paths[f"trial_{record.trial}"] = p
    return paths


# ---------------------------------------------------------------------------
# The scripted task demonstration
# ---------------------------------------------------------------------------


def train_demo_agent(seed: int = 11) -> TabletopAgent:
    """An agent ready for the scripted move task: vocabulary plus move-right-of."""
    agent = TabletopAgent(seed=seed)
    rng = random.Random(seed)
    train_visual_vocabulary(agent, rng)
    config = TrialConfig(kind=ConceptKind.ACTION, seed=seed)
    # consecutive demonstrations share no color, shape, or mirrored start
    # direction, so only the action skeleton survives generalization
    attr_pairs = [
        (("green", "box"), ("purple", "ball")),
        (("yellow", "cylinder"), ("blue", "cone")),
        (("red", "box"), ("green", "ball")),
    ]
    octants = ["n", "e", "sw"]
    for i, (attrs, octant) in enumerate(zip(attr_pairs, octants)):
        script, utterance = _demo_script(
            rng,
            config,
            "right of",
            "right of",
            f"t{i}",
            attrs=attrs,
            start_octant=octant,
            with_distractors=False,
        )
        agent.process_lesson(Lesson(utterance, Signal.INFORM, script))
    return agent


def demo_react_scene() -> SceneSnapshot:
    return SceneSnapshot(
        (
            make_object("o1", "cone", "blue", 6.5, 5.0),
            make_object("o2", "cylinder", "red", 4.0, 5.0),
        )
    )
