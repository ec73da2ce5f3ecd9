"""The interactive tabletop agent.

Ties the pieces together: utterances parse into references, references ground
against the current scene through the semantic map and concept memory,
lessons arrive with one of three signals (inform teaches, verify tests,
react acts), and action concepts replay through projection-driven planning.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .errors import NoProjection, PlanningFailure, SignalMismatch
from .facts import (
    Case,
    EpisodicTrace,
    Fact,
    ISA,
    Symbol,
    SymbolKind,
    fact_key,
    fact_terms,
    format_fact,
    make_trace,
    trace_to_case,
)
from .generalize import Thresholds
from .language import Grammar, ObjectRef, ParseResult
from .memory import ConceptKind, ConceptMemory, FactPattern, Variable
from .planner import Planner
from .world import (
    Action,
    PickUp,
    Place,
    Point,
    SceneSnapshot,
    World,
    apply_action,
    scene_to_case,
    state_facts,
)


class Signal(str, Enum):
    INFORM = "inform"
    VERIFY = "verify"
    REACT = "react"


@dataclass(frozen=True)
class DemonstrationScript:
    """An initial arrangement plus the primitives the trainer performs on it."""

    initial: SceneSnapshot
    actions: tuple[Action, ...]


Scenario = SceneSnapshot | DemonstrationScript


@dataclass(frozen=True)
class Lesson:
    content: str
    signal: Signal
    scenario: Scenario | None = None


@dataclass(frozen=True)
class LessonResponse:
    status: str  # "success" | "failure"
    detail: str
    creates: int = 0
    stores: int = 0
    plan: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.status == "success"


@dataclass(frozen=True)
class ComprehensionFailure:
    reason: str  # "unknown-word" | "ungrounded-ref" | "unsatisfiable-composition"
    word: str | None = None
    ref_id: str | None = None

    def describe(self) -> str:
        if self.reason == "unknown-word":
            return f"unknown word {self.word!r}"
        if self.reason == "ungrounded-ref":
            return f"nothing in the scene grounds reference {self.ref_id}"
        return "references cannot be grounded consistently"


@dataclass(frozen=True)
class Grounding:
    bindings: tuple[tuple[str, Symbol], ...]
    goal: frozenset[Fact] = frozenset()
    action: Symbol | None = None

    def binding(self, ref_id: str) -> Symbol:
        for rid, sym in self.bindings:
            if rid == ref_id:
                return sym
        raise KeyError(ref_id)


class SemanticMap:
    """Bidirectional word/concept association, tagged with the concept kind."""

    def __init__(self) -> None:
        self._by_word: dict[str, Symbol] = {}
        self._by_concept: dict[Symbol, str] = {}
        self._kinds: dict[Symbol, ConceptKind] = {}

    def add(self, word: str, concept: Symbol, kind: ConceptKind) -> None:
        if word in self._by_word or concept in self._by_concept:
            raise ValueError(f"association for {word!r}/{concept.name} already present")
        self._by_word[word] = concept
        self._by_concept[concept] = word
        self._kinds[concept] = kind

    def concept_for(self, word: str) -> Symbol | None:
        return self._by_word.get(word)

    def word_for(self, concept: Symbol) -> str | None:
        return self._by_concept.get(concept)

    def kind_for(self, concept: Symbol) -> ConceptKind:
        return self._kinds[concept]

    def words(self) -> tuple[str, ...]:
        return tuple(sorted(self._by_word))

    @classmethod
    def from_memory(cls, memory: ConceptMemory) -> "SemanticMap":
        out = cls()
        for word, concept in memory.words.items():
            out.add(word, concept, memory.kinds[concept])
        return out


def record_demonstration(script: DemonstrationScript) -> tuple[EpisodicTrace, list[SceneSnapshot]]:
    """Snapshot the qualitative state before, between, and after each primitive."""
    snapshots = [script.initial]
    current = script.initial
    for action in script.actions:
        current = apply_action(current, action)
        snapshots.append(current)
    states = [state_facts(s).facts for s in snapshots]
    trace = make_trace(states, final=len(states) > 1)
    return trace, snapshots


class TabletopAgent:
    """One learner: a grammar, a concept memory, a planner, and a table."""

    MAX_INFORM_ROUNDS = 6
    MAX_REACT_CYCLES = 8

    def __init__(
        self,
        thresholds: Thresholds | None = None,
        seed: int = 0,
        grammar: Grammar | None = None,
    ):
        self.memory = ConceptMemory(thresholds)
        self.grammar = grammar or Grammar()
        self.semantic_map = SemanticMap()
        self.rng = random.Random(seed)
        self.world = World()

    # -- lesson dispatch ----------------------------------------------------

    def process_lesson(self, lesson: Lesson) -> LessonResponse:
        parse = self.grammar.parse(lesson.content)
        scenario = lesson.scenario
        if lesson.signal == Signal.REACT:
            if not parse.act_refs:
                raise SignalMismatch("react lessons need an action utterance")
            return self._react(parse, scenario)
        if isinstance(scenario, DemonstrationScript):
            trace, snapshots = record_demonstration(scenario)
            self.world.set_scene(snapshots[-1])
            if lesson.signal == Signal.INFORM:
                return self._inform(parse, scenario.initial, trace)
            return self._verify_action(parse, scenario.initial, trace)
        if scenario is not None:
            self.world.set_scene(scenario)
        snapshot = self.world.snapshot
        if lesson.signal == Signal.INFORM:
            return self._inform(parse, snapshot, None)
        return self._verify(parse, snapshot)

    # -- comprehension ------------------------------------------------------

    def comprehend(self, parse: ParseResult, snapshot: SceneSnapshot) -> Grounding | ComprehensionFailure:
        """Ground every reference in the scene and compose the bindings."""
        scene = scene_to_case(self.world.observe(snapshot))
        return self._compose(parse, scene, trace_case=None)

    def _compose(
        self,
        parse: ParseResult,
        scene: Case,
        trace_case: Case | None,
    ) -> Grounding | ComprehensionFailure:
        candidates: dict[str, set[Symbol]] = {}
        for ref in parse.object_refs:
            got = self._ground_ref(ref, scene)
            if isinstance(got, ComprehensionFailure):
                return got
            candidates[ref.ref_id] = got

        if parse.act_refs:
            act = parse.act_refs[0]
            word = f"{act.act_name} {act.relation}"
            concept = self.semantic_map.concept_for(word)
            if concept is None:
                return ComprehensionFailure("unknown-word", word=word)
            if trace_case is None:
                # No demonstration to check against: compose from the scene
                # alone and carry the concept's own goal expectations.
                pair = self._pick_pair(candidates[act.arg1], candidates[act.arg2])
                if pair is None:
                    return ComprehensionFailure("unsatisfiable-composition")
                goal = self._action_goal(concept, pair[0], pair[1])
                if goal is None:
                    return ComprehensionFailure("unknown-word", word=word)
                bindings = ((act.arg1, pair[0]), (act.arg2, pair[1]))
                return Grounding(bindings, goal, concept)
            pattern = FactPattern(concept, (Variable("a"), Variable("b")))
            return self._compose_pair(
                trace_case, pattern, act.arg1, act.arg2, candidates, concept,
                is_action=True,
            )

        if parse.rel_refs:
            rel = parse.rel_refs[0]
            concept = self.semantic_map.concept_for(rel.rel_name)
            if concept is None:
                return ComprehensionFailure("unknown-word", word=rel.rel_name)
            pattern = FactPattern(concept, (Variable("a"), Variable("b")))
            return self._compose_pair(
                scene, pattern, rel.arg1, rel.arg2, candidates, concept,
                is_action=False,
            )

        ref = parse.object_refs[0]
        pool = candidates[ref.ref_id]
        chosen = min(pool, key=lambda s: s.name)
        return Grounding(((ref.ref_id, chosen),))

    def _ground_ref(self, ref: ObjectRef, scene: Case) -> set[Symbol] | ComprehensionFailure:
        pool: set[Symbol] | None = None
        for word in ref.properties:
            concept = self.semantic_map.concept_for(word)
            if concept is None:
                return ComprehensionFailure("unknown-word", word=word, ref_id=ref.ref_id)
            accepted = self._visual_accepted(scene, concept)
            pool = accepted if pool is None else pool & accepted
        if not pool:
            return ComprehensionFailure("ungrounded-ref", ref_id=ref.ref_id)
        return pool

    def _visual_accepted(self, scene: Case, concept: Symbol) -> set[Symbol]:
        result = self.memory.query(scene, FactPattern(ISA, (Variable("o"), concept)))
        out: set[Symbol] = set()
        for fact in result.accepted_facts():
            obj = fact.args[0]
            if isinstance(obj, Symbol):
                out.add(obj)
        return out

    def _compose_pair(
        self,
        target: Case,
        pattern: FactPattern,
        ref1: str,
        ref2: str,
        candidates: dict[str, set[Symbol]],
        concept: Symbol,
        is_action: bool,
    ) -> Grounding | ComprehensionFailure:
        result = self.memory.query(target, pattern)
        pairs: list[tuple[Symbol, Symbol]] = []
        for inf in result.accepted:
            # Accepted score is not enough: a grounded expectation the scene
            # fails to meet disqualifies the instantiation outright.
            if inf.unmet:
                continue
            a, b = inf.fact.args
            if not (isinstance(a, Symbol) and isinstance(b, Symbol)):
                continue
            if a in candidates[ref1] and b in candidates[ref2]:
                pairs.append((a, b))
        if not pairs:
            return ComprehensionFailure("unsatisfiable-composition")
        distinct = [p for p in pairs if p[0] != p[1]]
        pool = distinct or pairs
        a, b = min(pool, key=lambda p: (p[0].name, p[1].name))
        return Grounding(((ref1, a), (ref2, b)), action=concept if is_action else None)

    def _pick_pair(self, left: set[Symbol], right: set[Symbol]) -> tuple[Symbol, Symbol] | None:
        options = [
            (a, b) for a in left for b in right if a != b
        ] or [(a, b) for a in left for b in right]
        if not options:
            return None
        return min(options, key=lambda p: (p[0].name, p[1].name))

    # -- inform -------------------------------------------------------------

    def _inform(
        self,
        parse: ParseResult,
        snapshot: SceneSnapshot,
        trace: EpisodicTrace | None,
    ) -> LessonResponse:
        scene = scene_to_case(self.world.observe(snapshot))
        trace_case = trace_to_case(trace) if trace is not None else None
        creates = stores = 0
        taught: set[Symbol] = set()
        got = self._compose(parse, scene, trace_case)
        for _ in range(self.MAX_INFORM_ROUNDS):
            if isinstance(got, Grounding):
                break
            c, s = self._learn_from_failure(parse, scene, trace_case, taught)
            creates += c
            stores += s
            if c == 0 and s == 0:
                break
            got = self._compose(parse, scene, trace_case)
        status = "success" if isinstance(got, Grounding) or stores else "failure"
        detail = (
            f"stored {stores} example(s), created {creates} concept(s)"
            if stores or creates
            else "already understood; nothing stored"
        )
        return LessonResponse(status, detail, creates=creates, stores=stores)

    def _learn_from_failure(
        self,
        parse: ParseResult,
        scene: Case,
        trace_case: Case | None,
        taught: set[Symbol],
    ) -> tuple[int, int]:
        """One active-learning round: create and store for every failing word.

        `taught` collects concepts already given an example this lesson so a
        stubborn comprehension failure never stores the same evidence twice.
        """
        creates = stores = 0
        guesses = self._guess_assignment(parse, scene)

        for ref in parse.object_refs:
            target = guesses.get(ref.ref_id)
            if target is None:
                continue
            for word in ref.properties:
                concept = self.semantic_map.concept_for(word)
                if concept is None:
                    concept = self._create(word, ConceptKind.VISUAL)
                    creates += 1
                elif concept in taught or target in self._visual_accepted(scene, concept):
                    continue
                self._store_visual(scene, target, concept)
                taught.add(concept)
                stores += 1

        if parse.act_refs and trace_case is not None:
            act = parse.act_refs[0]
            word = f"{act.act_name} {act.relation}"
            concept = self.semantic_map.concept_for(word)
            a, b = guesses.get(act.arg1), guesses.get(act.arg2)
            if a is not None and b is not None and a != b:
                if concept is None:
                    concept = self._create(word, ConceptKind.ACTION)
                    creates += 1
                    self._store_action(trace_case, concept, a, b)
                    taught.add(concept)
                    stores += 1
                elif concept not in taught and not self._action_matches(parse, scene, trace_case):
                    self._store_action(trace_case, concept, a, b)
                    taught.add(concept)
                    stores += 1
        elif parse.rel_refs:
            rel = parse.rel_refs[0]
            concept = self.semantic_map.concept_for(rel.rel_name)
            a, b = guesses.get(rel.arg1), guesses.get(rel.arg2)
            if a is not None and b is not None and a != b:
                if concept is None:
                    concept = self._create(rel.rel_name, ConceptKind.SPATIAL)
                    creates += 1
                    self._store_spatial(scene, a, b, concept)
                    taught.add(concept)
                    stores += 1
                elif concept not in taught and not self._relation_ok(scene, concept, a, b):
                    self._store_spatial(scene, a, b, concept)
                    taught.add(concept)
                    stores += 1
        return creates, stores

    def _guess_assignment(self, parse: ParseResult, scene: Case) -> dict[str, Symbol]:
        """Most plausible distinct referents, refs resolved in utterance order."""
        objects = sorted(
            (e for e in scene.entities if e.kind == SymbolKind.ENTITY),
            key=lambda s: s.name,
        )
        out: dict[str, Symbol] = {}
        used: set[Symbol] = set()
        for ref in parse.object_refs:
            totals = {o: 0.0 for o in objects}
            for word in ref.properties:
                concept = self.semantic_map.concept_for(word)
                if concept is None:
                    continue
                result = self.memory.query(scene, FactPattern(ISA, (Variable("o"), concept)))
                for inf in result.inferences:
                    obj = inf.fact.args[0]
                    if obj in totals:
                        totals[obj] += inf.score
            free = [o for o in objects if o not in used] or objects
            pick = max(free, key=lambda o: totals[o])
            out[ref.ref_id] = pick
            used.add(pick)
        return out

    def _relation_ok(self, scene: Case, concept: Symbol, a: Symbol, b: Symbol) -> bool:
        pattern = FactPattern(concept, (Variable("x"), Variable("y")))
        result = self.memory.query(scene, pattern)
        wanted = Fact(concept, (a, b))
        return any(i.fact == wanted and not i.unmet for i in result.accepted)

    def _action_matches(self, parse: ParseResult, scene: Case, trace_case: Case) -> bool:
        return isinstance(self._compose(parse, scene, trace_case), Grounding)

    def _create(self, word: str, kind: ConceptKind) -> Symbol:
        concept = self.memory.create(word, kind)
        self.semantic_map.add(word, concept, kind)
        return concept

    def _store_visual(self, scene: Case, obj: Symbol, concept: Symbol) -> None:
        facts = {f for f in scene.facts if f.predicate == ISA and f.args[0] == obj}
        facts.add(Fact(ISA, (obj, concept)))
        self.memory.store(Case(facts), concept)

    def _store_spatial(self, scene: Case, a: Symbol, b: Symbol, concept: Symbol) -> None:
        keep = {a, b}
        facts = {
            f
            for f in scene.facts
            if all(not isinstance(t, Symbol) or t.kind != SymbolKind.ENTITY or t in keep
                   for t in fact_terms(f))
        }
        facts.add(Fact(concept, (a, b)))
        self.memory.store(Case(facts), concept)

    def _store_action(self, trace_case: Case, concept: Symbol, a: Symbol, b: Symbol) -> None:
        self.memory.store(trace_case.union([Fact(concept, (a, b))]), concept)

    # -- verify -------------------------------------------------------------

    def _verify(self, parse: ParseResult, snapshot: SceneSnapshot) -> LessonResponse:
        got = self.comprehend(parse, snapshot)
        if isinstance(got, Grounding):
            pairs = ", ".join(f"{rid}->{sym.name}" for rid, sym in got.bindings)
            return LessonResponse("success", f"grounded: {pairs}")
        return LessonResponse("failure", got.describe())

    def _verify_action(self, parse: ParseResult, initial: SceneSnapshot, trace: EpisodicTrace) -> LessonResponse:
        scene = scene_to_case(self.world.observe(initial))
        got = self._compose(parse, scene, trace_to_case(trace))
        if isinstance(got, Grounding):
            pairs = ", ".join(f"{rid}->{sym.name}" for rid, sym in got.bindings)
            return LessonResponse("success", f"demonstration matches: {pairs}")
        return LessonResponse("failure", got.describe())

    # -- react --------------------------------------------------------------

    def _react(self, parse: ParseResult, scenario: Scenario | None) -> LessonResponse:
        if isinstance(scenario, DemonstrationScript):
            raise SignalMismatch("react lessons take a scene, not a demonstration")
        if scenario is not None:
            self.world.set_scene(scenario)
        snapshot = self.world.snapshot
        got = self.comprehend(parse, snapshot)
        if isinstance(got, ComprehensionFailure):
            return LessonResponse("failure", got.describe())
        act = parse.act_refs[0]
        mover = got.binding(act.arg1)
        anchor = got.binding(act.arg2)
        try:
            executed = self.execute_action(got.action, mover, anchor, got.goal)
        except (NoProjection, PlanningFailure) as exc:
            return LessonResponse("failure", str(exc))
        plan = tuple(describe_action(a) for a in executed)
        return LessonResponse("success", f"executed {len(plan)} step(s)", plan=plan)

    def execute_action(
        self,
        concept: Symbol,
        mover: Symbol,
        anchor: Symbol,
        goal: frozenset[Fact],
    ) -> list[Action]:
        """Project, plan, and apply primitives until the concept says done."""
        planner = Planner(rng=random.Random(self.rng.randrange(1 << 30)))
        tag = Fact(concept, (mover, anchor))
        states = [state_facts(self.world.snapshot).facts]
        executed: list[Action] = []
        for _ in range(self.MAX_REACT_CYCLES):
            trace = make_trace(states, final=False)
            partial = trace_to_case(trace).union([tag])
            projection = self.memory.project(partial, concept)
            plan = planner.plan(self.world.snapshot, projection.facts)
            for action in plan:
                self.world.apply(action)
                states.append(state_facts(self.world.snapshot).facts)
            executed.extend(plan)
            if projection.terminal:
                missing = goal - state_facts(self.world.snapshot).facts
                if missing:
                    raise PlanningFailure(
                        "plan finished but the goal does not hold: "
                        + ", ".join(format_fact(f) for f in sorted(missing, key=fact_key))
                    )
                return executed
        raise PlanningFailure("projection never reported a terminal state")

    def _action_goal(self, concept: Symbol, mover: Symbol, anchor: Symbol) -> frozenset[Fact] | None:
        template = self.memory.final_state_template(concept)
        if template is None:
            return None
        (role_a, role_b), facts = template
        swap = {role_a: mover, role_b: anchor}
        out = set()
        for f in facts:
            args = tuple(swap.get(t, t) for t in f.args)
            out.add(Fact(f.predicate, args))
        return frozenset(out)

    # -- snapshots ----------------------------------------------------------

    def snapshot(self) -> dict:
        return {"memory": self.memory.snapshot()}

    @classmethod
    def restore(cls, payload: dict, seed: int = 0) -> "TabletopAgent":
        agent = cls(seed=seed)
        agent.memory = ConceptMemory.restore(payload["memory"])
        agent.semantic_map = SemanticMap.from_memory(agent.memory)
        return agent


# -- action codecs -----------------------------------------------------------

def describe_action(action: Action) -> str:
    if isinstance(action, PickUp):
        return f"pick-up({action.obj_id.name})"
    if isinstance(action, Place):
        x, y = action.position
        return f"place({x:.2f}, {y:.2f})"
    if isinstance(action, Point):
        return f"point({action.obj_id.name})"
    raise TypeError(f"unknown action {action!r}")


def action_to_json(action: Action) -> dict:
    if isinstance(action, PickUp):
        return {"type": "pick-up", "object": action.obj_id.name}
    if isinstance(action, Place):
        return {"type": "place", "position": list(action.position)}
    if isinstance(action, Point):
        return {"type": "point", "object": action.obj_id.name}
    raise TypeError(f"unknown action {action!r}")


def action_from_json(payload: dict) -> Action:
    from .facts import entity

    kind = payload.get("type")
    if kind == "pick-up":
        return PickUp(entity(payload["object"]))
    if kind == "place":
        x, y = payload["position"]
        return Place((float(x), float(y)))
    if kind == "point":
        return Point(entity(payload["object"]))
    raise ValueError(f"unknown action payload {payload!r}")
