"""HTTP/JSON API over live teaching sessions.

Each session owns one agent (and therefore one world and one concept
memory).  Mutating endpoints take the session's writer lock without
blocking and answer 409 when a lesson is already in flight; read
endpoints wait their turn and never mutate.  All routes live under /v1.
"""

from __future__ import annotations

import threading
import uuid
from typing import Literal

from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field, model_validator

from .agent import (
    DemonstrationScript,
    Lesson,
    Signal,
    TabletopAgent,
    action_from_json,
)
from .errors import (
    GroundschoolError,
    MalformedTrace,
    PreconditionViolated,
    SignalMismatch,
    Unsatisfiable,
    UnparseableUtterance,
)
from .generalize import Thresholds
from .world import SceneSnapshot, snapshot_from_json, snapshot_to_json

# Client mistakes that deserve a 422 rather than a 500.
_CLIENT_ERRORS = (
    UnparseableUtterance,
    SignalMismatch,
    PreconditionViolated,
    MalformedTrace,
    Unsatisfiable,
    ValueError,
    KeyError,
)


# ---------------------------------------------------------------------------
# Request/response schemas
# ---------------------------------------------------------------------------

class ObjectSpec(BaseModel):
    id: str
    shape: str
    color: str
    x: float
    y: float
    w: float = 0.4
    h: float = 0.4
    held: bool = False


class BoundsSpec(BaseModel):
    x_min: float = 0.0
    y_min: float = 0.0
    x_max: float = 10.0
    y_max: float = 10.0


class SceneSpec(BaseModel):
    objects: list[ObjectSpec]
    bounds: BoundsSpec = BoundsSpec()


class ActionSpec(BaseModel):
    type: Literal["pick-up", "place", "point"]
    object: str | None = None
    position: tuple[float, float] | None = None

    @model_validator(mode="after")
    def _check_arguments(self) -> "ActionSpec":
        if self.type == "place":
            if self.position is None:
                raise ValueError("place needs a position")
        elif self.object is None:
            raise ValueError(f"{self.type} needs an object")
        return self


class ThresholdSpec(BaseModel):
    assimilation: float = 0.01
    probability: float = 0.6
    match: float = 0.75


class SessionRequest(BaseModel):
    seed: int = 0
    thresholds: ThresholdSpec | None = None
    memory: dict | None = Field(
        default=None, description="memory snapshot to restore instead of starting empty"
    )


class SessionInfo(BaseModel):
    id: str
    seed: int
    words: list[str]


class LessonRequest(BaseModel):
    content: str
    signal: Literal["inform", "verify", "react"]
    scene: SceneSpec | None = None


class DemoRequest(BaseModel):
    content: str
    signal: Literal["inform", "verify"] = "inform"
    initial: SceneSpec
    actions: list[ActionSpec] = Field(min_length=1)


class MovedObject(BaseModel):
    id: str
    from_xy: tuple[float, float]
    to_xy: tuple[float, float]


class SceneDiff(BaseModel):
    added: list[str]
    removed: list[str]
    moved: list[MovedObject]
    held_before: str | None
    held_after: str | None


class LessonReply(BaseModel):
    status: str
    detail: str
    creates: int
    stores: int
    plan: list[str]
    scene: dict
    diff: SceneDiff


# ---------------------------------------------------------------------------
# Session registry
# ---------------------------------------------------------------------------

class _SessionState:
    def __init__(self, session_id: str, agent: TabletopAgent, seed: int):
        self.id = session_id
        self.agent = agent
        self.seed = seed
        self.lock = threading.Lock()
        self.log: list[dict] = []
        self.verify_attempts = 0
        self.verify_successes = 0


def _scene_diff(before: SceneSnapshot, after: SceneSnapshot) -> SceneDiff:
    prior = {o.obj_id.name: o for o in before.objects}
    later = {o.obj_id.name: o for o in after.objects}
    moved = [
        MovedObject(id=name, from_xy=(prior[name].x, prior[name].y), to_xy=(obj.x, obj.y))
        for name, obj in sorted(later.items())
        if name in prior and (prior[name].x, prior[name].y) != (obj.x, obj.y)
    ]
    held_before = before.held_object()
    held_after = after.held_object()
    return SceneDiff(
        added=sorted(set(later) - set(prior)),
        removed=sorted(set(prior) - set(later)),
        moved=moved,
        held_before=held_before.obj_id.name if held_before else None,
        held_after=held_after.obj_id.name if held_after else None,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="groundschool teach service", version="1.0")
    # The browser console is served from its own origin during development.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, _SessionState] = {}
    registry_lock = threading.Lock()
    # Exposed for tests that need to reach a session's writer lock.
    app.state.sessions = sessions

    def get_state(session_id: str) -> _SessionState:
        state = sessions.get(session_id)
        if state is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return state

    def run_lesson(state: _SessionState, lesson: Lesson) -> LessonReply:
        # Writer lock: a second lesson against the same session while one
        # is still running must be rejected, never interleaved.
        if not state.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="a lesson is already in flight")
        try:
            # Diff against the scene the lesson starts from.  A lesson that
            # ships its own scene replaces the world before acting, so the
            # previous world contents are not the baseline.
            if isinstance(lesson.scenario, SceneSnapshot):
                before = lesson.scenario
            elif isinstance(lesson.scenario, DemonstrationScript):
                before = lesson.scenario.initial
            else:
                before = state.agent.world.snapshot
            try:
                response = state.agent.process_lesson(lesson)
            except _CLIENT_ERRORS as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
            after = state.agent.world.snapshot
            state.log.append(
                {
                    "signal": lesson.signal.value,
                    "content": lesson.content,
                    "status": response.status,
                    "creates": response.creates,
                    "stores": response.stores,
                }
            )
            if lesson.signal == Signal.VERIFY:
                state.verify_attempts += 1
                state.verify_successes += int(response.ok)
            return LessonReply(
                status=response.status,
                detail=response.detail,
                creates=response.creates,
                stores=response.stores,
                plan=list(response.plan),
                scene=snapshot_to_json(after),
                diff=_scene_diff(before, after),
            )
        finally:
            state.lock.release()

    @app.post("/v1/session", response_model=SessionInfo, status_code=201)
    def create_session(request: SessionRequest | None = None) -> SessionInfo:
        request = request or SessionRequest()
        if request.memory is not None:
            try:
                agent = TabletopAgent.restore({"memory": request.memory}, seed=request.seed)
            except (GroundschoolError, ValueError, KeyError, TypeError) as exc:
                raise HTTPException(status_code=422, detail=f"bad memory snapshot: {exc}") from exc
        else:
            thresholds = (
                Thresholds(**request.thresholds.model_dump()) if request.thresholds else None
            )
            agent = TabletopAgent(thresholds=thresholds, seed=request.seed)
        session_id = uuid.uuid4().hex[:12]
        with registry_lock:
            sessions[session_id] = _SessionState(session_id, agent, request.seed)
        return SessionInfo(id=session_id, seed=request.seed, words=sorted(agent.semantic_map.words()))

    @app.delete("/v1/session/{session_id}", status_code=204)
    def delete_session(session_id: str) -> Response:
        with registry_lock:
            if session_id not in sessions:
                raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
            del sessions[session_id]
        return Response(status_code=204)

    @app.put("/v1/session/{session_id}/scene")
    def set_scene(session_id: str, scene: SceneSpec) -> dict:
        state = get_state(session_id)
        try:
            snapshot = snapshot_from_json(scene.model_dump())
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        if not state.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="a lesson is already in flight")
        try:
            state.agent.world.set_scene(snapshot)
        finally:
            state.lock.release()
        return {"scene": snapshot_to_json(snapshot)}

    @app.get("/v1/session/{session_id}/scene")
    def get_scene(session_id: str) -> dict:
        state = get_state(session_id)
        with state.lock:
            return {"scene": snapshot_to_json(state.agent.world.snapshot)}

    @app.post("/v1/session/{session_id}/lesson", response_model=LessonReply)
    def submit_lesson(session_id: str, request: LessonRequest) -> LessonReply:
        state = get_state(session_id)
        scenario = None
        if request.scene is not None:
            try:
                scenario = snapshot_from_json(request.scene.model_dump())
            except (ValueError, KeyError) as exc:
                raise HTTPException(status_code=422, detail=str(exc)) from exc
        lesson = Lesson(request.content, Signal(request.signal), scenario)
        return run_lesson(state, lesson)

    @app.post("/v1/session/{session_id}/demo", response_model=LessonReply)
    def run_demo_script(session_id: str, request: DemoRequest) -> LessonReply:
        state = get_state(session_id)
        try:
            initial = snapshot_from_json(request.initial.model_dump())
            actions = tuple(
                action_from_json(spec.model_dump(exclude_none=True)) for spec in request.actions
            )
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        script = DemonstrationScript(initial, actions)
        lesson = Lesson(request.content, Signal(request.signal), script)
        return run_lesson(state, lesson)

    @app.get("/v1/session/{session_id}/memory")
    def get_memory_state(session_id: str, concept: str | None = Query(default=None)) -> dict:
        state = get_state(session_id)
        with state.lock:
            memory = state.agent.memory
            if concept is None:
                return memory.snapshot()
            symbol = memory.concept_for_word(concept)
            if symbol is None:
                for known in memory.contexts:
                    if known.name == concept:
                        symbol = known
                        break
            if symbol is None:
                raise HTTPException(status_code=404, detail=f"unknown concept {concept!r}")
            context = memory.contexts[symbol]
            word = state.agent.semantic_map.word_for(symbol)
            payload = context.snapshot()
            payload["word"] = word
            payload["kind"] = memory.kind_of(symbol).value
            payload["example_total"] = context.example_total()
            return payload

    @app.get("/v1/session/{session_id}/metrics")
    def get_metrics(session_id: str) -> dict:
        state = get_state(session_id)
        with state.lock:
            lessons_by_signal = {"inform": 0, "verify": 0, "react": 0}
            cumulative_stores = []
            total = 0
            for entry in state.log:
                lessons_by_signal[entry["signal"]] += 1
                total += entry["stores"]
                cumulative_stores.append(total)
            return {
                "session": state.id,
                "lessons": lessons_by_signal,
                "memory": state.agent.memory.counters.as_dict(),
                "concepts": len(state.agent.memory.contexts),
                "cumulative_stores": cumulative_stores,
                "verify": {
                    "attempts": state.verify_attempts,
                    "successes": state.verify_successes,
                },
            }

    @app.get("/v1/health")
    def health() -> dict:
        return {"status": "ok", "sessions": len(sessions)}

    return app


app = create_app()
