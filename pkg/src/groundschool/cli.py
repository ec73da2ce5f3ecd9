"""Command-line front end: experiments, the scripted react demo, a service
launcher, and a thin HTTP client for live sessions.

Session subcommands never touch agent internals; they speak the same /v1
JSON contract as any other client.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

import click
import httpx

from .agent import Lesson, Signal
from .curriculum import (
    TrialConfig,
    demo_react_scene,
    export_curves,
    run_experiment,
    train_demo_agent,
)
from .errors import GroundschoolError
from .memory import ConceptKind
from .world import (
    COLOR_WORDS,
    SHAPE_WORDS,
    SceneSnapshot,
    compute_cdc,
    compute_rcc8,
    make_object,
    snapshot_to_json,
)

DEFAULT_BASE = "http://127.0.0.1:8000"


@click.group()
def main() -> None:
    """Interactive concept learning on a simulated tabletop."""


@main.command("run-experiment")
@click.option("--kind", type=click.Choice(["visual", "spatial", "action"]), required=True)
@click.option("--trials", type=int, default=None, help="trial count (default depends on kind)")
@click.option("--lessons", type=int, default=None, help="lessons per trial (default depends on kind)")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
def run_experiment_cmd(kind: str, trials: int | None, lessons: int | None, seed: int, out: Path) -> None:
    """Run a teaching curriculum and write curves.csv, curves.json, snapshots."""
    try:
        config = TrialConfig(kind=ConceptKind(kind), trials=trials, lessons=lessons, seed=seed)
        result = run_experiment(config)
        paths = export_curves(result, out)
    except GroundschoolError as exc:
        raise click.ClickException(str(exc)) from exc
    curves = result.curves()
    exam = config.exam_size
    converged = next(
        (row["lesson"] for row in curves if row["mean_generality"] >= exam), None
    )
    tail = curves[-5:]
    click.echo(f"{kind}: {config.trial_count} trial(s) x {config.lesson_count} lesson(s), seed {seed}")
    click.echo(
        "final 5 lessons: stores {:.2f}, generality {:.2f}/{}, specificity {:.2f}/{}".format(
            sum(r["mean_stores"] for r in tail) / len(tail),
            sum(r["mean_generality"] for r in tail) / len(tail),
            exam,
            sum(r["mean_specificity"] for r in tail) / len(tail),
            exam,
        )
    )
    if converged is not None:
        click.echo(f"mean generality first reached {exam}/{exam} at lesson {converged}")
    for name in sorted(paths):
        click.echo(f"wrote {paths[name]}")


@main.command("demo-react")
@click.option("--utterance", default="move blue cone right of red cylinder", show_default=True)
@click.option("--seed", type=int, default=11, show_default=True)
def demo_react_cmd(utterance: str, seed: int) -> None:
    """Teach a throwaway agent, then ask it to act on the utterance."""
    agent = train_demo_agent(seed=seed)
    scene = demo_react_scene()
    click.echo("scene:")
    for obj in scene.objects:
        click.echo(f"  {obj.obj_id.name}: {obj.color.name[2:].lower()} {obj.shape.name[2:].lower()} at ({obj.x:.2f}, {obj.y:.2f})")
    try:
        response = agent.process_lesson(Lesson(utterance, Signal.REACT, scene))
    except GroundschoolError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(f"status: {response.status} ({response.detail})")
    for i, step in enumerate(response.plan, start=1):
        click.echo(f"  step {i}: {step}")
    if not response.ok:
        sys.exit(1)
    final = agent.world.snapshot
    o1, o2 = final.objects[0], final.objects[1]
    cdc = compute_cdc((o1.x, o1.y), (o2.x, o2.y))
    rcc8 = compute_rcc8(o1.box(), o2.box())
    click.echo(f"final: {o1.obj_id.name} is {cdc}+{rcc8} of {o2.obj_id.name}")


@main.command("sample-scene")
@click.option("--objects", "count", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def sample_scene_cmd(count: int, seed: int) -> None:
    """Dump a random scene as JSON (debugging aid for the service/console)."""
    rng = random.Random(seed)
    colors = sorted(COLOR_WORDS)
    shapes = sorted(SHAPE_WORDS)
    objects = tuple(
        make_object(
            f"o{i + 1}",
            rng.choice(shapes),
            rng.choice(colors),
            round(rng.uniform(1.0, 9.0), 2),
            round(rng.uniform(1.0, 9.0), 2),
        )
        for i in range(count)
    )
    click.echo(json.dumps(snapshot_to_json(SceneSnapshot(objects)), indent=2))


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve_cmd(host: str, port: int) -> None:
    """Start the teaching service."""
    import uvicorn

    uvicorn.run("groundschool.service:app", host=host, port=port)


# ---------------------------------------------------------------------------
# Thin HTTP client
# ---------------------------------------------------------------------------

def _request(method: str, url: str, payload: dict | None = None) -> httpx.Response:
    try:
        response = httpx.request(method, url, json=payload, timeout=60.0)
    except httpx.HTTPError as exc:
        raise click.ClickException(f"cannot reach service: {exc}") from exc
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise click.ClickException(f"{response.status_code}: {detail}")
    return response


def _show(response: httpx.Response) -> None:
    if response.status_code == 204:
        click.echo("ok")
        return
    click.echo(json.dumps(response.json(), indent=2))


@main.group()
@click.option("--base", default=DEFAULT_BASE, show_default=True, help="service base URL")
@click.pass_context
def session(ctx: click.Context, base: str) -> None:
    """Talk to a running teach service."""
    ctx.obj = base.rstrip("/")


@session.command("create")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--memory", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="restore from a memory snapshot file")
@click.pass_obj
def session_create(base: str, seed: int, memory: Path | None) -> None:
    payload: dict = {"seed": seed}
    if memory is not None:
        payload["memory"] = json.loads(memory.read_text())
    _show(_request("POST", f"{base}/v1/session", payload))


@session.command("scene")
@click.argument("session_id")
@click.argument("scene_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_obj
def session_scene(base: str, session_id: str, scene_file: Path) -> None:
    payload = json.loads(scene_file.read_text())
    _show(_request("PUT", f"{base}/v1/session/{session_id}/scene", payload))


@session.command("lesson")
@click.argument("session_id")
@click.option("--content", required=True)
@click.option("--signal", type=click.Choice(["inform", "verify", "react"]), required=True)
@click.option("--scene", "scene_file", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              default=None, help="scene JSON to install before the lesson")
@click.pass_obj
def session_lesson(base: str, session_id: str, content: str, signal: str, scene_file: Path | None) -> None:
    payload: dict = {"content": content, "signal": signal}
    if scene_file is not None:
        payload["scene"] = json.loads(scene_file.read_text())
    _show(_request("POST", f"{base}/v1/session/{session_id}/lesson", payload))


@session.command("demo")
@click.argument("session_id")
@click.argument("demo_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_obj
def session_demo(base: str, session_id: str, demo_file: Path) -> None:
    """Submit a demonstration lesson: {content, signal?, initial, actions}."""
    payload = json.loads(demo_file.read_text())
    _show(_request("POST", f"{base}/v1/session/{session_id}/demo", payload))


@session.command("memory")
@click.argument("session_id")
@click.option("--concept", default=None, help="concept symbol or word; omit for the full snapshot")
@click.pass_obj
def session_memory(base: str, session_id: str, concept: str | None) -> None:
    url = f"{base}/v1/session/{session_id}/memory"
    if concept is not None:
        url += f"?concept={concept}"
    _show(_request("GET", url))


@session.command("metrics")
@click.argument("session_id")
@click.pass_obj
def session_metrics(base: str, session_id: str) -> None:
    _show(_request("GET", f"{base}/v1/session/{session_id}/metrics"))


@session.command("delete")
@click.argument("session_id")
@click.pass_obj
def session_delete(base: str, session_id: str) -> None:
    _show(_request("DELETE", f"{base}/v1/session/{session_id}"))


if __name__ == "__main__":
    main()
