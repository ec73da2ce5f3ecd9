/**
 * Scene editor: palette + a 10x10 grid.
 *
 * Clicking a cell drops the selected shape/color at the cell centre, so
 * placement is grid-snapped client-side while the server stays the
 * authority on coordinates once the scene is installed.  Installed
 * objects render solid; drafted ones render dashed until "install scene"
 * ships the draft.  While the demo recorder is armed, grid and marker
 * clicks feed the script instead of the draft.
 */

import type { App } from "./app.js";
import { clear, el } from "./dom.js";
import { COLORS, SHAPES } from "./schema.js";
import type { Color, Shape } from "./schema.js";

const GRID = 10; // cells per side; table bounds are 0..10

export function mountEditor(app: App, container: HTMLElement): { update(): void } {
  const palette = el("div", { class: "palette" });
  for (const shape of SHAPES) {
    palette.append(
      el("button", { type: "button", class: "pick-shape", "data-shape": shape }, shape),
    );
  }
  for (const color of COLORS) {
    palette.append(
      el("button", { type: "button", class: "pick-color", "data-color": color }, color),
    );
  }
  palette.addEventListener("click", (event) => {
    const button = (event.target as HTMLElement).closest("button");
    if (!button) return;
    if (button.dataset.shape) app.editor.shape = button.dataset.shape as Shape;
    if (button.dataset.color) app.editor.color = button.dataset.color as Color;
    app.renderAll();
  });

  const grid = el("div", { id: "scene-grid" });
  for (let cy = GRID - 1; cy >= 0; cy--) {
    for (let cx = 0; cx < GRID; cx++) {
      grid.append(el("div", { class: "cell", "data-cx": String(cx), "data-cy": String(cy) }));
    }
  }
  const markers = el("div", { id: "scene-markers" });
  const board = el("div", { id: "scene-board" }, grid, markers);

  board.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const marker = target.closest<HTMLElement>(".marker");
    if (marker) {
      onMarkerClick(marker);
      return;
    }
    const cell = target.closest<HTMLElement>(".cell");
    if (cell) {
      onCellClick(Number(cell.dataset.cx), Number(cell.dataset.cy));
    }
  });

  function onCellClick(cx: number, cy: number): void {
    const x = cx + 0.5;
    const y = cy + 0.5;
    if (app.recorder.active && app.recorder.tool === "place") {
      app.recorder.actions.push({ type: "place", position: [x, y] });
      app.renderAll();
      return;
    }
    const draft = app.editor;
    draft.objects.push({
      id: `o${draft.nextIndex}`,
      shape: draft.shape,
      color: draft.color,
      x,
      y,
    });
    draft.nextIndex += 1;
    app.renderAll();
  }

  function onMarkerClick(marker: HTMLElement): void {
    const id = marker.dataset.id!;
    if (app.recorder.active && app.recorder.tool !== "place") {
      if (marker.classList.contains("installed")) {
        app.recorder.actions.push({ type: app.recorder.tool, object: id });
        app.renderAll();
      }
      return;
    }
    if (marker.classList.contains("draft")) {
      // Clicking a drafted object removes it again.
      app.editor.objects = app.editor.objects.filter((o) => o.id !== id);
      app.renderAll();
      return;
    }
    // Installed objects: pick the two ends of a relation phrase.  First
    // click is the target (the thing described), second the anchor; a
    // click on a picked object releases it, a third pick moves the anchor.
    const draft = app.editor;
    if (draft.target === id) {
      draft.target = null;
    } else if (draft.anchor === id) {
      draft.anchor = null;
    } else if (draft.target === null) {
      draft.target = id;
    } else {
      draft.anchor = id;
    }
    app.renderAll();
  }

  const install = el("button", { type: "button", id: "install-scene" }, "install scene");
  install.addEventListener("click", () => {
    void app.installScene();
  });
  const clearDraft = el("button", { type: "button", id: "clear-draft" }, "clear draft");
  clearDraft.addEventListener("click", () => {
    app.editor.objects = [];
    app.renderAll();
  });
  const clearTable = el("button", { type: "button", id: "clear-table" }, "clear table");
  clearTable.addEventListener("click", () => {
    void app.clearTable();
  });

  const picks = el("div", { id: "relation-picks" });
  const problems = el("div", { id: "scene-problems" });

  container.append(
    el("h2", {}, "scene"),
    palette,
    board,
    el("div", { class: "row" }, install, clearDraft, clearTable),
    picks,
    problems,
  );

  function placeMarker(
    kind: "installed" | "draft",
    id: string,
    shape: string,
    color: string,
    x: number,
    y: number,
    held: boolean,
  ): HTMLElement {
    const marker = el("div", {
      class: `marker ${kind} shape-${shape} color-${color}${held ? " held" : ""}`,
      "data-id": id,
      "data-x": String(x),
      "data-y": String(y),
      title: `${id}: ${color} ${shape}`,
    });
    marker.style.left = `${(x / GRID) * 100}%`;
    marker.style.bottom = `${(y / GRID) * 100}%`;
    return marker;
  }

  function update(): void {
    for (const button of palette.querySelectorAll("button")) {
      const selected =
        button.dataset.shape === app.editor.shape || button.dataset.color === app.editor.color;
      button.classList.toggle("selected", selected);
    }
    clear(markers);
    for (const o of app.state.scene?.objects ?? []) {
      const marker = placeMarker("installed", o.id, o.shape, o.color, o.x, o.y, o.held);
      marker.classList.toggle("as-target", app.editor.target === o.id);
      marker.classList.toggle("as-anchor", app.editor.anchor === o.id);
      markers.append(marker);
    }
    for (const o of app.editor.objects) {
      markers.append(placeMarker("draft", o.id, o.shape, o.color, o.x, o.y, false));
    }
    picks.textContent =
      app.editor.target || app.editor.anchor
        ? `target ${app.editor.target ?? "?"} · anchor ${app.editor.anchor ?? "?"}`
        : "click installed objects to pick a relation pair";
    clear(problems);
    for (const text of app.sceneDraftProblems()) {
      problems.append(el("div", { class: "problem" }, text));
    }
    install.toggleAttribute("disabled", app.client.busy);
  }

  return { update };
}
