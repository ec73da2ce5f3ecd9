/**
 * Demo-script recorder.
 *
 * Arming it freezes the currently installed scene as the script's initial
 * state, then grid and marker clicks append pick-up/place/point steps.
 * Submission posts the whole script as one demonstration lesson.
 */

import type { App } from "./app.js";
import { clear, el } from "./dom.js";
import { describeAction } from "./state.js";
import type { RecorderTool } from "./state.js";

const TOOLS: RecorderTool[] = ["pick-up", "place", "point"];

export function mountRecorder(app: App, container: HTMLElement): { update(): void } {
  const toggle = el("button", { type: "button", id: "record-toggle" }, "record demo");
  toggle.addEventListener("click", () => {
    app.toggleRecorder();
  });

  const content = el("input", {
    id: "demo-content",
    type: "text",
    placeholder: "move blue cone left of red cylinder",
  });
  content.addEventListener("input", () => {
    app.recorder.content = content.value;
    app.renderAll();
  });

  const signal = el("select", { id: "demo-signal" });
  signal.append(el("option", { value: "inform" }, "inform"));
  signal.append(el("option", { value: "verify" }, "verify"));
  signal.addEventListener("change", () => {
    app.recorder.signal = signal.value as "inform" | "verify";
  });

  const toolRow = el("div", { class: "row tools" });
  for (const tool of TOOLS) {
    const button = el(
      "button",
      { type: "button", class: "pick-tool", "data-tool": tool },
      tool,
    );
    button.addEventListener("click", () => {
      app.recorder.tool = tool;
      app.renderAll();
    });
    toolRow.append(button);
  }

  const steps = el("ol", { id: "demo-actions" });
  const undo = el("button", { type: "button", id: "demo-undo" }, "undo step");
  undo.addEventListener("click", () => {
    app.recorder.actions.pop();
    app.renderAll();
  });
  const submit = el("button", { type: "button", id: "submit-demo" }, "submit demo");
  submit.addEventListener("click", () => {
    void app.submitDemo();
  });

  const tools = el(
    "div",
    { id: "recorder-tools" },
    content,
    signal,
    toolRow,
    steps,
    el("div", { class: "row" }, undo, submit),
  );

  container.append(el("h2", {}, "demo recorder"), toggle, tools);

  function update(): void {
    const rec = app.recorder;
    toggle.textContent = rec.active ? "stop recording" : "record demo";
    tools.style.display = rec.active ? "" : "none";
    if (content.value !== rec.content) {
      content.value = rec.content;
    }
    signal.value = rec.signal;
    for (const button of toolRow.querySelectorAll("button")) {
      button.classList.toggle("selected", button.dataset.tool === rec.tool);
    }
    clear(steps);
    for (const action of rec.actions) {
      steps.append(el("li", { class: "demo-step" }, describeAction(action)));
    }
    const ready =
      rec.active && rec.actions.length > 0 && rec.content.trim().length > 0 && !app.client.busy;
    submit.toggleAttribute("disabled", !ready);
    undo.toggleAttribute("disabled", rec.actions.length === 0);
  }

  return { update };
}
