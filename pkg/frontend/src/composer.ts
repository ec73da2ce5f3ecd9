/**
 * Lesson composer: utterance box plus the inform/verify/react selector.
 * React stays disabled unless the utterance fits the action template;
 * that check is purely syntactic, comprehension is the service's job.
 */

import type { App } from "./app.js";
import { el } from "./dom.js";
import { classify, isActionTemplate, RELATION_PHRASES } from "./grammar.js";
import type { ObjectJson, Signal } from "./schema.js";

const HINTS: Record<string, string> = {
  empty: "type an utterance",
  property: "names one object by its properties",
  relation: "relates two objects",
  action: "action command; react available",
  "dangling-verb": "verb without a relation phrase; the service cannot parse this",
};

export function mountComposer(app: App, container: HTMLElement): { update(): void } {
  const utterance = el("input", {
    id: "utterance",
    type: "text",
    placeholder: "blue cone left of red cylinder",
  });
  utterance.addEventListener("input", () => {
    app.lesson.content = utterance.value;
    app.renderAll();
  });

  const radios: Record<Signal, HTMLInputElement> = {
    inform: el("input", { type: "radio", name: "signal", id: "signal-inform", value: "inform" }),
    verify: el("input", { type: "radio", name: "signal", id: "signal-verify", value: "verify" }),
    react: el("input", { type: "radio", name: "signal", id: "signal-react", value: "react" }),
  };
  radios.inform.checked = true;
  const signalRow = el("div", { class: "row signals" });
  for (const [signal, radio] of Object.entries(radios)) {
    radio.addEventListener("change", () => {
      if (radio.checked) {
        app.lesson.signal = signal as Signal;
        app.renderAll();
      }
    });
    signalRow.append(el("label", { for: radio.id }, radio, signal));
  }

  // One button per relation phrase: with a target and an anchor picked on
  // the board, it writes "<target words> <phrase> <anchor words>" into the
  // utterance box.  Wording only; the service still judges the geometry.
  function pickedPair(): { target: ObjectJson; anchor: ObjectJson } | null {
    const objects = app.state.scene?.objects ?? [];
    const target = objects.find((o) => o.id === app.editor.target);
    const anchor = objects.find((o) => o.id === app.editor.anchor);
    return target && anchor ? { target, anchor } : null;
  }

  const relationStrip = el("div", { id: "relation-strip", class: "row" });
  for (const phrase of RELATION_PHRASES) {
    const button = el(
      "button",
      { type: "button", class: "pick-relation", "data-rel": phrase },
      phrase,
    );
    button.addEventListener("click", () => {
      const pair = pickedPair();
      if (!pair) return;
      app.lesson.content =
        `${pair.target.color} ${pair.target.shape} ${phrase} ` +
        `${pair.anchor.color} ${pair.anchor.shape}`;
      app.renderAll();
    });
    relationStrip.append(button);
  }

  const hint = el("div", { id: "template-hint" });

  const submit = el("button", { type: "button", id: "submit-lesson" }, "submit lesson");
  submit.addEventListener("click", () => {
    void app.submitLesson();
  });

  container.append(el("h2", {}, "lesson"), utterance, relationStrip, signalRow, hint, submit);

  function update(): void {
    if (utterance.value !== app.lesson.content) {
      utterance.value = app.lesson.content;
    }
    const pairReady = pickedPair() !== null;
    for (const button of relationStrip.querySelectorAll("button")) {
      button.toggleAttribute("disabled", !pairReady);
    }
    const kind = classify(app.lesson.content);
    hint.textContent = HINTS[kind] ?? kind;
    const actionable = isActionTemplate(app.lesson.content);
    radios.react.toggleAttribute("disabled", !actionable);
    if (!actionable && app.lesson.signal === "react") {
      app.lesson.signal = "inform";
    }
    for (const [signal, radio] of Object.entries(radios)) {
      radio.checked = app.lesson.signal === signal;
    }
    submit.toggleAttribute(
      "disabled",
      app.client.busy || app.lesson.content.trim().length === 0,
    );
  }

  return { update };
}
