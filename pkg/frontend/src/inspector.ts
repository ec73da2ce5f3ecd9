/**
 * Concept inspector: the generalization contexts behind a word.
 *
 * Every value in the table is the service payload itself.  Numeric cells
 * carry the JSON serialization of the payload value (so a reader of the
 * DOM recovers the number exactly); nothing is recomputed client-side.
 * Rows at or above the retention threshold are highlighted, with the
 * threshold taken from the payload rather than hard-coded.
 */

import type { App } from "./app.js";
import { clear, el } from "./dom.js";

export function mountInspector(app: App, container: HTMLElement): { update(): void } {
  const select = el("select", { id: "concept-select" });
  select.addEventListener("change", () => {
    if (select.value) {
      void app.inspect(select.value);
    }
  });
  const refresh = el("button", { type: "button", id: "inspect-refresh" }, "refresh");
  refresh.addEventListener("click", () => {
    if (select.value) {
      void app.inspect(select.value);
    }
  });

  const meta = el("div", { id: "inspector-meta" });
  const note = el("div", { id: "threshold-note" });
  const body = el("div", { id: "inspector-body" });

  container.append(
    el("h2", {}, "concept inspector"),
    el("div", { class: "row" }, select, refresh),
    meta,
    note,
    body,
  );

  function renderOptions(): void {
    const words = Object.keys(app.state.words ?? {}).sort();
    const current = select.value;
    clear(select);
    select.append(el("option", { value: "" }, "pick a word"));
    for (const word of words) {
      const option = el("option", { value: word }, word);
      if (word === current || word === app.state.inspected?.word) {
        option.selected = true;
      }
      select.append(option);
    }
  }

  function update(): void {
    renderOptions();
    const payload = app.state.inspected;
    clear(meta);
    clear(body);
    if (!payload) {
      note.textContent = "";
      body.append(el("div", { class: "hint" }, "no concept inspected"));
      return;
    }
    meta.dataset.concept = payload.concept;
    meta.dataset.contextId = payload.context_id;
    meta.dataset.word = payload.word ?? "";
    meta.dataset.kind = payload.kind;
    meta.dataset.exampleTotal = JSON.stringify(payload.example_total);
    meta.textContent =
      `${payload.word ?? "(no word)"} → ${payload.concept} ` +
      `[${payload.kind}] · context ${payload.context_id} · ` +
      `${payload.example_total} example(s) total`;

    const threshold = payload.thresholds.probability;
    note.textContent = `retention threshold: probability ≥ ${JSON.stringify(threshold)}`;

    for (const gen of payload.generalizations) {
      const table = el("table", { class: "gen-table" });
      const head = el(
        "tr",
        {},
        el("th", {}, "fact"),
        el("th", {}, "aligned"),
        el("th", {}, "probability"),
      );
      table.append(head);
      for (const row of gen.facts) {
        const side = row.probability >= threshold ? "above-threshold" : "below-threshold";
        const bar = el("div", { class: "prob-bar" });
        bar.style.width = `${row.probability * 100}%`;
        table.append(
          el(
            "tr",
            { class: `fact-row ${side}` },
            el("td", { class: "fact-cell" }, row.fact),
            el("td", { class: "aligned-cell" }, JSON.stringify(row.aligned_count)),
            el("td", { class: "prob-cell" }, JSON.stringify(row.probability), bar),
          ),
        );
      }
      body.append(
        el(
          "section",
          {
            class: "gen",
            "data-gen-id": gen.id,
            "data-example-count": JSON.stringify(gen.example_count),
            "data-next-entity-index": JSON.stringify(gen.next_entity_index),
          },
          el("h3", {}, `${gen.id} · ${gen.example_count} example(s)`),
          table,
        ),
      );
    }

    if (payload.examples.length) {
      const list = el("ol", { id: "example-list" });
      for (const example of payload.examples) {
        const item = el("li", { class: "lone-example" });
        for (const fact of example) {
          item.append(el("span", { class: "example-fact" }, fact));
        }
        list.append(item);
      }
      body.append(el("section", { class: "lone-examples" }, el("h3", {}, "unmerged examples"), list));
    }
  }

  return { update };
}
