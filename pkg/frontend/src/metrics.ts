/**
 * Metrics dashboard: lesson counts, memory counters, and the cumulative
 * store curve (flat tail means the concept set has converged).
 */

import type { App } from "./app.js";
import { clear, el } from "./dom.js";

export function mountMetrics(app: App, container: HTMLElement): { update(): void } {
  const fields = {
    inform: el("span", { id: "m-inform" }),
    verify: el("span", { id: "m-verify-lessons" }),
    react: el("span", { id: "m-react" }),
    concepts: el("span", { id: "m-concepts" }),
    creates: el("span", { id: "m-creates" }),
    stores: el("span", { id: "m-stores" }),
    queries: el("span", { id: "m-queries" }),
    projections: el("span", { id: "m-projections" }),
    verifyScore: el("span", { id: "m-verify" }),
  };

  const spark = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  spark.setAttribute("id", "stores-spark");
  spark.setAttribute("viewBox", "0 0 100 24");
  spark.setAttribute("preserveAspectRatio", "none");

  const grid = el(
    "dl",
    { class: "metrics-grid" },
    el("dt", {}, "inform lessons"),
    el("dd", {}, fields.inform),
    el("dt", {}, "verify lessons"),
    el("dd", {}, fields.verify),
    el("dt", {}, "react lessons"),
    el("dd", {}, fields.react),
    el("dt", {}, "concepts"),
    el("dd", {}, fields.concepts),
    el("dt", {}, "creates"),
    el("dd", {}, fields.creates),
    el("dt", {}, "stores"),
    el("dd", {}, fields.stores),
    el("dt", {}, "queries"),
    el("dd", {}, fields.queries),
    el("dt", {}, "projections"),
    el("dd", {}, fields.projections),
    el("dt", {}, "verify passed"),
    el("dd", {}, fields.verifyScore),
  );

  container.append(
    el("h2", {}, "metrics"),
    el("div", { id: "metrics-panel" }, grid, el("div", { class: "spark-frame" }, spark)),
  );

  function update(): void {
    const m = app.state.metrics;
    if (!m) {
      for (const span of Object.values(fields)) {
        span.textContent = "-";
      }
      return;
    }
    fields.inform.textContent = JSON.stringify(m.lessons.inform);
    fields.verify.textContent = JSON.stringify(m.lessons.verify);
    fields.react.textContent = JSON.stringify(m.lessons.react);
    fields.concepts.textContent = JSON.stringify(m.concepts);
    fields.creates.textContent = JSON.stringify(m.memory.creates);
    fields.stores.textContent = JSON.stringify(m.memory.stores);
    fields.queries.textContent = JSON.stringify(m.memory.queries);
    fields.projections.textContent = JSON.stringify(m.memory.projections);
    fields.verifyScore.textContent = `${m.verify.successes}/${m.verify.attempts}`;

    clear(spark as unknown as HTMLElement);
    const curve = m.cumulative_stores;
    if (curve.length > 1) {
      const top = Math.max(...curve, 1);
      const points = curve
        .map((value, i) => {
          const x = (i / (curve.length - 1)) * 100;
          const y = 23 - (value / top) * 22;
          return `${x.toFixed(2)},${y.toFixed(2)}`;
        })
        .join(" ");
      const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
      line.setAttribute("points", points);
      line.setAttribute("class", "spark-line");
      spark.append(line);
    }
  }

  return { update };
}
