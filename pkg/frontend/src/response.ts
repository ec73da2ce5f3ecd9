/**
 * Response panel: the last lesson reply, verbatim.  Status and detail are
 * the service's own strings; the plan list is rendered exactly as sent so
 * a react lesson reads as the primitive steps the agent executed (the
 * scene markers animate to the returned coordinates separately).
 */

import type { App } from "./app.js";
import { clear, el } from "./dom.js";

export function mountResponse(app: App, container: HTMLElement): { update(): void } {
  const badge = el("span", { id: "status-badge", class: "badge" });
  const detail = el("div", { id: "status-detail" });
  const counts = el("div", { id: "lesson-counts" });
  const plan = el("ol", { id: "plan-steps" });
  const diff = el("div", { id: "diff-summary" });

  container.append(
    el("h2", {}, "response"),
    el("div", { class: "row" }, badge, counts),
    detail,
    plan,
    diff,
  );

  function update(): void {
    const reply = app.state.reply;
    if (!reply) {
      badge.textContent = "";
      badge.className = "badge";
      detail.textContent = "no lesson submitted yet";
      counts.textContent = "";
      clear(plan);
      clear(diff);
      return;
    }
    badge.textContent = reply.status;
    badge.className = `badge ${reply.status === "success" ? "success" : "failure"}`;
    detail.textContent = reply.detail;
    counts.textContent = `creates ${reply.creates} · stores ${reply.stores}`;
    clear(plan);
    for (const step of reply.plan) {
      plan.append(el("li", { class: "plan-step" }, step));
    }
    clear(diff);
    const d = reply.diff;
    const lines: string[] = [];
    if (d.added.length) lines.push(`added: ${d.added.join(", ")}`);
    if (d.removed.length) lines.push(`removed: ${d.removed.join(", ")}`);
    for (const m of d.moved) {
      lines.push(
        `moved ${m.id}: (${m.from_xy[0].toFixed(2)}, ${m.from_xy[1].toFixed(2)}) → ` +
          `(${m.to_xy[0].toFixed(2)}, ${m.to_xy[1].toFixed(2)})`,
      );
    }
    if (d.held_before !== d.held_after) {
      lines.push(`held: ${d.held_before ?? "nothing"} → ${d.held_after ?? "nothing"}`);
    }
    if (!lines.length) {
      lines.push("scene unchanged");
    }
    for (const line of lines) {
      diff.append(el("div", { class: "diff-line" }, line));
    }
  }

  return { update };
}
