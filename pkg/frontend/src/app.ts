/**
 * Console application: one live session against one teach service.
 *
 * All rendered facts come from service responses held in `state`; the
 * client-side drafts only shape the next request.  Every mutation is
 * followed by re-fetching the projections it may have changed (words,
 * metrics, the inspected concept), so panels never show home-grown
 * numbers.  The session id lives in the URL hash so a session can be
 * reopened or shared.
 */

import { ApiError, TeachClient } from "./client.js";
import { mountComposer } from "./composer.js";
import { el } from "./dom.js";
import { mountEditor } from "./editor.js";
import { mountInspector } from "./inspector.js";
import { mountMetrics } from "./metrics.js";
import { mountRecorder } from "./recorder.js";
import { mountResponse } from "./response.js";
import { DemoRequest, sceneProblems } from "./schema.js";
import type { LessonReply, SceneSpec } from "./schema.js";
import {
  draftToSpec,
  initialEditorDraft,
  initialLessonDraft,
  initialRecorderDraft,
  initialServerState,
  sceneJsonToSpec,
} from "./state.js";
import type { EditorDraft, LessonDraft, RecorderDraft, ServerState } from "./state.js";

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class App {
  readonly client: TeachClient;
  state: ServerState = initialServerState();
  editor: EditorDraft = initialEditorDraft();
  lesson: LessonDraft = initialLessonDraft();
  recorder: RecorderDraft = initialRecorderDraft();

  private panels: { update(): void }[] = [];
  private sessionLabel!: HTMLElement;
  private errorBanner!: HTMLElement;
  private pollHandle: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly root: HTMLElement,
    base: string,
    fetchFn?: FetchLike,
  ) {
    this.client = fetchFn ? new TeachClient(base, fetchFn) : new TeachClient(base);
  }

  get sessionId(): string {
    const id = this.state.session?.id;
    if (!id) {
      throw new Error("no session yet");
    }
    return id;
  }

  async init(): Promise<void> {
    this.buildSkeleton();
    const adopted = await this.adoptFromHash();
    if (!adopted) {
      const info = await this.client.createSession(0);
      this.state.session = info;
      window.location.hash = `session=${info.id}`;
    }
    await this.refreshScene();
    await this.refreshWords();
    await this.refreshMetrics();
    this.renderAll();
  }

  private buildSkeleton(): void {
    this.sessionLabel = el("span", { id: "session-id" });
    this.errorBanner = el("div", { id: "error-banner" });
    const newSession = el("button", { type: "button", id: "new-session" }, "new session");
    newSession.addEventListener("click", () => {
      void this.newSession();
    });

    const editorPanel = el("section", { id: "editor-panel", class: "panel" });
    const composerPanel = el("section", { id: "composer-panel", class: "panel" });
    const responsePanel = el("section", { id: "response-panel", class: "panel" });
    const inspectorPanel = el("section", { id: "inspector-panel", class: "panel" });
    const metricsPanel = el("section", { id: "metrics-host", class: "panel" });
    const recorderPanel = el("section", { id: "recorder-panel", class: "panel" });

    this.root.append(
      el(
        "header",
        {},
        el("h1", {}, "groundschool console"),
        el("div", { class: "row" }, this.sessionLabel, newSession),
        this.errorBanner,
      ),
      el(
        "main",
        {},
        el("div", { class: "column" }, editorPanel, recorderPanel),
        el("div", { class: "column" }, composerPanel, responsePanel),
        el("div", { class: "column" }, inspectorPanel, metricsPanel),
      ),
    );

    this.panels = [
      mountEditor(this, editorPanel),
      mountComposer(this, composerPanel),
      mountResponse(this, responsePanel),
      mountInspector(this, inspectorPanel),
      mountMetrics(this, metricsPanel),
      mountRecorder(this, recorderPanel),
    ];
  }

  private async adoptFromHash(): Promise<boolean> {
    const match = /session=([0-9a-f]+)/.exec(window.location.hash);
    if (!match) {
      return false;
    }
    const id = match[1]!;
    try {
      const metrics = await this.client.getMetrics(id);
      this.state.metrics = metrics;
      this.state.session = { id, seed: 0, words: [] };
      return true;
    } catch {
      return false; // stale hash; fall through to a fresh session
    }
  }

  renderAll(): void {
    this.sessionLabel.textContent = this.state.session
      ? `session ${this.state.session.id} @ ${this.client.base}`
      : "connecting";
    this.errorBanner.textContent = this.state.error ?? "";
    this.errorBanner.style.display = this.state.error ? "" : "none";
    for (const panel of this.panels) {
      panel.update();
    }
  }

  private fail(error: unknown): void {
    this.state.error = error instanceof ApiError ? error.message : String(error);
    this.renderAll();
  }

  /** The spec an install would ship: the installed scene plus the draft. */
  pendingSpec(): SceneSpec {
    const base = this.state.scene ? sceneJsonToSpec(this.state.scene) : { objects: [] };
    return { ...base, objects: [...base.objects, ...draftToSpec(this.editor).objects] };
  }

  sceneDraftProblems(): string[] {
    return sceneProblems(this.pendingSpec());
  }

  /** Keep draft ids unique against the server scene and drop stale picks. */
  private syncWithScene(): void {
    const ids = new Set((this.state.scene?.objects ?? []).map((o) => o.id));
    for (const id of ids) {
      const numbered = /^o(\d+)$/.exec(id);
      if (numbered) {
        this.editor.nextIndex = Math.max(this.editor.nextIndex, Number(numbered[1]) + 1);
      }
    }
    if (this.editor.target !== null && !ids.has(this.editor.target)) {
      this.editor.target = null;
    }
    if (this.editor.anchor !== null && !ids.has(this.editor.anchor)) {
      this.editor.anchor = null;
    }
  }

  // -- actions --------------------------------------------------------------

  async newSession(): Promise<void> {
    try {
      const info = await this.client.createSession(0);
      this.state = initialServerState();
      this.state.session = info;
      this.editor = initialEditorDraft();
      this.lesson = initialLessonDraft();
      this.recorder = initialRecorderDraft();
      window.location.hash = `session=${info.id}`;
      await this.refreshMetrics();
      this.renderAll();
    } catch (error) {
      this.fail(error);
    }
  }

  async installScene(): Promise<void> {
    const spec = this.pendingSpec();
    const problems = sceneProblems(spec);
    if (problems.length) {
      this.state.error = problems.join("; ");
      this.renderAll();
      return;
    }
    try {
      this.state.scene = await this.client.setScene(this.sessionId, spec);
      this.editor.objects = []; // shipped; they render as installed now
      this.state.error = null;
      this.syncWithScene();
      this.renderAll();
    } catch (error) {
      this.fail(error);
    }
  }

  /** Wipe the table server-side (and with it any draft in progress). */
  async clearTable(): Promise<void> {
    try {
      this.state.scene = await this.client.setScene(this.sessionId, { objects: [] });
      this.editor.objects = [];
      this.state.error = null;
      this.syncWithScene();
      this.renderAll();
    } catch (error) {
      this.fail(error);
    }
  }

  async submitLesson(): Promise<void> {
    try {
      const reply = await this.client.submitLesson(this.sessionId, {
        content: this.lesson.content,
        signal: this.lesson.signal,
      });
      await this.absorbReply(reply);
    } catch (error) {
      this.fail(error);
    }
  }

  toggleRecorder(): void {
    if (this.recorder.active) {
      this.recorder = initialRecorderDraft();
    } else {
      this.recorder.active = true;
      this.recorder.initial = this.state.scene
        ? sceneJsonToSpec(this.state.scene)
        : draftToSpec(this.editor);
    }
    this.renderAll();
  }

  async submitDemo(): Promise<void> {
    const parsed = DemoRequest.safeParse({
      content: this.recorder.content,
      signal: this.recorder.signal,
      initial: this.recorder.initial ?? draftToSpec(this.editor),
      actions: this.recorder.actions,
    });
    if (!parsed.success) {
      this.state.error = parsed.error.issues.map((issue) => issue.message).join("; ");
      this.renderAll();
      return;
    }
    try {
      const reply = await this.client.submitDemo(this.sessionId, parsed.data);
      this.recorder = initialRecorderDraft();
      await this.absorbReply(reply);
    } catch (error) {
      this.fail(error);
    }
  }

  /** Fold a lesson reply in, then re-fetch every projection it may touch. */
  private async absorbReply(reply: LessonReply): Promise<void> {
    this.state.reply = reply;
    this.state.scene = reply.scene;
    this.state.error = null;
    this.syncWithScene();
    await this.refreshWords();
    await this.refreshMetrics();
    const inspected = this.state.inspected;
    if (inspected && inspected.word) {
      await this.inspect(inspected.word);
    }
    this.renderAll();
  }

  async inspect(word: string): Promise<void> {
    try {
      this.state.inspected = await this.client.getConcept(this.sessionId, word);
      this.renderAll();
    } catch (error) {
      this.fail(error);
    }
  }

  async refreshScene(): Promise<void> {
    try {
      this.state.scene = await this.client.getScene(this.sessionId);
      this.syncWithScene();
    } catch (error) {
      this.fail(error);
    }
  }

  async refreshWords(): Promise<void> {
    try {
      const memory = await this.client.getMemory(this.sessionId);
      this.state.words = memory.words;
    } catch (error) {
      this.fail(error);
    }
  }

  async refreshMetrics(): Promise<void> {
    try {
      this.state.metrics = await this.client.getMetrics(this.sessionId);
    } catch (error) {
      this.fail(error);
    }
  }

  startPolling(intervalMs: number): void {
    this.stopPolling();
    this.pollHandle = setInterval(() => {
      void this.refreshMetrics().then(() => this.renderAll());
    }, intervalMs);
  }

  stopPolling(): void {
    if (this.pollHandle !== null) {
      clearInterval(this.pollHandle);
      this.pollHandle = null;
    }
  }
}
