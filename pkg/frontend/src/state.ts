/**
 * Console state.
 *
 * Split on principle: `ServerState` holds nothing but the service's own
 * responses (the UI is a pure projection of it; the console never
 * simulates agent logic), while the draft types hold client-side input
 * that has not been sent yet.
 */

import type {
  ActionSpec,
  Color,
  ConceptPayload,
  LessonReply,
  MetricsPayload,
  SceneJson,
  SceneSpec,
  SessionInfo,
  Shape,
  Signal,
} from "./schema.js";

export interface ServerState {
  session: SessionInfo | null;
  scene: SceneJson | null;
  reply: LessonReply | null;
  inspected: ConceptPayload | null;
  words: Record<string, string> | null; // word -> concept name, from get_memory_state
  metrics: MetricsPayload | null;
  error: string | null; // last error envelope, verbatim
}

export interface DraftObject {
  id: string;
  shape: Shape;
  color: Color;
  x: number;
  y: number;
}

export interface EditorDraft {
  objects: DraftObject[];
  shape: Shape;
  color: Color;
  nextIndex: number;
  // Installed objects picked as the two ends of a relation phrase.  The
  // target is the object being described, the anchor its reference.
  target: string | null;
  anchor: string | null;
}

export interface LessonDraft {
  content: string;
  signal: Signal;
}

export type RecorderTool = "pick-up" | "place" | "point";

export interface RecorderDraft {
  active: boolean;
  tool: RecorderTool;
  content: string;
  signal: "inform" | "verify";
  initial: SceneSpec | null; // scene captured when recording started
  actions: ActionSpec[];
}

export function initialServerState(): ServerState {
  return {
    session: null,
    scene: null,
    reply: null,
    inspected: null,
    words: null,
    metrics: null,
    error: null,
  };
}

export function initialEditorDraft(): EditorDraft {
  return { objects: [], shape: "box", color: "red", nextIndex: 1, target: null, anchor: null };
}

export function initialLessonDraft(): LessonDraft {
  return { content: "", signal: "inform" };
}

export function initialRecorderDraft(): RecorderDraft {
  return {
    active: false,
    tool: "pick-up",
    content: "",
    signal: "inform",
    initial: null,
    actions: [],
  };
}

export function draftToSpec(draft: EditorDraft): SceneSpec {
  return {
    objects: draft.objects.map((o) => ({
      id: o.id,
      shape: o.shape,
      color: o.color,
      x: o.x,
      y: o.y,
      w: 0.4,
      h: 0.4,
      held: false,
    })),
  };
}

/** Echo a server scene back as a request spec (used as a demo's initial state). */
export function sceneJsonToSpec(scene: SceneJson): SceneSpec {
  return {
    objects: scene.objects.map((o) => ({ ...o })),
    bounds: { ...scene.bounds },
  };
}

export function describeAction(action: ActionSpec): string {
  if (action.type === "place") {
    const [x, y] = action.position ?? [0, 0];
    return `place(${x.toFixed(2)}, ${y.toFixed(2)})`;
  }
  return `${action.type}(${action.object ?? "?"})`;
}
