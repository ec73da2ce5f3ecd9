/**
 * The /v1 wire contract, as zod schemas.
 *
 * Everything the console sends or renders passes through these parsers, so
 * a contract drift fails loudly at the boundary instead of as a blank
 * panel.  Field names and defaults mirror the service schemas exactly.
 */

import { z } from "zod";

export const COLORS = ["green", "blue", "red", "yellow", "purple"] as const;
export const SHAPES = ["box", "cone", "ball", "cylinder"] as const;

export type Color = (typeof COLORS)[number];
export type Shape = (typeof SHAPES)[number];

// -- client -> server -------------------------------------------------------

export const ObjectSpec = z.object({
  id: z.string(),
  shape: z.string(),
  color: z.string(),
  x: z.number(),
  y: z.number(),
  w: z.number().default(0.4),
  h: z.number().default(0.4),
  held: z.boolean().default(false),
});
export type ObjectSpec = z.infer<typeof ObjectSpec>;

export const BoundsSpec = z.object({
  x_min: z.number().default(0.0),
  y_min: z.number().default(0.0),
  x_max: z.number().default(10.0),
  y_max: z.number().default(10.0),
});
export type BoundsSpec = z.infer<typeof BoundsSpec>;

export const SceneSpec = z.object({
  objects: z.array(ObjectSpec),
  bounds: BoundsSpec.optional(),
});
export type SceneSpec = z.infer<typeof SceneSpec>;

export const Signal = z.enum(["inform", "verify", "react"]);
export type Signal = z.infer<typeof Signal>;

export const LessonRequest = z.object({
  content: z.string(),
  signal: Signal,
  scene: SceneSpec.optional(),
});
export type LessonRequest = z.infer<typeof LessonRequest>;

export const ActionSpec = z
  .object({
    type: z.enum(["pick-up", "place", "point"]),
    object: z.string().optional(),
    position: z.tuple([z.number(), z.number()]).optional(),
  })
  .superRefine((action, ctx) => {
    // Same argument rules the service enforces with a 422.
    if (action.type === "place") {
      if (action.position === undefined) {
        ctx.addIssue({ code: z.ZodIssueCode.custom, message: "place needs a position" });
      }
    } else if (action.object === undefined) {
      ctx.addIssue({ code: z.ZodIssueCode.custom, message: `${action.type} needs an object` });
    }
  });
export type ActionSpec = z.infer<typeof ActionSpec>;

export const DemoRequest = z.object({
  content: z.string(),
  signal: z.enum(["inform", "verify"]).default("inform"),
  initial: SceneSpec,
  actions: z.array(ActionSpec).min(1),
});
export type DemoRequest = z.infer<typeof DemoRequest>;

// -- server -> client -------------------------------------------------------

export const ObjectJson = z.object({
  id: z.string(),
  shape: z.string(),
  color: z.string(),
  x: z.number(),
  y: z.number(),
  w: z.number(),
  h: z.number(),
  held: z.boolean(),
});
export type ObjectJson = z.infer<typeof ObjectJson>;

export const SceneJson = z.object({
  bounds: z.object({
    x_min: z.number(),
    y_min: z.number(),
    x_max: z.number(),
    y_max: z.number(),
  }),
  objects: z.array(ObjectJson),
});
export type SceneJson = z.infer<typeof SceneJson>;

export const SessionInfo = z.object({
  id: z.string(),
  seed: z.number(),
  words: z.array(z.string()),
});
export type SessionInfo = z.infer<typeof SessionInfo>;

export const MovedObject = z.object({
  id: z.string(),
  from_xy: z.tuple([z.number(), z.number()]),
  to_xy: z.tuple([z.number(), z.number()]),
});

export const SceneDiff = z.object({
  added: z.array(z.string()),
  removed: z.array(z.string()),
  moved: z.array(MovedObject),
  held_before: z.string().nullable(),
  held_after: z.string().nullable(),
});
export type SceneDiff = z.infer<typeof SceneDiff>;

export const LessonReply = z.object({
  status: z.string(),
  detail: z.string(),
  creates: z.number(),
  stores: z.number(),
  plan: z.array(z.string()),
  scene: SceneJson,
  diff: SceneDiff,
});
export type LessonReply = z.infer<typeof LessonReply>;

export const Thresholds = z.object({
  assimilation: z.number(),
  probability: z.number(),
  match: z.number(),
});

const FactRow = z.object({
  fact: z.string(),
  aligned_count: z.number(),
  probability: z.number(),
});
export type FactRow = z.infer<typeof FactRow>;

const Generalization = z.object({
  id: z.string(),
  example_count: z.number(),
  next_entity_index: z.number(),
  facts: z.array(FactRow),
});
export type Generalization = z.infer<typeof Generalization>;

export const ContextSnapshot = z.object({
  concept: z.string(),
  context_id: z.string(),
  thresholds: Thresholds,
  generalizations: z.array(Generalization),
  examples: z.array(z.array(z.string())),
  gen_serial: z.number(),
});

export const ConceptPayload = ContextSnapshot.extend({
  word: z.string().nullable(),
  kind: z.string(),
  example_total: z.number(),
});
export type ConceptPayload = z.infer<typeof ConceptPayload>;

export const MemoryPayload = z.object({
  thresholds: Thresholds,
  counters: z.object({
    creates: z.number(),
    stores: z.number(),
    queries: z.number(),
    projections: z.number(),
  }),
  words: z.record(z.string()),
  kinds: z.record(z.string()),
  contexts: z.array(ContextSnapshot),
});
export type MemoryPayload = z.infer<typeof MemoryPayload>;

export const MetricsPayload = z.object({
  session: z.string(),
  lessons: z.object({
    inform: z.number(),
    verify: z.number(),
    react: z.number(),
  }),
  memory: z.object({
    creates: z.number(),
    stores: z.number(),
    queries: z.number(),
    projections: z.number(),
  }),
  concepts: z.number(),
  cumulative_stores: z.array(z.number()),
  verify: z.object({ attempts: z.number(), successes: z.number() }),
});
export type MetricsPayload = z.infer<typeof MetricsPayload>;

export const SceneEnvelope = z.object({ scene: SceneJson });

export const HealthPayload = z.object({ status: z.string(), sessions: z.number() });

// -- scene validation -------------------------------------------------------

/** Pre-flight check matching the shape/color rules the service 422s on. */
export function sceneProblems(spec: SceneSpec): string[] {
  const problems: string[] = [];
  const seen = new Set<string>();
  for (const obj of spec.objects) {
    if (!(SHAPES as readonly string[]).includes(obj.shape)) {
      problems.push(`unknown shape '${obj.shape}'`);
    }
    if (!(COLORS as readonly string[]).includes(obj.color)) {
      problems.push(`unknown color '${obj.color}'`);
    }
    if (seen.has(obj.id)) {
      problems.push(`duplicate object id '${obj.id}'`);
    }
    seen.add(obj.id);
  }
  return problems;
}
