/**
 * Typed fetch client for the teach service.
 *
 * One mutating request may be in flight at a time, mirroring the server's
 * per-session 409 contract; a second mutation started client-side is
 * rejected before it reaches the wire.  Error envelopes are surfaced
 * verbatim so panels can show the service's own words.
 */

import { z } from "zod";
import {
  ConceptPayload,
  DemoRequest,
  HealthPayload,
  LessonReply,
  LessonRequest,
  MemoryPayload,
  MetricsPayload,
  SceneEnvelope,
  SceneJson,
  SceneSpec,
  SessionInfo,
} from "./schema.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`${status}: ${detail}`);
    this.name = "ApiError";
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class TeachClient {
  private mutationInFlight = false;

  constructor(
    readonly base: string,
    private readonly fetchFn: FetchLike = (...args) => globalThis.fetch(...args),
  ) {}

  get busy(): boolean {
    return this.mutationInFlight;
  }

  private async request<T>(
    method: string,
    path: string,
    schema: z.ZodType<T, z.ZodTypeDef, unknown>,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      const text = await response.text();
      let detail = text;
      try {
        const envelope = JSON.parse(text);
        detail =
          typeof envelope.detail === "string" ? envelope.detail : JSON.stringify(envelope.detail);
      } catch {
        // Not JSON; keep the raw body.
      }
      throw new ApiError(response.status, detail);
    }
    if (response.status === 204) {
      return schema.parse(null);
    }
    return schema.parse(await response.json());
  }

  private async mutate<T>(
    method: string,
    path: string,
    schema: z.ZodType<T, z.ZodTypeDef, unknown>,
    body?: unknown,
  ): Promise<T> {
    if (this.mutationInFlight) {
      throw new ApiError(409, "a lesson is already in flight");
    }
    this.mutationInFlight = true;
    try {
      return await this.request(method, path, schema, body);
    } finally {
      this.mutationInFlight = false;
    }
  }

  // -- sessions -------------------------------------------------------------

  createSession(seed = 0): Promise<SessionInfo> {
    return this.mutate("POST", "/v1/session", SessionInfo, { seed });
  }

  deleteSession(id: string): Promise<null> {
    return this.mutate("DELETE", `/v1/session/${id}`, z.null());
  }

  // -- world ----------------------------------------------------------------

  setScene(id: string, scene: SceneSpec): Promise<SceneJson> {
    return this.mutate(
      "PUT",
      `/v1/session/${id}/scene`,
      SceneEnvelope.transform((e) => e.scene),
      scene,
    );
  }

  getScene(id: string): Promise<SceneJson> {
    return this.request(
      "GET",
      `/v1/session/${id}/scene`,
      SceneEnvelope.transform((e) => e.scene),
    );
  }

  // -- lessons --------------------------------------------------------------

  submitLesson(id: string, lesson: LessonRequest): Promise<LessonReply> {
    return this.mutate("POST", `/v1/session/${id}/lesson`, LessonReply, lesson);
  }

  submitDemo(id: string, demo: DemoRequest): Promise<LessonReply> {
    return this.mutate("POST", `/v1/session/${id}/demo`, LessonReply, demo);
  }

  // -- inspection (never mutates) -------------------------------------------

  getMemory(id: string): Promise<MemoryPayload> {
    return this.request("GET", `/v1/session/${id}/memory`, MemoryPayload);
  }

  getConcept(id: string, concept: string): Promise<ConceptPayload> {
    const query = new URLSearchParams({ concept });
    return this.request("GET", `/v1/session/${id}/memory?${query}`, ConceptPayload);
  }

  getMetrics(id: string): Promise<MetricsPayload> {
    return this.request("GET", `/v1/session/${id}/metrics`, MetricsPayload);
  }

  health(): Promise<z.infer<typeof HealthPayload>> {
    return this.request("GET", "/v1/health", HealthPayload);
  }
}
