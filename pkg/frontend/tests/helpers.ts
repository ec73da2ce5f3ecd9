/**
 * Shared test plumbing: a node:http fetch shim (jsdom has no fetch of its
 * own), a condition waiter, a canned in-memory service fake for pure DOM
 * tests, and the inspector DOM extractor the byte-for-value check uses.
 */

import http from "node:http";

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export function fakeResponse(status: number, body: unknown): Response {
  const text = body === null ? "" : JSON.stringify(body);
  return {
    ok: status >= 200 && status < 300,
    status,
    text: async () => text,
    json: async () => JSON.parse(text),
  } as unknown as Response;
}

/** Minimal fetch over node:http; enough surface for TeachClient. */
export const httpFetch: FetchLike = (url, init = {}) =>
  new Promise((resolve, reject) => {
    const u = new URL(url);
    const request = http.request(
      {
        hostname: u.hostname,
        port: u.port,
        path: u.pathname + u.search,
        method: init.method ?? "GET",
        headers: (init.headers as Record<string, string>) ?? {},
      },
      (response) => {
        const chunks: Buffer[] = [];
        response.on("data", (chunk) => chunks.push(chunk));
        response.on("end", () => {
          const text = Buffer.concat(chunks).toString("utf8");
          const status = response.statusCode ?? 0;
          resolve({
            ok: status >= 200 && status < 300,
            status,
            text: async () => text,
            json: async () => JSON.parse(text),
          } as unknown as Response);
        });
      },
    );
    request.on("error", reject);
    if (init.body) {
      request.write(init.body);
    }
    request.end();
  });

export async function until(
  check: () => boolean,
  label: string,
  timeoutMs = 20_000,
): Promise<void> {
  const start = Date.now();
  while (!check()) {
    if (Date.now() - start > timeoutMs) {
      throw new Error(`timed out waiting for ${label}`);
    }
    await new Promise((r) => setTimeout(r, 25));
  }
}

// -- canned service fake ----------------------------------------------------

export interface FakeService {
  fetch: FetchLike;
  /** Bodies of mutating requests, in order, as [method+path, parsed body]. */
  recorded: [string, unknown][];
  /** Queue a reply for the next POST lesson/demo. */
  queueLesson(status: number, body: unknown): void;
  conceptPayload: unknown;
  metricsPayload: unknown;
  wordsPayload: Record<string, string>;
}

const EMPTY_SCENE = {
  bounds: { x_min: 0, y_min: 0, x_max: 10, y_max: 10 },
  objects: [] as unknown[],
};

export function defaultMetrics(): unknown {
  return {
    session: "fake00000001",
    lessons: { inform: 0, verify: 0, react: 0 },
    memory: { creates: 0, stores: 0, queries: 0, projections: 0 },
    concepts: 0,
    cumulative_stores: [],
    verify: { attempts: 0, successes: 0 },
  };
}

export function makeFakeService(): FakeService {
  let scene: unknown = EMPTY_SCENE;
  const lessonQueue: [number, unknown][] = [];

  const fake: FakeService = {
    recorded: [],
    queueLesson(status, body) {
      lessonQueue.push([status, body]);
    },
    conceptPayload: null,
    metricsPayload: defaultMetrics(),
    wordsPayload: {},
    fetch: async (url, init = {}) => {
      const u = new URL(url);
      const method = init.method ?? "GET";
      const path = u.pathname;
      const body = init.body ? JSON.parse(String(init.body)) : undefined;
      if (method !== "GET") {
        fake.recorded.push([`${method} ${path}`, body]);
      }

      if (method === "POST" && path === "/v1/session") {
        return fakeResponse(201, { id: "fake00000001", seed: 0, words: [] });
      }
      if (method === "DELETE") {
        return fakeResponse(204, null);
      }
      if (path.endsWith("/scene")) {
        if (method === "PUT") {
          // Echo the spec back the way the service would: defaults filled in.
          scene = {
            bounds: body.bounds ?? { x_min: 0, y_min: 0, x_max: 10, y_max: 10 },
            objects: (body.objects as Record<string, unknown>[]).map((o) => ({
              w: 0.4,
              h: 0.4,
              held: false,
              ...o,
            })),
          };
        }
        return fakeResponse(200, { scene });
      }
      if (method === "POST" && (path.endsWith("/lesson") || path.endsWith("/demo"))) {
        const next = lessonQueue.shift();
        if (!next) {
          return fakeResponse(422, { detail: "fake has no scripted reply" });
        }
        return fakeResponse(next[0], next[1]);
      }
      if (path.endsWith("/memory")) {
        if (u.searchParams.has("concept")) {
          if (fake.conceptPayload === null) {
            return fakeResponse(404, { detail: "unknown concept" });
          }
          return fakeResponse(200, fake.conceptPayload);
        }
        return fakeResponse(200, {
          thresholds: { assimilation: 0.01, probability: 0.6, match: 0.75 },
          counters: { creates: 0, stores: 0, queries: 0, projections: 0 },
          words: fake.wordsPayload,
          kinds: {},
          contexts: [],
        });
      }
      if (path.endsWith("/metrics")) {
        return fakeResponse(200, fake.metricsPayload);
      }
      if (path === "/v1/health") {
        return fakeResponse(200, { status: "ok", sessions: 1 });
      }
      return fakeResponse(404, { detail: `fake: no route ${method} ${path}` });
    },
  };
  return fake;
}

export function replyFixture(overrides: Record<string, unknown> = {}): unknown {
  return {
    status: "success",
    detail: "stored 1 example(s), created 1 concept(s)",
    creates: 1,
    stores: 1,
    plan: [],
    scene: EMPTY_SCENE,
    diff: { added: [], removed: [], moved: [], held_before: null, held_after: null },
    ...overrides,
  };
}

// -- DOM extraction ---------------------------------------------------------

function textOf(node: Element | null): string {
  if (!node || !node.firstChild) {
    throw new Error("expected a populated cell");
  }
  return node.firstChild.textContent ?? "";
}

/** Read the inspector panel back into plain data; numbers via JSON.parse. */
export function extractInspector(root: ParentNode): unknown {
  const meta = root.querySelector<HTMLElement>("#inspector-meta");
  if (!meta || meta.dataset.concept === undefined) {
    throw new Error("inspector is empty");
  }
  const generalizations = [...root.querySelectorAll<HTMLElement>("#inspector-body section.gen")].map(
    (section) => ({
      id: section.dataset.genId,
      example_count: JSON.parse(section.dataset.exampleCount ?? "null"),
      next_entity_index: JSON.parse(section.dataset.nextEntityIndex ?? "null"),
      facts: [...section.querySelectorAll("tr.fact-row")].map((row) => ({
        fact: row.querySelector(".fact-cell")?.textContent ?? "",
        aligned_count: JSON.parse(textOf(row.querySelector(".aligned-cell"))),
        probability: JSON.parse(textOf(row.querySelector(".prob-cell"))),
      })),
    }),
  );
  const examples = [...root.querySelectorAll("#example-list li.lone-example")].map((item) =>
    [...item.querySelectorAll(".example-fact")].map((span) => span.textContent ?? ""),
  );
  return {
    concept: meta.dataset.concept,
    context_id: meta.dataset.contextId,
    word: meta.dataset.word === "" ? null : meta.dataset.word,
    kind: meta.dataset.kind,
    example_total: JSON.parse(meta.dataset.exampleTotal ?? "null"),
    generalizations,
    examples,
  };
}

export function mountPoint(): HTMLElement {
  document.body.innerHTML = '<div id="app"></div>';
  window.location.hash = "";
  return document.getElementById("app")!;
}
