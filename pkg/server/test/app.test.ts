import { readFileSync } from "node:fs";
import type { AddressInfo } from "node:net";
import type { Server } from "node:http";
import { afterEach, describe, expect, it } from "vitest";

import { buildApp } from "../src/app.js";
import { parseConfig, type ServerConfig } from "../src/config.js";
import { makeBackend, HashBackend, OverlapBackend, type ScoringBackend } from "../src/scoring.js";

const golden = JSON.parse(readFileSync(new URL("../golden/requests.json", import.meta.url), "utf-8"));

let servers: Server[] = [];

afterEach(() => {
  for (const server of servers) server.close();
  servers = [];
});

async function startServer(
  overrides: Partial<ServerConfig> = {},
  backend?: ScoringBackend,
  { awaitLoad = true } = {},
): Promise<string> {
  const config: ServerConfig = {
    modelId: "test-model",
    mode: "entailment",
    backend: "overlap",
    maxBatch: 8,
    port: 0,
    loadDelayMs: 0,
    ...overrides,
  };
  const scoring = backend ?? makeBackend(config.backend, config.loadDelayMs);
  const app = buildApp(config, scoring);
  const server = app.listen(0);
  servers.push(server);
  await new Promise((resolve) => server.once("listening", resolve));
  const loading = scoring.load();
  if (awaitLoad) await loading;
  const { port } = server.address() as AddressInfo;
  return `http://127.0.0.1:${port}`;
}

async function score(url: string, body: unknown): Promise<{ status: number; json: any }> {
  const response = await fetch(`${url}/v1/score`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  return { status: response.status, json: await response.json() };
}

describe("golden request file", () => {
  it("answers every shipped case with the expected status and shape", async () => {
    const url = await startServer({
      mode: golden.server.mode,
      maxBatch: golden.server.max_batch,
    });
    for (const testCase of golden.cases) {
      const { status, json } = await score(url, testCase.body);
      expect(status, testCase.name).toBe(testCase.expect_status);
      if (testCase.expect_status === 200) {
        expect(json.model_id, testCase.name).toBeTypeOf("string");
        expect(Array.isArray(json.scores), testCase.name).toBe(true);
        expect(json.scores.length, testCase.name).toBe(testCase.expect_scores);
        for (const value of json.scores) {
          expect(value, testCase.name).toBeGreaterThanOrEqual(0);
          expect(value, testCase.name).toBeLessThanOrEqual(1);
        }
        for (const [a, b] of testCase.equal_indices ?? []) {
          expect(json.scores[a], testCase.name).toBe(json.scores[b]);
        }
      } else {
        expect(json.error, testCase.name).toBeTypeOf("string");
      }
    }
  });
});

describe("/v1/score", () => {
  it("preserves request order: batch equals pairwise scoring", async () => {
    const url = await startServer({ backend: "hash" });
    const pairs = [
      { premise: "alpha text", hypothesis: "about A" },
      { premise: "beta text", hypothesis: "about B" },
      { premise: "gamma text", hypothesis: "about C" },
    ];
    const batch = await score(url, { mode: "entailment", pairs });
    expect(batch.status).toBe(200);
    for (let i = 0; i < pairs.length; i++) {
      const single = await score(url, { mode: "entailment", pairs: [pairs[i]] });
      expect(single.json.scores[0]).toBe(batch.json.scores[i]);
    }
  });

  it("is deterministic for identical request bodies", async () => {
    const url = await startServer({ backend: "hash" });
    const body = {
      mode: "entailment",
      pairs: [{ premise: "the same premise", hypothesis: "the same hypothesis" }],
    };
    const first = await score(url, body);
    const second = await score(url, body);
    expect(first.json.scores[0]).toBeCloseTo(second.json.scores[0], 6);
    expect(first.json.scores[0]).toBe(second.json.scores[0]);
  });

  it("serves a copy-of-premise pair with an in-range score", async () => {
    const url = await startServer();
    const text = "The basic structural and functional unit of all organisms.";
    const { status, json } = await score(url, {
      mode: "entailment",
      pairs: [{ premise: text, hypothesis: text }],
    });
    expect(status).toBe(200);
    expect(json.scores[0]).toBeGreaterThanOrEqual(0);
    expect(json.scores[0]).toBeLessThanOrEqual(1);
  });

  it("a next_sentence server scores is-next requests", async () => {
    const url = await startServer({ mode: "next_sentence", backend: "hash" });
    const { status, json } = await score(url, {
      mode: "next_sentence",
      pairs: [{ premise: "She opened the fridge.", hypothesis: "The domain of the sentence is about Food." }],
    });
    expect(status).toBe(200);
    expect(json.scores).toHaveLength(1);
  });

  it("mode is salted into hash-backend scores", async () => {
    const backend = new HashBackend();
    await backend.load();
    const pair = { premise: "p", hypothesis: "h" };
    expect(backend.scorePairs("entailment", [pair])[0]).not.toBe(
      backend.scorePairs("next_sentence", [pair])[0],
    );
  });

  it("rejects non-JSON bodies with 400", async () => {
    const url = await startServer();
    const response = await fetch(`${url}/v1/score`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: "premise=x&hypothesis=y",
    });
    expect(response.status).toBe(400);
  });

  it("answers 503 while the model is loading and 200 after", async () => {
    const backend = new OverlapBackend(150);
    const url = await startServer({}, backend, { awaitLoad: false });
    const body = { mode: "entailment", pairs: [{ premise: "p", hypothesis: "h" }] };
    const during = await score(url, body);
    expect(during.status).toBe(503);
    await new Promise((resolve) => setTimeout(resolve, 200));
    const after = await score(url, body);
    expect(after.status).toBe(200);
  });

  it("handles concurrent batches without mixing responses", async () => {
    const url = await startServer({ backend: "hash", maxBatch: 64 });
    const bodies = Array.from({ length: 12 }, (_, i) => ({
      mode: "entailment",
      pairs: [{ premise: `premise ${i}`, hypothesis: `hypothesis ${i}` }],
    }));
    const results = await Promise.all(bodies.map((body) => score(url, body)));
    const sequential = [];
    for (const body of bodies) sequential.push(await score(url, body));
    for (let i = 0; i < bodies.length; i++) {
      expect(results[i].json.scores[0]).toBe(sequential[i].json.scores[0]);
    }
  });
});

describe("/v1/health and /v1/info", () => {
  it("health reflects readiness", async () => {
    const backend = new OverlapBackend(150);
    const url = await startServer({}, backend, { awaitLoad: false });
    expect((await fetch(`${url}/v1/health`)).status).toBe(503);
    await new Promise((resolve) => setTimeout(resolve, 200));
    expect((await fetch(`${url}/v1/health`)).status).toBe(200);
  });

  it("info names the model, mode and truncation policy", async () => {
    const url = await startServer({ modelId: "my-nli-large", mode: "entailment" });
    const info = await (await fetch(`${url}/v1/info`)).json();
    expect(info.model_id).toBe("my-nli-large");
    expect(info.mode).toBe("entailment");
    expect(info.max_batch).toBe(8);
    expect(info.truncation).toContain("longest-first");
  });
});

describe("config parsing", () => {
  it("flags override environment which overrides defaults", () => {
    const config = parseConfig(["--mode", "next_sentence", "--max-batch=16"], {
      SCORE_SERVER_MODE: "entailment",
      SCORE_SERVER_MODEL_ID: "env-model",
    } as NodeJS.ProcessEnv);
    expect(config.mode).toBe("next_sentence");
    expect(config.maxBatch).toBe(16);
    expect(config.modelId).toBe("env-model");
  });

  it("rejects invalid modes and batch sizes", () => {
    expect(() => parseConfig(["--mode", "translation"], {} as NodeJS.ProcessEnv)).toThrow(/mode/);
    expect(() => parseConfig(["--max-batch", "0"], {} as NodeJS.ProcessEnv)).toThrow(/max-batch/);
  });
});
