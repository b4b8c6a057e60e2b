import express, { type Express } from "express";
import { z } from "zod";
import type { ServerConfig } from "./config.js";
import type { ScoringBackend } from "./scoring.js";

const pairSchema = z.object({
  premise: z.string().min(1, "premise must be non-empty"),
  hypothesis: z.string().min(1, "hypothesis must be non-empty"),
});

const scoreRequestSchema = z.object({
  mode: z.enum(["entailment", "next_sentence"]),
  pairs: z.array(pairSchema).min(1, "pairs must be non-empty"),
});

/**
 * The /v1/score wire protocol:
 *   request   {"mode": "entailment"|"next_sentence",
 *              "pairs": [{"premise": "...", "hypothesis": "..."}, ...]}
 *   response  {"scores": [0.93, ...], "model_id": "..."}
 * with 400 on schema violations (including a mode that does not match this
 * server's configured head), 413 when the batch exceeds max_batch, and 503
 * until the model has loaded. One server hosts one (model, mode) pair;
 * response order always matches request order.
 */
export function buildApp(config: ServerConfig, backend: ScoringBackend): Express {
  const app = express();
  app.use(express.json({ limit: "5mb" }));

  app.get("/v1/health", (_req, res) => {
    if (!backend.ready()) {
      res.status(503).json({ status: "loading" });
      return;
    }
    res.json({ status: "ok" });
  });

  app.get("/v1/info", (_req, res) => {
    res.json({
      model_id: config.modelId,
      mode: config.mode,
      max_batch: config.maxBatch,
      truncation: "longest-first to the model's maximum input length",
      backend: backend.id,
    });
  });

  app.post("/v1/score", (req, res) => {
    const parsed = scoreRequestSchema.safeParse(req.body);
    if (!parsed.success) {
      res.status(400).json({ error: parsed.error.issues[0]?.message ?? "invalid request" });
      return;
    }
    const { mode, pairs } = parsed.data;
    if (mode !== config.mode) {
      res.status(400).json({
        error: `this server scores ${config.mode}; start one with --mode ${mode} for that proxy task`,
      });
      return;
    }
    if (pairs.length > config.maxBatch) {
      res.status(413).json({
        error: `batch of ${pairs.length} exceeds max_batch ${config.maxBatch}`,
      });
      return;
    }
    if (!backend.ready()) {
      res.status(503).json({ error: "model is still loading" });
      return;
    }
    const scores = backend.scorePairs(mode, pairs);
    res.json({ scores, model_id: config.modelId });
  });

  // malformed JSON bodies surface as a 400, not a stack trace
  app.use((err: unknown, _req: express.Request, res: express.Response, next: express.NextFunction) => {
    if (err instanceof SyntaxError) {
      res.status(400).json({ error: "request body is not valid JSON" });
      return;
    }
    next(err);
  });

  return app;
}
