export type Mode = "entailment" | "next_sentence";

export interface ServerConfig {
  modelId: string;
  mode: Mode;
  backend: "overlap" | "hash";
  maxBatch: number;
  port: number;
  /** artificial model-load delay in ms; exercises the 503-while-loading path */
  loadDelayMs: number;
}

const DEFAULTS: ServerConfig = {
  modelId: "overlap-offline",
  mode: "entailment",
  backend: "overlap",
  maxBatch: 64,
  port: 8400,
  loadDelayMs: 0,
};

function pick(flags: Map<string, string>, env: NodeJS.ProcessEnv, flag: string, envVar: string): string | undefined {
  return flags.get(flag) ?? env[envVar];
}

/** Flags override environment variables; both override defaults. */
export function parseConfig(argv: string[] = [], env: NodeJS.ProcessEnv = process.env): ServerConfig {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) continue;
    const eq = arg.indexOf("=");
    if (eq >= 0) {
      flags.set(arg.slice(2, eq), arg.slice(eq + 1));
    } else {
      flags.set(arg.slice(2), argv[i + 1] ?? "");
      i++;
    }
  }
  const mode = pick(flags, env, "mode", "SCORE_SERVER_MODE") ?? DEFAULTS.mode;
  if (mode !== "entailment" && mode !== "next_sentence") {
    throw new Error(`mode must be entailment or next_sentence, got ${mode}`);
  }
  const backend = pick(flags, env, "backend", "SCORE_SERVER_BACKEND") ?? DEFAULTS.backend;
  if (backend !== "overlap" && backend !== "hash") {
    throw new Error(`backend must be overlap or hash, got ${backend}`);
  }
  const maxBatch = Number(pick(flags, env, "max-batch", "SCORE_SERVER_MAX_BATCH") ?? DEFAULTS.maxBatch);
  if (!Number.isInteger(maxBatch) || maxBatch < 1) {
    throw new Error(`max-batch must be a positive integer, got ${maxBatch}`);
  }
  return {
    modelId: pick(flags, env, "model-id", "SCORE_SERVER_MODEL_ID") ?? DEFAULTS.modelId,
    mode,
    backend,
    maxBatch,
    port: Number(pick(flags, env, "port", "SCORE_SERVER_PORT") ?? DEFAULTS.port),
    loadDelayMs: Number(pick(flags, env, "load-delay-ms", "SCORE_SERVER_LOAD_DELAY_MS") ?? 0),
  };
}
