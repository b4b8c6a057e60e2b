import { createHash } from "node:crypto";
import type { Mode } from "./config.js";

export interface Pair {
  premise: string;
  hypothesis: string;
}

/**
 * A scoring backend maps sentence pairs to probabilities in [0, 1].
 *
 * The two built-in backends are deterministic, dependency-free stand-ins so
 * the service runs offline; they do NOT reproduce any pretrained model's
 * scores. A checkpoint-backed backend implements this same interface and
 * resolves `load()` once its weights are in memory — until then the server
 * answers 503.
 */
export interface ScoringBackend {
  readonly id: string;
  ready(): boolean;
  load(): Promise<void>;
  scorePairs(mode: Mode, pairs: Pair[]): number[];
}

const STOPWORDS = new Set(
  ("a an the and or but if then than that this these those of in on at by for with about " +
    "against between into through during before after above below to from up down out off " +
    "over under again further is am are was were be been being have has had having do does " +
    "did doing will would can could should it its he she they them his her their i you we " +
    "me my your our as not no nor so too very just now such each few more most other some " +
    "any all both own same what which who whom why how where when here there").split(" "),
);

function contentTokens(text: string): Set<string> {
  const tokens = text.toLowerCase().match(/[a-z]+/g) ?? [];
  return new Set(tokens.filter((t) => !STOPWORDS.has(t)));
}

/** Jaccard overlap of content tokens; a similarity proxy, mode-insensitive. */
export class OverlapBackend implements ScoringBackend {
  readonly id = "overlap-offline";
  private loaded = false;

  constructor(private readonly loadDelayMs = 0) {}

  ready(): boolean {
    return this.loaded;
  }

  async load(): Promise<void> {
    if (this.loadDelayMs > 0) {
      await new Promise((resolve) => setTimeout(resolve, this.loadDelayMs));
    }
    this.loaded = true;
  }

  scorePairs(_mode: Mode, pairs: Pair[]): number[] {
    return pairs.map(({ premise, hypothesis }) => {
      const a = contentTokens(premise);
      const b = contentTokens(hypothesis);
      const union = new Set([...a, ...b]);
      if (union.size === 0) return 0;
      let shared = 0;
      for (const token of a) if (b.has(token)) shared++;
      return shared / union.size;
    });
  }
}

/** sha256-derived pseudo-probabilities, salted by mode; uniform-ish spread. */
export class HashBackend implements ScoringBackend {
  readonly id = "hash-offline";
  private loaded = false;

  constructor(private readonly loadDelayMs = 0) {}

  ready(): boolean {
    return this.loaded;
  }

  async load(): Promise<void> {
    if (this.loadDelayMs > 0) {
      await new Promise((resolve) => setTimeout(resolve, this.loadDelayMs));
    }
    this.loaded = true;
  }

  scorePairs(mode: Mode, pairs: Pair[]): number[] {
    return pairs.map(({ premise, hypothesis }) => {
      const digest = createHash("sha256")
        .update(`${mode}${premise}${hypothesis}`)
        .digest();
      return digest.readUInt32BE(0) / 0xffffffff;
    });
  }
}

export function makeBackend(kind: "overlap" | "hash", loadDelayMs = 0): ScoringBackend {
  return kind === "hash" ? new HashBackend(loadDelayMs) : new OverlapBackend(loadDelayMs);
}
