"""Scorer abstraction: P(entailment | premise, hypothesis) / P(is_next | ...).

Backends:
  remote           POST ``<endpoint>/v1/score`` speaking the wire protocol
                   ``{"mode", "pairs": [{"premise", "hypothesis"}, ...]}`` ->
                   ``{"scores": [...], "model_id": "..."}``
  fixture          exact lookup in a JSONL file of
                   ``{"premise", "hypothesis", "mode"?, "probability"}``
  lexical_overlap  Jaccard over lowercased alphabetic tokens minus stopwords;
                   exists to make the pipeline runnable offline, documented as
                   NOT reproducing any real model's scores
  uniform          0.5 for every pair

Every backend is deterministic per request, so scoring is invariant under
batch partitioning and worker count. Results are cached in an append-only
JSONL keyed by :func:`cache_key` for crash-safe resumption of large runs.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .errors import ScorerError

log = logging.getLogger(__name__)

MODES = ("entailment", "next_sentence")
SCORER_KINDS = ("remote", "fixture", "lexical_overlap", "uniform")

# fixed stopword list for the lexical-overlap backend; changing it changes
# that backend's scores, so treat it as part of the backend's identity
STOPWORDS = frozenset("""
a an the and or but if then than that this these those of in on at by for
with about against between into through during before after above below to
from up down out off over under again further is am are was were be been
being have has had having do does did doing will would can could should it
its he she they them his her their i you we me my your our as not no nor so
too very just now such each few more most other some any all both own same
what which who whom why how where when here there
""".split())

_TOKEN = re.compile(r"[a-z]+")


@dataclass(frozen=True)
class ScoreRequest:
    premise: str
    hypothesis: str
    mode: str = "entailment"

    def __post_init__(self):
        if not self.premise or not self.hypothesis:
            raise ScorerError("score request with empty premise or hypothesis")
        if self.mode not in MODES:
            raise ScorerError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class ScoreRecord:
    """A scored pair as persisted in the cache file."""

    request: ScoreRequest
    scorer_id: str
    probability: float
    timestamp: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "key": cache_key(self.request, self.scorer_id),
                "scorer_id": self.scorer_id,
                "mode": self.request.mode,
                "premise": self.request.premise,
                "hypothesis": self.request.hypothesis,
                "probability": self.probability,
                "timestamp": self.timestamp,
            },
            ensure_ascii=False,
            sort_keys=True,
        )


@dataclass(frozen=True)
class ScorerConfig:
    kind: str = "uniform"
    mode: str = "entailment"
    endpoint: str | None = None
    fixture_path: str | None = None
    batch_size: int = 32
    timeout: float = 30.0
    max_retries: int = 3
    backoff: float = 0.5
    workers: int = 1
    scorer_id: str | None = None
    cache_path: str | None = None

    def __post_init__(self):
        if self.kind not in SCORER_KINDS:
            raise ScorerError(f"scorer kind must be one of {SCORER_KINDS}, got {self.kind!r}")
        if self.mode not in MODES:
            raise ScorerError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.kind == "remote" and not self.endpoint:
            raise ScorerError("remote scorer requires an endpoint")
        if self.kind == "fixture" and not self.fixture_path:
            raise ScorerError("fixture scorer requires a fixture_path")
        if self.batch_size < 1:
            raise ScorerError("batch_size must be positive")
        if self.max_retries < 0:
            raise ScorerError("max_retries must be non-negative")
        if self.workers < 1:
            raise ScorerError("workers must be positive")

    def resolved_scorer_id(self) -> str:
        if self.scorer_id:
            return self.scorer_id
        return {"uniform": "uniform", "lexical_overlap": "lexical-overlap",
                "fixture": "fixture", "remote": "remote"}[self.kind]


def cache_key(request: ScoreRequest, scorer_id: str) -> str:
    """Deterministic, machine-portable cache key.

    Algorithm (stable across versions so cache files travel): sha256 hex
    digest of the UTF-8 bytes of the compact JSON array
    ``[scorer_id, mode, premise, hypothesis]`` serialized with
    ``ensure_ascii=False`` and separators ``(",", ":")``.
    """
    blob = json.dumps(
        [scorer_id, request.mode, request.premise, request.hypothesis],
        ensure_ascii=False,
        separators=(",", ":"),
    ).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def overlap_tokens(text: str) -> frozenset[str]:
    """Lowercased alphabetic tokens with stopwords removed."""
    return frozenset(_TOKEN.findall(text.lower())) - STOPWORDS


def _jaccard(premise: str, hypothesis: str) -> float:
    a, b = overlap_tokens(premise), overlap_tokens(hypothesis)
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


class _UniformBackend:
    def score_pairs(self, requests: list[ScoreRequest]) -> list[float]:
        return [0.5] * len(requests)


class _LexicalOverlapBackend:
    def score_pairs(self, requests: list[ScoreRequest]) -> list[float]:
        return [_jaccard(r.premise, r.hypothesis) for r in requests]


class _FixtureBackend:
    """Exact-match lookup; unseen pairs are an error, never a silent default."""

    def __init__(self, mapping: dict[tuple, float]):
        self._mapping = mapping

    @classmethod
    def from_path(cls, path: str | Path) -> "_FixtureBackend":
        mapping: dict[tuple, float] = {}
        with Path(path).open(encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                if not raw.strip():
                    continue
                try:
                    rec = json.loads(raw)
                    premise, hypothesis = rec["premise"], rec["hypothesis"]
                    probability = float(rec["probability"])
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise ScorerError(f"fixture file line {lineno}: {exc}") from None
                if "mode" in rec:
                    mapping[(rec["mode"], premise, hypothesis)] = probability
                else:
                    mapping[(premise, hypothesis)] = probability
        return cls(mapping)

    def score_pairs(self, requests: list[ScoreRequest]) -> list[float]:
        out = []
        for req in requests:
            prob = self._mapping.get((req.mode, req.premise, req.hypothesis))
            if prob is None:
                prob = self._mapping.get((req.premise, req.hypothesis))
            if prob is None:
                raise ScorerError(
                    f"fixture miss: ({req.premise!r}, {req.hypothesis!r}, {req.mode})"
                )
            out.append(prob)
        return out


class _RemoteBackend:
    """HTTP client for the /v1/score wire protocol with retry + backoff.

    Retries connection errors, timeouts and 5xx (incl. 503 model-loading);
    a 400 means the request itself violates the protocol and fails fast.
    """

    def __init__(self, endpoint: str, timeout: float, max_retries: int, backoff: float):
        self.url = endpoint.rstrip("/") + "/v1/score"
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff

    def score_pairs(self, requests: list[ScoreRequest]) -> list[float]:
        import requests as http

        modes = {r.mode for r in requests}
        assert len(modes) == 1, "remote chunks are grouped by mode before dispatch"
        payload = {
            "mode": requests[0].mode,
            "pairs": [{"premise": r.premise, "hypothesis": r.hypothesis} for r in requests],
        }
        last_error = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            try:
                resp = http.post(self.url, json=payload, timeout=self.timeout)
            except (http.ConnectionError, http.Timeout) as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                continue
            if resp.status_code == 400:
                raise ScorerError(f"scoring server rejected the request (400): {resp.text[:200]}")
            if resp.status_code >= 500 or resp.status_code == 429:
                last_error = f"HTTP {resp.status_code}"
                continue
            if resp.status_code != 200:
                raise ScorerError(f"unexpected HTTP {resp.status_code} from {self.url}")
            return self._parse(resp, len(requests))
        raise ScorerError(
            f"remote scorer at {self.url} failed after {self.max_retries + 1} attempts "
            f"({last_error})"
        )

    def _parse(self, resp, expected: int) -> list[float]:
        try:
            body = resp.json()
            scores = [float(s) for s in body["scores"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise ScorerError(f"malformed remote response: {exc}") from None
        if len(scores) != expected:
            raise ScorerError(
                f"malformed remote response: {len(scores)} scores for {expected} pairs"
            )
        return scores


def _make_backend(config: ScorerConfig):
    if config.kind == "uniform":
        return _UniformBackend()
    if config.kind == "lexical_overlap":
        return _LexicalOverlapBackend()
    if config.kind == "fixture":
        return _FixtureBackend.from_path(config.fixture_path)
    return _RemoteBackend(config.endpoint, config.timeout, config.max_retries, config.backoff)


class Scorer:
    """Caching, batching front end over a scoring backend.

    Thread-safe: chunks may be scored concurrently (``config.workers``), the
    cache serializes appends through a single lock, and results are merged
    by cache key, so outputs are independent of completion order.
    """

    def __init__(self, config: ScorerConfig, backend=None):
        self.config = config
        self.scorer_id = config.resolved_scorer_id()
        self._backend = backend if backend is not None else _make_backend(config)
        self._lock = threading.Lock()
        self._cache: dict[str, float] = {}
        self._cache_path = Path(config.cache_path) if config.cache_path else None
        self.dispatch_count = 0  # pairs actually sent to the backend
        if self._cache_path and self._cache_path.exists():
            self._load_cache()

    def _load_cache(self) -> None:
        with self._cache_path.open(encoding="utf-8") as fh:
            for raw in fh:
                if not raw.strip():
                    continue
                try:
                    rec = json.loads(raw)
                    self._cache[rec["key"]] = float(rec["probability"])
                except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                    log.warning("skipping malformed cache line in %s", self._cache_path)

    def _persist(self, records: list[ScoreRecord]) -> None:
        if not self._cache_path:
            return
        self._cache_path.parent.mkdir(parents=True, exist_ok=True)
        with self._cache_path.open("a", encoding="utf-8") as fh:
            for rec in records:
                fh.write(rec.to_json() + "\n")

    def score_batch(self, requests: list[ScoreRequest]) -> list[float]:
        """One probability per request, order-preserving.

        Cached pairs are served without re-dispatch; identical uncached pairs
        within one call are dispatched once. Splitting a request list into
        sub-batches and concatenating the results equals scoring it whole.
        """
        if not requests:
            raise ScorerError("score_batch requires at least one request")
        keys = [cache_key(r, self.scorer_id) for r in requests]
        pending: dict[str, ScoreRequest] = {}
        for key, req in zip(keys, requests):
            if key not in self._cache and key not in pending:
                pending[key] = req
        if pending:
            chunks = self._chunk(list(pending.items()))
            if self.config.workers > 1 and len(chunks) > 1:
                with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                    list(pool.map(self._score_chunk, range(len(chunks)), chunks))
            else:
                for idx, chunk in enumerate(chunks):
                    self._score_chunk(idx, chunk)
        return [self._cache[key] for key in keys]

    def _chunk(self, items: list[tuple[str, ScoreRequest]]) -> list[list[tuple[str, ScoreRequest]]]:
        # group by mode so remote payloads stay single-mode, then split to batch_size
        by_mode: dict[str, list[tuple[str, ScoreRequest]]] = {}
        for item in items:
            by_mode.setdefault(item[1].mode, []).append(item)
        size = self.config.batch_size
        chunks = []
        for group in by_mode.values():
            chunks.extend(group[i:i + size] for i in range(0, len(group), size))
        return chunks

    def _score_chunk(self, idx: int, chunk: list[tuple[str, ScoreRequest]]) -> None:
        reqs = [req for _, req in chunk]
        try:
            probs = self._backend.score_pairs(reqs)
        except ScorerError as exc:
            raise ScorerError(f"batch {idx} ({len(reqs)} pairs): {exc}") from exc
        bad = [p for p in probs if not (0.0 <= p <= 1.0)]
        if bad:
            raise ScorerError(f"batch {idx}: backend returned probabilities outside [0,1]: {bad[:3]}")
        now = time.time()
        records = [
            ScoreRecord(request=req, scorer_id=self.scorer_id, probability=prob, timestamp=now)
            for (_, req), prob in zip(chunk, probs)
        ]
        with self._lock:
            self.dispatch_count += len(reqs)
            for (key, _), prob in zip(chunk, probs):
                self._cache[key] = prob
            self._persist(records)


def score_batch(config: ScorerConfig, requests: list[ScoreRequest]) -> list[float]:
    """Score a batch with a throwaway :class:`Scorer` built from ``config``."""
    return Scorer(config).score_batch(requests)
