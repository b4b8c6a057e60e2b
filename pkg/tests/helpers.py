"""Shared test utilities: fixture-file builders, spy backend, scripted HTTP server."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from domainsense import DomainInventory, ScorerConfig, SynsetId, WsdInstance


def write_fixture_file(path: Path, mapping: dict) -> Path:
    """Write a fixture-scorer file. Keys: (premise, hypothesis) or
    (premise, hypothesis, mode); values: probabilities."""
    with path.open("w", encoding="utf-8") as fh:
        for key, prob in mapping.items():
            rec = {"premise": key[0], "hypothesis": key[1], "probability": prob}
            if len(key) == 3:
                rec["mode"] = key[2]
            fh.write(json.dumps(rec) + "\n")
    return path


def fixture_config(tmp_path: Path, mapping: dict, **overrides) -> ScorerConfig:
    fixture = write_fixture_file(tmp_path / "scores.jsonl", mapping)
    kwargs = {"kind": "fixture", "fixture_path": str(fixture)}
    kwargs.update(overrides)
    return ScorerConfig(**kwargs)


class SpyBackend:
    """Wraps a backend, recording every request that reaches it."""

    def __init__(self, inner):
        self.inner = inner
        self.requests = []
        self._lock = threading.Lock()

    def score_pairs(self, requests):
        with self._lock:
            self.requests.extend(requests)
        return self.inner.score_pairs(requests)


def make_instance(
    instance_id: str,
    lemma: str = "word",
    pos: str = "n",
    candidates: list[str] | None = None,
    gold: list[str] | None = None,
    context: str | None = None,
) -> WsdInstance:
    candidates = candidates or ["10000001-n"]
    gold = gold or [candidates[0]]
    context = context or f"A sentence mentioning {lemma} clearly."
    start = context.index(lemma) if lemma in context else 0
    end = start + len(lemma) if lemma in context else 1
    return WsdInstance(
        instance_id=instance_id,
        lemma=lemma,
        pos=pos,
        context=context,
        target_span=(start, end),
        gold_senses=tuple(SynsetId.parse(g) for g in gold),
        candidate_senses=tuple(SynsetId.parse(c) for c in candidates),
    )


def make_inventory(name: str, assignments: dict[str, list[str]], **kwargs) -> DomainInventory:
    labels = set()
    for lbls in assignments.values():
        labels.update(lbls)
    if kwargs.get("fallback_label"):
        labels.add(kwargs["fallback_label"])
    if kwargs.get("hierarchy"):
        labels.update(kwargs["hierarchy"])
    return DomainInventory(
        name=name,
        labels=frozenset(labels),
        assignments={SynsetId.parse(sid): tuple(lbls) for sid, lbls in assignments.items()},
        **kwargs,
    )


class ScriptedScoreServer:
    """Minimal /v1/score server whose responses follow a scripted sequence.

    Script entries are either an int status (error response) or the string
    "ok" (valid scores: 0.5 per pair). After the script runs out, "ok"
    repeats. Records every JSON payload received.
    """

    def __init__(self, script=()):
        self.script = list(script)
        self.payloads = []
        self.calls = 0
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                body = self.rfile.read(int(self.headers.get("Content-Length", 0)))
                payload = json.loads(body)
                outer.payloads.append(payload)
                step = outer.script[outer.calls] if outer.calls < len(outer.script) else "ok"
                outer.calls += 1
                if step == "ok":
                    scores = [0.5] * len(payload.get("pairs", []))
                    data = json.dumps({"scores": scores, "model_id": "scripted"}).encode()
                    self.send_response(200)
                elif step == "short":
                    data = json.dumps({"scores": [0.5], "model_id": "scripted"}).encode()
                    self.send_response(200)
                elif step == "garbage":
                    data = b"not json"
                    self.send_response(200)
                else:
                    data = json.dumps({"error": "scripted"}).encode()
                    self.send_response(int(step))
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    def __enter__(self):
        self._thread.start()
        host, port = self._server.server_address
        return self, f"http://{host}:{port}"

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()
