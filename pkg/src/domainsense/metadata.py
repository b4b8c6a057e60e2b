"""Run metadata: what produced a prediction file, and from which inputs."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

# conventions that shape results but are not obvious from config values
POLICIES = {
    "gold_domains": "union over all gold senses' domains; matching any counts correct",
    "multi_label_assignments": "a sense contributes all its labels to the candidate set",
    "prompt_pair": "premise and hypothesis are the two segments of a sentence-pair input",
    "word_binding": "{word} binds the instance lemma, not the surface form",
}


def file_sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunMetadata:
    task: str
    template_id: str
    inventory_name: str
    inventory_hash: str
    scorer_id: str
    scorer_kind: str
    mode: str
    tie_break: str
    n_instances: int
    n_scored_pairs: int
    n_dispatched: int
    started_at: str
    finished_at: str
    seed: int | None = None
    workers: int = 1
    hints_mode: str | None = None
    input_hashes: dict[str, str] = field(default_factory=dict)
    policies: dict[str, str] = field(default_factory=lambda: dict(POLICIES))

    def inputs_hash(self) -> str:
        """Combined hash that changes whenever any input file changes."""
        blob = json.dumps(
            {"inventory": self.inventory_hash, "files": dict(sorted(self.input_hashes.items()))},
            sort_keys=True,
        ).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    def write(self, path: str | Path) -> None:
        payload = asdict(self)
        payload["inputs_hash"] = self.inputs_hash()
        Path(path).write_text(
            json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )


def hash_input_files(paths: dict[str, str | Path | None]) -> dict[str, str]:
    """sha256 per named input file, skipping absent entries."""
    return {
        role: file_sha256(path)
        for role, path in paths.items()
        if path is not None and Path(path).is_file()
    }
