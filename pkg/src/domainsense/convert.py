"""Converter from the XML + gold-key evaluation layout to canonical JSONL.

The XML holds ``<sentence>`` elements whose children are ``<wf>`` (plain
tokens) and ``<instance>`` (annotated targets), each carrying ``lemma`` and
``pos`` attributes with the surface form as text. The gold key file has one
line per instance: ``<instance_id> <key> [<key> ...]``. Keys may be synset
ids (``00006484-n``) directly, or sense keys resolved through an optional
``<sense_key>\\t<synset_id>`` TSV map.
"""

from __future__ import annotations

import json
import logging
import xml.etree.ElementTree as ET
from pathlib import Path

from .errors import DatasetError, LexiconError
from .lexicon import SynsetId, normalize_lemma, normalize_pos

log = logging.getLogger(__name__)


def load_sensekey_map(path: str | Path) -> dict[str, str]:
    mapping: dict[str, str] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise DatasetError(f"{path}:{lineno}: expected 2 fields, got {len(fields)}")
            mapping[fields[0].strip()] = fields[1].strip()
    return mapping


def load_gold_keys(path: str | Path) -> dict[str, list[str]]:
    gold: dict[str, list[str]] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            parts = raw.split()
            if not parts:
                continue
            if len(parts) < 2:
                raise DatasetError(f"{path}:{lineno}: instance id without gold keys")
            gold[parts[0]] = parts[1:]
    return gold


def _resolve_key(key: str, sensekey_map: dict[str, str] | None) -> str:
    if "%" in key:
        if not sensekey_map or key not in sensekey_map:
            raise DatasetError(
                f"gold key {key!r} is a sense key; provide a sense-key map that covers it"
            )
        return sensekey_map[key]
    return str(SynsetId.parse(key))


def convert_unified(
    xml_path: str | Path,
    gold_path: str | Path,
    out_path: str | Path,
    sensekey_map_path: str | Path | None = None,
) -> int:
    """Convert one corpus; returns the number of instances written.

    Contexts are the sentence tokens joined by single spaces; target spans
    are character offsets of the instance's surface form inside that string.
    Instances missing from the gold key file fail the conversion by name.
    """
    sensekey_map = load_sensekey_map(sensekey_map_path) if sensekey_map_path else None
    gold_keys = load_gold_keys(gold_path)
    tree = ET.parse(xml_path)

    records = []
    problems = []
    for sentence in tree.getroot().iter("sentence"):
        tokens = []
        targets = []  # (element, start, end)
        offset = 0
        for element in sentence:
            if element.tag not in ("wf", "instance"):
                continue
            surface = (element.text or "").strip()
            if not surface:
                problems.append(f"{xml_path}: empty token in sentence {sentence.get('id')}")
                continue
            if tokens:
                offset += 1  # joining space
            start = offset
            offset += len(surface)
            tokens.append(surface)
            if element.tag == "instance":
                targets.append((element, start, offset))
        context = " ".join(tokens)
        for element, start, end in targets:
            instance_id = element.get("id")
            if not instance_id:
                problems.append(f"{xml_path}: instance without id in sentence {sentence.get('id')}")
                continue
            if instance_id not in gold_keys:
                problems.append(f"{instance_id}: no gold key")
                continue
            try:
                resolved = [_resolve_key(key, sensekey_map) for key in gold_keys[instance_id]]
                gold = list(dict.fromkeys(resolved))  # two keys may share a synset
                pos = normalize_pos(element.get("pos", ""))
            except (DatasetError, LexiconError) as exc:  # bad key, pos tag, synset id
                problems.append(f"{instance_id}: {exc}")
                continue
            records.append(
                {
                    "id": instance_id,
                    "lemma": normalize_lemma(element.get("lemma", "")),
                    "pos": pos,
                    "context": context,
                    "target_start": start,
                    "target_end": end,
                    "gold": gold,
                }
            )
    if problems:
        raise DatasetError(f"{len(problems)} problem(s) while converting {xml_path}", problems)

    with Path(out_path).open("w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")
    log.info("converted %d instances from %s", len(records), xml_path)
    return len(records)
