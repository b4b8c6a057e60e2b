"""Sense lexicon, WSD datasets, gloss-label gold sets, and hint stripping.

File formats:
  lexicon TSV     ``<synset_id>\\t<lemma1,lemma2,...>\\t<gloss>`` (UTF-8, LF,
                  ``#``-prefixed comment lines ignored)
  WSD JSONL       ``{"id", "lemma", "pos", "context", "target_start",
                  "target_end", "gold": ["<synset_id>", ...]}``
  gloss JSONL     ``{"synset", "gloss", "gold": {"<inventory>": ["<label>", ...]}}``
"""

from __future__ import annotations

import json
import logging
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DatasetError, LexiconError

log = logging.getLogger(__name__)

POS_TAGS = ("n", "v", "a", "r")

# display names used by per-POS evaluation tables
POS_CATEGORY = {"n": "Noun", "v": "Verb", "a": "Adj", "r": "Adv"}

_POS_ALIASES = {
    "n": "n", "noun": "n",
    "v": "v", "verb": "v",
    "a": "a", "adj": "a", "adjective": "a", "s": "a",
    "r": "r", "adv": "r", "adverb": "r",
}


def normalize_pos(tag: str) -> str:
    """Map a part-of-speech tag to one of ``n``, ``v``, ``a``, ``r``.

    Accepts the one-letter tags, full names and the adjective-satellite
    tag ``s`` (folded into ``a``). Case-insensitive.
    """
    try:
        return _POS_ALIASES[tag.strip().lower()]
    except KeyError:
        raise LexiconError(f"unknown part-of-speech tag {tag!r}") from None


def normalize_lemma(lemma: str) -> str:
    """Lowercase a lemma and join multiword expressions with underscores."""
    return lemma.strip().lower().replace(" ", "_")


def normalize_label(label: str) -> str:
    """Canonical domain-label form: NFC-normalized and whitespace-trimmed."""
    return unicodedata.normalize("NFC", label).strip()


@dataclass(frozen=True, order=True)
class SynsetId:
    """Synset identifier: 8-digit zero-padded offset plus POS tag.

    Canonical rendering is ``<offset>-<pos>``, e.g. ``00006484-n``.
    """

    offset: str
    pos: str

    def __post_init__(self):
        if len(self.offset) != 8 or not self.offset.isdigit():
            raise LexiconError(f"synset offset must be 8 decimal digits, got {self.offset!r}")
        if self.pos not in POS_TAGS:
            raise LexiconError(f"synset pos must be one of {POS_TAGS}, got {self.pos!r}")

    @classmethod
    def parse(cls, text: str) -> "SynsetId":
        offset, sep, pos = text.strip().partition("-")
        if not sep:
            raise LexiconError(f"not a synset id: {text!r} (expected <offset>-<pos>)")
        return cls(offset, normalize_pos(pos))

    def __str__(self) -> str:
        return f"{self.offset}-{self.pos}"


@dataclass(frozen=True)
class Synset:
    """A lexicon entry: identifier, gloss and the lemmas that share it."""

    id: SynsetId
    gloss: str
    lemmas: tuple[str, ...]
    pos: str = ""

    def __post_init__(self):
        if not self.gloss.strip():
            raise LexiconError(f"synset {self.id} has an empty gloss")
        if not self.lemmas:
            raise LexiconError(f"synset {self.id} has no lemmas")
        if not self.pos:
            object.__setattr__(self, "pos", self.id.pos)
        elif self.pos != self.id.pos:
            raise LexiconError(f"synset {self.id}: pos {self.pos!r} conflicts with id")


class Lexicon:
    """Immutable sense lexicon with a lemma index in file (sense-rank) order."""

    def __init__(self, synsets: Iterable[Synset]):
        self._by_id: dict[SynsetId, Synset] = {}
        self._by_lemma: dict[tuple[str, str], list[Synset]] = {}
        for syn in synsets:
            if syn.id in self._by_id:
                raise LexiconError(f"duplicate synset id {syn.id}")
            self._by_id[syn.id] = syn
            for lemma in syn.lemmas:
                self._by_lemma.setdefault((lemma, syn.pos), []).append(syn)

    def __len__(self) -> int:
        return len(self._by_id)

    def __iter__(self) -> Iterator[Synset]:
        return iter(self._by_id.values())

    def __contains__(self, synset_id: SynsetId) -> bool:
        return synset_id in self._by_id

    def __getitem__(self, synset_id: SynsetId) -> Synset:
        return self._by_id[synset_id]

    def get(self, synset_id: SynsetId) -> Synset | None:
        return self._by_id.get(synset_id)

    def senses_of(self, lemma: str, pos: str) -> list[Synset]:
        """Senses of ``lemma`` with the given POS, in lexicon (file) order.

        Unknown lemmas yield an empty list, not an error; sense rank 0 is
        the lexicon's first sense.
        """
        key = (normalize_lemma(lemma), normalize_pos(pos))
        return list(self._by_lemma.get(key, ()))


def load_lexicon(path: str | Path) -> Lexicon:
    """Load a TSV lexicon file. Raises LexiconError naming the offending line."""
    path = Path(path)
    synsets: list[Synset] = []
    seen: dict[SynsetId, int] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise LexiconError(
                    f"{path.name}:{lineno}: expected 3 tab-separated fields, got {len(fields)}"
                )
            id_text, lemma_field, gloss = fields
            try:
                sid = SynsetId.parse(id_text)
            except LexiconError as exc:
                raise LexiconError(f"{path.name}:{lineno}: {exc}") from None
            if sid in seen:
                raise LexiconError(
                    f"duplicate synset id {sid} on lines {seen[sid]} and {lineno} of {path.name}"
                )
            seen[sid] = lineno
            lemmas = []
            for lemma in lemma_field.split(","):
                lemma = normalize_lemma(lemma)
                if lemma and lemma not in lemmas:
                    lemmas.append(lemma)
            if not lemmas:
                raise LexiconError(f"{path.name}:{lineno}: no lemmas for {sid}")
            if not gloss.strip():
                raise LexiconError(f"{path.name}:{lineno}: empty gloss for {sid}")
            synsets.append(Synset(id=sid, gloss=gloss, lemmas=tuple(lemmas)))
    return Lexicon(synsets)


def dump_lexicon(lexicon: Lexicon, path: str | Path) -> None:
    """Write a lexicon back to TSV; load -> dump round trips data rows byte-for-byte."""
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for syn in lexicon:
            fh.write(f"{syn.id}\t{','.join(syn.lemmas)}\t{syn.gloss}\n")


def strip_hints(gloss: str) -> str:
    """Remove leading domain hints like ``(biology)`` from a gloss.

    A hint is a leading balanced parenthetical with no internal whitespace,
    followed by whitespace or end of string. Hints are stripped to a fixed
    point, so the function is idempotent; multi-token parentheticals such as
    ``(of a court)`` are usage notes, not hints, and are kept (a warning is
    logged when one remains at the front). Never lengthens its input and
    never touches a gloss that does not start with ``(``.
    """
    out = gloss
    while True:
        stripped = _strip_one_hint(out)
        if stripped is None:
            break
        out = stripped
    if out.startswith("("):
        log.warning("gloss still starts with a parenthetical after hint stripping: %.60r", out)
    return out


def _strip_one_hint(text: str) -> str | None:
    if not text.startswith("("):
        return None
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                rest = text[i + 1:]
                if rest and not rest[0].isspace():
                    return None  # glued to a word, e.g. "(a)symmetric"
                return rest.lstrip()
        elif ch.isspace():
            return None  # spans several tokens: a usage note, keep it
    return None  # unbalanced "("


@dataclass(frozen=True)
class WsdInstance:
    """A target word in context with its candidate senses and gold senses.

    ``candidate_senses`` follow lexicon sense order (index 0 = first sense);
    ``gold_senses`` is a non-empty subset of the candidates, stored in
    candidate order.
    """

    instance_id: str
    lemma: str
    pos: str
    context: str
    target_span: tuple[int, int]
    gold_senses: tuple[SynsetId, ...]
    candidate_senses: tuple[SynsetId, ...]

    def __post_init__(self):
        object.__setattr__(self, "pos", normalize_pos(self.pos))
        if not self.candidate_senses:
            raise DatasetError(f"instance {self.instance_id}: no candidate senses")
        if len(set(self.candidate_senses)) != len(self.candidate_senses):
            raise DatasetError(f"instance {self.instance_id}: duplicate candidate senses")
        if not self.gold_senses:
            raise DatasetError(f"instance {self.instance_id}: no gold senses")
        missing = [g for g in self.gold_senses if g not in self.candidate_senses]
        if missing:
            raise DatasetError(
                f"instance {self.instance_id}: gold senses not among candidates: "
                + ", ".join(str(m) for m in missing)
            )
        start, end = self.target_span
        if not (0 <= start < end <= len(self.context)):
            raise DatasetError(
                f"instance {self.instance_id}: target span {self.target_span} "
                f"outside context of length {len(self.context)}"
            )

    @property
    def surface_form(self) -> str:
        start, end = self.target_span
        return self.context[start:end]


@dataclass(frozen=True)
class GlossLabelInstance:
    """A synset gloss with per-inventory gold domain labels.

    Gold labels are validated against a concrete inventory's label set at
    run/eval time, since instances carry gold for several inventories.
    """

    synset: SynsetId
    gloss: str
    gold_labels: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.gloss.strip():
            raise DatasetError(f"gloss instance {self.synset}: empty gloss")
        if not self.gold_labels:
            raise DatasetError(f"gloss instance {self.synset}: no gold labels")
        for inv_name, labels in self.gold_labels.items():
            if not labels:
                raise DatasetError(
                    f"gloss instance {self.synset}: empty gold label list for {inv_name!r}"
                )


def _iter_jsonl(path: Path):
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                yield lineno, json.loads(raw)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"{path.name}:{lineno}: invalid JSON ({exc.msg})") from None


def load_wsd_dataset(path: str | Path, lexicon: Lexicon) -> list[WsdInstance]:
    """Load WSD instances, resolving candidate senses through the lexicon.

    Strict: any instance with an unknown lemma, a gold sense that is not
    among the lemma's senses, or a malformed record fails the whole load
    with a DatasetError listing every problem by instance id.
    """
    path = Path(path)
    instances: list[WsdInstance] = []
    problems: list[str] = []
    seen_ids: set[str] = set()
    for lineno, rec in _iter_jsonl(path):
        try:
            instance_id = str(rec["id"])
            lemma = normalize_lemma(str(rec["lemma"]))
            pos = normalize_pos(str(rec["pos"]))
            context = str(rec["context"])
            span = (int(rec["target_start"]), int(rec["target_end"]))
            gold_ids = [SynsetId.parse(g) for g in rec["gold"]]
        except (KeyError, TypeError, ValueError, LexiconError) as exc:
            problems.append(f"{path.name}:{lineno}: malformed record ({exc})")
            continue
        if instance_id in seen_ids:
            problems.append(f"{instance_id}: duplicate instance id")
            continue
        seen_ids.add(instance_id)
        candidates = tuple(s.id for s in lexicon.senses_of(lemma, pos))
        if not candidates:
            problems.append(f"{instance_id}: lemma {lemma!r} ({pos}) not in lexicon")
            continue
        gold = tuple(c for c in candidates if c in set(gold_ids))
        if len(gold) != len(set(gold_ids)):
            stray = [str(g) for g in gold_ids if g not in candidates]
            problems.append(
                f"{instance_id}: gold sense(s) not among the {len(candidates)} "
                f"candidates of {lemma!r}: {', '.join(stray)}"
            )
            continue
        try:
            instances.append(
                WsdInstance(
                    instance_id=instance_id,
                    lemma=lemma,
                    pos=pos,
                    context=context,
                    target_span=span,
                    gold_senses=gold,
                    candidate_senses=candidates,
                )
            )
        except DatasetError as exc:
            problems.append(str(exc))
    if problems:
        raise DatasetError(f"{len(problems)} invalid instance(s) in {path.name}", problems)
    return instances


def load_gloss_dataset(path: str | Path) -> list[GlossLabelInstance]:
    """Load gloss-label instances with per-inventory gold label maps."""
    path = Path(path)
    instances: list[GlossLabelInstance] = []
    problems: list[str] = []
    seen: set[SynsetId] = set()
    for lineno, rec in _iter_jsonl(path):
        try:
            sid = SynsetId.parse(str(rec["synset"]))
            gloss = str(rec["gloss"])
            gold = {
                str(inv): tuple(normalize_label(lbl) for lbl in labels)
                for inv, labels in dict(rec["gold"]).items()
            }
        except (KeyError, TypeError, ValueError, LexiconError) as exc:
            problems.append(f"{path.name}:{lineno}: malformed record ({exc})")
            continue
        if sid in seen:
            problems.append(f"{sid}: duplicate synset")
            continue
        seen.add(sid)
        try:
            instances.append(GlossLabelInstance(synset=sid, gloss=gloss, gold_labels=gold))
        except DatasetError as exc:
            problems.append(str(exc))
    if problems:
        raise DatasetError(f"{len(problems)} invalid instance(s) in {path.name}", problems)
    return instances
