"""Premise/hypothesis rendering from prompt templates.

A template's hypothesis pattern holds ``{label}`` exactly once and may hold
``{word}`` once; the premise is passed through untouched. The two segments
form a standard sentence-pair input for an entailment or next-sentence
scorer.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import PromptError

_PLACEHOLDER = re.compile(r"\{([^{}]*)\}")
_KNOWN_PLACEHOLDERS = {"label", "word"}
_PREMISE_SOURCES = ("gloss", "context")


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    hypothesis_pattern: str
    premise_source: str

    def __post_init__(self):
        if self.premise_source not in _PREMISE_SOURCES:
            raise PromptError(
                f"template {self.id!r}: premise_source must be one of {_PREMISE_SOURCES}"
            )
        names = _PLACEHOLDER.findall(self.hypothesis_pattern)
        unknown = [n for n in names if n not in _KNOWN_PLACEHOLDERS]
        if unknown:
            raise PromptError(f"template {self.id!r}: unknown placeholder(s) {unknown}")
        if names.count("label") != 1:
            raise PromptError(f"template {self.id!r}: pattern must contain {{label}} exactly once")
        if names.count("word") > 1:
            raise PromptError(f"template {self.id!r}: pattern may contain {{word}} at most once")
        leftovers = _PLACEHOLDER.sub("", self.hypothesis_pattern)
        if "{" in leftovers or "}" in leftovers:
            raise PromptError(f"template {self.id!r}: stray brace in pattern")

    @property
    def requires_word(self) -> bool:
        return "{word}" in self.hypothesis_pattern


@dataclass(frozen=True)
class Hypothesis:
    text: str
    domain: str
    template_id: str


def builtin_templates() -> list[PromptTemplate]:
    """The three built-in templates: dl_sentence, wsd_sentence, wsd_word."""
    return [
        PromptTemplate("dl_sentence", "The domain of the sentence is about {label}.", "gloss"),
        PromptTemplate("wsd_sentence", "The domain of the sentence is about {label}.", "context"),
        PromptTemplate("wsd_word", "{label} is the domain of {word}.", "context"),
    ]


def get_template(template_id: str, extra: list[PromptTemplate] | None = None) -> PromptTemplate:
    for template in (extra or []) + builtin_templates():
        if template.id == template_id:
            return template
    raise PromptError(f"unknown template id {template_id!r}")


def load_templates(path: str | Path) -> list[PromptTemplate]:
    """Load user templates from a JSON file (one object or a list of objects)."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        data = [data]
    templates = []
    for rec in data:
        try:
            templates.append(
                PromptTemplate(
                    id=str(rec["id"]),
                    hypothesis_pattern=str(rec["hypothesis_pattern"]),
                    premise_source=str(rec["premise_source"]),
                )
            )
        except (KeyError, TypeError) as exc:
            raise PromptError(f"invalid template record in {path}: {exc}") from None
    return templates


def _render_hypothesis(template: PromptTemplate, label: str, word: str | None) -> Hypothesis:
    if template.requires_word and not word:
        raise PromptError(f"template {template.id!r} requires a word binding")
    text = template.hypothesis_pattern.replace("{label}", label)
    if template.requires_word:
        text = text.replace("{word}", word)  # type: ignore[arg-type]
    # collapse doubled spaces a substitution may introduce; no other cleanup
    text = re.sub(r" {2,}", " ", text)
    if "{" in text:
        raise PromptError(f"residual placeholder delimiter in rendered hypothesis: {text!r}")
    if not text:
        raise PromptError(f"template {template.id!r} rendered an empty hypothesis")
    return Hypothesis(text=text, domain=label, template_id=template.id)


def render_pair(
    template: PromptTemplate,
    premise_text: str,
    label: str,
    word: str | None = None,
) -> tuple[str, Hypothesis]:
    """Render one (premise, hypothesis) pair; the premise passes through unmodified.

    A word binding is mandatory when the pattern contains ``{word}``; an
    unused binding is ignored.
    """
    if not premise_text:
        raise PromptError("empty premise")
    return premise_text, _render_hypothesis(template, label, word)


def generate_hypotheses(
    template: PromptTemplate,
    labels: list[str] | tuple[str, ...],
    word: str | None = None,
) -> list[Hypothesis]:
    """One hypothesis per label, preserving label order."""
    if not labels:
        raise PromptError("generate_hypotheses requires at least one label")
    return [_render_hypothesis(template, label, word) for label in labels]
