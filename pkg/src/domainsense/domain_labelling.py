"""Zero-shot gloss -> domain classification over the full inventory label space.

Unlike WSD, nothing restricts the candidate set here: every inventory label
is scored for every gloss. Hint mode controls whether a leading parenthetical
domain marker in the gloss is kept or stripped from the premise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .errors import DatasetError
from .inventory import DomainInventory
from .lexicon import GlossLabelInstance, strip_hints
from .metadata import RunMetadata, hash_input_files, utc_now
from .prompts import PromptTemplate, generate_hypotheses, get_template
from .scoring import Scorer, ScorerConfig, ScoreRequest
from .wsd import argmax_label

TIE_BREAK = "alphabetical label order"

HINTS_MODES = ("with_hints", "without_hints")


@dataclass(frozen=True)
class DlPrediction:
    """Predicted domain label for one gloss, with scores for every label."""

    synset: str
    inventory: str
    predicted_label: str
    label_scores: dict[str, float]
    hints_mode: str


def _premise_for(gloss: str, hints_mode: str) -> str:
    if hints_mode not in HINTS_MODES:
        raise DatasetError(f"hints_mode must be one of {HINTS_MODES}, got {hints_mode!r}")
    return strip_hints(gloss) if hints_mode == "without_hints" else gloss


def label_gloss(
    instance: GlossLabelInstance,
    inv: DomainInventory,
    template: PromptTemplate,
    scorer: Scorer | ScorerConfig,
    hints_mode: str = "with_hints",
) -> DlPrediction:
    """Score the gloss against every inventory label and take the argmax.

    Labels are processed alphabetically, which doubles as the tie-break.
    """
    if not inv.labels:
        raise DatasetError(f"inventory {inv.name!r} has no labels")
    scorer = scorer if isinstance(scorer, Scorer) else Scorer(scorer)
    labels = sorted(inv.labels)
    premise = _premise_for(instance.gloss, hints_mode)
    hypotheses = generate_hypotheses(template, labels)
    requests = [
        ScoreRequest(premise=premise, hypothesis=h.text, mode=scorer.config.mode)
        for h in hypotheses
    ]
    probs = scorer.score_batch(requests)
    scores = dict(zip(labels, probs))
    return DlPrediction(
        synset=str(instance.synset),
        inventory=inv.name,
        predicted_label=argmax_label(labels, scores),
        label_scores=scores,
        hints_mode=hints_mode,
    )


def write_dl_predictions(predictions: list[DlPrediction], path: str | Path) -> None:
    """Persist predictions as deterministic JSONL (same shape as WSD plus hints_mode)."""
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for pred in predictions:
            fh.write(
                json.dumps(
                    {
                        "id": pred.synset,
                        "predicted_domain": pred.predicted_label,
                        "scores": pred.label_scores,
                        "hints_mode": pred.hints_mode,
                    },
                    sort_keys=True,
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_dl_predictions(path: str | Path) -> list[DlPrediction]:
    """Load a prediction JSONL file written by :func:`write_dl_predictions`."""
    predictions = []
    with Path(path).open(encoding="utf-8") as fh:
        for raw in fh:
            if not raw.strip():
                continue
            rec = json.loads(raw)
            predictions.append(
                DlPrediction(
                    synset=rec["id"],
                    inventory=rec.get("inventory", ""),
                    predicted_label=rec["predicted_domain"],
                    label_scores={label: float(p) for label, p in rec["scores"].items()},
                    hints_mode=rec.get("hints_mode", "with_hints"),
                )
            )
    return predictions


def run_domain_labelling(
    dataset: list[GlossLabelInstance],
    inv: DomainInventory,
    template: PromptTemplate | str,
    scorer_config: ScorerConfig,
    hints_mode: str = "with_hints",
    seed: int | None = None,
    input_paths: dict | None = None,
    output_dir: str | Path | None = None,
) -> tuple[list[DlPrediction], RunMetadata]:
    """Label every gloss in the dataset; output is sorted by synset id.

    Every instance must carry gold labels for this inventory, and those
    labels must exist in its label set; offenders fail the run by name.
    An empty dataset is not an error and yields an empty output.
    """
    if isinstance(template, str):
        template = get_template(template)
    scorer = Scorer(scorer_config)
    started = utc_now()
    labels = sorted(inv.labels)

    problems = []
    for instance in dataset:
        gold = instance.gold_labels.get(inv.name)
        if gold is None:
            problems.append(f"{instance.synset}: no gold labels for inventory {inv.name!r}")
            continue
        stray = [l for l in gold if l not in inv.labels]
        if stray:
            problems.append(f"{instance.synset}: gold label(s) {stray} not in inventory {inv.name!r}")
    if problems:
        raise DatasetError(f"{len(problems)} invalid instance(s) for {inv.name!r}", problems)

    requests: list[ScoreRequest] = []
    for instance in dataset:
        premise = _premise_for(instance.gloss, hints_mode)
        for h in generate_hypotheses(template, labels):
            requests.append(ScoreRequest(premise=premise, hypothesis=h.text, mode=scorer.config.mode))
    probs = scorer.score_batch(requests) if requests else []

    predictions: list[DlPrediction] = []
    for i, instance in enumerate(dataset):
        scores = dict(zip(labels, probs[i * len(labels):(i + 1) * len(labels)]))
        predictions.append(
            DlPrediction(
                synset=str(instance.synset),
                inventory=inv.name,
                predicted_label=argmax_label(labels, scores),
                label_scores=scores,
                hints_mode=hints_mode,
            )
        )
    predictions.sort(key=lambda p: p.synset)

    meta = RunMetadata(
        task="domain_labelling",
        template_id=template.id,
        inventory_name=inv.name,
        inventory_hash=inv.content_hash(),
        scorer_id=scorer.scorer_id,
        scorer_kind=scorer_config.kind,
        mode=scorer_config.mode,
        tie_break=TIE_BREAK,
        n_instances=len(dataset),
        n_scored_pairs=len(requests),
        n_dispatched=scorer.dispatch_count,
        started_at=started,
        finished_at=utc_now(),
        seed=seed,
        workers=scorer_config.workers,
        hints_mode=hints_mode,
        input_hashes=hash_input_files(input_paths or {}),
    )
    if output_dir is not None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_dl_predictions(predictions, out / "predictions.jsonl")
        meta.write(out / "run_metadata.json")
    return predictions, meta


class ZeroShotGlossLabeler(BaseEstimator, ClassifierMixin):
    """Estimator-style gloss classifier: X is a sequence of gloss strings.

    Composes with the usual ecosystem tooling — ``predict`` returns one
    inventory label per gloss and ``score`` (from ClassifierMixin) is
    accuracy against gold labels.
    """

    def __init__(
        self,
        inventory: DomainInventory | None = None,
        template: str | PromptTemplate = "dl_sentence",
        scorer: ScorerConfig | None = None,
        hints_mode: str = "with_hints",
    ):
        self.inventory = inventory
        self.template = template
        self.scorer = scorer
        self.hints_mode = hints_mode

    def fit(self, X=None, y=None):
        """Validate configuration; zero-shot, so nothing is learned from X/y."""
        if not isinstance(self.inventory, DomainInventory):
            raise ValueError("ZeroShotGlossLabeler requires a DomainInventory")
        if self.hints_mode not in HINTS_MODES:
            raise ValueError(f"hints_mode must be one of {HINTS_MODES}")
        self.template_ = (
            get_template(self.template) if isinstance(self.template, str) else self.template
        )
        config = self.scorer if self.scorer is not None else ScorerConfig(kind="uniform")
        self.scorer_ = Scorer(config)
        self.classes_ = np.array(sorted(self.inventory.labels))
        return self

    def _check_ready(self):
        if not hasattr(self, "scorer_"):
            raise ValueError("this ZeroShotGlossLabeler instance is not fitted yet; call fit() first")

    @staticmethod
    def _check_texts(X) -> list[str]:
        texts = list(X)
        bad = [x for x in texts if not isinstance(x, str) or not x.strip()]
        if bad:
            raise TypeError("expected non-empty gloss strings")
        return texts

    def predict_scores(self, X) -> list[dict[str, float]]:
        """Per-gloss label->probability maps (independent scores, not a distribution)."""
        self._check_ready()
        labels = sorted(self.inventory.labels)
        out = []
        for gloss in self._check_texts(X):
            premise = _premise_for(gloss, self.hints_mode)
            requests = [
                ScoreRequest(premise=premise, hypothesis=h.text, mode=self.scorer_.config.mode)
                for h in generate_hypotheses(self.template_, labels)
            ]
            out.append(dict(zip(labels, self.scorer_.score_batch(requests))))
        return out

    def predict(self, X) -> list[str]:
        labels = sorted(self.inventory.labels)
        return [argmax_label(labels, scores) for scores in self.predict_scores(X)]
