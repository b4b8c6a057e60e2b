"""Zero-shot WSD over candidate domains: senses -> domains -> hypotheses ->
scores -> argmax, plus analytic and Monte-Carlo random baselines.

The scorer is called once per candidate *domain*, never per sense: senses
sharing a domain collapse before scoring, which is what makes the label
space smaller than the sense space.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator

from .errors import DatasetError, NoCandidateDomainsError
from .inventory import DomainInventory, candidate_domains, domains_of_sense
from .lexicon import WsdInstance
from .metadata import RunMetadata, hash_input_files, utc_now
from .prompts import PromptTemplate, generate_hypotheses, get_template
from .scoring import Scorer, ScorerConfig, ScoreRequest

TIE_BREAK = "candidate-domain first-appearance order"

SHORTCUT_NONE = "none"
SHORTCUT_MONOSEMOUS = "monosemous"


@dataclass(frozen=True)
class WsdPrediction:
    """Predicted domain for one instance.

    ``domain_scores`` is empty exactly when the monosemous shortcut fired
    (a single candidate domain needs no scoring); otherwise it has one
    entry per candidate domain and the prediction is its argmax.
    """

    instance_id: str
    predicted_domain: str
    domain_scores: dict[str, float]
    candidate_count: int
    shortcut: str = SHORTCUT_NONE


def argmax_label(labels_in_order: tuple[str, ...] | list[str], scores: dict[str, float]) -> str:
    """Argmax over ``scores`` with ties broken by position in ``labels_in_order``.

    A strictly greater score wins; equal scores keep the earlier label, so the
    result is invariant under any strictly increasing transform of the scores.
    """
    best = labels_in_order[0]
    best_score = scores[best]
    for label in labels_in_order[1:]:
        if scores[label] > best_score:
            best, best_score = label, scores[label]
    return best


def gold_domains(inv: DomainInventory, instance: WsdInstance) -> tuple[str, ...]:
    """Union of the gold senses' domains, in first appearance over sense rank."""
    out: list[str] = []
    for sid in instance.gold_senses:
        for label in domains_of_sense(inv, sid):
            if label not in out:
                out.append(label)
    return tuple(out)


def _as_scorer(scorer: Scorer | ScorerConfig) -> Scorer:
    return scorer if isinstance(scorer, Scorer) else Scorer(scorer)


def _instance_requests(
    instance: WsdInstance,
    domains: tuple[str, ...],
    template: PromptTemplate,
    mode: str,
) -> list[ScoreRequest]:
    word = instance.lemma if template.requires_word else None
    hypotheses = generate_hypotheses(template, domains, word=word)
    return [
        ScoreRequest(premise=instance.context, hypothesis=h.text, mode=mode)
        for h in hypotheses
    ]


def disambiguate(
    instance: WsdInstance,
    inv: DomainInventory,
    template: PromptTemplate,
    scorer: Scorer | ScorerConfig,
) -> WsdPrediction:
    """Predict the domain of ``instance``'s correct sense.

    A single candidate domain short-circuits without any scorer call;
    otherwise one pair per candidate domain is scored with the instance
    context as premise.
    """
    scorer = _as_scorer(scorer)
    cands = candidate_domains(inv, instance.candidate_senses, word=instance.lemma)
    if len(cands.domains) == 1:
        return WsdPrediction(
            instance_id=instance.instance_id,
            predicted_domain=cands.domains[0],
            domain_scores={},
            candidate_count=1,
            shortcut=SHORTCUT_MONOSEMOUS,
        )
    requests = _instance_requests(instance, cands.domains, template, scorer.config.mode)
    probs = scorer.score_batch(requests)
    scores = dict(zip(cands.domains, probs))
    return WsdPrediction(
        instance_id=instance.instance_id,
        predicted_domain=argmax_label(cands.domains, scores),
        domain_scores=scores,
        candidate_count=len(cands.domains),
    )


def write_predictions(predictions: list[WsdPrediction], path: str | Path) -> None:
    """Persist predictions as deterministic JSONL (sorted keys, no timestamps)."""
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for pred in predictions:
            fh.write(
                json.dumps(
                    {
                        "id": pred.instance_id,
                        "predicted_domain": pred.predicted_domain,
                        "scores": pred.domain_scores,
                        "shortcut": pred.shortcut,
                    },
                    sort_keys=True,
                    ensure_ascii=False,
                )
                + "\n"
            )


def read_predictions(path: str | Path) -> list[WsdPrediction]:
    """Load a prediction JSONL file written by :func:`write_predictions`."""
    predictions = []
    with Path(path).open(encoding="utf-8") as fh:
        for raw in fh:
            if not raw.strip():
                continue
            rec = json.loads(raw)
            scores = {label: float(p) for label, p in rec["scores"].items()}
            shortcut = rec.get("shortcut", SHORTCUT_NONE)
            predictions.append(
                WsdPrediction(
                    instance_id=rec["id"],
                    predicted_domain=rec["predicted_domain"],
                    domain_scores=scores,
                    candidate_count=1 if shortcut == SHORTCUT_MONOSEMOUS else len(scores),
                    shortcut=shortcut,
                )
            )
    return predictions


def run_wsd(
    dataset: list[WsdInstance],
    inv: DomainInventory,
    template: PromptTemplate | str,
    scorer_config: ScorerConfig,
    seed: int | None = None,
    input_paths: dict | None = None,
    output_dir: str | Path | None = None,
) -> tuple[list[WsdPrediction], RunMetadata]:
    """Disambiguate a whole dataset; output is sorted by instance id.

    All scoreable pairs are gathered first and scored in one batched pass,
    so results do not depend on instance order or batch partitioning. Any
    instance without candidate domains fails the run, with every offender
    named.
    """
    if not dataset:
        raise DatasetError("run_wsd requires a non-empty dataset")
    if isinstance(template, str):
        template = get_template(template)
    scorer = Scorer(scorer_config)
    started = utc_now()

    plans: list[tuple[WsdInstance, tuple[str, ...], list[ScoreRequest]]] = []
    problems: list[str] = []
    for instance in dataset:
        try:
            cands = candidate_domains(inv, instance.candidate_senses, word=instance.lemma)
        except NoCandidateDomainsError as exc:
            problems.append(f"{instance.instance_id}: {exc}")
            continue
        if len(cands.domains) == 1:
            plans.append((instance, cands.domains, []))
        else:
            plans.append(
                (instance, cands.domains,
                 _instance_requests(instance, cands.domains, template, scorer.config.mode))
            )
    if problems:
        raise DatasetError(f"{len(problems)} unscorable instance(s)", problems)

    flat = [req for _, _, reqs in plans for req in reqs]
    probs = scorer.score_batch(flat) if flat else []

    predictions: list[WsdPrediction] = []
    cursor = 0
    for instance, domains, reqs in plans:
        if not reqs:
            predictions.append(
                WsdPrediction(instance.instance_id, domains[0], {}, 1, SHORTCUT_MONOSEMOUS)
            )
            continue
        scores = dict(zip(domains, probs[cursor:cursor + len(reqs)]))
        cursor += len(reqs)
        predictions.append(
            WsdPrediction(
                instance_id=instance.instance_id,
                predicted_domain=argmax_label(domains, scores),
                domain_scores=scores,
                candidate_count=len(domains),
            )
        )
    predictions.sort(key=lambda p: p.instance_id)

    meta = RunMetadata(
        task="wsd",
        template_id=template.id,
        inventory_name=inv.name,
        inventory_hash=inv.content_hash(),
        scorer_id=scorer.scorer_id,
        scorer_kind=scorer_config.kind,
        mode=scorer_config.mode,
        tie_break=TIE_BREAK,
        n_instances=len(dataset),
        n_scored_pairs=len(flat),
        n_dispatched=scorer.dispatch_count,
        started_at=started,
        finished_at=utc_now(),
        seed=seed,
        workers=scorer_config.workers,
        input_hashes=hash_input_files(input_paths or {}),
    )
    if output_dir is not None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_predictions(predictions, out / "predictions.jsonl")
        meta.write(out / "run_metadata.json")
    return predictions, meta


def _candidate_and_gold_sizes(dataset, inv):
    sizes = []
    for instance in dataset:
        cands = candidate_domains(inv, instance.candidate_senses, word=instance.lemma)
        gold = set(gold_domains(inv, instance))
        hits = len(gold.intersection(cands.domains))
        sizes.append((len(cands.domains), hits))
    return sizes


def random_baseline_analytic(dataset: list[WsdInstance], inv: DomainInventory) -> float:
    """Expected accuracy of a uniform guess over each instance's candidate domains.

    Mean over instances of |gold ∩ candidates| / |candidates|; instances
    whose gold senses have no domains contribute 0.
    """
    if not dataset:
        raise DatasetError("random baseline requires a non-empty dataset")
    sizes = _candidate_and_gold_sizes(dataset, inv)
    return sum(hits / k for k, hits in sizes) / len(sizes)


def random_baseline_mc(
    dataset: list[WsdInstance],
    inv: DomainInventory,
    seed: int,
    trials: int,
) -> tuple[float, float]:
    """Empirical counterpart of the analytic baseline.

    Per trial, draws one candidate domain uniformly per instance (as a
    uniform index into the candidate list) and averages correctness.
    Returns (estimate, standard error of the per-trial accuracies);
    reproducible for a fixed seed, converging on the analytic value.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not dataset:
        raise DatasetError("random baseline requires a non-empty dataset")
    sizes = _candidate_and_gold_sizes(dataset, inv)
    k = np.array([s[0] for s in sizes])[:, None]
    hits = np.array([s[1] for s in sizes])[:, None]
    rng = np.random.default_rng(seed)
    # gold-matching domains occupy the first `hits` indices after reordering,
    # so "draw < hits" is exactly a uniform draw landing on a gold domain
    draws = rng.integers(0, k, size=(len(sizes), trials))
    trial_acc = (draws < hits).mean(axis=0)
    estimate = float(trial_acc.mean())
    stderr = float(trial_acc.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return estimate, stderr


class ZeroShotWsd(BaseEstimator):
    """Estimator-style front end over :func:`disambiguate`.

    Parameters are stored untouched (sklearn convention); ``fit`` validates
    them and builds the scorer, ``predict`` maps instances to domain labels.

    >>> clf = ZeroShotWsd(inventory=inv, template="wsd_word",
    ...                   scorer=ScorerConfig(kind="uniform")).fit()
    >>> clf.predict(instances)
    ['Biology', ...]
    """

    def __init__(
        self,
        inventory: DomainInventory | None = None,
        template: str | PromptTemplate = "wsd_word",
        scorer: ScorerConfig | None = None,
    ):
        self.inventory = inventory
        self.template = template
        self.scorer = scorer

    def fit(self, X=None, y=None):
        """Validate configuration; zero-shot, so nothing is learned from X/y."""
        if not isinstance(self.inventory, DomainInventory):
            raise ValueError("ZeroShotWsd requires a DomainInventory")
        self.template_ = (
            get_template(self.template) if isinstance(self.template, str) else self.template
        )
        config = self.scorer if self.scorer is not None else ScorerConfig(kind="uniform")
        self.scorer_ = Scorer(config)
        self.classes_ = np.array(sorted(self.inventory.labels))
        return self

    def _check_ready(self):
        if not hasattr(self, "scorer_"):
            raise ValueError("this ZeroShotWsd instance is not fitted yet; call fit() first")

    @staticmethod
    def _check_instances(X) -> list[WsdInstance]:
        instances = list(X)
        bad = [x for x in instances if not isinstance(x, WsdInstance)]
        if bad:
            raise TypeError(f"expected WsdInstance elements, got {type(bad[0]).__name__}")
        return instances

    def predict_records(self, X) -> list[WsdPrediction]:
        self._check_ready()
        return [
            disambiguate(inst, self.inventory, self.template_, self.scorer_)
            for inst in self._check_instances(X)
        ]

    def predict(self, X) -> list[str]:
        return [record.predicted_domain for record in self.predict_records(X)]
