"""Metrics: micro-F1, per-POS F1, per-label precision/recall/F1, and Spearman
rank correlation between the per-label F1 vectors of the two tasks.

Counting conventions (multi-gold instances):
  * an instance is correct iff the prediction matches ANY of its gold labels;
  * per-label support counts each instance once, under its FIRST gold label,
    so supports always sum to the instance count;
  * precision of label L is computed over instances predicted L, recall of L
    over instances whose first gold label is L.
With single-gold data this is exactly the standard confusion-matrix
bookkeeping. Every run here has full single-prediction coverage, so micro-F1
equals accuracy; that identity is asserted at runtime rather than assumed.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from scipy import stats as _scipy_stats

from .domain_labelling import DlPrediction
from .errors import DegenerateInputError, EvalError
from .inventory import DomainInventory
from .lexicon import POS_CATEGORY, GlossLabelInstance, WsdInstance
from .wsd import WsdPrediction, gold_domains


@dataclass(frozen=True)
class LabelScore:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class EvalReport:
    task: str
    inventory: str
    n_instances: int
    correct: int
    micro_f1: float
    per_pos: dict[str, float] = field(default_factory=dict)
    per_pos_counts: dict[str, tuple[int, int]] = field(default_factory=dict)
    per_label: dict[str, LabelScore] = field(default_factory=dict)

    def supported_labels(self) -> set[str]:
        return {label for label, s in self.per_label.items() if s.support > 0}

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "inventory": self.inventory,
            "n_instances": self.n_instances,
            "correct": self.correct,
            "micro_f1": self.micro_f1,
            "per_pos": {
                pos: {
                    "f1": f1,
                    "correct": self.per_pos_counts[pos][0],
                    "total": self.per_pos_counts[pos][1],
                }
                for pos, f1 in self.per_pos.items()
            },
            "per_label": {
                label: {
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "support": s.support,
                }
                for label, s in sorted(self.per_label.items())
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        report = cls(
            task=data["task"],
            inventory=data["inventory"],
            n_instances=int(data["n_instances"]),
            correct=int(data["correct"]),
            micro_f1=float(data["micro_f1"]),
            per_pos={pos: float(rec["f1"]) for pos, rec in data.get("per_pos", {}).items()},
            per_pos_counts={
                pos: (int(rec["correct"]), int(rec["total"]))
                for pos, rec in data.get("per_pos", {}).items()
            },
            per_label={
                label: LabelScore(
                    precision=float(rec["precision"]),
                    recall=float(rec["recall"]),
                    f1=float(rec["f1"]),
                    support=int(rec["support"]),
                )
                for label, rec in data.get("per_label", {}).items()
            },
        )
        return report

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def read_json(cls, path: str | Path) -> "EvalReport":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def format_text(self) -> str:
        lines = [
            f"task:       {self.task}",
            f"inventory:  {self.inventory}",
            f"instances:  {self.n_instances}",
            f"micro-F1:   {self.micro_f1:.4f}  ({self.correct}/{self.n_instances} correct)",
        ]
        if self.per_pos:
            lines.append("")
            lines.append("per POS:")
            for pos in ("Noun", "Adj", "Verb", "Adv"):
                if pos in self.per_pos:
                    correct, total = self.per_pos_counts[pos]
                    lines.append(f"  {pos:<5} {self.per_pos[pos]:.4f}  ({correct}/{total})")
        if self.per_label:
            lines.append("")
            width = max(len(label) for label in self.per_label)
            lines.append(f"  {'label':<{width}}  {'prec':>6}  {'rec':>6}  {'f1':>6}  support")
            for label, s in sorted(self.per_label.items()):
                lines.append(
                    f"  {label:<{width}}  {s.precision:>6.4f}  {s.recall:>6.4f}"
                    f"  {s.f1:>6.4f}  {s.support:>7}"
                )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CorrelationReport:
    shared_labels: tuple[str, ...]
    rho: float
    pairs: tuple[tuple[str, float, float], ...]


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _aggregate(task, inventory, rows):
    """rows: (instance_id, predicted, gold_labels_in_order, pos_category|None)."""
    n = len(rows)
    correct = 0
    pos_counts: dict[str, list[int]] = {}
    support: dict[str, int] = {}
    recall_hits: dict[str, int] = {}
    predicted_counts: dict[str, int] = {}
    precision_hits: dict[str, int] = {}
    for _, predicted, gold, pos in rows:
        hit = predicted in set(gold)
        correct += int(hit)
        first_gold = gold[0]
        support[first_gold] = support.get(first_gold, 0) + 1
        predicted_counts[predicted] = predicted_counts.get(predicted, 0) + 1
        if hit:
            recall_hits[first_gold] = recall_hits.get(first_gold, 0) + 1
            precision_hits[predicted] = precision_hits.get(predicted, 0) + 1
        if pos is not None:
            bucket = pos_counts.setdefault(pos, [0, 0])
            bucket[0] += int(hit)
            bucket[1] += 1

    micro_f1 = correct / n
    # full single-prediction coverage: the attempted/total convention collapses
    # onto plain accuracy, which we assert instead of assuming
    attempted = n
    precision_all = correct / attempted
    recall_all = correct / n
    assert abs(_f1(precision_all, recall_all) - micro_f1) < 1e-12

    per_label: dict[str, LabelScore] = {}
    for label in sorted(set(support) | set(predicted_counts)):
        sup = support.get(label, 0)
        rec = recall_hits.get(label, 0) / sup if sup else 0.0
        pred_n = predicted_counts.get(label, 0)
        prec = precision_hits.get(label, 0) / pred_n if pred_n else 0.0
        per_label[label] = LabelScore(
            precision=prec, recall=rec, f1=_f1(prec, rec), support=sup
        )
    assert sum(s.support for s in per_label.values()) == n

    return EvalReport(
        task=task,
        inventory=inventory,
        n_instances=n,
        correct=correct,
        micro_f1=micro_f1,
        per_pos={pos: c / t for pos, (c, t) in pos_counts.items()},
        per_pos_counts={pos: (c, t) for pos, (c, t) in pos_counts.items()},
        per_label=per_label,
    )


def _match_by_id(predictions, dataset, pred_key, inst_key, what):
    by_id = {pred_key(p): p for p in predictions}
    if len(by_id) != len(predictions):
        raise EvalError(f"duplicate prediction ids in {what}")
    missing = [inst_key(i) for i in dataset if inst_key(i) not in by_id]
    extra = sorted(set(by_id) - {inst_key(i) for i in dataset})
    if missing or extra:
        raise EvalError(
            f"{what}: predictions do not match dataset "
            f"(missing: {missing[:5]}{'...' if len(missing) > 5 else ''}, "
            f"extra: {extra[:5]}{'...' if len(extra) > 5 else ''})"
        )
    return by_id


def score_wsd(
    predictions: list[WsdPrediction],
    dataset: list[WsdInstance],
    inv: DomainInventory,
) -> EvalReport:
    """Evaluate WSD predictions: correct iff the predicted domain is among the
    gold senses' domains. Includes the per-POS partition."""
    if not dataset:
        raise EvalError("empty dataset")
    by_id = _match_by_id(
        predictions, dataset, lambda p: p.instance_id, lambda i: i.instance_id, "wsd"
    )
    rows = []
    for instance in dataset:
        gold = gold_domains(inv, instance)
        if not gold:
            raise EvalError(f"{instance.instance_id}: gold senses have no domains in {inv.name!r}")
        rows.append(
            (
                instance.instance_id,
                by_id[instance.instance_id].predicted_domain,
                gold,
                POS_CATEGORY[instance.pos],
            )
        )
    return _aggregate("wsd", inv.name, rows)


def score_domain_labelling(
    predictions: list[DlPrediction],
    dataset: list[GlossLabelInstance],
    inv: DomainInventory,
) -> EvalReport:
    """Evaluate gloss-labelling predictions; no POS partition (bare synsets)."""
    if not dataset:
        raise EvalError("empty dataset")
    by_id = _match_by_id(
        predictions, dataset, lambda p: p.synset, lambda i: str(i.synset), "domain_labelling"
    )
    rows = []
    for instance in dataset:
        gold = instance.gold_labels.get(inv.name)
        if not gold:
            raise EvalError(f"{instance.synset}: no gold labels for inventory {inv.name!r}")
        rows.append((str(instance.synset), by_id[str(instance.synset)].predicted_label, gold, None))
    return _aggregate("domain_labelling", inv.name, rows)


def spearman_rho(xs: list[float], ys: list[float]) -> float:
    """Spearman rank correlation with average-rank tie handling.

    Symmetric in its arguments and invariant under strictly increasing
    transforms of either input. Raises on length mismatch, fewer than two
    points, or a constant vector (rho undefined).
    """
    if len(xs) != len(ys):
        raise EvalError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise EvalError("spearman_rho requires at least 2 points")
    if len(set(xs)) == 1 or len(set(ys)) == 1:
        raise DegenerateInputError("rank correlation is undefined for a constant vector")
    rho = float(_scipy_stats.spearmanr(xs, ys).statistic)
    return rho


def correlate_tasks(report_a: EvalReport, report_b: EvalReport) -> CorrelationReport:
    """Spearman correlation of per-label F1 between two reports.

    Shared labels are those with nonzero support in BOTH reports; at least
    two are required.
    """
    if report_a.inventory != report_b.inventory:
        raise EvalError(
            f"reports cover different inventories: "
            f"{report_a.inventory!r} vs {report_b.inventory!r}"
        )
    shared = sorted(report_a.supported_labels() & report_b.supported_labels())
    if len(shared) < 2:
        raise EvalError(f"fewer than 2 shared labels (got {len(shared)})")
    pairs = tuple(
        (label, report_a.per_label[label].f1, report_b.per_label[label].f1) for label in shared
    )
    rho = spearman_rho([p[1] for p in pairs], [p[2] for p in pairs])
    return CorrelationReport(shared_labels=tuple(shared), rho=rho, pairs=pairs)


def write_correlation_csv(correlation: CorrelationReport, path: str | Path) -> None:
    """Scatter-plot data: one row per shared label, ``label,f1_dl,f1_wsd``."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "f1_dl", "f1_wsd"])
        for label, f1_a, f1_b in correlation.pairs:
            writer.writerow([label, f1_a, f1_b])
