"""Command-line surface.

Subcommands: ``convert`` (XML+goldkey -> JSONL), ``inventory`` (stats and
truncation preview), ``run`` (a task from a manifest), ``eval`` (re-score a
prediction file), ``baseline`` (random baselines), ``correlate`` (per-label
F1 correlation between two reports).

Exit codes: 0 success, 1 validation/input error, 2 scorer failure.
Manifests make runs reproducible; flags override manifest fields for
exploration. ``DOMAINSENSE_SCORER_ENDPOINT`` overrides a remote endpoint.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from . import evaluation
from .convert import convert_unified
from .domain_labelling import HINTS_MODES, read_dl_predictions, run_domain_labelling
from .errors import DomainSenseError, ManifestError, ScorerError
from .inventory import DomainInventory, load_inventory, truncate_hierarchy
from .lexicon import load_gloss_dataset, load_lexicon, load_wsd_dataset
from .prompts import get_template, load_templates
from .scoring import ScorerConfig
from .wsd import random_baseline_analytic, random_baseline_mc, read_predictions, run_wsd

ENDPOINT_ENV_VAR = "DOMAINSENSE_SCORER_ENDPOINT"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SCORER = 2


@dataclass
class RunManifest:
    """Everything a run needs, with paths resolved against the manifest file."""

    task: str
    lexicon: Path | None
    dataset: Path
    inventory_name: str
    inventory_path: Path
    hierarchy_path: Path | None
    truncate_depth: int | None
    fallback_label: str | None
    template_id: str
    templates_file: Path | None
    scorer: ScorerConfig
    hints_mode: str | None
    seed: int | None
    workers: int
    output_dir: Path

    @classmethod
    def from_file(cls, path: str | Path) -> "RunManifest":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ManifestError(f"manifest not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ManifestError(f"manifest {path} is not valid JSON: {exc.msg}") from None
        base = path.parent

        def resolve(value):
            return None if value is None else (base / value)

        task = data.get("task")
        if task not in ("wsd", "domain_labelling"):
            raise ManifestError(f"task must be 'wsd' or 'domain_labelling', got {task!r}")
        inv = data.get("inventory")
        if not isinstance(inv, dict) or "name" not in inv or "path" not in inv:
            raise ManifestError("manifest needs an inventory object with 'name' and 'path'")
        scorer_data = dict(data.get("scorer") or {})
        for key in ("fixture_path", "cache_path"):
            if scorer_data.get(key):
                scorer_data[key] = str(base / scorer_data[key])
        endpoint_override = os.environ.get(ENDPOINT_ENV_VAR)
        if endpoint_override and scorer_data.get("kind") == "remote":
            scorer_data["endpoint"] = endpoint_override
        try:
            scorer = ScorerConfig(**scorer_data)
        except TypeError as exc:
            raise ManifestError(f"invalid scorer config: {exc}") from None

        manifest = cls(
            task=task,
            lexicon=resolve(data.get("lexicon")),
            dataset=resolve(data.get("dataset")),
            inventory_name=str(inv["name"]),
            inventory_path=base / inv["path"],
            hierarchy_path=resolve(inv.get("hierarchy")),
            truncate_depth=inv.get("truncate_depth"),
            fallback_label=inv.get("fallback_label"),
            template_id=str(data.get("template", "")),
            templates_file=resolve(data.get("templates_file")),
            hints_mode=data.get("hints_mode"),
            scorer=scorer,
            seed=data.get("seed"),
            workers=int(data.get("workers", scorer.workers)),
            output_dir=base / data.get("output_dir", "out"),
        )
        manifest.validate()
        return manifest

    def validate(self) -> None:
        if self.dataset is None:
            raise ManifestError("manifest is missing 'dataset'")
        if not self.template_id:
            raise ManifestError("manifest is missing 'template'")
        required = {"dataset": self.dataset, "inventory": self.inventory_path}
        if self.task == "wsd":
            if self.lexicon is None:
                raise ManifestError("wsd manifest is missing 'lexicon'")
            required["lexicon"] = self.lexicon
            if self.hints_mode is not None:
                raise ManifestError("hints_mode applies only to domain_labelling")
        else:
            if self.hints_mode not in HINTS_MODES:
                raise ManifestError(
                    f"domain_labelling manifest needs hints_mode in {HINTS_MODES}"
                )
        if self.hierarchy_path is not None:
            required["hierarchy"] = self.hierarchy_path
        if self.templates_file is not None:
            required["templates_file"] = self.templates_file
        if self.scorer.kind == "fixture":
            required["fixture"] = Path(self.scorer.fixture_path)
        for role, p in required.items():
            if not Path(p).is_file():
                raise ManifestError(f"{role} file does not exist: {p}")

    def load_inventory(self) -> DomainInventory:
        inv = load_inventory(
            self.inventory_path,
            self.inventory_name,
            hierarchy_path=self.hierarchy_path,
            fallback_label=self.fallback_label,
        )
        if self.truncate_depth is not None:
            inv = truncate_hierarchy(inv, int(self.truncate_depth))
        return inv

    def resolve_template(self):
        extra = load_templates(self.templates_file) if self.templates_file else None
        return get_template(self.template_id, extra=extra)

    def input_paths(self) -> dict:
        return {
            "lexicon": self.lexicon,
            "dataset": self.dataset,
            "inventory": self.inventory_path,
            "hierarchy": self.hierarchy_path,
        }


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; our contract reserves 2 for scorer
    failures, so remap usage problems to exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def _add_inventory_args(parser):
    parser.add_argument("--inventory", required=True, help="assignment TSV path")
    parser.add_argument("--name", required=True, help="inventory name")
    parser.add_argument("--hierarchy", help="hierarchy TSV path")
    parser.add_argument("--truncate-depth", type=int, help="truncate hierarchy to this depth")
    parser.add_argument("--fallback", help="fallback label for unassigned synsets")


def _inventory_from_args(args) -> DomainInventory:
    inv = load_inventory(
        args.inventory, args.name,
        hierarchy_path=args.hierarchy, fallback_label=args.fallback,
    )
    if args.truncate_depth is not None:
        inv = truncate_hierarchy(inv, args.truncate_depth)
    return inv


def cmd_convert(args) -> int:
    n = convert_unified(args.xml, args.gold, args.out, sensekey_map_path=args.sensekey_map)
    print(f"wrote {n} instances to {args.out}")
    return EXIT_OK


def cmd_inventory_stats(args) -> int:
    inv = load_inventory(
        args.inventory, args.name,
        hierarchy_path=args.hierarchy, fallback_label=args.fallback,
    )
    print(
        f"inventory '{inv.name}': {len(inv.labels)} labels, "
        f"{len(inv.assignments)} assigned synsets, "
        f"{inv.multi_label_synsets()} multi-label synsets"
    )
    if inv.hierarchy is not None:
        hist = inv.depth_histogram()
        print("depth histogram: " + " ".join(f"{d}={n}" for d, n in hist.items()))
    if args.truncate_depth is not None:
        truncated = truncate_hierarchy(inv, args.truncate_depth)
        print(
            f"truncated to depth {args.truncate_depth}: "
            f"{len(inv.labels)} labels before, {len(truncated.labels)} labels after"
        )
    return EXIT_OK


def cmd_run(args) -> int:
    manifest = RunManifest.from_file(args.manifest)
    if args.output_dir:
        manifest.output_dir = Path(args.output_dir)
    if args.workers:
        manifest.workers = args.workers
    if args.seed is not None:
        manifest.seed = args.seed
    scorer_config = replace(manifest.scorer, workers=manifest.workers)

    inv = manifest.load_inventory()
    template = manifest.resolve_template()
    out = manifest.output_dir
    out.mkdir(parents=True, exist_ok=True)

    if manifest.task == "wsd":
        lexicon = load_lexicon(manifest.lexicon)
        dataset = load_wsd_dataset(manifest.dataset, lexicon)
        predictions, meta = run_wsd(
            dataset, inv, template, scorer_config,
            seed=manifest.seed, input_paths=manifest.input_paths(), output_dir=out,
        )
        report = evaluation.score_wsd(predictions, dataset, inv)
    else:
        dataset = load_gloss_dataset(manifest.dataset)
        predictions, meta = run_domain_labelling(
            dataset, inv, template, scorer_config, hints_mode=manifest.hints_mode,
            seed=manifest.seed, input_paths=manifest.input_paths(), output_dir=out,
        )
        report = evaluation.score_domain_labelling(predictions, dataset, inv)

    report.write_json(out / "report.json")
    print(f"{manifest.task}: {len(predictions)} predictions, micro-F1 {report.micro_f1:.4f}")
    print(f"artifacts in {out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    inv = _inventory_from_args(args)
    if args.task == "wsd":
        lexicon = load_lexicon(args.lexicon)
        dataset = load_wsd_dataset(args.dataset, lexicon)
        report = evaluation.score_wsd(read_predictions(args.predictions), dataset, inv)
    else:
        dataset = load_gloss_dataset(args.dataset)
        report = evaluation.score_domain_labelling(
            read_dl_predictions(args.predictions), dataset, inv
        )
    if args.json_out:
        report.write_json(args.json_out)
    sys.stdout.write(report.format_text())
    return EXIT_OK


def cmd_baseline(args) -> int:
    lexicon = load_lexicon(args.lexicon)
    dataset = load_wsd_dataset(args.dataset, lexicon)
    inv = _inventory_from_args(args)
    analytic = random_baseline_analytic(dataset, inv)
    print(f"analytic random baseline: {analytic:.6f}")
    if args.trials:
        estimate, stderr = random_baseline_mc(dataset, inv, seed=args.seed, trials=args.trials)
        print(
            f"monte-carlo baseline:     {estimate:.6f} ± {stderr:.6f} "
            f"(seed {args.seed}, {args.trials} trials)"
        )
    return EXIT_OK


def cmd_correlate(args) -> int:
    report_a = evaluation.EvalReport.read_json(args.report_a)
    report_b = evaluation.EvalReport.read_json(args.report_b)
    correlation = evaluation.correlate_tasks(report_a, report_b)
    print(
        f"spearman rho = {correlation.rho:.4f} "
        f"over {len(correlation.shared_labels)} shared labels"
    )
    if args.csv_out:
        evaluation.write_correlation_csv(correlation, args.csv_out)
        print(f"wrote scatter data to {args.csv_out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="domainsense", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("convert", help="convert XML+goldkey corpora to canonical JSONL")
    p.add_argument("--xml", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sensekey-map", help="sense_key -> synset_id TSV")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("inventory", help="inventory statistics and truncation preview")
    _add_inventory_args(p)
    p.set_defaults(func=cmd_inventory_stats)

    p = sub.add_parser("run", help="run a task described by a manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--output-dir", help="override the manifest's output_dir")
    p.add_argument("--workers", type=int, help="cap on concurrent scorer batches")
    p.add_argument("--seed", type=int, help="override the manifest's seed")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="evaluate a prediction file against a dataset")
    p.add_argument("--task", choices=("wsd", "domain_labelling"), required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--lexicon", help="required for wsd")
    _add_inventory_args(p)
    p.add_argument("--json-out", help="also write the report as JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("baseline", help="random baselines for a WSD dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--lexicon", required=True)
    _add_inventory_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=0, help="Monte-Carlo trials (0 = analytic only)")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("correlate", help="per-label F1 correlation between two reports")
    p.add_argument("report_a")
    p.add_argument("report_b")
    p.add_argument("--csv-out", help="write label,f1_dl,f1_wsd scatter data")
    p.set_defaults(func=cmd_correlate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "eval" and args.task == "wsd" and not args.lexicon:
        parser.error("eval --task wsd requires --lexicon")
    try:
        return args.func(args)
    except ScorerError as exc:
        print(f"scorer failure: {exc}", file=sys.stderr)
        return EXIT_SCORER
    except DomainSenseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
