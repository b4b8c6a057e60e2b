import json
import shutil

import pytest

from domainsense import load_lexicon, load_wsd_dataset
from domainsense.cli import main


def run_cli(*argv):
    try:
        return main(list(argv))
    except SystemExit as exc:  # argparse usage errors
        return exc.code


@pytest.fixture()
def workdir(tmp_path, data_dir):
    """A throwaway copy of tests/data so runs never write into the repo."""
    dst = tmp_path / "data"
    shutil.copytree(data_dir, dst)
    return dst


class TestRun:
    def test_wsd_manifest_exits_zero_with_three_artifacts(self, workdir, capsys):
        out = workdir / "out_run"
        code = run_cli("run", "--manifest", str(workdir / "manifest_wsd.json"),
                       "--output-dir", str(out))
        assert code == 0
        assert sorted(p.name for p in out.iterdir()) == [
            "predictions.jsonl", "report.json", "run_metadata.json",
        ]
        assert "micro-F1" in capsys.readouterr().out

    def test_dl_manifest_runs(self, workdir):
        out = workdir / "out_dl_run"
        code = run_cli("run", "--manifest", str(workdir / "manifest_dl.json"),
                       "--output-dir", str(out))
        assert code == 0
        first = json.loads((out / "predictions.jsonl").read_text().splitlines()[0])
        assert first["hints_mode"] == "without_hints"
        assert len(first["scores"]) == 3

    def test_rerun_is_byte_identical(self, workdir):
        out_a = workdir / "a"
        out_b = workdir / "b"
        for out in (out_a, out_b):
            assert run_cli("run", "--manifest", str(workdir / "manifest_wsd.json"),
                           "--output-dir", str(out)) == 0
        assert (out_a / "predictions.jsonl").read_bytes() == (out_b / "predictions.jsonl").read_bytes()
        assert (out_a / "report.json").read_bytes() == (out_b / "report.json").read_bytes()

    def test_missing_dataset_exits_one_and_names_path(self, workdir, capsys):
        manifest = json.loads((workdir / "manifest_wsd.json").read_text())
        manifest["dataset"] = "missing_corpus.jsonl"
        bad = workdir / "bad_manifest.json"
        bad.write_text(json.dumps(manifest))
        code = run_cli("run", "--manifest", str(bad))
        assert code == 1
        assert "missing_corpus.jsonl" in capsys.readouterr().err

    def test_unreachable_remote_scorer_exits_two(self, workdir, capsys):
        manifest = json.loads((workdir / "manifest_wsd.json").read_text())
        manifest["scorer"] = {
            "kind": "remote", "endpoint": "http://127.0.0.1:1",
            "max_retries": 0, "backoff": 0.0, "timeout": 0.5,
        }
        bad = workdir / "remote_manifest.json"
        bad.write_text(json.dumps(manifest))
        code = run_cli("run", "--manifest", str(bad), "--output-dir", str(workdir / "o"))
        assert code == 2
        assert "scorer failure" in capsys.readouterr().err

    def test_invalid_manifest_json_exits_one(self, workdir, capsys):
        bad = workdir / "broken.json"
        bad.write_text("{not json")
        assert run_cli("run", "--manifest", str(bad)) == 1

    def test_hints_mode_rejected_for_wsd(self, workdir, capsys):
        manifest = json.loads((workdir / "manifest_wsd.json").read_text())
        manifest["hints_mode"] = "with_hints"
        bad = workdir / "hints_manifest.json"
        bad.write_text(json.dumps(manifest))
        assert run_cli("run", "--manifest", str(bad)) == 1
        assert "hints_mode" in capsys.readouterr().err

    def test_workers_do_not_change_bytes(self, workdir):
        out_1 = workdir / "w1"
        out_8 = workdir / "w8"
        assert run_cli("run", "--manifest", str(workdir / "manifest_wsd.json"),
                       "--output-dir", str(out_1), "--workers", "1") == 0
        assert run_cli("run", "--manifest", str(workdir / "manifest_wsd.json"),
                       "--output-dir", str(out_8), "--workers", "8") == 0
        assert (out_1 / "predictions.jsonl").read_bytes() == (out_8 / "predictions.jsonl").read_bytes()


class TestInventoryStats:
    def test_csi_fixture_counts(self, workdir, capsys):
        code = run_cli("inventory", "--inventory", str(workdir / "csi.tsv"), "--name", "csi")
        assert code == 0
        out = capsys.readouterr().out
        assert "2 labels" in out
        assert "3 assigned synsets" in out

    def test_truncation_reports_before_and_after(self, workdir, capsys):
        code = run_cli(
            "inventory", "--inventory", str(workdir / "wndomains.tsv"),
            "--name", "wndomains", "--hierarchy", str(workdir / "wndomains_hierarchy.tsv"),
            "--truncate-depth", "3",
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "12 labels before, 7 labels after" in out
        assert "depth histogram: 1=1 2=3 3=3 4=5" in out

    def test_multi_label_count(self, workdir, capsys):
        run_cli("inventory", "--inventory", str(workdir / "wndomains.tsv"),
                "--name", "wndomains")
        assert "1 multi-label synsets" in capsys.readouterr().out


class TestEvalCommand:
    def test_eval_reproduces_run_report(self, workdir, capsys):
        out = workdir / "run_out"
        assert run_cli("run", "--manifest", str(workdir / "manifest_wsd.json"),
                       "--output-dir", str(out)) == 0
        report_json = workdir / "eval_report.json"
        code = run_cli(
            "eval", "--task", "wsd",
            "--predictions", str(out / "predictions.jsonl"),
            "--dataset", str(workdir / "wsd_corpus.jsonl"),
            "--lexicon", str(workdir / "lexicon.tsv"),
            "--inventory", str(workdir / "trident.tsv"), "--name", "trident",
            "--json-out", str(report_json),
        )
        assert code == 0
        assert "micro-F1" in capsys.readouterr().out
        assert report_json.read_bytes() == (out / "report.json").read_bytes()

    def test_eval_wsd_requires_lexicon(self, workdir, capsys):
        code = run_cli(
            "eval", "--task", "wsd",
            "--predictions", "x.jsonl", "--dataset", "y.jsonl",
            "--inventory", str(workdir / "trident.tsv"), "--name", "trident",
        )
        assert code == 1


class TestBaselineCommand:
    def test_prints_analytic_and_mc(self, workdir, capsys):
        code = run_cli(
            "baseline",
            "--dataset", str(workdir / "wsd_corpus.jsonl"),
            "--lexicon", str(workdir / "lexicon.tsv"),
            "--inventory", str(workdir / "trident.tsv"), "--name", "trident",
            "--seed", "3", "--trials", "2000",
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "analytic random baseline" in out
        assert "monte-carlo baseline" in out
        analytic = float(out.split("analytic random baseline:")[1].split()[0])
        mc = float(out.split("monte-carlo baseline:")[1].split()[0])
        assert abs(analytic - mc) < 0.05


class TestCorrelateCommand:
    def report(self, path, f1s, task="wsd"):
        report = {
            "task": task, "inventory": "trident", "n_instances": len(f1s), "correct": 0,
            "micro_f1": 0.0, "per_pos": {},
            "per_label": {
                label: {"precision": f1, "recall": f1, "f1": f1, "support": 1}
                for label, f1 in f1s.items()
            },
        }
        path.write_text(json.dumps(report))
        return path

    def test_identical_reports_rho_one(self, tmp_path, capsys):
        f1s = {"A": 0.3, "B": 0.6, "C": 0.9}
        a = self.report(tmp_path / "a.json", f1s, task="domain_labelling")
        b = self.report(tmp_path / "b.json", f1s)
        csv_out = tmp_path / "scatter.csv"
        code = run_cli("correlate", str(a), str(b), "--csv-out", str(csv_out))
        assert code == 0
        out = capsys.readouterr().out
        assert "rho = 1.0000" in out
        assert csv_out.read_text().splitlines()[0] == "label,f1_dl,f1_wsd"

    def test_five_label_fixture_matches_hand_value(self, tmp_path, capsys):
        a = self.report(tmp_path / "a.json", {f"L{i}": v for i, v in
                                              enumerate([0.1, 0.2, 0.3, 0.4, 0.5], 1)})
        b = self.report(tmp_path / "b.json", {f"L{i}": v for i, v in
                                              enumerate([0.2, 0.1, 0.4, 0.3, 0.5], 1)})
        assert run_cli("correlate", str(a), str(b)) == 0
        assert "rho = 0.8000" in capsys.readouterr().out

    def test_disjoint_labels_exit_one(self, tmp_path, capsys):
        a = self.report(tmp_path / "a.json", {"A": 0.1, "B": 0.2})
        b = self.report(tmp_path / "b.json", {"C": 0.1, "D": 0.2})
        assert run_cli("correlate", str(a), str(b)) == 1
        assert "fewer than 2 shared labels" in capsys.readouterr().err


class TestConvertCommand:
    def test_sample_corpus_converts_and_loads(self, workdir, capsys):
        out = workdir / "converted.jsonl"
        code = run_cli(
            "convert", "--xml", str(workdir / "raganato_sample.xml"),
            "--gold", str(workdir / "raganato_sample.key"),
            "--out", str(out), "--sensekey-map", str(workdir / "sensekeys.tsv"),
        )
        assert code == 0
        assert "wrote 3 instances" in capsys.readouterr().out
        records = [json.loads(line) for line in out.read_text().splitlines()]
        assert records[0]["id"] == "d000.s000.t000"
        assert records[0]["gold"] == ["00006484-n"]
        assert records[0]["context"] == "The cell divides rapidly ."
        start, end = records[0]["target_start"], records[0]["target_end"]
        assert records[0]["context"][start:end] == "cell"
        # both key forms resolve and collapse onto one synset
        assert records[2]["gold"] == ["10000007-n"]
        # converted output loads as a dataset against the shipped lexicon
        lexicon = load_lexicon(workdir / "lexicon.tsv")
        instances = load_wsd_dataset(out, lexicon)
        assert {i.instance_id for i in instances} == {
            "d000.s000.t000", "d000.s001.t000", "d000.s001.t001",
        }
        surface = {i.instance_id: i.surface_form for i in instances}
        assert surface["d000.s001.t000"] == "prosecuted"

    def test_sense_key_without_map_exits_one(self, workdir, capsys):
        code = run_cli(
            "convert", "--xml", str(workdir / "raganato_sample.xml"),
            "--gold", str(workdir / "raganato_sample.key"),
            "--out", str(workdir / "x.jsonl"),
        )
        assert code == 1
        assert "sense key" in capsys.readouterr().err

    def test_missing_gold_key_named(self, workdir, capsys):
        key = workdir / "partial.key"
        key.write_text("d000.s000.t000 00006484-n\n")
        code = run_cli(
            "convert", "--xml", str(workdir / "raganato_sample.xml"),
            "--gold", str(key), "--out", str(workdir / "y.jsonl"),
        )
        assert code == 1
        assert "d000.s001.t000" in capsys.readouterr().err


class TestUsageErrors:
    def test_unknown_subcommand_exits_one(self, capsys):
        assert run_cli("frobnicate") == 1

    def test_missing_required_flag_exits_one(self, capsys):
        assert run_cli("run") == 1
