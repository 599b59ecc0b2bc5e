import json

import pytest

from puc.cli import main

from conftest import DATA

FIXTURE_KB = str(DATA / "fixture_kb.json")
FIXTURE1_CSV = str(DATA / "fixture1.csv")


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_canonicalize_fixture1_golden(tmp_path, capsys):
    out = tmp_path / "f1.csv"
    code, _, err = run(["--mode", "canonicalize", "--columns", "Freezer volume",
                        "--kb", FIXTURE_KB, "--no-timing", "--out", out, FIXTURE1_CSV], capsys)
    assert code == 0, err
    assert out.read_text() == (
        "Model,Freezer volume (litre)\n"
        "A,5.2\nB,180\nC,150\nD,200\nE,198.217926144\nF,169.901079552\nG,300\n")
    report = json.loads((tmp_path / "f1.csv.report.json").read_text())
    col = report["datasets"][0]["columns"][0]
    assert report["version"] == "1"
    assert col["dimension"] == "volume"
    assert col["column_unit"] == "litre"
    fixes = [r["correction"] for r in col["rows"] if r["correction"]]
    assert [(c["original"], c["unit"]) for c in fixes] == [("ltrs", "litre"), ("Cu", "cubic foot")]
    assert [r["label"] for r in col["rows"]][-1] == "missing"


def test_empty_csv_fails(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    code, out, err = run([empty], capsys)
    assert code != 0
    assert "no rows" in err
    header_only = tmp_path / "header.csv"
    header_only.write_text("a,b\n")
    assert run([header_only], capsys)[0] != 0


def test_single_cm_column(tmp_path, capsys):
    path = tmp_path / "one.csv"
    path.write_text("width\n1 cm\n")
    code, out, _ = run(["--no-timing", path], capsys)
    assert code == 0
    col = json.loads(out)["datasets"][0]["columns"][0]
    assert col["dimension"] == "length"
    assert col["rows"][0]["unit"] == "centimetre"


def test_annotate_is_byte_deterministic(tmp_path, capsys):
    outs = []
    for i in range(2):
        target = tmp_path / f"r{i}.json"
        assert run(["--kb", FIXTURE_KB, "--no-timing", "--out", target, FIXTURE1_CSV],
                   capsys)[0] == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]


def test_timing_is_reported_by_default(capsys):
    code, out, _ = run(["--kb", FIXTURE_KB, FIXTURE1_CSV], capsys)
    assert code == 0
    assert "elapsed_seconds" in json.loads(out)["datasets"][0]["columns"][0]


def test_figures_are_written(tmp_path, capsys):
    figs = tmp_path / "figs"
    code, out, _ = run(["--kb", FIXTURE_KB, "--no-timing", "--figures", figs, FIXTURE1_CSV],
                       capsys)
    assert code == 0
    written = json.loads(out)["figures"]
    assert len(written) == 2
    for f in written:
        with open(f, "rb") as fh:
            assert fh.read(8) == b"\x89PNG\r\n\x1a\n"


def _truth_for(report):
    truth = []
    for ds in report["datasets"]:
        truth.append({"dataset": ds["dataset"], "columns": [
            {"column": c["name"], "dimension": c["dimension"],
             "rows": [{"value": r["value"], "unit": r["unit"]} for r in c["rows"]]}
            for c in ds["columns"]]})
    return truth


def test_evaluate_identical_predictions_scores_one(tmp_path, capsys):
    report = tmp_path / "pred.json"
    run(["--kb", FIXTURE_KB, "--no-timing", "--columns", "Freezer volume", "--out", report,
         FIXTURE1_CSV], capsys)
    truth = tmp_path / "truth.json"
    truth.write_text(json.dumps(_truth_for(json.loads(report.read_text()))))
    code, out, err = run(["--mode", "evaluate", "--truth", truth, report], capsys)
    assert code == 0, err
    metrics = json.loads(out)["metrics"]
    assert metrics["overall_accuracy"] == 1.0
    assert metrics["per_dataset"]["fixture1"]["unit_accuracy"] == 1.0


def test_evaluate_with_baseline(tmp_path, capsys):
    report = tmp_path / "pred.json"
    run(["--kb", FIXTURE_KB, "--no-timing", "--out", report, FIXTURE1_CSV], capsys)
    doc = json.loads(report.read_text())
    truth = _truth_for(doc)
    truth[0]["columns"][0]["dimension"] = "volume"  # "Model" is not a volume
    (tmp_path / "truth.json").write_text(json.dumps(truth))
    code, out, err = run(["--mode", "evaluate", "--truth", tmp_path / "truth.json",
                          "--baseline-report", report, report], capsys)
    assert code == 0, err
    cmp = json.loads(out)["comparison"]
    assert cmp["mcnemar"] == {"n01": 0, "n10": 0, "p": None}


def test_evaluate_rejects_report_version(tmp_path, capsys):
    report = tmp_path / "pred.json"
    report.write_text(json.dumps({"version": "0", "mode": "annotate", "datasets": []}))
    truth = tmp_path / "truth.json"
    truth.write_text("[]")
    code, _, err = run(["--mode", "evaluate", "--truth", truth, report], capsys)
    assert code == 1
    assert "version" in err


def test_published_unit_identification(capsys):
    code, out, _ = run(["--mode", "evaluate", "--published", "unit_identification",
                        "--compare", "PUC", "Pint"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["comparison"]["paired_t"]["df"] == 14
    assert doc["comparison"]["paired_t"]["t"] > 0


def test_published_dimension_inference(tmp_path, capsys):
    code, out, _ = run(["--mode", "evaluate", "--published", "dimension_inference",
                        "--compare", "PUC", "CCUT", "--figures", tmp_path], capsys)
    assert code == 0
    doc = json.loads(out)
    assert round(doc["methods"]["PUC"]["overall_accuracy"], 2) == 0.96
    assert doc["comparison"]["mcnemar"]["n01"] == 20
    assert (tmp_path / "jaccard.png").exists()


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"w_regular": 0.9, "w_missing": 0.05, "w_anomalous": 0.05,
                               "distance_cutoff": 3}))
    code, out, err = run(["--config", cfg, "--distance-cutoff", "1", "--no-timing",
                          "--kb", FIXTURE_KB, FIXTURE1_CSV], capsys)
    assert code == 0, err
    params = json.loads(out)["params"]
    assert params["w_regular"] == 0.9 and params["distance_cutoff"] == 1


@pytest.mark.parametrize("cfg, msg", [
    ({"w_regular": 0.5}, "mixing"),
    ({"bogus": 1}, "unknown config keys"),
    ({"anomaly_alphabet_size": 1.5}, "must be an integer"),
])
def test_bad_config(tmp_path, capsys, cfg, msg):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, _, err = run(["--config", path, FIXTURE1_CSV], capsys)
    assert code == 1 and msg in err


def test_usage_errors(tmp_path, capsys):
    assert run(["--mode", "canonicalize", FIXTURE1_CSV], capsys)[0] == 1
    assert run(["--mode", "evaluate"], capsys)[0] == 1
    assert run(["--columns", "nope", FIXTURE1_CSV], capsys)[0] == 1
    bad_kb = tmp_path / "kb.json"
    bad_kb.write_text("[]")
    code, _, err = run(["--kb", bad_kb, FIXTURE1_CSV], capsys)
    assert code == 1 and "knowledge base" in err
