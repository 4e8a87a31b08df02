import csv
import io
import json

import pytest

from unique_sampling.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sample_toy_program_to_exhaustion(capsys):
    code, out, _ = run(capsys, "sample", "--method", "wor", "--k", "14", "--seed", "1")

    assert code == 0
    records = rows(out)
    assert len(records) == 14
    assert len({record["trace"] for record in records}) == 14
    assert float(records[-1]["cumulative_probability"]) == pytest.approx(1.0, abs=1e-9)
    assert {record["duplicate"] for record in records} == {"false"}


def test_sample_reports_early_exhaustion(capsys):
    code, out, _ = run(capsys, "sample", "--k", "20", "--seed", "1")

    assert code == 0
    records = rows(out)
    assert len(records) == 15
    assert records[-1]["index"] == "exhausted"


def test_sample_with_no_samples_prints_the_header(capsys):
    code, out, _ = run(capsys, "sample", "--method", "iid", "--k", "0")

    assert code == 0
    assert out == "index,output,trace,probability,cumulative_probability,duplicate\n"


@pytest.mark.parametrize("method", ["iid", "wor", "sbs", "batched"])
def test_sample_is_byte_identical_for_a_seed(capsys, method):
    argv = ("sample", "--method", method, "--k", "6", "--batch-size", "3", "--seed", "5")

    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)

    assert first == second
    assert len(rows(first)) == 6


def test_sample_reads_a_program_spec(capsys, tmp_path):
    spec = tmp_path / "program.json"
    spec.write_text(
        json.dumps(
            {
                "kind": "explicit",
                "traces": [
                    {"trace": [0], "probability": 0.5, "output": "heads"},
                    {"trace": [1], "probability": 0.5, "output": "tails"},
                ],
            }
        ),
        encoding="utf-8",
    )

    code, out, _ = run(capsys, "sample", str(spec), "--k", "2")

    assert code == 0
    assert sorted(record["output"] for record in rows(out)) == ["heads", "tails"]


@pytest.mark.parametrize("kind", ["figure3", "toy"])
def test_sample_reads_the_bundled_program_by_kind(capsys, tmp_path, kind):
    spec = tmp_path / "program.json"
    spec.write_text(json.dumps({"kind": kind}), encoding="utf-8")

    code, out, _ = run(capsys, "sample", str(spec), "--k", "14", "--seed", "1")

    assert code == 0
    assert len({record["trace"] for record in rows(out)}) == 14


def write_coin(path, heads="same", tails="same"):
    path.write_text(
        json.dumps(
            {
                "kind": "explicit",
                "traces": [
                    {"trace": [0], "probability": 0.5, "output": heads},
                    {"trace": [1], "probability": 0.5, "output": tails},
                ],
            }
        ),
        encoding="utf-8",
    )


def test_sample_warns_when_outputs_repeat(capsys, caplog, tmp_path):
    spec = tmp_path / "program.json"
    write_coin(spec)

    code, out, _ = run(capsys, "sample", str(spec), "--k", "2")

    assert code == 0
    assert len(rows(out)) == 2
    assert "give the same output" in caplog.text


def test_sample_respects_the_trace_budget(capsys, monkeypatch, tmp_path):
    spec = tmp_path / "program.json"
    write_coin(spec, heads="heads", tails="tails")
    monkeypatch.setenv("UNIQUE_SAMPLING_MAX_TRACES", "1")

    code, _, err = run(capsys, "sample", str(spec), "--k", "2")

    assert code == 1
    assert "error" in err


def test_sample_writes_to_a_file(capsys, tmp_path):
    target = tmp_path / "samples.csv"

    code, out, _ = run(capsys, "sample", "--k", "3", "--out", str(target))

    assert code == 0
    assert out == ""
    assert len(rows(target.read_text(encoding="utf-8"))) == 3


def test_unparseable_spec_exits_with_two(capsys, tmp_path):
    spec = tmp_path / "broken.json"
    spec.write_text("{not json", encoding="utf-8")

    code, _, err = run(capsys, "sample", str(spec))

    assert code == 2
    assert "error" in err


def test_missing_spec_exits_with_two(capsys, tmp_path):
    code, _, _ = run(capsys, "sample", str(tmp_path / "absent.json"))

    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ("sample", "--method", "greedy"),
        ("sample", "--k", "-1"),
        ("sample", "--temperature", "hot"),
        ("frobnicate",),
        (),
    ],
)
def test_usage_errors_exit_with_one(capsys, argv):
    code, _, _ = run(capsys, *argv)

    assert code == 1


def test_tsp_on_a_random_instance(capsys):
    code, out, _ = run(capsys, "tsp", "--n", "7", "--k", "10", "--seed", "3")

    assert code == 0
    records = rows(out)
    assert [record["method"] for record in records] == ["greedy", "iid", "wor", "batched"]
    by_method = {record["method"]: record for record in records}
    assert by_method["wor"]["duplicates"] == "0"
    assert by_method["greedy"]["samples"] == "1"
    for record in records:
        assert float(record["gap"]) >= -1e-9


def test_tsp_reads_an_instance_file(capsys, tmp_path):
    instance = tmp_path / "square.txt"
    instance.write_text("4\n0 0\n1 1\n1 0\n0 1\n", encoding="utf-8")

    code, out, _ = run(capsys, "tsp", "--instance", str(instance), "--k", "3")

    assert code == 0
    greedy = rows(out)[0]
    assert float(greedy["best_cost"]) == pytest.approx(4.0)
    assert float(greedy["gap"]) == pytest.approx(0.0, abs=1e-9)


def test_tsp_rejects_a_malformed_instance(capsys, tmp_path):
    instance = tmp_path / "bad.txt"
    instance.write_text("3\n0 0\n1 1\n", encoding="utf-8")

    code, _, _ = run(capsys, "tsp", "--instance", str(instance))

    assert code == 2


def test_estimate_prints_every_estimator(capsys):
    code, out, _ = run(capsys, "estimate", "--trials", "3", "--seed", "2")

    assert code == 0
    records = rows(out)
    assert len(records) == 5 * 7
    exact_rows = [record for record in records if record["k"] == "100" and record["estimator"].startswith("hge")]
    assert len({record["mean"] for record in exact_rows}) == 1
    for record in exact_rows:
        assert record["q05"] == record["q95"]


def test_bench_counts(capsys):
    code, out, _ = run(capsys, "bench", "--k", "4", "--length", "5", "--seed", "0")

    assert code == 0
    records = rows(out)
    by_method = {}
    for record in records:
        by_method.setdefault(record["method"], []).append(record)
    assert int(by_method["sbs"][0]["expansions"]) == 1 + (5 - 1) * 4
    assert int(by_method["ur-best"][0]["expansions"]) == 5
    assert int(by_method["ur-worst"][0]["expansions"]) == 1 + 4 * (5 - 1)
    batched = sorted(by_method["batched"], key=lambda record: int(record["batches"]))
    assert [int(record["batches"]) for record in batched] == [1, 2, 4]
    expansions = [int(record["expansions"]) for record in batched]
    assert expansions == sorted(expansions, reverse=True)
    assert expansions[0] == 17
