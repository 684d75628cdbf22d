import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from aqc.cli import EXIT_CONSTRAINT, EXIT_USAGE, ConfigError, load_config, main
from aqc.codebook import REFERENCE_S0, REFERENCE_S1, CodeBook, parse_letter_sequence
from aqc.reports import COLUMNS


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write_config(path, **fields):
    path.write_text(json.dumps(fields, indent=2))
    return path


# -- gen-codebook -------------------------------------------------------------

def test_gen_codebook(tmp_path, capsys):
    out_file = tmp_path / "cb.json"
    code, out, _ = run(["gen-codebook", "--pairs", 6, "--seed", 7,
                        "--strategy", "cyclic", "-o", out_file], capsys)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2 and all(len(ln.split()) == 12 for ln in lines)
    cb = CodeBook.from_json(out_file.read_text())
    assert cb.cycles == (6,)
    assert parse_letter_sequence(lines[0]) == cb.s0
    assert parse_letter_sequence(lines[1]) == cb.s1


def test_gen_codebook_too_small(tmp_path, capsys):
    code, _, err = run(["gen-codebook", "--pairs", 1, "--seed", 7,
                        "-o", tmp_path / "cb.json"], capsys)
    assert code == EXIT_USAGE
    assert "TooSmall" in err


def test_gen_codebook_retry_exhausted(tmp_path, capsys):
    code, _, err = run(["gen-codebook", "--pairs", 2, "--seed", 0, "--strategy", "rejection",
                        "--max-attempts", 0, "-o", tmp_path / "cb.json"], capsys)
    assert code == EXIT_CONSTRAINT
    assert "RetryExhausted" in err


def test_seed_required():
    with pytest.raises(SystemExit) as info:
        main(["gen-codebook", "--pairs", "4"])
    assert info.value.code == EXIT_USAGE


def test_gen_codebook_deterministic(tmp_path, capsys):
    outputs = []
    for name in ("a.json", "b.json"):
        code, out, _ = run(["gen-codebook", "--pairs", 9, "--seed", 3, "--strategy",
                            "rejection", "-o", tmp_path / name], capsys)
        outputs.append((out, (tmp_path / name).read_bytes()))
    assert outputs[0] == outputs[1]


# -- transmit -----------------------------------------------------------------

@pytest.fixture
def reference_file(tmp_path):
    path = tmp_path / "reference.txt"
    path.write_text(f"{REFERENCE_S0}\n{REFERENCE_S1}\n")
    return path


def test_transmit_noiseless_sound(tmp_path, capsys, reference_file):
    for seed in range(40):
        code, out, _ = run(["transmit", "--codebook", reference_file, "--bit", 1,
                            "--seed", seed], capsys)
        assert code == 0
        rec = json.loads(out)
        assert rec["conclusive"]["decision"] in ("1", "inconclusive")


def test_transmit_flip_zero_equals_noiseless(capsys, reference_file):
    _, a, _ = run(["transmit", "--codebook", reference_file, "--bit", 0, "--seed", 9,
                   "--channel", "noiseless"], capsys)
    _, b, _ = run(["transmit", "--codebook", reference_file, "--bit", 0, "--seed", 9,
                   "--channel", "flip:0.0"], capsys)
    a, b = json.loads(a), json.loads(b)
    a.pop("channel"), b.pop("channel")
    assert a == b


def test_transmit_golden(capsys, reference_file):
    golden = (Path(__file__).parent / "data" / "golden_transcript.json").read_text()
    _, out, _ = run(["transmit", "--codebook", reference_file, "--bit", 0,
                     "--seed", 20051], capsys)
    assert out == golden


def test_transmit_bad_codebook(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("A A B B\nA A B B\n")
    code, _, err = run(["transmit", "--codebook", bad, "--bit", 0, "--seed", 1], capsys)
    assert code == EXIT_USAGE and "OverlapError" in err
    code, _, _ = run(["transmit", "--codebook", tmp_path / "missing", "--bit", 0,
                      "--seed", 1], capsys)
    assert code == EXIT_USAGE


# -- experiment / report ------------------------------------------------------

def read_rows(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        assert tuple(reader.fieldnames) == COLUMNS
        return list(reader)


def test_experiment_cyclic_sweep(tmp_path, capsys):
    cfg = write_config(tmp_path / "sweep.json", n_pairs=list(range(2, 11)),
                       codebook_strategy="cyclic", channel="noiseless",
                       decoder="statistical", trials=2000, seed=1, output="sweep.csv")
    code, _, _ = run(["experiment", cfg], capsys)
    assert code == 0
    rows = read_rows(tmp_path / "sweep.csv")
    assert [int(r["n_pairs"]) for r in rows] == list(range(2, 11))
    for r in rows:
        n = int(r["n_pairs"])
        assert float(r["closed_form"]) == 2.0 ** (1 - n)
        assert float(r["exact"]) == pytest.approx(2.0 ** (1 - n), abs=1e-12)
    code, out, _ = run(["report", "--check", tmp_path / "sweep.csv"], capsys)
    assert code == 0 and "ok" in out


def test_experiment_theta_sweep(tmp_path, capsys):
    cfg = write_config(tmp_path / "attack.json", report="disturbance", n_pairs=4,
                       channel=["intercept:0", "intercept:pi/4", "intercept:pi/2"],
                       trials=20000, seed=2, output="attack.csv")
    assert run(["experiment", cfg], capsys)[0] == 0
    rows = read_rows(tmp_path / "attack.csv")
    mc = [float(r["mc"]) for r in rows]
    exact = [float(r["exact"]) for r in rows]
    assert mc[0] == 1.0
    assert mc[0] > mc[1] > mc[2]
    assert exact == pytest.approx([1.0, 0.75, 0.5], abs=1e-12)
    assert run(["report", "--check", tmp_path / "attack.csv"], capsys)[0] == 0


def test_experiment_info_and_json(tmp_path, capsys, reference_file):
    cfg = write_config(tmp_path / "info.json", report="info", codebook="reference.txt",
                       decoder=["statistical", "conclusive"], trials=5000, seed=3,
                       output="info.jsonl", format="json")
    assert run(["experiment", cfg], capsys)[0] == 0
    recs = [json.loads(ln) for ln in (tmp_path / "info.jsonl").read_text().splitlines()]
    assert [list(r) for r in recs] == [list(COLUMNS)] * 2
    assert recs[0]["decoder"] == "mi:statistical"
    assert recs[0]["closed_form"] == pytest.approx(1 - 1 / 16)


def test_report_check_detects_tampering(tmp_path, capsys):
    cfg = write_config(tmp_path / "s.json", n_pairs=[3, 4], trials=100, seed=1,
                       output="s.csv")
    run(["experiment", cfg], capsys)
    path = tmp_path / "s.csv"
    rows = read_rows(path)
    rows[0]["closed_form"] = "0.3"
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    code, _, err = run(["report", "--check", path], capsys)
    assert code == EXIT_USAGE and "line 2" in err


@pytest.mark.parametrize("fields, needle", [
    ({"n_pairs": 4, "trials": 0, "seed": 1, "output": "o.csv"}, "'trials'"),
    ({"n_pairs": 4, "trials": 10, "output": "o.csv"}, "'seed'"),
    ({"n_pairs": 1, "trials": 10, "seed": 1, "output": "o.csv"}, "'n_pairs'"),
    ({"n_pairs": 4, "trials": 10, "seed": 1, "output": "o.csv", "channel": "flip:2"},
     "'channel'"),
    ({"n_pairs": 4, "trials": 10, "seed": 1, "output": "o.csv", "decoder": "ml"},
     "'decoder'"),
    ({"n_pairs": 4, "trials": 10, "seed": 1, "output": "o.csv", "colour": 1}, "'colour'"),
    ({"codebook": "nope.json", "trials": 10, "seed": 1, "output": "o.csv"}, "'codebook'"),
    ({"n_pairs": 4, "trials": 10, "seed": 1, "output": "o.csv", "report": "info"},
     "'trials'"),
])
def test_config_errors(tmp_path, capsys, fields, needle):
    cfg = write_config(tmp_path / "bad.json", **fields)
    with pytest.raises(ConfigError, match=needle):
        load_config(cfg)
    code, _, err = run(["experiment", cfg], capsys)
    assert code == EXIT_USAGE and needle in err


def test_config_syntax_error_reports_line(tmp_path, capsys):
    cfg = tmp_path / "broken.json"
    cfg.write_text('{\n  "seed": 1,\n  "trials": ,\n}\n')
    code, _, err = run(["experiment", cfg], capsys)
    assert code == EXIT_USAGE and "broken.json:3:" in err


def test_experiment_too_large_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path / "big.json", report="info", n_pairs=[13],
                       trials=100, seed=1, output="big.csv")
    # N > 12 skips enumeration rather than failing
    assert run(["experiment", cfg], capsys)[0] == 0
    assert read_rows(tmp_path / "big.csv")[0]["exact"] == ""


# -- determinism --------------------------------------------------------------

def test_every_command_deterministic(tmp_path, capsys, reference_file):
    cfg = write_config(tmp_path / "d.json", n_pairs=[2, 5], channel=["noiseless", "flip:0.1"],
                       decoder=["statistical", "conclusive"], trials=3000, seed=4,
                       output="d.csv")
    commands = [
        ["gen-codebook", "--pairs", 7, "--seed", 11, "-o", tmp_path / "g.json"],
        ["transmit", "--codebook", reference_file, "--bit", 1, "--seed", 5,
         "--channel", "intercept:pi/3"],
        ["experiment", cfg],
        ["report", "--check", tmp_path / "d.csv"],
    ]
    files = {"gen-codebook": tmp_path / "g.json", "experiment": tmp_path / "d.csv"}
    for argv in commands:
        results = []
        for _ in range(2):
            code, out, err = run(argv, capsys)
            f = files.get(argv[0])
            results.append((code, out, err, f.read_bytes() if f else None))
        assert results[0] == results[1]
        assert results[0][0] == 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "aqc", "gen-codebook", "--pairs", "3",
                           "--seed", "1", "-o", str(tmp_path / "c.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert len(proc.stdout.splitlines()) == 2
