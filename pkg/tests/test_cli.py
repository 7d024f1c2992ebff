import json

import pytest

from labs_mts.bench import TTSSample, write_samples
from labs_mts.cli import main

N92A = "EE01C0E77667DD34DAE94B5"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_energy(capsys):
    code, out, _ = run(capsys, "energy", "--hex", N92A, "--n", "92")
    assert code == 0
    assert out.strip() == "E=490 MF=8.6367"


def test_energy_bad_hex(capsys):
    code, _, err = run(capsys, "energy", "--hex", "ZZ", "--n", "8")
    assert code == 2 and "error" in err


def test_skew(capsys):
    assert run(capsys, "skew", "--hex", N92A, "--n", "92")[:2] == (0, "d=12\n")


def test_skew_budget(capsys):
    code, out, _ = run(capsys, "skew", "--hex", "0CF30C003783CBCC8DA92AAD4", "--n", "99",
                       "--convention", "literal", "--budget", "50")
    assert code == 1 and out.startswith("budget-exceeded")


def test_verify_default_table(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert out.strip().endswith("17/17 entries pass")


def test_verify_failure(tmp_path, capsys):
    t = tmp_path / "t.txt"
    t.write_text(f"92 {N92A} 491 8.64\n")
    code, out, _ = run(capsys, "verify", "--table", str(t))
    assert code == 1 and "FAIL" in out


def test_verify_missing_file(capsys):
    assert run(capsys, "verify", "--table", "/nonexistent/x.txt")[0] == 2


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--n", "13", "--local-optima")
    assert code == 0
    assert out.startswith("n=13 optimal_E=6 MF=14.0833 classes=1")
    assert "local_optima=" in out


def test_oracle_out_of_range(capsys):
    assert run(capsys, "oracle", "--n", "40")[0] == 2


def test_solve(tmp_path, capsys):
    out_file = tmp_path / "r.jsonl"
    code, out, _ = run(capsys, "solve", "--n", "13", "--seed", "1", "--out", str(out_file))
    assert code == 0
    rec = json.loads(out)
    assert rec["best_e"] == 6 and rec["reached_target"]
    assert json.loads(out_file.read_text()) == rec


def test_solve_no_target(capsys):
    assert run(capsys, "solve", "--n", "64")[0] == 2


def test_bench_and_fit(tmp_path, capsys):
    samples = tmp_path / "s.jsonl"
    code, out, _ = run(capsys, "bench", "--n-min", "5", "--n-max", "7", "--reps", "2",
                       "--out", str(samples))
    assert code == 0 and out.count("median=") == 3
    synth = tmp_path / "synth.jsonl"
    write_samples(synth, [TTSSample(n, 0, 2 * 1.3 ** n, True, 0, 1) for n in range(10, 16)])
    fits = tmp_path / "fits.jsonl"
    code, out, _ = run(capsys, "fit", "--in", str(synth), "--n-min-fit", "10",
                       "--n-max-fit", "15", "--out", str(fits))
    assert code == 0 and "b=1.3000" in out
    assert len(fits.read_text().splitlines()) == 4


def test_fit_too_few_points(tmp_path, capsys):
    synth = tmp_path / "synth.jsonl"
    write_samples(synth, [TTSSample(n, 0, 1.0, True, 0, 1) for n in (10, 11)])
    assert run(capsys, "fit", "--in", str(synth), "--n-min-fit", "10", "--n-max-fit", "11")[0] == 2


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["energy", "--hex", "0"])
    assert exc.value.code == 2
