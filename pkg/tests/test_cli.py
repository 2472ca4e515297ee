import csv
import io
import json
import math
import subprocess
import sys

import pytest

from gupnl import cli


def run(*argv, environ=None):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), stdout=out, stderr=err, environ=environ or {})
    return code, out.getvalue(), err.getvalue()


def c(d):
    return complex(d["re"], d["im"])


def test_module_entry_point():
    cp = subprocess.run([sys.executable, "-m", "gupnl", "--help"], capture_output=True, text=True)
    assert cp.returncode == 0
    for name in ("roots", "scan", "entangle", "sample", "uncertainty", "limit"):
        assert name in cp.stdout


def test_roots_zero():
    code, out, _ = run("roots", "--P", "0", "--beta", "0.25")
    assert code == 0
    d = json.loads(out)
    assert [c(r) for r in d["closed_form"]] == [0, 2j, -2j]
    assert d["solvers_agree"]


def test_roots_real_value():
    code, out, _ = run("--beta", "1", "roots", "--P", "1")
    d = json.loads(out)
    assert c(d["closed_form"][0]).real == pytest.approx(0.6823278038, abs=1e-10)
    assert c(d["oracle"][0]).real == pytest.approx(0.6823278038, abs=1e-10)
    assert d["printed_pair_imag"]["printed"] != pytest.approx(d["printed_pair_imag"]["vieta"])


def test_roots_series_path():
    code, out, _ = run("roots", "--P", "1", "--beta", "1e-12")
    d = json.loads(out)
    assert d["method"] == "series"
    assert d["max_relative_difference"] < 1e-9


def test_roots_negative_P():
    code, out, _ = run("roots", "--P", "-1", "--beta", "1")
    assert code == 0
    assert c(json.loads(out)["closed_form"][0]).real == pytest.approx(-0.6823278038, abs=1e-10)


def test_roots_csv_single_row():
    code, out, _ = run("roots", "--P", "2", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    assert "closed_form1_re" in rows[0] and "vieta_residuals.sum" in rows[0]


def test_exit_codes():
    assert run("roots")[0] == cli.EXIT_USAGE
    assert run("roots", "--P", "x")[0] == cli.EXIT_USAGE
    assert run("roots", "--P", "1", "--beta", "-1")[0] == cli.EXIT_USAGE
    assert run("roots", "--P", "nan")[0] == cli.EXIT_DOMAIN
    assert run("roots", "--P", "1", "--precision", "3")[0] == cli.EXIT_USAGE
    assert run("entangle", "--P", "1", "--alpha", "1,0,0", "--gamma", "0,1,0")[0] == cli.EXIT_DEGENERATE
    assert run("entangle", "--P", "1", "--alpha", "0,0,0")[0] == cli.EXIT_DEGENERATE
    assert len({cli.EXIT_USAGE, cli.EXIT_DOMAIN, cli.EXIT_NUMERIC, cli.EXIT_DEGENERATE}) == 4


def test_scan_rows():
    code, out, _ = run("scan", "--P-min", "-1", "--P-max", "1", "--steps", "3", "--beta", "1", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["P"]) for r in rows] == [-1, 0, 1]
    mid = rows[1]
    assert float(mid["p1_re"]) == 0 and float(mid["p2_im"]) == 1 and float(mid["p3_im"]) == -1
    assert float(rows[0]["p1_re"]) == -float(rows[2]["p1_re"])


def test_scan_forward_map_rowwise():
    code, out, _ = run("scan", "--P-min", "-50", "--P-max", "50", "--steps", "41", "--beta", "0.3", "--precision", "17")
    for row in json.loads(out)["rows"]:
        P = row["P"]
        for k in ("p1", "p2", "p3"):
            p = c(row[k])
            assert abs(p * (1 + 0.3 * p * p) - P) < 1e-9 * max(1, abs(P))


def test_scan_usage_errors():
    assert run("scan", "--P-min", "1", "--P-max", "1")[0] == cli.EXIT_USAGE
    assert run("scan", "--P-min", "0", "--P-max", "1", "--steps", "1")[0] == cli.EXIT_USAGE


@pytest.mark.parametrize(
    "alpha,entropy",
    [(None, math.log(3)), ("1,0,0", 0.0), ("0.7071067811865476,0.5,0.5", 0.8675632)],
)
def test_entangle(alpha, entropy):
    argv = ["entangle", "--P", "1"] + (["--alpha", alpha] if alpha else [])
    code, out, _ = run(*argv)
    d = json.loads(out)
    assert d["schmidt"]["entropy_nats"] == pytest.approx(entropy, abs=1e-7)
    assert d["bell_benchmark"]["entropy_bits"] == pytest.approx(1.0)
    assert d["correlation"]["conditional_entropy"] == pytest.approx(0, abs=1e-12)


def test_entangle_normalizes_and_parses_complex():
    code, out, _ = run("entangle", "--P", "2", "--alpha", "1,1i,1", "--gamma", "2,0,2")
    d = json.loads(out)
    assert d["alpha_scale"] == pytest.approx(1 / math.sqrt(3))
    assert c(d["alpha"][1]) == pytest.approx(1j / math.sqrt(3))
    assert d["schmidt"]["entropy_nats"] == pytest.approx(math.log(2))


def test_sample_determinism_bytes():
    argv = ("sample", "--P", "1", "--n", "10", "--seed", "7")
    with pytest.warns(Warning):
        first = run(*argv)
    with pytest.warns(Warning):
        second = run(*argv)
    assert first == second and first[0] == 0


def test_sample_subprocess_determinism(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"s{k}.jsonl"
        cp = subprocess.run(
            [sys.executable, "-m", "gupnl", "sample", "--P", "1", "--n", "50", "--seed", "7", "--out", str(path)],
            capture_output=True,
        )
        assert cp.returncode == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_sample_stream_contents():
    code, out, _ = run("sample", "--P", "1", "--n", "2000", "--seed", "3", "--parts", "4")
    lines = [json.loads(l) for l in out.splitlines()]
    records, summary = lines[:-1], lines[-1]
    assert summary["type"] == "summary" and summary["n"] == 2000 and summary["correlation_verified"]
    assert len(records) == 2000
    for r in records:
        assert c(r["outcome_2"]) == -c(r["outcome_1"])
    # partitioned run emits the same bytes as a serial one
    assert run("sample", "--P", "1", "--n", "2000", "--seed", "3")[1] == out


def test_sample_uniform_frequencies():
    code, out, _ = run("sample", "--P", "1", "--n", "90000", "--seed", "1", "--format", "text")
    assert code == 0
    code, out, _ = run("sample", "--P", "1", "--n", "90000", "--seed", "1")
    freqs = json.loads(out.splitlines()[-1])["empirical_freqs"]
    assert all(abs(f - 1 / 3) <= 0.0047 for f in freqs)


def test_sample_csv_real_part_only():
    code, out, err = run("sample", "--P", "1", "--n", "20", "--format", "csv", "--real-part-only")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert set(rows[0]) == {"draw", "branch", "outcome_1", "outcome_2"}
    assert json.loads(err[err.index("{"):])["n"] == 20


def test_sample_usage_errors():
    assert run("sample", "--P", "1", "--n", "0")[0] == cli.EXIT_USAGE


def test_uncertainty():
    code, out, _ = run("uncertainty", "--beta", str(1 / 3))
    d = json.loads(out)
    assert d["minimal_length_analytic"] == pytest.approx(1.0)
    code, out, _ = run("uncertainty", "--beta", "0.02", "--log", "--steps", "5")
    d = json.loads(out)
    assert d["minimal_length_numeric"] == pytest.approx(0.244949, abs=1e-6)
    assert d["relative_difference"] < 1e-8
    assert len(d["rows"]) == 5
    assert run("uncertainty", "--dp-min", "0")[0] == cli.EXIT_USAGE


def test_limit_table():
    code, out, _ = run("limit", "--P", "1", "--beta-start", "1e-2", "--decades", "10", "--format", "csv", "--precision", "17")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 11
    gaps = [abs(float(r["p1_minus_P"])) for r in rows]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    row = next(r for r in rows if float(r["beta"]) == pytest.approx(1e-8))
    assert abs(float(row["im_p2_sqrt_beta"]) - 1) < 1e-7


def test_limit_zero_P():
    code, out, _ = run("limit", "--P", "0")
    assert all(r["p1"] == 0 for r in json.loads(out)["rows"])


def test_json_round_trip_bytes():
    for argv in (("roots", "--P", "3.3"), ("entangle", "--P", "1"), ("scan", "--P-min", "0", "--P-max", "2", "--steps", "4")):
        out = run(*argv)[1]
        assert cli.dumps(json.loads(out)) == out


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("beta = 4\nprecision = 8\n# comment\n")
    d = json.loads(run("roots", "--P", "0", "--config", str(cfg))[1])
    assert d["beta"] == 4.0
    d = json.loads(run("roots", "--P", "0", "--config", str(cfg), environ={"GUPNL_BETA": "9"})[1])
    assert d["beta"] == 9.0
    d = json.loads(run("roots", "--P", "0", "--beta", "16", environ={"GUPNL_BETA": "9", "GUPNL_CONFIG": str(cfg)})[1])
    assert d["beta"] == 16.0
    assert c(d["closed_form"][1]) == 0.25j


def test_out_file(tmp_path):
    path = tmp_path / "roots.json"
    code, out, _ = run("roots", "--P", "1", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text(encoding="utf-8"))["P"] == 1.0


def test_precision_controls_digits():
    d = json.loads(run("roots", "--P", "1", "--precision", "6")[1])
    assert c(d["closed_form"][0]).real == 0.682328


def test_text_format():
    code, out, _ = run("roots", "--P", "1", "--format", "text")
    assert code == 0 and "method: closed_form" in out
