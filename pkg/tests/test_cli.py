import json
import subprocess
import sys

import pytest

from realitygame.cli import main
from realitygame.experiments import CSV_HEADERS

SPECS = {
    "bias-dynamics": "map = self-defeating\nensemble = 2\nhorizon = 300\n",
    "wealth-dynamics": "map = multimodal\nhorizon = 300\nsnapshot_stride = 50\n",
    "subjective-distribution": "horizon = 1000\n",
    "rational-curve": "map = arctan\nalpha = 2\nrational_wealth = 0.2, 0.6\n",
    "inefficiency": "map = constant\nn_players = 300\nhorizon = 2000\nensemble = 8\n",
    "table1": "n_players = 200\nhorizon = 2000\nensemble = 4\n",
}

EXPECTED = {
    "bias-dynamics": {"bias.csv": "bias", "bias.svg": None},
    "wealth-dynamics": {"wealth.csv": "wealth", "wealth.svg": None},
    "subjective-distribution": {"subjective.csv": "subjective", "subjective.svg": None},
    "rational-curve": {"rational_curve.csv": "rational_curve",
                       "rational_optima.csv": "rational_optima",
                       "rational_curve.svg": None},
    "inefficiency": {"inefficiency.csv": "inefficiency", "fits.csv": "fits",
                     "fit.txt": None, "inefficiency.svg": None},
    "table1": {"fits.csv": "fits", "table1.txt": None, "table1.svg": None,
               "inefficiency_alpha_2.csv": "inefficiency"},
}


def _write(tmp_path, kind, extra=""):
    path = tmp_path / f"{kind}.spec"
    path.write_text(f"kind = {kind}\n" + SPECS[kind] + extra)
    return path


@pytest.mark.parametrize("kind", list(SPECS))
def test_each_subcommand_writes_outputs(tmp_path, kind, capsys):
    out = tmp_path / "out"
    assert main([kind, "--spec", str(_write(tmp_path, kind)), "--out", str(out),
                 "--workers", "2"]) == 0
    for name, schema in EXPECTED[kind].items():
        text = (out / name).read_text()
        if schema:
            assert text.splitlines()[0] == ",".join(CSV_HEADERS[schema])
            assert len(text.splitlines()) > 1
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["spec"]["kind"] == kind
    assert manifest["csv_schema_version"] == 1
    assert set(EXPECTED[kind]) <= set(manifest["outputs"])
    assert {"version", "seeds", "elapsed_seconds", "started_utc", "runs"} <= set(manifest)


def test_table1_layout(tmp_path):
    out = tmp_path / "t1"
    assert main(["table1", "--spec", str(_write(tmp_path, "table1")), "--out", str(out)]) == 0
    lines = (out / "table1.txt").read_text().splitlines()
    assert [c.strip() for c in lines[0].split("|")] == [
        "reality map", "alpha=2", "alpha=1.5", "alpha=0.75", "alpha=0.5",
        "q(p)=const", "q(p)=1-p"]
    assert [c.strip() for c in lines[2].split("|")][1:] == [
        "0.30", "0.23", "0.25", "0.50", "1.00", "1.00"]
    assert len((out / "fits.csv").read_text().splitlines()) == 7


def test_rational_optima_content(tmp_path):
    out = tmp_path / "r"
    main(["rational-curve", "--spec", str(_write(tmp_path, "rational-curve")), "--out", str(out)])
    rows = (out / "rational_optima.csv").read_text().splitlines()[1:]
    assert rows[0].startswith("0.2,0.5,") and rows[0].endswith(",true")
    assert len(rows) == 3 and rows[1].endswith(",false")


@pytest.mark.parametrize("kind", ["bias-dynamics", "inefficiency", "table1"])
def test_outputs_do_not_depend_on_workers(tmp_path, kind):
    spec = _write(tmp_path, kind)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([kind, "--spec", str(spec), "--out", str(a), "--workers", "1"]) == 0
    assert main([kind, "--spec", str(spec), "--out", str(b), "--workers", "8"]) == 0
    for f in sorted(a.iterdir()):
        if f.name != "manifest.json":
            assert f.read_bytes() == (b / f.name).read_bytes(), f.name


def test_seed_override(tmp_path):
    spec = _write(tmp_path, "bias-dynamics")
    main(["bias-dynamics", "--spec", str(spec), "--out", str(tmp_path / "a"), "--seed", "1"])
    main(["bias-dynamics", "--spec", str(spec), "--out", str(tmp_path / "b"), "--seed", "2"])
    assert json.loads((tmp_path / "a" / "manifest.json").read_text())["spec"]["seed"] == 1
    assert (tmp_path / "a" / "bias.csv").read_bytes() != (tmp_path / "b" / "bias.csv").read_bytes()


@pytest.mark.parametrize("text, needle", [
    ("kind = inefficiency\nmap = arctan\nalpha = -1\n", "alpha: must be > 0"),
    ("kind = inefficiency\nmap arctan\n", "line 2, column 1"),
    ("kind = bias-dynamics\nmap = identity\n", "subcommand is 'inefficiency'"),
])
def test_errors_exit_nonzero(tmp_path, capsys, text, needle):
    spec = tmp_path / "bad.spec"
    spec.write_text(text)
    assert main(["inefficiency", "--spec", str(spec), "--out", str(tmp_path / "o")]) != 0
    assert needle in capsys.readouterr().err


def test_missing_spec_file(tmp_path, capsys):
    assert main(["bias-dynamics", "--spec", str(tmp_path / "nope")]) != 0
    assert "error" in capsys.readouterr().err


def test_bad_arguments():
    with pytest.raises(SystemExit):
        main(["bias-dynamics", "--spec", "x", "--seed", "-3"])
    with pytest.raises(SystemExit):
        main(["bias-dynamics", "--spec", "x", "--workers", "0"])


def test_module_entry_point(tmp_path):
    spec = _write(tmp_path, "subjective-distribution")
    res = subprocess.run([sys.executable, "-m", "realitygame.cli", "subjective-distribution",
                          "--spec", str(spec), "--out", str(tmp_path / "o")],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "o" / "subjective.csv").exists()


def test_verify_subset(capsys):
    assert main(["verify", "--only", "5"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS] 5.") == 3
