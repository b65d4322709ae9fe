from __future__ import annotations

import json
import math
import subprocess
import sys

import pytest

from randsum_zeros import cli
from randsum_zeros.render_io import read_csv_profile, read_pgm


def write_config(tmp_path, **doc):
    p = tmp_path / "run.json"
    doc.setdefault("output", str(tmp_path / "out"))
    p.write_text(json.dumps(doc))
    return str(p)


def test_density_power_default_grid(tmp_path):
    cfg = write_config(tmp_path, family="power", n=10)
    assert cli.main(["density", "--config", cfg]) == 0
    assert read_pgm(tmp_path / "out.pgm").shape == (440, 440)
    xs, g = read_csv_profile(tmp_path / "out_g.csv")
    assert xs.size == 440 and (tmp_path / "out_g.csv").read_text().startswith("x,g\n")
    assert not (tmp_path / "out_g_imag.csv").exists()


def test_density_cosine_writes_imaginary_profile(tmp_path):
    cfg = write_config(tmp_path, family="cosine", n=10, grid={"nx": 32, "ny": 24})
    assert cli.main(["density", "--config", cfg]) == 0
    text = (tmp_path / "out_g_imag.csv").read_text()
    assert text.startswith("y,g\n") and len(text.splitlines()) == 25


def test_flags_override_the_config(tmp_path):
    cfg = write_config(tmp_path, family="power", n=10, grid={"nx": 16, "ny": 16})
    out = tmp_path / "other"
    assert cli.main(["density", "--config", cfg, "--family", "weyl", "--n", "4", "--out", str(out)]) == 0
    assert read_pgm(tmp_path / "other.pgm").shape == (16, 16)


def test_density_without_config(tmp_path):
    out = tmp_path / "x" / "p"
    assert cli.main(["density", "--family", "power", "--n", "3", "--out", str(out)]) == 0
    assert (tmp_path / "x" / "p.pgm").exists()


def test_usage_errors_exit_two(tmp_path, capsys):
    cfg = write_config(tmp_path, family="powr", n=10)
    assert cli.main(["density", "--config", cfg]) == 2
    assert "family" in capsys.readouterr().err
    assert cli.main(["density", "--config", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["density"]) == 2
    assert cli.main(["density", "--family", "power", "--n", "0"]) == 2
    with pytest.raises(SystemExit) as info:
        cli.main(["nonsense"])
    assert info.value.code == 2


def test_sample_with_zero_trials_exits_two(tmp_path):
    cfg = write_config(tmp_path, family="power", n=10)
    assert cli.main(["sample", "--config", cfg]) == 2


def test_sample_outputs_and_determinism(tmp_path):
    cfg = write_config(tmp_path, family="rootbinomial", n=6, trials=1500, seed=3)
    assert cli.main(["sample", "--config", cfg]) == 0
    first = {s: (tmp_path / f"out{s}").read_bytes() for s in ("_hist.pgm", "_roots.csv", "_summary.json")}
    summary = json.loads(first["_summary.json"])
    assert summary["trials"] == 1500 and summary["nonconverged"] == 0
    assert summary["total_roots"] == 6 * 1500
    rows = first["_roots.csv"].decode().splitlines()
    assert rows[0] == "re,im,trial" and len(rows) == 1 + 6 * 1500
    assert abs(summary["mean_real_roots"] - math.sqrt(6)) < 0.2
    assert cli.main(["sample", "--config", cfg]) == 0
    for s, data in first.items():
        assert (tmp_path / f"out{s}").read_bytes() == data


def test_compare_pass_and_fail(tmp_path):
    cfg = write_config(tmp_path, family="power", n=10, trials=20000, seed=1,
                       window={"xmin": -2, "xmax": 2, "ymin": 0.05, "ymax": 2}, bins={"nx": 16, "ny": 16, "axis": 16})
    assert cli.main(["compare", "--config", cfg]) == 0
    report = json.loads((tmp_path / "out_compare.json").read_text())
    assert report["passed"] is True
    assert cli.main(["compare", "--config", cfg, "--against", "weyl"]) == 1
    assert json.loads((tmp_path / "out_compare.json").read_text())["passed"] is False
    assert cli.main(["compare", "--config", cfg, "--against", "wyl"]) == 2


def test_compare_on_an_empty_histogram_exits_two(tmp_path):
    cfg = write_config(tmp_path, family="power", n=10, trials=3,
                       window={"xmin": 50, "xmax": 51, "ymin": 50, "ymax": 51})
    assert cli.main(["compare", "--config", cfg]) == 2


def test_console_entry_point(tmp_path):
    out = tmp_path / "e"
    res = subprocess.run(
        [sys.executable, "-m", "randsum_zeros.cli", "density", "--family", "weyl", "--n", "5", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "e.pgm").exists()
