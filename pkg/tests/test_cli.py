import json
import subprocess
import sys

import pytest

from isodrum.cli import main


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def test_gassmann_check(tmp_path):
    assert run(tmp_path, "gassmann-check") == 0
    report = json.loads((tmp_path / "gassmann.json").read_text())
    assert report["almost_conjugate"] and not report["conjugate"]
    assert report["group_order"] == 168
    assert sorted(report["class_sizes"]) == [1, 21, 24, 24, 42, 56]


def test_derive_diagrams(tmp_path):
    assert run(tmp_path, "derive-diagrams") == 0
    report = json.loads((tmp_path / "diagrams.json").read_text())
    assert report["trees"] == [True, True]
    assert len(report["involutions"]) == 3


def test_build_domains_outputs(tmp_path):
    assert run(tmp_path, "build-domains", "--levels", "0,2") == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == sorted(
        ["drum1.json", "drum2.json", "drum1.svg", "drum2.svg"]
        + [f"drum{i}_L{L}.mesh" for i in (1, 2) for L in (0, 2)]
    )


def test_outputs_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["build-domains", "--levels", "1", "--out", str(out)]) == 0
        assert main(["spectrum", "--levels", "3", "--count", "4", "--out", str(out)]) == 0
    for p in a.iterdir():
        assert p.read_bytes() == (b / p.name).read_bytes(), p.name


def test_spectrum_csv_rows(tmp_path):
    assert run(tmp_path, "spectrum", "--levels", "3") == 0
    for i in (1, 2):
        lines = (tmp_path / f"drum{i}_dirichlet_L3.csv").read_text().splitlines()
        assert lines[0] == "index,lambda,residual,level,bc"
        assert len(lines) == 11


def test_compare_passes(tmp_path):
    assert run(tmp_path, "compare", "--levels", "2,3,4", "--count", "4") == 0
    report = json.loads((tmp_path / "compare_dirichlet.json").read_text())
    assert report["passed"]
    assert len(report["raw_trend"]) == 3


def test_compare_neumann(tmp_path):
    assert run(tmp_path, "compare", "--bc", "neumann", "--levels", "2,3,4", "--count", "4") == 0


def test_compare_threshold_failure_exits_1(tmp_path):
    # zero threshold cannot be met by floating point
    assert run(tmp_path, "compare", "--levels", "2,3,4", "--count", "4", "--threshold", "1e-300") == 1


def test_transplant_verify(tmp_path):
    assert run(tmp_path, "transplant-verify", "--levels", "2,3", "--count", "3") == 0
    report = json.loads((tmp_path / "transplant_dirichlet.json").read_text())
    assert report["passed"]


def test_weyl_small(tmp_path):
    # too coarse for the 10% criterion; only the plumbing is checked here
    code = run(tmp_path, "weyl", "--levels", "3", "--count", "60")
    report = json.loads((tmp_path / "weyl_dirichlet.json").read_text())
    assert code == (0 if report["passed"] else 1)
    assert report["fits"][0]["count"] == 60


def test_mixed_needs_map(tmp_path, capsys):
    assert run(tmp_path, "spectrum", "--bc", "mixed") == 2
    assert "mixed-map" in capsys.readouterr().err


def test_mixed_map_incomplete(tmp_path):
    assert run(tmp_path, "spectrum", "--bc", "mixed", "--mixed-map", "0=d,1=n") == 2


def test_mixed_runs(tmp_path):
    assert run(tmp_path, "spectrum", "--bc", "mixed", "--mixed-map", "0=d,1=n,2=d", "--levels", "2", "--count", "3") == 0
    assert (tmp_path / "drum1_mixed_L2.csv").exists()


def test_unknown_flag_exits_2(tmp_path):
    with pytest.raises(SystemExit) as info:
        run(tmp_path, "spectrum", "--frobnicate")
    assert info.value.code == 2


def test_bad_count_exits_2(tmp_path):
    assert run(tmp_path, "spectrum", "--count", "0") == 2


def test_domains_round_trip(tmp_path):
    assert run(tmp_path, "build-domains") == 0
    d1, d2 = tmp_path / "drum1.json", tmp_path / "drum2.json"
    again = tmp_path / "again"
    assert main(["spectrum", "--levels", "2", "--count", "3", "--domains", str(d1), str(d2), "--out", str(again)]) == 0
    assert main(["spectrum", "--levels", "2", "--count", "3", "--out", str(tmp_path)]) == 0
    assert (again / "drum1_dirichlet_L2.csv").read_bytes() == (tmp_path / "drum1_dirichlet_L2.csv").read_bytes()


def test_scalene_base(tmp_path):
    assert run(tmp_path, "build-domains", "--base", "0,0,1,0,1/4,2/3") == 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "isodrum", "gassmann-check", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "almost conjugate: True" in proc.stdout
