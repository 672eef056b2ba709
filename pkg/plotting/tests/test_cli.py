import json

import pytest

from vriesz_plots.cli import main


def test_norms_end_to_end_with_auto_manifest(run_dir, tmp_path, capsys):
    out = tmp_path / "norms.svg"
    code = main(["norms", "--csv", str(run_dir / "diagnostics.csv"),
                 "--out", str(out)])
    assert code == 0
    assert out.exists()
    stdout = capsys.readouterr().out
    assert f"wrote {out}" in stdout
    assert "hash-checked against run_manifest.json" in stdout


def test_norms_without_manifest_still_renders(run_dir, tmp_path, capsys):
    # point at a copy of the CSV so no sibling manifest is found
    csv = tmp_path / "diagnostics.csv"
    csv.write_bytes((run_dir / "diagnostics.csv").read_bytes())
    code = main(["norms", "--csv", str(csv), "--out", str(tmp_path / "n.svg")])
    assert code == 0
    assert "hash-checked" not in capsys.readouterr().out


def test_explicit_manifest_mismatch_exits_2(run_dir, tmp_path, capsys):
    manifest = json.loads((run_dir / "run_manifest.json").read_text())
    manifest["config_hash"] = "0" * 64
    bad = tmp_path / "other_manifest.json"
    bad.write_text(json.dumps(manifest))
    code = main(["norms", "--csv", str(run_dir / "diagnostics.csv"),
                 "--out", str(tmp_path / "n.svg"), "--manifest", str(bad)])
    assert code == 2
    assert "mismatch" in capsys.readouterr().err


def test_missing_input_exits_2(tmp_path, capsys):
    code = main(["norms", "--csv", str(tmp_path / "nope.csv"),
                 "--out", str(tmp_path / "n.svg")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_empty_history_exits_2(tmp_path, capsys):
    p = tmp_path / "empty.csv"
    p.write_text("t,mass\n")
    code = main(["norms", "--csv", str(p), "--out", str(tmp_path / "n.svg")])
    assert code == 2
    assert "no data rows" in capsys.readouterr().err


def test_non_svg_output_exits_2(run_dir, tmp_path, capsys):
    code = main(["norms", "--csv", str(run_dir / "diagnostics.csv"),
                 "--out", str(tmp_path / "fig.pdf")])
    assert code == 2
    assert "vector SVG" in capsys.readouterr().err


def test_kg_sweep_and_phase_space_subcommands(kg_dir, run_dir, tmp_path):
    assert main(["kg-sweep", "--csv", str(kg_dir / "kg_sweep.csv"),
                 "--out", str(tmp_path / "kg.svg")]) == 0
    assert main(["phase-space", "--snapshot", str(run_dir / "snapshot_0001.f64"),
                 "--out", str(tmp_path / "ps.svg")]) == 0
    assert (tmp_path / "kg.svg").stat().st_size > 0
    assert (tmp_path / "ps.svg").stat().st_size > 0


def test_eps_study_and_stability_map_subcommands(eps_dir, grid_csv, tmp_path):
    assert main(["eps-study", "--csv", str(eps_dir / "eps_convergence.csv"),
                 "--out", str(tmp_path / "eps.svg")]) == 0
    assert main(["stability-map", "--csv", str(grid_csv),
                 "--out", str(tmp_path / "pmap.svg")]) == 0


@pytest.mark.parametrize("which", ["norms", "phase-space"])
def test_renders_are_byte_stable(which, run_dir, tmp_path):
    if which == "norms":
        args = ["norms", "--csv", str(run_dir / "diagnostics.csv")]
    else:
        args = ["phase-space", "--snapshot", str(run_dir / "snapshot_0000.f64")]
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
