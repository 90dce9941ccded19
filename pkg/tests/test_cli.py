"""Command-line interface: subcommands, flags and exit codes."""

import json

import numpy as np
import pytest

from subspace_lens import __version__
from subspace_lens.cli import main
from subspace_lens.ingest import load_csv
from subspace_lens.scene import read_scene


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_synth_project_scene_flow(tmp_path, capsys):
    csv_path = tmp_path / "planes.csv"
    assert main(["synth", "--kind", "two-planes", "--n-side", "6",
                 "--out", str(csv_path)]) == 0
    data = load_csv(csv_path, label_column="label")
    assert data.n == 72
    assert data.class_names == ["plane_a", "plane_b"]

    scene_path = tmp_path / "scene.json"
    code = main([
        "project", "--input", str(csv_path), "--label-col", "label",
        "--out", str(scene_path), "--method", "mds", "--k", "8",
        "--subspace-dims", "2", "--seed", "0",
    ])
    out = capsys.readouterr().out
    assert code == 0
    assert "converged" in out
    doc = read_scene(scene_path)
    assert doc.n == 72

    assert main(["scene", "--input", str(scene_path)]) == 0
    summary = capsys.readouterr().out
    assert "points: 72" in summary
    assert "alignment: ok" in summary


def test_synth_planar_grid_csv(tmp_path):
    csv_path = tmp_path / "grid.csv"
    assert main(["synth", "--kind", "planar-grid", "--nx", "6", "--ny", "5",
                 "--out", str(csv_path)]) == 0
    data = load_csv(csv_path, label_column="label")
    assert data.n == 30
    assert data.dim == 3


def test_project_pca_linear(tmp_path, capsys):
    csv_path = tmp_path / "grid.csv"
    main(["synth", "--kind", "planar-grid", "--nx", "6", "--ny", "6",
          "--out", str(csv_path)])
    scene_path = tmp_path / "scene.json"
    code = main([
        "project", "--input", str(csv_path), "--label-col", "label",
        "--out", str(scene_path), "--method", "pca", "--subspace-dims", "2",
    ])
    capsys.readouterr()
    assert code == 0
    assert read_scene(scene_path).provenance["xform"] == "linear"


def test_project_missing_input_exits_1(tmp_path, capsys):
    code = main([
        "project", "--input", str(tmp_path / "absent.csv"),
        "--out", str(tmp_path / "out.json"),
    ])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_project_bad_combination_exits_1(tmp_path, capsys):
    csv_path = tmp_path / "grid.csv"
    main(["synth", "--kind", "planar-grid", "--nx", "5", "--ny", "5",
          "--out", str(csv_path)])
    code = main([
        "project", "--input", str(csv_path), "--label-col", "label",
        "--out", str(tmp_path / "o.json"),
        "--method", "pca", "--xform", "implicit",
    ])
    assert code == 1
    assert "requires method=mds" in capsys.readouterr().err


def test_scene_on_malformed_file_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert main(["scene", "--input", str(bad)]) == 1
    assert "parse error" in capsys.readouterr().err


def test_verify_planar_grid_passes(tmp_path, capsys):
    scene_path = tmp_path / "grid_scene.json"
    code = main([
        "verify", "--nx", "9", "--ny", "9", "--seed", "0",
        "--out", str(scene_path),
    ])
    out = capsys.readouterr().out
    assert code == 0
    assert "PASS" in out
    assert "FAIL" not in out
    assert "mean angle" in out
    doc = read_scene(scene_path)
    assert doc.n == 81


def test_verify_unconverged_exits_2(capsys):
    code = main(["verify", "--nx", "7", "--ny", "7", "--max-iters", "1",
                 "--grad-tol", "1e-300"])
    err = capsys.readouterr().err
    assert code == 2
    assert "error:" in err


def test_mutually_exclusive_selectors(tmp_path, capsys):
    csv_path = tmp_path / "grid.csv"
    main(["synth", "--kind", "planar-grid", "--nx", "5", "--ny", "5",
          "--out", str(csv_path)])
    code = main([
        "project", "--input", str(csv_path), "--out", str(tmp_path / "o.json"),
        "--subspace-dims", "2", "--variance-threshold", "0.9",
    ])
    assert code == 1


def test_synth_writes_loadable_header(tmp_path):
    csv_path = tmp_path / "grid.csv"
    main(["synth", "--kind", "planar-grid", "--nx", "5", "--ny", "5",
          "--out", str(csv_path)])
    header = csv_path.read_text().splitlines()[0]
    assert header == "x0,x1,x2,label"
    # float columns survive a write/read cycle exactly
    from subspace_lens.synth import planar_grid

    data = load_csv(csv_path, label_column="label")
    np.testing.assert_array_equal(data.values, planar_grid(nx=5, ny=5).values)


def test_no_metrics_flag(tmp_path):
    csv_path = tmp_path / "grid.csv"
    main(["synth", "--kind", "planar-grid", "--nx", "5", "--ny", "5",
          "--out", str(csv_path)])
    scene_path = tmp_path / "scene.json"
    assert main([
        "project", "--input", str(csv_path), "--label-col", "label",
        "--out", str(scene_path), "--no-metrics", "--subspace-dims", "2",
    ]) == 0
    assert json.loads(scene_path.read_text())["metrics"] is None
