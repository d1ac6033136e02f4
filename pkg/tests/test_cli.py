"""End-to-end command line coverage on tiny inputs."""

import json
import math

import numpy as np
import pytest

from spatent import CategoricalGrid, read_grid, write_grid
from spatent.cli import main


def _write(tmp_path, name, rows, cols, cats, values):
    path = tmp_path / name
    write_grid(CategoricalGrid(rows, cols, cats, np.asarray(values, dtype=np.int64)), path)
    return path


def _chessboard_path(tmp_path, n=10):
    vals = ((np.add.outer(np.arange(n), np.arange(n)) % 2) + 1).ravel()
    return _write(tmp_path, "chess.grid", n, n, 2, vals)


# --------------------------------------------------------------------------
# generate

def test_generate_writes_grids_and_manifest(tmp_path):
    out = tmp_path / "g"
    rc = main(
        [
            "generate",
            "--scenario",
            "multicluster",
            "--rows",
            "20",
            "--cols",
            "20",
            "--categories",
            "2",
            "--replicates",
            "3",
            "--seed",
            "12",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["scenario"] == "multicluster"
    assert manifest["pmf_source"] == "dirichlet"
    assert len(manifest["grids"]) == 3
    for entry in manifest["grids"]:
        grid = read_grid(out / entry["file"])
        assert (grid.rows, grid.cols, grid.num_categories) == (20, 20, 2)
    # same master seed reproduces the same grids
    out2 = tmp_path / "g2"
    main(
        "generate --scenario multicluster --rows 20 --cols 20 --categories 2"
        " --replicates 3 --seed 12 --out".split()
        + [str(out2)]
    )
    for entry in manifest["grids"]:
        a = read_grid(out / entry["file"])
        b = read_grid(out2 / entry["file"])
        np.testing.assert_array_equal(a.values, b.values)


def test_generate_uniform_pmf_flag(tmp_path):
    out = tmp_path / "u"
    rc = main(
        "generate --scenario repulsive --rows 10 --cols 10 --categories 2"
        " --replicates 1 --uniform-pmf --out".split()
        + [str(out)]
    )
    assert rc == 0
    grid = read_grid(out / "repulsive_x2_r0000.grid")
    parity = np.add.outer(np.arange(10), np.arange(10)) % 2
    np.testing.assert_array_equal(grid.matrix, np.where(parity == 0, 1, 2))


# --------------------------------------------------------------------------
# measure

def test_measure_outputs_csv(tmp_path, capsys):
    path = _chessboard_path(tmp_path)
    rc = main(["measure", str(path), "--measures", "shannon_x,oneill,rc,decomposition"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "measure,band,value"
    table = {}
    for line in lines[1:]:
        measure, band, value = line.split(",")
        table[(measure, band)] = float(value)
    assert table[("shannon_x", "")] == pytest.approx(math.log(2), abs=1e-10)
    assert table[("oneill", "")] == pytest.approx(math.log(2), abs=1e-10)
    assert table[("rc", "")] == pytest.approx(0.5, abs=1e-10)
    assert table[("residual_partial", "w1")] == 0.0
    assert table[("mutual_information", "")] > 0.0


def test_measure_area_indices_and_absent_category(tmp_path, capsys):
    path = _write(tmp_path, "ones.grid", 10, 10, 2, np.ones(100))
    rc = main(
        [
            "measure",
            str(path),
            "--measures",
            "batty,karlstrom",
            "--areas",
            "4",
            "--karlstrom-distances",
            "0,5",
        ]
    )
    assert rc == 0
    lines = capsys.readouterr().out.strip().split("\n")
    table = {}
    for line in lines[1:]:
        measure, band, value = line.split(",")
        table[(measure, band)] = value
    # constant intensity: the area index tops out at log of the window size
    assert float(table[("batty", "")]) == pytest.approx(math.log(100), abs=1e-10)
    assert float(table[("karlstrom", "d0")]) == pytest.approx(math.log(4), abs=1e-10)
    assert set(b for m, b in table if m == "karlstrom") == {"d0", "d5"}

    rc = main(
        ["measure", str(path), "--measures", "batty", "--areas", "4", "--target-category", "2"]
    )
    assert rc == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[1] == "batty,,nan"


def test_measure_to_file(tmp_path):
    path = _chessboard_path(tmp_path)
    out = tmp_path / "m.csv"
    rc = main(["measure", str(path), "--measures", "oneill", "--out", str(out)])
    assert rc == 0
    assert out.read_text().startswith("measure,band,value\noneill,,")


# --------------------------------------------------------------------------
# decompose

def test_decompose_json(tmp_path, capsys):
    path = _chessboard_path(tmp_path)
    rc = main(["decompose", str(path)])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["bands"][0]["residual_partial"] == 0.0
    assert doc["marginal"] == pytest.approx(
        doc["mutual_information"] + doc["residual_global"], abs=1e-12
    )


def test_decompose_csv_with_custom_bands(tmp_path, capsys):
    path = _chessboard_path(tmp_path)
    rc = main(["decompose", str(path), "--format", "csv", "--bands", "0,1,14.15"])
    assert rc == 0
    header, row = capsys.readouterr().out.strip().split("\n")
    assert header.split(",")[4:7] == ["w1_p_w", "w1_residual_partial", "w1_info_partial"]
    assert len(header.split(",")) == 4 + 2 * 3


def test_decompose_ordered_flag(tmp_path, capsys):
    path = _chessboard_path(tmp_path)
    assert main(["decompose", str(path), "--ordered"]) == 0
    ordered = json.loads(capsys.readouterr().out)
    assert main(["decompose", str(path)]) == 0
    unordered = json.loads(capsys.readouterr().out)
    # contiguous chessboard pairs: one unordered type (H=0) but two ordered
    # orientations in equal shares (H=log 2)
    assert unordered["bands"][0]["residual_partial"] == 0.0
    assert ordered["bands"][0]["residual_partial"] == pytest.approx(
        math.log(2), abs=1e-12
    )


# --------------------------------------------------------------------------
# verify

def test_verify_passes_on_valid_grid(tmp_path, capsys):
    path = _write(tmp_path, "small.grid", 8, 8, 3, (np.arange(64) % 3) + 1)
    rc = main(["verify", str(path)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "all identities hold" in out
    assert "bruteforce-oracle" in out  # 64 pixels: the slow path runs too
    assert "FAIL" not in out


def test_verify_flags_corrupt_file(tmp_path, capsys):
    bad = tmp_path / "bad.grid"
    bad.write_text("2 2 2\n1 0\n2 1\n")  # category 0 is invalid
    rc = main(["verify", str(bad)])
    out = capsys.readouterr().out
    assert rc == 1
    assert "FAIL" in out


def test_verify_multiple_files(tmp_path, capsys):
    good = _chessboard_path(tmp_path)
    bad = tmp_path / "bad.grid"
    bad.write_text("1 2 2\n1 3\n")
    rc = main(["verify", str(good), str(bad)])
    assert rc == 1
    out = capsys.readouterr().out
    assert out.count("FAIL") == 1


# --------------------------------------------------------------------------
# experiment

EXP_ARGS = (
    "experiment --scenarios compact:2,random:5 --rows 10 --cols 10"
    " --replicates 2 --seed 3 --areas 4 --workers {workers} --out {out}"
)


def _run_experiment(tmp_path, tag, workers):
    out = tmp_path / tag
    rc = main(EXP_ARGS.format(workers=workers, out=out).split())
    assert rc == 0
    return out


def test_experiment_long_csv_schema(tmp_path):
    out = _run_experiment(tmp_path, "e1", 1)
    lines = (out / "results_long.csv").read_text().strip().split("\n")
    assert lines[0] == "scenario,replicate,uniform_flag,measure,band,value"
    rows = [line.split(",") for line in lines[1:]]
    scenarios = {r[0] for r in rows}
    assert scenarios == {"compact_x2", "random_x5"}
    # uniform special case: one extra flagged replicate per scenario
    uniform = [r for r in rows if r[2] == "1"]
    assert {r[0] for r in uniform} == scenarios
    assert all(r[1] == "2" for r in uniform)
    # area indices only on the two-category scenario
    batty_scenarios = {r[0] for r in rows if r[3] == "batty"}
    assert batty_scenarios == {"compact_x2"}
    karlstrom_bands = {r[4] for r in rows if r[3] == "karlstrom"}
    assert karlstrom_bands == {"d0", "d2", "d5", "d10"}
    # every value parses as a float
    for r in rows:
        float(r[5])
    # decomposition rows carry band labels
    assert {r[4] for r in rows if r[3] == "residual_partial"} == {
        "w1",
        "w2",
        "w3",
        "w4",
        "w5",
    }


def test_experiment_summary_quantiles(tmp_path):
    out = _run_experiment(tmp_path, "e2", 1)
    lines = (out / "summary.csv").read_text().strip().split("\n")
    assert lines[0] == "scenario,measure,band,min,q1,median,q3,max,uniform"
    for line in lines[1:]:
        cells = line.split(",")
        q = [float(v) for v in cells[3:8]]
        assert q[0] <= q[1] <= q[2] <= q[3] <= q[4]
    # the uniform column for shannon_x on the 2-category scenario is log 2
    row = next(l for l in lines[1:] if l.startswith("compact_x2,shannon_x,"))
    assert float(row.split(",")[-1]) == pytest.approx(math.log(2), abs=1e-10)


def test_experiment_deterministic_across_workers(tmp_path):
    a = _run_experiment(tmp_path, "wa", 1)
    b = _run_experiment(tmp_path, "wb", 3)
    assert (a / "results_long.csv").read_bytes() == (b / "results_long.csv").read_bytes()
    assert (a / "summary.csv").read_bytes() == (b / "summary.csv").read_bytes()


def test_experiment_rejects_impossible_uniform_case(tmp_path):
    rc = main(
        "experiment --scenarios random:3 --rows 10 --cols 10 --replicates 1"
        " --seed 1 --measures shannon_x --out".split()
        + [str(tmp_path / "bad")]
    )
    assert rc == 2
    rc = main(
        "experiment --scenarios random:3 --rows 10 --cols 10 --replicates 1"
        " --seed 1 --measures shannon_x --skip-uniform --out".split()
        + [str(tmp_path / "ok")]
    )
    assert rc == 0


def test_experiment_plan_json_written(tmp_path):
    out = _run_experiment(tmp_path, "e3", 1)
    plan = json.loads((out / "plan.json").read_text())
    assert plan["replicates"] == 2
    assert plan["master_seed"] == 3
    assert {(s["kind"], s["categories"]) for s in plan["scenarios"]} == {
        ("compact", 2),
        ("random", 5),
    }
    assert (out / "partition.txt").exists()


def test_bad_cli_arguments_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["experiment", "--scenarios", "blob:2", "--out", "x"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["measure", "g.grid", "--measures", "nonsense"])
    assert exc.value.code == 2
