from pathlib import Path
import xml.etree.ElementTree as ET

import pytest
import toml

from eigenbath.cli import EXIT_CONFIG, EXIT_OK, EXIT_RESOURCE, main
from eigenbath.config import load_config
from eigenbath.output.csv_table import read_csv


def run_cli(*args: str) -> int:
    return main([str(a) for a in args])


def test_lambda_dist(tmp_path):
    out = tmp_path / "gue"
    status = run_cli(
        "lambda-dist", "--family", "gue", "--g", 3, "--g-prime", 5,
        "--samples", 20, "--bins", 10, "--seed", 4, "--out", out,
    )
    assert status == EXIT_OK
    table = read_csv(out / "lambda-dist_gue.csv")
    assert table.header == ["bin_center", "count", "density", "gue_pdf"]
    assert len(table.rows) == 10
    assert sum(row[1] for row in table.rows) == 160
    assert table.metadata["seed"] == "4"
    assert table.metadata["g"] == "3"
    svg = ET.parse(out / "lambda-dist_gue.svg").getroot()
    assert svg.tag.endswith("svg")
    assert any(el.tag.endswith("polyline") for el in svg.iter())


def test_outputs_are_deterministic(tmp_path):
    args = ["lambda-dist", "--family", "structured_equidistant", "--g", 4, "--g-prime", 6,
            "--delta-eps", 2.0, "--samples", 3, "--seed", 9, "--jobs", 2]
    assert run_cli(*args, "--out", tmp_path / "a") == EXIT_OK
    assert run_cli(*args, "--out", tmp_path / "b") == EXIT_OK
    name = "lambda-dist_structured_equidistant.csv"
    assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_report_degenerate(tmp_path):
    status = run_cli(
        "report", "--family", "structured_degenerate", "--g", 91, "--g-prime", 364,
        "--out", tmp_path,
    )
    assert status == EXIT_OK
    record = toml.load(tmp_path / "report_structured_degenerate.toml")
    summary = record["summary"]
    assert summary["variance"] == pytest.approx(0.24, abs=1e-8)
    assert summary["predicted_inversion"] == pytest.approx(0.0, abs=1e-8)
    assert summary["canonical_inversion"] == pytest.approx(-0.6)
    assert summary["v_r"] == 0.0
    assert summary["peaks_minus_one"] == 273
    assert summary["peaks_zero"] == 182
    assert summary["classified_zero"] == 182
    assert record["run"]["family"] == "structured_degenerate"


def test_evolve(tmp_path):
    status = run_cli(
        "evolve", "--family", "gue", "--g", 3, "--g-prime", 5, "--t-max", 20.0,
        "--out", tmp_path,
    )
    assert status == EXIT_OK
    table = read_csv(tmp_path / "evolve_gue.csv")
    assert table.header == ["t", "bloch_z", "running_average"]
    assert len(table.rows) == 2000
    assert table.rows[0] == [0.0, pytest.approx(1.0), pytest.approx(1.0)]
    assert table.rows[-1][0] == 20.0
    ET.parse(tmp_path / "evolve_gue.svg")


def test_sweep(tmp_path):
    path = tmp_path / "sweep.toml"
    path.write_text(
        '[model]\nfamily = "spin_inhomogeneous"\nn_env = 5\nband_k = 1\n'
        "[spectrum]\nzeeman_spread = 0.4\n"
        "[run]\ntask = \"sweep\"\nsamples = 2\nscales = [2.0, 0.0, 1.0]\n",
        encoding="utf-8",
    )
    assert run_cli("sweep", "--config", path, "--out", tmp_path) == EXIT_OK
    table = read_csv(tmp_path / "sweep_spin_inhomogeneous.csv")
    assert table.header == ["s", "v_r", "variance"]
    assert [row[0] for row in table.rows] == [0.0, 1.0, 2.0]
    assert table.rows[0][1] == pytest.approx(0.0, abs=1e-12)
    assert table.metadata["samples"] == "2"


def test_gue_pdf(tmp_path):
    assert run_cli("gue-pdf", "--g", 91, "--g-prime", 364, "--out", tmp_path) == EXIT_OK
    table = read_csv(tmp_path / "gue_pdf.csv")
    assert table.header == ["lambda", "pdf", "cdf"]
    assert len(table.rows) == 401
    assert table.rows[0][2] == pytest.approx(0.0)
    assert table.rows[-1][2] == pytest.approx(1.0)


def test_config_error_writes_nothing(tmp_path, capsys):
    out = tmp_path / "never"
    status = run_cli("lambda-dist", "--family", "gue", "--g", 91, "--out", out)
    assert status == EXIT_CONFIG
    assert not out.exists()
    assert "g_prime" in capsys.readouterr().err


def test_resource_guard_exit(tmp_path, capsys):
    status = run_cli(
        "report", "--family", "spin_star", "--n-env", 17, "--band-k", 2, "--out", tmp_path,
    )
    assert status == EXIT_RESOURCE
    assert "17" in capsys.readouterr().err
    assert list(tmp_path.iterdir()) == []


def test_figure_configs_parse():
    configs = sorted(Path(__file__).parent.parent.joinpath("figures").glob("*.toml"))
    assert configs
    figures = {path.name[3:5] for path in configs}
    assert figures == {"%02d" % n for n in range(2, 14)}
    for path in configs:
        load_config(path)


def test_evolve_pure_initial_state(tmp_path):
    status = run_cli(
        "evolve", "--family", "gue", "--g", 3, "--g-prime", 5, "--t-max", 20.0,
        "--initial", "pure", "--seed", 6, "--out", tmp_path,
    )
    assert status == EXIT_OK
    table = read_csv(tmp_path / "evolve_gue.csv")
    assert table.metadata["initial"] == "pure"
    assert table.rows[0][1] == pytest.approx(1.0)


def test_spin_metadata_names_band_degeneracies(tmp_path):
    status = run_cli(
        "lambda-dist", "--family", "spin_star", "--n-env", 5, "--band-k", 1,
        "--scale", 0.3, "--detuned", "--out", tmp_path,
    )
    assert status == EXIT_OK
    table = read_csv(tmp_path / "lambda-dist_spin_star.csv")
    assert (table.metadata["g"], table.metadata["g_prime"]) == ("5", "10")
    assert table.metadata["resonant"] == "False"
    assert sum(row[1] for row in table.rows) == 15


def test_non_path_out_is_config_error(tmp_path, capsys):
    path = tmp_path / "run.toml"
    path.write_text('[model]\nfamily = "gue"\ng = 3\ng_prime = 5\n[run]\nout = 5\n', encoding="utf-8")
    assert run_cli("report", "--config", path) == EXIT_CONFIG
    assert "out" in capsys.readouterr().err
