import json

import pandas as pd
import pytest
from click.testing import CliRunner
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker

from app import crud, db
from app.cli import EXIT_CHECK_FAILED, EXIT_CONFIG_ERROR, main

SMALL_ARGS = ["frechet-cdf", "--m", "2", "--trials", "6", "--t-max", "400", "--seed", "5"]


@pytest.fixture
def runner():
    # stderr отдельно: в stdout только отчёт
    return CliRunner()  # click>=8.2: stdout/stderr always separate


def test_json_report_on_stdout(runner):
    result = runner.invoke(main, SMALL_ARGS)
    assert result.exit_code == 0, result.stderr
    report = json.loads(result.stdout)
    assert report["experiment"] == "frechet-cdf"
    assert report["config"]["m"] == 2
    assert report["config"]["grid"] == [0.5, 1.0, 2.0, 4.0]
    assert len(report["samples"]) == 6


def test_options_reach_the_config(runner):
    result = runner.invoke(main, SMALL_ARGS + ["--grid", "1,2", "--threshold", "uniform_ks=0.5", "--no-samples"])
    assert result.exit_code == 0, result.stderr
    report = json.loads(result.stdout)
    assert report["config"]["grid"] == [1.0, 2.0]
    assert report["config"]["thresholds"] == {"uniform_ks": 0.5}
    assert "samples" not in report


@pytest.mark.parametrize("args", [
    ["frechet-cdf", "--m", "10", "--t-max", "5"],
    ["frechet-cdf", "--grid", "2,1"],
    ["bumping-tree", "--m", "5", "--n", "2"],
])
def test_configuration_errors(runner, args):
    result = runner.invoke(main, args)
    assert result.exit_code == EXIT_CONFIG_ERROR
    assert "configuration error" in result.stderr


def test_bad_option_values(runner):
    assert runner.invoke(main, ["frechet-cdf", "--grid", "a,b"]).exit_code == 2
    assert runner.invoke(main, ["frechet-cdf", "--threshold", "uniform_ks"]).exit_code == 2
    assert runner.invoke(main, ["no-such-experiment"]).exit_code == 2


def test_check_mode(runner):
    failing = SMALL_ARGS + ["--threshold", "frechet_cdf_abs=-1"]
    assert runner.invoke(main, failing).exit_code == 0
    assert runner.invoke(main, failing + ["--check"]).exit_code == EXIT_CHECK_FAILED

    # у исследовательских экспериментов нет вердикта
    exploratory = ["bumping-tree", "--m", "2", "--n", "20", "--trials", "2", "--check"]
    assert runner.invoke(main, exploratory).exit_code == 0


def test_csv_output_to_file(runner, tmp_path):
    out = tmp_path / "frechet.csv"
    result = runner.invoke(main, SMALL_ARGS + ["--format", "csv", "--out", str(out)])
    assert result.exit_code == 0, result.stderr
    assert result.stdout == ""
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["trial", "m", "seed", "Y0", "T0", "censored"]
    assert frame["trial"].tolist() == list(range(6))
    sidecar = json.loads((tmp_path / "frechet.csv.summary.json").read_text(encoding="utf-8"))
    assert sidecar["experiment"] == "frechet-cdf"


def test_store_persists_the_run(runner, tmp_path, monkeypatch):
    engine = create_engine(f"sqlite:///{tmp_path / 'runs.db'}", connect_args={"check_same_thread": False})
    session_factory = sessionmaker(autocommit=False, autoflush=False, bind=engine)
    monkeypatch.setattr(db, "engine", engine)
    monkeypatch.setattr(db, "SessionLocal", session_factory)

    result = runner.invoke(main, SMALL_ARGS + ["--store"])
    assert result.exit_code == 0, result.stderr

    session = session_factory()
    try:
        runs = crud.get_runs(session)
        assert len(runs) == 1
        assert runs[0].experiment == "frechet-cdf"
        assert runs[0].master_seed == 5
    finally:
        session.close()
