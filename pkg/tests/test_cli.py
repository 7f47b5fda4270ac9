import pandas as pd
import pytest
from typer.testing import CliRunner

from relaylab.cli import app
from relaylab.constants import Tags
from relaylab.exceptions import NonConvergenceError
from relaylab.harness import CheckResult, CompareReport, ResultRow, read_csv

runner = CliRunner()

SMALL = "profile.n_relays = 2\nbudget.rho_db = 0, 10\nanalysis.methods = exact, direct\n"


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(SMALL, encoding="utf-8")
    return path


def test_analyze_writes_csv(config_file, tmp_path):
    out = tmp_path / "analysis.csv"
    result = runner.invoke(app, ["analyze", "-c", str(config_file), "-o", str(out)])
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert len(rows) == 4
    assert {r.method for r in rows} == {"exact", "direct"}


def test_analyze_honours_chi_tail(config_file, tmp_path):
    out = tmp_path / "collapsed.csv"
    result = runner.invoke(app, ["analyze", "-c", str(config_file), "-o", str(out), "--chi-tail", "collapsed"])
    assert result.exit_code == 0, result.output
    assert {r.chi_tail for r in read_csv(out) if r.method == "exact"} == {"collapsed"}


def test_simulate_writes_only_simulation_rows(config_file, tmp_path):
    out = tmp_path / "sim.csv"
    result = runner.invoke(app, ["simulate", "-c", str(config_file), "-o", str(out), "--trials", "2000", "--seed", "4"])
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert len(rows) == 2
    assert all(r.method == Tags.SIM and r.ci3 is not None for r in rows)


def test_sweep_prints_comparison(config_file, tmp_path):
    out = tmp_path / "sweep.csv"
    result = runner.invoke(app, ["sweep", "-c", str(config_file), "-o", str(out), "--trials", "2000"])
    assert result.exit_code == 0, result.output
    assert "max_abs_z" in result.output
    assert "Upper-bound violations: 0" in result.output


def test_bad_config_exits_2(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("budget.rho_db = 0\nprofile.colour = red\n", encoding="utf-8")
    result = runner.invoke(app, ["analyze", "-c", str(path), "-o", str(tmp_path / "x.csv")])
    assert result.exit_code == 2
    assert not (tmp_path / "x.csv").exists()


def test_too_few_trials_exits_2(config_file, tmp_path):
    result = runner.invoke(app, ["simulate", "-c", str(config_file), "-o", str(tmp_path / "x.csv"), "--trials", "10"])
    assert result.exit_code == 2


def test_nonconvergence_exits_3(config_file, tmp_path, mocker):
    mocker.patch(
        "relaylab.cli.run_sweep",
        side_effect=NonConvergenceError("quad gave up", best_estimate=0.2, error_estimate=1e-2),
    )
    result = runner.invoke(app, ["analyze", "-c", str(config_file), "-o", str(tmp_path / "x.csv")])
    assert result.exit_code == 3


def test_unconverged_rows_are_written_then_exit_3(config_file, tmp_path, mocker):
    rows = [
        ResultRow(rho_db=0.0, n_relays=2, l=5, method="exact", chi_tail="verbatim", value=0.5),
        ResultRow(rho_db=10.0, n_relays=2, l=5, method="exact", chi_tail="verbatim", value=0.01, converged=False),
    ]
    mocker.patch("relaylab.cli.run_sweep", return_value=rows)
    out = tmp_path / "flagged.csv"
    result = runner.invoke(app, ["analyze", "-c", str(config_file), "-o", str(out)])
    assert result.exit_code == 3
    assert len(read_csv(out)) == 2


def test_sweep_check_exits_4_on_violation(config_file, tmp_path, mocker):
    mocker.patch(
        "relaylab.cli.run_sweep",
        return_value=[ResultRow(rho_db=0.0, n_relays=2, l=5, method=Tags.SIM, value=0.5, ci3=0.01)],
    )
    report = CompareReport(points=pd.DataFrame(), summary=pd.DataFrame({"method": ["upper_bound"]}), bound_violations=2)
    mocker.patch("relaylab.cli.compare_report", return_value=report)
    args = ["sweep", "-c", str(config_file), "-o", str(tmp_path / "x.csv"), "--trials", "2000"]
    assert runner.invoke(app, args).exit_code == 0
    assert runner.invoke(app, [*args, "--check"]).exit_code == 4


def test_fig_g2_writes_summary(tmp_path):
    out = tmp_path / "g2.csv"
    result = runner.invoke(app, ["fig", "g2-outage-sweep", "-n", "1", "--no-sim", "-o", str(out)])
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert {r.n_relays for r in rows} == {1}
    summary = pd.read_csv(tmp_path / "g2_summary.csv")
    assert list(summary["n_relays"]) == [0, 1]
    assert Tags.REQUIRED_SNR in summary.columns


def test_fig_takes_experiment_file(tmp_path):
    path = tmp_path / "g3.cfg"
    out = tmp_path / "from_config.csv"
    path.write_text(f"profile.n_relays = 3\nbudget.rho_db = 10, 20\noutput.path = {out}\n", encoding="utf-8")
    result = runner.invoke(app, ["fig", "g3-throughput", "-c", str(path), "--no-sim"])
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert {r.n_relays for r in rows} == {3}
    assert {r.rho_db for r in rows} == {10.0, 20.0}

    flagged = tmp_path / "flag.csv"
    result = runner.invoke(app, ["fig", "g3-throughput", "-c", str(path), "-n", "2", "--no-sim", "-o", str(flagged)])
    assert result.exit_code == 0, result.output
    assert {r.n_relays for r in read_csv(flagged)} == {2}


def test_fig_rejects_bad_experiment_file(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("profile.n_relays = 2\n", encoding="utf-8")
    assert runner.invoke(app, ["fig", "g3-throughput", "-c", str(path), "--no-sim"]).exit_code == 2


def test_fig_rejects_unknown_name():
    assert runner.invoke(app, ["fig", "f9"]).exit_code != 0


def test_selfcheck_reports_failures(mocker):
    mocker.patch(
        "relaylab.cli.run_selfcheck",
        return_value=[CheckResult("pdf-normalised", True, "integral 1"), CheckResult("bound-ordering", False, "oops")],
    )
    result = runner.invoke(app, ["selfcheck"])
    assert result.exit_code == 1
    assert "FAIL bound-ordering: oops" in result.output


def test_selfcheck_passes_when_all_checks_pass(mocker):
    mocker.patch("relaylab.cli.run_selfcheck", return_value=[CheckResult("pdf-normalised", True, "integral 1")])
    result = runner.invoke(app, ["selfcheck"])
    assert result.exit_code == 0
    assert "ok   pdf-normalised" in result.output


@pytest.mark.slow
def test_selfcheck_suite_passes():
    result = runner.invoke(app, ["selfcheck"])
    assert result.exit_code == 0, result.output
    assert "FAIL" not in result.output
