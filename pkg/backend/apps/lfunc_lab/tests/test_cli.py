import json

import pytest

from app.arith_core import brute_force_psi
from app.cli import main_cli
from app.commands_core import CommandStatus, get_general_help_text, get_specific_help_text, psi_action
from app.config import RunConfig
from app.display_utils import get_verbosity


@pytest.fixture(scope="module")
def cache(tmp_path_factory):
    return str(tmp_path_factory.mktemp("cache") / "zeros.jsonl")


def run(argv):
    """Runs one command; returns the exit code (0 when the handler returned normally)."""
    try:
        main_cli(argv)
    except SystemExit as e:
        return e.code or 0
    return 0


def test_no_arguments_prints_general_help(capsys):
    assert run([]) == 0
    out = capsys.readouterr().out
    assert "lfunc-lab - Available Commands" in out
    assert "sweep-s" in out


def test_help_for_one_command(capsys):
    assert run(["help", "psi"]) == 0
    out = capsys.readouterr().out
    assert "psi --x X --modulus Q" in out


def test_help_for_unknown_command(capsys):
    run(["help", "nope"])
    assert "Unknown command" in capsys.readouterr().err


def test_help_texts():
    assert "central-sweep" in get_general_help_text()
    assert get_specific_help_text("ITERATE").startswith("Usage: iterate")


def test_psi_prints_the_value(capsys):
    assert run(["psi", "--x", "100", "--modulus", "4", "--residue", "1"]) == 0
    out = capsys.readouterr().out
    assert "[RESULT]" in out
    assert repr(brute_force_psi(100, 4, 1))[:10] in out


def test_psi_principal_sum():
    status, value, _ = psi_action(RunConfig(), 1000, 6, None)
    assert status == CommandStatus.SUCCESS
    assert value.value == pytest.approx(brute_force_psi(1000, 6))


def test_domain_error_exit_code(capsys):
    assert run(["psi", "--x", "100", "--modulus", "4", "--residue", "2"]) == 2
    assert "[ERROR]" in capsys.readouterr().err


def test_invalid_global_option_exit_code(capsys):
    assert run(["--precision", "10", "iterate", "--eta", "0.6"]) == 2
    assert "precision_digits" in capsys.readouterr().err


def test_iterate_writes_csv_to_stdout(capsys):
    assert run(["iterate", "--eta", "0.6", "--nmax", "5"]) == 0
    out = capsys.readouterr().out
    assert "n,value,closed_form,n_stop" in out
    assert "# command=iterate --eta 0.6 --nmax 5" in out


def test_iterate_rejects_eta_outside_range():
    assert run(["iterate", "--eta", "1.5"]) == 2


def test_quiet_hides_success_messages(capsys):
    assert run(["--quiet", "iterate", "--eta", "0.7", "--nmax", "3"]) == 0
    out = capsys.readouterr().out
    assert "[SUCCESS]" not in out
    assert "n,value" in out
    assert get_verbosity() == "quiet"


def test_characters_to_file(tmp_path):
    target = tmp_path / "chars.csv"
    assert run(["characters", "--modulus", "5", "--out", str(target)]) == 0
    lines = [line for line in target.read_text().splitlines() if not line.startswith("#")]
    assert lines[0] == "label,order,parity,conductor,primitive,real,principal"
    assert len(lines) == 5


def test_constants_json(tmp_path, capsys):
    target = tmp_path / "constants.json"
    assert run(["--prime-cutoff", "100000", "constants", "--digits", "5", "--out", str(target)]) == 0
    document = json.loads(target.read_text())
    assert [c["name"] for c in document["constants"]] == ["C0", "C1", "C2", "C3"]
    assert document["header"]["command"] == "constants --digits 5"
    assert "error_bound" in capsys.readouterr().out


def test_sweep_table(tmp_path):
    target = tmp_path / "sweep.csv"
    code = run(["--seed", "3", "sweep-s", "--x", "3000", "--qmin", "10", "--qmax", "40",
                "--points", "3", "--random", "2", "--out", str(target)])
    assert code == 0
    rows = [line for line in target.read_text().splitlines() if not line.startswith("#")]
    assert rows[0] == "Q,x,S_direct,I,II,III,main_term,residual"
    assert len(rows) == 1 + 3 + 2


def test_trend_table(tmp_path):
    target = tmp_path / "trend.csv"
    code = run(["trend", "--x", "5000", "2000", "--out", str(target)])
    # 4 means the ratio left the [0.5, 1.5] band at the largest x; the table is written either way
    assert code in (0, 4)
    rows = [line for line in target.read_text().splitlines() if not line.startswith("#")]
    assert rows[0] == "x,Q,S_direct,main_term,ratio,III,III_over_xlog2,C1"
    assert [float(r.split(",")[0]) for r in rows[1:]] == [2000.0, 5000.0]


def test_trend_rejects_bad_exponent():
    assert run(["trend", "--x", "1000", "--exponent", "1.2"]) == 2


def test_sweep_rejects_bad_range():
    assert run(["sweep-s", "--x", "100", "--qmin", "50", "--qmax", "200"]) == 2


def test_bfi(capsys):
    assert run(["bfi", "--x", "1000", "--Q", "8"]) == 0
    assert "zero route = n/a" in capsys.readouterr().out


def test_zeros_with_cache(cache, capsys):
    assert run(["--cache", cache, "zeros", "--modulus", "4", "--height", "8"]) == 0
    out = capsys.readouterr().out
    assert "4:1,1,6.0209489" in out


def test_zeros_rejects_foreign_label(cache):
    assert run(["--cache", cache, "zeros", "--modulus", "5", "--label", "4:1", "--height", "8"]) == 2


def test_explicit_check(cache, tmp_path):
    target = tmp_path / "explicit.csv"
    code = run(["--cache", cache, "explicit-check", "--modulus", "4", "--x1", "100", "--x2", "400",
                "--height", "8", "11", "--out", str(target)])
    assert code == 0
    rows = [line for line in target.read_text().splitlines() if not line.startswith("#")]
    assert rows[0] == "label,T,residual,bound"
    assert len(rows) == 3


def test_distribution_writes_series_and_moments(cache, tmp_path):
    base = tmp_path / "dist"
    code = run(["--cache", cache, "distribution", "--modulus", "4", "--ymin", "5", "--ymax", "9",
                "--samples", "100", "--height", "8", "--out", str(base)])
    assert code == 0
    series = [line for line in (tmp_path / "dist.csv").read_text().splitlines() if not line.startswith("#")]
    assert series[0] == "y,value" and len(series) == 101
    report = json.loads((tmp_path / "dist.json").read_text())
    assert report["moments"]["which"] == "T"
    assert [c["psi_threshold"] for c in report["chebyshev"]] == [2.0, 5.0, 10.0]


def test_density(cache, capsys):
    assert run(["--cache", cache, "density", "--modulus", "4", "--kappa", "1", "--height", "8"]) == 0
    assert "prediction 1/kappa = 1.0" in capsys.readouterr().out


def test_central_sweep(tmp_path):
    target = tmp_path / "central.json"
    assert run(["central-sweep", "--qmax", "6", "--out", str(target)]) == 0
    document = json.loads(target.read_text())
    assert document["characters"] == 6
    assert document["z_count_average"] == 0.0
    assert document["below_threshold"] == []


@pytest.mark.parametrize("argv", [
    ["psi", "--x", "5000", "--modulus", "4", "--residue", "1"],
    ["psi", "--x", "5000", "--modulus", "4"],
    ["sweep-s", "--x", "5000", "--qmin", "10", "--qmax", "40", "--points", "2"],
    ["trend", "--x", "500", "5000"],
    ["bfi", "--x", "5000", "--Q", "10"],
    ["explicit-check", "--modulus", "4", "--x1", "100", "--x2", "5000", "--height", "8"],
])
def test_sieve_cap_is_a_resource_error(argv, cache, capsys):
    assert run(["--cache", cache, "--sieve-cap", "1000"] + argv) == 3
    assert "exceeds the configured cap" in capsys.readouterr().err


def test_relative_out_lands_in_out_dir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(["--out-dir", "results", "characters", "--modulus", "5", "--out", "chars.csv"]) == 0
    assert (tmp_path / "results" / "chars.csv").exists()
    assert not (tmp_path / "chars.csv").exists()


def test_relative_distribution_base_lands_in_out_dir(tmp_path, cache):
    code = run(["--cache", cache, "--out-dir", str(tmp_path), "distribution", "--modulus", "4", "--ymin", "5",
                "--ymax", "7", "--samples", "20", "--height", "8", "--out", "dist"])
    assert code == 0
    assert (tmp_path / "dist.csv").exists() and (tmp_path / "dist.json").exists()
