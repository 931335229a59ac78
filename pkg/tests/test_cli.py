import csv
import io
import math
import subprocess
import sys

import numpy as np
import pytest

from cavity_dephasing import closedform as cf
from cavity_dephasing.cli import (
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY,
    RunConfig,
    UsageError,
    cmd_figure,
    main,
)
from cavity_dephasing.model import ModelParams


def read_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.reader(io.StringIO("\n".join(lines)))
    header = next(reader)
    data = np.array([[float(x) for x in row] for row in reader])
    return header, data


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_figure1_columns_and_unit_probability(capsys):
    code, out, _ = run(["figure", "1"], capsys)
    assert code == EXIT_OK
    header, data = read_csv(out)
    assert header == ["t", "Pg_gamma1", "Pg_gamma0", "Pg_gamma0.01", "Pg_gamma0.05"]
    assert data.shape == (1001, 5)
    assert data[0, 0] == 0.0 and data[-1, 0] == 10.0
    i = int(np.argmin(np.abs(data[:, 0] - math.pi / (2 * math.sqrt(2)))))
    assert data[i, 2] == pytest.approx(1.0, abs=1e-4)


def test_figure1_spot_values_match_closed_form(capsys):
    _, out, _ = run(["figure", "1"], capsys)
    _, data = read_csv(out)
    for i in (0, 137, 500, 1000):
        t = data[i, 0]
        for j, gamma in enumerate([1.0, 0.0, 0.01, 0.05], start=1):
            assert data[i, j] == pytest.approx(cf.ground_probability(ModelParams(gamma=gamma), t), abs=1e-10)


def test_figure4_turnover(capsys):
    _, out, _ = run(["figure", "4"], capsys)
    header, data = read_csv(out)
    assert header == ["delta", "C_AB"]
    i = int(np.argmax(data[:, 1]))
    assert data[i, 0] == pytest.approx(2 * math.sqrt(2), abs=0.01)
    assert data[i, 1] == pytest.approx(0.5, abs=1e-5)


def test_figure6_matches_formula(capsys):
    _, out, _ = run(["figure", "6"], capsys)
    header, data = read_csv(out)
    assert header == ["gamma", "CB_delta0", "CB_delta1", "CB_delta2"]
    expected = 0.5 * (1 - np.cos(4 * np.sqrt(2)) * np.exp(-8 * data[:, 0]))
    np.testing.assert_allclose(data[:, 1], expected, atol=1e-10)


@pytest.mark.parametrize("fid, header", [
    (2, ["t", "gamma", "C_AB"]),
    (3, ["delta", "gamma", "C_AB"]),
    (5, ["t", "gamma", "C_B"]),
])
def test_surface_figures_long_format(fid, header, capsys):
    code, out, _ = run(["figure", str(fid), "--points", "5"], capsys)
    assert code == EXIT_OK
    got, data = read_csv(out)
    assert got == header
    assert data.shape == (25, 3)
    # row-major: first column slow, second fast
    assert np.all(data[:5, 0] == data[0, 0])
    np.testing.assert_allclose(data[:5, 1], np.linspace(0, 1, 5))


def test_figure2_spot_values(capsys):
    _, out, _ = run(["figure", "2", "--points", "11"], capsys)
    _, data = read_csv(out)
    for t, gamma, value in data[::17]:
        p = ModelParams.from_detuning(delta=5.0, gamma=gamma)
        assert value == pytest.approx(cf.concurrence_ab_closed(p, t), abs=1e-10)


def test_figure3_uses_fixed_time(capsys):
    _, out, _ = run(["figure", "3", "--points", "4"], capsys)
    assert "t=10" in out
    _, data = read_csv(out)
    for delta, gamma, value in data:
        p = ModelParams.from_detuning(delta=delta, gamma=gamma)
        assert value == pytest.approx(cf.concurrence_ab_closed(p, 10.0), abs=1e-10)


def test_figure_spectral_method_agrees(capsys):
    _, closed, _ = run(["figure", "6", "--points", "6"], capsys)
    _, spectral, _ = run(["figure", "6", "--points", "6", "--method", "spectral"], capsys)
    np.testing.assert_allclose(read_csv(closed)[1], read_csv(spectral)[1], atol=1e-8)


def test_evolve_closed_vs_spectral(capsys):
    args = ["evolve", "--delta", "1", "--gb", "2", "--gamma", "0.05", "--points", "41"]
    _, closed, _ = run(args, capsys)
    _, spectral, _ = run(args + ["--method", "spectral"], capsys)
    h1, d1 = read_csv(closed)
    h2, d2 = read_csv(spectral)
    assert h1 == h2 == ["t", "P_g", "C_AB", "C_B", "C_a", "C_b", "purity", "trace"]
    assert np.max(np.abs(d1 - d2)) <= 1e-8
    assert "method=spectral" in spectral.splitlines()[0]


def test_evolve_t0_row(capsys):
    _, out, _ = run(["evolve", "--delta-mix", "0.3", "--points", "3"], capsys)
    _, data = read_csv(out)
    t, p_g, c_ab, c_b, c_a, c_b_mode, purity, trace = data[0]
    assert t == 0 and p_g == pytest.approx(0.3)
    assert c_ab == c_b == 0
    assert purity == pytest.approx(0.3**2 + 0.7**2)
    assert trace == pytest.approx(1.0)


def test_evolve_thermal_half_steady(capsys):
    _, out, _ = run(["evolve", "--delta-mix", "0.5", "--gamma", "0.1", "--tmax", "200",
                     "--points", "3", "--method", "spectral"], capsys)
    _, data = read_csv(out)
    assert data[-1, 3] == pytest.approx(0.25, abs=1e-4)


def test_evolve_rk4_short(capsys):
    args = ["evolve", "--gamma", "0.1", "--tmax", "0.5", "--points", "3", "--dt", "1e-3"]
    _, rk4, _ = run(args + ["--method", "rk4"], capsys)
    _, closed, _ = run(args, capsys)
    assert np.max(np.abs(read_csv(rk4)[1] - read_csv(closed)[1])) <= 1e-6


def test_steady_values(capsys):
    code, out, _ = run(["steady", "--delta", "5"], capsys)
    assert code == EXIT_OK
    header, data = read_csv(out)
    assert header == ["C_AB_inf", "C_B_inf", "P_g_inf"]
    assert data[0, 0] == pytest.approx(10 * math.sqrt(2) / 33, abs=1e-12)


def test_steady_without_gamma_is_usage_error(capsys):
    code, _, err = run(["steady", "--gamma", "0"], capsys)
    assert code == EXIT_USAGE
    assert "no stationary state" in err


def test_verify_passes(capsys):
    code, out, _ = run(["verify", "--points", "21"], capsys)
    assert code == EXIT_OK, out
    assert "all checks passed" in out
    assert sum(ln.startswith("PASS") for ln in out.splitlines()) == 10


def test_verify_detects_sign_flip(capsys):
    code, out, _ = run(["verify", "--points", "21", "--inject-sign-flip"], capsys)
    assert code == EXIT_VERIFY
    line = next(ln for ln in out.splitlines() if "closed form vs spectral" in ln)
    assert line.startswith("FAIL")
    deviation = float(line.split("max deviation ")[1].split()[0])
    assert deviation > 1e-3
    assert "FAILED: e: closed form vs spectral propagator" in out


def test_verify_gamma0_skips_stationary(capsys):
    code, out, _ = run(["verify", "--gamma", "0", "--points", "11"], capsys)
    assert code == EXIT_OK
    assert "SKIP  h: stationary limits" in out


@pytest.mark.parametrize("argv", [
    ["figure", "7"],
    ["figure"],
    ["evolve", "--points", "1"],
    ["evolve", "--tmax", "-1"],
    ["evolve", "--dt", "0"],
    ["evolve", "--method", "euler"],
    ["evolve", "--ga", "0", "--gb", "0"],
    ["evolve", "--delta-mix", "2"],
    ["frobnicate"],
])
def test_usage_errors(argv, capsys):
    assert run(argv, capsys)[0] == EXIT_USAGE


def test_io_error(tmp_path, capsys):
    target = tmp_path / "missing" / "out.csv"
    code, _, err = run(["figure", "4", "--points", "5", "--out", str(target)], capsys)
    assert code == EXIT_IO
    assert "I/O error" in err


def test_out_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(["figure", "5", "--points", "7", "--out", str(path)], capsys)[0] == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.startswith("# command=figure method=closed figure=5")
    assert "g_a=1 g_b=1" in text


def test_twelve_significant_digits(capsys):
    _, out, _ = run(["figure", "6", "--points", "3"], capsys)
    row = [ln for ln in out.splitlines() if not ln.startswith("#")][2]
    for field in row.split(","):
        assert len(field.replace("-", "").replace(".", "").lstrip("0").split("e")[0]) <= 12


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig(command="evolve", n_points=1)
    with pytest.raises(UsageError, match="unknown figure"):
        cmd_figure(RunConfig(command="figure", figure_id=9))


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cavity_dephasing", "steady", "--gamma", "0.1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "C_AB_inf,C_B_inf,P_g_inf" in proc.stdout
