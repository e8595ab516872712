import numpy as np
import pytest

from sechjcm import cli
from sechjcm.analysis import local_frequency
from sechjcm.cli import ConfigError, PRESETS, RunConfig, build_config, main, parse_grid, read_config_file


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0]
    rows = np.array([[float(x) for x in ln.split(",")] for ln in lines if not ln.startswith("#")])
    summary = [ln for ln in lines[1:] if ln.startswith("#")]
    return header, rows, summary


def test_presets_listing(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    for name in PRESETS:
        assert name in out


def test_fig1_csv(tmp_path):
    out = tmp_path / "fig1.csv"
    assert main(["run", "--preset", "fig1_resonant", "--out", str(out)]) == 0
    header, rows, summary = read_csv(out)
    assert header == "# t_over_tau,inversion"
    assert rows.shape == (2000, 2) and not summary
    assert rows[0, 0] == -10.0 and rows[-1, 0] == 10.0
    assert rows[0, 1] == 1.0
    # the number-state curve is the resonant closed form
    t = rows[:, 0]
    area = 10 * (2 * np.arctan(np.tanh(t / 4)) - 2 * np.arctan(np.tanh(-2.5)))
    assert np.allclose(rows[:, 1], 1 - 2 * np.sin(2 * area) ** 2, atol=1e-9)
    # Rabi oscillations slow down as the pulse decays
    t_mid, freq = local_frequency(t, rows[:, 1])
    assert abs(t_mid[np.argmax(freq)]) < 1.0
    assert freq[-1] < 0.5 * freq.max() and freq[0] < 0.5 * freq.max()


def test_engine_both_summary(tmp_path):
    out = tmp_path / "both.csv"
    rc = main(["run", "--preset", "fig1_detuned", "--grid", "-10:10:101", "--engine", "both", "--out", str(out)])
    assert rc == 0
    header, rows, summary = read_csv(out)
    assert header == "# t_over_tau,inversion,inversion_ode"
    assert rows.shape == (101, 3)
    assert len(summary) == 1 and summary[0].startswith("# max_abs_discrepancy=")
    gap = float(summary[0].split("=")[1])
    assert gap == pytest.approx(np.max(np.abs(rows[:, 1] - rows[:, 2])), rel=1e-5)
    assert gap < 1e-8


def test_stdout_output(capsys):
    assert main(["run", "--preset", "fig3_resonant", "--grid", "0:30:5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "# t_over_tau,inversion" and len(lines) == 6


def test_two_runs_identical_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["run", "--preset", "fig2_detuned", "--grid", "-10:20:300", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("preset", ["fig1_resonant", "fig1_detuned"])
def test_verify_presets_pass(preset, capsys):
    assert main(["verify", "--preset", preset, "--grid", "-10:10:200"]) == 0
    assert capsys.readouterr().out.startswith("PASS")


def test_verify_stress_case():
    cfg = build_config(None, {}, {"lambda0_tau": 10.0, "delta_tau": 2.0, "n": 5, "grid": (-10.0, 30.0, 200)})
    ok, (gap, _, _) = cli.verify(cfg)
    assert ok and gap < 1e-6


def test_verify_negative_control(capsys):
    rc = main(["verify", "--preset", "fig1_detuned", "--grid", "-10:10:200", "--corrupt-gamma", "0.05"])
    assert rc == 1
    out = capsys.readouterr().out
    assert out.startswith("FAIL") and "Delta = 4" in out


def test_config_file_layering(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# comment\nlambda0-tau = 2.5\ndelta_tau=0.3\n\nnbar = 4\n")
    values = read_config_file(conf)
    assert values == {"lambda0_tau": 2.5, "delta_tau": 0.3, "nbar": 4.0}
    cfg = build_config("fig2_resonant", values, {"delta_tau": 0.7})
    assert cfg.lambda0_tau == 2.5 and cfg.delta_tau == 0.7
    assert cfg.initial == "coherent" and cfg.nbar == 4.0
    assert cfg.t0 == PRESETS["fig2_resonant"]["t0"]


def test_initial_state_switching():
    assert build_config(None, {}, {"nbar": 3.0}).initial == "coherent"
    assert build_config("fig2_resonant", {}, {"n": 2}).initial == "number"


def test_bad_config_file(tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text("no equals sign here\n")
    with pytest.raises(ConfigError):
        read_config_file(conf)
    conf.write_text("colour = blue\n")
    with pytest.raises(ConfigError):
        read_config_file(conf)


def test_parse_grid():
    assert parse_grid("-10:20:300") == (-10.0, 20.0, 300)
    with pytest.raises(ConfigError):
        parse_grid("0:1")


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--grid", "-20:10:100"],
        ["run", "--grid", "0:10:1"],
        ["run", "--model", "standard", "--m", "2"],
        ["run", "--kappa-tau", "0.3"],
        ["run", "--nbar", "-1"],
        ["run", "--pe", "1.5"],
        ["run", "--config", "/nonexistent/file.conf"],
    ],
)
def test_validation_exit_code(argv, capsys):
    assert main(argv) == 2
    assert "configuration error" in capsys.readouterr().err


def test_numeric_failure_exit_code(monkeypatch, capsys):
    from sechjcm.propagator import PropagationError

    def fail(*args, **kwargs):
        raise PropagationError(4, np.array([1.5]), "series did not converge")

    monkeypatch.setattr(cli, "inversion_curve", fail)
    assert main(["run", "--preset", "fig1_resonant"]) == 3
    err = capsys.readouterr().err
    assert "Delta = 4" in err and "t = 1.5" in err


def test_multiphoton_and_kerr_runs(tmp_path):
    out = tmp_path / "k.csv"
    rc = main(["run", "--model", "kerr", "--m", "2", "--kappa-tau", "0.1", "--delta-tau", "0.4",
               "--lambda0-tau", "2", "--n", "1", "--grid", "-10:10:50", "--engine", "both", "--out", str(out)])
    assert rc == 0
    _, rows, summary = read_csv(out)
    assert float(summary[0].split("=")[1]) < 1e-8
    assert np.all(np.abs(rows[:, 1]) <= 1 + 1e-12)


def test_units_boundary():
    model, pulse, times = cli.to_physics(RunConfig(delta_tau=0.5, omega_tau=2.0, grid=(-10.0, 0.0, 11)))
    assert pulse.tau == 1.0 and pulse.lambda0 == 5.0
    assert model.detuning == pytest.approx(0.5)
    assert np.allclose(times, np.linspace(-10, 0, 11))
