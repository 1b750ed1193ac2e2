import numpy as np
import pytest

from globalobs import cli
from globalobs.birkhoff import CheckpointSchedule, run_orbit
from globalobs.maps import BooleLine
from globalobs.observables import Wave
from globalobs.stats import UniformIntervalSampler


def read_csv(path):
    meta, header, rows, trailer = {}, None, [], {}
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            target = trailer if header is not None else meta
            target[key.strip()] = value.strip()
        elif header is None:
            header = line
        else:
            rows.append(line.split(","))
    return meta, header, rows, trailer


def test_simulate_preset_csv(tmp_path):
    out = tmp_path / "b35.csv"
    rc = cli.main(["simulate", "--preset", "beta_35", "--n-max", "20000",
                   "--out", str(out)])
    assert rc == 0
    meta, header, rows, _ = read_csv(out)
    assert meta["preset"] == "beta_35"
    assert meta["map.kind"] == "alpha_farey_line"
    assert meta["map.beta"] == "0.35"
    assert meta["run.scale_mode"] == "milli"
    assert meta["run.seed"] == "7"
    assert "PCG64" in meta["rng"]
    assert header == "n,value"
    ns = [int(r[0]) for r in rows]
    assert ns[0] >= 18000 and ns[-1] == 20000
    assert all(b > a for a, b in zip(ns, ns[1:]))
    for r in rows:
        float(r[1])


def test_simulate_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert cli.main(["simulate", "--preset", "beta_50", "--n-max", "10000",
                         "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_complex_header(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "[map]\nkind = alpha_farey_line\nbeta = 0.5\n"
        "[observable]\nkind = wave\nomega = 0.2\n"
        "[run]\nx0 = 0.65\nn_max = 5000\nwindow_lo = 0.5\n"
    )
    out = tmp_path / "wave.csv"
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    meta, header, rows, _ = read_csv(out)
    assert header == "n,re,im"
    assert len(rows[0]) == 3


def test_simulate_rejects_bad_config(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[map]\nkind = alpha_farey_line\nbeta = 0.5\nwhat = 1\n")
    assert cli.main(["simulate", "--config", str(cfg)]) == 1
    cfg.write_text("[nope]\nkind = x\n")
    assert cli.main(["simulate", "--config", str(cfg)]) == 1
    cfg.write_text("[map]\nkind = alpha_farey_line\n")  # missing beta
    assert cli.main(["simulate", "--config", str(cfg)]) == 1
    assert cli.main(["simulate", "--preset", "nope"]) == 1
    assert cli.main(["simulate"]) == 1  # neither preset nor config


def test_simulate_singular_orbit_exit_2(tmp_path, capsys):
    cfg = tmp_path / "origin.cfg"
    cfg.write_text(
        "[map]\nkind = alpha_farey_line\nbeta = 0.5\n"
        "[run]\nx0 = 0.0\nn_max = 100\nwindow_lo = 0.0\n"
    )
    out = tmp_path / "origin.csv"
    assert cli.main(["simulate", "--config", str(cfg), "--out", str(out)]) == 2
    _, _, _, trailer = read_csv(out)
    assert "aborted_at_step" in trailer


def test_ensemble_csv_and_m1(tmp_path):
    cfg = tmp_path / "ens.cfg"
    cfg.write_text(
        "[map]\nkind = boole\n"
        "[observable]\nkind = wave\nomega = 0.2\n"
        "[run]\nn_max = 200\nensemble = 1\nseed = 11\nsampler = uniform:-1,1\n"
        "window_lo = 0.0\n"
    )
    out = tmp_path / "ens.csv"
    assert cli.main(["ensemble", "--config", str(cfg), "--out", str(out)]) == 0
    meta, header, rows, _ = read_csv(out)
    assert header == "sample,re,im"
    assert len(rows) == 1
    got = complex(float(rows[0][1]), float(rows[0][2]))
    sampler = UniformIntervalSampler(-1.0, 1.0)
    start = sampler(np.random.default_rng(np.random.SeedSequence(11).spawn(1)[0]))
    direct = run_orbit(BooleLine(), Wave(0.2), start, CheckpointSchedule.single(200))
    assert abs(got - direct[-1][1]) < 1e-12


def test_arcsine_command(tmp_path, capsys):
    out = tmp_path / "arc.txt"
    rc = cli.main(["arcsine", "--ensemble", "300", "--n", "2000",
                   "--seed", "5", "--tolerance", "0.2", "--out", str(out)])
    assert rc == 0
    text = out.read_text()
    assert "KS distance" in text and "PASS" in text


def test_levywalk_trajectory_csv(tmp_path):
    out = tmp_path / "walk.csv"
    assert cli.main(["levywalk", "--mode", "trajectory", "--n", "2000",
                     "--seed", "3", "--out", str(out)]) == 0
    meta, header, rows, _ = read_csv(out)
    assert header == "n,re,im"
    assert meta["beta"] == "0.5"
    assert int(rows[-1][0]) == 2000


def test_levywalk_ensemble_csv(tmp_path):
    out = tmp_path / "walk_ens.csv"
    assert cli.main(["levywalk", "--mode", "ensemble", "--n", "1000",
                     "--ensemble", "16", "--seed", "3", "--out", str(out)]) == 0
    _, header, rows, _ = read_csv(out)
    assert header == "sample,re,im"
    assert len(rows) == 16
    # two-direction walk: imaginary parts vanish
    assert all(float(r[2]) == 0.0 for r in rows)


def test_luroth_renewal_csv(tmp_path):
    out = tmp_path / "renewal.csv"
    assert cli.main(["luroth", "--mode", "renewal", "--k-max", "50",
                     "--out", str(out)]) == 0
    meta, header, rows, _ = read_csv(out)
    assert header == "k,value"
    assert len(rows) == 51
    assert float(rows[0][1]) == 1.0


def test_luroth_digits_and_statistic(capsys):
    assert cli.main(["luroth", "--mode", "digits", "--x", "0.3"]) == 0
    assert "digits(" in capsys.readouterr().out
    assert cli.main(["luroth", "--mode", "statistic", "--streams", "2",
                     "--count", "20000"]) == 0
    out = capsys.readouterr().out
    assert "2/2" in out or "1/2" in out


def test_verify_subset(capsys):
    assert cli.main(["verify", "--criteria", "8"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "1/1" in out
    assert cli.main(["verify", "--criteria", "99"]) == 1


def test_parse_config_errors():
    with pytest.raises(cli.ConfigError):
        cli.parse_config_text("key = value\n")  # key outside a section
    with pytest.raises(cli.ConfigError):
        cli.parse_config_text("[map]\nnonsense line\n")
    with pytest.raises(cli.ConfigError):
        cli.parse_config_text("[map]\nkind = boole\nkind = boole\n")
