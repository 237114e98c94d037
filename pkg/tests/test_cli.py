"""CLI surface: exit codes, output formats, byte determinism, oracle harness."""

import json

import pytest

from oabf.cli import (OUTAGE_HEADER, SWEEP_HEADER, main, parse_config_file,
                      run_verification)

MINI_CONFIG = """\
[mini]
schemes = oabf_s
mode = separate
n_values = 2
trials = 10
seed = 3
"""


def write_channel(tmp_path, text):
    path = tmp_path / "chan.txt"
    path.write_text(text)
    return str(path)


# ---------------------------------------------------------------------------
# select
# ---------------------------------------------------------------------------

def test_select_separate_antipodal(tmp_path, capsys):
    path = write_channel(tmp_path, "1 0\n-1 0\n")
    assert main(["select", "--input", path, "--mode", "separate"]) == 0
    assert capsys.readouterr().out.strip() == "10 1.0"


def test_select_total(tmp_path, capsys):
    path = write_channel(tmp_path, "2 0\n1 0\n")
    assert main(["select", "--input", path, "--mode", "total"]) == 0
    assert capsys.readouterr().out.strip() == "11 4.5"


def test_select_separate_orthogonal(tmp_path, capsys):
    path = write_channel(tmp_path, "1 0\n0 1\n")
    assert main(["select", "--input", path, "--mode", "separate"]) == 0
    assert capsys.readouterr().out.strip() == "11 2.0"


def test_select_malformed_line_exits_1(tmp_path, capsys):
    path = write_channel(tmp_path, "1 0\noops\n")
    assert main(["select", "--input", path, "--mode", "separate"]) == 1
    assert "line 2" in capsys.readouterr().err


def test_select_json_input(tmp_path, capsys):
    path = tmp_path / "chan.json"
    path.write_text("[[2, 0], [1, 1]]")
    assert main(["select", "--input", str(path), "--mode", "separate"]) == 0
    bits, obj = capsys.readouterr().out.split()
    assert bits == "11" and float(obj) == pytest.approx(10.0)


def test_select_power_noise_scale_snr(tmp_path, capsys):
    path = write_channel(tmp_path, "1 0\n0 1\n")
    assert main(["select", "--input", path, "--mode", "separate",
                 "--power", "4", "--noise", "2"]) == 0
    bits, obj = capsys.readouterr().out.split()
    assert float(obj) == pytest.approx(4.0)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def test_simulate_minimal_config(tmp_path, capsys):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(MINI_CONFIG)
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    lines = (out / "mini.csv").read_text().splitlines()
    assert lines[0] == SWEEP_HEADER
    assert len(lines) == 2  # header + one data row
    assert lines[1].startswith("oabf_s,2,10,")
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["experiments"]["mini"]["seed"] == 3
    assert "wall_time_s" in manifest and "versions" in manifest


def test_simulate_twice_is_byte_identical(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(MINI_CONFIG.replace("trials = 10", "trials = 200"))
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["simulate", "--config", str(cfg), "--out", str(out2),
                 "--threads", "3"]) == 0
    assert (out1 / "mini.csv").read_bytes() == (out2 / "mini.csv").read_bytes()


def test_simulate_outage_csv(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(MINI_CONFIG + "outage_thresholds_db = -10, 0\n")
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    lines = (out / "mini_outage.csv").read_text().splitlines()
    assert lines[0] == OUTAGE_HEADER
    assert len(lines) == 3  # one scheme x one n x two thresholds
    assert lines[1].startswith("oabf_s,2,-10.0,")


def test_simulate_bad_config_names_field(tmp_path, capsys):
    cfg = tmp_path / "exp.ini"
    cfg.write_text("[mini]\nschemes = oabf_s\nmode = separate\nn_values = 2\n"
                   "trials = ten\nseed = 3\n")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    err = capsys.readouterr().err
    assert "trials" in err and "mini" in err


def test_simulate_unknown_field_rejected(tmp_path, capsys):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(MINI_CONFIG + "bogus = 1\n")
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "bogus" in capsys.readouterr().err


def test_simulate_missing_config_file(tmp_path, capsys):
    assert main(["simulate", "--config", str(tmp_path / "nope.ini"),
                 "--out", str(tmp_path / "o")]) == 1


def test_unknown_flag_exits_1(capsys):
    assert main(["select", "--nonsense"]) == 1


def test_unknown_scheme_in_config(tmp_path, capsys):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(MINI_CONFIG.replace("oabf_s", "oabf_x"))
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "oabf_x" in capsys.readouterr().err


def test_parse_config_round_trip(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text("[a]\nschemes = oabf_s, phase_aligned\nmode = total\n"
                   "power = 2.5\nnoise = 0.5\nn_values = 2, 4\ntrials = 7\n"
                   "seed = 9\noutage_thresholds_db = 0\n")
    [(name, config)] = parse_config_file(cfg)
    assert name == "a"
    assert config.schemes == ("oabf_s", "phase_aligned")
    assert config.constraint.mode == "total"
    assert config.constraint.power == 2.5
    assert config.n_values == (2, 4)
    assert config.outage_thresholds == (1.0,)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_verify_passes(capsys):
    assert main(["verify", "--n-max", "6", "--instances", "25", "--seed", "5"]) == 0
    out = capsys.readouterr().out
    assert "N= 6: separate 25/25 pass, total 25/25 pass" in out


def test_verify_capacity_guard(capsys):
    assert main(["verify", "--n-max", "21", "--instances", "5"]) == 1
    assert "capacity" in capsys.readouterr().err


def test_verify_catches_injected_fault(capsys):
    from oabf import oabf_b, oabf_t

    # oabf_b is suboptimal on some instances, so the harness must flag it
    code = run_verification(6, 40, seed=5, separate_algo=oabf_b, total_algo=oabf_t)
    assert code == 2
    out = capsys.readouterr().out
    assert "MISMATCH" in out and "coefficients" in out


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

def test_figures_writes_all_five_tables(tmp_path):
    out = tmp_path / "figs"
    assert main(["figures", "--out", str(out), "--trials", "20", "--seed", "1"]) == 0
    for name in ("fig4", "fig5", "fig6", "fig7", "fig8"):
        lines = (out / f"{name}.csv").read_text().splitlines()
        expected = OUTAGE_HEADER if name in ("fig6", "fig8") else SWEEP_HEADER
        assert lines[0] == expected
        assert len(lines) > 1
    assert (out / "manifest.json").exists()
