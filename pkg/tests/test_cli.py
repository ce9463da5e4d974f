"""End-to-end CLI runs: config parsing, CSV layout, reproducibility.

Every command is exercised through main() with configs written to
tmp_path; the reproducibility tests compare output bytes, not parsed
values, because byte-identical reruns are part of the contract.
"""

import csv
import json
from pathlib import Path

import pytest

from uavlink import __version__
from uavlink.cli import load_config, main
from uavlink.errors import ConfigError

BASE_RUN = """\
[run]
fixture = case1
scheme = psk
seed = 3
n_symbols = 2000
snr_db = 6 12
acf = 0.99 0.9
orders = 4
detectors = ml, so, uub
bep_thresholds = 1e-3 1e-5
sample_dt = 2e-4
"""

EXPLICIT_SCENARIO = """\
[run]
scheme = qam
seed = 7
snr_db = 18 24
bep_thresholds = 1e-4

[scenario]
uav_height = 100.0
ground_x = 100.0
ground_y = 0.0
carrier_freq = 28e9
n_rx_antennas = 2
bandwidth = 100e6
temperature = 300.0
p_max_dbm = 35.0
bep_threshold = 1e-5
t_estimate = 1e-3

[wobble]
omega_v = 62.8318
mu = 30.0

[channel]
h_real = 1.0, 0.5
h_imag = 0.0, -0.25
"""


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    monkeypatch.delenv("UAVLINK_OUT_DIR", raising=False)


def write_config(tmp_path: Path, text: str = BASE_RUN) -> Path:
    path = tmp_path / "run.ini"
    path.write_text(text)
    return path


def read_rows(path: Path):
    with path.open() as fh:
        return list(csv.DictReader(fh))


class TestBepCurve:
    def test_writes_curve_and_sidecar(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["bep-curve", "--config", str(cfg),
                     "--out", str(out)]) == 0
        rows = read_rows(out / "bep_curve.csv")
        # orders x snr x acf x detectors
        assert len(rows) == 1 * 2 * 2 * 3
        assert set(rows[0]) == {"snr_db", "acf", "scheme", "order",
                                "detector", "bep", "std_error", "bits"}
        for row in rows:
            assert 0.0 <= float(row["bep"]) <= 1.0
            if row["detector"] == "analytic-uub":
                assert row["bits"] == "0" and float(row["std_error"]) == 0.0
            else:
                assert row["bits"] == "4000"  # 2000 QPSK symbols

    def test_sidecar_metadata(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        main(["bep-curve", "--config", str(cfg), "--out", str(out)])
        meta = json.loads((out / "bep_curve.csv.meta.json").read_text())
        assert meta["version"] == __version__
        assert meta["backend"] in ("cython", "numpy")
        assert meta["seed"] == 3
        assert meta["fixture"] == "case1"
        assert not any("time" in k or "date" in k for k in meta)

    def test_rerun_is_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(["bep-curve", "--config", str(cfg), "--out", str(out_a)])
        main(["bep-curve", "--config", str(cfg), "--out", str(out_b)])
        for name in ("bep_curve.csv", "bep_curve.csv.meta.json"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    @pytest.mark.parametrize("threads", [2, 5])
    def test_threads_never_change_results(self, tmp_path, threads):
        cfg = write_config(tmp_path)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(["bep-curve", "--config", str(cfg), "--out", str(out_a),
              "--threads", "1"])
        main(["bep-curve", "--config", str(cfg), "--out", str(out_b),
              "--threads", str(threads)])
        assert (out_a / "bep_curve.csv").read_bytes() == \
            (out_b / "bep_curve.csv").read_bytes()

    def test_seed_flag_changes_mc_rows(self, tmp_path):
        cfg = write_config(tmp_path)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        main(["bep-curve", "--config", str(cfg), "--out", str(out_a)])
        main(["bep-curve", "--config", str(cfg), "--out", str(out_b),
              "--seed", "99"])
        rows_a = read_rows(out_a / "bep_curve.csv")
        rows_b = read_rows(out_b / "bep_curve.csv")
        mc_a = [r["bep"] for r in rows_a if r["detector"] in ("ml", "so")]
        mc_b = [r["bep"] for r in rows_b if r["detector"] in ("ml", "so")]
        assert mc_a != mc_b
        an_a = [r["bep"] for r in rows_a if r["detector"] == "analytic-uub"]
        an_b = [r["bep"] for r in rows_b if r["detector"] == "analytic-uub"]
        assert an_a == an_b

    def test_psk_approx_requires_psk(self, tmp_path, capsys):
        text = BASE_RUN.replace("scheme = psk", "scheme = qam").replace(
            "orders = 4", "orders = 16").replace(
            "detectors = ml, so, uub", "detectors = psk-approx")
        cfg = write_config(tmp_path, text)
        assert main(["bep-curve", "--config", str(cfg),
                     "--out", str(tmp_path / "o")]) == 2
        assert "psk-approx" in capsys.readouterr().err


class TestAdapt:
    def test_outputs(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["adapt", "--config", str(cfg), "--out", str(out)]) == 0
        sched = read_rows(out / "adapt_schedule.csv")
        assert [r["rate_bits"] for r in sched] == ["5", "4", "3", "2", "1"]
        for row in sched:
            assert float(row["t_start"]) < float(row["t_end"])
            assert float(row["c_start"]) > float(row["c_end"])
        trace = read_rows(out / "adapt_uub_trace.csv")
        assert all(float(r["uub"]) <= 1e-5 * (1 + 1e-9) for r in trace)
        curve = read_rows(out / "adapt_rave.csv")
        assert max(float(r["r_ave"]) for r in curve) <= 3.8617991547 + 1e-9

    def test_optimum_in_metadata(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        main(["adapt", "--config", str(cfg), "--out", str(out)])
        meta = json.loads((out / "adapt_schedule.csv.meta.json").read_text())
        assert meta["r_max"] == 5
        assert meta["t_max"] == pytest.approx(0.0070407931, abs=1e-9)
        assert meta["r_ave_max"] == pytest.approx(3.8617991547, abs=1e-9)
        assert meta["r_op"] == 4


class TestRateOpt:
    def test_contour(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["rate-opt", "--config", str(cfg), "--out", str(out)]) == 0
        rows = read_rows(out / "rate_opt_contour.csv")
        assert len(rows) == 2 * 2
        by_beta = {}
        for r in rows:
            by_beta.setdefault(r["bep_threshold"], []).append(
                (float(r["snr_db"]), float(r["r_ave_max"])))
        for pts in by_beta.values():
            pts.sort()
            assert pts[0][1] <= pts[1][1]  # more SNR never hurts


class TestPower:
    def test_trace_and_savings(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["power", "--config", str(cfg), "--out", str(out)]) == 0
        trace = read_rows(out / "power_trace.csv")
        assert all(r["clamped"] == "0" for r in trace)
        beta = 1e-5
        for r in trace:
            assert float(r["bep_at_pmin"]) <= beta * (1 + 1e-3)
            assert float(r["p_min_dbm"]) <= 35.0
        savings = read_rows(out / "power_savings.csv")
        assert [r["window"] for r in savings] == ["full", "optimum"]
        full, opt = savings
        assert 80.0 < float(full["savings_percent"]) < 95.0
        assert 55.0 < float(opt["savings_percent"]) < 75.0
        assert float(full["mean_power_dbm"]) < float(opt["mean_power_dbm"])
        assert float(full["baseline_dbm"]) == 35.0


class TestConfigResolution:
    def test_missing_scheme_names_field(self, tmp_path, capsys):
        text = BASE_RUN.replace("scheme = psk\n", "")
        cfg = write_config(tmp_path, text)
        assert main(["rate-opt", "--config", str(cfg),
                     "--out", str(tmp_path / "o")]) == 2
        assert "run.scheme" in capsys.readouterr().err

    def test_missing_seed_names_field(self, tmp_path, capsys):
        text = BASE_RUN.replace("seed = 3\n", "")
        cfg = write_config(tmp_path, text)
        assert main(["rate-opt", "--config", str(cfg),
                     "--out", str(tmp_path / "o")]) == 2
        assert "run.seed" in capsys.readouterr().err

    def test_unknown_fixture(self, tmp_path, capsys):
        text = BASE_RUN.replace("fixture = case1", "fixture = case9")
        cfg = write_config(tmp_path, text)
        assert main(["rate-opt", "--config", str(cfg),
                     "--out", str(tmp_path / "o")]) == 2
        assert "case9" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["rate-opt", "--config", str(tmp_path / "nope.ini"),
                     "--out", str(tmp_path / "o")]) == 2
        assert "not found" in capsys.readouterr().err

    def test_unknown_subcommand_exits(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["frobnicate", "--config", "x"])

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_seed_override_in_loader(self, tmp_path):
        cfg = write_config(tmp_path)
        assert load_config(str(cfg)).seed == 3
        assert load_config(str(cfg), seed_override=11).seed == 11

    def test_out_dir_precedence(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path, BASE_RUN
                           + f"out_dir = {tmp_path / 'from_cfg'}\n")
        # config value is the fallback
        assert load_config(str(cfg)).out_dir == str(tmp_path / "from_cfg")
        # environment beats config
        monkeypatch.setenv("UAVLINK_OUT_DIR", str(tmp_path / "from_env"))
        assert load_config(str(cfg)).out_dir == str(tmp_path / "from_env")
        # explicit flag beats both
        assert load_config(str(cfg), out_override=str(tmp_path / "cli")) \
            .out_dir == str(tmp_path / "cli")

    def test_env_out_dir_used_by_main(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path)
        env_dir = tmp_path / "env_out"
        monkeypatch.setenv("UAVLINK_OUT_DIR", str(env_dir))
        assert main(["rate-opt", "--config", str(cfg)]) == 0
        assert (env_dir / "rate_opt_contour.csv").exists()

    def test_explicit_scenario_sections(self, tmp_path):
        cfg = write_config(tmp_path, EXPLICIT_SCENARIO)
        out = tmp_path / "out"
        assert main(["rate-opt", "--config", str(cfg), "--out", str(out)]) == 0
        meta = json.loads(
            (out / "rate_opt_contour.csv.meta.json").read_text())
        assert meta["fixture"] is None
        assert meta["n_rx_antennas"] == 2
        assert meta["norm_h_sq"] == pytest.approx(1.0 + 0.25 + 0.0625)

    def test_channel_length_mismatch(self, tmp_path):
        text = EXPLICIT_SCENARIO.replace("h_imag = 0.0, -0.25",
                                         "h_imag = 0.0, -0.25, 1.0")
        cfg = write_config(tmp_path, text)
        with pytest.raises(ConfigError, match="lengths differ"):
            load_config(str(cfg))

    def test_channel_antenna_mismatch(self, tmp_path):
        text = EXPLICIT_SCENARIO.replace("n_rx_antennas = 2",
                                         "n_rx_antennas = 3")
        cfg = write_config(tmp_path, text)
        with pytest.raises(ConfigError, match="n_rx_antennas"):
            load_config(str(cfg))

    def test_bad_detector_token(self, tmp_path):
        text = BASE_RUN.replace("detectors = ml, so, uub",
                                "detectors = ml, genie")
        cfg = write_config(tmp_path, text)
        with pytest.raises(ConfigError, match="genie"):
            load_config(str(cfg))
