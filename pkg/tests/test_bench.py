import json
import math
from dataclasses import replace

import pytest
from scenarios import SYNTH_X, reference_config, synthetic_config

from pinch_aoi import bench
from pinch_aoi.bench import COLUMNS, Axis, SweepSpec, axis_range
from pinch_aoi.config import (
    config_digest,
    config_from_dict,
    config_to_dict,
    default_config,
    dumps_config,
    load_config,
    save_config,
)
from pinch_aoi.errors import ConfigError, InfeasibleLinkError
from pinch_aoi.model import los_probability, pa_device_distance
from pinch_aoi.sim import SimMode, SimSpec

HEADER = ("x_p_m,beta,B_max_j,distance_m,los_prob,charge_slots,success_prob,"
          "aoi_paper_s,aoi_corrected_s,aoi_mc_s,mc_ci_s")


def test_default_config_values():
    c = default_config()
    assert c.geometry.waveguide_length_m == 35
    assert c.geometry.waveguide_height_m == 10
    assert (c.devices[0].x_m, c.devices[0].y_m) == (10, 3)
    assert c.energy.slot_s == 1
    assert c.rf.carrier_hz == 28e9
    assert c.energy.tx_power_w == 10
    assert c.energy.conversion_eff == 0.7
    assert c.energy.capacitor_j == 2**-5
    assert c.comm.packet_bits == 1000
    assert c.comm.bandwidth_hz == 1000
    assert c.comm.noise_w == pytest.approx(1e-15, rel=1e-12)


def test_config_round_trip(tmp_path):
    c = default_config()
    path = tmp_path / "c.json"
    save_config(c, path)
    again = load_config(path)
    assert again == c
    save_config(again, tmp_path / "d.json")
    assert (tmp_path / "d.json").read_text() == path.read_text()
    assert load_config(tmp_path / "d.json") == c
    assert config_digest(again) == config_digest(c)


def test_config_validation_lists_every_problem():
    data = config_to_dict(default_config())
    data["energy"]["conversion_eff"] = 1.3
    data["geometry"]["area_y_m"] = -1
    data["rf"]["bogus"] = 1
    with pytest.raises(ConfigError) as err:
        config_from_dict(data)
    msg = str(err.value)
    assert "rf.bogus" in msg
    data["rf"].pop("bogus")
    with pytest.raises(ConfigError) as err:
        config_from_dict(data)
    msg = str(err.value)
    assert "conversion_eff" in msg and "area_y_m" in msg


def test_config_shape_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    data = config_to_dict(default_config())
    data["comm"]["noise_dbm"] = -120
    with pytest.raises(ConfigError, match="exactly one"):
        config_from_dict(data)
    data = config_to_dict(default_config())
    data["devices"] = [{"x_m": "ten", "y_m": 0}]
    with pytest.raises(ConfigError, match="must be a number"):
        config_from_dict(data)
    with pytest.raises(ConfigError):
        config_from_dict([])


def test_noise_dbm_converted_once():
    data = config_to_dict(default_config())
    del data["comm"]["noise_w"]
    data["comm"]["noise_dbm"] = -90
    assert config_from_dict(data).comm.noise_w == pytest.approx(1e-12, rel=1e-12)
    assert "noise_dbm" not in dumps_config(config_from_dict(data))


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(Axis.BETA, ())
    with pytest.raises(ValueError):
        SweepSpec(Axis.BETA, (1e-3, 1e-4))
    with pytest.raises(ValueError):
        SweepSpec(Axis.BETA, (1e-4,), Axis.BETA, (1e-3,))
    assert axis_range(0, 35, 141)[4] == 1.0
    assert axis_range(2, 9, 1) == (2.0,)


def test_single_axis_sweep(tmp_path):
    out = tmp_path / "s.csv"
    spec = SweepSpec(Axis.PA_POSITION, axis_range(0, 35, 8))
    assert bench.run_sweep(reference_config(1e-3), spec, out) == 8
    lines = out.read_text().splitlines()
    assert lines[0] == HEADER
    assert len(lines) == 9
    rows = bench.read_rows(out)
    assert all(r["aoi_mc_s"] is None and r["mc_ci_s"] is None for r in rows)
    assert rows[2]["x_p_m"] == 10.0
    assert rows[2]["charge_slots"] == 670306


def test_beta_sweep_uses_default_position(tmp_path):
    out = tmp_path / "b.csv"
    bench.run_sweep(reference_config(), SweepSpec(Axis.BETA, (1e-5, 1e-3)), out)
    rows = bench.read_rows(out)
    assert [r["x_p_m"] for r in rows] == [10.0, 10.0]
    bench.run_sweep(reference_config(), SweepSpec(Axis.CAPACITOR, (0.01, 0.02), x_p_m=3.0), out)
    rows = bench.read_rows(out)
    assert [r["B_max_j"] for r in rows] == [0.01, 0.02]
    assert rows[0]["x_p_m"] == 3.0


def test_two_axis_row_order(tmp_path):
    out = tmp_path / "two.csv"
    spec = SweepSpec(Axis.PA_POSITION, (0.0, 10.0, 20.0), Axis.CAPACITOR, (0.01, 0.02))
    assert bench.run_sweep(reference_config(), spec, out) == 6
    rows = bench.read_rows(out)
    assert [(r["x_p_m"], r["B_max_j"]) for r in rows] == [
        (0.0, 0.01), (0.0, 0.02), (10.0, 0.01), (10.0, 0.02), (20.0, 0.01), (20.0, 0.02)]


def test_sweep_variant_filter(tmp_path):
    out = tmp_path / "v.csv"
    bench.run_sweep(reference_config(), SweepSpec(Axis.BETA, (1e-3,)), out,
                    variants=(bench.ModelVariant.PAPER,))
    row = bench.read_rows(out)[0]
    assert row["aoi_paper_s"] > 0 and row["aoi_corrected_s"] is None


def test_inf_iff_zero_success(tmp_path):
    out = tmp_path / "fig3.csv"
    written = bench.run_preset("fig3", reference_config(), out)
    wide = tmp_path / "fig3_wide.csv"
    assert written[str(wide)] == 3 * 201
    text = wide.read_text()
    assert text.splitlines()[0] == HEADER
    saw_inf = False
    for line in text.splitlines()[1:]:
        cells = dict(zip(COLUMNS, line.split(",")))
        zero = float(cells["success_prob"]) == 0
        for col in ("aoi_paper_s", "aoi_corrected_s"):
            assert (cells[col] == "inf") == zero
        saw_inf |= zero
    assert saw_inf
    assert "inf" not in out.read_text()


def test_sweep_with_simulation(tmp_path):
    cfg = synthetic_config(3, 1.0)
    out = tmp_path / "mc.csv"
    spec = SweepSpec(Axis.PA_POSITION, (9.0, 10.0, 11.0),
                     sim=SimSpec(SimMode.EXACT, target_cycles=200, seed=4))
    bench.run_sweep(cfg, spec, out)
    rows = bench.read_rows(out)
    assert rows[1]["aoi_mc_s"] == 2.5 and rows[1]["mc_ci_s"] == 0.0
    for r in rows:
        assert r["mc_ci_s"] >= 0
        assert abs(r["aoi_mc_s"] - r["aoi_corrected_s"]) <= max(r["mc_ci_s"] * 1.5, 1e-12)


def test_sweep_parallel_is_byte_identical(tmp_path):
    spec = SweepSpec(Axis.PA_POSITION, axis_range(0, 35, 21), Axis.BETA, (1e-5, 1e-3),
                     sim=SimSpec(target_cycles=300, seed=9))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    bench.run_sweep(reference_config(), spec, a)
    bench.run_sweep(reference_config(), spec, b, jobs=4)
    assert a.read_bytes() == b.read_bytes()


def test_fig3_success_probability_column(tmp_path):
    out = tmp_path / "fig3.csv"
    bench.run_preset("fig3", reference_config(), out)
    cfg = reference_config()
    for r in bench.read_rows(out):
        rf = replace(cfg.rf, blockage_beta=r["beta"])
        d = pa_device_distance(cfg.geometry, cfg.devices[0], r["x_p_m"])
        assert abs(r["success_prob"] - los_probability(rf, d)) <= 1e-12


def test_compare_deterministic(tmp_path):
    cfg = synthetic_config(3, 1.0)
    out = tmp_path / "cmp.json"
    rec = bench.compare(cfg, SYNTH_X, SimSpec(SimMode.EXACT, target_cycles=100, seed=1), out)
    assert rec["verdict"] == "CorrectedCompound"
    assert rec["sim"]["e_s2_hat"] == 16.0
    assert rec["variant_values"]["PaperClosedForm"]["e_s2"] == 25.0
    on_disk = json.loads(out.read_text())
    assert set(on_disk) == {"config_digest", "x_p_m", "link", "variant_values", "sim",
                            "verdict", "seed"}
    assert on_disk["config_digest"] == config_digest(cfg)


def test_compare_default_parameters_finite():
    rec = bench.compare(reference_config(1e-3), 10.0, SimSpec(target_cycles=2000, seed=5))

    def finite(obj):
        if isinstance(obj, dict):
            return all(finite(v) for v in obj.values())
        if isinstance(obj, float):
            return math.isfinite(obj)
        return True

    assert finite(rec)
    assert rec["verdict"] in {"CorrectedCompound", "PaperClosedForm", "inconclusive"}


def test_compare_infeasible():
    cfg = reference_config(1e-3)
    cfg = replace(cfg, comm=replace(cfg.comm, noise_w=1.0))
    with pytest.raises(InfeasibleLinkError):
        bench.compare(cfg, 10.0, SimSpec(target_cycles=10))


def test_unknown_preset():
    with pytest.raises(ValueError):
        bench.preset_sweeps("fig9", reference_config())
