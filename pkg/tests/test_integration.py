"""
集成测试
从命令行跑完整命令并检查导出的数据
"""
import json

import numpy as np
import pandas as pd
import pytest

from src.cli import main
from src.utils.exceptions import EXIT_OK


@pytest.mark.integration
@pytest.mark.slow
def test_bands_flow(tmp_path):
    """测试 bands 命令：41×41 网格上 m = 0 与一阶结果之差小于 0.006·E_J"""
    assert main(["bands", "--out", str(tmp_path)]) == EXIT_OK
    summary = pd.read_csv(tmp_path / "bands_summary.csv")
    ground = summary[summary["m"] == 0].iloc[0]
    assert ground["max_deviation"] < 0.006
    assert ground["failures"] == 0

    meta = json.loads((tmp_path / "bands_m0.meta.json").read_text(encoding="utf-8"))
    assert meta["convergence"]["converged"]
    ((k_min, phi_min),) = meta["minimum"]
    assert abs(k_min) < 1e-12 and abs(phi_min) < 1e-12
    band = pd.read_csv(tmp_path / "bands_m0.csv")
    assert len(band) == 40 * 40
    assert {"E", "E_first_order", "deviation"} <= set(band.columns)


@pytest.mark.integration
def test_transmission_flow(tmp_path):
    """测试 transmission 命令：两个谷的间距为 z·E′_J"""
    assert main(["transmission", "--out", str(tmp_path)]) == EXIT_OK
    dips = pd.read_csv(tmp_path / "transmission_dips.csv")
    meta = json.loads((tmp_path / "transmission_dips.meta.json").read_text(encoding="utf-8"))
    trace_meta = json.loads((tmp_path / "transmission_k0_phi1pi.meta.json").read_text(encoding="utf-8"))
    gamma = trace_meta["gamma"]
    assert trace_meta["weak_drive"]
    separation = dips["dip"].max() - dips["dip"].min()
    assert separation == pytest.approx(meta["dip_separation_expected"], abs=gamma / 10.0)
    np.testing.assert_allclose(dips["dip"], dips["expected"], atol=gamma / 10.0)

    trace = pd.read_csv(tmp_path / "transmission_k0_phi0pi.csv")
    assert trace["T"].min() < 0.5
    assert trace["T"].max() > 0.99
    assert (tmp_path / "transmission_k0_phi0pi.gp").exists()


@pytest.mark.integration
def test_bias_scan_flow(tmp_path):
    """测试 bias-scan 命令：偏置等价检查全部通过"""
    assert main(["bias-scan", "--grid", "8,8", "--out", str(tmp_path)]) == EXIT_OK
    checks = pd.read_csv(tmp_path / "bias_checks.csv")
    assert len(checks) == 10
    assert checks["passed"].all()
    scan = pd.read_csv(tmp_path / "bias_scan.csv")
    assert list(scan.columns) == ["n_x", "phi_x", "E"]
    assert len(scan) == 49


@pytest.mark.integration
@pytest.mark.slow
def test_thermal_rates_flow(tmp_path):
    """测试 thermal-rates 命令：二能级模型的积分拟合与闭式一致"""
    assert main(["thermal-rates", "--kT", "20", "--out", str(tmp_path)]) == EXIT_OK
    rates = pd.read_csv(tmp_path / "thermal_rates.csv")
    assert set(rates["transition"]) == {"1->0"}
    assert rates["validated"].all()
    assert (rates["down_rate"] > rates["up_rate"]).all()

    dephasing = pd.read_csv(tmp_path / "thermal_dephasing.csv").set_index("model")
    two_level = dephasing.loc["two_level"]
    assert two_level["fitted"] == pytest.approx(two_level["closed_form"], rel=1e-6)
    ground = dephasing.loc["ground_manifold"]
    assert ground["fitted"] == pytest.approx(ground["closed_form"], rel=1e-4)
