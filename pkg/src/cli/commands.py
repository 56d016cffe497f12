#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
命令实现
每个命令只做计算并返回 ResultTable 列表，写文件由导出器完成
"""

import math
from typing import Callable, Dict, List

import numpy as np
import pandas as pd

from src.cli.schemas import RunConfig
from src.core.circuit import BiasPoint, ZakPoint, impedance, renormalized_energies, wrap, zone_samples, K_PERIOD, PHI_PERIOD
from src.core.elementary import critical_points, elementary_grid
from src.core.lindblad import pure_state
from src.exporters import PlotSpec, ResultTable
from src.services.band_service import BandService, band_extrema, perturbative_comparison
from src.services.noise_service import (
    ThermalEnvironment,
    eigenoperator_rates,
    ground_excitation_rate,
    ground_manifold_dephasing,
    ground_manifold_model,
    rates_frame,
    simulate_coherence,
    two_level_dephasing,
    two_level_model,
    waveguide_pure_dephasing,
)
from src.services.spectroscopy_service import (
    REFERENCE_POINT,
    SpectroscopyService,
    WaveguideParams,
    bias_shift_check,
    locate_dip,
    localize_state,
    transition_frequency,
    transition_map,
)
from src.core.zak_oracle import ho_zak_wavefunction, zak_norm
from src.utils.exceptions import ConvergenceException
from src.utils.logger import Logger

logger = Logger.get_logger("dualmon.cli")

TWO_PI = 2.0 * math.pi
GROUND = ZakPoint(0.0, 0.0)

# 相干拟合窗口上限（单位 1/E_J）；低温下基态流形的退相干速率可小到无法在有限时间内观测
FIT_DURATION_CAP = 100.0


def _point_label(p: ZakPoint) -> str:
    """(0, π) → k0_phi1pi"""
    return f"k{p.k:g}_phi{p.phi / math.pi:g}pi".replace(".", "p").replace("-", "m")


# ==================== elementary ====================

def cmd_elementary(config: RunConfig) -> List[ResultTable]:
    """理想电路的能谱、梯度与相对基态的退相干速率网格"""
    params = config.params()
    frame = elementary_grid(params, config.noise.to_spec(), config.nk, config.nphi)
    meta = {"params": params.to_dict(), "noise": config.noise.model_dump(), "nk": config.nk, "nphi": config.nphi}
    critical = pd.DataFrame([
        {"k": cp.point.k, "phi": cp.point.phi, "kind": cp.kind.value, "codeword": cp.codeword or ""}
        for cp in critical_points()
    ])
    return [
        ResultTable("elementary_energy", frame[["k", "phi", "E"]], meta,
                    PlotSpec("surface", "k", "phi", "E", "E(k, phi)")),
        ResultTable("elementary_gradient", frame[["k", "phi", "dE_dk", "dE_dphi"]], meta),
        ResultTable("elementary_dephasing", frame[["k", "phi", "Gamma_vs_ground"]], meta,
                    PlotSpec("surface", "k", "phi", "Gamma_vs_ground", "Gamma vs ground")),
        ResultTable("elementary_critical_points", critical, meta),
    ]


# ==================== bands ====================

def cmd_bands(config: RunConfig) -> List[ResultTable]:
    """m = 0, 1 能带、一阶比较列与最大偏差汇总"""
    params = config.params()
    service = BandService(truncation=config.truncation, threads=config.threads)
    grids = service.band_grids(params, [0, 1], config.nk, config.nphi)

    tables, summary = [], []
    for m, grid in grids.items():
        if grid.convergence is not None and not grid.convergence.converged:
            raise ConvergenceException(f"截断 N={config.truncation}", grid.convergence.drift, grid.convergence.tol)
        frame = perturbative_comparison(grid)
        max_dev = float(np.nanmax(np.abs(frame["deviation"].to_numpy())))
        extrema = band_extrema(grid)
        meta = grid.metadata()
        meta["max_first_order_deviation"] = max_dev
        meta["minimum"] = [q.as_tuple() for q in extrema["minimum"]]
        meta["maximum"] = [q.as_tuple() for q in extrema["maximum"]]
        tables.append(ResultTable(f"bands_m{m}", frame, meta, PlotSpec("surface", "k", "phi", "E", f"band m={m}")))
        summary.append({"m": m, "max_deviation": max_dev, "failures": len(grid.failures)})
        logger.info(f"✅ 能带 m={m}: 与一阶结果最大偏差 {max_dev:.3e}")

    tables.append(ResultTable("bands_summary", pd.DataFrame(summary), {"params": params.to_dict()}))
    return tables


# ==================== transmission ====================

def cmd_transmission(config: RunConfig) -> List[ResultTable]:
    """(0, 0) 与 (0, π) 两个态的透射谱"""
    params = config.params()
    omega_d = transition_frequency(params, REFERENCE_POINT)
    wg = WaveguideParams(
        gamma=config.waveguide.gamma_ratio * omega_d,
        alpha=math.sqrt(config.waveguide.drive_power_ratio * params.E_J),
        omega_d=omega_d,
    )
    states = [GROUND, REFERENCE_POINT]
    offsets = [transition_frequency(params, p) - omega_d for p in states]
    step = config.waveguide.step * wg.gamma
    span = config.waveguide.span * wg.gamma
    detunings = np.arange(min(offsets) - span, max(offsets) + span + 0.5 * step, step)

    service = SpectroscopyService(threads=config.threads)
    tables, dips = [], []
    for p in states:
        trace = service.transmission_trace(params, wg, p, detunings)
        dip = locate_dip(trace)
        meta = trace.metadata()
        meta.update({"gamma": wg.gamma, "alpha": wg.alpha, "omega_d": wg.omega_d, "dip": dip})
        tables.append(ResultTable(f"transmission_{_point_label(p)}", trace.to_frame(), meta,
                                  PlotSpec("line", "detuning", "T", title=f"T, state {_point_label(p)}")))
        dips.append({"k": p.k, "phi": p.phi, "dip": dip, "expected": trace.state_offset})

    z = impedance(params)
    _, e_j = renormalized_energies(params, 0)
    meta = {"params": params.to_dict(), "dip_separation_expected": z * e_j}
    tables.append(ResultTable("transmission_dips", pd.DataFrame(dips), meta))
    return tables


# ==================== transition-map ====================

def cmd_transition_map(config: RunConfig) -> List[ResultTable]:
    """Ω⁽¹⁰⁾ 网格与各临界值的能级集定位"""
    params = config.params()
    tmap = transition_map(params, config.nk, config.nphi)
    spread = float(np.max(tmap.omega) - np.min(tmap.omega))
    delta = spread / max(config.nk, config.nphi)

    rows = []
    for cp in critical_points():
        target = transition_frequency(params, cp.point)
        region = localize_state(params, target, delta, config.nk, config.nphi)
        rows.append({
            "k": cp.point.k, "phi": cp.point.phi, "kind": cp.kind.value, "omega10": target,
            "cells": region.cell_count, "flat_components": region.flat_components,
            "periodic_components": region.periodic_components,
        })
    meta = {
        "params": params.to_dict(),
        "maximum": [q.as_tuple() for q in tmap.extremum_points("max")],
        "minimum": [q.as_tuple() for q in tmap.extremum_points("min")],
        "delta": delta,
    }
    return [
        ResultTable("transition_map", tmap.to_frame(), meta,
                    PlotSpec("surface", "k", "phi", "omega10", "Omega10(k, phi)")),
        ResultTable("transition_levels", pd.DataFrame(rows), meta),
    ]


# ==================== zak-wavefunction ====================

def cmd_zak_wavefunction(config: RunConfig) -> List[ResultTable]:
    """振子基态在 Zak 基中的波函数（每个 z 一张表）"""
    k = zone_samples(config.nk, K_PERIOD)
    phi = zone_samples(config.nphi, PHI_PERIOD)
    kk, pp = np.meshgrid(k, phi, indexing="ij")
    tables = []
    for z in config.z_values:
        psi = np.asarray(ho_zak_wavefunction(z, (kk, pp)))
        frame = pd.DataFrame({
            "k": kk.ravel(), "phi": pp.ravel(),
            "re": psi.real.ravel(), "im": psi.imag.ravel(), "abs": np.abs(psi).ravel(),
        })
        label = f"{z / math.pi:g}pi".replace(".", "p")
        meta = {"z": z, "norm": zak_norm(z)}
        tables.append(ResultTable(f"zak_z_{label}", frame, meta,
                                  PlotSpec("surface", "k", "phi", "abs", f"|psi|, z={z:.4g}")))
    return tables


# ==================== bias-scan ====================

def cmd_bias_scan(config: RunConfig) -> List[ResultTable]:
    """固定 (0, 0) 在偏置网格上扫描基态能量，并抽查偏置等价"""
    params = config.params()
    service = SpectroscopyService(threads=config.threads)
    frame = service.bias_scan(params, GROUND, config.nk, config.nphi, truncation=config.truncation)

    rng = np.random.default_rng(0)
    checks = []
    for _ in range(10):
        p = wrap(float(rng.uniform(-0.5, 0.5)), float(rng.uniform(-math.pi, math.pi)))
        b = BiasPoint(float(rng.uniform(-0.5, 0.5)), float(rng.uniform(-math.pi, math.pi)))
        result = bias_shift_check(params, p, b, truncation=config.truncation)
        checks.append({"k": p.k, "phi": p.phi, "n_x": b.n_x, "phi_x": b.phi_x,
                       "deviation": result.deviation, "passed": result.passed})
    meta = {"params": params.to_dict(), "truncation": config.truncation,
            "all_passed": all(c["passed"] for c in checks)}
    if not meta["all_passed"]:
        logger.warning("⚠️  偏置等价检查未全部通过")
    return [
        ResultTable("bias_scan", frame, meta, PlotSpec("surface", "n_x", "phi_x", "E", "E0 vs bias")),
        ResultTable("bias_checks", pd.DataFrame(checks), meta),
    ]


# ==================== thermal-rates ====================

def _fit_window(closed: float, frequency: float) -> tuple:
    """积分时长取约三个衰减时间（不超过上限），采样保证相邻点相位差小于 π/2"""
    duration = min(3.0 / closed, FIT_DURATION_CAP) if closed > 0 else FIT_DURATION_CAP
    samples = max(41, int(2.0 * duration * abs(frequency) / math.pi) + 2)
    return duration, samples


def cmd_thermal_rates(config: RunConfig) -> List[ResultTable]:
    """临界态的热跃迁速率表与两种退相干模型的积分校验"""
    params = config.params()
    env = ThermalEnvironment(nu=config.thermal.nu, kT=config.thermal.kT)
    states = [cp.point for cp in critical_points()[:2]]

    frames, ups, downs, omegas = [], [], [], []
    for p in states:
        rates = eigenoperator_rates(params, env, p, config.thermal.bands, config.truncation)
        frame = rates_frame(rates)
        frame.insert(0, "phi", p.phi)
        frame.insert(0, "k", p.k)
        frames.append(frame)
        ups.append(ground_excitation_rate(rates))
        # 最低跃迁 1 → 0 给出二能级模型的 ω 与 γ₋
        lowest = next(r for r in rates if r.upper == 1 and r.lower == 0)
        downs.append(lowest.down_rate * lowest.matrix_element_sq)
        omegas.append(lowest.frequency)
    rate_table = pd.concat(frames, ignore_index=True)

    rows = []

    # 二能级模型：相干 ρ_ge
    closed = two_level_dephasing(downs[0], ups[0])
    duration, samples = _fit_window(closed, omegas[0])
    fit = simulate_coherence(two_level_model(omegas[0], downs[0], ups[0]),
                             pure_state([1.0, 1.0]), 0, 1, duration, samples)
    rows.append({"model": "two_level", "closed_form": closed, "fitted": fit.rate, "fit_residual": fit.residual})

    # 基态流形模型：相干 ρ_{g1 g2}
    closed = ground_manifold_dephasing(ups[0], ups[1])
    duration, samples = _fit_window(closed, 0.5 * (omegas[0] - omegas[1]))
    model = ground_manifold_model(omegas[0], omegas[1], (ups[0], ups[1]), (downs[0], downs[1]))
    fit = simulate_coherence(model, pure_state([1.0, 0.0, 1.0, 0.0]), 0, 2, duration, samples)
    rows.append({"model": "ground_manifold", "closed_form": closed, "fitted": fit.rate, "fit_residual": fit.residual})

    waveguide = waveguide_pure_dephasing(params, env, None, states[0].k, states[1].k)
    meta = {"params": params.to_dict(), "nu": env.nu, "kT": env.kT, "waveguide_dephasing_critical": waveguide}
    return [
        ResultTable("thermal_rates", rate_table, meta),
        ResultTable("thermal_dephasing", pd.DataFrame(rows), meta),
    ]


COMMANDS: Dict[str, Callable[[RunConfig], List[ResultTable]]] = {
    "elementary": cmd_elementary,
    "bands": cmd_bands,
    "transmission": cmd_transmission,
    "transition-map": cmd_transition_map,
    "zak-wavefunction": cmd_zak_wavefunction,
    "bias-scan": cmd_bias_scan,
    "thermal-rates": cmd_thermal_rates,
}
