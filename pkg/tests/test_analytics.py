import dataclasses
import math

import numpy as np
import pytest

from risv2v.analytics import (Thresholds, capacity_report, ec_upper_noma_r,
                              ec_upper_noma_t, ec_upper_oma, energy_efficiency,
                              outage_noma_r, outage_noma_t, outage_oma,
                              outage_report, total_power_watts)
from risv2v.cli import default_config
from risv2v.fading import aggregate_stats
from risv2v.linkmodel import link_budget


def _with_power(cfg, p_dbm):
    return dataclasses.replace(
        cfg, power=dataclasses.replace(cfg.power, p_total_dbm=float(p_dbm)))


def _with_elements(cfg, n):
    return dataclasses.replace(
        cfg, surfaces=dataclasses.replace(cfg.surfaces, n1=n, n2=n))


def test_thresholds_validation():
    th = Thresholds.from_db(0, 0, 0, 0)
    assert th.gamma_sic == th.gamma_oma == 1.0
    with pytest.raises(ValueError):
        Thresholds(1.0, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        Thresholds(1.0, 1.0, -2.0, 1.0)


def test_infeasible_split_gives_certain_outage():
    cfg = default_config()  # p_t = 0.6, p_r = 0.4
    th = Thresholds(gamma_sic=1.0, gamma_r_noma=1.0, gamma_t_noma=1.5, gamma_oma=1.0)
    assert outage_noma_t(cfg, th) == 1.0  # boundary p_t = 1.5 * p_r
    th2 = Thresholds(gamma_sic=1.5, gamma_r_noma=1.0, gamma_t_noma=1.0, gamma_oma=1.0)
    assert outage_noma_r(cfg, th2) == 1.0
    th3 = Thresholds(gamma_sic=5.0, gamma_r_noma=1.0, gamma_t_noma=5.0, gamma_oma=1.0)
    assert outage_noma_t(cfg, th3) == 1.0
    assert outage_noma_r(cfg, th3) == 1.0
    rep = outage_report(cfg, th3)
    assert not rep.feasible_t_noma and not rep.feasible_r_noma


def _threshold_hitting_mean(cfg, kind):
    """Linear threshold placing the amplitude threshold exactly at mu_V."""
    b = link_budget(cfg)
    s = aggregate_stats(cfg.fading, cfg.surfaces.n1, cfg.surfaces.n2)
    pw = cfg.power
    if kind == "t_noma":
        # solve mu^2 = th / (gain_t (p_t - p_r th))
        return pw.p_t * b.gain_t * s.mu_v ** 2 / (1.0 + pw.p_r * b.gain_t * s.mu_v ** 2)
    if kind == "oma_r":
        return b.gain_r * s.mu_v ** 2
    raise AssertionError(kind)


def test_outage_median_points():
    cfg = default_config()
    th_t = _threshold_hitting_mean(cfg, "t_noma")
    th = Thresholds(1.0, 1.0, th_t, 1.0)
    assert outage_noma_t(cfg, th) == pytest.approx(0.5, abs=1e-9)
    th_o = _threshold_hitting_mean(cfg, "oma_r")
    th = Thresholds(1.0, 1.0, 1.0, th_o)
    assert outage_oma(cfg, th, "r") == pytest.approx(0.5, abs=1e-9)


def test_outage_noma_r_product_of_medians():
    # choose thresholds so both amplitude thresholds sit at mu_V -> 0.25
    cfg = default_config()
    b = link_budget(cfg)
    s = aggregate_stats(cfg.fading, cfg.surfaces.n1, cfg.surfaces.n2)
    pw = cfg.power
    g_sic = pw.p_t * b.gain_r * s.mu_v ** 2 / (1.0 + pw.p_r * b.gain_r * s.mu_v ** 2)
    g_r = pw.p_r * b.gain_r * s.mu_v ** 2
    th = Thresholds(g_sic, g_r, 1.0, 1.0)
    assert outage_noma_r(cfg, th) == pytest.approx(0.25, abs=1e-9)


def test_outage_noma_r_uses_feasible_branch_denominator():
    # at a 0 dB cancellation threshold the printed-denominator variant
    # (p_r - p_t * th) would be negative; the feasible branch must be used
    cfg = default_config()
    th = Thresholds.from_db()
    assert cfg.power.p_r - cfg.power.p_t * th.gamma_sic < 0.0
    p = outage_noma_r(cfg, th)
    assert 0.0 <= p <= 1.0 and not math.isnan(p)


def test_outage_oma_vanishing_threshold():
    cfg = default_config()
    th = Thresholds(1.0, 1.0, 1.0, 1e-12)
    assert outage_oma(cfg, th, "r") < 1e-6
    assert outage_oma(cfg, th, "t") < 1e-6


def test_outage_warns_when_gaussian_mass_leaks():
    cfg = _with_elements(default_config(), 2)
    with pytest.warns(UserWarning):
        outage_oma(cfg, Thresholds.from_db(), "r")


def test_ec_upper_noma_r_small_aggregate():
    # unit r-prefactor, 2x2 elements: E[V^2] = 63, p_r 0.4 -> log2(26.2)
    cfg = default_config()
    cfg = dataclasses.replace(
        cfg,
        geometry=dataclasses.replace(
            cfg.geometry, d_ris_star_m=1.0,
            d_loss_db=-10 * np.log10(cfg.surfaces.beta_r ** 2)),
        power=dataclasses.replace(cfg.power, p_total_dbm=cfg.power.noise_dbm),
        surfaces=dataclasses.replace(cfg.surfaces, n1=2, n2=2))
    assert link_budget(cfg).gain_r == pytest.approx(1.0, rel=1e-12)
    assert ec_upper_noma_r(cfg) == pytest.approx(math.log2(1 + 25.2), rel=1e-12)
    assert math.log2(1 + 25.2) == pytest.approx(4.711495, abs=1e-6)
    one = dataclasses.replace(cfg, surfaces=dataclasses.replace(cfg.surfaces, n1=1, n2=1))
    assert ec_upper_noma_r(one) == pytest.approx(math.log2(1 + 0.4 * 9.0), rel=1e-12)


def test_ec_upper_noma_t_saturates_strictly_below_limit():
    cfg = default_config()
    limit = math.log2(1 + cfg.power.p_t / cfg.power.p_r)
    assert limit == pytest.approx(math.log2(2.5), rel=1e-15)
    prev = 0.0
    for n in (10, 50, 200, 800):
        val = ec_upper_noma_t(_with_elements(cfg, n))
        assert prev < val < limit
        prev = val
    assert prev == pytest.approx(limit, rel=1e-4)  # approaches the limit


def test_ec_upper_oma_fraction_and_limits():
    cfg = default_config()
    full = dataclasses.replace(cfg, oma_resource_fraction=1.0)
    assert ec_upper_oma(full, "r") == pytest.approx(2 * ec_upper_oma(cfg, "r"),
                                                    rel=1e-12)
    tiny_beta = dataclasses.replace(
        cfg, surfaces=dataclasses.replace(cfg.surfaces, beta_t=1e-6))
    assert ec_upper_oma(tiny_beta, "t") < 1e-4


def test_energy_efficiency_denominator_and_linearity():
    cfg = default_config()
    assert total_power_watts(cfg) == pytest.approx(1 / 1.2 + 100 * 0.01 + 2 * 0.01,
                                                   rel=1e-9)
    assert energy_efficiency(cfg, 0.0, 0.0) == 0.0
    assert energy_efficiency(cfg, 2.0, 4.0) == pytest.approx(
        2 * energy_efficiency(cfg, 1.0, 2.0), rel=1e-12)
    with pytest.raises(ValueError):
        energy_efficiency(cfg, -1.0, 0.0)


def test_outage_monotone_in_power_and_elements():
    cfg = default_config()
    th = Thresholds.from_db()
    for n in (30, 50):
        cfg_n = _with_elements(cfg, n)
        ops = []
        for p in np.arange(-10.0, 40.1, 2.0):
            rep = outage_report(_with_power(cfg_n, p), th)
            ops.append((rep.p_out_t_noma, rep.p_out_r_noma,
                        rep.p_out_r_oma, rep.p_out_t_oma))
        arr = np.array(ops)
        assert np.all(np.diff(arr, axis=0) <= 1e-12)
    for p in (0.0, 10.0, 20.0):
        by_n = [outage_report(_with_power(_with_elements(cfg, n), p), th)
                for n in (10, 20, 40, 80)]
        for field in ("p_out_t_noma", "p_out_r_noma", "p_out_r_oma", "p_out_t_oma"):
            vals = [getattr(r, field) for r in by_n]
            assert np.all(np.diff(vals) <= 1e-12)


def test_ee_vanishes_at_huge_power():
    cfg = default_config()
    rep_small = capacity_report(_with_power(cfg, 10.0))
    rep_huge = capacity_report(_with_power(cfg, 80.0))
    assert rep_huge.ee_noma < rep_small.ee_noma
    assert rep_huge.ee_noma < 1e-2


def test_capacity_report_consistency():
    cfg = default_config()
    rep = capacity_report(cfg)
    assert rep.ee_noma == pytest.approx(
        (rep.ec_r_noma + rep.ec_t_noma) / total_power_watts(cfg), rel=1e-12)
    assert rep.ee_oma == pytest.approx(
        (rep.ec_r_oma + rep.ec_t_oma) / total_power_watts(cfg), rel=1e-12)
    assert rep.ec_t_noma < math.log2(1 + cfg.power.p_t / cfg.power.p_r)
