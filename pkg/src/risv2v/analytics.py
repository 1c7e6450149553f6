"""Closed-form outage probabilities, ergodic-capacity upper bounds, and EE.

Outage uses the Gaussian aggregate model of V; capacity upper bounds come
from moving the expectation inside the concave log2 map (second moment of V
in place of V^2). Infeasible NOMA power splits return outage 1 exactly.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fading import AggregateStats, aggregate_stats, mass_below_zero, v_cdf
from .linkmodel import LinkBudget, SystemConfig, link_budget
from .numerics import db_to_linear, dbm_to_watts

CLT_MASS_TOL = 1e-6


@dataclass(frozen=True)
class Thresholds:
    """Linear SINR/SNR decoding thresholds."""

    gamma_sic: float      # cancellation step at receiver r
    gamma_r_noma: float   # own-signal SNR at receiver r
    gamma_t_noma: float   # SINR at receiver t
    gamma_oma: float      # per-user SNR in OMA

    def __post_init__(self):
        for name in ("gamma_sic", "gamma_r_noma", "gamma_t_noma", "gamma_oma"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0.0):
                raise ValueError("threshold %s must be finite and > 0, got %r"
                                 % (name, v))

    @classmethod
    def from_db(cls, sic_db=0.0, r_noma_db=0.0, t_noma_db=0.0, oma_db=0.0):
        return cls(db_to_linear(sic_db), db_to_linear(r_noma_db),
                   db_to_linear(t_noma_db), db_to_linear(oma_db))


@dataclass(frozen=True)
class OutageReport:
    p_out_t_noma: float
    p_out_r_noma: float
    p_out_r_oma: float
    p_out_t_oma: float
    feasible_t_noma: bool
    feasible_r_noma: bool


@dataclass(frozen=True)
class CapacityReport:
    ec_r_noma: float
    ec_t_noma: float
    ec_r_oma: float
    ec_t_oma: float
    ee_noma: float
    ee_oma: float


def _stats(cfg: SystemConfig) -> AggregateStats:
    return aggregate_stats(cfg.fading, cfg.surfaces.n1, cfg.surfaces.n2)


def _checked_stats(cfg: SystemConfig) -> AggregateStats:
    s = _stats(cfg)
    if mass_below_zero(s) >= CLT_MASS_TOL:
        warnings.warn(
            "Gaussian aggregate puts non-negligible mass on V < 0 "
            "(element count too small); closed-form outage is unreliable",
            stacklevel=3)
    return s


def outage_noma_t(cfg: SystemConfig, th: Thresholds) -> float:
    """Outage probability of the refraction receiver under NOMA.

    Returns exactly 1 when the power split cannot meet the SINR threshold
    even noise-free (p_t <= threshold * p_r).
    """
    pw = cfg.power
    if pw.p_t <= th.gamma_t_noma * pw.p_r:
        return 1.0
    s = _checked_stats(cfg)
    b = link_budget(cfg)
    v_th = math.sqrt(th.gamma_t_noma
                     / (b.gain_t * (pw.p_t - pw.p_r * th.gamma_t_noma)))
    return float(v_cdf(v_th, s))


def outage_noma_r(cfg: SystemConfig, th: Thresholds) -> float:
    """Outage probability of the reflection receiver under NOMA.

    Product of the cancellation-step and own-signal CDF factors. The
    cancellation amplitude threshold uses the feasible-branch denominator
    (p_t - p_r * threshold), which is positive exactly when the split is
    feasible. Both events depend on the same V, so the product form is an
    independence approximation; the simulator evaluates the exact joint
    event for comparison.
    """
    pw = cfg.power
    if pw.p_t <= th.gamma_sic * pw.p_r:
        return 1.0
    s = _checked_stats(cfg)
    b = link_budget(cfg)
    v_sic = math.sqrt(th.gamma_sic
                      / (b.gain_r * (pw.p_t - pw.p_r * th.gamma_sic)))
    v_r = math.sqrt(th.gamma_r_noma / (b.gain_r * pw.p_r))
    return float(v_cdf(v_sic, s) * v_cdf(v_r, s))


def outage_oma(cfg: SystemConfig, th: Thresholds, user: str) -> float:
    """Outage probability of receiver 'r' or 't' in its orthogonal slot."""
    s = _checked_stats(cfg)
    b = link_budget(cfg)
    gain = b.gain_r if user == "r" else b.gain_t if user == "t" else None
    if gain is None:
        raise ValueError("user must be 'r' or 't', got %r" % (user,))
    v_th = math.sqrt(th.gamma_oma / gain)
    return float(v_cdf(v_th, s))


def ec_upper_noma_r(cfg: SystemConfig) -> float:
    """Ergodic-capacity upper bound (bits/s/Hz) of the reflection receiver."""
    s = _stats(cfg)
    b = link_budget(cfg)
    return math.log2(1.0 + b.gain_r * cfg.power.p_r * s.second_moment)


def ec_upper_noma_t(cfg: SystemConfig) -> float:
    """Ergodic-capacity upper bound of the refraction receiver.

    Strictly below log2(1 + p_t/p_r) for any finite gain.
    """
    s = _stats(cfg)
    b = link_budget(cfg)
    a = b.gain_t * s.second_moment
    return math.log2(1.0 + a * cfg.power.p_t / (a * cfg.power.p_r + 1.0))


def ec_upper_oma(cfg: SystemConfig, user: str) -> float:
    """Ergodic-capacity upper bound of one OMA user, resource share applied."""
    s = _stats(cfg)
    b = link_budget(cfg)
    gain = b.gain_r if user == "r" else b.gain_t if user == "t" else None
    if gain is None:
        raise ValueError("user must be 'r' or 't', got %r" % (user,))
    return cfg.oma_resource_fraction * math.log2(1.0 + gain * s.second_moment)


def total_power_watts(cfg: SystemConfig) -> float:
    """Total consumed power: amplifier draw, per-element, receiver circuits."""
    pw = cfg.power
    return (dbm_to_watts(pw.p_total_dbm) / pw.alpha
            + cfg.surfaces.n1 * dbm_to_watts(pw.p_ris_element_dbm)
            + cfg.surfaces.n2 * dbm_to_watts(pw.p_star_element_dbm)
            + dbm_to_watts(pw.p_circuit_t_dbm)
            + dbm_to_watts(pw.p_circuit_r_dbm))


def energy_efficiency(cfg: SystemConfig, ec_t: float, ec_r: float) -> float:
    """Sum capacity divided by total consumed power (bits/s/Hz per watt)."""
    if ec_t < 0.0 or ec_r < 0.0:
        raise ValueError("capacities must be >= 0, got %r, %r" % (ec_t, ec_r))
    return (ec_t + ec_r) / total_power_watts(cfg)


def outage_report(cfg: SystemConfig, th: Thresholds) -> OutageReport:
    pw = cfg.power
    return OutageReport(
        p_out_t_noma=outage_noma_t(cfg, th),
        p_out_r_noma=outage_noma_r(cfg, th),
        p_out_r_oma=outage_oma(cfg, th, "r"),
        p_out_t_oma=outage_oma(cfg, th, "t"),
        feasible_t_noma=pw.p_t > th.gamma_t_noma * pw.p_r,
        feasible_r_noma=pw.p_t > th.gamma_sic * pw.p_r,
    )


def capacity_report(cfg: SystemConfig) -> CapacityReport:
    ec_rn = ec_upper_noma_r(cfg)
    ec_tn = ec_upper_noma_t(cfg)
    ec_ro = ec_upper_oma(cfg, "r")
    ec_to = ec_upper_oma(cfg, "t")
    return CapacityReport(
        ec_r_noma=ec_rn, ec_t_noma=ec_tn, ec_r_oma=ec_ro, ec_t_oma=ec_to,
        ee_noma=energy_efficiency(cfg, ec_tn, ec_rn),
        ee_oma=energy_efficiency(cfg, ec_to, ec_ro),
    )
