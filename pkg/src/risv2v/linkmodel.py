"""Scenario configuration, path loss, effective link gains, and SINR/SNR maps.

All public configuration is in dB/dBm/meters; everything downstream of
link_budget works in linear scale. Under ideal phase alignment the whole
cascaded channel collapses to the scalar aggregate amplitude V, so every
instantaneous SINR/SNR is a function of V alone.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fading import FadingParams
from .numerics import db_to_linear, dbm_to_watts


@dataclass(frozen=True)
class Geometry:
    """Link distances in meters and the surface-to-surface path-loss exponent.

    d_loss_db, when set, forces the line-of-sight loss factor to a fixed dB
    value for both receivers instead of deriving it from the hop distances.
    """

    d_tx_ris_m: float       # transmitter vehicle -> RIS
    d_ris_star_m: float     # RIS -> STAR surface (the faded hop)
    d_star_to_r_m: float    # STAR surface -> reflection-zone receiver
    d_star_to_t_m: float    # STAR surface -> refraction-zone receiver
    kappa: float            # path-loss exponent of the faded hop, > 2
    d_loss_db: Optional[float] = None

    def __post_init__(self):
        for name in ("d_tx_ris_m", "d_ris_star_m", "d_star_to_r_m", "d_star_to_t_m"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0.0):
                raise ValueError("geometry.%s must be finite and > 0, got %r" % (name, v))
        if not (np.isfinite(self.kappa) and self.kappa > 2.0):
            raise ValueError("geometry.kappa must be > 2, got %r" % (self.kappa,))
        if self.d_loss_db is not None and not np.isfinite(self.d_loss_db):
            raise ValueError("geometry.d_loss_db must be finite when set, got %r"
                             % (self.d_loss_db,))


@dataclass(frozen=True)
class SurfaceConfig:
    """Element counts and energy-splitting amplitude coefficients."""

    n1: int          # RIS elements
    n2: int          # STAR surface elements
    beta_r: float    # reflection amplitude coefficient, (0, 1]
    beta_t: float    # refraction amplitude coefficient, (0, 1]

    def __post_init__(self):
        for name in ("n1", "n2"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                raise ValueError("surfaces.%s must be an integer >= 1, got %r" % (name, v))
        for name in ("beta_r", "beta_t"):
            v = getattr(self, name)
            if not (np.isfinite(v) and 0.0 < v <= 1.0):
                raise ValueError("surfaces.%s must be in (0, 1], got %r" % (name, v))
        # energy split cannot exceed the incident energy; small float slack
        # so that e.g. 0.8**2 + 0.6**2 passes
        if self.beta_r ** 2 + self.beta_t ** 2 > 1.0 + 1e-9:
            raise ValueError(
                "surfaces.beta_r^2 + surfaces.beta_t^2 must not exceed 1, got %r"
                % (self.beta_r ** 2 + self.beta_t ** 2,))


@dataclass(frozen=True)
class PowerConfig:
    """Transmit/noise powers, NOMA power split, and consumption terms.

    gamma_bar_db, when set, overrides the transmit SNR directly instead of
    deriving it from p_total_dbm and noise_dbm (used by average-SNR sweeps).
    """

    p_total_dbm: float
    p_r: float
    p_t: float
    noise_dbm: float
    alpha: float                 # amplifier drain efficiency
    p_ris_element_dbm: float
    p_star_element_dbm: float
    p_circuit_t_dbm: float
    p_circuit_r_dbm: float
    gamma_bar_db: Optional[float] = None

    def __post_init__(self):
        for name in ("p_total_dbm", "noise_dbm", "p_ris_element_dbm",
                     "p_star_element_dbm", "p_circuit_t_dbm", "p_circuit_r_dbm"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValueError("power.%s must be finite, got %r" % (name, v))
        for name in ("p_r", "p_t"):
            v = getattr(self, name)
            if not (np.isfinite(v) and 0.0 < v < 1.0):
                raise ValueError("power.%s must be in (0, 1), got %r" % (name, v))
        if abs(self.p_r + self.p_t - 1.0) > 1e-9:
            raise ValueError("power.p_r + power.p_t must equal 1, got %r"
                             % (self.p_r + self.p_t,))
        if not (np.isfinite(self.alpha) and self.alpha > 0.0):
            raise ValueError("power.alpha must be > 0, got %r" % (self.alpha,))
        if self.gamma_bar_db is not None and not np.isfinite(self.gamma_bar_db):
            raise ValueError("power.gamma_bar_db must be finite when set, got %r"
                             % (self.gamma_bar_db,))
        if self.p_r >= self.p_t:
            warnings.warn(
                "power.p_r >= power.p_t: the refraction-zone receiver is "
                "expected to get the larger power share; decoding order "
                "assumptions may not hold", stacklevel=2)


@dataclass(frozen=True)
class SystemConfig:
    """Full scenario: geometry, surfaces, powers, fading, multiple access."""

    geometry: Geometry
    surfaces: SurfaceConfig
    power: PowerConfig
    fading: FadingParams
    oma_resource_fraction: float = 0.5

    def __post_init__(self):
        f = self.oma_resource_fraction
        if not (np.isfinite(f) and 0.0 < f <= 1.0):
            raise ValueError("oma_resource_fraction must be in (0, 1], got %r" % (f,))


@dataclass(frozen=True)
class LinkBudget:
    """Linear-scale transmit SNR, LoS loss factors, and effective gains.

    gain_r / gain_t exclude the NOMA power-allocation factors; the SINR/SNR
    maps apply those per user.
    """

    gamma_bar: float
    d_loss_r: float
    d_loss_t: float
    gain_r: float
    gain_t: float


def path_loss_los(d_m):
    """Linear line-of-sight path-loss factor for a link of d meters.

    Loss in dB is -37.5 - 22*log10(d / 1 m) (3 GHz carrier model).
    """
    if not (np.isfinite(d_m) and d_m > 0.0):
        raise ValueError("distance must be finite and > 0 m, got %r" % (d_m,))
    return 10.0 ** ((-37.5 - 22.0 * math.log10(d_m)) / 10.0)


def link_budget(cfg: SystemConfig) -> LinkBudget:
    """Derive the linear link budget from a validated configuration.

    The deterministic LoS segments (transmitter->RIS and STAR->receiver) are
    combined with a single application of the LoS law to the product of the
    two hop distances, which is the cascaded-surface form of the model: one
    fixed intercept, distance terms accumulating per hop. The faded
    RIS->STAR hop contributes d_ris_star^-kappa separately.
    geometry.d_loss_db forces both LoS factors to a fixed value instead.
    """
    g = cfg.geometry
    pw = cfg.power
    if pw.gamma_bar_db is not None:
        gamma_bar = db_to_linear(pw.gamma_bar_db)
    else:
        gamma_bar = dbm_to_watts(pw.p_total_dbm) / dbm_to_watts(pw.noise_dbm)
    if g.d_loss_db is not None:
        d_loss_r = d_loss_t = db_to_linear(g.d_loss_db)
    else:
        d_loss_r = path_loss_los(g.d_tx_ris_m * g.d_star_to_r_m)
        d_loss_t = path_loss_los(g.d_tx_ris_m * g.d_star_to_t_m)
    hop = g.d_ris_star_m ** (-g.kappa)
    return LinkBudget(
        gamma_bar=gamma_bar,
        d_loss_r=d_loss_r,
        d_loss_t=d_loss_t,
        gain_r=gamma_bar * cfg.surfaces.beta_r ** 2 * d_loss_r * hop,
        gain_t=gamma_bar * cfg.surfaces.beta_t ** 2 * d_loss_t * hop,
    )


def sinr_sic(v, cfg: SystemConfig, budget: LinkBudget):
    """SINR of the interference-cancellation step at the reflection receiver.

    Strictly increasing in v and bounded above by p_t / p_r.
    """
    s = budget.gain_r * np.square(v)
    return s * cfg.power.p_t / (s * cfg.power.p_r + 1.0)


def snr_r_noma(v, cfg: SystemConfig, budget: LinkBudget):
    """Post-cancellation SNR of the reflection receiver under NOMA."""
    return budget.gain_r * cfg.power.p_r * np.square(v)


def sinr_t_noma(v, cfg: SystemConfig, budget: LinkBudget):
    """SINR of the refraction receiver under NOMA (other user as interference)."""
    s = budget.gain_t * np.square(v)
    return s * cfg.power.p_t / (s * cfg.power.p_r + 1.0)


def snr_oma(v, cfg: SystemConfig, budget: LinkBudget, user: str):
    """SNR of receiver 'r' or 't' in its orthogonal slot (full power)."""
    gain = _user_gain(budget, user)
    return gain * np.square(v)


def _user_gain(budget: LinkBudget, user: str) -> float:
    if user == "r":
        return budget.gain_r
    if user == "t":
        return budget.gain_t
    raise ValueError("user must be 'r' or 't', got %r" % (user,))
