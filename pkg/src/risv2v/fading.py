"""Fisher-Snedecor F per-element amplitude model and the Gaussian aggregate.

Each cascaded surface element contributes an amplitude eta ~ F(2*m1, 2*m2)
(m1: fading severity, m2: shadowing). The sum V of all N1*N2 element
amplitudes under ideal phase alignment is approximated by a Gaussian whose
moments follow from the per-element moments.
"""

import math
from dataclasses import dataclass

import numpy as np

from .numerics import q_function, sample_gamma


@dataclass(frozen=True)
class FadingParams:
    """Shape pair of the per-element amplitude distribution."""

    m1: float  # fading severity
    m2: float  # shadowing; must exceed 2 for a finite amplitude variance

    def __post_init__(self):
        if not (np.isfinite(self.m1) and self.m1 > 0.0):
            raise ValueError("fading.m1 must be finite and > 0, got %r" % (self.m1,))
        if not (np.isfinite(self.m2) and self.m2 > 2.0):
            raise ValueError(
                "fading.m2 must be finite and > 2 (amplitude variance is "
                "undefined otherwise), got %r" % (self.m2,))


@dataclass(frozen=True)
class AggregateStats:
    """Gaussian moments of the aggregate amplitude V = sum of element amplitudes."""

    mu_v: float
    sigma2_v: float
    second_moment: float  # E[V^2] = mu_v**2 + sigma2_v


def element_moments(p: FadingParams):
    """Closed-form (mean, variance) of one element amplitude.

    mean = m2 / (m2 - 1)
    variance = m2^2 (m1 + m2 - 1) / (m1 (m2 - 1)^2 (m2 - 2))
    """
    mean = p.m2 / (p.m2 - 1.0)
    var = (p.m2 ** 2 * (p.m1 + p.m2 - 1.0)
           / (p.m1 * (p.m2 - 1.0) ** 2 * (p.m2 - 2.0)))
    return mean, var


def sample_envelope(p: FadingParams, rng, size=None):
    """Draw element amplitudes eta ~ F(2*m1, 2*m2).

    Realized as eta = (m2 * G1) / (m1 * G2) with G1 ~ Gamma(m1, 1) and
    G2 ~ Gamma(m2, 1), which reproduces the closed-form element moments
    exactly. Always positive. Returns a float when size is None.
    """
    g1 = sample_gamma(p.m1, rng, size=size)
    g2 = sample_gamma(p.m2, rng, size=size)
    out = (p.m2 / p.m1) * g1 / g2
    return float(out) if size is None else out


def aggregate_stats(p: FadingParams, n1: int, n2: int) -> AggregateStats:
    """Moments of V = sum over n1*n2 independent element amplitudes."""
    if n1 < 1 or n2 < 1:
        raise ValueError("element counts must be >= 1, got n1=%r n2=%r" % (n1, n2))
    mean, var = element_moments(p)
    mu = n1 * n2 * mean
    s2 = n1 * n2 * var
    return AggregateStats(mu_v=mu, sigma2_v=s2, second_moment=mu * mu + s2)


def v_cdf(v, s: AggregateStats):
    """Gaussian CDF of the aggregate amplitude: P(V <= v).

    The standard deviation sqrt(sigma2_v) normalizes the argument; using the
    variance there would not produce a distribution function.
    """
    sd = math.sqrt(s.sigma2_v)
    z = (np.asarray(v, dtype=float) - s.mu_v) / sd
    out = 1.0 - q_function(z)
    return out


def v_pdf(v, s: AggregateStats):
    """Gaussian density of the aggregate amplitude."""
    sd = math.sqrt(s.sigma2_v)
    z = (np.asarray(v, dtype=float) - s.mu_v) / sd
    out = np.exp(-0.5 * z * z) / (sd * math.sqrt(2.0 * math.pi))
    return float(out) if np.ndim(v) == 0 else out


def mass_below_zero(s: AggregateStats) -> float:
    """Gaussian probability mass the aggregate model places on V < 0.

    The untruncated Gaussian is only a trustworthy stand-in for the
    positive-support aggregate when this is negligible (< 1e-6).
    """
    return float(v_cdf(0.0, s))
