"""Empirical oracle: simulate the aggregate amplitude and estimate OP/EC/EE.

Trials are processed in fixed-size batches. Batch b draws from a
counter-based stream keyed by (seed, b), so the value of trial t depends
only on (seed, t) and never on the total trial count or on how batches are
distributed over workers. Cross-batch reductions run in batch order with
compensated summation, which makes every estimate bit-identical for any
worker count.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytics import Thresholds, total_power_watts
from .fading import sample_envelope
from .linkmodel import (SystemConfig, link_budget, sinr_sic, sinr_t_noma,
                        snr_oma, snr_r_noma)
from .numerics import random_stream

BATCH_TRIALS = 1024       # fixed; part of the reproducibility contract
_ELEMENT_CHUNK = 4096     # bounds per-batch working memory
_Z95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class MetricEstimate:
    """Point estimate with a 95% confidence interval."""

    value: float
    ci_low: float
    ci_high: float
    trials: int
    seed: int


def wilson_interval(successes: int, trials: int, z: float = _Z95):
    """Wilson 95% score interval for a binomial proportion.

    Always contains the point estimate (rounding clamped at the edges).
    """
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denom
    hw = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denom
    return min(p, max(0.0, center - hw)), max(p, min(1.0, center + hw))


def _batches(trials):
    out = []
    b = 0
    lo = 0
    while lo < trials:
        hi = min(lo + BATCH_TRIALS, trials)
        out.append((b, hi - lo))
        b += 1
        lo = hi
    return out


def _draw_v_batch(cfg: SystemConfig, seed, batch_index, count):
    """V draws for one batch: row-wise sums of per-element amplitudes.

    Always draws the full batch and slices, so the draw consumed by trial t
    depends only on (seed, t), never on the requested trial total.
    """
    n_elems = cfg.surfaces.n1 * cfg.surfaces.n2
    rng = random_stream(seed, batch_index)
    acc = np.zeros(BATCH_TRIALS)
    done = 0
    while done < n_elems:
        c = min(_ELEMENT_CHUNK, n_elems - done)
        acc += sample_envelope(cfg.fading, rng, size=(BATCH_TRIALS, c)).sum(axis=1)
        done += c
    return acc[:count]


def outage_events(v, cfg: SystemConfig, th: Thresholds, scheme: str, user: str,
                  budget=None):
    """Vectorized outage indicator on a set of V draws.

    The NOMA reflection-receiver event is the exact joint event on one draw:
    the cancellation step or the own-signal decoding fails (or both).
    """
    b = budget if budget is not None else link_budget(cfg)
    if scheme == "noma":
        if user == "t":
            return sinr_t_noma(v, cfg, b) <= th.gamma_t_noma
        if user == "r":
            return ((sinr_sic(v, cfg, b) <= th.gamma_sic)
                    | (snr_r_noma(v, cfg, b) <= th.gamma_r_noma))
    elif scheme == "oma" and user in ("r", "t"):
        return snr_oma(v, cfg, b, user) <= th.gamma_oma
    raise ValueError("unknown scheme/user %r/%r" % (scheme, user))


def capacity_values(v, cfg: SystemConfig, scheme: str, user: str, budget=None):
    """Per-draw instantaneous capacity log2(1 + SINR/SNR) on V draws."""
    b = budget if budget is not None else link_budget(cfg)
    if scheme == "noma":
        g = snr_r_noma(v, cfg, b) if user == "r" else sinr_t_noma(v, cfg, b)
        return np.log2(1.0 + g)
    if scheme == "oma" and user in ("r", "t"):
        return cfg.oma_resource_fraction * np.log2(1.0 + snr_oma(v, cfg, b, user))
    raise ValueError("unknown scheme/user %r/%r" % (scheme, user))


def _batch_partials(args):
    """Per-batch partial sums for every requested metric (picklable worker)."""
    cfg, th, seed, batch_index, count, requests = args
    v = _draw_v_batch(cfg, seed, batch_index, count)
    budget = link_budget(cfg)
    out = {}
    for req in requests:
        kind = req[0]
        if kind == "op":
            _, scheme, user = req
            ev = outage_events(v, cfg, th, scheme, user, budget)
            out[req] = int(np.count_nonzero(ev))
        elif kind == "ec":
            _, scheme, user = req
            c = capacity_values(v, cfg, scheme, user, budget)
            out[req] = (float(c.sum()), float(np.square(c).sum()))
        elif kind == "ee":
            _, scheme = req
            c = (capacity_values(v, cfg, scheme, "t", budget)
                 + capacity_values(v, cfg, scheme, "r", budget))
            out[req] = (float(c.sum()), float(np.square(c).sum()))
        else:
            raise ValueError("unknown request %r" % (req,))
    return batch_index, out


def _collect(cfg, th, trials, seed, workers, requests):
    if trials < 1:
        raise ValueError("trials must be >= 1, got %r" % (trials,))
    jobs = [(cfg, th, seed, b, count, requests) for b, count in _batches(trials)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_batch_partials, jobs,
                                  chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_batch_partials(j) for j in jobs]
    results.sort(key=lambda r: r[0])
    merged = {}
    for req in requests:
        parts = [r[1][req] for r in results]
        if req[0] == "op":
            merged[req] = sum(parts)
        else:
            merged[req] = (math.fsum(p[0] for p in parts),
                           math.fsum(p[1] for p in parts))
    return merged


def _mean_estimate(sum_x, sum_x2, trials, seed, scale=1.0):
    mean = sum_x / trials
    if trials > 1:
        var = max(0.0, (sum_x2 - trials * mean * mean) / (trials - 1))
        hw = _Z95 * math.sqrt(var / trials)
    else:
        hw = 0.0
    return MetricEstimate(value=scale * mean, ci_low=scale * (mean - hw),
                          ci_high=scale * (mean + hw), trials=trials, seed=seed)


def point_estimates(cfg: SystemConfig, th, trials, seed, workers=1,
                    schemes=("noma", "oma"), metrics=("op", "ec", "ee")):
    """All requested empirical metrics from a single simulation pass.

    Returns a dict keyed by ("op", scheme, user), ("ec", scheme, user) and
    ("ee", scheme). Identical to calling the individual empirical_* helpers
    with the same seed, since all of them consume the same per-batch draws.
    """
    if "op" in metrics and th is None:
        raise ValueError("thresholds are required for outage estimates")
    requests = []
    for scheme in schemes:
        for metric in metrics:
            if metric == "ee":
                requests.append(("ee", scheme))
            else:
                for user in ("r", "t"):
                    requests.append((metric, scheme, user))
    merged = _collect(cfg, th, trials, seed, workers, tuple(requests))
    out = {}
    for req, part in merged.items():
        if req[0] == "op":
            lo, hi = wilson_interval(part, trials)
            out[req] = MetricEstimate(value=part / trials, ci_low=lo, ci_high=hi,
                                      trials=trials, seed=seed)
        elif req[0] == "ec":
            out[req] = _mean_estimate(part[0], part[1], trials, seed)
        else:
            out[req] = _mean_estimate(part[0], part[1], trials, seed,
                                      scale=1.0 / total_power_watts(cfg))
    return out


def simulate_v(cfg: SystemConfig, trials, seed, workers=1):
    """Draw `trials` aggregate amplitudes V = sum of element amplitudes.

    The value at trial index t is a function of (seed, t) only: prefixes of
    longer runs coincide with shorter runs, and worker count is irrelevant.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1, got %r" % (trials,))
    jobs = [(cfg, seed, b, count) for b, count in _batches(trials)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_simulate_batch, jobs,
                                chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        parts = [_simulate_batch(j) for j in jobs]
    parts.sort(key=lambda r: r[0])
    return np.concatenate([p[1] for p in parts])


def _simulate_batch(args):
    cfg, seed, b, count = args
    return b, _draw_v_batch(cfg, seed, b, count)


def empirical_outage(cfg: SystemConfig, th: Thresholds, scheme: str, user: str,
                     trials, seed, workers=1) -> MetricEstimate:
    """Fraction of trials in outage, with a Wilson 95% interval."""
    req = ("op", scheme, user)
    count = _collect(cfg, th, trials, seed, workers, (req,))[req]
    lo, hi = wilson_interval(count, trials)
    return MetricEstimate(value=count / trials, ci_low=lo, ci_high=hi,
                          trials=trials, seed=seed)


def empirical_capacity(cfg: SystemConfig, scheme: str, user: str,
                       trials, seed, workers=1) -> MetricEstimate:
    """Sample-mean ergodic capacity with a normal-approximation interval."""
    req = ("ec", scheme, user)
    s, s2 = _collect(cfg, None, trials, seed, workers, (req,))[req]
    return _mean_estimate(s, s2, trials, seed)


def empirical_ee(cfg: SystemConfig, scheme: str, trials, seed,
                 workers=1) -> MetricEstimate:
    """Energy efficiency of the empirical sum capacity on one draw set."""
    req = ("ee", scheme)
    s, s2 = _collect(cfg, None, trials, seed, workers, (req,))[req]
    return _mean_estimate(s, s2, trials, seed, scale=1.0 / total_power_watts(cfg))
