"""Closed-form tail bounds and an empirical Monte Carlo verifier.

Bounds are returned raw (they may exceed 1); callers clamp for display.
That keeps each formula checkable against its definition.
"""

from __future__ import annotations

import math

from .errors import ConfigError
from .seeds import Domain, derive_key, generator

_CHUNK = 1 << 16


def markov(mean: float, t: float) -> float:
    """P(X >= t) <= mean / t for non-negative X."""
    if t <= 0:
        raise ConfigError(f"threshold t={t} must be positive")
    if mean < 0:
        raise ConfigError(f"mean={mean} must be non-negative")
    return mean / t


def chebyshev(var: float, t: float) -> float:
    """P(|X - mu| >= t) <= var / t^2."""
    if t <= 0:
        raise ConfigError(f"threshold t={t} must be positive")
    if var < 0:
        raise ConfigError(f"variance={var} must be non-negative")
    return var / (t * t)


def chernoff_mult(mu: float, delta: float) -> float:
    """P(X >= (1+delta) mu) <= exp(-delta^2 mu / (2 + delta)), delta > 0."""
    if delta <= 0:
        raise ConfigError(f"delta={delta} must be positive")
    if mu < 0:
        raise ConfigError(f"mu={mu} must be non-negative")
    return math.exp(-(delta * delta) * mu / (2.0 + delta))


def chernoff_poisson(mu: float, t: float) -> float:
    """P(X >= t) <= (e mu / t)^t for t >= mu, evaluated in log space.

    mu = 0 returns 0 for t > 0 (limit convention).
    """
    if t <= 0:
        raise ConfigError(f"t={t} must be positive")
    if mu < 0:
        raise ConfigError(f"mu={mu} must be non-negative")
    if t < mu:
        raise ConfigError(f"t={t} below mu={mu}")
    if mu == 0:
        return 0.0
    log_bound = t * (1.0 + math.log(mu) - math.log(t))
    # exp() overflows above ~709; the raw bound is astronomically large
    # there anyway, so saturate instead of raising
    if log_bound > 700.0:
        return math.inf
    return math.exp(log_bound)


def empirical_tail(n: int, p: float, threshold: float, trials: int, seed: int) -> float:
    """Fraction of Binomial(n, p) draws >= threshold over `trials` samples.

    Sampled in fixed-size chunks with per-chunk derived seeds, so the
    result is deterministic in (inputs, seed) and chunk-parallelisable.
    """
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"p={p} outside [0, 1]")
    hits = 0
    done = 0
    chunk_index = 0
    while done < trials:
        size = min(_CHUNK, trials - done)
        rng = generator(derive_key(seed, Domain.BOUNDS, chunk_index))
        samples = rng.binomial(n, p, size=size)
        hits += int((samples >= threshold).sum())
        done += size
        chunk_index += 1
    return hits / trials


def standard_error(p_hat: float, trials: int) -> float:
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / trials)
