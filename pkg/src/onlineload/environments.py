"""
Load environments and baseline players for the experiment harness.

Every environment exposes ``loads(t, alpha)`` with 1-based ``t``.  Random
environments draw from numpy's Philox counter-based generator keyed by the
seed, so streams reproduce across platforms and numpy versions that keep
the Philox stream stable.
"""

from __future__ import annotations

import numpy as np

from .engine import Player
from .norms import as_vector, cstar_minimizer_inf


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


class IidUniform:
    def __init__(self, k: int, seed: int = 0):
        self.k = k
        self.rng = make_rng(seed)

    def loads(self, t: int, alpha=None) -> np.ndarray:
        return self.rng.random(self.k)


class Bernoulli:
    """Server i is fully loaded with probability rates[i], idle otherwise."""

    def __init__(self, rates, seed: int = 0):
        self.rates = as_vector(rates, "rates")
        if np.any(self.rates < 0) or np.any(self.rates > 1):
            raise ValueError("Bernoulli rates must lie in [0, 1]")
        self.k = self.rates.size
        self.rng = make_rng(seed)

    def loads(self, t: int, alpha=None) -> np.ndarray:
        return (self.rng.random(self.k) < self.rates).astype(float)


class RotatingSpike:
    """Load 1 on server floor((t-1)/period) mod K, 0 elsewhere."""

    def __init__(self, k: int, period: int = 1):
        if period < 1:
            raise ValueError("period must be at least 1")
        self.k = k
        self.period = period

    def loads(self, t: int, alpha=None) -> np.ndarray:
        l = np.zeros(self.k)
        l[((t - 1) // self.period) % self.k] = 1.0
        return l


class AdaptiveTargeted:
    """Loads only the server currently holding the largest share (lowest index on ties)."""

    def __init__(self, k: int):
        self.k = k

    def loads(self, t: int, alpha) -> np.ndarray:
        l = np.zeros(self.k)
        l[int(np.argmax(alpha))] = 1.0
        return l


class StaticUniform(Player):
    def __init__(self, k: int):
        self.k = k

    def act(self) -> np.ndarray:
        return np.full(self.k, 1.0 / self.k)

    def observe(self, load):
        return None


class StaticAllocation(Player):
    def __init__(self, alpha):
        self.alpha = as_vector(alpha, "alpha")
        self.k = self.alpha.size

    def act(self) -> np.ndarray:
        return self.alpha

    def observe(self, load):
        return None


class HindsightFollower(Player):
    """Follow the leader: the offline-optimal split of the loads seen so far."""

    def __init__(self, k: int, eps: float = 1e-9):
        self.k = k
        self.eps = eps
        self.cum_load = np.zeros(k)
        self.t = 0

    def act(self) -> np.ndarray:
        if self.t == 0:
            return np.full(self.k, 1.0 / self.k)
        return cstar_minimizer_inf(self.cum_load + self.eps)

    def observe(self, load):
        self.t += 1
        self.cum_load = self.cum_load + load
        return None
