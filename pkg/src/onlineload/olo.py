"""
Online linear optimization over the L1 unit ball.

``EGPlusMinus`` is exponentiated gradient with positive and negative weight
copies: it predicts w = w_plus - w_minus and multiplies each copy by
exp(-/+ eta*g) under a shared normalizer.  Weights live in the log domain,
so long runs with extreme costs never freeze a coordinate at exactly zero.

The functional forms (``eg_init`` / ``eg_predict`` / ``eg_update``) operate
on immutable ``EgState`` values; the learner classes wrap them with the
predict/update interface used by the reduction engine.

``PnormLearner`` is the experimental p-norm link-function update.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .norms import as_vector, lp_norm

log = logging.getLogger(__name__)


def default_eta(dim: int, horizon: int, cost_bound: float = 1.0) -> float:
    """Learning rate (1/M) * sqrt(2 ln(2d) / T) that balances the EG+- regret bound."""
    if dim < 1 or horizon < 1 or cost_bound <= 0:
        raise ValueError("dim, horizon and cost_bound must be positive")
    return math.sqrt(2.0 * math.log(2.0 * dim) / horizon) / cost_bound


def eg_regret_bound(dim: int, horizon: int, cost_bound: float = 1.0) -> float:
    """M * sqrt(2 T ln(2d))."""
    if horizon <= 0:
        return 0.0
    return cost_bound * math.sqrt(2.0 * horizon * math.log(2.0 * dim))


@dataclass(frozen=True)
class EgState:
    """EG+- weights stored as one log-weight vector [log w_plus, log w_minus]."""

    log_w: np.ndarray
    eta: float

    @property
    def dim(self) -> int:
        return self.log_w.size // 2

    @property
    def w_plus(self) -> np.ndarray:
        return np.exp(self.log_w[: self.dim])

    @property
    def w_minus(self) -> np.ndarray:
        return np.exp(self.log_w[self.dim:])


def eg_init(dim: int, eta: float) -> EgState:
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if not eta > 0:
        raise ValueError("eta must be positive")
    return EgState(np.full(2 * dim, -math.log(2.0 * dim)), float(eta))


def eg_predict(state: EgState) -> np.ndarray:
    w = np.exp(state.log_w)
    d = state.dim
    return w[:d] - w[d:]


def _check_cost(g, dim: int, bound: float = 1.0) -> np.ndarray:
    g = as_vector(g, "cost")
    if g.size != dim:
        raise ValueError(f"cost has dimension {g.size}, learner has {dim}")
    if not np.all(np.abs(g) <= bound + 1e-9):
        raise ValueError(f"cost outside [-{bound}, {bound}]: max |g| = {np.max(np.abs(g))!r}")
    return g


def eg_update(state: EgState, g) -> EgState:
    g = _check_cost(g, state.dim)
    log_w = state.log_w - state.eta * np.concatenate([g, -g])
    top = log_w.max()
    log_w = log_w - (top + math.log(np.exp(log_w - top).sum()))
    return EgState(log_w, state.eta)


class OnlineLinearLearner:
    """predict() -> decision vector; update(g) feeds the linear cost <g, .>."""

    dim: int

    def predict(self) -> np.ndarray:
        raise NotImplementedError

    def update(self, g) -> None:
        raise NotImplementedError


class EGPlusMinus(OnlineLinearLearner):
    def __init__(self, dim: int, eta: float):
        self.state = eg_init(dim, eta)
        self.dim = dim

    @classmethod
    def tuned(cls, dim: int, horizon: int, cost_bound: float = 1.0) -> "EGPlusMinus":
        return cls(dim, default_eta(dim, horizon, cost_bound))

    @property
    def eta(self) -> float:
        return self.state.eta

    def predict(self) -> np.ndarray:
        return eg_predict(self.state)

    def update(self, g) -> None:
        self.state = eg_update(self.state, g)


class RegretMeter:
    """Running regret of an L1-ball learner against the best fixed point in hindsight.

    The linear minimum over the L1 ball sits at a signed basis vertex, so the
    comparator loss is -||sum_t g_t||_inf.
    """

    def __init__(self, dim: int):
        self.loss = 0.0
        self.cum_cost = np.zeros(dim)

    def record(self, w: np.ndarray, g: np.ndarray) -> None:
        self.loss += float(w @ g)
        self.cum_cost += g

    @property
    def comparator_loss(self) -> float:
        return -float(np.max(np.abs(self.cum_cost)))

    @property
    def regret(self) -> float:
        return self.loss - self.comparator_loss


@dataclass(frozen=True)
class PnormState:
    """Experimental p-norm learner: theta holds the negated cumulative costs."""

    theta: np.ndarray
    p: float
    eta: float


def pnorm_init(dim: int, p: float, eta: float) -> PnormState:
    if not p >= 2.0:
        raise ValueError("p-norm learner needs p >= 2")
    return PnormState(np.zeros(dim), float(p), float(eta))


def pnorm_predict(state: PnormState) -> np.ndarray:
    """eta * sign(theta) |theta|^(p-1) / ||theta||_p^(p-2); no projection."""
    theta, p = state.theta, state.p
    norm = lp_norm(theta, p)
    if norm == 0.0:
        return np.zeros_like(theta)
    return state.eta * np.sign(theta) * np.abs(theta) ** (p - 1.0) / norm ** (p - 2.0)


def pnorm_update(state: PnormState, g) -> PnormState:
    g = as_vector(g, "cost")
    return PnormState(state.theta - g, state.p, state.eta)


class PnormLearner(OnlineLinearLearner):
    """Experimental.  Predictions leaving the unit ball of order ``ball_order``
    are rescaled onto it; each rescale is counted and logged."""

    def __init__(self, dim: int, p: float, eta: float, ball_order: float = 1.0):
        self.state = pnorm_init(dim, p, eta)
        self.dim = dim
        self.ball_order = ball_order
        self.clip_count = 0

    def predict(self) -> np.ndarray:
        w = pnorm_predict(self.state)
        size = lp_norm(w, self.ball_order)
        if size > 1.0:
            self.clip_count += 1
            log.debug("p-norm prediction rescaled from norm %.6g", size)
            w = w / size
        return w

    def update(self, g) -> None:
        self.state = pnorm_update(self.state, g)
