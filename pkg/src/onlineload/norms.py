"""
Norms and offline optima for load balancing.

The base norm acts on per-server load vectors in R^K.  The offline optimum

    C*(l) = min_{alpha in simplex} ||alpha * l||

is available in closed form for L-infinity (makespan) and, experimentally,
for L_p with p > 1.  Payoff vectors of the approachability game live in
R^K x R^K and are measured by the combined norm ||x|| + ||y||, whose dual is
max(||w1||_*, ||w2||_*).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def as_vector(v, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size == 0:
        raise ValueError(f"{name} must have dimension K >= 1")
    return arr


def _same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def linf_norm(v) -> float:
    return float(np.max(np.abs(as_vector(v))))


def l1_norm(v) -> float:
    return float(np.sum(np.abs(as_vector(v))))


def lp_norm(v, p: float) -> float:
    if math.isinf(p):
        return linf_norm(v)
    return float(np.linalg.norm(as_vector(v), ord=p))


def cstar_inf(l) -> float:
    """Best achievable makespan 1 / sum_j(1/l_j) for the load vector ``l``.

    Any zero-load server absorbs all data at no cost, so the optimum is 0.
    """
    l = as_vector(l, "load")
    if np.any(l <= 0.0):
        return 0.0
    return float(1.0 / np.sum(1.0 / l))


def cstar_minimizer_inf(l) -> np.ndarray:
    """Allocation attaining :func:`cstar_inf`.

    Proportional to 1/l_i when every load is positive; otherwise uniform over
    the zero-load servers.
    """
    l = as_vector(l, "load")
    zero = l <= 0.0
    if np.any(zero):
        return zero / np.count_nonzero(zero)
    inv = 1.0 / l
    return inv / inv.sum()


def cstar_p(y, p: float) -> float:
    """Closed-form L_p offline optimum (experimental).

    Evaluated as (sum_i y_i^-q)^(-1/q) with q = p/(p-1), which is the
    overflow-safe form of prod(y) / (sum_i prod_{j != i} y_j^q)^(1/q).
    """
    if not p > 1.0:
        raise ValueError("p must exceed 1")
    y = as_vector(y, "load")
    if np.any(y <= 0.0):
        return 0.0
    if math.isinf(p):
        return cstar_inf(y)
    q = p / (p - 1.0)
    # factor out the smallest load so y_min^-q cannot overflow for large q
    ymin = float(y.min())
    s = np.sum((ymin / y) ** q)
    return float(ymin * s ** (-1.0 / q))


def cstar_p_product_form(y, p: float) -> float:
    """The literal product-form expression; used to cross-check :func:`cstar_p`."""
    y = as_vector(y, "load")
    q = p / (p - 1.0)
    total = 0.0
    for i in range(y.size):
        total += float(np.prod(np.delete(y, i) ** q))
    if total == 0.0:
        return 0.0
    return float(np.prod(y) / total ** ((p - 1.0) / p))


def cstar_minimizer_p(y, p: float) -> np.ndarray:
    y = as_vector(y, "load")
    zero = y <= 0.0
    if np.any(zero):
        return zero / np.count_nonzero(zero)
    if math.isinf(p):
        return cstar_minimizer_inf(y)
    q = p / (p - 1.0)
    a = (y.min() / y) ** q
    return a / a.sum()


@dataclass(frozen=True)
class NormFamily:
    """A monotone base norm with closed-form offline optimum.

    ``p = inf`` is the makespan family; finite ``p > 1`` is experimental.
    """

    p: float = math.inf

    def __post_init__(self) -> None:
        if not self.p > 1.0:
            raise ValueError("NormFamily requires p > 1")

    @classmethod
    def linf(cls) -> "NormFamily":
        return cls(math.inf)

    @property
    def is_linf(self) -> bool:
        return math.isinf(self.p)

    @property
    def dual_p(self) -> float:
        if self.is_linf:
            return 1.0
        return self.p / (self.p - 1.0)

    def norm(self, v) -> float:
        return lp_norm(v, self.p)

    def dual_norm(self, v) -> float:
        return lp_norm(v, self.dual_p)

    def cstar(self, l) -> float:
        return cstar_inf(l) if self.is_linf else cstar_p(l, self.p)

    def cstar_minimizer(self, l) -> np.ndarray:
        return cstar_minimizer_inf(l) if self.is_linf else cstar_minimizer_p(l, self.p)


LINF = NormFamily.linf()


def combined_norm(x, y, family: NormFamily = LINF) -> float:
    x, y = as_vector(x, "x"), as_vector(y, "y")
    _same_shape(x, y)
    return family.norm(x) + family.norm(y)


def dual_combined_norm(w1, w2, family: NormFamily = LINF) -> float:
    w1, w2 = as_vector(w1, "w1"), as_vector(w2, "w2")
    _same_shape(w1, w2)
    return max(family.dual_norm(w1), family.dual_norm(w2))
