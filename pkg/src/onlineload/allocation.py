"""
Allocation step of the reduction.

Given a direction w = (w1, w2), the player picks

    alpha = argmin_{alpha in simplex} max_{l in [0,1]^K} <w1, alpha*l> + <w2, l>
          = argmin_{alpha in simplex} sum_i max(0, w1_i*alpha_i + w2_i).

The inner maximum is attained coordinate-wise (l_i = 1 exactly when the
i-th term is positive), so the outer problem is a separable convex
piecewise-linear minimization over the simplex.  It is solved exactly by
water-filling over the marginal slopes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .norms import as_vector


@dataclass(frozen=True)
class DualWeight:
    """Direction vector (w1, w2) in R^K x R^K."""

    w1: np.ndarray
    w2: np.ndarray

    def __post_init__(self) -> None:
        w1 = as_vector(self.w1, "w1")
        w2 = as_vector(self.w2, "w2")
        if w1.shape != w2.shape:
            raise ValueError(f"w1 and w2 differ in dimension: {w1.shape} vs {w2.shape}")
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)

    @classmethod
    def from_flat(cls, w) -> "DualWeight":
        w = as_vector(w, "w")
        if w.size % 2:
            raise ValueError("flat dual weight must have even length 2K")
        k = w.size // 2
        return cls(w[:k], w[k:])

    @property
    def k(self) -> int:
        return self.w1.size

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate([self.w1, self.w2])

    def dual_norm(self) -> float:
        """max(||w1||_1, ||w2||_1), the dual of the combined L-infinity norm."""
        return max(float(np.abs(self.w1).sum()), float(np.abs(self.w2).sum()))

    def check(self, tol: float = 1e-9) -> None:
        if self.dual_norm() > 1.0 + tol:
            raise ValueError(f"dual weight outside the unit dual ball: {self.dual_norm()!r}")

    def scaled(self, c: float) -> "DualWeight":
        return DualWeight(c * self.w1, c * self.w2)


@dataclass(frozen=True)
class AllocationResult:
    alpha: np.ndarray
    value: float


def game_value(w: DualWeight, alpha) -> float:
    """max over loads of <w, (alpha*l, l)>, i.e. sum_i max(0, w1_i alpha_i + w2_i)."""
    alpha = as_vector(alpha, "alpha")
    return float(np.maximum(0.0, w.w1 * alpha + w.w2).sum())


def worst_case_load(w: DualWeight, alpha) -> np.ndarray:
    alpha = as_vector(alpha, "alpha")
    return (w.w1 * alpha + w.w2 > 0.0).astype(float)


def _segments(w1: np.ndarray, w2: np.ndarray):
    """Two linear pieces (slope, length, server, rank) per term on alpha_i in [0, 1].

    The first piece runs up to the kink where w1_i*alpha_i + w2_i changes
    sign (length 0 when there is none); lengths are capped at 1 since no
    coordinate can hold more mass.
    """
    k = w1.size
    with np.errstate(divide="ignore", invalid="ignore"):
        kink = np.minimum(-w2 / w1, 1.0)
    crosses = ((w1 > 0.0) & (w2 < 0.0)) | ((w1 < 0.0) & (w2 > 0.0))
    first_len = np.where(crosses, kink, 0.0)
    slopes = np.concatenate([np.minimum(w1, 0.0), np.maximum(w1, 0.0)])
    lengths = np.concatenate([first_len, np.ones(k)])
    owner = np.tile(np.arange(k), 2)
    rank = np.repeat([0, 1], k)
    return slopes, lengths, owner, rank


def waterfill_allocation(w: DualWeight) -> np.ndarray:
    """Pour unit mass into the cheapest marginal pieces first.

    Each term is convex in alpha_i, so its pieces already come in increasing
    slope order; sorting on (slope, server, piece) gives the lowest-index
    tie-break.
    """
    slopes, lengths, owner, rank = _segments(w.w1, w.w2)
    order = np.lexsort((rank, owner, slopes))
    lengths = lengths[order]
    before = np.cumsum(lengths) - lengths
    take = np.clip(1.0 - before, 0.0, lengths)
    alpha = np.bincount(owner[order], weights=take, minlength=w.k)
    return alpha / alpha.sum()


def lp_allocation(w: DualWeight) -> np.ndarray:
    """Same minimization through the epigraph LP (min sum beta, beta >= w1*alpha + w2).

    Kept as an independent route for cross-checking; solved with HiGHS.
    """
    from scipy.optimize import linprog

    k = w.k
    c = np.concatenate([np.zeros(k), np.ones(k)])
    a_ub = np.hstack([np.diag(w.w1), -np.eye(k)])
    b_ub = -w.w2
    a_eq = np.concatenate([np.ones(k), np.zeros(k)])[None, :]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
                  bounds=[(0.0, None)] * (2 * k), method="highs")
    if res.status != 0:
        raise RuntimeError(f"allocation LP failed: {res.message}")
    alpha = np.clip(res.x[:k], 0.0, None)
    return alpha / alpha.sum()


def compute_allocation(w: DualWeight, method: str = "waterfill") -> AllocationResult:
    """Minimax allocation for direction ``w`` and the attained game value."""
    if not np.any(w.w1) and not np.any(w.w2):
        alpha = np.full(w.k, 1.0 / w.k)
    elif method == "waterfill":
        alpha = waterfill_allocation(w)
    elif method == "lp":
        alpha = lp_allocation(w)
    else:
        raise ValueError(f"unknown allocation method {method!r}")
    return AllocationResult(alpha, game_value(w, alpha))


def simplex_grid(k: int, resolution: float, max_points: int = 20_000_000) -> np.ndarray:
    """All points of the simplex whose coordinates are multiples of ``resolution``."""
    n = int(round(1.0 / resolution))
    if abs(n * resolution - 1.0) > 1e-9:
        raise ValueError("resolution must divide 1")
    count = 1
    for j in range(1, k):
        count = count * (n + j) // j
    if count > max_points:
        raise ValueError(f"simplex grid too large: {count} points for K={k}")
    if k == 1:
        return np.ones((1, 1))
    if k == 2:
        a = np.arange(n + 1)
        return np.stack([a, n - a], axis=1) / n
    pts = []
    for head in itertools.product(range(n + 1), repeat=k - 2):
        rest = n - sum(head)
        if rest < 0:
            continue
        a = np.arange(rest + 1)
        block = np.empty((rest + 1, k))
        block[:, : k - 2] = head
        block[:, k - 2] = a
        block[:, k - 1] = rest - a
        pts.append(block)
    return np.concatenate(pts) / n


def grid_allocation_oracle(w: DualWeight, resolution: float = 1e-3) -> AllocationResult:
    """Exhaustive minimum of :func:`game_value` over a simplex grid (K <= 4)."""
    if w.k > 4:
        raise ValueError("grid allocation oracle supports K <= 4 only")
    grid = simplex_grid(w.k, resolution)
    values = np.maximum(0.0, grid * w.w1 + w.w2).sum(axis=1)
    best = int(np.argmin(values))
    return AllocationResult(grid[best], float(values[best]))
