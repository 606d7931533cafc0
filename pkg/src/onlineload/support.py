"""
Support-function oracle for the makespan target set

    S = {(x, y) in [0,1]^K x [0,1]^K : ||x||_inf <= C*(y)},   C*(y) = 1/sum_j(1/y_j).

For a direction w = (w1, w2) the maximizer of <s, w> over S is a subgradient
of h_S at w.  The objective is linear in x with x_i in [0, C*(y)], so the
optimal x is C*(y) on the coordinates where w1 is positive and 0 elsewhere.
What remains is the concave box problem

    max_{y in [0,1]^K}  P*C*(y) + <w2, y>,     P = sum_i max(0, w1_i).

Two solvers are provided.  ``"exact"`` (the default) reads the optimum off the
KKT conditions: every coordinate is either pinned at 1 or satisfies
y_j = C*(y) * sqrt(P / -w2_j), which leaves a single scalar equation in C*
that is piecewise linear and monotone.  ``"gradient"`` is projected gradient
ascent with backtracking and random restarts; it stops on a small projected
gradient or once the linearization bound certifies the best value found.

The module also emits the second-order-cone form of the same problem, based
on the identity x^2 <= y*z, y, z >= 0  <=>  ||(2x, y - z)||_2 <= y + z.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np

from .allocation import DualWeight
from .norms import as_vector, cstar_inf

DEFAULT_TOL = 1e-6


class SupportOracleError(RuntimeError):
    """Iterative solver ran out of budget; ``best`` holds the best feasible point."""

    def __init__(self, message: str, best: "SupportResult"):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class TargetPoint:
    x: np.ndarray
    y: np.ndarray

    @property
    def flat(self) -> np.ndarray:
        return np.concatenate([self.x, self.y])

    def violation(self) -> float:
        """How far the point sits outside S (0 when feasible)."""
        box = max(
            float(np.max(-self.x)), float(np.max(self.x - 1.0)),
            float(np.max(-self.y)), float(np.max(self.y - 1.0)), 0.0,
        )
        return max(box, float(np.max(self.x)) - cstar_inf(self.y))


@dataclass(frozen=True)
class SupportResult:
    point: TargetPoint
    h_value: float


def _point_for(w: DualWeight, y: np.ndarray) -> SupportResult:
    c = cstar_inf(y)
    x = np.where(w.w1 > 0.0, c, 0.0)
    point = TargetPoint(x, y)
    return SupportResult(point, float(w.w1 @ x + w.w2 @ y))


def _degenerate(w: DualWeight) -> SupportResult:
    # Some y_j = 0 forces C*(y) = 0 and x = 0; the rest is linear in y.
    return SupportResult(
        TargetPoint(np.zeros(w.k), (w.w2 > 0.0).astype(float)),
        float(np.maximum(w.w2, 0.0).sum()),
    )


def _exact(w: DualWeight) -> SupportResult:
    pos = float(np.maximum(w.w1, 0.0).sum())
    degenerate = _degenerate(w)
    if pos <= 0.0:
        return degenerate
    neg = w.w2 < 0.0
    # y_j = min(1, c / b_j) on the negative coordinates, 1 elsewhere; the
    # fixed point c = C*(y) solves c*m + sum_j max(c, b_j) = 1.
    b = np.sqrt(-w.w2[neg] / pos)
    m = w.k - b.size
    if b.sum() >= 1.0:
        return degenerate
    b_sorted = np.sort(b)
    suffix = np.concatenate([np.cumsum(b_sorted[::-1])[::-1], [0.0]])
    c = None
    for j in range(b_sorted.size + 1):
        if m + j == 0:
            continue
        cand = (1.0 - suffix[j]) / (m + j)
        lo = b_sorted[j - 1] if j > 0 else 0.0
        hi = b_sorted[j] if j < b_sorted.size else math.inf
        if lo <= cand <= hi:
            c = cand
            break
    if c is None:
        # floating-point edge at a breakpoint; the crossing is the last valid one
        c = (1.0 - suffix[-1]) / (m + b_sorted.size)
    y = np.ones(w.k)
    y[neg] = np.minimum(1.0, c / b)
    result = _point_for(w, y)
    return result if result.h_value >= degenerate.h_value else degenerate


def _reduced(y: np.ndarray, pos: float, w2: np.ndarray) -> float:
    return pos * cstar_inf(y) + float(w2 @ y)


def _reduced_grad(y: np.ndarray, pos: float, w2: np.ndarray) -> np.ndarray:
    c = cstar_inf(y)
    return pos * (c / y) ** 2 + w2


def _gradient(w: DualWeight, tol: float, seed: int, restarts: int,
              max_iter: int) -> SupportResult:
    pos = float(np.maximum(w.w1, 0.0).sum())
    degenerate = _degenerate(w)
    if pos <= 0.0:
        return degenerate
    w2 = w.w2
    floor = 1e-12
    rng = np.random.default_rng(seed)
    starts = [np.ones(w.k)] + [rng.uniform(0.05, 1.0, w.k) for _ in range(restarts)]
    best_y, best_val, converged = None, -math.inf, False
    for y in starts:
        val = _reduced(y, pos, w2)
        grad = _reduced_grad(y, pos, w2)
        step = 1.0
        for _ in range(max_iter):
            pg = np.clip(y + grad, floor, 1.0) - y
            # concavity: F <= val + <grad, y' - y> for every y' in the box
            upper = val + float(np.maximum(grad * (1.0 - y), -grad * y).sum())
            if np.linalg.norm(pg) <= tol or upper - max(val, degenerate.h_value) <= tol:
                converged = True
                break
            while True:
                cand = np.clip(y + step * grad, floor, 1.0)
                cand_val = _reduced(cand, pos, w2)
                # Armijo condition along the projection arc
                if cand_val >= val + 1e-4 * float(grad @ (cand - y)) or step < 1e-16:
                    break
                step *= 0.5
            if cand_val < val:
                break
            cand_grad = _reduced_grad(cand, pos, w2)
            # Barzilai-Borwein trial step for the next iteration
            ds, dg = cand - y, cand_grad - grad
            curv = -float(ds @ dg)
            step = float(ds @ ds) / curv if curv > 1e-300 else 1.0
            step = min(max(step, 1e-12), 1e6)
            y, val, grad = cand, cand_val, cand_grad
        if val > best_val:
            best_y, best_val = y, val
    # coordinates stuck at the floor belong to the y_j = 0 face
    result = _point_for(w, best_y)
    if degenerate.h_value >= result.h_value - tol:
        result = degenerate
    if not converged:
        raise SupportOracleError("projected gradient ascent did not converge", result)
    return result


def support_point_inf(w: DualWeight, tol: float = DEFAULT_TOL, method: str = "exact",
                      seed: int = 0, restarts: int = 8,
                      max_iter: int = 10_000) -> SupportResult:
    """argmax_{s in S} <s, w>; the returned point is always exactly feasible."""
    if not 0.0 < tol <= 1e-3:
        raise ValueError("tol must lie in (0, 1e-3]")
    if method == "exact":
        return _exact(w)
    if method == "gradient":
        return _gradient(w, tol, seed, restarts, max_iter)
    raise ValueError(f"unknown support method {method!r}")


def h_value(w: DualWeight, tol: float = DEFAULT_TOL, method: str = "exact") -> float:
    return support_point_inf(w, tol, method).h_value


def grid_support_oracle(w: DualWeight, resolution: float = 1e-2) -> SupportResult:
    """Exhaustive maximum over a y-grid of [0,1]^K (K <= 3)."""
    if w.k > 3:
        raise ValueError("grid support oracle supports K <= 3 only")
    n = int(round(1.0 / resolution))
    axis = np.linspace(0.0, 1.0, n + 1)
    ys = np.stack(np.meshgrid(*([axis] * w.k), indexing="ij"), axis=-1).reshape(-1, w.k)
    with np.errstate(divide="ignore"):
        inv = np.where(ys > 0.0, 1.0 / np.where(ys > 0.0, ys, 1.0), np.inf).sum(axis=1)
    c = np.where(np.isinf(inv), 0.0, 1.0 / inv)
    pos = float(np.maximum(w.w1, 0.0).sum())
    values = pos * c + ys @ w.w2
    best = int(np.argmax(values))
    return _point_for(w, ys[best].copy())


def hyperbolic_rewrite_check(x: float, y: float, z: float) -> bool:
    """True iff x^2 <= y*z with y, z >= 0 agrees with ||(2x, y-z)||_2 <= y+z.

    Both sides are evaluated in exact rational arithmetic; the norm condition
    is taken in its squared form 4x^2 + (y-z)^2 <= (y+z)^2 with y+z >= 0.
    """
    x, y, z = Fraction(x), Fraction(y), Fraction(z)
    lhs = x * x <= y * z and y >= 0 and z >= 0
    rhs = y + z >= 0 and 4 * x * x + (y - z) ** 2 <= (y + z) ** 2
    return lhs == rhs


@dataclass
class Cone:
    """||(u, v)||_2 <= bound with u, v, bound affine in the variables.

    Each affine expression is a dict {variable index: coefficient}.
    """

    i: int
    j: int
    u: dict
    v: dict
    bound: dict

    def evaluate(self, z: np.ndarray) -> tuple[float, float, float]:
        def aff(expr):
            return sum(coef * z[idx] for idx, coef in expr.items())
        return aff(self.u), aff(self.v), aff(self.bound)


@dataclass
class SocpProblem:
    """minimize objective @ z subject to cones, equalities and y boxes.

    Variable order: x_1..x_K, y_1..y_K, z_11, z_12, ..., z_KK.
    """

    k: int
    objective: np.ndarray
    cones: list = field(default_factory=list)
    equalities: list = field(default_factory=list)
    boxes: list = field(default_factory=list)

    @property
    def n_vars(self) -> int:
        return 2 * self.k + self.k * self.k

    def x_index(self, i: int) -> int:
        return i

    def y_index(self, j: int) -> int:
        return self.k + j

    def z_index(self, i: int, j: int) -> int:
        return 2 * self.k + i * self.k + j

    def variable_names(self) -> list[str]:
        k = self.k
        return ([f"x{i + 1}" for i in range(k)] + [f"y{j + 1}" for j in range(k)]
                + [f"z{i + 1}{j + 1}" for i in range(k) for j in range(k)])

    def pack(self, x, y, z) -> np.ndarray:
        return np.concatenate([as_vector(x), as_vector(y), np.asarray(z, float).ravel()])

    def max_violation(self, v: np.ndarray) -> float:
        worst = 0.0
        for cone in self.cones:
            u, vv, bound = cone.evaluate(v)
            worst = max(worst, math.hypot(u, vv) - bound)
        for row, rhs in self.equalities:
            lhs = sum(coef * v[idx] for idx, coef in row.items())
            worst = max(worst, abs(lhs - rhs))
        for idx, lo, hi in self.boxes:
            worst = max(worst, lo - v[idx], v[idx] - hi)
        return worst

    def to_json(self) -> str:
        def enc(expr):
            return [[int(idx), float(coef)] for idx, coef in sorted(expr.items())]
        doc = {
            "variables": self.variable_names(),
            "objective": [float(c) for c in self.objective],
            "cones": [
                {"i": c.i + 1, "j": c.j + 1, "u": enc(c.u), "v": enc(c.v), "bound": enc(c.bound)}
                for c in self.cones
            ],
            "equalities": [{"row": enc(row), "rhs": float(rhs)} for row, rhs in self.equalities],
            "boxes": [{"var": int(idx), "lower": lo, "upper": hi} for idx, lo, hi in self.boxes],
        }
        return json.dumps(doc, indent=2)


def build_socp_data(w: DualWeight) -> SocpProblem:
    k = w.k
    prob = SocpProblem(k, np.zeros(2 * k + k * k))
    prob.objective[:k] = -w.w1
    prob.objective[k:2 * k] = -w.w2
    for i in range(k):
        xi = prob.x_index(i)
        for j in range(k):
            yj, zij = prob.y_index(j), prob.z_index(i, j)
            prob.cones.append(Cone(i, j, {xi: 2.0}, {yj: 1.0, zij: -1.0}, {yj: 1.0, zij: 1.0}))
        row = {prob.z_index(i, j): 1.0 for j in range(k)}
        row[xi] = -1.0
        prob.equalities.append((row, 0.0))
    for j in range(k):
        prob.boxes.append((prob.y_index(j), 0.0, 1.0))
    return prob


def socp_certificate(x, y) -> np.ndarray:
    """z_ij = x_i * (1/y_j) / sum_k(1/y_k), the split that makes every cone tight-feasible."""
    x, y = as_vector(x), as_vector(y)
    share = (1.0 / y) / np.sum(1.0 / y)
    return np.outer(x, share)
