"""
Reduction engine: online load balancing -> approachability -> two OLO problems.

Each round of :class:`Algorithm1`

1. concatenates the predictions of two L1-ball learners into w_t = (w_t1, w_t2),
2. plays the minimax allocation alpha_t for w_t,
3. observes the loads l_t (the environment may look at alpha_t),
4. queries the support oracle for s_t = (x_t, y_t) in argmax_{s in S} <s, w_t>,
5. forms g_t1 = -alpha_t*l_t + x_t and g_t2 = -l_t + y_t,
6. feeds g_t1 and g_t2 to the two learners.

:func:`generic_reduction_round` is the same loop written for an arbitrary
game (A, B, r, S) with a Blackwell-condition witness, a support oracle and an
OCO learner over the dual ball; :func:`linf_game` instantiates it for the
makespan problem.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .allocation import DualWeight, compute_allocation, game_value
from .norms import cstar_inf
from .olo import EGPlusMinus, OnlineLinearLearner, RegretMeter, default_eta
from .support import DEFAULT_TOL, TargetPoint, support_point_inf

BLACKWELL_TOL = 1e-6

CSV_COLUMNS = ("t", "regret", "bound", "blackwell_gap", "makespan", "cstar_cum",
               "olo_regret_1", "olo_regret_2")


class BlackwellViolation(AssertionError):
    pass


class OracleFailure(RuntimeError):
    def __init__(self, t: int, cause: Exception):
        super().__init__(f"oracle failure in round {t}: {cause}")
        self.t = t
        self.cause = cause


def regret_bound(k: int, t: int) -> float:
    """2 sqrt(2 t ln 4K): the makespan regret guarantee with tuned EG+-."""
    if t <= 0:
        return 0.0
    return 2.0 * math.sqrt(2.0 * t * math.log(4.0 * k))


@dataclass
class RoundRecord:
    t: int
    alpha: np.ndarray
    load: np.ndarray
    cum_player_load: np.ndarray
    cum_load: np.ndarray
    w: Optional[DualWeight] = None
    support: Optional[TargetPoint] = None
    g1: Optional[np.ndarray] = None
    g2: Optional[np.ndarray] = None
    h_value: float = math.nan
    game_value: float = math.nan
    blackwell_gap: float = math.nan

    @property
    def payoff(self) -> np.ndarray:
        return np.concatenate([self.alpha * self.load, self.load])

    def as_dict(self) -> dict:
        def arr(v):
            return None if v is None else [float(a) for a in v]
        return {
            "t": self.t,
            "w1": arr(self.w.w1) if self.w is not None else None,
            "w2": arr(self.w.w2) if self.w is not None else None,
            "alpha": arr(self.alpha),
            "load": arr(self.load),
            "support_x": arr(self.support.x) if self.support is not None else None,
            "support_y": arr(self.support.y) if self.support is not None else None,
            "g1": arr(self.g1),
            "g2": arr(self.g2),
            "h_value": _num(self.h_value),
            "game_value": _num(self.game_value),
            "blackwell_gap": _num(self.blackwell_gap),
            "cum_player_load": arr(self.cum_player_load),
            "cum_load": arr(self.cum_load),
        }


def _num(v: float):
    return None if math.isnan(v) else float(v)


def blackwell_check(record: RoundRecord, tol: float = BLACKWELL_TOL) -> float:
    """h_S(w_t) - V(w_t); raises when the Blackwell condition fails by more than ``tol``."""
    gap = record.h_value - record.game_value
    if gap < -tol:
        dump = json.dumps(record.as_dict())
        raise BlackwellViolation(f"Blackwell condition violated (gap {gap:.3e}): {dump}")
    return gap


class Player:
    """Chooses an allocation, then sees the loads of that round."""

    k: int

    def act(self) -> np.ndarray:
        raise NotImplementedError

    def observe(self, load: np.ndarray) -> Optional[dict]:
        """Returns per-round diagnostics (w, support, g1, g2, ...) or None."""
        raise NotImplementedError

    def olo_regrets(self) -> tuple[float, float]:
        return math.nan, math.nan


class Algorithm1(Player):
    """The OLO-based makespan player.

    ``learners`` defaults to two EG+- copies tuned for ``horizon``; ``eta``
    overrides the per-copy learning rate.
    """

    def __init__(self, k: int, horizon: int, eta: float | None = None, tol: float = DEFAULT_TOL,
                 support_method: str = "exact", learners=None, checked: bool = True):
        if k < 1 or horizon < 1:
            raise ValueError("k and horizon must be positive")
        self.k = k
        self.horizon = horizon
        self.tol = tol
        self.support_method = support_method
        self.checked = checked
        if learners is None:
            rate = default_eta(k, horizon) if eta is None else eta
            learners = (EGPlusMinus(k, rate), EGPlusMinus(k, rate))
        self.learners: tuple[OnlineLinearLearner, OnlineLinearLearner] = tuple(learners)
        self.meters = (RegretMeter(k), RegretMeter(k))
        self.t = 0
        self.cum_player_load = np.zeros(k)
        self.cum_load = np.zeros(k)
        self._w: DualWeight | None = None
        self._alpha: np.ndarray | None = None
        self._value = math.nan

    def act(self) -> np.ndarray:
        self.t += 1
        try:
            self._w = DualWeight(self.learners[0].predict(), self.learners[1].predict())
            result = compute_allocation(self._w)
        except Exception as exc:
            raise OracleFailure(self.t, exc) from exc
        self._alpha, self._value = result.alpha, result.value
        return self._alpha

    def observe(self, load: np.ndarray) -> dict:
        w, alpha = self._w, self._alpha
        try:
            sup = support_point_inf(w, self.tol, self.support_method, seed=self.t)
        except Exception as exc:
            raise OracleFailure(self.t, exc) from exc
        g1 = sup.point.x - alpha * load
        g2 = sup.point.y - load
        for learner, meter, pred, g in zip(self.learners, self.meters, (w.w1, w.w2), (g1, g2)):
            meter.record(pred, g)
            learner.update(g)
        return {"w": w, "support": sup.point, "g1": g1, "g2": g2,
                "h_value": sup.h_value, "game_value": self._value}

    def run_round(self, load_supplier: Callable[[np.ndarray], np.ndarray]) -> RoundRecord:
        alpha = self.act()
        load = np.asarray(load_supplier(alpha), dtype=float)
        diag = self.observe(load)
        self.cum_player_load = self.cum_player_load + alpha * load
        self.cum_load = self.cum_load + load
        record = RoundRecord(self.t, alpha, load, self.cum_player_load, self.cum_load, **diag)
        record.blackwell_gap = blackwell_check(record) if self.checked else (
            record.h_value - record.game_value)
        return record

    def olo_regrets(self) -> tuple[float, float]:
        return self.meters[0].regret, self.meters[1].regret

    def distance_bound(self) -> float:
        """Upper bound on the combined-norm distance from the average payoff to S.

        Uses max_u (1/T) sum_t <-g_t, u> over the product of L1 balls, which
        dominates the distance because h_S(u) >= <s_t, u> for every t.
        """
        if self.t == 0:
            return 0.0
        return sum(float(np.max(np.abs(m.cum_cost))) for m in self.meters) / self.t


# ---------------------------------------------------------------------------
# generic reduction


@dataclass
class GameOracles:
    """Oracles describing a vector-payoff game (A, B, r, S).

    ``witness(w)`` returns a in A with max_b <w, r(a, b)> <= h_S(w);
    ``support(w)`` returns (s, h_S(w)) with s in argmax_{s in S} <s, w>.
    """

    witness: Callable
    payoff: Callable
    support: Callable


@dataclass
class RoundLoss:
    """f_t(u) = <-r_t, u> + h_S(u) with its subgradient at the played w_t."""

    payoff: np.ndarray
    support_point: np.ndarray
    support_fn: Callable = field(repr=False)

    @property
    def subgradient(self) -> np.ndarray:
        return self.support_point - self.payoff

    def __call__(self, u) -> float:
        return float(-self.payoff @ u) + self.support_fn(u)[1]


class ProductBallLearner:
    """Runs independent OLO copies on consecutive blocks of the decision vector."""

    def __init__(self, learners):
        self.learners = list(learners)
        self.sizes = [lrn.dim for lrn in self.learners]

    def predict(self) -> np.ndarray:
        return np.concatenate([lrn.predict() for lrn in self.learners])

    def update(self, g) -> None:
        start = 0
        for lrn, size in zip(self.learners, self.sizes):
            lrn.update(g[start:start + size])
            start += size


def generic_reduction_round(oracles: GameOracles, learner):
    """One round of the game-to-OCO reduction.

    Returns the action a_t and a feedback closure; calling it with the
    environment's move b_t builds f_t, feeds its subgradient to ``learner``
    and returns ``(f_t, w_t, h_S(w_t))``.
    """
    w = learner.predict()
    action = oracles.witness(w)

    def feedback(b) -> tuple[RoundLoss, np.ndarray, float]:
        r = np.asarray(oracles.payoff(action, b), dtype=float)
        s, h = oracles.support(w)
        loss = RoundLoss(r, np.asarray(s, dtype=float), oracles.support)
        learner.update(loss.subgradient)
        return loss, w, h

    return action, feedback


def linf_game(tol: float = DEFAULT_TOL, support_method: str = "exact") -> GameOracles:
    def witness(w):
        return compute_allocation(DualWeight.from_flat(w)).alpha

    def payoff(alpha, load):
        return np.concatenate([alpha * load, load])

    def support(w):
        res = support_point_inf(DualWeight.from_flat(w), tol, support_method)
        return res.point.flat, res.h_value

    return GameOracles(witness, payoff, support)


class GenericReductionPlayer(Player):
    """Makespan player driven through :func:`generic_reduction_round`."""

    def __init__(self, k: int, horizon: int, eta: float | None = None, tol: float = DEFAULT_TOL):
        rate = default_eta(k, horizon) if eta is None else eta
        self.k = k
        self.oracles = linf_game(tol)
        self.learner = ProductBallLearner([EGPlusMinus(k, rate), EGPlusMinus(k, rate)])
        self.meters = (RegretMeter(k), RegretMeter(k))
        self._feedback = None
        self._alpha = None

    def act(self) -> np.ndarray:
        self._alpha, self._feedback = generic_reduction_round(self.oracles, self.learner)
        return self._alpha

    def observe(self, load) -> dict:
        loss, w, h = self._feedback(load)
        k = self.k
        g = loss.subgradient
        self.meters[0].record(w[:k], g[:k])
        self.meters[1].record(w[k:], g[k:])
        dw = DualWeight.from_flat(w)
        value = game_value(dw, self._alpha)
        sp = loss.support_point
        return {"w": dw, "support": TargetPoint(sp[:k], sp[k:]), "g1": g[:k], "g2": g[k:],
                "h_value": h, "game_value": value}

    def olo_regrets(self) -> tuple[float, float]:
        return self.meters[0].regret, self.meters[1].regret


# ---------------------------------------------------------------------------
# games and traces


@dataclass
class RegretTrace:
    k: int
    regret: np.ndarray
    bound: np.ndarray
    blackwell_gap: np.ndarray
    makespan: np.ndarray
    cstar_cum: np.ndarray
    olo_regret_1: np.ndarray
    olo_regret_2: np.ndarray
    rounds: list = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return int(self.regret.size)

    @property
    def final_regret(self) -> float:
        return float(self.regret[-1]) if self.horizon else 0.0

    @property
    def final_bound(self) -> float:
        return float(self.bound[-1]) if self.horizon else 0.0

    def columns(self) -> dict:
        return {
            "t": np.arange(1, self.horizon + 1),
            "regret": self.regret,
            "bound": self.bound,
            "blackwell_gap": self.blackwell_gap,
            "makespan": self.makespan,
            "cstar_cum": self.cstar_cum,
            "olo_regret_1": self.olo_regret_1,
            "olo_regret_2": self.olo_regret_2,
        }

    def write_csv(self, path) -> None:
        cols = self.columns()
        with open(path, "w", newline="") as fh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            for row in zip(*(cols[c] for c in CSV_COLUMNS)):
                fh.write(str(int(row[0])) + "," + ",".join(f"{v:.12g}" for v in row[1:]) + "\n")

    def write_json(self, path) -> None:
        if not self.rounds:
            raise ValueError("trace was recorded without rounds (use keep_rounds=True)")
        with open(path, "w") as fh:
            json.dump({"k": self.k, "rounds": [r.as_dict() for r in self.rounds]}, fh)


def read_trace_csv(path) -> dict:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected trace header: {reader.fieldnames}")
        rows = list(reader)
    return {c: np.array([float(r[c]) for r in rows]) for c in CSV_COLUMNS}


def run_game(horizon: int, environment, player: Player, keep_rounds: bool = False,
             checked: bool = True) -> RegretTrace:
    """Play ``horizon`` rounds of ``player`` against ``environment``.

    ``environment.loads(t, alpha)`` returns the round-t loads and may depend on alpha.
    """
    k = player.k
    cols = {c: np.empty(horizon) for c in CSV_COLUMNS[1:]}
    cum_player_load = np.zeros(k)
    cum_load = np.zeros(k)
    rounds = []
    for t in range(1, horizon + 1):
        alpha = player.act()
        load = np.asarray(environment.loads(t, alpha), dtype=float)
        diag = player.observe(load) or {}
        cum_player_load = cum_player_load + alpha * load
        cum_load = cum_load + load
        record = RoundRecord(t, alpha, load, cum_player_load, cum_load, **diag)
        if diag:
            record.blackwell_gap = (blackwell_check(record) if checked
                                    else record.h_value - record.game_value)
        makespan = float(np.max(cum_player_load))
        opt = cstar_inf(cum_load)
        i = t - 1
        cols["regret"][i] = makespan - opt
        cols["bound"][i] = regret_bound(k, t)
        cols["blackwell_gap"][i] = record.blackwell_gap
        cols["makespan"][i] = makespan
        cols["cstar_cum"][i] = opt
        cols["olo_regret_1"][i], cols["olo_regret_2"][i] = player.olo_regrets()
        if keep_rounds:
            rounds.append(record)
    return RegretTrace(k, rounds=rounds, **cols)


def regret(trace: RegretTrace, t: int) -> float:
    """||sum_{s<=t} alpha_s*l_s||_inf - C*(sum_{s<=t} l_s), recomputed from the kept rounds."""
    if t == 0:
        return 0.0
    if t > trace.horizon:
        raise ValueError(f"t={t} beyond horizon {trace.horizon}")
    if not trace.rounds:
        return float(trace.regret[t - 1])
    rec = trace.rounds[t - 1]
    return float(np.max(np.abs(rec.cum_player_load))) - cstar_inf(rec.cum_load)
