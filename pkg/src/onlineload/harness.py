"""
Experiment harness: configuration, runs, sweeps, bound checks and self-tests.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .allocation import DualWeight, compute_allocation, grid_allocation_oracle, simplex_grid
from .engine import Algorithm1, RegretTrace, read_trace_csv, regret_bound, run_game
from .environments import (AdaptiveTargeted, Bernoulli, HindsightFollower, IidUniform,
                           RotatingSpike, StaticUniform, make_rng)
from .norms import cstar_inf
from .support import (build_socp_data, grid_support_oracle, hyperbolic_rewrite_check,
                      socp_certificate, support_point_inf)

ENVIRONMENTS = ("iid_uniform", "bernoulli", "rotating_spike", "adaptive_targeted")
PLAYERS = ("algorithm1", "static_uniform", "hindsight_follower")

EXIT_OK = 0
EXIT_BOUND_VIOLATION = 1
EXIT_INVALID_CONFIG = 2
EXIT_ORACLE_FAILURE = 3


class ConfigError(ValueError):
    pass


@dataclass
class GameConfig:
    k: int = 10
    t: int = 1000
    seed: int = 0
    env: str = "iid_uniform"
    period: int = 1
    rates: Optional[list] = None
    player: str = "algorithm1"
    eta_override: Optional[float] = None
    tol: float = 1e-6
    out_path: Optional[str] = None

    def validate(self) -> "GameConfig":
        if not isinstance(self.k, int) or self.k < 2:
            raise ConfigError("k must be an integer >= 2")
        if not isinstance(self.t, int) or self.t < 1:
            raise ConfigError("t must be an integer >= 1")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.env not in ENVIRONMENTS:
            raise ConfigError(f"env must be one of {ENVIRONMENTS}")
        if self.player not in PLAYERS:
            raise ConfigError(f"player must be one of {PLAYERS}")
        if not 0.0 < self.tol <= 1e-3:
            raise ConfigError("tol must lie in (0, 1e-3]")
        if self.eta_override is not None and not self.eta_override > 0:
            raise ConfigError("eta_override must be positive")
        if self.period < 1:
            raise ConfigError("period must be >= 1")
        if self.env == "bernoulli":
            if self.rates is None or len(self.rates) != self.k:
                raise ConfigError("bernoulli env needs one rate per server")
            if any(not 0.0 <= r <= 1.0 for r in self.rates):
                raise ConfigError("bernoulli rates must lie in [0, 1]")
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "GameConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "GameConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def make_environment(cfg: GameConfig):
    if cfg.env == "iid_uniform":
        return IidUniform(cfg.k, cfg.seed)
    if cfg.env == "bernoulli":
        return Bernoulli(cfg.rates, cfg.seed)
    if cfg.env == "rotating_spike":
        return RotatingSpike(cfg.k, cfg.period)
    if cfg.env == "adaptive_targeted":
        return AdaptiveTargeted(cfg.k)
    raise ConfigError(f"unknown environment {cfg.env!r}")


def make_player(cfg: GameConfig):
    if cfg.player == "algorithm1":
        return Algorithm1(cfg.k, cfg.t, eta=cfg.eta_override, tol=cfg.tol)
    if cfg.player == "static_uniform":
        return StaticUniform(cfg.k)
    if cfg.player == "hindsight_follower":
        return HindsightFollower(cfg.k)
    raise ConfigError(f"unknown player {cfg.player!r}")


def run_config(cfg: GameConfig, keep_rounds: bool = False) -> RegretTrace:
    cfg.validate()
    trace = run_game(cfg.t, make_environment(cfg), make_player(cfg), keep_rounds=keep_rounds)
    if cfg.out_path:
        trace.write_csv(cfg.out_path)
    return trace


@dataclass
class BoundReport:
    horizon: int
    regret: float
    bound: float
    olo_regret_1: float
    olo_regret_2: float
    tol: float
    trace_path: Optional[str] = None

    @property
    def ratio(self) -> float:
        return self.regret / self.bound if self.bound > 0 else 0.0

    @property
    def passed(self) -> bool:
        return self.regret <= self.bound

    @property
    def chain_slack(self) -> float:
        """olo_1 + olo_2 + T*tol - regret; negative means the chain inequality broke."""
        if math.isnan(self.olo_regret_1):
            return math.nan
        return self.olo_regret_1 + self.olo_regret_2 + self.horizon * self.tol - self.regret

    @property
    def chain_holds(self) -> bool:
        return math.isnan(self.chain_slack) or self.chain_slack >= 0.0

    def lines(self) -> list[str]:
        out = [
            f"horizon       {self.horizon}",
            f"regret        {self.regret:.6f}",
            f"bound         {self.bound:.6f}",
            f"ratio         {self.ratio:.6f}",
            f"bound check   {'PASS' if self.passed else 'FAIL'}",
        ]
        if not math.isnan(self.olo_regret_1):
            out += [
                f"olo regret 1  {self.olo_regret_1:.6f}",
                f"olo regret 2  {self.olo_regret_2:.6f}",
                f"chain slack   {self.chain_slack:.6f}",
                f"chain check   {'PASS' if self.chain_holds else 'FAIL'}",
            ]
        if not (self.passed and self.chain_holds) and self.trace_path:
            out.append(f"inspect trace {self.trace_path}")
        return out


def check_bound(trace, tol: float = 1e-6, trace_path=None) -> BoundReport:
    """Compare the final regret of a trace (object or CSV path) with 2 sqrt(2T ln 4K)."""
    if isinstance(trace, (str, Path)):
        trace_path = str(trace)
        cols = read_trace_csv(trace)
        if cols["t"].size == 0:
            return BoundReport(0, 0.0, 0.0, math.nan, math.nan, tol, trace_path)
        return BoundReport(int(cols["t"][-1]), float(cols["regret"][-1]),
                           float(cols["bound"][-1]), float(cols["olo_regret_1"][-1]),
                           float(cols["olo_regret_2"][-1]), tol, trace_path)
    if trace.horizon == 0:
        return BoundReport(0, 0.0, 0.0, math.nan, math.nan, tol, trace_path)
    return BoundReport(trace.horizon, trace.final_regret, trace.final_bound,
                       float(trace.olo_regret_1[-1]), float(trace.olo_regret_2[-1]),
                       tol, trace_path)


def _sweep_point(cfg: GameConfig) -> tuple[int, float, float]:
    trace = run_config(cfg)
    return cfg.t, trace.final_regret, regret_bound(cfg.k, cfg.t)


def sweep(base: GameConfig, horizons, jobs: int = 1) -> list[tuple[int, float, float, float]]:
    """Run ``base`` once per horizon; rows are (T, regret, bound, ratio)."""
    configs = []
    for t in horizons:
        cfg = GameConfig(**{**asdict(base), "t": int(t), "out_path": None})
        configs.append(cfg.validate())
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, configs))
    else:
        results = [_sweep_point(c) for c in configs]
    return [(t, r, b, r / b) for t, r, b in results]


def write_sweep_csv(rows, path) -> None:
    with open(path, "w") as fh:
        fh.write("T,regret,bound,ratio\n")
        for t, r, b, q in rows:
            fh.write(f"{t},{r:.12g},{b:.12g},{q:.12g}\n")


def scaling_slope(rows) -> float:
    """Least-squares slope of log(regret) against log(T)."""
    t = np.log([row[0] for row in rows])
    r = np.log([max(row[1], 1e-300) for row in rows])
    return float(np.polyfit(t, r, 1)[0])


def random_dual_weight(rng: np.random.Generator, k: int) -> DualWeight:
    """A direction in the unit dual ball; half the draws sit on its boundary."""
    w1 = rng.uniform(-1.0, 1.0, k)
    w2 = rng.uniform(-1.0, 1.0, k)
    s1 = np.abs(w1).sum()
    s2 = np.abs(w2).sum()
    if rng.random() < 0.5:
        w1, w2 = w1 / s1, w2 / s2
    else:
        w1, w2 = w1 / max(1.0, s1), w2 / max(1.0, s2)
    return DualWeight(w1, w2)


def selftest(seed: int = 2024, draws: int = 200, verbose: bool = True) -> dict[str, bool]:
    """Grid-oracle cross-validation (K <= 3); returns {invariant: passed}."""
    rng = make_rng(seed)
    results = {}

    def report(name, ok, detail=""):
        results[name] = bool(ok)
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'}  {name}{'  ' + detail if detail else ''}")

    ok, worst = True, 0.0
    for i in range(draws):
        k = 2 + i % 2
        w = random_dual_weight(rng, k)
        v = compute_allocation(w).value
        g = grid_allocation_oracle(w, 1e-3).value
        worst = max(worst, g - v)
        ok &= v <= g + 1e-9 and v >= g - k * 1e-3
    report("allocation oracle vs grid", ok, f"max(grid - solver) = {worst:.2e}")

    ok, worst, feas = True, 0.0, 0.0
    for i in range(draws):
        k = 2 + i % 2
        w = random_dual_weight(rng, k)
        s = support_point_inf(w)
        g = grid_support_oracle(w, 1e-2)
        worst = max(worst, abs(s.h_value - g.h_value))
        feas = max(feas, s.point.violation())
        ok &= abs(s.h_value - g.h_value) <= 2 * k * 1e-2 and s.point.violation() <= 1e-9
    report("support oracle vs grid", ok, f"max |gap| = {worst:.2e}, max infeasibility = {feas:.1e}")

    ok, worst = True, math.inf
    for i in range(2 * draws):
        k = 2 + i % 2
        w = random_dual_weight(rng, k)
        gap = support_point_inf(w).h_value - compute_allocation(w).value
        worst = min(worst, gap)
        ok &= gap >= -1e-6
    report("Blackwell condition", ok, f"min gap = {worst:.2e}")

    ok = True
    for _ in range(draws):
        k = int(rng.integers(2, 4))
        l = rng.uniform(1e-3, 1.0, k)
        grid = simplex_grid(k, 1e-2)
        best = float(np.max(grid * l, axis=1).min())
        ok &= cstar_inf(l) <= best + 1e-12 and best - cstar_inf(l) <= 5e-2
    report("closed-form C* vs grid", ok)

    triples = rng.uniform(0.0, 2.0, (10_000, 3))
    ok = all(hyperbolic_rewrite_check(*row) for row in triples)
    report("hyperbolic cone rewrite", ok)

    ok, worst = True, 0.0
    for i in range(draws // 2):
        k = 2 + i % 2
        w = random_dual_weight(rng, k)
        g = grid_support_oracle(w, 1e-2)
        if np.any(g.point.y == 0.0):
            continue
        prob = build_socp_data(w)
        v = prob.pack(g.point.x, g.point.y, socp_certificate(g.point.x, g.point.y))
        worst = max(worst, prob.max_violation(v))
        ok &= prob.max_violation(v) <= 1e-9
    report("SOCP data round trip", ok, f"max violation = {worst:.1e}")
    return results
