"""
Playing the online makespan game
================================

A player splits one unit of work across K servers every round, then the
environment reveals how slow each server was.  The player's cost is the
makespan: the largest cumulative load.  We compare the OLO-based player
against two baselines on an adversary that always hits the busiest share.
"""

import numpy as np

from onlineload import Algorithm1, run_game
from onlineload.engine import regret_bound
from onlineload.environments import AdaptiveTargeted, HindsightFollower, RotatingSpike, StaticUniform

K, T = 5, 5000

# the adaptive adversary loads the server with the largest share each round
for name, player in [("algorithm1", Algorithm1(K, T)),
                     ("static_uniform", StaticUniform(K)),
                     ("hindsight_follower", HindsightFollower(K))]:
    trace = run_game(T, AdaptiveTargeted(K), player)
    print(f"{name:20s} regret {trace.final_regret:9.2f}   bound {trace.final_bound:8.2f}")

# with ten servers and a rotating spike, quadrupling the horizon roughly
# doubles the regret, the sqrt(T) growth the bound allows
print()
for t in (1000, 4000, 16000):
    trace = run_game(t, RotatingSpike(10), Algorithm1(10, t))
    print(f"T={t:6d}  regret {trace.final_regret:7.2f}  bound {regret_bound(10, t):8.2f}")

# the two OLO regrets upper bound the makespan regret at every round
trace = run_game(T, RotatingSpike(K, period=7), Algorithm1(K, T))
slack = trace.olo_regret_1 + trace.olo_regret_2 + np.arange(1, T + 1) * 1e-6 - trace.regret
print()
print("smallest chain slack over all rounds:", round(float(slack.min()), 4))
