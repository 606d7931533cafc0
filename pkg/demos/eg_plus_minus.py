"""
Exponentiated gradient over the L1 ball
=======================================

EG+- keeps a positive and a negative copy of every coordinate, so its
predictions can point anywhere in the L1 ball.  We run it against an
adversary that charges whatever the learner leans into.
"""

import math

import numpy as np

from onlineload import EGPlusMinus
from onlineload.olo import RegretMeter, default_eta, eg_regret_bound

d, T = 10, 10_000
rng = np.random.default_rng(0)
learner = EGPlusMinus(d, default_eta(d, T))
meter = RegretMeter(d)

for t in range(T):
    w = learner.predict()
    g = np.sign(w)
    g[g == 0] = rng.choice([-1.0, 1.0], size=int((g == 0).sum()))
    meter.record(w, g)
    learner.update(g)

print("measured regret", round(meter.regret, 2))
print("guarantee      ", round(eg_regret_bound(d, T), 2))
print("eta            ", round(learner.eta, 5), "=", "sqrt(2 ln 2d / T) =",
      round(math.sqrt(2 * math.log(2 * d) / T), 5))
