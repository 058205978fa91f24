"""Tracking one channel's occupancy from noisy energy readings.

A single channel flips between free and occupied according to a two-state
Markov chain. We sense it every slot, feed each reading to the belief
recursion, and watch the belief follow the hidden state. When the tracker
is told a smaller amplitude than the real one, it stays more cautious.
"""

import numpy as np

from dsalearn.belief import update_known
from dsalearn.markov import REFERENCE_TRANSITION as P
from dsalearn.markov import stationary_occupancy
from dsalearn.observation import db_to_amplitude, observe

rng = np.random.default_rng(0)
theta = db_to_amplitude(3.0)
T = 40

# hidden state path
s = [int(rng.random() < stationary_occupancy(P))]
for _ in range(T - 1):
    s.append(int(rng.random() < (P.p11 if s[-1] else P.p01)))
s = np.array(s)
y = observe(s, theta, 1.0, rng.standard_normal(T))

p_right = p_low = stationary_occupancy(P)
print(" k  S      y   belief  belief(theta too small)")
for k in range(T):
    p_right = update_known(p_right, y[k], theta, 1.0, P)
    p_low = update_known(p_low, y[k], db_to_amplitude(-5.0), 1.0, P)
    print(f"{k:2d}  {s[k]}  {y[k]:+.2f}   {p_right:.3f}   {p_low:.3f}")

