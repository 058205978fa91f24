"""Does the learner pin down the amplitude?

With forced alternation between the two channels every channel keeps being
sensed, and the posterior mass on the true amplitude climbs towards one. At
very low SNR it still rises, just slowly. Without forcing, the greedy rule
tends to settle on one channel and the other never gets learned.
"""

import numpy as np

from dsalearn.markov import REFERENCE_TRANSITION, ChannelSetModel
from dsalearn.observation import ObservationModel, db_to_amplitude, uniform_prior
from dsalearn.policy import PolicyKind
from dsalearn.sim import SimConfig, run_monte_carlo

model = ChannelSetModel(2, REFERENCE_TRANSITION)
db_set = (-5.0, -3.0, -1.0, 1.0, 3.0, 5.0)
theta_set = tuple(db_to_amplitude(d) for d in db_set)
checkpoints = [0, 100, 1000, 3000, 9999]

for C in (1, None):
    print("forced alternation" if C == 1 else "\nno forcing")
    print(" true SNR  " + "".join(f"{k:>8}" for k in checkpoints) + "   runs >= 0.99")
    for true_db in (-5.0, 1.0, 5.0):
        i = db_set.index(true_db)
        obs = ObservationModel(1.0, theta_set, uniform_prior(6), (i, i))
        cfg = SimConfig(model, obs, PolicyKind.LEARNING, 0.01, 0.999, 10000, 50, 11, round_robin_C=C)
        mass = run_monte_carlo(cfg).mass_on_truth
        mean = mass.mean(axis=0)
        frac = np.mean(mass[:, -1] >= 0.99)
        print(f"{true_db:+6.0f} dB " + "".join(f"{mean[k]:8.3f}" for k in checkpoints) + f"   {frac:.0%}")
