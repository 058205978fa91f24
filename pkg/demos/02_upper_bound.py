"""How close does the greedy policy get to the full-observation bound?

The bound pretends every channel's state is revealed after each slot. It is
cheap: one linear solve on the joint chain. We compare it with a Monte Carlo
estimate of the greedy known-amplitude policy.
"""

import numpy as np

from dsalearn.bound import full_observation_value_oracle, j_tilde, solve_w, upper_bound
from dsalearn.markov import REFERENCE_TRANSITION, ChannelSetModel, joint_matrix
from dsalearn.observation import ObservationModel, access_threshold, db_to_amplitude, false_alarm
from dsalearn.policy import PolicyKind
from dsalearn.sim import SimConfig, run_monte_carlo

model = ChannelSetModel(2, REFERENCE_TRANSITION)
alpha, zeta = 0.999, 0.1

# closed form against plain value iteration on the four joint states
w = solve_w(joint_matrix(model), alpha)
print("w  =", np.round(w, 4))
print("J~ =", np.round(j_tilde(w, 0.7, alpha, REFERENCE_TRANSITION), 4))
print("VI =", np.round(full_observation_value_oracle(model, alpha, 0.7), 4))

print("\n SNR   eps     bound    greedy (se)   ratio")
for snr in (-5.0, 0.0, 5.0):
    theta = db_to_amplitude(snr)
    eps = false_alarm(access_threshold(zeta, theta, 1.0), 1.0)
    ub = upper_bound(model, alpha, eps)
    obs = ObservationModel(1.0, (theta,), (1.0,), (0, 0))
    res = run_monte_carlo(SimConfig(model, obs, PolicyKind.G1_KNOWN, zeta, alpha, 10000, 100, 1))
    print(f"{snr:+4.0f}  {eps:.3f}  {ub:7.2f}  {res.mean_reward:7.2f} ({res.std_err:.2f})  {res.mean_reward / ub:.3f}")
