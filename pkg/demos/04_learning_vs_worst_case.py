"""Unknown signal amplitude: design for the worst case, or learn it?

The secondary user only knows the primary's amplitude lies in a finite set.
Designing the access test for the smallest amplitude is safe but timid.
The learning policy keeps a joint posterior over (amplitude, state), drops
hypotheses whose total mass is below the interference limit, and tests
against the smallest amplitude still in play. Both respect the limit.
"""

from dsalearn.markov import REFERENCE_TRANSITION, ChannelSetModel
from dsalearn.observation import ObservationModel, db_to_amplitude, uniform_prior
from dsalearn.policy import PolicyKind
from dsalearn.sim import SimConfig, run_monte_carlo

model = ChannelSetModel(2, REFERENCE_TRANSITION)
db_set = (-5.0, -3.0, -1.0, 1.0, 3.0, 5.0)
theta_set = tuple(db_to_amplitude(d) for d in db_set)
zeta = 0.01

print(" true SNR   policy      reward (se)   P(access | occupied)")
for true_db in (-5.0, 1.0, 5.0):
    i = db_set.index(true_db)
    for kind in (PolicyKind.G1_KNOWN, PolicyKind.LEARNING, PolicyKind.WORST_CASE):
        if kind is PolicyKind.G1_KNOWN:
            obs = ObservationModel(1.0, (theta_set[i],), (1.0,), (0, 0))
        else:
            obs = ObservationModel(1.0, theta_set, uniform_prior(6), (i, i))
        r = run_monte_carlo(SimConfig(model, obs, kind, zeta, 0.999, 10000, 100, 2))
        print(f"{true_db:+6.0f} dB  {kind.value:<10} {r.mean_reward:8.2f} ({r.std_err:.2f})   {r.interference.rate:.4f}")
