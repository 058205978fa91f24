"""What does the tracker gain from the sensing readings themselves?

G1 updates beliefs from the readings, G2 only from ACKs (plus the fact that
it declined to transmit), and G3 from both. The ACK adds little once the
readings are used; ACKs alone lose a noticeable share of the reward.
"""

from dsalearn.markov import REFERENCE_TRANSITION, ChannelSetModel
from dsalearn.observation import ObservationModel, db_to_amplitude
from dsalearn.policy import PolicyKind
from dsalearn.sim import SimConfig, run_monte_carlo

model = ChannelSetModel(2, REFERENCE_TRANSITION)
kinds = (PolicyKind.G1_KNOWN, PolicyKind.G2_ACK, PolicyKind.G3_COMBINED)

print(" SNR " + "".join(f"{k.value:>16}" for k in kinds))
for snr in (-5.0, -2.0, 0.0, 2.0, 5.0):
    obs = ObservationModel(1.0, (db_to_amplitude(snr),), (1.0,), (0, 0))
    cells = []
    for kind in kinds:
        r = run_monte_carlo(SimConfig(model, obs, kind, 0.01, 0.999, 10000, 100, 5))
        cells.append(f"{r.mean_reward:9.2f} ({r.std_err:.2f})")
    print(f"{snr:+4.0f} " + "".join(f"{c:>16}" for c in cells))
