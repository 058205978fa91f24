import math
from dataclasses import replace

import numpy as np
import pytest
from conftest import known_obs, param_obs

from dsalearn.bound import upper_bound
from dsalearn.markov import ChannelSetModel
from dsalearn.observation import ObservationModel, access_threshold, db_to_amplitude, false_alarm
from dsalearn.policy import PolicyKind
from dsalearn.sim import (
    SimConfig,
    Streams,
    draw_streams,
    episode_seed,
    interference_estimate,
    interference_from_traces,
    posterior_convergence_trace,
    replay_discounted_reward,
    run_episode,
    run_monte_carlo,
    simulate,
    splitmix64,
    with_policy,
)

G1 = PolicyKind.G1_KNOWN


def cfg(model, obs, kind=G1, zeta=0.01, horizon=500, runs=20, **kw):
    return SimConfig(model, obs, kind, zeta, 0.999, horizon, runs, **kw)


def test_splitmix64_reference_values():
    # first outputs of the reference SplitMix64 generator seeded with 0
    state = 0
    outs = []
    for _ in range(3):
        state = (state + 0x9E3779B97F4A7C15) & ((1 << 64) - 1)
        outs.append(splitmix64(state))
    assert outs == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    assert episode_seed(0, 0) == outs[0]


def test_config_validation(two_channels):
    with pytest.raises(ValueError, match="zeta"):
        cfg(two_channels, known_obs(0.0), zeta=0.0)
    with pytest.raises(ValueError, match="horizon"):
        cfg(two_channels, known_obs(0.0), horizon=0)
    with pytest.raises(ValueError, match="one true amplitude"):
        cfg(two_channels, known_obs(0.0, L=3))
    with pytest.raises(ValueError, match="permutation"):
        cfg(two_channels, known_obs(0.0), channel_order=(0, 0))


def test_single_slot_mechanics(two_channels):
    c = cfg(two_channels, known_obs(5.0), horizon=1, runs=1, round_robin_C=1)
    # init 1.0 > p*: free before slot 0; 0.99 > p01: stays free; very negative noise
    streams = Streams(np.ones((1, 2)), np.full((1, 1, 2), 0.99), np.full((1, 1), -10.0))
    tr = simulate(c, streams, record=True).traces[0]
    assert len(tr.reward) == 1
    assert tr.sensed[0] == 0 and not tr.occupied[0] and tr.access[0]
    assert tr.reward[0] == 1.0 and tr.discounted_reward == 1.0


def test_rewards_scale_with_bandwidth(P):
    # zero bandwidth is rejected by the model, so check linear scaling instead
    a = run_episode(cfg(ChannelSetModel(2, P, 1.0), known_obs(3.0)), 5)
    b = run_episode(cfg(ChannelSetModel(2, P, 0.25), known_obs(3.0)), 5)
    np.testing.assert_array_equal(b.reward, 0.25 * a.reward)
    np.testing.assert_array_equal(a.access, b.access)


def test_episode_determinism(two_channels):
    for kind in PolicyKind:
        obs = param_obs(1.0) if kind in (PolicyKind.WORST_CASE, PolicyKind.LEARNING) else known_obs(1.0)
        c = cfg(two_channels, obs, kind)
        a, b = run_episode(c, 123), run_episode(c, 123)
        for f in ("sensed", "occupied", "observation", "access", "reward", "occupancy"):
            np.testing.assert_array_equal(getattr(a, f), getattr(b, f))
        assert a.discounted_reward == b.discounted_reward


@pytest.mark.parametrize("kind", list(PolicyKind))
def test_reward_accounting_identity(two_channels, kind):
    obs = param_obs(3.0) if kind in (PolicyKind.WORST_CASE, PolicyKind.LEARNING) else known_obs(3.0)
    c = cfg(two_channels, obs, kind, horizon=2000)
    tr = run_episode(c, 9)
    np.testing.assert_array_equal(tr.reward, (~tr.occupied & tr.access).astype(float))
    assert replay_discounted_reward(tr, 0.999, 1.0) == tr.discounted_reward
    assert tr.discounted_reward >= 0


def test_batch_composition_does_not_matter(two_channels):
    c = cfg(two_channels, param_obs(1.0), PolicyKind.LEARNING, runs=37, horizon=300)
    ref = run_monte_carlo(c, batch_size=37)
    for bs in (1, 5):
        other = run_monte_carlo(c, batch_size=bs)
        np.testing.assert_array_equal(other.episode_rewards, ref.episode_rewards)
        np.testing.assert_array_equal(other.mass_on_truth, ref.mass_on_truth)


def test_parallel_determinism(two_channels):
    c = cfg(two_channels, known_obs(0.0), runs=30)
    a = run_monte_carlo(c, threads=1, batch_size=7)
    b = run_monte_carlo(c, threads=4, batch_size=7)
    np.testing.assert_array_equal(a.episode_rewards, b.episode_rewards)
    assert a.mean_reward == b.mean_reward and a.std_err == b.std_err
    assert a.interference == b.interference


def test_runs_one_equals_episode(two_channels):
    c = cfg(two_channels, known_obs(2.0), runs=1, master_seed=77)
    res = run_monte_carlo(c)
    tr = run_episode(c, episode_seed(77, 0))
    assert res.mean_reward == tr.discounted_reward
    assert res.interference.events == int(tr.occupied.sum())


def test_standard_error_shrinks(two_channels):
    c = cfg(two_channels, known_obs(0.0), horizon=1000, runs=200)
    se1 = run_monte_carlo(c).std_err
    se2 = run_monte_carlo(replace(c, runs=400)).std_err
    assert se2 / se1 == pytest.approx(1 / math.sqrt(2), rel=0.2)


def test_g1_not_worse_than_g2(two_channels):
    base = cfg(two_channels, known_obs(0.0), horizon=3000, runs=100)
    g1 = run_monte_carlo(base)
    g2 = run_monte_carlo(with_policy(base, PolicyKind.G2_ACK))
    assert g1.mean_reward >= g2.mean_reward - g2.std_err


class TestInterference:
    def test_never_access(self, two_channels):
        # a vanishing limit puts the threshold about 7 sigma below the occupied mean
        res = run_monte_carlo(cfg(two_channels, known_obs(0.0), zeta=1e-12, horizon=200))
        assert res.interference.rate == 0.0 and res.interference.events > 0

    def test_insufficient_events(self):
        est = interference_estimate(0, 0)
        assert not est.sufficient and est.rate is None and est.ci_lo is None

    def test_wilson_interval(self):
        est = interference_estimate(1000, 10)
        # Wilson 95% bounds for 10 / 1000
        assert est.ci_lo == pytest.approx(0.0054408, abs=1e-7)
        assert est.ci_hi == pytest.approx(0.0183095, abs=1e-7)
        assert est.ci_lo < est.rate < est.ci_hi

    def test_from_traces(self, two_channels):
        c = cfg(two_channels, known_obs(0.0), horizon=400)
        traces = [run_episode(c, s) for s in (1, 2)]
        est = interference_from_traces(traces)
        assert est.events == sum(int(t.occupied.sum()) for t in traces)
        assert est.accesses == sum(int((t.occupied & t.access).sum()) for t in traces)

    def test_calibrated_g1(self, two_channels):
        zeta = 0.01
        res = run_monte_carlo(cfg(two_channels, known_obs(0.0), zeta=zeta, horizon=10000, runs=40))
        n = res.interference.events
        assert n >= 10**5
        assert abs(res.interference.rate - zeta) <= 3 * math.sqrt(zeta * (1 - zeta) / n)

    def test_rate_ordered_in_zeta(self, two_channels):
        rates = [
            run_monte_carlo(cfg(two_channels, known_obs(0.0), zeta=z, horizon=2000, runs=20)).interference.rate
            for z in (0.01, 0.1)
        ]
        assert rates[0] < rates[1]


def test_policy_ordering_at_high_snr(two_channels):
    kw = dict(zeta=0.01, horizon=4000, runs=60, master_seed=3)
    known = run_monte_carlo(cfg(two_channels, known_obs(5.0), G1, **kw))
    learn = run_monte_carlo(cfg(two_channels, param_obs(5.0), PolicyKind.LEARNING, **kw))
    worst = run_monte_carlo(cfg(two_channels, param_obs(5.0), PolicyKind.WORST_CASE, **kw))
    se = max(known.std_err, learn.std_err, worst.std_err)
    assert known.mean_reward >= learn.mean_reward - 2 * se
    assert learn.mean_reward >= worst.mean_reward - 2 * se


@pytest.mark.parametrize("kind", [G1, PolicyKind.G2_ACK, PolicyKind.G3_COMBINED])
def test_bound_dominates(two_channels, kind):
    zeta = 0.1
    res = run_monte_carlo(cfg(two_channels, known_obs(5.0), kind, zeta=zeta, horizon=3000, runs=40))
    eps = false_alarm(access_threshold(zeta, db_to_amplitude(5.0), 1.0), 1.0)
    assert res.mean_reward <= upper_bound(two_channels, 0.999, eps) + 3 * res.std_err


def test_single_hypothesis_trace_is_constant(two_channels):
    obs = ObservationModel(1.0, (1.0,), (1.0,), (0, 0))
    mass = posterior_convergence_trace(cfg(two_channels, obs, PolicyKind.LEARNING, horizon=300, runs=5))
    np.testing.assert_array_equal(mass, 1.0)


def test_trace_stays_normalised(two_channels):
    c = cfg(two_channels, param_obs(3.0), PolicyKind.LEARNING, horizon=500)
    tr = run_episode(c, 4)
    assert np.all((tr.theta_posterior >= 0) & (tr.theta_posterior <= 1))
    np.testing.assert_allclose(tr.theta_posterior.sum(-1), 1.0, atol=1e-9)
    res = run_monte_carlo(c)
    assert res.mass_on_truth[:, 0] == pytest.approx(1 / 6)


def test_trace_needs_learning(two_channels):
    with pytest.raises(ValueError):
        posterior_convergence_trace(cfg(two_channels, known_obs(1.0)))


def test_forced_round_robin_in_engine(two_channels):
    tr = run_episode(cfg(two_channels, param_obs(1.0), PolicyKind.LEARNING, horizon=50, round_robin_C=1), 2)
    np.testing.assert_array_equal(tr.sensed, np.arange(50) % 2)
    tr = run_episode(cfg(two_channels, known_obs(1.0), horizon=60, round_robin_C=3, channel_order=(1, 0)), 2)
    np.testing.assert_array_equal(tr.sensed[4::6], 1)
    np.testing.assert_array_equal(tr.sensed[5::6], 0)


def test_streams_shape():
    s = draw_streams([1, 2, 3], 10, 2)
    assert s.init.shape == (3, 2) and s.trans.shape == (10, 3, 2) and s.noise.shape == (10, 3)
    # the streams of one episode do not depend on its neighbours in the batch
    t = draw_streams([2], 10, 2)
    np.testing.assert_array_equal(s.trans[:, 1], t.trans[:, 0])
