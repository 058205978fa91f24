"""Monte Carlo episode engine.

Episodes are simulated in batches: every per-slot operation is elementwise
across the batch, and each episode draws all of its randomness up front from
its own generator. Per-episode results therefore do not depend on batch size,
batch composition, or the number of worker threads.

Slot ``k`` of an episode:

1. the policy picks a channel from the statistics at the end of slot ``k-1``;
2. all channel states make one Markov transition;
3. the chosen channel is sensed;
4. the access decision is taken on that observation;
5. the reward ``B * [free] * [access]`` is recorded;
6. the tracker is updated.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import belief
from .markov import ChannelSetModel, stationary_occupancy, validate
from .observation import (
    ObservationModel,
    access_threshold,
    false_alarm,
    inv_norm_cdf,
    thresholds,
    worst_case_theta,
)
from .policy import PolicyKind, forced_channel, sharp_index_batch

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
DEFAULT_BATCH = 100


def splitmix64(x: int) -> int:
    """SplitMix64 output finaliser (Steele, Lea & Flood 2014)."""
    z = x & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def episode_seed(master_seed: int, index: int) -> int:
    return splitmix64(master_seed + (index + 1) * _GAMMA)


@dataclass(frozen=True)
class SimConfig:
    model: ChannelSetModel
    obs: ObservationModel
    policy: PolicyKind
    zeta: float
    alpha: float
    horizon: int
    runs: int
    master_seed: int = 0
    round_robin_C: int | None = None  # None: beyond the horizon, never forces
    channel_order: tuple[int, ...] | None = None
    g2_use_no_access_info: bool = True

    def __post_init__(self):
        errs = validate(self.model)
        errs += self.obs.violations()
        if len(self.obs.true_theta_index) != self.model.num_channels:
            errs.append("need one true amplitude index per channel")
        if not 0.0 < self.zeta < 1.0:
            errs.append(f"zeta={self.zeta} must lie in (0, 1)")
        if not 0.0 <= self.alpha < 1.0:
            errs.append(f"alpha={self.alpha} must lie in [0, 1)")
        if self.horizon < 1:
            errs.append("horizon must be >= 1")
        if self.runs < 1:
            errs.append("runs must be >= 1")
        if self.round_robin_C is not None and self.round_robin_C < 1:
            errs.append("round_robin_C must be >= 1")
        if self.channel_order is not None and sorted(self.channel_order) != list(range(self.model.num_channels)):
            errs.append("channel_order must be a permutation of the channels")
        if errs:
            raise ValueError("; ".join(errs))

    @property
    def C(self) -> int:
        return self.horizon + 1 if self.round_robin_C is None else self.round_robin_C


@dataclass
class Streams:
    """Pre-drawn randomness for a batch, time-major.

    ``init[e, a]`` decides the state before slot 0, ``trans[k, e, a]`` the
    transition into slot ``k``, and ``noise[k, e]`` is the standard normal
    noise of the channel sensed in slot ``k``.
    """

    init: np.ndarray
    trans: np.ndarray
    noise: np.ndarray

    @property
    def size(self) -> int:
        return self.init.shape[0]


def draw_streams(seeds, horizon: int, num_channels: int) -> Streams:
    init, trans, noise = [], [], []
    for s in seeds:
        rng = np.random.default_rng(s)
        init.append(rng.random(num_channels))
        trans.append(rng.random((horizon, num_channels)))
        noise.append(rng.standard_normal(horizon))
    return Streams(
        np.array(init),
        np.ascontiguousarray(np.stack(trans, axis=1)),
        np.ascontiguousarray(np.stack(noise, axis=1)),
    )


@dataclass
class EpisodeTrace:
    """Per-slot record of one episode."""

    sensed: np.ndarray
    occupied: np.ndarray
    observation: np.ndarray
    access: np.ndarray
    reward: np.ndarray
    discounted_reward: float
    occupancy: np.ndarray  # (T, L) P(occupied) after each slot's update
    theta_posterior: np.ndarray | None = None  # (T, L, N) after each update


@dataclass
class BatchOutcome:
    discounted: np.ndarray
    occupied_events: np.ndarray
    interference_events: np.ndarray
    accesses: np.ndarray
    mass_on_truth: np.ndarray | None
    diagnostics: Counter
    traces: list[EpisodeTrace] | None = None


def simulate(config: SimConfig, streams: Streams, record: bool = False) -> BatchOutcome:
    """Run one batch of episodes on the given random streams."""
    model, obs = config.model, config.obs
    P = model.transition
    E, T, L = streams.size, config.horizon, model.num_channels
    if streams.trans.shape[0] < T:
        raise ValueError("streams shorter than the horizon")
    kind = config.policy
    sigma, zeta = obs.sigma, config.zeta
    theta_true = obs.true_theta  # (L,)
    ar = np.arange(E)
    powers = np.array([config.alpha**k for k in range(T)])
    order = config.channel_order
    diag: Counter = Counter()

    ps = stationary_occupancy(P)
    S = streams.init < ps  # state of slot -1
    up_prob = np.array([P.p01, P.p11])

    learning = kind is PolicyKind.LEARNING
    if learning:
        thr = thresholds(zeta, obs.theta_set, sigma)
        tau_table = np.array(thr.tau)
        eps_table = np.array(thr.epsilon)
        Q = np.broadcast_to(belief.initial_joint(L, obs.prior, P), (E, L, len(obs.theta_set), 2)).copy()
        mass = np.empty((E, T))
        true_idx = np.array(obs.true_theta_index)
    else:
        mass = None
        p = np.full((E, L), ps)
        if kind is PolicyKind.WORST_CASE:
            theta_track = np.full(L, worst_case_theta(obs.theta_set))
        else:
            theta_track = theta_true
        tau_chan = np.array([access_threshold(zeta, th, sigma) for th in theta_track])
        eps_chan = np.array([false_alarm(t, sigma) for t in tau_chan])

    disc = np.zeros(E)
    n_occ = np.zeros(E, dtype=np.int64)
    n_int = np.zeros(E, dtype=np.int64)
    n_acc = np.zeros(E, dtype=np.int64)
    if record:
        rec_u = np.empty((T, E), dtype=np.int64)
        rec_s = np.empty((T, E), dtype=bool)
        rec_y = np.empty((T, E))
        rec_a = np.empty((T, E), dtype=bool)
        rec_r = np.empty((T, E))
        rec_p = np.empty((T, E, L))
        rec_b = np.empty((T, E, L, len(obs.theta_set))) if learning else None

    for k in range(T):
        # 1. selection
        forced = forced_channel(k, config.C, L, order)
        if learning:
            b = belief.theta_posterior(Q)
            m = b[:, np.arange(L), true_idx]
            mass[:, k] = m.min(axis=1)
            sharp = sharp_index_batch(b, zeta)
            H = belief.joint_predict(Q, P)
            if forced is None:
                u = np.argmax(belief.occupancy_marginal(H) * (1.0 - eps_table[sharp]), axis=1)
            else:
                u = np.full(E, forced)
            tau_u = tau_table[sharp[ar, u]]
        else:
            q = P.p11 * p + P.p01 * (1.0 - p)
            u = np.argmin(q, axis=1) if forced is None else np.full(E, forced)
            tau_u = tau_chan[u]

        # 2. transition
        S = streams.trans[k] < up_prob[S.astype(np.intp)]
        # 3. sensing
        s_u = S[ar, u]
        y = np.where(s_u, theta_true[u], 0.0) + sigma * streams.noise[k]
        # 4. access
        acc = y < tau_u
        # 5. reward
        r = model.bandwidth * (~s_u & acc)
        disc += powers[k] * r
        n_occ += s_u
        n_int += s_u & acc
        n_acc += acc

        # 6. tracking
        if learning:
            Q = H
            Q[ar, u] = belief.joint_update(H[ar, u], y, obs.theta_set, sigma, diag)
        else:
            q_u = q[ar, u]
            if kind is PolicyKind.G2_ACK:
                new = belief.posterior_ack(q_u, acc, ~s_u & acc, zeta, eps_chan[u], config.g2_use_no_access_info)
            elif kind is PolicyKind.G3_COMBINED:
                new = belief.posterior_combined(q_u, y, acc, ~s_u & acc, theta_track[u], sigma, diag)
            else:
                new = belief.posterior_known(q_u, y, theta_track[u], sigma, diag)
            p = q
            p[ar, u] = new

        if record:
            rec_u[k], rec_s[k], rec_y[k], rec_a[k], rec_r[k] = u, s_u, y, acc, r
            if learning:
                rec_b[k] = belief.theta_posterior(Q)
                rec_p[k] = 1.0 - belief.occupancy_marginal(Q)
            else:
                rec_p[k] = p

    traces = None
    if record:
        traces = [
            EpisodeTrace(
                sensed=rec_u[:, e].copy(),
                occupied=rec_s[:, e].copy(),
                observation=rec_y[:, e].copy(),
                access=rec_a[:, e].copy(),
                reward=rec_r[:, e].copy(),
                discounted_reward=float(disc[e]),
                occupancy=rec_p[:, e].copy(),
                theta_posterior=None if rec_b is None else rec_b[:, e].copy(),
            )
            for e in range(E)
        ]
    return BatchOutcome(disc, n_occ, n_int, n_acc, mass, diag, traces)


def run_episode(config: SimConfig, seed: int) -> EpisodeTrace:
    streams = draw_streams([seed], config.horizon, config.model.num_channels)
    return simulate(config, streams, record=True).traces[0]


def replay_discounted_reward(trace: EpisodeTrace, alpha: float, bandwidth: float) -> float:
    """Recompute the discounted reward of a trace slot by slot."""
    total = 0.0
    for k in range(len(trace.reward)):
        if not trace.occupied[k] and trace.access[k]:
            total += alpha**k * bandwidth
    return total


@dataclass(frozen=True)
class InterferenceEstimate:
    """Empirical ``P(access | sensed channel occupied)``.

    ``rate`` and the Wilson interval are ``None`` when no occupied channel was
    ever sensed.
    """

    events: int
    accesses: int
    rate: float | None
    ci_lo: float | None
    ci_hi: float | None

    @property
    def sufficient(self) -> bool:
        return self.events > 0


def interference_estimate(occupied_events: int, interference_events: int, level: float = 0.95) -> InterferenceEstimate:
    n, x = int(occupied_events), int(interference_events)
    if n == 0:
        return InterferenceEstimate(0, x, None, None, None)
    z = inv_norm_cdf(0.5 + level / 2)
    rate = x / n
    den = 1 + z * z / n
    centre = (rate + z * z / (2 * n)) / den
    half = z * math.sqrt(rate * (1 - rate) / n + z * z / (4 * n * n)) / den
    return InterferenceEstimate(n, x, rate, max(0.0, centre - half), min(1.0, centre + half))


def interference_from_traces(traces) -> InterferenceEstimate:
    n = sum(int(np.count_nonzero(t.occupied)) for t in traces)
    x = sum(int(np.count_nonzero(t.occupied & t.access)) for t in traces)
    return interference_estimate(n, x)


@dataclass
class SimResult:
    mean_reward: float
    std_err: float
    interference: InterferenceEstimate
    runs: int
    episode_rewards: np.ndarray
    mass_on_truth: np.ndarray | None = None  # (runs, T), learning only
    diagnostics: Counter = field(default_factory=Counter)

    @property
    def final_mass(self) -> np.ndarray | None:
        return None if self.mass_on_truth is None else self.mass_on_truth[:, -1]


def run_monte_carlo(config: SimConfig, threads: int = 1, batch_size: int = DEFAULT_BATCH) -> SimResult:
    seeds = [episode_seed(config.master_seed, i) for i in range(config.runs)]
    chunks = [seeds[i:i + batch_size] for i in range(0, len(seeds), batch_size)]
    L = config.model.num_channels

    def work(chunk):
        return simulate(config, draw_streams(chunk, config.horizon, L))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            outs = list(pool.map(work, chunks))
    else:
        outs = [work(c) for c in chunks]

    rewards = np.concatenate([o.discounted for o in outs])
    n = len(rewards)
    mean = math.fsum(rewards) / n
    se = math.sqrt(math.fsum((rewards - mean) ** 2) / (n - 1) / n) if n > 1 else 0.0
    diag = Counter()
    for o in outs:
        diag.update(o.diagnostics)
    mass = None
    if config.policy is PolicyKind.LEARNING:
        mass = np.concatenate([o.mass_on_truth for o in outs])
    inter = interference_estimate(
        sum(int(o.occupied_events.sum()) for o in outs),
        sum(int(o.interference_events.sum()) for o in outs),
    )
    return SimResult(mean, se, inter, n, rewards, mass, diag)


def posterior_convergence_trace(config: SimConfig, threads: int = 1) -> np.ndarray:
    """Run-averaged posterior mass on the true amplitude, one value per slot.

    Per run the mass is the smallest over channels, so a run counts as
    converged only once every channel has learned its amplitude.
    """
    if config.policy is not PolicyKind.LEARNING:
        raise ValueError("posterior traces need the learning policy")
    return run_monte_carlo(config, threads).mass_on_truth.mean(axis=0)


def with_policy(config: SimConfig, kind: PolicyKind) -> SimConfig:
    return replace(config, policy=kind)
