"""Channel selection and access rules."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .belief import occupancy_marginal
from .observation import access_threshold, false_alarm, worst_case_theta


class PolicyKind(enum.Enum):
    G1_KNOWN = "G1"
    G2_ACK = "G2"
    G3_COMBINED = "G3"
    WORST_CASE = "WorstCase"
    LEARNING = "Learning"

    @classmethod
    def parse(cls, name: str) -> "PolicyKind":
        key = name.strip().lower().replace("_", "").replace("-", "")
        for kind in cls:
            if kind.value.lower() == key or kind.name.lower().replace("_", "") == key:
                return kind
        raise ValueError(f"unknown policy {name!r}; choose from {[k.value for k in cls]}")


def greedy_select(q) -> int:
    """Channel most likely to be free; lowest index wins ties."""
    return int(np.argmax(1.0 - np.asarray(q, dtype=float)))


def access_known(y, tau):
    return np.asarray(y) < tau if np.ndim(y) else bool(y < tau)


def access_worst_case(y, theta_set, sigma, zeta):
    """Single threshold test designed for the smallest amplitude."""
    tau_w = access_threshold(zeta, worst_case_theta(theta_set), sigma)
    return access_known(y, tau_w)


def access_all_hypotheses(y, theta_set, sigma, zeta):
    """Access only if every per-hypothesis test allows it (product of indicators)."""
    ok = np.ones(np.shape(y), dtype=bool)
    for th in theta_set:
        ok &= np.asarray(y) < access_threshold(zeta, th, sigma)
    return ok if np.ndim(y) else bool(ok)


@dataclass(frozen=True)
class PartitionResult:
    num_ignored: int
    ignored: tuple[int, ...]
    theta_upper: tuple[float, ...]
    theta_sharp: float
    sharp_index: int
    tau_r: float
    epsilon_a: float


def partition_order(b) -> np.ndarray:
    """Hypothesis indices sorted by ascending posterior.

    Equal posteriors put the larger amplitude first so it is dropped before a
    smaller one.
    """
    b = np.asarray(b, dtype=float)
    n = b.shape[-1]
    rev = np.argsort(b[..., ::-1], axis=-1, kind="stable")
    return n - 1 - rev


def partition(b, theta_set, zeta: float, sigma: float) -> PartitionResult:
    """Drop the largest set of least-likely hypotheses whose mass stays below ``zeta``."""
    b = np.asarray(b, dtype=float)
    if abs(b.sum() - 1.0) > 1e-6:
        raise ValueError(f"posterior sums to {b.sum()}, expected 1")
    order = partition_order(b)
    prefix = np.cumsum(b[order])
    n_ign = int(np.count_nonzero(prefix < zeta))
    ignored = tuple(sorted(int(i) for i in order[:n_ign]))
    assert math.fsum(b[list(ignored)]) < zeta
    upper = [i for i in range(len(b)) if i not in ignored]
    sharp = upper[0]
    tau = access_threshold(zeta, theta_set[sharp], sigma)
    return PartitionResult(
        num_ignored=n_ign,
        ignored=ignored,
        theta_upper=tuple(theta_set[i] for i in upper),
        theta_sharp=theta_set[sharp],
        sharp_index=sharp,
        tau_r=tau,
        epsilon_a=false_alarm(tau, sigma),
    )


def sharp_index_batch(b, zeta: float) -> np.ndarray:
    """Vectorised ``partition(...).sharp_index`` over leading dimensions of ``b``."""
    b = np.asarray(b, dtype=float)
    n = b.shape[-1]
    order = partition_order(b)
    prefix = np.cumsum(np.take_along_axis(b, order, axis=-1), axis=-1)
    n_ign = np.count_nonzero(prefix < zeta, axis=-1)
    keep_sorted = np.arange(n) >= n_ign[..., None]
    keep = np.zeros_like(keep_sorted)
    np.put_along_axis(keep, order, keep_sorted, axis=-1)
    # theta_set is ascending, so the first kept index is the smallest kept amplitude
    return np.argmax(keep, axis=-1)


def access_learning(y, part: PartitionResult):
    return access_known(y, part.tau_r)


def learning_scores(H, epsilon) -> np.ndarray:
    """Expected immediate reward (per unit bandwidth) of sensing each channel."""
    return occupancy_marginal(H) * (1.0 - np.asarray(epsilon))


def learning_greedy_select(H, partitions) -> int:
    eps = [p.epsilon_a for p in partitions]
    return int(np.argmax(learning_scores(H, eps)))


def forced_channel(k: int, C: int, num_channels: int, channel_order=None) -> int | None:
    """Round-robin channel for slot ``k``, or ``None`` when the slot is free.

    Each period of ``C * L`` slots ends with ``L`` forced slots that visit the
    channels in ``channel_order``; so every channel is sensed at least once per
    period, and a ``C`` beyond the horizon never forces anything.
    """
    if C < 1:
        raise ValueError("C must be >= 1")
    period = C * num_channels
    j = k % period - (period - num_channels)
    if j < 0:
        return None
    order = range(num_channels) if channel_order is None else channel_order
    return int(order[j])


def modified_select(k: int, C: int, channel_order, fallback: Callable[[], int]) -> int:
    forced = forced_channel(k, C, len(channel_order), channel_order)
    return fallback() if forced is None else forced
