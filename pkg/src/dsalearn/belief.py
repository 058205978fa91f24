"""Occupancy belief recursions.

Known-amplitude trackers keep one occupancy probability per channel. The
learning tracker keeps, per channel, an ``N x 2`` table of joint posterior
mass over (amplitude hypothesis, channel state); a batch of channels is an
array of shape ``(..., N, 2)``.

All functions broadcast over leading array dimensions so the simulator can
run many episodes at once. Bayes updates are done with log-densities.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .markov import TransitionMatrix, predict, stationary_occupancy
from .observation import llr

UNDERFLOW = "belief_underflow"


@dataclass(frozen=True)
class AckEvent:
    accessed: bool
    ack_received: bool

    def __post_init__(self):
        if self.ack_received and not self.accessed:
            raise ValueError("an ACK can only follow an access")


def initial_beliefs(num_channels: int, P: TransitionMatrix) -> np.ndarray:
    return np.full(num_channels, stationary_occupancy(P))


def _sum_last(x):
    # fixed left-to-right order, independent of the leading shape
    acc = x[..., 0].copy()
    for i in range(1, x.shape[-1]):
        acc += x[..., i]
    return acc


def _sigmoid(z):
    # exp(-|z|) never overflows
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def posterior_known(q, y, theta, sigma, diagnostics: Counter | None = None):
    """Bayes step from predicted occupancy ``q`` given observation ``y``."""
    q = np.asarray(q, dtype=float)
    lr = llr(y, theta, sigma)
    with np.errstate(divide="ignore"):
        logit = np.log(q) - np.log1p(-q) + lr
    bad = ~np.isfinite(lr)
    # q in {0, 1} is absorbing; an infinite logit there is exact
    out = np.where(q == 0.0, 0.0, np.where(q == 1.0, 1.0, _sigmoid(np.nan_to_num(logit))))
    if np.any(bad):
        out = np.where(bad, q, out)
        if diagnostics is not None:
            diagnostics[UNDERFLOW] += int(np.count_nonzero(bad))
    return float(out) if out.ndim == 0 else out


def update_known(p_prev, y, theta, sigma, P: TransitionMatrix, diagnostics: Counter | None = None):
    """Belief of a sensed channel using the occupied-state density for ``theta``."""
    return posterior_known(predict(p_prev, P), y, theta, sigma, diagnostics)


def propagate_unsensed(p_prev, P: TransitionMatrix):
    return predict(p_prev, P)


def posterior_ack(q, accessed, ack, zeta, epsilon, use_no_access_info=True):
    """ACK-only Bayes step from predicted occupancy ``q``.

    With error-free ACKs an access reveals the state. Without an access the
    only evidence is that the sensing statistic cleared the threshold, which
    happens with probability ``1 - zeta`` when occupied and ``epsilon`` when
    free.
    """
    q = np.asarray(q, dtype=float)
    accessed = np.asarray(accessed, dtype=bool)
    ack = np.asarray(ack, dtype=bool)
    if use_no_access_info:
        num = q * (1.0 - zeta)
        den = num + (1.0 - q) * epsilon
        with np.errstate(invalid="ignore", divide="ignore"):
            declined = np.where(den > 0, num / np.where(den > 0, den, 1.0), q)
    else:
        declined = q
    out = np.where(accessed, np.where(ack, 0.0, 1.0), declined)
    return float(out) if out.ndim == 0 else out


def update_ack(p_prev, event: AckEvent, zeta, epsilon, P: TransitionMatrix, use_no_access_info=True):
    q = predict(p_prev, P)
    return posterior_ack(q, event.accessed, event.ack_received, zeta, epsilon, use_no_access_info)


def posterior_combined(q, y, accessed, ack, theta, sigma, diagnostics: Counter | None = None):
    """Observation-driven step, overridden by the ACK bit after an access."""
    from_obs = posterior_known(q, y, theta, sigma, diagnostics)
    out = np.where(np.asarray(accessed, dtype=bool), np.where(np.asarray(ack, dtype=bool), 0.0, 1.0), from_obs)
    return float(out) if out.ndim == 0 else out


def update_combined(p_prev, y, event: AckEvent, theta, sigma, P: TransitionMatrix, diagnostics: Counter | None = None):
    return posterior_combined(predict(p_prev, P), y, event.accessed, event.ack_received, theta, sigma, diagnostics)


# --- joint (amplitude, state) beliefs -------------------------------------------


def initial_joint(num_channels: int, prior, P: TransitionMatrix) -> np.ndarray:
    """``(L, N, 2)`` array of prior x stationary mass."""
    ps = stationary_occupancy(P)
    single = np.outer(np.asarray(prior, dtype=float), [1.0 - ps, ps])
    return np.broadcast_to(single, (num_channels,) + single.shape).copy()


def joint_predict(Q, P: TransitionMatrix) -> np.ndarray:
    """Advance the state coordinate of ``Q[..., i, j]`` by one transition."""
    Q = np.asarray(Q, dtype=float)
    q0, q1 = Q[..., 0], Q[..., 1]
    # written out elementwise so results do not depend on batch shape
    return np.stack((P.p00 * q0 + P.p10 * q1, P.p01 * q0 + P.p11 * q1), axis=-1)


def joint_update(H, y, theta_set, sigma, diagnostics: Counter | None = None) -> np.ndarray:
    """Bayes step of ``H[..., i, j]`` on observation ``y`` of a sensed channel.

    ``y`` broadcasts against the leading dimensions of ``H``.
    """
    H = np.asarray(H, dtype=float)
    mu = np.asarray(theta_set, dtype=float)
    y = np.asarray(y, dtype=float)[..., None]
    s2 = 2.0 * sigma * sigma
    # the common -log(sigma sqrt(2 pi)) term cancels in the normalisation
    logf = np.stack(np.broadcast_arrays(-(y * y) / s2, -((y - mu) ** 2) / s2), axis=-1)
    with np.errstate(divide="ignore"):
        logw = np.log(H) + logf
    peak = logw.max(axis=(-2, -1), keepdims=True)
    ok = np.isfinite(peak)
    w = np.exp(logw - np.where(ok, peak, 0.0))
    total = _sum_last(_sum_last(w))[..., None, None]
    ok &= total > 0
    out = np.where(ok, w / np.where(ok, total, 1.0), H)
    if diagnostics is not None and not np.all(ok):
        diagnostics[UNDERFLOW] += int(np.count_nonzero(~ok))
    return out


def theta_posterior(Q) -> np.ndarray:
    """Posterior mass of each amplitude hypothesis."""
    return _sum_last(np.asarray(Q))


def occupancy_marginal(H):
    """Free-state probability ``sum_i H[..., i, 0]``.

    Despite the name this is the mass of the *free* state, which is what the
    learning selection rule scores.
    """
    out = _sum_last(np.asarray(H)[..., 0])
    return float(out) if np.ndim(out) == 0 else out
