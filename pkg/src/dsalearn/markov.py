"""Two-state channel occupancy chains.

State 0 is "free", state 1 is "occupied". Every channel in a
:class:`ChannelSetModel` shares the same :class:`TransitionMatrix`.

Joint states of ``L`` channels are indexed 0 .. 2**L - 1 with channel ``a``
stored in bit ``a`` (least significant bit is channel 0). The all-occupied
state is therefore the last index, ``2**L - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

MAX_JOINT_CHANNELS = 16
_STOCH_TOL = 1e-12


class CapacityError(ValueError):
    """Raised when a 2**L joint construction would be too large."""


@dataclass(frozen=True)
class TransitionMatrix:
    p00: float
    p01: float
    p10: float
    p11: float

    @classmethod
    def from_array(cls, m) -> "TransitionMatrix":
        m = np.asarray(m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError(f"transition matrix must be 2x2, got {m.shape}")
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.p00, self.p01], [self.p10, self.p11]])

    def violations(self) -> list[str]:
        out = []
        for name in ("p00", "p01", "p10", "p11"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                out.append(f"stochasticity: {name}={v} outside [0, 1]")
        if abs(self.p00 + self.p01 - 1.0) > _STOCH_TOL:
            out.append(f"stochasticity: row 0 sums to {self.p00 + self.p01}")
        if abs(self.p10 + self.p11 - 1.0) > _STOCH_TOL:
            out.append(f"stochasticity: row 1 sums to {self.p10 + self.p11}")
        for j, pjj in ((0, self.p00), (1, self.p11)):
            if not 0.0 < pjj < 1.0:
                out.append(f"absorbing or alternating state: P({j},{j})={pjj} not in (0, 1)")
        if not self.p00 > self.p10:
            out.append(f"not positively correlated: P(0,0)={self.p00} <= P(1,0)={self.p10}")
        return out


@dataclass(frozen=True)
class ChannelSetModel:
    num_channels: int
    transition: TransitionMatrix
    bandwidth: float = 1.0


REFERENCE_TRANSITION = TransitionMatrix(0.9, 0.1, 0.2, 0.8)


def validate(model: ChannelSetModel) -> list[str]:
    """Return the list of violated model invariants; empty means valid."""
    out = []
    if int(model.num_channels) != model.num_channels or model.num_channels < 1:
        out.append(f"num_channels={model.num_channels} must be a positive integer")
    if not model.bandwidth > 0:
        out.append(f"bandwidth={model.bandwidth} must be > 0")
    out.extend(model.transition.violations())
    return out


def stationary_occupancy(P: TransitionMatrix) -> float:
    """Stationary probability of the occupied state, p01 / (p01 + p10)."""
    if not (0.0 < P.p00 < 1.0 and 0.0 < P.p11 < 1.0):
        raise ValueError("stationary distribution requires 0 < P(j,j) < 1")
    return P.p01 / (P.p01 + P.p10)


def predict(p, P: TransitionMatrix):
    """One-step occupancy prediction ``p11 * p + p01 * (1 - p)``.

    Works elementwise on arrays.
    """
    arr = np.asarray(p, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
        raise ValueError(f"occupancy probability outside [0, 1]: {p!r}")
    q = P.p11 * arr + P.p01 * (1.0 - arr)
    return float(q) if np.ndim(q) == 0 else q


def joint_matrix(model: ChannelSetModel) -> np.ndarray:
    """Transition matrix of the vector of ``L`` independent channel states.

    Entry ``[x, y]`` is the product of the single-channel probabilities for
    each bit. Built as a Kronecker product with the highest channel as the
    leftmost factor so that channel 0 lands in the least significant bit.
    """
    L = model.num_channels
    if L > MAX_JOINT_CHANNELS:
        raise CapacityError(
            f"joint chain needs 2**{L} states; at most {MAX_JOINT_CHANNELS} channels supported"
        )
    P = model.transition.matrix
    return reduce(np.kron, [P] * L)


def state_bits(num_channels: int) -> np.ndarray:
    """``(2**L, L)`` array whose row ``x`` holds the channel states of joint state ``x``."""
    idx = np.arange(2**num_channels)
    return (idx[:, None] >> np.arange(num_channels)[None, :]) & 1


def joint_state_distribution(q) -> np.ndarray:
    """Product-Bernoulli law of the joint state given per-channel occupancy ``q``."""
    q = np.asarray(q, dtype=float)
    if q.ndim != 1:
        raise ValueError("q must be a vector")
    if np.any((q < 0.0) | (q > 1.0)):
        raise ValueError(f"occupancy probability outside [0, 1]: {q!r}")
    if len(q) > MAX_JOINT_CHANNELS:
        raise CapacityError(f"{len(q)} channels exceeds joint capacity")
    bits = state_bits(len(q))
    return np.prod(np.where(bits == 1, q[None, :], 1.0 - q[None, :]), axis=1)
