"""Upper bound on the optimal discounted reward.

The bound assumes every channel state is revealed once its slot's sensing is
done. Under that assumption the best policy senses a channel that was free in
the previous slot whenever one exists, which yields a closed form in terms
of the discounted number of visits to the all-occupied joint state.
"""

from __future__ import annotations

import numpy as np

from .markov import (
    ChannelSetModel,
    TransitionMatrix,
    joint_matrix,
    joint_state_distribution,
    stationary_occupancy,
    state_bits,
    validate,
)

RESIDUAL_TOL = 1e-10


def _check_alpha(alpha):
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"discount must lie in [0, 1), got {alpha}")


def solve_w(joint_P, alpha: float) -> np.ndarray:
    """Solve ``w = alpha * P w + e_full`` where ``e_full`` marks the all-occupied state."""
    _check_alpha(alpha)
    joint_P = np.asarray(joint_P, dtype=float)
    n = joint_P.shape[0]
    A = np.eye(n) - alpha * joint_P
    e = np.zeros(n)
    e[-1] = 1.0
    w = np.linalg.solve(A, e)  # LAPACK gesv, partial pivoting
    res = np.max(np.abs(A @ w - e))
    if not res <= RESIDUAL_TOL:
        raise RuntimeError(f"linear solve residual {res:.3e} exceeds {RESIDUAL_TOL}")
    return w


def j_tilde(w, kappa: float, alpha: float, P: TransitionMatrix) -> np.ndarray:
    """Full-observation value for every joint state of the previous slot."""
    return kappa * (P.p00 / (1.0 - alpha) - (P.p00 - P.p10) * np.asarray(w))


def upper_bound(model: ChannelSetModel, alpha: float, epsilon: float) -> float:
    errs = validate(model)
    if errs:
        raise ValueError("; ".join(errs))
    _check_alpha(alpha)
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"false-alarm rate must lie in (0, 1), got {epsilon}")
    P = model.transition
    kappa = model.bandwidth * (1.0 - epsilon)
    ps = stationary_occupancy(P)
    w = solve_w(joint_matrix(model), alpha)
    # the prediction of the stationary belief is itself
    dist = joint_state_distribution(np.full(model.num_channels, ps))
    return float(kappa * (1.0 - ps) + alpha * dist @ j_tilde(w, kappa, alpha, P))


def full_observation_value_oracle(model: ChannelSetModel, alpha: float, kappa: float,
                                  tol: float = 1e-10, max_iter: int = 1_000_000) -> np.ndarray:
    """Value iteration on the fully observed joint chain.

    State is the joint channel state of the previous slot, the action is the
    channel to access, and the reward is ``kappa`` if that channel is free in
    the current slot.
    """
    if model.num_channels > 8:
        raise ValueError("oracle limited to 8 channels")
    _check_alpha(alpha)
    PP = joint_matrix(model)
    free = (state_bits(model.num_channels) == 0).astype(float)
    reward = kappa * PP @ free  # [x, u]: expected reward of action u from x
    V = np.zeros(PP.shape[0])
    for _ in range(max_iter):
        V_new = np.max(reward + alpha * (PP @ V)[:, None], axis=1)
        step = np.max(np.abs(V_new - V))
        # contraction: distance to the fixed point <= alpha/(1-alpha) * step
        if step * alpha <= max(tol * (1.0 - alpha), 4 * np.finfo(float).eps * np.max(np.abs(V_new))):
            return V_new
        V = V_new
    raise RuntimeError("value iteration did not converge")


def greedy_full_observation_actions(model: ChannelSetModel, alpha: float, kappa: float) -> np.ndarray:
    """Optimal action sets of the fully observed problem, ``[x, u]`` boolean."""
    V = full_observation_value_oracle(model, alpha, kappa)
    PP = joint_matrix(model)
    free = (state_bits(model.num_channels) == 0).astype(float)
    q = kappa * PP @ free + alpha * (PP @ V)[:, None]
    return q >= q.max(axis=1, keepdims=True) - 1e-9
