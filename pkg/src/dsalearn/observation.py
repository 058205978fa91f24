"""Gaussian sensing model, access thresholds and false-alarm rates.

A free channel produces ``Y ~ N(0, sigma**2)``; an occupied one produces
``Y ~ N(theta, sigma**2)`` with an amplitude ``theta > 0`` taken from a finite
ordered set. The log-likelihood ratio is increasing in ``Y`` for every
positive ``theta``, so all access tests are carried out directly on ``Y``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Wichura, Algorithm AS 241 (PPND16), Applied Statistics 37 (1988).
# Relative accuracy about 1e-16 over the full double range.
_A = (
    3.3871328727963666080e0,
    1.3314166789178437745e2,
    1.9715909503065514427e3,
    1.3731693765509461125e4,
    4.5921953931549871457e4,
    6.7265770927008700853e4,
    3.3430575583588128105e4,
    2.5090809287301226727e3,
)
_B = (
    1.0,
    4.2313330701600911252e1,
    6.8718700749205790830e2,
    5.3941960214247511077e3,
    2.1213794301586595867e4,
    3.9307895800092710610e4,
    2.8729085735721942674e4,
    5.2264952788528545610e3,
)
_C = (
    1.42343711074968357734e0,
    4.63033784615654529590e0,
    5.76949722146069140550e0,
    3.64784832476320460504e0,
    1.27045825245236838258e0,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
)
_D = (
    1.0,
    2.05319162663775882187e0,
    1.67638483018380384940e0,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
)
_E = (
    6.65790464350110377720e0,
    5.46378491116411436990e0,
    1.78482653991729133580e0,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
)
_F = (
    1.0,
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-5,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
)


def _poly(coefs, x):
    acc = 0.0
    for c in reversed(coefs):
        acc = acc * x + c
    return acc


def inv_norm_cdf(p: float) -> float:
    """Standard normal quantile (AS 241)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile level must lie in (0, 1), got {p}")
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_A, r) / _poly(_B, r)
    r = p if q < 0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        val = _poly(_C, r) / _poly(_D, r)
    else:
        r -= 5.0
        val = _poly(_E, r) / _poly(_F, r)
    return -val if q < 0 else val


def norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def db_to_amplitude(snr_db: float, sigma: float = 1.0) -> float:
    """Mean amplitude for ``SNR = 20 log10(mu / sigma)``."""
    return sigma * 10.0 ** (snr_db / 20.0)


@dataclass(frozen=True)
class ObservationModel:
    """Sensing model shared by all channels.

    ``true_theta_index`` holds one index into ``theta_set`` per channel. Only
    the simulator reads it; policies see ``theta_set`` and ``prior``.
    """

    sigma: float
    theta_set: tuple[float, ...]
    prior: tuple[float, ...]
    true_theta_index: tuple[int, ...]

    def __post_init__(self):
        errs = self.violations()
        if errs:
            raise ValueError("; ".join(errs))

    def violations(self) -> list[str]:
        out = []
        if not self.sigma > 0:
            out.append(f"sigma={self.sigma} must be > 0")
        th = self.theta_set
        if len(th) == 0:
            out.append("theta_set is empty")
        else:
            if min(th) <= 0:
                out.append(f"min(theta_set)={min(th)} must be > 0")
            if any(b <= a for a, b in zip(th, th[1:])):
                out.append("theta_set must be strictly increasing")
        if len(self.prior) != len(th):
            out.append(f"prior has {len(self.prior)} entries for {len(th)} hypotheses")
        elif any(w < 0 for w in self.prior) or abs(math.fsum(self.prior) - 1.0) > 1e-12:
            out.append("prior must be nonnegative and sum to 1")
        if any(not 0 <= i < len(th) for i in self.true_theta_index):
            out.append(f"true_theta_index {self.true_theta_index} out of range")
        return out

    @property
    def true_theta(self) -> np.ndarray:
        return np.asarray(self.theta_set)[list(self.true_theta_index)]


def uniform_prior(n: int) -> tuple[float, ...]:
    return tuple([1.0 / n] * n)


def sample(state, theta, sigma, rng: np.random.Generator):
    """Draw one observation per entry of ``state``."""
    state = np.asarray(state)
    noise = rng.standard_normal(state.shape)
    return observe(state, theta, sigma, noise)


def observe(state, theta, sigma, noise):
    """Observation given pre-drawn standard normal ``noise``.

    The free-channel branch never touches ``theta``.
    """
    y = np.where(np.asarray(state) == 1, theta, 0.0) + sigma * np.asarray(noise)
    return float(y) if np.ndim(y) == 0 else y


def llr(y, theta, sigma):
    """``log f_theta(y) / f_0(y)`` for the Gaussian shift family."""
    s2 = sigma * sigma
    return (theta / s2) * np.asarray(y) - theta * theta / (2.0 * s2)


def log_density(y, mean, sigma):
    z = (np.asarray(y) - mean) / sigma
    return -0.5 * z * z - math.log(sigma) - 0.5 * math.log(2.0 * math.pi)


def access_threshold(zeta: float, theta: float, sigma: float) -> float:
    """Observation threshold with ``P(Y < tau | occupied, theta) = zeta``."""
    if not 0.0 < zeta < 1.0:
        raise ValueError(f"zeta must lie in (0, 1), got {zeta}")
    return theta + sigma * inv_norm_cdf(zeta)


def false_alarm(tau: float, sigma: float) -> float:
    """Probability that a free channel is declined, ``P(Y >= tau | free)``."""
    return 0.5 * math.erfc(tau / (sigma * math.sqrt(2.0)))


@dataclass(frozen=True)
class AccessThresholds:
    zeta: float
    tau: tuple[float, ...]
    epsilon: tuple[float, ...]


def thresholds(zeta: float, theta_set, sigma: float) -> AccessThresholds:
    """Per-hypothesis thresholds and false-alarm rates."""
    tau = tuple(access_threshold(zeta, th, sigma) for th in theta_set)
    eps = tuple(false_alarm(t, sigma) for t in tau)
    return AccessThresholds(zeta, tau, eps)


def worst_case_theta(theta_set) -> float:
    if len(theta_set) == 0:
        raise ValueError("theta_set is empty")
    m = min(theta_set)
    if m <= 0:
        raise ValueError(f"worst-case design needs min(theta_set) > 0, got {m}")
    return m


def verify_condition_26(theta_set, sigma: float, taus) -> tuple[float, float] | None:
    """Check the dominance condition that makes ``min(theta_set)`` the worst case.

    For every hypothesis ``theta`` and grid threshold ``tau`` (observation
    space), the exceedance probability of the worst-case statistic must be no
    smaller under ``theta`` than under the worst case itself. Returns ``None``
    when it holds, else the first failing ``(theta, tau)``.
    """
    theta_star = worst_case_theta(theta_set)
    taus = np.asarray(taus, dtype=float)
    if taus.size < 100:
        raise ValueError("need at least 100 grid points")
    ref = np.array([norm_cdf((t - theta_star) / sigma) for t in taus])
    for th in theta_set:
        cdf = np.array([norm_cdf((t - th) / sigma) for t in taus])
        bad = np.nonzero(cdf > ref)[0]
        if bad.size:
            return th, float(taus[bad[0]])
    return None


def threshold_grid(theta_set, sigma: float, n: int = 200) -> np.ndarray:
    """Threshold grid spanning six noise widths beyond the hypothesis range."""
    return np.linspace(min(theta_set) - 6 * sigma, max(theta_set) + 6 * sigma, n)
