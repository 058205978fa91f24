"""Experiment files: flat ``key = value`` text, one key per line.

``#`` starts a comment. Lists are comma separated. Amplitudes are given in
dB (``20 log10(mu / sigma)``) and converted at parse time.

==========================  ==========  ======================================
key                         default     meaning
==========================  ==========  ======================================
channels                    2           number of channels L
bandwidth                   1           reward per successful access
p00, p01, p10, p11          required    channel transition probabilities
alpha                       0.999       discount factor
zeta                        required    interference limit(s), list
sigma                       1           noise standard deviation
snr_db                      required    true SNR of every channel, list
theta_db_set                -5,...,5    hypotheses for WorstCase/Learning
prior                       uniform     prior over theta_db_set
true_theta_db               first snr   true SNR for ``trace``
policy                      required    G1, G2, G3, WorstCase, Learning
horizon                     10000       slots per episode
runs                        500         episodes per cell
seed                        0           master seed (warns when missing)
round_robin_C               none        forced round-robin period factor
g2_use_no_access_info       true        G2 uses declined-access events
==========================  ==========  ======================================
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields
from pathlib import Path

from .markov import ChannelSetModel, TransitionMatrix
from .observation import ObservationModel, db_to_amplitude, uniform_prior
from .policy import PolicyKind
from .sim import SimConfig

PARAMETER_DB_SET = (-5.0, -3.0, -1.0, 1.0, 3.0, 5.0)
_PARAM_POLICIES = (PolicyKind.WORST_CASE, PolicyKind.LEARNING)


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key, self.line = key, line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(key)
        super().__init__(": ".join(where + [message]))


@dataclass(frozen=True)
class ExperimentSpec:
    p00: float
    p01: float
    p10: float
    p11: float
    zeta: tuple[float, ...]
    snr_db: tuple[float, ...]
    policy: tuple[PolicyKind, ...]
    channels: int = 2
    bandwidth: float = 1.0
    alpha: float = 0.999
    sigma: float = 1.0
    theta_db_set: tuple[float, ...] = PARAMETER_DB_SET
    prior: tuple[float, ...] | None = None  # None: uniform
    true_theta_db: float | None = None
    horizon: int = 10000
    runs: int = 500
    seed: int = 0
    round_robin_C: int | None = None
    g2_use_no_access_info: bool = True

    @property
    def model(self) -> ChannelSetModel:
        return ChannelSetModel(self.channels, TransitionMatrix(self.p00, self.p01, self.p10, self.p11), self.bandwidth)

    def cells(self):
        """Sweep cells in output order: policy, then zeta, then SNR."""
        for kind in self.policy:
            for z in self.zeta:
                for snr in self.snr_db:
                    yield kind, z, snr

    def observation_model(self, kind: PolicyKind, snr_db: float) -> ObservationModel:
        L = self.channels
        if kind in _PARAM_POLICIES:
            idx = _db_index(self.theta_db_set, snr_db)
            theta = tuple(db_to_amplitude(d, self.sigma) for d in self.theta_db_set)
            prior = self.prior or uniform_prior(len(theta))
            return ObservationModel(self.sigma, theta, prior, (idx,) * L)
        return ObservationModel(self.sigma, (db_to_amplitude(snr_db, self.sigma),), (1.0,), (0,) * L)

    def sim_config(self, kind: PolicyKind, zeta: float, snr_db: float) -> SimConfig:
        return SimConfig(
            model=self.model,
            obs=self.observation_model(kind, snr_db),
            policy=kind,
            zeta=zeta,
            alpha=self.alpha,
            horizon=self.horizon,
            runs=self.runs,
            master_seed=self.seed,
            round_robin_C=self.round_robin_C,
            g2_use_no_access_info=self.g2_use_no_access_info,
        )

    def trace_config(self) -> SimConfig:
        if PolicyKind.LEARNING not in self.policy:
            raise ConfigError("trace needs the Learning policy", "policy")
        truth = self.snr_db[0] if self.true_theta_db is None else self.true_theta_db
        return self.sim_config(PolicyKind.LEARNING, self.zeta[0], truth)


def _db_index(db_set, value) -> int:
    for i, d in enumerate(db_set):
        if abs(d - value) <= 1e-9:
            return i
    raise ValueError(f"true SNR {value} dB is not in theta_db_set {list(db_set)}")


# --- value codecs --------------------------------------------------------------


def _float(s):
    v = float(s)
    if not math.isfinite(v):
        raise ValueError("must be finite")
    return v


def _int(s):
    return int(s, 10)


def _floats(s):
    vals = tuple(_float(p) for p in s.split(","))
    if not vals:
        raise ValueError("empty list")
    return vals


def _bool(s):
    low = s.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected true/false, got {s!r}")


def _policies(s):
    return tuple(PolicyKind.parse(p) for p in s.split(","))


def _prior(s):
    return None if s.strip().lower() == "uniform" else _floats(s)


def _optional_int(s):
    return None if s.strip().lower() == "none" else _int(s)


def _optional_float(s):
    return None if s.strip().lower() == "none" else _float(s)


_PARSERS = {
    "channels": _int,
    "bandwidth": _float,
    "p00": _float,
    "p01": _float,
    "p10": _float,
    "p11": _float,
    "alpha": _float,
    "zeta": _floats,
    "sigma": _float,
    "snr_db": _floats,
    "theta_db_set": _floats,
    "prior": _prior,
    "true_theta_db": _optional_float,
    "policy": _policies,
    "horizon": _int,
    "runs": _int,
    "seed": _int,
    "round_robin_C": _optional_int,
    "g2_use_no_access_info": _bool,
}
REQUIRED = ("p00", "p01", "p10", "p11", "zeta", "snr_db", "policy")


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, PolicyKind):
        return v.value
    if isinstance(v, tuple):
        return ",".join(_fmt(x) for x in v)
    return repr(v)


def emit_config(spec: ExperimentSpec) -> str:
    lines = []
    for f in fields(spec):
        v = getattr(spec, f.name)
        if f.name == "prior" and v is None:
            lines.append("prior = uniform")
        else:
            lines.append(f"{f.name} = {_fmt(v)}")
    return "\n".join(lines) + "\n"


def parse_config_text(text: str) -> ExperimentSpec:
    values: dict = {}
    where: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {raw.strip()!r}", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError("unknown key", key, lineno)
        if key in values:
            raise ConfigError(f"duplicate key (first on line {where[key]})", key, lineno)
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value {value!r}: {exc}", key, lineno) from None
        where[key] = lineno

    for key in REQUIRED:
        if key not in values:
            raise ConfigError("missing required key", key)
    if "seed" not in values:
        warnings.warn("no seed given; using seed 0", stacklevel=2)

    def fail(key, msg):
        raise ConfigError(msg, key, where.get(key))

    for key in ("p00", "p01", "p10", "p11"):
        if not 0.0 <= values[key] <= 1.0:
            fail(key, f"{key} out of range")
    spec = ExperimentSpec(**values)
    if abs(spec.p00 + spec.p01 - 1.0) > 1e-12:
        fail("p01", "p00 + p01 must equal 1")
    if abs(spec.p10 + spec.p11 - 1.0) > 1e-12:
        fail("p11", "p10 + p11 must equal 1")
    for key, msg in (
        ("p00", "needs 0 < p00 < 1 (no absorbing state)"),
        ("p11", "needs 0 < p11 < 1 (no absorbing state)"),
    ):
        if not 0.0 < values[key] < 1.0:
            fail(key, msg)
    if not spec.p00 > spec.p10:
        fail("p10", "needs p00 > p10 (positively correlated occupancy)")
    if spec.channels < 1:
        fail("channels", "must be >= 1")
    if not spec.bandwidth > 0:
        fail("bandwidth", "must be > 0")
    if not 0.0 <= spec.alpha < 1.0:
        fail("alpha", "must lie in [0, 1)")
    if not spec.sigma > 0:
        fail("sigma", "must be > 0")
    if any(not 0.0 < z < 1.0 for z in spec.zeta):
        fail("zeta", "each value must lie in (0, 1)")
    if spec.horizon < 1:
        fail("horizon", "must be >= 1")
    if spec.runs < 1:
        fail("runs", "must be >= 1")
    if not 0 <= spec.seed < 2**64:
        fail("seed", "must be a 64-bit unsigned integer")
    if spec.round_robin_C is not None and spec.round_robin_C < 1:
        fail("round_robin_C", "must be >= 1 or none")
    th = spec.theta_db_set
    if any(b <= a for a, b in zip(th, th[1:])):
        fail("theta_db_set", "must be strictly increasing")
    if spec.prior is not None:
        if len(spec.prior) != len(th):
            fail("prior", f"needs {len(th)} entries to match theta_db_set")
        if any(w < 0 for w in spec.prior) or abs(math.fsum(spec.prior) - 1.0) > 1e-12:
            fail("prior", "must be nonnegative and sum to 1")
    if any(k in _PARAM_POLICIES for k in spec.policy):
        for snr in spec.snr_db:
            if all(abs(snr - d) > 1e-9 for d in th):
                fail("snr_db", f"{snr} dB must be one of theta_db_set for WorstCase/Learning")
    if spec.true_theta_db is not None and all(abs(spec.true_theta_db - d) > 1e-9 for d in th):
        fail("true_theta_db", "must be one of theta_db_set")
    return spec


def parse_config(path) -> ExperimentSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config_text(text)
