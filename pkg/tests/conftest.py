import pytest

from dsalearn.markov import REFERENCE_TRANSITION, ChannelSetModel
from dsalearn.observation import ObservationModel, db_to_amplitude, uniform_prior

PARAM_DB = (-5.0, -3.0, -1.0, 1.0, 3.0, 5.0)

_acceptance_lines: list[str] = []


@pytest.fixture
def P():
    return REFERENCE_TRANSITION


@pytest.fixture
def two_channels():
    return ChannelSetModel(2, REFERENCE_TRANSITION, 1.0)


def param_obs(true_db=5.0, db_set=PARAM_DB, L=2, sigma=1.0):
    theta = tuple(db_to_amplitude(d, sigma) for d in db_set)
    idx = [abs(d - true_db) < 1e-9 for d in db_set].index(True)
    return ObservationModel(sigma, theta, uniform_prior(len(theta)), (idx,) * L)


def known_obs(snr_db, L=2, sigma=1.0):
    return ObservationModel(sigma, (db_to_amplitude(snr_db, sigma),), (1.0,), (0,) * L)


@pytest.fixture
def acceptance_log():
    return _acceptance_lines.append


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
