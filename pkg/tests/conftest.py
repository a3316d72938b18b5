import numpy as np
import pytest

from qspnlft.cli import random_imag_gamma, random_target


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def make_target(rng, d, l1=0.6):
    return random_target(rng, d, l1)


def make_gamma(rng, n, amplitude=None):
    return random_imag_gamma(rng, n, amplitude)
