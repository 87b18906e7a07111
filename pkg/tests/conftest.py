import numpy as np
import pytest

from ricperp import models
from ricperp import tensor as kt


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def p1p1():
    g1, R1 = models.fubini_study(1)
    R, g = kt.product_tensor(R1, g1, R1, g1)
    return g, R


def random_metric(rng, n):
    A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return A @ A.conj().T + n * np.eye(n)


def random_unit(rng, n, size=None):
    shape = (n,) if size is None else (size, n)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)
