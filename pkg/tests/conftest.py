import numpy as np
import pytest

from lattice_flows import ab_state, c_state, qp_state, u_state, v_state


@pytest.fixture
def rng():
    return np.random.default_rng(20240911)


def random_u(rng, n):
    return u_state(rng.uniform(0.1, 2.0, n))


def random_v(rng, n):
    return v_state(rng.uniform(0.1, 2.0, n))


def random_c(rng, nc):
    return c_state(rng.uniform(0.1, 2.0, nc))


def random_ab(rng, m, positive=False):
    lo = 0.1 if positive else -1.0
    return ab_state(rng.uniform(lo, 2.0 if positive else 1.0, m + 1),
                    rng.uniform(-1.0, 1.0, m))


def random_toda_ab(rng, n):
    return ab_state(rng.uniform(-1.0, 1.0, n - 1), rng.uniform(-1.0, 1.0, n))


def random_qp(rng, n):
    return qp_state(rng.uniform(-1.0, 1.0, n), rng.uniform(-1.0, 1.0, n))
