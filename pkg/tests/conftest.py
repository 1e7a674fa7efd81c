"""Shared fixtures: kernel warm-up and witness sets reused across modules."""

import numpy as np
import pytest

from witness_sampler import polysys
from witness_sampler.linalg import lu_solve
from witness_sampler.solver import witness_generate
from witness_sampler.tracker import TrackerConfig


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Pay numba JIT compilation once, before any timed assertion runs."""
    f = polysys.adjacent_minors(3)
    x = np.ones(6, np.complex128)
    polysys.evaluate(f, x)
    polysys.jacobian(f, x)
    lu_solve(np.eye(3, dtype=np.complex128), np.ones(3, np.complex128))


@pytest.fixture(scope="session")
def cfg():
    return TrackerConfig()


@pytest.fixture(scope="session")
def minors3_witness(cfg):
    return witness_generate(polysys.adjacent_minors(3), 2, 0, cfg)


@pytest.fixture(scope="session")
def minors4_witness(cfg):
    return witness_generate(polysys.adjacent_minors(4), 3, 0, cfg)


@pytest.fixture(scope="session")
def minors5_witness(cfg):
    return witness_generate(polysys.adjacent_minors(5), 4, 0, cfg)
