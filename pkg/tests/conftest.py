"""Session-scoped fixtures for the expensive acceptance artifacts.

The full-resolution Kahane run, the two transform-side experiments, and the
exp-star benchmark each take seconds to minutes; they are built once per
session and shared by every test that needs them.  Each fixture returns
(result, wall_seconds) so runtime criteria can be asserted where required.
"""

import time

import pytest

from beurling.pipelines import (de_haan_experiment, kahane_pipeline,
                                mellin_alpha_experiment)
from beurling.selfcheck import benchmark_exp


def _timed(builder):
    t0 = time.perf_counter()
    value = builder()
    return value, time.perf_counter() - t0


@pytest.fixture(scope="session")
def kahane_acceptance():
    """Full-resolution Kahane report on the default h=1e-4, n=500,001 grid."""
    return _timed(kahane_pipeline)


@pytest.fixture(scope="session")
def mellin_acceptance():
    return _timed(mellin_alpha_experiment)


@pytest.fixture(scope="session")
def de_haan_acceptance():
    return _timed(de_haan_experiment)


@pytest.fixture(scope="session")
def bench_rows():
    return benchmark_exp()
