import math
import sys

import numpy as np
import pytest
from hypothesis import strategies as st

from cascadenet.network import BeamSplitter, NetworkSpec, RegularSpec


def random_network(rng, M, loss=0.0, gamma=1.0):
    elements = {
        (m, mp): BeamSplitter(rng.uniform(0, 1), rng.uniform(0, 2 * math.pi))
        for m in range(1, M)
        for mp in range(m + 1, M + 1)
    }
    return NetworkSpec(M, elements, loss, gamma)


def random_regular(rng, M, loss=0.0, gamma=1.0):
    return RegularSpec(
        M, rng.uniform(0, 1, M - 1), rng.uniform(0, 2 * math.pi, M - 1), loss, gamma
    )


def omega_matrix(zeta, gamma) -> np.ndarray:
    """2M x 2M block matrix over (a_1^dag, a_1, a_2^dag, a_2, ...)."""
    M = zeta.M
    Om = np.zeros((2 * M, 2 * M), dtype=complex)
    for m in range(M):
        Om[2 * m + 1, 2 * m + 1] = gamma
        for mp in range(m + 1, M):
            Om[2 * m + 1, 2 * mp + 1] = gamma * zeta.zeta[m, mp]
            Om[2 * mp + 1, 2 * m + 1] = gamma * np.conj(zeta.zeta[m, mp])
    return Om


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


transmissivities = st.floats(0.0, 1.0)
phases = st.floats(0.0, 2 * math.pi, exclude_max=True)
losses = st.sampled_from([0.0, 0.1, 0.5])


@st.composite
def networks(draw, min_M=2, max_M=5):
    M = draw(st.integers(min_M, max_M))
    pairs = [(m, mp) for m in range(1, M) for mp in range(m + 1, M + 1)]
    elements = {p: BeamSplitter(draw(transmissivities), draw(phases)) for p in pairs}
    return NetworkSpec(M, elements, draw(losses), draw(st.floats(0.1, 5.0)))


@st.composite
def regular_specs(draw, min_M=2, max_M=7):
    M = draw(st.integers(min_M, max_M))
    taus = draw(st.lists(transmissivities, min_size=M - 1, max_size=M - 1))
    phis = draw(st.lists(phases, min_size=M - 1, max_size=M - 1))
    return RegularSpec(M, taus, phis, draw(losses), 1.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
