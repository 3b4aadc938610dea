"""Session-wide pipeline objects shared by the per-module test files.

Everything downstream of the seed is deterministic, so building the chain
once per session keeps the suite fast without coupling test outcomes.
"""

import pytest

from k3g16 import mukai, syzygy, t1, trivector, xquad

P = 101
RNG_SEED = 0


@pytest.fixture(scope="session")
def seed():
    return mukai.generate_seed(P, RNG_SEED)


@pytest.fixture(scope="session")
def alpha(seed):
    return mukai.build_alpha(seed)


@pytest.fixture(scope="session")
def qs(seed, alpha):
    return xquad.assemble_v10(seed, alpha)


@pytest.fixture(scope="session")
def xpoints(seed, alpha, qs):
    return xquad.sample_x_points(seed, alpha, qs, 20)


@pytest.fixture(scope="session")
def rulings(qs, xpoints):
    out = []
    seen = set()
    for pt in xpoints:
        r = xquad.ruling_through(qs, pt)
        if r.key() not in seen:
            seen.add(r.key())
            out.append(r)
    return out


@pytest.fixture(scope="session")
def syz(qs):
    return syzygy.linear_syzygies(qs)


@pytest.fixture(scope="session")
def phi(syz, qs):
    return syzygy.phi_compute(syz, qs)


@pytest.fixture(scope="session")
def t2(syz, qs, phi):
    return syzygy.t2_compute(syz, qs, phi)


@pytest.fixture(scope="session")
def peskine_pts(t2):
    return trivector.peskine_sample(t2, 3, rng_seed=RNG_SEED)


@pytest.fixture(scope="session")
def t1run(seed, alpha, qs):
    return t1.run_algorithm(seed, alpha, qs, rng_seed=RNG_SEED)
