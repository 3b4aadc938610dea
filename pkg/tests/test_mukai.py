"""Seed generation, the W10 quotient, and the alpha/beta evaluation maps."""

import numpy as np
import pytest

from k3g16 import mukai
from k3g16.ffla import Subspace, matmul_mod, rank, rng_stream
from k3g16.multilinear import pi21_matrix, s21_space
from k3g16.report import all_pass

P = 101


@pytest.fixture(scope="module")
def seed():
    return mukai.generate_seed(P, 0)


@pytest.fixture(scope="module")
def model(seed):
    return mukai.w10_model(seed)


@pytest.fixture(scope="module")
def alpha(seed, model):
    return mukai.build_alpha(seed, model)


def test_generate_seed_is_deterministic(seed):
    again = mukai.generate_seed(P, 0)
    assert again.serialize() == seed.serialize()


def test_generate_seed_rejects_tiny_fields():
    with pytest.raises(ValueError):
        mukai.generate_seed(2, 0)
    with pytest.raises(ValueError):
        mukai.generate_seed(3, 0)


def test_fresh_seeds_validate_quickly():
    attempts = [mukai.generate_seed(P, s).attempts for s in range(12)]
    assert all(a <= 3 for a in attempts)


def test_seed_serialization_round_trip(seed):
    back = mukai.Seed.deserialize(seed.serialize())
    assert back.M == seed.M and back.N == seed.N and back.p == seed.p


def test_w10_quotient_shape(seed, model):
    assert model.kernel.dim == 10
    assert model.matrix.shape == (10, 20)
    assert len(model.nonpivots) == 10
    # q kills the kernel and is the identity on the section
    assert not model.q(model.kernel.basis).any()
    w = np.arange(10, dtype=np.int64)
    assert np.array_equal(model.q(model.section(w)), w)


def test_quotient_kernel_contains_projected_m(seed, model):
    pi = pi21_matrix(4, P)
    S21 = s21_space(4, P)
    for m in seed.M.basis:
        for k in range(4):
            t = np.outer(m, np.eye(4, dtype=np.int64)[k]).reshape(-1)
            v = S21.coords(matmul_mod(pi, t.reshape(-1, 1), P).ravel())
            assert model.kernel.contains(v)
    assert model.kernel.contains_space(seed.N)


def test_alpha_rank_seven_with_squared_kernel(seed, alpha):
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = rng.integers(0, P, 4)
        if not x.any():
            continue
        ax = alpha.at(x)
        assert rank(ax, P) == 7
        cls = mukai.x_square_class(seed, x)
        assert cls.any()
        assert not matmul_mod(ax, cls.reshape(-1, 1), P).any()


def test_alpha_well_defined_modulo_m(seed, model, alpha):
    # changing the representative by an element of M leaves alpha unchanged:
    # equivalently the builder's internal audit, repeated here externally
    rng = np.random.default_rng(1)
    f = rng.integers(0, P, 10)
    cls = mukai.to_source_coords(seed, f)
    shifted = (f + matmul_mod(rng.integers(0, P, (1, 2)), seed.M.basis, P).ravel()) % P
    assert np.array_equal(mukai.to_source_coords(seed, shifted), cls)


def test_t_fiber_annihilates_image(alpha):
    rng = np.random.default_rng(2)
    dims = []
    for _ in range(20):
        x = rng.integers(0, P, 4)
        if not x.any():
            continue
        T = mukai.t_fiber(alpha, x)
        dims.append(T.dim)
        assert not matmul_mod(T.basis, alpha.at(x), P).any()
    assert dims and set(dims) == {3}


def test_beta_shapes_and_bilinearity(alpha):
    rng = np.random.default_rng(3)
    assert not mukai.beta_at(alpha, np.zeros(10, dtype=np.int64)).any()
    w1 = rng.integers(0, P, 10)
    w2 = rng.integers(0, P, 10)
    b = mukai.beta_at(alpha, (3 * w1 + 5 * w2) % P)
    assert np.array_equal(b, (3 * mukai.beta_at(alpha, w1) + 5 * mukai.beta_at(alpha, w2)) % P)
    ranks = {rank(mukai.beta_at(alpha, rng.integers(0, P, 10)), P) for _ in range(50)}
    assert ranks == {4}


def test_validate_seed_catches_handcrafted_degeneracies(seed):
    pi = pi21_matrix(4, P)
    S21 = s21_space(4, P)
    m = seed.M.basis[0]
    t = np.outer(m, np.eye(4, dtype=np.int64)[2]).reshape(-1)
    inside = S21.coords(matmul_mod(pi, t.reshape(-1, 1), P).ravel())
    # N meeting pi21(M (x) V*): kernel drops below 10
    rng = rng_stream(99, "test/degenerate-N")
    bad_n = Subspace.from_rows(np.vstack([inside, rng.integers(0, P, 20)]), P)
    bad_seed = mukai.Seed(P, 0, seed.M, bad_n)
    with pytest.raises(mukai.SeedNotGeneric):
        mukai.validate_seed(bad_seed)
    rep = mukai.validate_seed(bad_seed, raise_on_fail=False)
    assert not all_pass(rep)
    by_id = {c["id"]: c for c in rep}
    assert by_id["seed.kernel_dim"]["status"] == "fail"
    # N fully inside: quotient inflates to dim 12
    t2 = np.outer(seed.M.basis[1], np.eye(4, dtype=np.int64)[0]).reshape(-1)
    inside2 = S21.coords(matmul_mod(pi, t2.reshape(-1, 1), P).ravel())
    contained = mukai.Seed(P, 0, seed.M, Subspace.from_rows(np.vstack([inside, inside2]), P))
    rep2 = mukai.validate_seed(contained, raise_on_fail=False)
    by_id2 = {c["id"]: c for c in rep2}
    assert by_id2["seed.w10_dim"]["value"] == 12
    assert by_id2["seed.w10_dim"]["status"] == "fail"


def test_validate_seed_report_passes_for_generic(seed):
    rep = mukai.validate_seed(seed, raise_on_fail=False)
    assert all_pass(rep)
    assert {c["id"] for c in rep} >= {"seed.kernel_dim", "seed.alpha_rank7", "seed.kernel_is_x_square"}
