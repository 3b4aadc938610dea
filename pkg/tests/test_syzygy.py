"""Linear syzygies, the vertex fibers, phi, t2, and the quadratic syzygies."""

import numpy as np
import pytest

from k3g16 import syzygy, xquad
from k3g16.ffla import kernel, matmul_mod, rank, rng_stream, span_union
from k3g16.mpoly import monomial_matrix, num_monomials
from k3g16.report import all_pass

P = 101


def test_syzygy_space_shape(syz):
    assert syz.space.dim == 8
    assert syz.space.ambient == 100
    assert syz.gamma.shape == (8, 10, 10)


def test_syzygies_multiply_to_zero(syz, qs):
    # sum_i L_ik * Q_i must be the zero cubic, checked by evaluation
    rng = rng_stream(0, "test/syzygy-eval")
    pts = rng.integers(0, P, size=(30, 10))
    qvals = qs.evaluate_at(pts)  # (30, 10)
    for k in range(8):
        lvals = matmul_mod(pts, syz.gamma[k].T, P)  # (30, 10), column i = L_ik
        assert not ((qvals * lvals).sum(axis=1) % P).any()


def test_s_gamma_rank_profile(syz, xpoints):
    rng = rng_stream(0, "test/sgamma-rank")
    off = {rank(syzygy.s_gamma_at(syz, rng.integers(0, P, size=10)), P) for _ in range(15)}
    assert off == {8}
    on = {rank(syzygy.s_gamma_at(syz, x.coords), P) for x in xpoints}
    assert on == {4}


def test_s_gamma_at_zero(syz):
    assert not syzygy.s_gamma_at(syz, np.zeros(10, dtype=np.int64)).any()


def test_vertex_fiber_checks(syz, qs, xpoints):
    for x in xpoints[:10]:
        assert all_pass(syzygy.vertex_fiber_check(syz, qs, x))


def test_vertex_kernel_constant_on_rulings(syz, qs, xpoints):
    for x in xpoints[:10]:
        r = xquad.ruling_through(qs, x)
        assert all_pass(syzygy.ruling_constancy_check(syz, qs, x, r))


def test_phi_is_skew_invertible_normalized(phi):
    m = phi.matrix
    assert not ((m + m.T) % P).any()
    assert rank(m, P) == 8
    lead = m.reshape(-1)[np.flatnonzero(m.reshape(-1))[0]]
    assert lead == 1


def test_phi_isotropy_on_sampled_points(syz, phi, xpoints):
    assert all_pass(syzygy.isotropy_check(syz, phi, xpoints))


def test_t2_shape_and_normalization(t2):
    assert t2.dim == 10
    vec = t2.to_vec()
    assert vec[np.flatnonzero(vec)[0]] == 1


def test_t2_entries_recover_quadrics_vanishing_at_points(syz, qs, phi, t2, xpoints):
    # s_gamma . phi . s_gamma^T evaluated at an X point is the zero matrix
    for x in xpoints[:5]:
        S = syzygy.s_gamma_at(syz, x.coords)
        assert not matmul_mod(matmul_mod(S, phi.matrix, P), S.T, P).any()


def test_quadratic_syzygy_report(syz, qs, t2):
    checks = syzygy.quadratic_syzygy_check(syz, qs, t2)
    by_id = {c["id"]: c["value"] for c in checks}
    assert all_pass(checks)
    assert by_id["syzygy.v8_dim"] == 8
    assert by_id["syzygy.cubic_ideal_dim"] == 92
    assert by_id["syzygy.linear_multiples_rank"] == 80
    assert by_id["syzygy.koszul_kernel_dim"] == 10
    assert by_id["syzygy.koszul_image_dim"] == 35
    assert by_id["syzygy.t2_flattening_rank"] == 10
    assert by_id["syzygy.koszul_kernel_dim"] + by_id["syzygy.koszul_image_dim"] == 45


def test_dv_sixplanes(syz, qs, t2, xpoints):
    for x in xpoints[:10]:
        assert all_pass(syzygy.dv_sixplane_check(syz, qs, t2, x))


def test_global_generation_on_skew_pairs(qs, rulings):
    done = 0
    for i in range(len(rulings)):
        for j in range(i + 1, len(rulings)):
            if span_union([rulings[i].space, rulings[j].space]).dim != 4:
                continue
            assert all_pass(syzygy.global_generation_check(qs, rulings[i], rulings[j]))
            done += 1
            if done == 10:
                return
    assert done >= 5  # sampled rulings should give plenty of skew pairs


def test_global_generation_rejects_meeting_rulings(qs, xpoints):
    r = xquad.ruling_through(qs, xpoints[0])
    with pytest.raises(ValueError):
        syzygy.global_generation_check(qs, r, r)
