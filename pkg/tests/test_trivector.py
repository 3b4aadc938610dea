"""Rank loci, congruence lines, secancy, and orbit geometry of trivectors."""

import numpy as np
import pytest

from k3g16 import trivector
from k3g16.ffla import Subspace, normalize_point, rank, rng_stream
from k3g16.multilinear import Trivector, wedge_triples

P = 101


def small(p, dim, triples, dual=False):
    vec = np.zeros(len(wedge_triples(dim)), dtype=np.int64)
    order = wedge_triples(dim)
    for t in triples:
        vec[order.index(t)] = 1
    return Trivector.from_vec(vec, p, dual=dual)


def test_generic_rank_is_eight(t2):
    rng = np.random.default_rng(rng_stream(0, "test/triv-rank"))
    for _ in range(10):
        r, ker = trivector.peskine_test(t2, rng.integers(0, P, size=10))
        assert r == 8
        assert ker is None


def test_congruence_line_plane_kills_t2(t2):
    rng = np.random.default_rng(rng_stream(0, "test/triv-line"))
    q = normalize_point(rng.integers(0, P, size=10), P)
    line = trivector.congruence_line_through(t2, q)
    assert line.dim == 2
    assert line.contains(q)
    dense = np.array(t2.dense(), dtype=np.int64)
    vals = np.einsum("ra,abc->rbc", line.basis, dense) % P
    vals = np.einsum("sb,rbc->rsc", line.basis, vals) % P
    assert not vals.any()


def test_congruence_line_secancy_is_a_quartic(t2):
    rng = np.random.default_rng(rng_stream(0, "test/triv-secancy"))
    for _ in range(3):
        q = normalize_point(rng.integers(0, P, size=10), P)
        line = trivector.congruence_line_through(t2, q)
        g, roots = trivector.line_secancy(t2, line)
        assert g.size - 1 == 4
        assert roots is not None
        assert roots.count_with_multiplicity == 4


def test_generic_line_has_empty_secancy(t2):
    rng = np.random.default_rng(rng_stream(0, "test/triv-generic-line"))
    line = Subspace.from_rows(rng.integers(0, P, size=(2, 10)), P)
    assert line.dim == 2
    g, roots = trivector.line_secancy(t2, line)
    assert g.size == 1
    assert roots is None


def test_rank_six_point_rejected_by_congruence_line(t2, peskine_pts):
    with pytest.raises(trivector.PointOnPeskine):
        trivector.congruence_line_through(t2, peskine_pts[0].coords)


def test_peskine_slice_degree_fifteen(t2):
    res = trivector.peskine_slice_degree(t2, rng_seed=0)
    assert res.conclusive
    assert res.value == 15


def test_peskine_sample_points_drop_rank(t2, peskine_pts):
    assert len(peskine_pts) == 3
    for pt in peskine_pts:
        assert pt.coords[np.nonzero(pt.coords)[0][0]] == 1
        r, ker = trivector.peskine_test(t2, pt.coords)
        assert r == 6
        assert ker is not None and ker.dim == 4
        # a point always pairs to zero with itself, so it sits in its kernel
        assert pt.kernel4.contains(pt.coords)


def test_compose_small_decomposables():
    b = small(P, 6, [(0, 1, 2)])
    a = small(P, 6, [(0, 1, 2)], dual=True)
    out = trivector.compose(b, a)
    expect = np.zeros((6, 6), dtype=np.int64)
    expect[0, 0] = expect[1, 1] = expect[2, 2] = 1
    assert np.array_equal(out, expect)
    # disjoint supports compose to zero
    a2 = small(P, 6, [(3, 4, 5)], dual=True)
    assert not trivector.compose(b, a2).any()


def test_compose_requires_plain_then_dual():
    b = small(P, 6, [(0, 1, 2)])
    a = small(P, 6, [(3, 4, 5)], dual=True)
    with pytest.raises(ValueError):
        trivector.compose(a, b)
    with pytest.raises(ValueError):
        trivector.compose(b, b)


def test_perp_of_decomposable_small():
    # duals killed by e0^e1^e2: no term may repeat two of {0,1,2};
    # 3*C(3,2) mixed triples + 1 fully outside = 10
    b = small(P, 6, [(0, 1, 2)])
    perp = trivector.perp_space(b)
    assert perp.dim == 10
    for row in perp.basis:
        a = Trivector.from_vec(row, P, dual=True)
        assert not trivector.compose(b, a).any()


def test_perp_of_t2_is_twenty(t2):
    assert trivector.perp_space(t2).dim == 20


def test_orbit_identity_direction_scales(t2):
    om = trivector.orbit_matrix(t2)
    col = np.zeros(om.shape[0], dtype=np.int64)
    for r in range(10):
        col = (col + om[:, r * 10 + r]) % P
    assert np.array_equal(col, 3 * t2.to_vec() % P)


def test_orbit_rank_small_cases():
    # cone over Gr(3,6) has affine dimension 10 at a decomposable point
    dec = small(P, 6, [(0, 1, 2)])
    assert rank(trivector.orbit_matrix(dec), P) == 10
    # a sum of two complementary decomposables has a dense orbit in wedge-3 of F^6
    gen = small(P, 6, [(0, 1, 2), (3, 4, 5)])
    assert rank(trivector.orbit_matrix(gen), P) == 20


def test_orbit_tangent_meets_own_span():
    t = small(P, 6, [(0, 1, 2), (3, 4, 5)], dual=True)
    span = Subspace.from_rows(t.to_vec().reshape(1, -1), P)
    dim, holds = trivector.orbit_tangent_intersection(t, span)
    assert dim == 1
    assert holds
