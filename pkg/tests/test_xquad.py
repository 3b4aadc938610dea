"""The ten-dimensional quadric system, its Hilbert function, and the rulings."""

import numpy as np
import pytest

from k3g16 import mukai, xquad
from k3g16.ffla import intersect, matmul_mod, rank, rng_stream, span_union
from k3g16.mpoly import monomial_matrix
from k3g16.report import all_pass

P = 101


def test_assembled_system_shape(qs):
    assert qs.p == P
    assert qs.space.dim == 10
    assert qs.space.ambient == 55
    assert qs.planes_to_span is not None and qs.planes_to_span <= 6
    assert len(qs.quadrics()) == 10


def test_every_plane_contributes_four_dimensions(qs):
    for sub in qs.plane_spaces:
        assert sub.dim == 4
        assert qs.space.contains_space(sub)


def test_fresh_planes_do_not_grow_the_span(seed, alpha, qs):
    rng = rng_stream(seed.rng_seed, "test/extra-planes")
    got = 0
    while got < 4:
        lam = rng.integers(0, P, size=4)
        if not lam.any():
            continue
        try:
            extra = xquad.plane_quadrics(alpha, lam % P)
        except xquad.NonGenericPlane:
            continue
        got += 1
        assert span_union([qs.space, extra]).dim == 10


def test_two_plane_systems_meet_in_the_pencil(qs):
    pen = xquad.pencil(qs)
    a, b = qs.plane_spaces[0], qs.plane_spaces[1]
    assert intersect(a, b) == pen


def test_pencil_profile(qs):
    pen = xquad.pencil(qs)
    assert pen.dim == 2
    for sub in qs.plane_spaces:
        assert sub.contains_space(pen)
    ranks = xquad.pencil_rank_profile(qs, pen, n_members=20, rng_seed=0)
    assert ranks == {8}


def test_sampled_points_lie_on_every_quadric(qs, xpoints):
    assert len(xpoints) == 20
    coords = np.array([pt.coords for pt in xpoints], dtype=np.int64)
    vals = matmul_mod(monomial_matrix(coords, 2, P), qs.space.basis.T, P)
    assert not vals.any()


def test_point_jacobians_have_corank_four(qs, xpoints):
    for pt in xpoints:
        assert rank(qs.jacobian_at(pt.coords), P) == 6


def test_plane_sections_have_degree_four(seed, alpha, qs):
    rng = rng_stream(seed.rng_seed, "test/section-degree")
    checked = 0
    while checked < 3:
        x = rng.integers(0, P, size=4)
        if not x.any():
            continue
        try:
            res = xquad.plane_intersection_degree(alpha, qs, x % P)
        except (mukai.NonGenericPoint, xquad.NonGenericPlane):
            continue
        assert res.conclusive
        assert res.value == 4
        checked += 1


def test_rational_points_per_plane_average_near_one(seed, alpha, qs):
    # 4 geometric points per plane section, so the rational count per
    # plane over a fixed field hovers around one on average.
    rng = rng_stream(seed.rng_seed, "test/rational-yield")
    planes = 0
    hits = 0
    while planes < 60:
        x = rng.integers(0, P, size=4)
        if not x.any():
            continue
        try:
            pts = xquad.x_points_in_plane(alpha, qs, x % P)
        except mukai.NonGenericPoint:
            continue
        planes += 1
        hits += len(pts)
    assert 25 <= hits <= 130


def test_rulings_are_unique_lines_on_the_quadrics(qs, xpoints, rulings):
    assert len(rulings) == len(xpoints)  # distinct points, distinct rulings
    for r in rulings:
        assert r.space.dim == 2
        assert xquad.line_on_quadrics(qs, r)


def test_ruling_contains_its_point(qs, xpoints):
    pt = xpoints[0]
    r = xquad.ruling_through(qs, pt)
    assert r.space.contains(pt.coords)


def test_hilbert_function_low_degrees(qs):
    checks = xquad.hilbert_check(qs, m_max=5, rng_seed=0)
    by_id = {c["id"]: c for c in checks}
    assert all_pass(checks)
    assert by_id["hilbert.m2"]["value"] == 45
    assert by_id["hilbert.m3"]["value"] == 128
    assert by_id["hilbert.m4"]["value"] == 280
    assert by_id["hilbert.m5"]["value"] == 522
    assert by_id["hilbert.third_difference"]["value"] == 21


def test_hilbert_targets_follow_the_degree_21_polynomial(qs):
    # binom-based closed form: 21*C(m+3,3) - 36*C(m+2,2) + 17*(m+1)
    for m, want in xquad.HILBERT_TARGETS.items():
        c3 = (m + 3) * (m + 2) * (m + 1) // 6
        c2 = (m + 2) * (m + 1) // 2
        assert want == 21 * c3 - 36 * c2 + 17 * (m + 1)


def test_sub_pfaffian_system_shape():
    quads = xquad._sub_pfaffians(P)
    assert len(quads) == 210
    for q in quads:
        assert q.nvars == 45 and q.degree == 2
        assert len(q.terms) == 3


def test_ruling_bivectors_satisfy_pfaffian_quadrics(rulings):
    vecs = np.array([xquad.ruling_bivector(r, P) for r in rulings], dtype=np.int64)
    mono = monomial_matrix(vecs, 2, P)
    stacked = np.array([q.to_vec() for q in xquad._sub_pfaffians(P)], dtype=np.int64)
    assert not matmul_mod(mono, stacked.T, P).any()


def test_plucker_span_and_annihilator(seed, alpha, qs):
    pts = xquad.sample_x_points(
        seed, alpha, qs, 45, purpose="xquad/plucker-points"
    )
    rl = [xquad.ruling_through(qs, p) for p in pts]
    checks = xquad.plucker_model(rl, P, rng_seed=0, m_max=2)
    by_id = {c["id"]: c for c in checks}
    assert by_id["plucker.span"]["value"] == 17
    assert by_id["plucker.annihilator"]["value"] == 28
    assert by_id["plucker.hf_m1"]["value"] == 17
    assert by_id["plucker.hf_m2"]["value"] == 62
    assert all_pass(checks)
