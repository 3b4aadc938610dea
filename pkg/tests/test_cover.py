"""The 2:1 cover, its involution, invariant lines, and the branch determinant."""

import numpy as np
import pytest

from k3g16 import cover
from k3g16.ffla import normalize_point, rank, rng_stream
from k3g16.mpoly import binary_form_roots, interpolate
from k3g16.report import all_pass
from k3g16.syzygy import s_gamma_at

P = 101


def random_points(purpose, count):
    rng = np.random.default_rng(rng_stream(0, purpose))
    return [normalize_point(rng.integers(0, P, size=10), P) for _ in range(count)]


def test_image_is_normalized_and_scale_invariant(qs):
    for pt in random_points("test/cover-scale", 10):
        img = cover.f_x(qs, pt)
        assert img[np.nonzero(img)[0][0]] == 1
        assert np.array_equal(cover.f_x(qs, (7 * pt) % P), img)


def test_base_locus_raises(qs, xpoints):
    for xp in xpoints[:5]:
        with pytest.raises(cover.OnBaseLocus):
            cover.f_x(qs, xp.coords)


def test_involution_squares_to_identity(syz, qs):
    for pt in random_points("test/cover-invol", 20):
        ip = cover.involute(syz, qs, pt)
        assert np.array_equal(cover.involute(syz, qs, ip), pt)


def test_involute_preserves_image(syz, qs):
    for pt in random_points("test/cover-fiber", 20):
        ip = cover.involute(syz, qs, pt)
        assert np.array_equal(cover.f_x(qs, ip), cover.f_x(qs, pt))


def test_invariant_line_holds_both_fiber_points(syz, qs):
    for pt in random_points("test/cover-line", 10):
        line = cover.invariant_line(syz, qs, pt)
        assert line.dim == 2
        assert line.contains(pt)
        assert line.contains(cover.involute(syz, qs, pt))


def test_invariant_line_same_for_both_roots(syz, qs):
    for pt in random_points("test/cover-line-sym", 10):
        line = cover.invariant_line(syz, qs, pt)
        other = cover.invariant_line(syz, qs, cover.involute(syz, qs, pt))
        assert line == other


def test_syzygy_matrix_lands_in_quadrics_through_point(syz, qs):
    # each column of the 10x8 evaluated syzygy matrix is a quadric combination
    # vanishing at the evaluation point
    for pt in random_points("test/cover-sgamma", 10):
        vals = qs.evaluate_at(pt)
        cols = s_gamma_at(syz, pt)
        assert not (vals @ cols % P).any()


def test_fibers_are_exactly_two_points(syz, qs):
    # no third point of the invariant line shares the image, and random
    # unrelated points never collide
    rng = np.random.default_rng(rng_stream(0, "test/cover-degree"))
    pts = random_points("test/cover-degree-pts", 20)
    for pt in pts:
        line = cover.invariant_line(syz, qs, pt)
        ip = cover.involute(syz, qs, pt)
        img = cover.f_x(qs, pt)
        hits = 0
        for mu in range(P):
            z = (mu * line.basis[0] + line.basis[1]) % P
            if not z.any():
                continue
            if np.array_equal(cover.f_x(qs, z), img):
                hits += 1
                z = normalize_point(z, P)
                assert np.array_equal(z, pt) or np.array_equal(z, ip)
        extra = normalize_point(line.basis[0], P)
        if np.array_equal(cover.f_x(qs, extra), img):
            hits += 1
        assert hits == 2
    for _ in range(100):
        a = normalize_point(rng.integers(0, P, size=10), P)
        b = normalize_point(rng.integers(0, P, size=10), P)
        if np.array_equal(a, b):
            continue
        assert not np.array_equal(cover.f_x(qs, a), cover.f_x(qs, b))


def test_ramification_vanishes_on_base_locus(qs, xpoints):
    for xp in xpoints[:10]:
        assert cover.ramification_value(qs, xp.coords) == 0


def test_ramification_generic_nonzero(qs):
    vals = [cover.ramification_value(qs, pt) for pt in random_points("test/cover-ram", 10)]
    assert all(v != 0 for v in vals)


def test_ramification_root_on_a_line(qs):
    # restrict the degree-10 branch form to a line, find a rational root,
    # and confirm the evaluation vanishes there
    rng = np.random.default_rng(rng_stream(0, "test/cover-ram-line"))
    for _ in range(5):
        u = rng.integers(0, P, size=10)
        w = rng.integers(0, P, size=10)
        if rank(np.vstack([u, w]) % P, P) != 2:
            continue
        params = np.array([(1, n) for n in range(11)] + [(0, 1)], dtype=np.int64)
        vals = np.array(
            [cover.ramification_value(qs, (mu * u + nu * w) % P) for mu, nu in params],
            dtype=np.int64,
        )
        if not vals.any():
            continue
        form = interpolate(params, vals, 10, P)
        roots = binary_form_roots(form.to_vec(), P)
        for (mu, nu), _m in roots.fp:
            z = (mu * u + nu * w) % P
            assert cover.ramification_value(qs, z) == 0
        if roots.fp:
            return
    raise AssertionError("no rational root found on five sample lines")


def test_invariant_line_congruence_report(syz, qs, t2):
    for pt in random_points("test/cover-congruence", 3):
        rep = cover.invariant_line_congruence_check(syz, qs, t2, pt)
        assert all_pass(rep)
        ids = {c["id"] for c in rep}
        assert "cover.secancy_degree" in ids
        assert "cover.image_in_congruence" in ids
