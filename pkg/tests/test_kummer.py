"""Six-secant frames, Weddle quartics, branch quartics, cubic surfaces."""

import numpy as np
import pytest

from k3g16 import kummer, trivector
from k3g16.ffla import matmul_mod, normalize_point, rng_stream
from k3g16.kummer import NotOnPeskine
from k3g16.report import all_pass

P = 101


@pytest.fixture(scope="module")
def fr(syz, qs, peskine_pts):
    return kummer.frame(syz, qs, peskine_pts[0].coords)


@pytest.fixture(scope="module")
def wed(fr):
    return kummer.weddle(fr)


@pytest.fixture(scope="module")
def branch(fr, wed):
    return kummer.kummer_quartic(fr, wed)


def test_frame_dimensions(fr, peskine_pts):
    assert all_pass(kummer.frame_report(fr))
    assert fr.p_q.dim == 4
    assert fr.kernel6.dim == 6
    assert fr.e_space.dim == 4
    assert fr.z6_degree == 6
    assert fr.e_space.contains(peskine_pts[0].coords)


def test_target_space_is_contraction_kernel(fr, peskine_pts):
    # two constructions of the same 4-space: annihilator of the quadrics
    # vanishing on the 3-space, and kernel of the trivector contraction
    assert fr.e_space == peskine_pts[0].kernel4


def test_base_points_lie_on_all_quadrics(fr, qs):
    for z in fr.z6_rational:
        y = matmul_mod(z.reshape(1, 4), fr.emb.T, P).ravel()
        assert not qs.evaluate_at(y).any()


def test_generic_point_rejected(syz, qs):
    rng = rng_stream(0, "test/kummer-generic")
    for _ in range(3):
        v = rng.integers(0, P, size=10)
        if not v.any():
            continue
        with pytest.raises(NotOnPeskine):
            kummer.frame(syz, qs, v)


def test_weddle_quartic(fr, wed):
    assert wed.degree == 4
    assert not wed.is_zero
    assert all_pass(kummer.weddle_report(fr, wed))


def test_branch_quartic_pullback(fr, wed, branch):
    K, lam = branch
    assert K.degree == 4
    assert lam != 0
    # independent re-verification at fresh random points
    rng = rng_stream(0, "test/kummer-pullback")
    done = 0
    while done < 25:
        z = rng.integers(0, P, size=4) % P
        if not z.any():
            continue
        ft = kummer._quadric_values(fr.grams, z.reshape(1, 4), P)
        if not ft.any():
            continue
        w = int(kummer._eval_form(wed, z.reshape(1, 4))[0])
        kval = int(kummer._eval_form(K, ft)[0])
        assert kval == lam * w * w % P
        done += 1


def test_branch_quartic_checks(fr, wed, branch):
    K, lam = branch
    rep = kummer.kummer_checks(fr, wed, K, lam)
    assert all_pass(rep)
    split = next(c for c in rep if c["id"] == "kummer.node_field_split")["value"]
    assert split["closure_degree"] == 16
    assert split["rational"] >= 1


def test_bisecant_images_are_nodes(syz, qs, t2):
    # an anchor whose 3-space has several rational base points, so the
    # bisecant check actually fires
    pts = trivector.peskine_sample(t2, 3, rng_seed=1)
    fr2 = kummer.frame(syz, qs, pts[1].coords)
    assert fr2.z6_rational.shape[0] >= 2
    W2 = kummer.weddle(fr2)
    K2, lam2 = kummer.kummer_quartic(fr2, W2)
    rep = kummer.kummer_checks(fr2, W2, K2, lam2, census=False)
    assert all_pass(rep)
    checked = next(c for c in rep if c["id"] == "kummer.bisecant_images_checked")["value"]
    assert checked >= 1


def test_cubic_surface(fr, t2):
    cubic, rep = kummer.cubic_surface(fr, t2)
    assert all_pass(rep)
    assert cubic is not None and cubic.degree == 3
    count = next(c for c in rep if c["id"] == "kummer.cubic_point_count")["value"]
    assert count > 0
    # cross-check: points of the interpolated surface drop the tensor rank
    quartics = trivector.slice_quartics(t2, fr.iso, rng_seed=3)
    from k3g16.discrim import slice_rational_zeros

    zeros = slice_rational_zeros(quartics, P)
    rng = rng_stream(0, "test/kummer-cubic")
    for idx in rng.choice(zeros.shape[0], size=5, replace=False):
        y = matmul_mod(zeros[idx].reshape(1, 4), fr.iso.T, P).ravel()
        r, _ker = trivector.peskine_test(t2, y)
        assert r <= 6


def test_tangent_decomposition(syz, qs, t2):
    rep = kummer.tangent_decomposition(syz, qs, t2, rng_seed=0, budget=30)
    statuses = {c["status"] for c in rep}
    assert statuses <= {"pass", "skipped"}
    if "skipped" not in statuses:
        assert len(rep) == 3
        assert all_pass(rep)
