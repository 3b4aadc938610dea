"""Five-point reconstruction of the second alternating form and its identities."""

import numpy as np

from k3g16 import syzygy, t1, trivector, xquad
from k3g16.ffla import Subspace, matmul_mod, rank
from k3g16.mpoly import monomial_matrix

P = 101


def test_k_space_members_vanish_on_both_rulings(qs, t1run):
    r1, r2 = t1run.rulings[0], t1run.rulings[1]
    K = t1run.k_spaces[0]
    assert K.dim == 6
    qvecs = np.array([q.to_vec() for q in qs.quadrics()], dtype=np.int64)
    members = matmul_mod(K.basis, qvecs, P)  # 6 x 55 coefficient rows
    for r in (r1, r2):
        for mu, nu in ((1, 0), (0, 1), (1, 1)):
            pt = (mu * r.points[0] + nu * r.points[1]) % P
            vals = matmul_mod(monomial_matrix(pt.reshape(1, 10), 2, P), members.T, P)
            assert not vals.any()


def test_k_space_complements_restriction_image(qs, t1run):
    # a 6-dim kernel leaves a 4-dim restriction image on the spanned 3-space
    rep = syzygy.global_generation_check(qs, t1run.rulings[0], t1run.rulings[1])
    by_id = {c["id"]: c for c in rep}
    assert by_id["gg.image_dim"]["value"] == 4
    assert t1run.k_spaces[0].dim == 6


def test_run_dimensions(t1run):
    assert len(t1run.k_spaces) == 10
    assert all(k.dim == 6 for k in t1run.k_spaces)
    assert len(t1run.deltas) == 45
    assert all(d.dim == 2 for d in t1run.deltas)
    assert t1run.v35.dim == 35
    assert t1run.n10.dim == 10


def test_t1_normalized_dual_form(t1run):
    vec = t1run.t1.to_vec()
    assert t1run.t1.dual
    assert vec[np.flatnonzero(vec)[0]] == 1


def test_contractions_span_the_annihilator(t1run):
    flat = t1run.t1.flattening()
    assert rank(flat, P) == 10
    rows = Subspace.from_rows(flat, P)
    assert t1run.n10.contains_space(rows)
    assert rows == t1run.n10


def test_verify_report_with_fresh_sixth_point(seed, alpha, qs, t1run):
    fresh = None
    for cand in xquad.sample_x_points(seed, alpha, qs, 4, purpose="test/t1-sixth"):
        if all(cand.key() != pt.key() for pt in t1run.points):
            fresh = cand
            break
    rep = t1.verify_t1(qs, t1run, fresh=fresh)
    by_id = {c["id"]: c for c in rep}
    assert by_id["t1.delta_pencils"]["status"] == "pass"
    assert by_id["t1.k_cube_vanishing"]["status"] == "pass"
    assert by_id["t1.fresh_point_cubes"]["status"] == "pass"


def test_composition_with_the_syzygy_form_vanishes(t2, t1run):
    assert not trivector.compose(t2, t1run.t1).any()


def test_t1_spans_the_orbit_perp_meet(t2, t1run):
    perp = trivector.perp_space(t2)
    assert perp.dim == 20
    assert perp.contains(t1run.t1.to_vec())
    dim, holds = trivector.orbit_tangent_intersection(t1run.t1, perp)
    assert dim == 1
    assert holds


def test_pencil_is_four_secant(qs, t1run):
    pen = xquad.pencil(qs)
    pen10 = Subspace.from_rows(qs.space.coords(pen.basis), P)
    g, roots = trivector.line_secancy(t1run.t1, pen10)
    assert g.size - 1 == 4
    assert roots is not None
    assert roots.count_with_multiplicity == 4


def test_t1_slice_degree_fifteen(t1run):
    res = trivector.peskine_slice_degree(t1run.t1, rng_seed=0)
    assert res.conclusive
    assert res.value == 15


def test_rerun_from_other_points_agrees(seed, alpha, qs, t1run):
    rec = t1.rerun_agreement(seed, alpha, qs, t1run, rng_seed=7)
    assert rec["value"] is True
