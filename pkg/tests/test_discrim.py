"""Determinantal loci of the symmetric family: slice degrees and rank strata."""

import numpy as np

from k3g16 import discrim, trivector, xquad
from k3g16.ffla import matmul_mod, rank, rng_stream
from k3g16.mpoly import monomial_matrix
from k3g16.report import all_pass

P = 101


def test_determinant_scales_as_degree_ten(qs):
    rng = np.random.default_rng(rng_stream(0, "test/disc-scale"))
    for _ in range(5):
        u = rng.integers(0, P, size=10)
        lam = int(rng.integers(2, P))
        val, _ = discrim.disc_value_and_grad(qs, u)
        scaled, _ = discrim.disc_value_and_grad(qs, (lam * u) % P)
        assert scaled == pow(lam, 10, P) * val % P
    vals = [discrim.disc_value_and_grad(qs, rng.integers(0, P, size=10))[0] for _ in range(10)]
    assert any(v != 0 for v in vals)


def test_adjugate_identity_across_ranks(qs, syz, xpoints):
    rng = np.random.default_rng(rng_stream(0, "test/adjugate"))
    # full rank: A adj = det I with det nonzero
    u = rng.integers(0, P, size=10)
    A = discrim.gram_at(qs, u)
    adj = discrim.adjugate(A, P)
    d, _ = discrim.disc_value_and_grad(qs, u)
    assert np.array_equal(matmul_mod(A, adj, P), d * np.eye(10, dtype=np.int64) % P)
    # rank 8 (a pencil member): the adjugate vanishes identically
    pen = xquad.pencil(qs)
    B = discrim.gram_at(qs, qs.space.coords(pen.basis[0]))
    assert rank(B, P) == 8
    assert not discrim.adjugate(B, P).any()
    # rank 9 (a vertex quadric): nonzero adjugate, A adj = 0
    rep = discrim.x60_membership(syz, qs, xpoints[0])
    assert all_pass(rep)


def test_pencil_members_kill_the_determinant(qs):
    pen = xquad.pencil(qs)
    rng = np.random.default_rng(rng_stream(0, "test/disc-pencil"))
    for _ in range(5):
        c = rng.integers(0, P, size=2)
        if not c.any():
            continue
        u = qs.space.coords((c[0] * pen.basis[0] + c[1] * pen.basis[1]) % P)
        val, grad = discrim.disc_value_and_grad(qs, u)
        assert val == 0
        assert not grad.any()  # rank 8 keeps the whole gradient at zero


def test_vertex_quadrics_are_critical_points(syz, qs, xpoints):
    for x in xpoints[:2]:
        rep = discrim.x60_membership(syz, qs, x)
        assert all_pass(rep)


def test_rank8_slice_degree(qs):
    res = discrim.fit1_slice_degree(qs, rng_seed=0)
    assert res.conclusive
    assert res.value == 165


def test_singular_slice_degree(qs):
    res = discrim.sing_slice_degree(qs, rng_seed=0)
    assert res.conclusive
    assert res.value == 225


def test_partials_match_adjugate_traces(qs):
    rng = np.random.default_rng(rng_stream(0, "test/partials-emb"))
    emb = discrim._random_slice(P, rng)
    forms = discrim.partial_forms(qs, emb, rng_seed=3)
    assert discrim.partials_reevaluate(qs, emb, forms, rng_seed=4)


def test_rank8_points_are_singular_points(qs):
    # on a shared slice, every rational zero of the 9x9 minors kills the partials
    rng = np.random.default_rng(rng_stream(0, "test/fit1-in-sing"))
    for attempt in range(5):
        emb = discrim._random_slice(P, rng)
        minors = discrim.adjugate_forms(qs, emb, rng_seed=11 + attempt)
        zeros = discrim.slice_rational_zeros(minors, P)
        if zeros.shape[0] == 0:
            continue
        partials = discrim.partial_forms(qs, emb, rng_seed=17 + attempt)
        pmat = np.array([f.to_vec() for f in partials], dtype=np.int64)
        vals = matmul_mod(monomial_matrix(zeros, 9, P), pmat.T, P)
        assert not vals.any()
        # and the points genuinely drop to rank <= 8
        for z in zeros:
            u = matmul_mod(z.reshape(1, 4), emb.T, P).ravel()
            assert rank(discrim.gram_at(qs, u), P) <= 8
        return
    raise AssertionError("no rational rank-8 slice point in five embeddings")


def test_sprime_rank_strata(syz, peskine_pts):
    rep = discrim.fit0_sprime_checks(syz, peskine_pts, rng_seed=0)
    assert all_pass(rep)
    by_id = {c["id"]: c for c in rep}
    assert by_id["discrim.sprime_slice_degree"]["value"] == 120


def test_conjecture_probes_are_observational(qs, t1run, xpoints):
    t1_sample = trivector.peskine_sample(t1run.t1, 2, rng_seed=0)
    chord = [(xpoints[0], xpoints[1])]
    rep = discrim.conjecture_probes(qs, t1_sample, chord, rng_seed=0)
    assert all(c["status"] in ("pass", "skipped") for c in rep)
    by_id = {c["id"]: c for c in rep}
    assert by_id["discrim.conj_degree_arith_225"]["value"] is True
    assert by_id["discrim.conj_y1t1_rank_le8"]["value"] is True
    empty = discrim.conjecture_probes(qs, [], [], rng_seed=0)
    assert any(c["status"] == "skipped" for c in empty)
