"""The symmetric determinantal family over the quadric system.

A point u of the system's projectivization carries the symmetric matrix
A(u) = sum u_i Gram_i.  Its determinant cuts a degree-10 hypersurface;
the rank <= 8 locus (all 9x9 minors), the singular locus of the
determinant (its partials), and the rank loci of the 8x10 syzygy
evaluation s' all have known slice degrees, measured here on random
3-space slices via exact interpolation — the 10-variable determinant is
never expanded.
"""

from itertools import combinations

import numpy as np
from numpy.typing import NDArray

from .cover import ramification_value
from .ffla import (
    det,
    inv_matrix,
    kernel,
    matmul_mod,
    normalize_point,
    proj_points,
    rank,
    rng_stream,
    solve_many,
)
from .mpoly import (
    MPoly,
    binary_form_roots,
    interpolate,
    monomial_matrix,
    num_monomials,
    zero_dim_degree,
)
from .mukai import NonGenericPoint
from .report import check, note
from .syzygy import SyzygySpace, s_prime_at, vertex_fiber
from .xquad import QuadricSystem, XPoint

__all__ = [
    "gram_at",
    "adjugate",
    "disc_value_and_grad",
    "adjugate_forms",
    "fit1_slice_degree",
    "partial_forms",
    "sing_slice_degree",
    "partials_reevaluate",
    "slice_rational_zeros",
    "x60_membership",
    "fit0_sprime_checks",
    "conjecture_probes",
]


def _gram_stack(qs: QuadricSystem) -> NDArray[np.int64]:
    return np.array([qs.gram(i) for i in range(qs.space.dim)], dtype=np.int64)


def gram_at(qs: QuadricSystem, u) -> NDArray[np.int64]:
    """The symmetric 10x10 matrix of the quadric with coordinates u."""
    u = np.asarray(u, dtype=np.int64) % qs.p
    return np.tensordot(u, _gram_stack(qs), axes=(0, 0)) % qs.p


def adjugate(A, p: int) -> NDArray[np.int64]:
    """adj(A) with A @ adj(A) = det(A) * I; exact at every rank."""
    A = np.asarray(A, dtype=np.int64) % p
    d = det(A, p)
    if d:
        return d * inv_matrix(A, p) % p
    n = A.shape[0]
    adj = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        rows = [r for r in range(n) if r != i]
        for j in range(n):
            cols = [c for c in range(n) if c != j]
            m = det(A[np.ix_(rows, cols)], p)
            adj[j, i] = m if (i + j) % 2 == 0 else (-m) % p
    return adj


def disc_value_and_grad(qs: QuadricSystem, u) -> tuple[int, NDArray[np.int64]]:
    """Determinant of A(u) and its coordinate gradient trace(adj(A) Gram_i)."""
    p = qs.p
    A = gram_at(qs, u)
    adj = adjugate(A, p)
    grad = np.einsum("ab,iba->i", adj, _gram_stack(qs)) % p
    return det(A, p), grad


def _random_slice(p: int, rng) -> NDArray[np.int64]:
    while True:
        emb = rng.integers(0, p, size=(10, 4)).astype(np.int64)
        if rank(emb, p) == 4:
            return emb


def _sample_invertible(qs: QuadricSystem, emb, rng, count: int):
    """Distinct slice points where A is invertible, with det and inverse."""
    p = qs.p
    pts, adjs = [], []
    seen = set()
    while len(pts) < count:
        z = rng.integers(0, p, size=4)
        if not z.any():
            continue
        z = normalize_point(z % p, p)
        if tuple(z) in seen:
            continue
        seen.add(tuple(z))
        A = gram_at(qs, matmul_mod(z.reshape(1, 4), emb.T, p).ravel())
        d = det(A, p)
        if d == 0:
            continue
        pts.append(z)
        adjs.append(d * inv_matrix(A, p) % p)
    return np.array(pts, dtype=np.int64), np.array(adjs, dtype=np.int64)


def adjugate_forms(qs: QuadricSystem, emb, rng_seed: int = 0) -> list[MPoly]:
    """The 55 independent 9x9 minors of A restricted to a slice, as forms.

    The adjugate of a symmetric matrix is symmetric, so the upper triangle
    carries every minor up to sign; each entry is a degree-9 form in the
    four slice coordinates, pinned by 240 invertible sample points.
    """
    p = qs.p
    rng = rng_stream(rng_seed, "discrim/fit1-fit")
    npts = num_monomials(4, 9) + 20
    pts, adjs = _sample_invertible(qs, emb, rng, npts)
    M = monomial_matrix(pts, 9, p)
    cols = np.array(
        [adjs[:, a, b] for a in range(10) for b in range(a, 10)], dtype=np.int64
    ).T
    X, ok = solve_many(M, cols, p)
    if not ok.all():
        raise NonGenericPoint("a 9x9 minor did not fit a degree-9 form")
    return [MPoly.from_vec(X[:, k], 4, 9, p) for k in range(X.shape[1])]


def fit1_slice_degree(qs: QuadricSystem, rng_seed: int = 0, cap: int = 16):
    """Length of the rank-<=8 locus cut by a random 3-space (expected 165)."""
    rng = rng_stream(rng_seed, "discrim/fit1-slice")
    emb = _random_slice(qs.p, rng)
    forms = adjugate_forms(qs, emb, rng_seed=rng_seed)
    return zero_dim_degree(forms, cap=cap, rng_seed=rng_seed)


def partial_forms(qs: QuadricSystem, emb, rng_seed: int = 0) -> list[MPoly]:
    """The four slice partials of det A as degree-9 forms (adjugate identity)."""
    p = qs.p
    rng = rng_stream(rng_seed, "discrim/sing-fit")
    B = np.einsum("ik,iab->kab", np.asarray(emb, dtype=np.int64), _gram_stack(qs)) % p
    npts = num_monomials(4, 9) + 20
    pts, adjs = _sample_invertible(qs, emb, rng, npts)
    M = monomial_matrix(pts, 9, p)
    vals = np.einsum("nab,kba->nk", adjs, B) % p
    X, ok = solve_many(M, vals, p)
    if not ok.all():
        raise NonGenericPoint("a determinant partial did not fit a degree-9 form")
    return [MPoly.from_vec(X[:, k], 4, 9, p) for k in range(4)]


def sing_slice_degree(qs: QuadricSystem, rng_seed: int = 0, cap: int = 40):
    """Length of the singular locus of the sliced determinant (expected 225)."""
    rng = rng_stream(rng_seed, "discrim/sing-slice")
    emb = _random_slice(qs.p, rng)
    forms = partial_forms(qs, emb, rng_seed=rng_seed)
    return zero_dim_degree(forms, cap=cap, rng_seed=rng_seed)


def partials_reevaluate(qs: QuadricSystem, emb, forms, rng_seed: int = 0, count: int = 50) -> bool:
    """Interpolated partials agree with trace(adj B_k) at fresh points."""
    p = qs.p
    rng = rng_stream(rng_seed, "discrim/partials-recheck")
    B = np.einsum("ik,iab->kab", np.asarray(emb, dtype=np.int64), _gram_stack(qs)) % p
    fmat = np.array([f.to_vec() for f in forms], dtype=np.int64)
    for _ in range(count):
        z = rng.integers(0, p, size=4)
        if not z.any():
            continue
        u = matmul_mod(z.reshape(1, 4) % p, emb.T, p).ravel()
        adj = adjugate(gram_at(qs, u), p)
        direct = np.einsum("ab,kba->k", adj, B) % p
        fitted = matmul_mod(monomial_matrix(z.reshape(1, 4) % p, 9, p), fmat.T, p).ravel()
        if not np.array_equal(direct, fitted):
            return False
    return True


def slice_rational_zeros(forms: list[MPoly], p: int, block: int = 120_000) -> NDArray[np.int64]:
    """All rational 3-space points where every form vanishes."""
    deg = forms[0].degree
    fmat = np.array([f.to_vec() for f in forms], dtype=np.int64)
    cands = proj_points(3, p)
    hits = []
    for lo in range(0, len(cands), block):
        chunk = cands[lo : lo + block]
        vals = matmul_mod(monomial_matrix(chunk, deg, p), fmat.T, p)
        hits.append(chunk[~vals.any(axis=1)])
    return np.vstack(hits) if hits else np.zeros((0, 4), dtype=np.int64)


def x60_membership(syz: SyzygySpace, qs: QuadricSystem, x: XPoint) -> list[dict]:
    """A generic quadric singular at a surface point: rank 9, vertex x, critical.

    The 4-dim space of such quadrics meets the rank-9 stratum of the
    determinant hypersurface exactly along the singular locus that is
    not already rank <= 8.
    """
    p = qs.p
    fiber = vertex_fiber(syz, qs, x)
    member = None
    for t in range(1, p):
        w = np.array([pow(t, e, p) for e in range(fiber.dim)], dtype=np.int64)
        u = matmul_mod(w.reshape(1, -1), fiber.basis, p).ravel()
        if rank(gram_at(qs, u), p) == 9:
            member = u
            break
    if member is None:
        raise NonGenericPoint("no rank-9 member in the vertex fiber")
    A = gram_at(qs, member)
    ker = kernel(A, p)
    val, grad = disc_value_and_grad(qs, member)
    return [
        check("discrim.x60_member_rank", rank(A, p), 9, "discrim"),
        check("discrim.x60_vertex_dim", ker.dim, 1, "discrim"),
        check(
            "discrim.x60_vertex_is_x",
            bool(np.array_equal(normalize_point(ker.basis[0], p), x.coords)),
            True,
            "discrim",
        ),
        check("discrim.x60_det", val, 0, "discrim"),
        check("discrim.x60_gradient_zero", not grad.any(), True, "discrim"),
    ]


def _sprime_minor_forms(syz: SyzygySpace, emb, rng_seed: int) -> list[MPoly]:
    """The 45 octic 8x8 minors of s' on a slice, by interpolation."""
    p = syz.p
    rng = rng_stream(rng_seed, "discrim/sprime-fit")
    npts = num_monomials(4, 8) + 20
    pts = []
    seen = set()
    while len(pts) < npts:
        z = rng.integers(0, p, size=4)
        if not z.any():
            continue
        z = normalize_point(z % p, p)
        if tuple(z) in seen:
            continue
        seen.add(tuple(z))
        pts.append(z)
    pts = np.array(pts, dtype=np.int64)
    col_sets = list(combinations(range(10), 8))
    vals = np.zeros((npts, len(col_sets)), dtype=np.int64)
    for n, z in enumerate(pts):
        u = matmul_mod(z.reshape(1, 4), np.asarray(emb, dtype=np.int64).T, p).ravel()
        S = s_prime_at(syz, u)
        for c, cols in enumerate(col_sets):
            vals[n, c] = det(S[:, cols], p)
    M = monomial_matrix(pts, 8, p)
    X, ok = solve_many(M, vals, p)
    if not ok.all():
        raise NonGenericPoint("an 8x8 minor did not fit a degree-8 form")
    return [MPoly.from_vec(X[:, k], 4, 8, p) for k in range(X.shape[1])]


def fit0_sprime_checks(
    syz: SyzygySpace,
    peskine_points,
    rng_seed: int = 0,
    generic_count: int = 100,
    max_slices: int = 6,
    cap: int = 14,
) -> list[dict]:
    """Slice degree 120 for the rank-<=7 locus of s', plus its rank profile."""
    p = syz.p
    rng = rng_stream(rng_seed, "discrim/sprime-slices")
    emb = _random_slice(p, rng)
    forms = _sprime_minor_forms(syz, emb, rng_seed)
    res = zero_dim_degree(forms, cap=cap, rng_seed=rng_seed)
    out = [
        check("discrim.sprime_slice_conclusive", res.conclusive, True, "discrim"),
        check("discrim.sprime_slice_degree", res.value, 120, "discrim"),
    ]

    peskine_ranks = sorted({rank(s_prime_at(syz, pt.coords), p) for pt in peskine_points})
    out.append(check("discrim.sprime_rank_on_peskine", peskine_ranks, [6], "discrim"))

    gen = np.random.default_rng(rng_stream(rng_seed, "discrim/sprime-generic"))
    generic_ranks = {
        rank(s_prime_at(syz, gen.integers(0, p, size=10)), p) for _ in range(generic_count)
    }
    out.append(check("discrim.sprime_rank_generic", sorted(generic_ranks), [8], "discrim"))

    found_rank7 = False
    for trial in range(max_slices):
        trial_emb = emb if trial == 0 else _random_slice(p, rng)
        trial_forms = forms if trial == 0 else _sprime_minor_forms(
            syz, trial_emb, rng_seed + 101 * trial
        )
        for z in slice_rational_zeros(trial_forms, p):
            u = matmul_mod(z.reshape(1, 4), trial_emb.T, p).ravel()
            if rank(s_prime_at(syz, u), p) == 7:
                found_rank7 = True
                break
        if found_rank7:
            break
    out.append(check("discrim.sprime_rank7_exists", found_rank7, True, "discrim"))
    return out


def conjecture_probes(
    qs: QuadricSystem,
    t1_peskine_points,
    chord_pairs,
    rng_seed: int = 0,
) -> list[dict]:
    """Observational records for open inclusions; never asserted.

    t1_peskine_points: sampled rank-<=6 points of the five-point form,
    probed for low symmetric rank.  chord_pairs: pairs of surface points;
    the branch determinant restricted to their chord is sampled at its
    rational roots.
    """
    p = qs.p
    out = []
    if not t1_peskine_points:
        out.append(note("discrim.conj_y1t1_gram", "skipped: no sample", "discrim", status="skipped"))
    else:
        ranks = [int(rank(gram_at(qs, pt.coords), p)) for pt in t1_peskine_points]
        out.append(note("discrim.conj_y1t1_gram_ranks", ranks, "discrim"))
        out.append(note("discrim.conj_y1t1_rank_le8", all(r <= 8 for r in ranks), "discrim"))
    for a, b in chord_pairs:
        params = np.array([(1, n) for n in range(11)] + [(0, 1)], dtype=np.int64)
        vals = np.array(
            [
                ramification_value(qs, (mu * a.coords + nu * b.coords) % p)
                for mu, nu in params
            ],
            dtype=np.int64,
        )
        if not vals.any():
            out.append(note("discrim.conj_secant_chord", "branch form zero on chord", "discrim"))
            continue
        form = interpolate(params, vals, 10, p)
        roots = binary_form_roots(form.to_vec(), p)
        confirmed = all(
            ramification_value(qs, (mu * a.coords + nu * b.coords) % p) == 0
            for (mu, nu), _m in roots.fp
        )
        out.append(
            note(
                "discrim.conj_secant_chord_roots",
                {"rational_roots": len(roots.fp), "vanish": confirmed},
                "discrim",
            )
        )
    out.append(note("discrim.conj_degree_arith_225", 150 + 15 + 60 == 225, "discrim"))
    out.append(note("discrim.conj_degree_arith_r60", 120 - 60 == 60, "discrim"))
    return out
