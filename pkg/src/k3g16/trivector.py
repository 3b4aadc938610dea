"""Generic geometry of an alternating 3-tensor on a 10-dim space.

For a trivector t, contraction with a vector gives a skew 10x10 matrix
of generic rank 8.  Three loci drive everything downstream:

* the Peskine locus, where the contraction rank drops to <= 6 (a
  codimension-3 sixfold of degree 15),
* the congruence lines: 2-planes with t(V2, V2, -) = 0, exactly one
  through a generic point (the kernel of its contraction),
* the secancy divisor on a line: the binary quartic cutting out the
  Peskine points sitting on it.

The module also carries the bilinear pairing between trivectors of
opposite variance (composition through the middle wedge factor), its
20-dim orthogonal, and the orbit-tangency test used to isolate a
trivector inside that orthogonal.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .ffla import (
    Subspace,
    intersect,
    kernel,
    matmul_mod,
    normalize_point,
    pfaffian,
    proj_points,
    rank,
    rng_stream,
)
from .mpoly import (
    BinaryRoots,
    MPoly,
    binary_form_gcd,
    binary_form_roots,
    interpolate,
    monomial_matrix,
    zero_dim_degree,
)
from .multilinear import Trivector, wedge_pairs, wedge_triples

__all__ = [
    "PointOnPeskine",
    "DegenerateLine",
    "PeskinePoint",
    "peskine_test",
    "congruence_line_through",
    "line_secancy",
    "slice_quartics",
    "peskine_slice_degree",
    "peskine_sample",
    "compose",
    "perp_space",
    "orbit_matrix",
    "orbit_tangent_intersection",
]


class PointOnPeskine(RuntimeError):
    """The contraction rank already dropped; no unique line here."""


class DegenerateLine(RuntimeError):
    """Every sub-Pfaffian dies on the line: it sits inside the rank-6 locus."""


@dataclass(frozen=True, eq=False)
class PeskinePoint:
    coords: NDArray[np.int64]
    kernel4: Subspace

    def key(self) -> tuple:
        return tuple(int(v) for v in self.coords)


def peskine_test(t: Trivector, v) -> tuple[int, Subspace | None]:
    """Rank of the contraction at v, plus its kernel when rank <= 6."""
    M = t.contract(v)
    r = rank(M, t.p)
    if r <= 6:
        return r, kernel(M, t.p)
    return r, None


def congruence_line_through(t: Trivector, q) -> Subspace:
    """The unique 2-plane through q with t(V2, V2, -) = 0 (rank-8 kernel)."""
    q = np.asarray(q, dtype=np.int64) % t.p
    M = t.contract(q)
    r = rank(M, t.p)
    if r < 8:
        raise PointOnPeskine(f"contraction rank {r} < 8")
    line = kernel(M, t.p)
    if not line.contains(q):
        raise AssertionError("contraction kernel lost its own point")
    u, w = line.basis
    if np.any(matmul_mod(t.contract(u), w.reshape(-1, 1), t.p)):
        raise AssertionError("kernel 2-plane is not a congruence line")
    return line


def _restricted_pfaffian_values(
    t: Trivector, u, w, others, params
) -> NDArray[np.int64]:
    """Values of one sub-Pfaffian along the line mu*u + nu*w.

    `others` lists the 8 coordinate slots kept; the Pfaffian of the skew
    contraction restricted to them is a binary quartic in (mu, nu).
    """
    p = t.p
    out = np.empty(len(params), dtype=np.int64)
    for n, (mu, nu) in enumerate(params):
        y = (mu * u + nu * w) % p
        M = t.contract(y)
        out[n] = pfaffian(M[np.ix_(others, others)], p)
    return out


def line_secancy(t: Trivector, line: Subspace) -> tuple[NDArray[np.int64], BinaryRoots | None]:
    """The binary quartic cutting the rank-<=6 points out of a line.

    Restricts all 45 principal 8x8 sub-Pfaffians to the line by
    evaluation/interpolation and returns their monic gcd with its roots
    over the quadratic closure.  A gcd of degree 0 means the line misses
    the locus (empty secancy, roots None); an identically-zero system
    raises DegenerateLine.
    """
    p = t.p
    if line.dim != 2:
        raise ValueError("need a 2-dim subspace")
    u, w = line.basis
    params = [(1, n) for n in range(5)] + [(0, 1), (1, 5), (1, 6)]
    quartics = []
    for i, j in wedge_pairs(t.dim):
        others = [c for c in range(t.dim) if c not in (i, j)]
        vals = _restricted_pfaffian_values(t, u, w, others, params)
        if not vals.any():
            continue
        # fit a binary quartic through the 8 sampled parameter values
        pts = np.array(params, dtype=np.int64)
        quartic = interpolate(pts, vals, 4, p)
        # coefficient vector ordered by descending mu-degree
        quartics.append(quartic.to_vec())
    if not quartics:
        raise DegenerateLine("all sub-Pfaffians vanish along the line")
    g = binary_form_gcd([np.asarray(q) for q in quartics], p)
    if g.size <= 1:
        return g, None
    return g, binary_form_roots(g, p)


def slice_quartics(t: Trivector, emb: NDArray[np.int64], rng_seed: int = 0) -> list[MPoly]:
    """The 45 sub-Pfaffian quartics restricted to a P3 slice, by interpolation.

    emb is a 10x4 coordinate matrix; each principal 8x8 Pfaffian of the
    contraction is a quartic in the four slice coordinates, pinned down
    by evaluation at 60 slice points.
    """
    p = t.p
    rng = rng_stream(rng_seed, "trivector/slice-fit")
    pts = []
    seen = set()
    while len(pts) < 60:
        c = rng.integers(0, p, size=4)
        if not c.any():
            continue
        c = normalize_point(c % p, p)
        if tuple(c) in seen:
            continue
        seen.add(tuple(c))
        pts.append(c)
    pts = np.array(pts, dtype=np.int64)
    amb = matmul_mod(pts, emb.T, p)  # points of the slice in 10 coords
    out = []
    for i, j in wedge_pairs(t.dim):
        others = [c for c in range(t.dim) if c not in (i, j)]
        vals = np.array(
            [pfaffian(t.contract(y)[np.ix_(others, others)], p) for y in amb],
            dtype=np.int64,
        )
        if not vals.any():
            continue
        out.append(interpolate(pts, vals, 4, p))
    return out


def peskine_slice_degree(t: Trivector, rng_seed: int = 0, cap: int = 14):
    """Length of the rank-<=6 locus cut by a random P3 (expected 15)."""
    p = t.p
    rng = rng_stream(rng_seed, "trivector/slice")
    while True:
        emb = rng.integers(0, p, size=(10, 4)).astype(np.int64)
        if rank(emb, p) == 4:
            break
    gens = slice_quartics(t, emb, rng_seed=rng_seed)
    if not gens:
        raise DegenerateLine("slice sits inside the rank-6 locus")
    return zero_dim_degree(gens, cap=cap, rng_seed=rng_seed)


def peskine_sample(
    t: Trivector,
    n: int,
    rng_seed: int = 0,
    max_slices: int = 6,
) -> list[PeskinePoint]:
    """Rational rank-<=6 points, found by scanning random P3 slices.

    Each slice carries ~15 closure points, so roughly one rational point
    shows up per slice; scanning is a batched evaluation of the slice
    quartics over all of P3(F_p).
    """
    p = t.p
    rng = rng_stream(rng_seed, "trivector/peskine-sample")
    found: list[PeskinePoint] = []
    seen = set()
    cands = proj_points(3, p)
    for trial in range(max_slices):
        if len(found) >= n:
            break
        emb = rng.integers(0, p, size=(10, 4)).astype(np.int64)
        if rank(emb, p) != 4:
            continue
        gens = slice_quartics(t, emb, rng_seed=rng_seed + 257 * trial)
        if not gens:
            continue
        qmat = np.array([g.to_vec() for g in gens], dtype=np.int64)
        for lo in range(0, len(cands), 120_000):
            block = cands[lo : lo + 120_000]
            vals = matmul_mod(monomial_matrix(block, 4, p), qmat.T, p)
            hits = np.nonzero(~vals.any(axis=1))[0]
            for h in hits:
                y = normalize_point(matmul_mod(block[h], emb.T, p), p)
                if tuple(y) in seen:
                    continue
                r, ker4 = peskine_test(t, y)
                if r > 6 or ker4 is None:
                    continue
                seen.add(tuple(y))
                found.append(PeskinePoint(coords=y, kernel4=ker4))
    return found[:n]


def compose(b: Trivector, a: Trivector) -> NDArray[np.int64]:
    """The 10x10 composite: contract with a, then pair the wedge with b."""
    if b.dual or not a.dual:
        raise ValueError("compose wants (plain, dual) trivectors")
    if b.p != a.p or b.dim != a.dim:
        raise ValueError("mismatched trivectors")
    return matmul_mod(b.flattening(), a.flattening().T, b.p)


def perp_space(b: Trivector) -> Subspace:
    """Dual trivectors killed by composition with b (expected dim 20)."""
    p = b.p
    n = b.dim
    pairs = list(wedge_pairs(n))
    triples = wedge_triples(n)
    cols = np.zeros((n * n, len(triples)), dtype=np.int64)
    fb = b.flattening()
    pair_pos = {pr: m for m, pr in enumerate(pairs)}
    for idx, (i, j, k) in enumerate(triples):
        # flattening of the dual basis trivector e^i ^ e^j ^ e^k
        fa = np.zeros((n, len(pairs)), dtype=np.int64)
        fa[i, pair_pos[(j, k)]] = 1
        fa[j, pair_pos[(i, k)]] = p - 1
        fa[k, pair_pos[(i, j)]] = 1
        cols[:, idx] = matmul_mod(fb, fa.T, p).reshape(-1)
    return kernel(cols, p)


def orbit_matrix(t: Trivector) -> NDArray[np.int64]:
    """120x100 matrix of the infinitesimal orbit map h -> t(h., ., .) + ...."""
    p = t.p
    n = t.dim
    D = t.dense()
    triples = wedge_triples(n)
    out = np.zeros((len(triples), n * n), dtype=np.int64)
    for r in range(n):
        for s in range(n):
            # h = E_{rs}: substitute e_r for e_s in one slot at a time
            T = np.zeros((n, n, n), dtype=np.int64)
            T[s, :, :] += D[r, :, :]
            T[:, s, :] += D[:, r, :]
            T[:, :, s] += D[:, :, r]
            T %= p
            out[:, r * n + s] = [T[i, j, k] for (i, j, k) in triples]
    return out


def orbit_tangent_intersection(t1: Trivector, perp: Subspace) -> tuple[int, bool]:
    """Dim of (orbit tangent space of t1) meet perp, and whether t1 is inside."""
    p = t1.p
    tangent = Subspace.from_rows(orbit_matrix(t1).T, p)
    meet = intersect(tangent, perp)
    return meet.dim, meet.contains(t1.to_vec())
