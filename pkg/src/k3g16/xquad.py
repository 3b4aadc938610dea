"""The 10 quadrics through the degree-21 threefold and everything sampled from them.

The threefold X in P^9 is swept by the plane fibers P(T_x*) as x runs over
3-space.  Restricting to the planes over one hyperplane of 3-space gives a
scroll lying on exactly 4 independent quadrics; the union of those 4-spaces
over a handful of hyperplanes is the full 10-dimensional system V10.  From
V10 everything else is sampled: rational points of X inside chosen planes,
the unique ruling line through a smooth point, Hilbert-function values of
the quadric ideal, the rank-8 pencil common to all plane systems, and the
span of ruling bivectors that models the underlying K3 surface in Plucker
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .ffla import (
    Subspace,
    intersect,
    kernel,
    matmul_mod,
    normalize_point,
    proj_points,
    rank,
    rng_stream,
    span_union,
)
from .mpoly import (
    MPoly,
    homogeneous_ideal_dim,
    monomial_matrix,
    num_monomials,
    vanishing_forms,
    zero_dim_degree,
)
from .multilinear import wedge_pairs
from .mukai import AlphaTensor, NonGenericPoint, Seed, SeedNotGeneric, t_fiber
from .report import check

HILBERT_TARGETS = {m: 21 * comb(m + 3, 3) - 36 * comb(m + 2, 2) + 17 * (m + 1) for m in range(2, 13)}


class NonGenericPlane(RuntimeError):
    """A hyperplane of 3-space whose scroll did not behave generically (resample)."""


@dataclass(frozen=True, eq=False)
class QuadricSystem:
    """The quadrics through X: a 10-dim subspace of the 55 quadric coefficients."""

    p: int
    space: Subspace
    plane_spaces: tuple[Subspace, ...]
    planes: NDArray[np.int64]  # the covectors cutting the sampled hyperplanes
    planes_to_span: int  # how many planes the span actually needed

    def quadrics(self) -> list[MPoly]:
        return [MPoly.from_vec(row, 10, 2, self.p) for row in self.space.basis]

    def gram(self, i: int) -> NDArray[np.int64]:
        return self.quadrics()[i].gram()

    def evaluate_at(self, w) -> NDArray[np.int64]:
        """Values of all basis quadrics at one or many points of P^9."""
        w = np.atleast_2d(np.asarray(w, dtype=np.int64))
        return matmul_mod(monomial_matrix(w, 2, self.p), self.space.basis.T, self.p).squeeze()

    def jacobian_at(self, w) -> NDArray[np.int64]:
        """Rows are the gradients of the basis quadrics at w."""
        w = np.asarray(w, dtype=np.int64).reshape(10, 1)
        rows = [(2 * matmul_mod(q.gram(), w, self.p) % self.p).ravel() for q in self.quadrics()]
        return np.array(rows, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class XPoint:
    coords: NDArray[np.int64]  # normalized point of P^9
    source_x: NDArray[np.int64]  # the point of 3-space whose plane contains it

    def key(self) -> tuple:
        return tuple(int(v) for v in self.coords)


@dataclass(frozen=True, eq=False)
class Ruling:
    points: NDArray[np.int64]  # 2 x 10, two spanning points
    space: Subspace  # the same line as a 2-dim subspace

    def key(self) -> tuple:
        return tuple(int(v) for v in self.space.basis.reshape(-1))


def _plane_point_sampler(alpha: AlphaTensor, lam, rng):
    """Yields (x, w): x in the hyperplane lam = 0, w a point of the fiber plane at x."""
    p = alpha.p
    B = kernel(np.asarray(lam, dtype=np.int64).reshape(1, 4), p).basis  # 3 x 4
    while True:
        c = rng.integers(0, p, 3)
        if not c.any():
            continue
        x = matmul_mod(c.reshape(1, 3), B, p).ravel()
        try:
            T = t_fiber(alpha, x)
        except NonGenericPoint:
            continue
        d = rng.integers(0, p, 3)
        if not d.any():
            continue
        w = matmul_mod(d.reshape(1, 3), T.basis, p).ravel()
        if w.any():
            yield x, w


def plane_quadrics(alpha: AlphaTensor, lam, rng_seed: int = 0, n_points: int = 80) -> Subspace:
    """Quadrics on P^9 vanishing on the scroll of fiber planes over lam = 0.

    Vanishing is imposed at sampled scroll points, oversampled past n_points
    and accepted only after two stabilization rounds; the stable answer must
    be 4-dimensional.
    """
    p = alpha.p
    tag = "/".join(str(int(v)) for v in np.asarray(lam).ravel())
    rng = rng_stream(rng_seed, f"xquad/plane/{tag}")
    sampler = _plane_point_sampler(alpha, lam, rng)
    pts = []
    seen = set()
    while len(pts) < n_points + 20:
        _, w = next(sampler)
        w = normalize_point(w, p)
        k = tuple(int(v) for v in w)
        if k not in seen:
            seen.add(k)
            pts.append(w)
    first = vanishing_forms(np.array(pts[:n_points]), 2, 10, p)
    second = vanishing_forms(np.array(pts), 2, 10, p)
    if first != second:
        raise NonGenericPlane(f"vanishing space did not stabilize over plane {tag}")
    if second.dim != 4:
        raise NonGenericPlane(f"plane {tag} gives a {second.dim}-dim system, wanted 4")
    return second


def assemble_v10(seed: Seed, alpha: AlphaTensor, n_planes: int = 6, budget: int = 12) -> QuadricSystem:
    """Union of plane systems over generic hyperplanes; must stabilize at dim 10."""
    p = seed.p
    rng = rng_stream(seed.rng_seed, "xquad/planes")
    spaces: list[Subspace] = []
    lams: list[NDArray[np.int64]] = []
    planes_to_span: Optional[int] = None
    draws = 0
    while len(spaces) < n_planes:
        if draws >= budget:
            raise SeedNotGeneric(f"only {len(spaces)} generic planes in {budget} draws")
        lam = rng.integers(0, p, 4)
        draws += 1
        if not lam.any():
            continue
        try:
            sp = plane_quadrics(alpha, lam, rng_seed=seed.rng_seed)
        except NonGenericPlane:
            continue
        spaces.append(sp)
        lams.append(lam)
        dim_now = span_union(spaces).dim
        if dim_now > 10:
            raise RuntimeError("quadric span exceeded 10: a vanishing condition is wrong")
        if dim_now == 10 and planes_to_span is None:
            planes_to_span = len(spaces)
    total = span_union(spaces)
    if total.dim < 10:
        raise SeedNotGeneric(f"plane systems span only {total.dim} < 10 quadrics")
    return QuadricSystem(p, total, tuple(spaces), np.array(lams, dtype=np.int64), planes_to_span)


def x_points_in_plane(alpha: AlphaTensor, qs: QuadricSystem, x) -> list[XPoint]:
    """All rational points of X inside the fiber plane at x (at most 4)."""
    p = alpha.p
    T = t_fiber(alpha, x)
    emb = T.basis.T  # 10 x 3
    restricted = np.array([q.restrict(emb).to_vec() for q in qs.quadrics()], dtype=np.int64)
    plane_pts = proj_points(2, p)
    vals = matmul_mod(monomial_matrix(plane_pts, 2, p), restricted.T, p)
    hits = ~np.any(vals, axis=1)
    if int(hits.sum()) > 4:
        raise SeedNotGeneric(f"{int(hits.sum())} > 4 plane points on all quadrics")
    out = []
    for c in plane_pts[hits]:
        w = normalize_point(matmul_mod(c.reshape(1, 3), T.basis, p).ravel(), p)
        out.append(XPoint(w, np.asarray(x, dtype=np.int64) % p))
    return out


def plane_intersection_degree(alpha: AlphaTensor, qs: QuadricSystem, x):
    """Scheme length of X meet the fiber plane over the closure (expect 4)."""
    T = t_fiber(alpha, x)
    emb = T.basis.T
    gens = [g for g in (q.restrict(emb) for q in qs.quadrics()) if not g.is_zero]
    if not gens:
        raise NonGenericPoint("all quadrics restrict to zero on the fiber plane")
    return zero_dim_degree(gens, cap=12)


def sample_x_points(
    seed: Seed,
    alpha: AlphaTensor,
    qs: QuadricSystem,
    count: int,
    budget_planes: int = 500,
    purpose: str = "xquad/sample-x",
) -> list[XPoint]:
    """Rational X points from fiber planes over fresh random x, until count is met."""
    p = seed.p
    rng = rng_stream(seed.rng_seed, purpose)
    out: list[XPoint] = []
    seen = set()
    for _ in range(budget_planes):
        if len(out) >= count:
            break
        x = rng.integers(0, p, 4)
        if not x.any():
            continue
        try:
            pts = x_points_in_plane(alpha, qs, x)
        except (NonGenericPoint, SeedNotGeneric):
            continue
        for pt in pts:
            if pt.key() not in seen:
                seen.add(pt.key())
                out.append(pt)
    if len(out) < count:
        raise SeedNotGeneric(f"only {len(out)} X points from {budget_planes} planes")
    return out[:count]


def ruling_through(qs: QuadricSystem, pt: XPoint) -> Ruling:
    """The unique line on all 10 quadrics through a smooth sampled point."""
    p = qs.p
    J = qs.jacobian_at(pt.coords)
    if rank(J, p) != 6:
        raise NonGenericPoint(f"Jacobian rank {rank(J, p)} != 6 at {list(map(int, pt.coords))}")
    K = kernel(J, p)  # affine tangent space, dim 4, contains the point
    comp = _complement_in_tangent(K, pt.coords, p)
    restricted = np.array([q.restrict(comp.T).to_vec() for q in qs.quadrics()], dtype=np.int64)
    plane_pts = proj_points(2, p)
    vals = matmul_mod(monomial_matrix(plane_pts, 2, p), restricted.T, p)
    hits = np.flatnonzero(~np.any(vals, axis=1))
    if hits.size != 1:
        raise NonGenericPoint(f"{hits.size} ruling directions at {list(map(int, pt.coords))}")
    v = matmul_mod(plane_pts[hits[0]].reshape(1, 3), comp, p).ravel()
    line = Subspace.from_rows(np.vstack([pt.coords, v]), p)
    return Ruling(np.vstack([pt.coords, normalize_point(v, p)]), line)


def _complement_in_tangent(K: Subspace, pt, p: int) -> NDArray[np.int64]:
    """Three rows completing the point to a basis of its affine tangent space."""
    red = K.coords(pt)
    lead = int(np.flatnonzero(red)[0])
    rows = [K.basis[i] for i in range(K.dim) if i != lead]
    return np.array(rows, dtype=np.int64)


def line_on_quadrics(qs: QuadricSystem, r: Ruling) -> bool:
    """Three-point test: a quadric vanishing at 3 points of a line vanishes on it."""
    a, b = r.points
    probes = np.vstack([a, b, (a + b) % qs.p])
    return not qs.evaluate_at(probes).any()


def hilbert_check(qs: QuadricSystem, m_max: int = 6, rng_seed: int = 0) -> list[dict]:
    """Codimensions of the quadric ideal in degrees 2..m_max, and the degree of X.

    The target values come from the alternating combination of the three
    projective-space Hilbert polynomials (45, 128, 280, 522, 875 for
    m = 2..6); the third finite difference of the sequence gives deg X = 21.
    """
    gens = qs.quadrics()
    out = []
    values = {}
    for m in range(2, m_max + 1):
        hf = num_monomials(10, m) - homogeneous_ideal_dim(gens, m, rng_seed=rng_seed)
        values[m] = hf
        out.append(check(f"hilbert.m{m}", hf, HILBERT_TARGETS[m], "quadrics"))
    if m_max >= 5:
        third = values[5] - 3 * values[4] + 3 * values[3] - values[2]
        out.append(check("hilbert.third_difference", third, 21, "quadrics"))
    return out


def pencil(qs: QuadricSystem) -> Subspace:
    """The 2-dim intersection of all per-plane systems."""
    if len(qs.plane_spaces) < 3:
        raise ValueError("need at least 3 plane systems")
    cur = qs.plane_spaces[0]
    for sp in qs.plane_spaces[1:]:
        cur = intersect(cur, sp)
    if cur.dim != 2:
        raise SeedNotGeneric(f"plane systems intersect in dim {cur.dim}, wanted 2")
    return cur


def pencil_rank_profile(qs: QuadricSystem, pen: Subspace, n_members: int = 20, rng_seed: int = 0) -> set:
    """Gram ranks over random members of the pencil (plus both basis members)."""
    p = qs.p
    rng = rng_stream(rng_seed, "xquad/pencil-members")
    ranks = set()
    members = [pen.basis[0], pen.basis[1]]
    for _ in range(n_members):
        c = rng.integers(0, p, 2)
        if not c.any():
            continue
        members.append(matmul_mod(c.reshape(1, 2), pen.basis, p).ravel())
    for vec in members:
        ranks.add(rank(MPoly.from_vec(vec, 10, 2, p).gram(), p))
    return ranks


def ruling_bivector(r: Ruling, p: int) -> NDArray[np.int64]:
    """Plucker coordinates of the line: 45 signed 2x2 minors, pairs in lex order."""
    a, b = r.space.basis[0], r.space.basis[1]
    out = np.empty(45, dtype=np.int64)
    for idx, (i, j) in enumerate(wedge_pairs(10)):
        out[idx] = (int(a[i]) * int(b[j]) - int(a[j]) * int(b[i])) % p
    return out


def _sub_pfaffians(p: int) -> list[MPoly]:
    """The 210 quadratic relations among the 45 coordinates of a skew matrix."""
    pidx = {pr: i for i, pr in enumerate(wedge_pairs(10))}
    gens = []
    for i in range(10):
        for j in range(i + 1, 10):
            for k in range(j + 1, 10):
                for l in range(k + 1, 10):
                    q = MPoly.zero(45, 2, p)
                    for (a, b), (c, d), sgn in (
                        ((i, j), (k, l), 1),
                        ((i, k), (j, l), -1),
                        ((i, l), (j, k), 1),
                    ):
                        m = MPoly.variable(45, pidx[(a, b)], p) * MPoly.variable(45, pidx[(c, d)], p)
                        q = q + m.scale(sgn % p)
                    gens.append(q)
    return gens


def plucker_model(
    rulings: list[Ruling], p: int, rng_seed: int = 0, m_max: int = 4
) -> list[dict]:
    """The K3 model in Plucker coordinates, from the span of ruling bivectors.

    Checks: span dim 17, annihilator dim 28, and the Hilbert function of the
    skew-matrix quadric relations restricted to the span: 2 + 15 m^2 for
    m = 1..m_max (17, 62, 137, 242).
    """
    vecs = np.array([ruling_bivector(r, p) for r in rulings], dtype=np.int64)
    span = Subspace.from_rows(vecs, p)
    out = [check("plucker.span", span.dim, 17, "plucker")]
    out.append(check("plucker.annihilator", span.annihilator().dim, 28, "plucker"))
    if span.dim != 17:
        return out
    emb = span.basis.T  # 45 x 17
    gens = [q.restrict(emb) for q in _sub_pfaffians(p)]
    gens = [g for g in gens if not g.is_zero]
    for m in range(1, m_max + 1):
        if m == 1:
            hf = 17
        else:
            hf = num_monomials(17, m) - homogeneous_ideal_dim(gens, m, rng_seed=rng_seed)
        out.append(check(f"plucker.hf_m{m}", hf, 2 + 15 * m * m, "plucker"))
    return out
