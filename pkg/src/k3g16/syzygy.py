"""Linear syzygies of the quadric system, the symplectic form, and t2.

The ten quadrics admit an 8-dimensional space of linear syzygies
sum_i L_i Q_i = 0.  Packaging the syzygy coefficients as a pencil of
10x8 matrices of linear forms (`s_gamma_at`) exposes three structures:

* a rank-4 "vertex" subsystem at each surface point (the quadrics
  singular there),
* a skew isomorphism phi on the syzygy space, found as the unique
  matrix making s_gamma . phi . s_gamma^T land in the quadric system,
* an alternating trivector t2 on the quadric system itself, read off
  from that composite.

The cokernel of t2's flattening is then matched against the quadratic
syzygies, and t2 is shown to vanish on the 6-plane orthogonal to each
vertex fiber.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .ffla import Subspace, kernel, matmul_mod, normalize_point, rank, span_union
from .mpoly import monomial_index, num_monomials, vanishing_forms
from .multilinear import Trivector
from .mukai import SeedNotGeneric
from .report import check
from .xquad import QuadricSystem, Ruling, XPoint

__all__ = [
    "SyzygySpace",
    "SymplecticPhi",
    "linear_syzygies",
    "s_gamma_at",
    "s_prime_at",
    "vertex_fiber",
    "vertex_fiber_check",
    "ruling_constancy_check",
    "phi_compute",
    "t2_compute",
    "quadratic_syzygy_check",
    "dv_sixplane_check",
    "global_generation_check",
    "isotropy_check",
]


@dataclass(frozen=True, eq=False)
class SyzygySpace:
    """The syzygies sum_i L_i Q_i = 0, as an 8x10x10 coefficient tensor.

    gamma[k, i, j] is the coefficient of variable j in the linear form
    that syzygy k attaches to quadric i.
    """

    p: int
    space: Subspace  # dim 8 inside the 100-dim quadric (x) linear slot
    gamma: NDArray[np.int64]  # (8, 10, 10)


@dataclass(frozen=True, eq=False)
class SymplecticPhi:
    """Skew invertible 8x8 matrix on the syzygy space, scaled to lead with 1."""

    p: int
    matrix: NDArray[np.int64]


def _mul_table_deg2(nvars: int) -> NDArray[np.int64]:
    """T[m, j] = index of (degree-2 monomial m) * x_j among degree-3 monomials."""
    idx3 = monomial_index(nvars, 3)
    mons2 = tuple(monomial_index(nvars, 2))
    T = np.empty((len(mons2), nvars), dtype=np.int64)
    for m, e in enumerate(mons2):
        for j in range(nvars):
            bumped = e[:j] + (e[j] + 1,) + e[j + 1 :]
            T[m, j] = idx3[bumped]
    return T


def _mul_table_deg1(nvars: int) -> NDArray[np.int64]:
    """T[i, j] = index of x_i * x_j among degree-2 monomials."""
    idx2 = monomial_index(nvars, 2)
    T = np.empty((nvars, nvars), dtype=np.int64)
    for i in range(nvars):
        for j in range(nvars):
            e = [0] * nvars
            e[i] += 1
            e[j] += 1
            T[i, j] = idx2[tuple(e)]
    return T


def linear_syzygies(qs: QuadricSystem) -> SyzygySpace:
    """Kernel of multiplication (quadrics) x (linear forms) -> cubics; dim 8."""
    p = qs.p
    qvecs = qs.space.basis  # 10 x 55
    table = _mul_table_deg2(10)
    M = np.zeros((100, num_monomials(10, 3)), dtype=np.int64)
    for i in range(10):
        for j in range(10):
            np.add.at(M[i * 10 + j], table[:, j], qvecs[i])
    M %= p
    syz = kernel(M.T, p)
    if syz.dim != 8:
        raise SeedNotGeneric(f"linear syzygy space has dim {syz.dim} != 8")
    gamma = syz.basis.reshape(8, 10, 10)
    return SyzygySpace(p=p, space=syz, gamma=gamma)


def s_gamma_at(syz: SyzygySpace, pt) -> NDArray[np.int64]:
    """10x8 matrix of the syzygy linear forms evaluated at pt."""
    pt = np.asarray(pt, dtype=np.int64) % syz.p
    vals = matmul_mod(syz.gamma.reshape(80, 10), pt.reshape(10, 1), syz.p)
    return vals.reshape(8, 10).T


def s_prime_at(syz: SyzygySpace, u) -> NDArray[np.int64]:
    """8x10 matrix of the syzygy tensor contracted on its quadric slot.

    u carries coordinates in the dual of the quadric system (the target
    of the double cover); row k lists the variable coefficients of the
    k-th composite linear form.
    """
    u = np.asarray(u, dtype=np.int64) % syz.p
    return np.tensordot(u, syz.gamma, axes=(0, 1)) % syz.p


def vertex_fiber(syz: SyzygySpace, qs: QuadricSystem, x: XPoint) -> Subspace:
    """The 4-dim space of quadrics singular at x, as the image of s_gamma."""
    p = syz.p
    S = s_gamma_at(syz, x.coords)
    image = Subspace.from_rows(S.T, p)
    J = qs.jacobian_at(x.coords)
    singular = kernel(J.T, p)  # combos whose gradient dies at x
    if image != singular:
        raise RuntimeError(
            "image of s_gamma differs from the singular-at-x quadrics"
        )
    if image.dim != 4:
        raise SeedNotGeneric(f"vertex fiber has dim {image.dim} != 4")
    return image


def _composite_quadrics(syz: SyzygySpace, psi: NDArray, table: NDArray) -> NDArray:
    """(10, 10, 55) quadric vectors of s_gamma . psi . s_gamma^T."""
    G = syz.gamma  # (8, 10, 10)
    # sum_{k,l} psi[k,l] * gamma[k,a,j] * gamma[l,b,m]
    weighted = np.einsum("kl,kaj,lbm->abjm", psi, G, G)
    out = np.zeros((10, 10, 55), dtype=np.int64)
    np.add.at(out, (Ellipsis, table.reshape(-1)), weighted.reshape(10, 10, -1))
    return out % syz.p


def phi_compute(syz: SyzygySpace, qs: QuadricSystem) -> SymplecticPhi:
    """The unique psi with s_gamma . psi . s_gamma^T inside the quadric system.

    Realized as the kernel of a 64 -> 4500 linear map: each candidate psi
    yields a 10x10 matrix of quadrics, reduced modulo the system; the
    class must vanish.  The kernel is required to be one-dimensional,
    spanned by a skew invertible matrix.
    """
    p = syz.p
    table = _mul_table_deg1(10)
    space = qs.space
    quot = [c for c in range(55) if c not in set(space.pivots)]
    cols = []
    for k in range(8):
        for l in range(8):
            psi = np.zeros((8, 8), dtype=np.int64)
            psi[k, l] = 1
            quads = _composite_quadrics(syz, psi, table)
            cls = space.reduce(quads.reshape(100, 55))[:, quot]
            cols.append(cls.reshape(-1))
    M = np.array(cols, dtype=np.int64).T  # 4500 x 64
    ker = kernel(M, p)
    if ker.dim != 1:
        raise SeedNotGeneric(f"phi kernel has dim {ker.dim} != 1")
    phi = ker.basis[0].reshape(8, 8)
    lead = phi.reshape(-1)[np.flatnonzero(phi.reshape(-1))[0]]
    phi = phi * pow(int(lead), -1, p) % p
    if np.any((phi + phi.T) % p):
        raise SeedNotGeneric("phi representative is not skew")
    if rank(phi, p) != 8:
        raise SeedNotGeneric("phi representative is singular")
    return SymplecticPhi(p=p, matrix=phi)


def t2_compute(syz: SyzygySpace, qs: QuadricSystem, phi: SymplecticPhi) -> Trivector:
    """The trivector on the quadric system read off from s_gamma.phi.s_gamma^T.

    Every entry of the composite is a quadric inside the system; its
    coordinate vector in the fixed quadric basis gives the (a, b, *)
    slice of an alternating tensor.  Scaled to lead with 1.
    """
    p = syz.p
    table = _mul_table_deg1(10)
    quads = _composite_quadrics(syz, phi.matrix, table).reshape(100, 55)
    if not qs.space.contains(quads):
        raise RuntimeError("composite entries are not in the quadric system")
    coeffs = qs.space.coords(quads).reshape(10, 10, 10)
    t2 = Trivector.from_tensor(coeffs, p)
    vec = np.array(t2.data, dtype=np.int64)
    lead = vec[np.flatnonzero(vec)[0]]
    vec = vec * pow(int(lead), -1, p) % p
    return Trivector.from_vec(tuple(int(v) for v in vec), p)


def vertex_fiber_check(syz: SyzygySpace, qs: QuadricSystem, x: XPoint) -> list[dict]:
    """Fiber dim 4, every member singular at x, generic member of Gram rank 9.

    Rank-9 members must have Gram kernel exactly the point itself (their
    unique singular point sits on the surface).
    """
    p = syz.p
    fiber = vertex_fiber(syz, qs, x)  # enforces dim 4 and the gradient description
    grams = np.array([q.gram() for q in qs.quadrics()], dtype=np.int64)
    weights = np.array(
        [[pow(t, e, p) for e in range(4)] for t in (1, 2, 3, 4, 5)], dtype=np.int64
    )
    members = matmul_mod(weights, fiber.basis, p)
    ranks = []
    vertices_ok = True
    for c in members:
        G = np.tensordot(c, grams, axes=(0, 0)) % p
        r = rank(G, p)
        ranks.append(r)
        if r == 9:
            vert = kernel(G, p)
            vertices_ok = vertices_ok and vert.contains(x.coords)
    return [
        check("vertex.fiber_dim", fiber.dim, 4, "syzygy"),
        check("vertex.max_gram_rank", max(ranks), 9, "syzygy"),
        check("vertex.all_ranks_at_most_9", max(ranks) <= 9, True, "syzygy"),
        check("vertex.rank9_vertex_is_x", vertices_ok, True, "syzygy"),
    ]


def ruling_constancy_check(
    syz: SyzygySpace, qs: QuadricSystem, x: XPoint, r: Ruling
) -> list[dict]:
    """The syzygy kernel in V8 is one datum per ruling, not per point.

    The embedded fibers inside the quadric system twist along the ruling
    (distinct points give transverse 4-planes spanning dim 8); what stays
    constant is ker s_gamma, the 4-dim subspace of the syzygy space.
    """
    p = syz.p
    sample = []
    for mu in range(p):
        cand = (r.points[0] * mu + r.points[1]) % p
        if not cand.any():
            continue
        cand = normalize_point(cand, p)
        if not np.array_equal(cand, x.coords):
            sample.append(XPoint(coords=cand, source_x=x.source_x))
        if len(sample) == 3:
            break
    pts = [x] + sample
    kers = [kernel(s_gamma_at(syz, y.coords), p) for y in pts]
    fibers = [vertex_fiber(syz, qs, y) for y in pts]
    return [
        check("vertex.kernel_dim", kers[0].dim, 4, "syzygy"),
        check(
            "vertex.kernel_constant_on_ruling",
            all(k == kers[0] for k in kers),
            True,
            "syzygy",
        ),
        check("vertex.fiber_twist_span", span_union(fibers).dim, 8, "syzygy"),
    ]


def isotropy_check(syz: SyzygySpace, phi: SymplecticPhi, points) -> list[dict]:
    """s_gamma rank 4 at each surface point, with a phi-isotropic row space."""
    p = syz.p
    ranks, isotropic = [], []
    for pt in points:
        S = s_gamma_at(syz, pt.coords)
        ranks.append(rank(S, p))
        pairing = matmul_mod(matmul_mod(S, phi.matrix, p), S.T, p)
        isotropic.append(not pairing.any())
    return [
        check("phi.s_gamma_rank_on_x", sorted(set(ranks)), [4], "syzygy"),
        check("phi.isotropy", all(isotropic), True, "syzygy"),
    ]


def quadratic_syzygy_check(
    syz: SyzygySpace, qs: QuadricSystem, t2: Trivector
) -> list[dict]:
    """Quadratic syzygies beyond the linear ones match the flattening of t2.

    Inside (quadric slot) x S^2 the Koszul wedges and the linear-syzygy
    multiples together span the full space of quadratic relations.  The
    wedges that fall into the multiples' span form a 10-dim space equal
    to the image of t2's flattening, leaving 35 new syzygies.
    """
    p = syz.p
    qvecs = qs.space.basis  # 10 x 55
    table = _mul_table_deg2(10)

    # degree-3 part of the ideal, for the record
    M = np.zeros((100, num_monomials(10, 3)), dtype=np.int64)
    for i in range(10):
        for j in range(10):
            np.add.at(M[i * 10 + j], table[:, j], qvecs[i])
    M %= p
    i3 = rank(M, p)

    # Koszul wedges: e_i (x) Q_j - e_j (x) Q_i
    pairs = [(i, j) for i in range(10) for j in range(i + 1, 10)]
    K = np.zeros((45, 550), dtype=np.int64)
    for r, (i, j) in enumerate(pairs):
        K[r, i * 55 : (i + 1) * 55] = qvecs[j]
        K[r, j * 55 : (j + 1) * 55] = (-qvecs[i]) % p

    # linear syzygies times a variable: e_i (x) (L_{ik} w_m)
    var_table = _mul_table_deg1(10)
    lam = np.zeros((80, 550), dtype=np.int64)
    r = 0
    for k in range(8):
        for m in range(10):
            for i in range(10):
                seg = np.zeros(55, dtype=np.int64)
                np.add.at(seg, var_table[:, m], syz.gamma[k, i])
                lam[r, i * 55 : (i + 1) * 55] = seg % p
            r += 1
    lam_space = Subspace.from_rows(lam, p)

    stacked = rank(np.vstack([K, lam]), p)
    red = lam_space.reduce(K)
    ker = kernel(red.T, p)  # wedge combos that fall into the multiples' span

    flat = np.array(t2.flattening(), dtype=np.int64)
    flat_image = Subspace.from_rows(flat, p)

    out = [
        check("syzygy.v8_dim", syz.space.dim, 8, "syzygy"),
        check("syzygy.cubic_ideal_dim", i3, 92, "syzygy"),
        check("syzygy.linear_multiples_rank", lam_space.dim, 80, "syzygy"),
        check("syzygy.koszul_kernel_dim", ker.dim, 10, "syzygy"),
        check("syzygy.kernel_is_flattening_image", ker == flat_image, True, "syzygy"),
        check("syzygy.koszul_image_dim", stacked - lam_space.dim, 35, "syzygy"),
        check("syzygy.t2_flattening_rank", rank(flat, p), 10, "syzygy"),
    ]
    return out


def dv_sixplane_check(
    syz: SyzygySpace, qs: QuadricSystem, t2: Trivector, x: XPoint
) -> list[dict]:
    """t2 vanishes on the third wedge of the 6-plane orthogonal to the fiber."""
    p = syz.p
    fiber = vertex_fiber(syz, qs, x)
    u6 = fiber.annihilator()
    dense = np.array(t2.dense(), dtype=np.int64)
    U = u6.basis
    vals = np.einsum("ra,abc->rbc", U, dense) % p
    vals = np.einsum("sb,rbc->rsc", U, vals) % p
    vals = np.einsum("tc,rsc->rst", U, vals) % p
    return [
        check("dv.u6_dim", u6.dim, 6, "orthogonality"),
        check("dv.t2_null_on_wedge", not vals.any(), True, "orthogonality"),
    ]


def global_generation_check(qs: QuadricSystem, r1: Ruling, r2: Ruling) -> list[dict]:
    """Restriction to the span of two skew rulings fills the quadrics through them."""
    p = qs.p
    span4 = span_union([r1.space, r2.space])
    if span4.dim != 4:
        raise ValueError("rulings are not skew")
    emb = span4.basis.T  # 10 x 4
    restricted = np.array(
        [q.restrict(emb).to_vec() for q in qs.quadrics()], dtype=np.int64
    )
    image = Subspace.from_rows(restricted, p)

    # three points per line pin down a quadric's restriction to it
    line_pts = []
    for r in (r1, r2):
        b0, b1 = r.points[0], r.points[1]
        for mu, nu in ((1, 0), (0, 1), (1, 1)):
            line_pts.append((mu * b0 + nu * b1) % p)
    coords = span4.coords(np.array(line_pts, dtype=np.int64))
    through = vanishing_forms(coords, 2, 4, p)

    return [
        check("gg.image_dim", image.dim, 4, "syzygy"),
        check("gg.through_two_lines_dim", through.dim, 4, "syzygy"),
        check("gg.image_through_lines", through.contains_space(image), True, "syzygy"),
    ]
