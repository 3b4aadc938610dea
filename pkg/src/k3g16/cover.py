"""The degree-2 rational map to the dual system and its involution.

Away from the base surface, a point p of the source maps to the value
vector of the 10 quadrics.  Each fiber {p, i(p)} spans an invariant
line: the common zero locus of the 8 linear forms obtained by pushing
the syzygy matrix into the one-dimensional quotient by the quadrics
through p.  The second point of the fiber is recovered as the common
second root, on that line, of the quadrics through p.
"""

import numpy as np
from numpy.typing import NDArray

from .ffla import Subspace, det, kernel, normalize_point, rank
from .multilinear import Trivector
from .mukai import NonGenericPoint
from .report import check, note
from .syzygy import SyzygySpace, s_prime_at
from .trivector import line_secancy
from .xquad import QuadricSystem

__all__ = [
    "OnBaseLocus",
    "LineInX",
    "f_x",
    "invariant_line",
    "involute",
    "ramification_value",
    "invariant_line_congruence_check",
]


class OnBaseLocus(RuntimeError):
    """All quadrics vanish: the point sits on the base surface."""


class LineInX(RuntimeError):
    """Every quadric dies on the whole line; no second root to extract."""


def f_x(qs: QuadricSystem, pt) -> NDArray[np.int64]:
    """Image of a source point: the normalized vector of quadric values."""
    pt = np.asarray(pt, dtype=np.int64) % qs.p
    vals = qs.evaluate_at(pt)
    if not vals.any():
        raise OnBaseLocus("point lies on the base surface")
    return normalize_point(vals, qs.p)


def invariant_line(syz: SyzygySpace, qs: QuadricSystem, pt) -> Subspace:
    """The line joining pt to its involute: kernel of s' at the image point."""
    pt = np.asarray(pt, dtype=np.int64) % qs.p
    F = s_prime_at(syz, f_x(qs, pt))
    line = kernel(F, syz.p)
    if line.dim != 2:
        raise NonGenericPoint(f"zero locus of the composed forms has dim {line.dim}")
    if not line.contains(pt):
        raise AssertionError("invariant line lost its defining point")
    return line


def _second_point_on(line: Subspace, pt, p: int) -> NDArray[np.int64]:
    """A basis point of the line independent from pt."""
    for row in line.basis:
        if rank(np.vstack([pt, row]), p) == 2:
            return row
    raise AssertionError("degenerate line basis")


def involute(syz: SyzygySpace, qs: QuadricSystem, pt) -> NDArray[np.int64]:
    """The other point of the fiber through pt (equal to pt at tangency).

    Each quadric vanishing at pt restricts to the invariant line as a
    binary quadratic with a root at pt; the complementary roots of all
    nonzero restrictions must agree.
    """
    p = qs.p
    pt = np.asarray(pt, dtype=np.int64) % p
    line = invariant_line(syz, qs, pt)
    r = _second_point_on(line, pt, p)
    vals = qs.evaluate_at(pt)
    through = kernel(vals.reshape(1, -1), p)  # 9-dim: quadrics vanishing at pt
    second = None
    informative = 0
    for c in through.basis:
        G = np.zeros((10, 10), dtype=np.int64)
        for i, ci in enumerate(c):
            if ci:
                G = (G + int(ci) * np.asarray(qs.gram(i), dtype=np.int64)) % p
        q_r = int(r @ G @ r % p)
        b_pr = int(pt @ G @ r % p)
        z = (q_r * pt - 2 * b_pr * r) % p
        if not z.any():
            continue  # this quadric contains the whole line
        informative += 1
        z = normalize_point(z, p)
        if second is None:
            second = z
        elif not np.array_equal(second, z):
            raise NonGenericPoint("second roots of the restricted quadrics disagree")
    if second is None:
        raise LineInX("all quadrics through the point contain its line")
    if informative < 2:
        raise NonGenericPoint("only one quadric restricts nontrivially to the line")
    return second


def ramification_value(qs: QuadricSystem, pt) -> int:
    """det of the 10x10 gradient matrix at pt (the degree-10 branch form)."""
    pt = np.asarray(pt, dtype=np.int64) % qs.p
    return det(qs.jacobian_at(pt), qs.p)


def invariant_line_congruence_check(
    syz: SyzygySpace,
    qs: QuadricSystem,
    t2: Trivector,
    pt,
) -> list[dict]:
    """The image of the invariant line is a congruence line of t2.

    Checks: the line holds pt and its involute; its image spans a 2-plane
    on which t2 vanishes; the secancy quartic along the image line is
    nonzero with 4 roots over the closure; at each rational root the
    8x10 matrix s' drops to rank 6 with the line inside its kernel.
    """
    p = qs.p
    pt = np.asarray(pt, dtype=np.int64) % p
    line = invariant_line(syz, qs, pt)
    ip = involute(syz, qs, pt)
    a = f_x(qs, pt)

    # a third point of the line maps to an independent image point
    third = None
    for mu in range(1, p):
        cand = (mu * line.basis[0] + line.basis[1]) % p
        if not cand.any():
            continue
        cand = normalize_point(cand, p)
        if np.array_equal(cand, normalize_point(pt, p)) or np.array_equal(cand, ip):
            continue
        third = cand
        break
    b = f_x(qs, third)
    v2 = Subspace.from_rows(np.vstack([a, b]), p)

    dense = np.array(t2.dense(), dtype=np.int64)
    vals = np.einsum("ra,abc->rbc", v2.basis, dense) % p
    vals = np.einsum("sb,rbc->rsc", v2.basis, vals) % p

    out = [
        check("cover.line_contains_involute", bool(line.contains(ip)), True, "cover"),
        check("cover.image_plane_dim", v2.dim, 2, "cover"),
        check("cover.image_in_congruence", not vals.any(), True, "cover"),
    ]

    quartic, roots = line_secancy(t2, v2)
    deg = quartic.size - 1
    out.append(check("cover.secancy_degree", deg, 4, "cover"))
    if roots is not None:
        out.append(
            check("cover.secancy_roots", roots.count_with_multiplicity, 4, "cover")
        )
        bisecant_ok = True
        rational = 0
        for (mu, nu), _mult in roots.fp:
            q = (mu * v2.basis[0] + nu * v2.basis[1]) % p
            A = s_prime_at(syz, q)
            if rank(A, p) != 6:
                bisecant_ok = False
                continue
            ker4 = kernel(A, p)
            rational += 1
            if not ker4.contains_space(line):
                bisecant_ok = False
        out.append(check("cover.bisecant_kernels", bisecant_ok, True, "cover"))
        out.append(note("cover.rational_secancy_points", rational, "cover"))
    return out
