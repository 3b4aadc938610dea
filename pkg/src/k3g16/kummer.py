"""Six-secant 3-spaces, Weddle quartics, and nodal branch quartics.

At a rank-6 point q of the syzygy pencil, the kernel of the evaluated
8x10 matrix spans a 3-space in the source whose projectivization meets
the base surface in six points.  The ten quadrics restrict there to a
4-dim system mapping that P3 two-to-one onto a target P3; the Jacobian
of a restricted basis is a Weddle quartic upstairs, and the branch
locus downstairs is a quartic with at most sixteen nodes, one of them
at q itself.  The rank-<=6 trace on the target P3 away from q is a
cubic surface.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from numpy.typing import NDArray

from .discrim import slice_rational_zeros
from .ffla import (
    Subspace,
    det,
    kernel,
    matmul_mod,
    normalize_point,
    proj_points,
    rank,
    rng_stream,
    solve,
    span_union,
)
from .mpoly import MPoly, interpolate, monomial_matrix, vanishing_forms, zero_dim_degree
from .mukai import NonGenericPoint
from .report import check, note
from .syzygy import SyzygySpace, s_prime_at
from .trivector import slice_quartics
from .xquad import QuadricSystem

__all__ = [
    "NotOnPeskine",
    "SixSecantFrame",
    "frame",
    "frame_report",
    "weddle",
    "weddle_report",
    "kummer_quartic",
    "kummer_checks",
    "cubic_surface",
    "tangent_decomposition",
]


class NotOnPeskine(RuntimeError):
    """The anchor point does not drop the syzygy matrix to rank 6."""


@dataclass(frozen=True, eq=False)
class SixSecantFrame:
    q: NDArray[np.int64]  # anchor point, 10 target coords, normalized
    p_q: Subspace  # dim 4 in the source
    emb: NDArray[np.int64]  # 10 x 4 source embedding (p_q basis columns)
    restricted: NDArray[np.int64]  # 10 x 10: each quadric in slice monomials
    grams: NDArray[np.int64]  # 4 x 4 x 4 Grams of the chosen basis quadrics
    iso: NDArray[np.int64]  # 10 x 4: full values = iso @ basis values
    e_space: Subspace  # dim 4 in the target: span of the image
    kernel6: Subspace  # dim 6: combinations restricting to zero
    z6_rational: NDArray[np.int64]  # r x 4 slice coords of rational base points
    z6_degree: int  # closure count of the base scheme

    @property
    def p(self) -> int:
        return self.p_q.p


def _quadric_values(grams: NDArray[np.int64], zs: NDArray[np.int64], p: int) -> NDArray[np.int64]:
    """Evaluate quadratic forms (k stacked Grams) at a batch of points."""
    out = np.empty((zs.shape[0], grams.shape[0]), dtype=np.int64)
    for k in range(grams.shape[0]):
        tmp = matmul_mod(zs, grams[k], p)
        out[:, k] = (tmp * zs).sum(axis=1) % p
    return out


def _eval_form(f: MPoly, pts: NDArray[np.int64]) -> NDArray[np.int64]:
    pts = np.atleast_2d(np.asarray(pts, dtype=np.int64)) % f.p
    return matmul_mod(monomial_matrix(pts, f.degree, f.p), f.to_vec().reshape(-1, 1), f.p).ravel()


def _partial(f: MPoly, k: int) -> MPoly:
    terms = {}
    for exp, c in f.terms.items():
        if exp[k] == 0:
            continue
        new = list(exp)
        new[k] -= 1
        terms[tuple(new)] = c * exp[k] % f.p
    return MPoly(f.nvars, max(f.degree - 1, 0), terms, f.p)


def _sample_slice_points(p: int, purpose: str, count: int, rng_seed: int = 0) -> NDArray[np.int64]:
    rng = rng_stream(rng_seed, purpose)
    pts: list[NDArray[np.int64]] = []
    seen: set[tuple[int, ...]] = set()
    while len(pts) < count:
        z = rng.integers(0, p, size=4)
        if not z.any():
            continue
        z = normalize_point(z % p, p)
        if tuple(z) in seen:
            continue
        seen.add(tuple(z))
        pts.append(z)
    return np.array(pts, dtype=np.int64)


def frame(syz: SyzygySpace, qs: QuadricSystem, q) -> SixSecantFrame:
    """The six-secant frame anchored at a rank-6 point of the syzygy pencil."""
    p = qs.p
    q = normalize_point(np.asarray(q, dtype=np.int64) % p, p)
    S = s_prime_at(syz, q)
    r = rank(S, p)
    if r != 6:
        raise NotOnPeskine(f"syzygy matrix has rank {r}, wanted 6")
    p_q = kernel(S, p)
    emb = p_q.basis.T % p  # 10 x 4
    restricted = np.array(
        [qd.restrict(emb).to_vec() for qd in qs.quadrics()], dtype=np.int64
    )
    rr = rank(restricted, p)
    if rr != 4:
        raise NonGenericPoint(f"restriction rank {rr}, wanted 4")
    kernel6 = kernel(restricted.T, p)

    system = Subspace.from_rows(restricted, p)
    basis = system.basis  # reduced basis of the restricted system
    iso = system.coords(restricted)  # 10 x 4, restricted = iso @ basis
    e_space = Subspace.from_rows(iso.T, p)
    if e_space != kernel6.annihilator():
        raise AssertionError("image span disagrees with the restriction kernel")

    polys = [MPoly.from_vec(b, 4, 2, p) for b in basis]
    grams = np.array([poly.gram() for poly in polys], dtype=np.int64)

    cands = proj_points(3, p)
    hits = []
    for lo in range(0, len(cands), 120_000):
        chunk = cands[lo : lo + 120_000]
        vals = _quadric_values(grams, chunk, p)
        hits.append(chunk[~vals.any(axis=1)])
    z6 = np.vstack(hits)
    res = zero_dim_degree(polys, cap=8)
    if not res.conclusive or res.value != 6:
        raise NonGenericPoint(f"base scheme degree {res.value}, wanted 6")

    fr = SixSecantFrame(
        q=q,
        p_q=p_q,
        emb=emb,
        restricted=restricted,
        grams=grams,
        iso=iso,
        e_space=e_space,
        kernel6=kernel6,
        z6_rational=z6,
        z6_degree=int(res.value),
    )
    _image_containment(qs, fr)
    return fr


def _image_containment(qs: QuadricSystem, fr: SixSecantFrame) -> None:
    """The full quadric evaluation factors exactly through the chosen basis."""
    p = qs.p
    rng = rng_stream(0, "kummer/containment")
    done = 0
    while done < 3:
        z = rng.integers(0, p, size=4) % p
        if not z.any():
            continue
        y = matmul_mod(z.reshape(1, 4), fr.emb.T, p).ravel()
        full = qs.evaluate_at(y)
        ft = _quadric_values(fr.grams, z.reshape(1, 4), p).reshape(4, 1)
        if not np.array_equal(full, matmul_mod(fr.iso, ft, p).ravel()):
            raise AssertionError("quadric values do not factor through the slice basis")
        done += 1


def frame_report(fr: SixSecantFrame) -> list[dict]:
    return [
        check("kummer.p_q_dim", fr.p_q.dim, 4, "kummer"),
        check("kummer.base_scheme_degree", fr.z6_degree, 6, "kummer"),
        check("kummer.restriction_rank", fr.e_space.dim, 4, "kummer"),
        check("kummer.restriction_kernel_dim", fr.kernel6.dim, 6, "kummer"),
        note("kummer.rational_base_points", int(fr.z6_rational.shape[0]), "kummer"),
    ]


def weddle(fr: SixSecantFrame) -> MPoly:
    """Jacobian determinant of the restricted basis: a quartic upstairs."""
    p = fr.p
    pts = _sample_slice_points(p, "kummer/weddle-fit", 60)
    vals = np.empty(len(pts), dtype=np.int64)
    for n, z in enumerate(pts):
        J = np.array(
            [2 * matmul_mod(fr.grams[a], z.reshape(4, 1), p).ravel() for a in range(4)],
            dtype=np.int64,
        )
        vals[n] = det(J % p, p)
    W = interpolate(pts, vals, 4, p)
    if W.is_zero:
        raise NonGenericPoint("degenerate frame: the Jacobian quartic vanishes")
    return W


def weddle_report(fr: SixSecantFrame, W: MPoly) -> list[dict]:
    """The Jacobian quartic vanishes doubly at every rational base point."""
    parts = [_partial(W, k) for k in range(4)]
    double = True
    for z in fr.z6_rational:
        if _eval_form(W, z).any() or any(_eval_form(g, z).any() for g in parts):
            double = False
    return [
        check("kummer.weddle_nonzero", not W.is_zero, True, "kummer"),
        check("kummer.weddle_double_vanishing", double, True, "kummer"),
        note("kummer.weddle_checked_points", int(fr.z6_rational.shape[0]), "kummer"),
    ]


def kummer_quartic(fr: SixSecantFrame, W: MPoly) -> tuple[MPoly, int]:
    """The unique quartic downstairs whose pullback is a multiple of W^2.

    Fit linearly in the 35 quartic coefficients plus the multiplier from
    60 sample points; the solution space must be a line.
    """
    p = fr.p
    pts = _sample_slice_points(p, "kummer/branch-fit", 80)
    ft = _quadric_values(fr.grams, pts, p)
    keep = ft.any(axis=1)
    pts, ft = pts[keep][:60], ft[keep][:60]
    wvals = _eval_form(W, pts)
    rows = monomial_matrix(ft, 4, p)  # n x 35
    rhs = (-(wvals * wvals) % p).reshape(-1, 1)
    sol = kernel(np.hstack([rows, rhs]), p)
    if sol.dim != 1:
        raise NonGenericPoint(f"branch quartic fit has solution dim {sol.dim}")
    vec = sol.basis[0]
    kcoef, lam = vec[:35], int(vec[35])
    if lam == 0 or not kcoef.any():
        raise NonGenericPoint("degenerate branch quartic fit")
    return MPoly.from_vec(kcoef, 4, 4, p), lam


def kummer_checks(
    fr: SixSecantFrame,
    W: MPoly,
    K: MPoly,
    lam: int,
    census: bool = True,
) -> list[dict]:
    """Certificates for the branch quartic: pullback identity, nodes, census."""
    p = fr.p
    out = []

    fresh = _sample_slice_points(p, "kummer/branch-verify", 40)
    ft = _quadric_values(fr.grams, fresh, p)
    lhs = _eval_form(K, ft)
    w2 = _eval_form(W, fresh)
    out.append(
        check("kummer.pullback_identity", bool(np.array_equal(lhs, lam * w2 * w2 % p)), True, "kummer")
    )

    parts = [_partial(K, k) for k in range(4)]
    cq = solve(fr.iso, fr.q, p)
    if cq is None:
        out.append(check("kummer.anchor_in_target", False, True, "kummer"))
        return out
    cq = normalize_point(cq % p, p)
    node_q = not _eval_form(K, cq).any() and not any(_eval_form(g, cq).any() for g in parts)
    out.append(check("kummer.node_at_anchor", node_q, True, "kummer"))

    nodes_ok = True
    n_bisecant = 0
    for a, b in combinations(range(fr.z6_rational.shape[0]), 2):
        y = (fr.z6_rational[a] + fr.z6_rational[b]) % p
        img = _quadric_values(fr.grams, y.reshape(1, 4), p).ravel()
        if not img.any():
            continue
        n_bisecant += 1
        img = normalize_point(img, p)
        if _eval_form(K, img).any() or any(_eval_form(g, img).any() for g in parts):
            nodes_ok = False
    out.append(check("kummer.bisecant_images_singular", nodes_ok, True, "kummer"))
    out.append(note("kummer.bisecant_images_checked", n_bisecant, "kummer"))

    if census:
        sing = slice_rational_zeros(parts, p)
        res = zero_dim_degree(parts, cap=16)
        out.append(check("kummer.singular_scheme_conclusive", res.conclusive, True, "kummer"))
        out.append(
            check(
                "kummer.singular_count_bounded",
                bool(res.value is not None and res.value <= 16),
                True,
                "kummer",
            )
        )
        out.append(
            note(
                "kummer.node_field_split",
                {"rational": int(sing.shape[0]), "closure_degree": int(res.value or -1)},
                "kummer",
            )
        )
    return out


def cubic_surface(fr: SixSecantFrame, t2) -> tuple[MPoly | None, list[dict]]:
    """The rank-<=6 trace on the target P3 away from the anchor: a cubic."""
    p = fr.p
    quartics = slice_quartics(t2, fr.iso, rng_seed=3)
    zeros = slice_rational_zeros(quartics, p)
    cq = solve(fr.iso, fr.q, p)
    if cq is None:
        raise NonGenericPoint("anchor missing from the target 3-space")
    cq = normalize_point(cq % p, p)
    pts = zeros[~(zeros == cq).all(axis=1)]
    if pts.shape[0] < 20:
        raise NonGenericPoint(f"only {pts.shape[0]} rational surface points")
    space = vanishing_forms(pts, 3, 4, p)
    report = [check("kummer.cubic_unique", space.dim, 1, "kummer")]
    if space.dim != 1:
        return None, report
    cubic = MPoly.from_vec(space.basis[0], 4, 3, p)
    report.append(
        check("kummer.cubic_misses_anchor", bool(_eval_form(cubic, cq).any()), True, "kummer")
    )
    parts = [_partial(cubic, k) for k in range(4)]
    sample = pts[:: max(1, pts.shape[0] // 20)][:20]
    grads = np.stack([_eval_form(g, sample) for g in parts], axis=1)
    report.append(
        check("kummer.cubic_smooth_samples", bool(grads.any(axis=1).all()), True, "kummer")
    )
    report.append(note("kummer.cubic_point_count", int(pts.shape[0]), "kummer"))
    return cubic, report


def _branch_source_point(qs: QuadricSystem, rng) -> NDArray[np.int64] | None:
    """A rational point where the Jacobian determinant of the cover vanishes.

    Restricts the degree-10 determinant to a random line and keeps a
    rational root, if any.
    """
    from .cover import ramification_value
    from .mpoly import binary_form_roots

    p = qs.p
    a = rng.integers(0, p, size=10) % p
    b = rng.integers(0, p, size=10) % p
    if Subspace.from_rows(np.vstack([a, b]), p).dim != 2:
        return None
    params = [(1, n) for n in range(11)] + [(0, 1)]
    vals = np.array(
        [ramification_value(qs, (s * a + t * b) % p) for s, t in params], dtype=np.int64
    )
    if not vals.any():
        return None
    form = interpolate(np.array(params, dtype=np.int64), vals, 10, p)
    roots = binary_form_roots(form.to_vec(), p)
    for (s, t), _mult in roots.fp:
        x = (s * a + t * b) % p
        if qs.evaluate_at(x).any():  # stay off the base surface
            return x
    return None


def tangent_decomposition(
    syz: SyzygySpace,
    qs: QuadricSystem,
    t2,
    rng_seed: int = 0,
    budget: int = 30,
) -> list[dict]:
    """Tangent splitting along four branch quartics at a branch point.

    Needs a branch point whose congruence line meets the rank-6 locus in
    four rational points; the search is budgeted and a miss is recorded
    as skipped rather than failed.
    """
    from .cover import f_x, invariant_line
    from .trivector import line_secancy

    p = qs.p
    rng = rng_stream(rng_seed, "kummer/tangent-search")
    for _ in range(budget):
        src = _branch_source_point(qs, rng)
        if src is None:
            continue
        try:
            line = invariant_line(syz, qs, src)
        except NonGenericPoint:
            continue
        r = f_x(qs, src)
        third = None
        for mu in range(p):
            cand = (mu * line.basis[0] + line.basis[1]) % p
            if cand.any() and not np.array_equal(
                normalize_point(cand, p), normalize_point(src % p, p)
            ):
                third = cand
                break
        if third is None or not qs.evaluate_at(third).any():
            continue
        v2 = Subspace.from_rows(np.vstack([r, f_x(qs, third)]), p)
        if v2.dim != 2:
            continue
        try:
            _g, roots = line_secancy(t2, v2)
        except Exception:
            continue
        if roots is None or roots.fp2 or roots.residual or len(roots.fp) != 4:
            continue
        anchors = [
            normalize_point((s * v2.basis[0] + t * v2.basis[1]) % p, p) for (s, t), _m in roots.fp
        ]
        try:
            frames = [frame(syz, qs, anc) for anc in anchors]
        except (NotOnPeskine, NonGenericPoint):
            continue

        out = [
            check(
                "kummer.line_in_all_tangent_spaces",
                all(f.e_space.contains_space(v2) for f in frames),
                True,
                "kummer",
            ),
            check(
                "kummer.tangent_span_dim",
                span_union([f.e_space for f in frames]).dim,
                10,
                "kummer",
            ),
        ]
        on_all = True
        for f in frames:
            W = weddle(f)
            K, _lam = kummer_quartic(f, W)
            cr = solve(f.iso, r, p)
            if cr is None or _eval_form(K, cr % p).any():
                on_all = False
        out.append(check("kummer.branch_point_on_quartics", on_all, True, "kummer"))
        return out
    return [
        note(
            "kummer.tangent_decomposition",
            "skipped: no fully rational four-secant congruence line within budget",
            "kummer",
            status="skipped",
        )
    ]
