"""Sparse graded multivariate polynomials over F_p.

Monomials of a fixed total degree are enumerated in graded-lexicographic
order (exponent tuples lex-descending); every coefficient vector and every
serialization uses that shared order.  Dimension questions about graded
ideals are answered by exact rank computations on Macaulay matrices, with
randomized column sketching once the matrix is wider than tall.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np
from numpy.typing import NDArray
from scipy import sparse

from .ffla import Subspace, kernel, rank, rng_stream, solve


@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> tuple[tuple[int, ...], ...]:
    """All exponent tuples of the given total degree, lex-descending."""
    if nvars == 1:
        return ((degree,),)
    out = []
    for e in range(degree, -1, -1):
        out.extend((e,) + rest for rest in monomials(nvars - 1, degree - e))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(nvars: int, degree: int) -> dict[tuple[int, ...], int]:
    return {m: i for i, m in enumerate(monomials(nvars, degree))}


def num_monomials(nvars: int, degree: int) -> int:
    return comb(degree + nvars - 1, nvars - 1)


def monomial_matrix(pts, degree: int, p: int) -> NDArray[np.int64]:
    """Evaluate every degree-d monomial at every point: (N, M) matrix."""
    pts = np.asarray(pts, dtype=np.int64) % p
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    npts, nvars = pts.shape
    mons = monomials(nvars, degree)
    # per-variable power tables, then one running product per monomial
    pows = []
    for v in range(nvars):
        tab = np.empty((degree + 1, npts), dtype=np.int64)
        tab[0] = 1
        for e in range(1, degree + 1):
            tab[e] = tab[e - 1] * pts[:, v] % p
        pows.append(tab)
    out = np.empty((npts, len(mons)), dtype=np.int64)
    for j, mon in enumerate(mons):
        col = None
        for v, e in enumerate(mon):
            if e == 0:
                continue
            col = pows[v][e] if col is None else col * pows[v][e] % p
        out[:, j] = 1 if col is None else col
    return out


@dataclass(frozen=True)
class MonomialOrder:
    """Fixed grlex order with display names for the ambient coordinates."""

    nvars: int
    names: tuple[str, ...]

    @staticmethod
    def standard(nvars: int, letter: str = "w") -> "MonomialOrder":
        return MonomialOrder(nvars, tuple(f"{letter}{i}" for i in range(nvars)))


class MPoly:
    """Homogeneous polynomial over F_p: {exponent tuple: nonzero coeff}."""

    __slots__ = ("nvars", "degree", "terms", "p")

    def __init__(self, nvars: int, degree: int, terms: dict, p: int):
        clean = {}
        for e, c in terms.items():
            c = int(c) % p
            if c == 0:
                continue
            e = tuple(int(v) for v in e)
            if len(e) != nvars or sum(e) != degree or any(v < 0 for v in e):
                raise ValueError(f"bad exponent {e} for degree {degree} in {nvars} vars")
            clean[e] = c
        self.nvars = nvars
        self.degree = degree
        self.terms = clean
        self.p = p

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(nvars: int, degree: int, p: int) -> "MPoly":
        return MPoly(nvars, degree, {}, p)

    @staticmethod
    def variable(nvars: int, v: int, p: int) -> "MPoly":
        e = [0] * nvars
        e[v] = 1
        return MPoly(nvars, 1, {tuple(e): 1}, p)

    @staticmethod
    def from_vec(vec, nvars: int, degree: int, p: int) -> "MPoly":
        vec = np.asarray(vec, dtype=np.int64) % p
        mons = monomials(nvars, degree)
        if vec.shape != (len(mons),):
            raise ValueError("coefficient vector length mismatch")
        return MPoly(nvars, degree, {m: int(c) for m, c in zip(mons, vec) if c}, p)

    def to_vec(self) -> NDArray[np.int64]:
        idx = monomial_index(self.nvars, self.degree)
        v = np.zeros(len(idx), dtype=np.int64)
        for e, c in self.terms.items():
            v[idx[e]] = c
        return v

    # -- ring operations ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "MPoly"):
        if self.nvars != other.nvars or self.p != other.p:
            raise ValueError("mixed polynomial rings")

    def __add__(self, other: "MPoly") -> "MPoly":
        self._check(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.degree != other.degree:
            raise ValueError("sum of different degrees is not homogeneous")
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = (t.get(e, 0) + c) % self.p
        return MPoly(self.nvars, self.degree, t, self.p)

    def __sub__(self, other: "MPoly") -> "MPoly":
        return self + other.scale(-1)

    def scale(self, k: int) -> "MPoly":
        k = int(k) % self.p
        return MPoly(self.nvars, self.degree, {e: c * k % self.p for e, c in self.terms.items()}, self.p)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = (t.get(e, 0) + c1 * c2) % self.p
        return MPoly(self.nvars, self.degree + other.degree, t, self.p)

    __rmul__ = __mul__

    def pow(self, k: int) -> "MPoly":
        out = MPoly(self.nvars, 0, {(0,) * self.nvars: 1}, self.p)
        for _ in range(k):
            out = out * self
        return out

    def diff(self, var: int) -> "MPoly":
        t = {}
        for e, c in self.terms.items():
            if e[var] == 0:
                continue
            ne = list(e)
            ne[var] -= 1
            t[tuple(ne)] = c * e[var] % self.p
        return MPoly(self.nvars, max(self.degree - 1, 0), t, self.p)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MPoly)
            and self.nvars == other.nvars
            and self.p == other.p
            and self.degree == other.degree
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, self.degree, self.p, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        return f"MPoly(nvars={self.nvars}, degree={self.degree}, nterms={len(self.terms)}, p={self.p})"

    # -- evaluation ---------------------------------------------------------

    def evaluate_batch(self, pts) -> NDArray[np.int64]:
        """Values at many F_p points, shape (N,)."""
        pts = np.asarray(pts, dtype=np.int64) % self.p
        if pts.ndim == 1:
            pts = pts.reshape(1, -1)
        npts = pts.shape[0]
        if not self.terms:
            return np.zeros(npts, dtype=np.int64)
        maxe = [0] * self.nvars
        for e in self.terms:
            for v in range(self.nvars):
                maxe[v] = max(maxe[v], e[v])
        pows = []
        for v in range(self.nvars):
            tab = np.empty((maxe[v] + 1, npts), dtype=np.int64)
            tab[0] = 1
            for k in range(1, maxe[v] + 1):
                tab[k] = tab[k - 1] * pts[:, v] % self.p
            pows.append(tab)
        acc = np.zeros(npts, dtype=np.int64)
        for e, c in self.terms.items():
            t = np.full(npts, c, dtype=np.int64)
            for v, ev in enumerate(e):
                if ev:
                    t = t * pows[v][ev] % self.p
            acc += t
        return acc % self.p

    def evaluate(self, pt) -> int:
        return int(self.evaluate_batch(np.asarray(pt).reshape(1, -1))[0])

    def evaluate_fp2_batch(self, pts2, fp2) -> NDArray[np.int64]:
        """Values at F_{p^2} points given as (..., nvars, 2) arrays."""
        pts2 = np.asarray(pts2, dtype=np.int64) % self.p
        if pts2.ndim == 2:
            pts2 = pts2.reshape(1, *pts2.shape)
        npts = pts2.shape[0]
        acc = np.zeros((npts, 2), dtype=np.int64)
        if not self.terms:
            return acc
        maxe = [0] * self.nvars
        for e in self.terms:
            for v in range(self.nvars):
                maxe[v] = max(maxe[v], e[v])
        pows = []
        one = np.zeros((npts, 2), dtype=np.int64)
        one[:, 0] = 1
        for v in range(self.nvars):
            tab = [one]
            for k in range(1, maxe[v] + 1):
                tab.append(fp2.mul(tab[-1], pts2[:, v]))
            pows.append(tab)
        for e, c in self.terms.items():
            t = one
            for v, ev in enumerate(e):
                if ev:
                    t = fp2.mul(t, pows[v][ev])
            acc = fp2.add(acc, fp2.scalar_mul(c, t))
        return acc

    def evaluate_fp2(self, pt2, fp2) -> NDArray[np.int64]:
        return self.evaluate_fp2_batch(np.asarray(pt2).reshape(1, -1, 2), fp2)[0]

    # -- restriction along a linear embedding -------------------------------

    def restrict(self, emb) -> "MPoly":
        """Pull back along new -> old coordinates (emb is old x new)."""
        emb = np.asarray(emb, dtype=np.int64) % self.p
        if emb.shape[0] != self.nvars:
            raise ValueError("embedding row count must match nvars")
        m = emb.shape[1]
        if self.degree == 2:
            A = self.gram()
            B = emb.T @ A % self.p @ emb % self.p
            return MPoly.from_gram(B % self.p, self.p)
        powcache: dict[tuple[int, int], MPoly] = {}

        def linform_pow(v: int, k: int) -> MPoly:
            key = (v, k)
            if key not in powcache:
                if k == 0:
                    powcache[key] = MPoly(m, 0, {(0,) * m: 1}, self.p)
                else:
                    lf = MPoly(m, 1, {tuple(int(i == j) for i in range(m)): int(emb[v, j]) for j in range(m) if emb[v, j]}, self.p)
                    powcache[key] = linform_pow(v, k - 1) * lf
            return powcache[key]

        out = MPoly.zero(m, self.degree, self.p)
        for e, c in self.terms.items():
            piece = MPoly(m, 0, {(0,) * m: c}, self.p)
            for v, ev in enumerate(e):
                if ev:
                    piece = piece * linform_pow(v, ev)
            if piece.degree != self.degree:  # pragma: no cover - degree-0 input
                piece = MPoly(m, self.degree, piece.terms, self.p)
            out = out + piece
        return out

    # -- quadric <-> Gram matrix --------------------------------------------

    def gram(self) -> NDArray[np.int64]:
        """Symmetric matrix A with f = x^T A x (off-diagonals are halves)."""
        if self.degree != 2:
            raise ValueError("gram() needs a quadric")
        n, p = self.nvars, self.p
        half = pow(2, p - 2, p)
        A = np.zeros((n, n), dtype=np.int64)
        for e, c in self.terms.items():
            nz = [v for v in range(n) if e[v]]
            if len(nz) == 1:
                A[nz[0], nz[0]] = c
            else:
                i, j = nz
                A[i, j] = A[j, i] = c * half % p
        return A

    @staticmethod
    def from_gram(A, p: int) -> "MPoly":
        A = np.asarray(A, dtype=np.int64) % p
        n = A.shape[0]
        t = {}
        for i in range(n):
            e = [0] * n
            e[i] = 2
            t[tuple(e)] = int(A[i, i])
            for j in range(i + 1, n):
                e = [0] * n
                e[i] = e[j] = 1
                t[tuple(e)] = 2 * int(A[i, j]) % p
        return MPoly(n, 2, t, p)

    # -- serialization -------------------------------------------------------

    def serialize(self) -> list[dict]:
        idx = monomial_index(self.nvars, self.degree)
        items = sorted(self.terms.items(), key=lambda kv: idx[kv[0]])
        return [{"exponents": list(e), "coeff": int(c)} for e, c in items]

    @staticmethod
    def deserialize(data: list[dict], nvars: int, degree: int, p: int) -> "MPoly":
        return MPoly(nvars, degree, {tuple(d["exponents"]): d["coeff"] for d in data}, p)


# ---------------------------------------------------------------------------
# interpolation


def vanishing_forms(points, degree: int, nvars: int, p: int) -> Subspace:
    """Coefficient vectors of all degree-d forms vanishing on the points."""
    M = monomial_matrix(points, degree, p)
    if M.shape[1] != num_monomials(nvars, degree):
        raise ValueError("points do not match nvars")
    return kernel(M, p)


def interpolate(points, values, degree: int, p: int) -> MPoly:
    """The degree-d form with the given values; raises when inconsistent."""
    points = np.asarray(points, dtype=np.int64)
    M = monomial_matrix(points, degree, p)
    x = solve(M, np.asarray(values, dtype=np.int64), p)
    if x is None:
        raise ValueError("inconsistent samples: no degree-%d form fits" % degree)
    return MPoly.from_vec(x, points.shape[1], degree, p)


def interpolate_with_kernel(points, values, degree: int, p: int) -> tuple[MPoly, Subspace]:
    """Like interpolate, but also returns the space of fitting differences."""
    poly = interpolate(points, values, degree, p)
    return poly, vanishing_forms(points, degree, np.asarray(points).shape[1], p)


# ---------------------------------------------------------------------------
# Macaulay-matrix Hilbert function engine

_SKETCH_MARGIN = 64


def _macaulay(gens: list[MPoly], d: int):
    n, p = gens[0].nvars, gens[0].p
    ridx = monomial_index(n, d)
    rows, cols, data = [], [], []
    col = 0
    for g in gens:
        if g.nvars != n or g.p != p:
            raise ValueError("generators live in different rings")
        if g.is_zero:
            continue
        for mu in monomials(n, d - g.degree):
            for e, c in g.terms.items():
                rows.append(ridx[tuple(a + b for a, b in zip(e, mu))])
                cols.append(col)
                data.append(c)
            col += 1
    M = sparse.coo_matrix(
        (np.array(data, dtype=np.int64), (np.array(rows), np.array(cols))),
        shape=(len(ridx), col),
    ).tocsc()
    return M


def _sketched_rank(M, p: int, width: int, purpose: str, rng_seed: int) -> int:
    rng = rng_stream(rng_seed, purpose)
    nrows, ncols = M.shape
    acc = np.zeros((nrows, width), dtype=np.int64)
    # per-generator column blocks keep the random matrix small; the combined
    # product is still one uniform random column sketch of the whole matrix
    step = max(1, 2**24 // max(width, 1))
    for c0 in range(0, ncols, step):
        c1 = min(c0 + step, ncols)
        S = rng.integers(0, p, size=(c1 - c0, width), dtype=np.int64)
        acc = (acc + M[:, c0:c1] @ S) % p
    return rank(acc, p)


def homogeneous_ideal_dim(gens: list[MPoly], d: int, rng_seed: int = 0) -> int:
    """Dimension of the degree-d graded piece of the ideal generated by gens.

    Rank of the Macaulay matrix (columns = generator x monomial products).
    When the matrix is wider than rows + 64 the rank is taken on a random
    column sketch and confirmed by an independent second sketch; persistent
    disagreement after one widened retry is a hard error.
    """
    gens = [g for g in gens if not g.is_zero]
    if not gens:
        return 0
    if d < max(g.degree for g in gens):
        raise ValueError("d must be at least the largest generator degree")
    p = gens[0].p
    M = _macaulay(gens, d)
    nrows, ncols = M.shape
    if ncols <= nrows + _SKETCH_MARGIN:
        return rank(M.toarray(), p)
    width = nrows + _SKETCH_MARGIN
    tag = f"macaulay/{gens[0].nvars}/{d}/{ncols}"
    for attempt in range(2):
        r1 = _sketched_rank(M, p, width, f"{tag}/sketch-a{attempt}", rng_seed)
        r2 = _sketched_rank(M, p, width, f"{tag}/sketch-b{attempt}", rng_seed)
        if r1 == r2:
            return r1
        width += 256
    raise RuntimeError(f"column sketches keep disagreeing for {tag}")


@dataclass(frozen=True)
class PlateauResult:
    """Stabilized Hilbert-function value with the degree where it locked in."""

    value: int | None
    plateau_degree: int | None
    conclusive: bool
    history: tuple[tuple[int, int], ...]


def zero_dim_degree(gens: list[MPoly], cap: int = 40, rng_seed: int = 0) -> PlateauResult:
    """Degree of a finite scheme: the plateau of codim(ideal_d) as d grows.

    Stops at the first d with HF(d) = HF(d+1); no plateau below the cap
    is reported as inconclusive rather than raising.
    """
    n = gens[0].nvars
    d0 = max(g.degree for g in gens)
    hist: list[tuple[int, int]] = []
    prev: int | None = None
    for d in range(d0, cap + 1):
        hf = num_monomials(n, d) - homogeneous_ideal_dim(gens, d, rng_seed)
        hist.append((d, hf))
        if prev is not None and hf == prev:
            return PlateauResult(hf, d - 1, True, tuple(hist))
        prev = hf
    return PlateauResult(None, None, False, tuple(hist))


# ---------------------------------------------------------------------------
# dense univariate polynomial helpers (ascending coefficients) and the
# binary-form root machinery built on them


def ptrim(c) -> NDArray[np.int64]:
    c = np.asarray(c, dtype=np.int64)
    nz = np.nonzero(c)[0]
    return c[: nz[-1] + 1] if nz.size else np.zeros(1, dtype=np.int64)


def polmul(a, b, p: int):
    a = np.asarray(a)
    b = np.asarray(b)
    if min(a.size, b.size) * (p - 1) ** 2 < 2**63:
        return ptrim(np.convolve(a.astype(np.int64), b.astype(np.int64)) % p)
    return ptrim(np.convolve(a.astype(object), b.astype(object)) % p)


def poldivmod(a, b, p: int):
    a = [int(v) for v in ptrim(np.asarray(a) % p)]
    b = ptrim(np.asarray(b) % p)
    if b.size == 1 and b[0] == 0:
        raise ZeroDivisionError("polynomial division by zero")
    db = b.size - 1
    inv_lc = pow(int(b[-1]), p - 2, p)
    q = [0] * max(len(a) - db, 0)
    while len(a) - 1 >= db and any(a):
        da = len(a) - 1
        while a[da] == 0:
            da -= 1
            if da < db:
                break
        if da < db:
            break
        f = a[da] * inv_lc % p
        q[da - db] = f
        for i in range(db + 1):
            a[da - db + i] = (a[da - db + i] - f * int(b[i])) % p
        del a[da:]
        if not a:
            a = [0]
    return ptrim(np.array(q if q else [0], dtype=np.int64)), ptrim(np.array(a, dtype=np.int64))


def polgcd(a, b, p: int) -> NDArray[np.int64]:
    """Monic gcd over F_p."""
    a, b = ptrim(np.asarray(a) % p), ptrim(np.asarray(b) % p)
    while b.size > 1 or b[0] != 0:
        _, r = poldivmod(a, b, p)
        a, b = b, r
    if a.size == 1 and a[0] == 0:
        return a
    inv = pow(int(a[-1]), p - 2, p)
    return np.array([int(v) * inv % p for v in a], dtype=np.int64)


def polpow_mod(base, e: int, mod, p: int) -> NDArray[np.int64]:
    result = np.array([1], dtype=np.int64)
    _, base = poldivmod(base, mod, p)
    while e:
        if e & 1:
            _, result = poldivmod(polmul(result, base, p), mod, p)
        base_sq = polmul(base, base, p)
        _, base = poldivmod(base_sq, mod, p)
        e >>= 1
    return result


def polderiv(a, p: int) -> NDArray[np.int64]:
    a = np.asarray(a)
    if a.size <= 1:
        return np.zeros(1, dtype=np.int64)
    return ptrim(np.array([int(a[i]) * (i % p) % p for i in range(1, a.size)], dtype=np.int64))


def poleval_batch(c, xs, p: int) -> NDArray[np.int64]:
    xs = np.asarray(xs, dtype=np.int64) % p
    acc = np.zeros_like(xs)
    for coeff in np.asarray(c, dtype=np.int64)[::-1]:
        acc = (acc * xs + int(coeff)) % p
    return acc


def sqrt_mod(a: int, p: int) -> int | None:
    """Tonelli-Shanks square root, None for non-residues."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t, 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


# binary forms: coefficient arrays c with f(s, t) = sum c[i] s^(n-i) t^i


def binary_form_gcd(forms: list, p: int) -> NDArray[np.int64]:
    """Homogeneous gcd of binary forms, as a coefficient array of its degree."""
    stripped = []
    amin = bmin = None
    for c in forms:
        c = np.asarray(c, dtype=np.int64) % p
        nz = np.nonzero(c)[0]
        if nz.size == 0:
            continue  # the zero form divides nothing out
        a, top = int(nz[0]), int(nz[-1])
        b = c.size - 1 - top
        amin = a if amin is None else min(amin, a)
        bmin = b if bmin is None else min(bmin, b)
        stripped.append(c[a : top + 1])
    if not stripped:
        raise ValueError("gcd of zero forms")
    g = stripped[0]
    for c in stripped[1:]:
        g = polgcd(g, c, p)
    dh = g.size - 1
    out = np.zeros(amin + bmin + dh + 1, dtype=np.int64)
    out[amin : amin + dh + 1] = g
    return out


def binary_form_squarefree(c, p: int) -> bool:
    c = np.asarray(c, dtype=np.int64) % p
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise ValueError("zero form")
    a, top = int(nz[0]), int(nz[-1])
    if a > 1 or (c.size - 1 - top) > 1:
        return False
    h = c[a : top + 1]
    return polgcd(h, polderiv(h, p), p).size == 1


@dataclass(frozen=True)
class BinaryRoots:
    """Roots of a binary form: rational, quadratic, and a residual count.

    fp holds ((s, t), multiplicity) projective pairs over F_p; fp2 holds a
    conjugate pair of affine t-coordinates ((a0, a1), (b0, b1)) per entry,
    meaning roots (1 : a0 + a1 w) and (1 : b0 + b1 w) with w^2 = nonresidue.
    residual is the total degree left in factors of degree >= 3.
    """

    degree: int
    fp: tuple[tuple[tuple[int, int], int], ...]
    fp2: tuple[tuple[tuple[tuple[int, int], tuple[int, int]], int], ...]
    residual: int

    @property
    def count_with_multiplicity(self) -> int:
        return sum(m for _, m in self.fp) + 2 * sum(m for _, m in self.fp2) + self.residual


_FP_SCAN_MAX = 1_000_000
_FP2_SCAN_MAX = 1500


def _quadratic_fp2_roots(B: int, C: int, p: int, nonresidue: int):
    """Roots of u^2 + B u + C irreducible over F_p, as F_{p^2} pairs."""
    half = pow(2, p - 2, p)
    disc = (B * B - 4 * C) % p
    tau = sqrt_mod(disc * pow(nonresidue, p - 2, p) % p, p)
    assert tau is not None, "discriminant of an irreducible quadratic must be a non-residue"
    a0 = (-B) * half % p
    a1 = tau * half % p
    return ((a0, a1), (a0, (p - a1) % p))


def _cz_split(f, p: int, rng, factor_deg: int) -> list:
    """Cantor-Zassenhaus equal-degree splitting of a squarefree product."""
    f = ptrim(np.asarray(f) % p)
    if f.size - 1 == 0:
        return []
    if f.size - 1 == factor_deg:
        return [f * pow(int(f[-1]), p - 2, p) % p]
    exponent = (p**factor_deg - 1) // 2
    while True:
        r = rng.integers(0, p, size=f.size - 1).astype(np.int64)
        if not np.any(r):
            continue
        g = polpow_mod(r, exponent, f, p)
        g = g.copy()
        g[0] = (g[0] - 1) % p
        h = polgcd(f, g, p)
        if 0 < h.size - 1 < f.size - 1:
            q, rem = poldivmod(f, h, p)
            assert rem.size == 1 and rem[0] == 0
            return _cz_split(h, p, rng, factor_deg) + _cz_split(q, p, rng, factor_deg)


def binary_form_roots(coeffs, p: int, rng_seed: int = 0) -> BinaryRoots:
    """All roots of a binary form over F_p and F_{p^2}, with multiplicity."""
    c = np.asarray(coeffs, dtype=np.int64) % p
    n = c.size - 1
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise ValueError("zero form has no well-defined roots")
    a, top = int(nz[0]), int(nz[-1])
    b = n - top
    fp: list[tuple[tuple[int, int], int]] = []
    if a:
        fp.append(((1, 0), a))
    if b:
        fp.append(((0, 1), b))
    h = c[a : top + 1]
    # rational roots: direct scan for small p, gcd with u^p - u otherwise
    if h.size > 1:
        if p <= _FP_SCAN_MAX:
            vals = poleval_batch(h, np.arange(p), p)
            rat_roots = [int(r) for r in np.nonzero(vals == 0)[0]]
        else:
            xp = polpow_mod(np.array([0, 1], dtype=np.int64), p, h, p)
            xp = xp.copy() if xp.size > 1 else np.concatenate([xp, np.zeros(1, dtype=np.int64)])
            xp[1] = (xp[1] - 1) % p
            lin = polgcd(h, ptrim(xp), p)
            rng = rng_stream(rng_seed, f"cz1/{p}/{h.size}")
            rat_roots = sorted((-int(fac[0])) % p for fac in _cz_split(lin, p, rng, 1))
        for r in rat_roots:
            mult = 0
            while True:
                q, rem = poldivmod(h, np.array([-r % p, 1], dtype=np.int64), p)
                if rem.size == 1 and rem[0] == 0:
                    h = q
                    mult += 1
                else:
                    break
            fp.append(((1, r), mult))
    fp2: list = []
    if h.size - 1 >= 2:
        from .ffla import FieldCtx, Fp2

        ctx = FieldCtx(p)
        if p <= _FP2_SCAN_MAX:
            F = Fp2(ctx)
            els = F.all_elements()
            pts = els[els[:, 1] != 0]  # true extension elements only
            acc = np.zeros_like(pts)
            for coeff in h[::-1]:
                acc = F.mul(acc, pts)
                acc[:, 0] = (acc[:, 0] + int(coeff)) % p
            zero_mask = (acc[:, 0] == 0) & (acc[:, 1] == 0)
            seen = set()
            for a0, a1 in pts[zero_mask]:
                a0, a1 = int(a0), int(a1)
                key = (a0, min(a1, p - a1))
                if key in seen:
                    continue
                seen.add(key)
                B = (-2 * a0) % p  # u^2 - (trace) u + (norm)
                C = (a0 * a0 - ctx.nonresidue * a1 * a1) % p
                quad = np.array([C, B, 1], dtype=np.int64)
                mult = 0
                while True:
                    q, rem = poldivmod(h, quad, p)
                    if rem.size == 1 and rem[0] == 0:
                        h = q
                        mult += 1
                    else:
                        break
                fp2.append((((a0, a1), (a0, (p - a1) % p)), mult))
        else:
            # gcd with u^(p^2) - u isolates the quadratic factors layer by layer
            while True:
                xp2 = polpow_mod(np.array([0, 1], dtype=np.int64), p * p, h, p)
                xp2 = xp2.copy() if xp2.size > 1 else np.concatenate([xp2, [0]])
                xp2[1] = (xp2[1] - 1) % p
                layer = polgcd(h, ptrim(xp2), p)
                if layer.size - 1 < 2:
                    break
                rng = rng_stream(rng_seed, f"cz/{p}/{h.size}")
                for quad in _cz_split(layer, p, rng, 2):
                    B, C = int(quad[1]), int(quad[0])
                    pair = _quadratic_fp2_roots(B, C, p, ctx.nonresidue)
                    mult = 0
                    while True:
                        q, rem = poldivmod(h, quad, p)
                        if rem.size == 1 and rem[0] == 0:
                            h = q
                            mult += 1
                        else:
                            break
                    fp2.append((pair, mult))
    return BinaryRoots(n, tuple(fp), tuple(fp2), h.size - 1)
