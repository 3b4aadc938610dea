"""Exact dense linear algebra over F_p (plus one quadratic extension).

All heavy row reduction is done with delayed modular reduction: panels of
columns are eliminated with int64 scalar ops and the trailing submatrix is
updated with one BLAS float64 matmul per panel, which is exact as long as
inner_dim * (p-1)^2 < 2^53.  Pivoting always takes the first nonzero entry,
so every result is deterministic and schedule-independent.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

# panel width for blocked elimination
_BLOCK = 64
# largest p for which the int64 panel arithmetic (products ~ p^2) is safe
_INT64_P_MAX = 3037000499


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3e24."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def rng_stream(rng_seed: int, purpose: str) -> np.random.Generator:
    """Deterministic per-purpose random stream.

    The stream depends only on (rng_seed, purpose), never on call order,
    so independent pipeline stages can draw without coupling.
    """
    h = int.from_bytes(hashlib.sha256(purpose.encode()).digest()[:8], "big")
    return np.random.default_rng(np.random.SeedSequence(rng_seed, spawn_key=(h,)))


class FieldCtx:
    """Prime field context. p must be prime and > 3 (we divide by 2 and 3)."""

    def __init__(self, p: int = 101):
        p = int(p)
        if not is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        if p <= 3:
            raise ValueError("p must exceed 3 (Schur projections divide by 2 and 3)")
        if p >= 2**61:
            raise ValueError("p must be < 2^61")
        self.p = p
        self._nonresidue: int | None = None

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    @property
    def nonresidue(self) -> int:
        """Least quadratic non-residue s; F_{p^2} = F_p[w]/(w^2 - s)."""
        if self._nonresidue is None:
            for s in range(2, self.p):
                if pow(s, (self.p - 1) // 2, self.p) == self.p - 1:
                    self._nonresidue = s
                    break
        assert self._nonresidue is not None
        return self._nonresidue


@dataclass(frozen=True)
class FqMatrix:
    """Row-major matrix of residues in [0, p). Thin wrapper over int64 ndarray."""

    a: NDArray[np.int64]
    p: int

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def entries(self) -> list[int]:
        return [int(v) for v in self.a.reshape(-1)]

    @staticmethod
    def make(data, p: int) -> "FqMatrix":
        return FqMatrix(np.asarray(data, dtype=np.int64) % p, p)


def _as_array(m) -> NDArray[np.int64]:
    if isinstance(m, FqMatrix):
        return m.a
    return np.asarray(m, dtype=np.int64)


def matmul_mod(a, b, p: int) -> NDArray[np.int64]:
    """Exact (a @ b) mod p for matrices already reduced mod p."""
    a = _as_array(a)
    b = _as_array(b)
    k = a.shape[-1]
    if k == 0:
        return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
    bound = (p - 1) ** 2
    if bound * k < 2**53:
        r = a.astype(np.float64) @ b.astype(np.float64)
        return np.rint(r % p).astype(np.int64)
    if bound < 2**53:
        chunk = max(1, (2**53 - 1) // bound)
        acc = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.float64)
        for i in range(0, k, chunk):
            acc = (acc + a[..., i : i + chunk].astype(np.float64) @ b[i : i + chunk].astype(np.float64)) % p
        return np.rint(acc).astype(np.int64)
    if bound < 2**62:
        chunk = max(1, (2**62 - 1) // bound)
        acc = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
        for i in range(0, k, chunk):
            acc = (acc + a[..., i : i + chunk] @ b[i : i + chunk]) % p
        return acc
    return np.array((a.astype(object) @ b.astype(object)) % p, dtype=object)


def _rref_object(a: NDArray, p: int, pivot_limit: int | None = None) -> tuple[NDArray, list[int]]:
    # correctness-only fallback for huge p: Python-int scalar Gauss-Jordan
    A = np.array(a, dtype=object) % p
    m, n = A.shape
    lim = n if pivot_limit is None else min(n, pivot_limit)
    piv: list[int] = []
    r = 0
    for c in range(lim):
        if r == m:
            break
        rows = [i for i in range(r, m) if A[i, c] % p != 0]
        if not rows:
            continue
        if rows[0] != r:
            A[[r, rows[0]]] = A[[rows[0], r]]
        A[r] = A[r] * pow(int(A[r, c]), p - 2, p) % p
        for i in range(m):
            if i != r and A[i, c] % p != 0:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        piv.append(c)
        r += 1
    return A, piv


def _inv_small(a: NDArray[np.int64], p: int) -> NDArray[np.int64]:
    # scalar Gauss-Jordan inverse for panel-sized (<= _BLOCK) invertible blocks
    n = a.shape[0]
    M = np.hstack([a % p, np.eye(n, dtype=np.int64)])
    for c in range(n):
        nz = np.nonzero(M[c:, c])[0]
        pr = c + int(nz[0])
        if pr != c:
            M[[c, pr]] = M[[pr, c]]
        inv = pow(int(M[c, c]), p - 2, p)
        if inv != 1:
            M[c] = M[c] * inv % p
        f = M[:, c].copy()
        f[c] = 0
        tgt = np.nonzero(f)[0]
        if tgt.size:
            M[tgt] = (M[tgt] - f[tgt, None] * M[c][None, :]) % p
    return M[:, n:]


def rref(m, p: int, pivot_limit: int | None = None) -> tuple[NDArray[np.int64], list[int]]:
    """Reduced row echelon form over F_p; returns (R, pivot_columns).

    Blocked right-looking elimination: each column panel is reduced by
    scalar Gauss-Jordan (first-nonzero pivoting), and the composite panel
    transform is replayed on the trailing columns as Delta @ T[rho] where
    Delta = (E_rho - C) @ C[rho]^{-1}, C being the pre-elimination pivot
    columns.  One matmul per panel does all the trailing work.

    pivot_limit restricts pivot *search* to columns < pivot_limit (columns to
    the right are still updated), which keeps augmented blocks pivot-free.
    """
    A = _as_array(m) % p
    mm, n = A.shape
    if mm == 0 or n == 0:
        return A.astype(np.int64), []
    if p > _INT64_P_MAX:
        return _rref_object(A, p, pivot_limit)
    lim = n if pivot_limit is None else min(n, pivot_limit)
    if (p - 1) ** 2 * (_BLOCK + 1) < 2**52:
        return _rref_f64(A, p, lim)
    return _rref_i64(A, p, lim)


def _fmod(x: NDArray[np.float64], p: float, inv_p: float) -> NDArray[np.float64]:
    # exact mod-p of integral float64 values below 2^52; floor may be off by
    # one ulp either way, so fix up the residue afterwards
    r = x - np.floor(x * inv_p) * p
    r[r >= p] -= p
    r[r < 0] += p
    return r


def _rref_f64(A0: NDArray, p: int, lim: int) -> tuple[NDArray[np.int64], list[int]]:
    """Fast rref path: float64-resident, reduction deferred across panels.

    The trailing block is left unreduced while a running worst-case bound
    certifies every dgemm stays below 2^52 (hence exact); a single _fmod
    sweep renormalizes when the bound gets close.
    """
    mm, n = A0.shape
    A = A0.astype(np.float64)
    inv_p = 1.0 / p
    growth = 1.0 + _BLOCK * (p - 1.0)
    safe = float(2**52)
    bound = float(p - 1)
    pivcols: list[int] = []
    r = 0
    clean_upto = n
    for c0 in range(0, n, _BLOCK):
        if r == mm or c0 >= lim:
            break
        c1 = min(c0 + _BLOCK, n)
        if bound > p - 1:
            A[:, c0:c1] = _fmod(A[:, c0:c1], p, inv_p)
        # forward elimination on a copy of the active rows: only pivot
        # positions and the row swap schedule are kept
        W = A[r:, c0:c1].copy()
        k = 0
        loc: list[int] = []
        swaps: list[tuple[int, int]] = []
        for j in range(min(c1, lim) - c0):
            nz = np.nonzero(W[k:, j])[0]
            if nz.size == 0:
                continue
            pr = k + int(nz[0])
            if pr != k:
                W[[k, pr]] = W[[pr, k]]
                swaps.append((r + k, r + pr))
            inv = float(pow(int(W[k, j]), p - 2, p))
            if inv != 1.0:
                W[k] = W[k] * inv % p
            f = W[k + 1 :, j].copy()
            tgt = np.nonzero(f)[0]
            if tgt.size:
                W[k + 1 + tgt] = _fmod(W[k + 1 + tgt] - f[tgt, None] * W[k][None, :], p, inv_p)
            loc.append(j)
            k += 1
            if r + k == mm:
                break
        s = k
        clean_upto = c1
        if s == 0:
            continue
        for x, y in swaps:
            A[[x, y]] = A[[y, x]]  # active rows are zero left of c0, so full swaps are safe
        rho = np.arange(r, r + s)
        C = A[:, c0:c1][:, loc]
        crho_inv = _inv_small(C[rho].astype(np.int64), p).astype(np.float64)
        E = np.zeros((mm, s))
        E[rho, np.arange(s)] = 1.0
        delta = _fmod(((E - C) % p) @ crho_inv, p, inv_p)
        # one rank-s update realizes the whole Gauss-Jordan pass on the panel
        P = A[:, c0:c1]
        A[:, c0:c1] = _fmod(P + delta @ P[rho], p, inv_p)
        if c1 < n:
            if bound * growth >= safe:
                A[:, c1:] = _fmod(A[:, c1:], p, inv_p)
                bound = float(p - 1)
            T = A[:, c1:]
            A[:, c1:] = T + delta @ T[rho]
            bound *= growth
        pivcols.extend(c0 + j for j in loc)
        r += s
    if bound > p - 1 and clean_upto < n:
        A[:, clean_upto:] = _fmod(A[:, clean_upto:], p, inv_p)
    return A.astype(np.int64), pivcols


def _rref_i64(A0: NDArray, p: int, lim: int) -> tuple[NDArray[np.int64], list[int]]:
    # large-p path (p up to ~3e9): int64 panels, chunked exact matmul
    mm, n = A0.shape
    A = A0.astype(np.int64)
    pivcols: list[int] = []
    r = 0
    for c0 in range(0, n, _BLOCK):
        if r == mm or c0 >= lim:
            break
        c1 = min(c0 + _BLOCK, n)
        panel = A[:, c0:c1].copy()
        orig = A[:, c0:c1].copy()
        swaps: list[tuple[int, int]] = []
        loc: list[int] = []
        rr = r
        for j in range(min(c1, lim) - c0):
            if rr == mm:
                break
            nz = np.nonzero(panel[rr:, j])[0]
            if nz.size == 0:
                continue
            pr = rr + int(nz[0])
            if pr != rr:
                panel[[rr, pr]] = panel[[pr, rr]]
                swaps.append((rr, pr))
            inv = pow(int(panel[rr, j]), p - 2, p)
            if inv != 1:
                panel[rr] = panel[rr] * inv % p
            f = panel[:, j].copy()
            f[rr] = 0
            tgt = np.nonzero(f)[0]
            if tgt.size:
                panel[tgt] = (panel[tgt] - f[tgt, None] * panel[rr][None, :]) % p
            loc.append(j)
            rr += 1
        A[:, c0:c1] = panel
        s = rr - r
        if s == 0:
            continue
        if c1 < n:
            T = A[:, c1:]
            for x, y in swaps:
                T[[x, y]] = T[[y, x]]
            for x, y in swaps:
                orig[[x, y]] = orig[[y, x]]
            rho = np.arange(r, rr)
            C = orig[:, loc]
            crho_inv = _inv_small(C[rho], p)
            E = np.zeros((mm, s), dtype=np.int64)
            E[rho, np.arange(s)] = 1
            delta = matmul_mod((E - C) % p, crho_inv, p)
            A[:, c1:] = (T + matmul_mod(delta, T[rho], p)) % p
        pivcols.extend(c0 + j for j in loc)
        r = rr
    return A, pivcols


def rank(m, p: int) -> int:
    """Rank over F_p."""
    a = _as_array(m)
    if a.size == 0:
        return 0
    # eliminating over the smaller of the two dimensions is slightly cheaper
    if a.shape[0] > 1.5 * a.shape[1]:
        a = a.T
    return len(rref(a, p)[1])


def kernel(m, p: int) -> "Subspace":
    """Right null space {v : m v = 0} as a canonical Subspace."""
    a = _as_array(m)
    n = a.shape[1]
    R, piv = rref(a, p)
    mask = np.ones(n, dtype=bool)
    if piv:
        mask[list(piv)] = False
    free = np.nonzero(mask)[0]
    basis = np.zeros((free.size, n), dtype=np.int64)
    basis[np.arange(free.size), free] = 1
    if piv:
        basis[:, list(piv)] = (-R[: len(piv)][:, free].T) % p
    return Subspace.from_rows(basis, p)


def solve(m, rhs, p: int):
    """One solution of m x = rhs, or None when inconsistent."""
    a = _as_array(m) % p
    b = (np.asarray(rhs, dtype=np.int64) % p).reshape(-1, 1)
    if a.shape[0] != b.shape[0]:
        raise ValueError("rhs length must equal the row count")
    n = a.shape[1]
    R, piv = rref(np.hstack([a, b]), p, pivot_limit=n)
    if np.any(R[len(piv) :, n]):
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, pc in enumerate(piv):
        x[pc] = R[i, n]
    return x


def solve_many(m, rhs_cols, p: int):
    """Solve m X = B column-by-column with a single elimination.

    Returns (X, ok_mask): X has one solution per consistent column, zeros
    elsewhere.  Used for bulk interpolation where B has hundreds of columns.
    """
    a = _as_array(m) % p
    B = _as_array(rhs_cols) % p
    n = a.shape[1]
    R, piv = rref(np.hstack([a, B]), p, pivot_limit=n)
    # pivots stay in the a-part, so rows past the last pivot hold residuals
    ok = ~np.any(R[len(piv) :, n:], axis=0)
    X = np.zeros((n, B.shape[1]), dtype=np.int64)
    for i, pc in enumerate(piv):
        X[pc] = R[i, n:]
    return X, ok


def inv_matrix(m, p: int) -> NDArray[np.int64]:
    a = _as_array(m)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError("inverse needs a square matrix")
    R, piv = rref(np.hstack([a % p, np.eye(n, dtype=np.int64)]), p, pivot_limit=n)
    if len(piv) < n:
        raise ValueError("matrix is singular over F_p")
    return R[:, n:]


def det(m, p: int) -> int:
    """Determinant over F_p by fraction-free-ish elimination (small matrices)."""
    A = (_as_array(m) % p).astype(np.int64).copy()
    n = A.shape[0]
    if A.shape[0] != A.shape[1]:
        raise ValueError("det needs a square matrix")
    d = 1
    for c in range(n):
        nz = np.nonzero(A[c:, c])[0]
        if nz.size == 0:
            return 0
        pr = c + int(nz[0])
        if pr != c:
            A[[c, pr]] = A[[pr, c]]
            d = -d
        d = d * int(A[c, c]) % p
        inv = pow(int(A[c, c]), p - 2, p)
        below = A[c + 1 :, c]
        tgt = np.nonzero(below)[0]
        if tgt.size:
            f = below[tgt] * inv % p
            A[c + 1 + tgt, c:] = (A[c + 1 + tgt, c:] - f[:, None] * (A[c, c:] * 1)[None, :]) % p
    return d % p


def pfaffian(m, p: int) -> int:
    """Pfaffian of a skew matrix over F_p, by expansion along the first row."""
    A = (_as_array(m) % p).astype(np.int64)
    n = A.shape[0]
    if A.shape[0] != A.shape[1] or np.any((A + A.T) % p):
        raise ValueError("pfaffian needs a skew-symmetric matrix")
    if n % 2:
        return 0
    memo: dict[tuple[int, ...], int] = {(): 1}

    def rec(idx: tuple[int, ...]) -> int:
        if idx in memo:
            return memo[idx]
        a = idx[0]
        total = 0
        for t in range(1, len(idx)):
            entry = int(A[a, idx[t]])
            if entry:
                rest = idx[1:t] + idx[t + 1 :]
                term = entry * rec(rest)
                total += term if t % 2 else -term
        memo[idx] = total % p
        return memo[idx]

    return rec(tuple(range(n)))


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of F_p^n, canonicalized: basis rows in RREF.

    Equality of subspaces is literal equality of representations.
    """

    ambient: int
    basis: NDArray[np.int64]
    p: int
    pivots: tuple[int, ...] = field(default=())

    @staticmethod
    def from_rows(rows, p: int) -> "Subspace":
        a = _as_array(rows) % p
        if a.ndim == 1:
            a = a.reshape(1, -1)
        n = a.shape[1]
        R, piv = rref(a, p)
        return Subspace(n, R[: len(piv)].copy(), p, tuple(piv))

    @staticmethod
    def zero(n: int, p: int) -> "Subspace":
        return Subspace(n, np.zeros((0, n), dtype=np.int64), p, ())

    @staticmethod
    def full(n: int, p: int) -> "Subspace":
        return Subspace(n, np.eye(n, dtype=np.int64), p, tuple(range(n)))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def reduce(self, v) -> NDArray[np.int64]:
        """Residual of v after eliminating the pivot coordinates."""
        v = np.asarray(v, dtype=np.int64) % self.p
        if self.dim == 0:
            return v
        coeffs = v[..., list(self.pivots)]
        return (v - matmul_mod(coeffs, self.basis, self.p)) % self.p

    def contains(self, v) -> bool:
        return not np.any(self.reduce(v))

    def contains_space(self, other: "Subspace") -> bool:
        return not np.any(self.reduce(other.basis))

    def coords(self, v) -> NDArray[np.int64]:
        """Coordinates of v in the RREF basis; raises if v is outside."""
        v = np.asarray(v, dtype=np.int64) % self.p
        c = v[..., list(self.pivots)]
        if np.any((v - matmul_mod(c, self.basis, self.p)) % self.p):
            raise ValueError("vector is not in the subspace")
        return c

    def annihilator(self) -> "Subspace":
        """{f in the dual : f(v) = 0 for all v here}, via the standard pairing."""
        if self.dim == 0:
            return Subspace.full(self.ambient, self.p)
        return kernel(self.basis, self.p)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient == other.ambient
            and self.p == other.p
            and self.basis.shape == other.basis.shape
            and bool(np.array_equal(self.basis, other.basis))
        )

    def __hash__(self):
        return hash((self.ambient, self.p, self.basis.tobytes()))


def span_union(spaces: list[Subspace]) -> Subspace:
    """Smallest subspace containing all inputs."""
    if not spaces:
        raise ValueError("need at least one subspace")
    n, p = spaces[0].ambient, spaces[0].p
    for s in spaces:
        if s.ambient != n or s.p != p:
            raise ValueError("mixed ambient spaces")
    rows = np.vstack([s.basis for s in spaces] + [np.zeros((0, n), dtype=np.int64)])
    return Subspace.from_rows(rows, p)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """a ∩ b via the kernel of [basis_a^T | -basis_b^T]."""
    if a.ambient != b.ambient or a.p != b.p:
        raise ValueError("mixed ambient spaces")
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient, a.p)
    stacked = np.hstack([a.basis.T, (-b.basis.T) % a.p])
    ker = kernel(stacked, a.p)
    if ker.dim == 0:
        return Subspace.zero(a.ambient, a.p)
    combo = matmul_mod(ker.basis[:, : a.dim], a.basis, a.p)
    return Subspace.from_rows(combo, a.p)


# ---------------------------------------------------------------------------
# F_{p^2} arithmetic on (..., 2) int64 arrays: x = a + b*w with w^2 = s.


class Fp2:
    """Vectorized arithmetic in F_{p^2} = F_p[w]/(w^2 - s)."""

    def __init__(self, ctx: FieldCtx):
        self.p = ctx.p
        self.s = ctx.nonresidue

    def lift(self, a) -> NDArray[np.int64]:
        a = np.asarray(a, dtype=np.int64) % self.p
        out = np.zeros(a.shape + (2,), dtype=np.int64)
        out[..., 0] = a
        return out

    def add(self, x, y):
        return (x + y) % self.p

    def sub(self, x, y):
        return (x - y) % self.p

    def mul(self, x, y):
        x = np.asarray(x)
        y = np.asarray(y)
        a, b = x[..., 0], x[..., 1]
        c, d = y[..., 0], y[..., 1]
        out = np.empty(np.broadcast(a, c).shape + (2,), dtype=np.int64)
        out[..., 0] = (a * c + self.s * (b * d % self.p)) % self.p
        out[..., 1] = (a * d + b * c) % self.p
        return out

    def scalar_mul(self, k: int, x):
        return np.asarray(x) * (int(k) % self.p) % self.p

    def conj(self, x):
        out = np.array(x, copy=True)
        out[..., 1] = (-out[..., 1]) % self.p
        return out

    def norm(self, x):
        a, b = np.asarray(x)[..., 0], np.asarray(x)[..., 1]
        return (a * a - self.s * (b * b % self.p)) % self.p

    def inv(self, x):
        n = self.norm(x)
        if np.any(n == 0):
            raise ZeroDivisionError("inverse of 0 in F_{p^2}")
        ninv = np.vectorize(lambda v: pow(int(v), self.p - 2, self.p))(n).astype(np.int64)
        return self.conj(x) * ninv[..., None] % self.p

    def is_zero(self, x):
        x = np.asarray(x)
        return (x[..., 0] == 0) & (x[..., 1] == 0)

    def in_base_field(self, x) -> bool:
        return not np.any(np.asarray(x)[..., 1] % self.p)

    def all_elements(self) -> NDArray[np.int64]:
        """All p^2 elements, ordered (a, b) lexicographically."""
        a, b = np.meshgrid(np.arange(self.p), np.arange(self.p), indexing="ij")
        return np.stack([a.reshape(-1), b.reshape(-1)], axis=-1).astype(np.int64)


# ---------------------------------------------------------------------------
# projective point enumeration


def proj_points(k: int, p: int) -> NDArray[np.int64]:
    """All (p^(k+1)-1)/(p-1) representatives of P^k(F_p).

    Representatives are normalized with first nonzero coordinate 1; within
    each leading-position block the free coordinates run lexicographically.
    """
    blocks = []
    for lead in range(k + 1):
        nfree = k - lead
        grids = np.meshgrid(*([np.arange(p)] * nfree), indexing="ij") if nfree else []
        count = p**nfree
        block = np.zeros((count, k + 1), dtype=np.int64)
        block[:, lead] = 1
        for j, g in enumerate(grids):
            block[:, lead + 1 + j] = g.reshape(-1)
        blocks.append(block)
    return np.vstack(blocks)


def normalize_point(v, p: int) -> NDArray[np.int64]:
    """Scale a projective point so its first nonzero coordinate is 1."""
    v = np.asarray(v, dtype=np.int64) % p
    nz = np.nonzero(v)[0]
    if nz.size == 0:
        raise ValueError("zero vector is not a projective point")
    return v * pow(int(v[nz[0]]), p - 2, p) % p
