"""Schur-module bookkeeping: S2/S3/S21 of a 4-space, wedges of a 10-space.

Concrete matrices over F_p for the total symmetrization S2 (x) V* -> S3,
its equivariant splitting, and the complementary projector whose image is
the mixed component S21 = ker(sym).  Wedge coordinates are indexed by
ascending tuples in lexicographic order, with e_i ^ e_j (^ e_k) mapped to
+1 at its ascending slot.  The `Trivector` container stores an alternating
3-tensor in dimension 10 by its 120 independent coefficients and exposes
the two contractions the rest of the pipeline consumes: against a vector
(a 10 x 10 skew matrix) and against the full bivector basis (a 10 x 45
flattening).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from math import comb

import numpy as np
from numpy.typing import NDArray

from .ffla import Subspace, kernel, matmul_mod
from .mpoly import monomial_index, monomials, num_monomials

_PERM3 = tuple(permutations(range(3)))
_SIGN3 = {s: (1 if sum(1 for a in range(3) for b in range(a + 1, 3) if s[a] > s[b]) % 2 == 0 else -1) for s in _PERM3}


@lru_cache(maxsize=None)
def wedge_pairs(n: int) -> tuple[tuple[int, int], ...]:
    """Ascending index pairs of an n-space, lex order: the basis of its 2nd wedge."""
    return tuple(combinations(range(n), 2))


@lru_cache(maxsize=None)
def wedge_triples(n: int) -> tuple[tuple[int, int, int], ...]:
    """Ascending index triples, lex order: the basis of the 3rd wedge."""
    return tuple(combinations(range(n), 3))


@lru_cache(maxsize=None)
def pair_index(n: int) -> dict[tuple[int, int], int]:
    return {t: i for i, t in enumerate(wedge_pairs(n))}


@lru_cache(maxsize=None)
def triple_index(n: int) -> dict[tuple[int, int, int], int]:
    return {t: i for i, t in enumerate(wedge_triples(n))}


_SHAPE_DIMS = {
    "s2": lambda n: num_monomials(n, 2),
    "s3": lambda n: num_monomials(n, 3),
    "s21": lambda n: n * (n * n - 1) // 3,
    "wedge2": lambda n: comb(n, 2),
    "wedge3": lambda n: comb(n, 3),
}


@dataclass(frozen=True)
class SchurBasis:
    """A named basis of one of the handful of GL(n)-modules used here.

    `basis` is the tuple indexing the coordinates: exponent tuples for the
    symmetric shapes, ascending index tuples for the wedges, and plain
    slot numbers for s21 (whose concrete basis is the echelonized kernel
    of the symmetrization, see `s21_space`).
    """

    shape: str
    source_dim: int
    basis: tuple
    dim: int


def schur_basis(shape: str, source_dim: int) -> SchurBasis:
    if shape not in _SHAPE_DIMS:
        raise ValueError(f"unknown shape {shape!r}")
    d = _SHAPE_DIMS[shape](source_dim)
    if shape in ("s2", "s3"):
        idx: tuple = monomials(source_dim, 2 if shape == "s2" else 3)
    elif shape == "wedge2":
        idx = wedge_pairs(source_dim)
    elif shape == "wedge3":
        idx = wedge_triples(source_dim)
    else:
        idx = tuple(range(d))
    return SchurBasis(shape, source_dim, idx, d)


def sym_matrix(nvars: int, p: int) -> NDArray[np.int64]:
    """Total symmetrization S2 (x) V* -> S3 over F_p.

    Column (m, k), flattened as ``m * nvars + k`` with m a quadric monomial
    index, carries x^e (x) x_k to the cubic monomial x^(e + delta_k).
    """
    quad = monomials(nvars, 2)
    cubic_idx = monomial_index(nvars, 3)
    out = np.zeros((num_monomials(nvars, 3), len(quad) * nvars), dtype=np.int64)
    for m, e in enumerate(quad):
        for k in range(nvars):
            up = list(e)
            up[k] += 1
            out[cubic_idx[tuple(up)], m * nvars + k] = 1
    return out


def iota_matrix(nvars: int, p: int) -> NDArray[np.int64]:
    """Equivariant section of `sym_matrix`: x^e -> (1/3) sum_k e_k x^(e-delta_k) (x) x_k.

    Needs 3 invertible in F_p, hence p != 3.
    """
    if p == 3:
        raise ValueError("splitting needs 3 invertible in the field")
    third = pow(3, p - 2, p)
    cubic = monomials(nvars, 3)
    quad_idx = monomial_index(nvars, 2)
    out = np.zeros((num_monomials(nvars, 2) * nvars, len(cubic)), dtype=np.int64)
    for c, e in enumerate(cubic):
        for k in range(nvars):
            if e[k] == 0:
                continue
            down = list(e)
            down[k] -= 1
            out[quad_idx[tuple(down)] * nvars + k, c] = e[k] * third % p
    return out


def pi21_matrix(nvars: int, p: int) -> NDArray[np.int64]:
    """Projector of S2 (x) V* onto the mixed component, along the symmetric one."""
    s = sym_matrix(nvars, p)
    i = iota_matrix(nvars, p)
    n = s.shape[1]
    return (np.eye(n, dtype=np.int64) - matmul_mod(i, s, p)) % p


def s21_space(nvars: int, p: int) -> Subspace:
    """The mixed component ker(sym) with its echelonized basis (dim 20 for n=4)."""
    return kernel(sym_matrix(nvars, p), p)


def s21_project(t: NDArray, p: int) -> NDArray[np.int64]:
    """Apply the mixed-component projector to flattened tensors of S2 (x) V*.

    `t` has the tensor coordinate as its *first* axis (a single vector or a
    matrix of column vectors); the variable count is recovered from its
    length, which must be nvars * C(nvars+1, 2).
    """
    t = np.asarray(t, dtype=np.int64)
    size = t.shape[0]
    nvars = 1
    while nvars * num_monomials(nvars, 2) < size:
        nvars += 1
    if nvars * num_monomials(nvars, 2) != size:
        raise ValueError(f"length {size} is not nvars * dim S2 for any nvars")
    flat = t.reshape(size, -1)
    out = matmul_mod(pi21_matrix(nvars, p), flat, p)
    return out.reshape(t.shape)


def _violation_report(c: NDArray, p: int) -> tuple[tuple[int, int, int], int] | None:
    """Worst non-alternating index triple of a cubic tensor, or None if clean.

    For each ascending triple the six permuted slots are compared against the
    signed copy of the ascending entry; triples with a repeated index must be
    zero on all their slots.  Returns the triple with the most failing slots.
    """
    n = c.shape[0]
    cm = c % p
    worst: tuple[tuple[int, int, int], int] | None = None
    for i in range(n):
        for j in range(i, n):
            for k in range(j, n):
                if i == j or j == k:
                    bad = sum(int(cm[s] != 0) for s in set(permutations((i, j, k))))
                else:
                    ref = int(cm[i, j, k])
                    base = (i, j, k)
                    bad = 0
                    for s in _PERM3:
                        slot = (base[s[0]], base[s[1]], base[s[2]])
                        if int(cm[slot]) != _SIGN3[s] * ref % p:
                            bad += 1
                if bad and (worst is None or bad > worst[1]):
                    worst = ((i, j, k), bad)
    return worst


@dataclass(frozen=True)
class Trivector:
    """Alternating 3-tensor on a fixed n-space (n = 10 throughout the pipeline).

    `data` holds the coefficient at each ascending triple, in the order of
    `wedge_triples(dim)`; every other entry of the full tensor is a signed
    copy.  `dual` records whether the coordinates refer to the space or its
    dual — pure bookkeeping, the arithmetic is identical.
    """

    dim: int
    p: int
    data: tuple[int, ...]
    dual: bool = False

    def __post_init__(self):
        if len(self.data) != comb(self.dim, 3):
            raise ValueError("coefficient count does not match C(dim, 3)")
        if any(not (0 <= v < self.p) for v in self.data):
            object.__setattr__(self, "data", tuple(int(v) % self.p for v in self.data))

    @classmethod
    def zero(cls, dim: int, p: int, dual: bool = False) -> "Trivector":
        return cls(dim, p, (0,) * comb(dim, 3), dual)

    @classmethod
    def from_vec(cls, vec, p: int, dual: bool = False) -> "Trivector":
        v = np.asarray(vec, dtype=np.int64).reshape(-1) % p
        dim = 3
        while comb(dim, 3) < v.size:
            dim += 1
        if comb(dim, 3) != v.size:
            raise ValueError(f"length {v.size} is not C(n, 3) for any n")
        return cls(dim, p, tuple(int(x) for x in v), dual)

    @classmethod
    def from_tensor(cls, c, p: int, dual: bool = False) -> "Trivector":
        """Validate full antisymmetry of a cubic coefficient tensor and pack it.

        Raises ValueError naming the worst violating triple (most failed
        slots among its permutations; ties broken lexicographically).
        """
        c = np.asarray(c, dtype=np.int64)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise ValueError("expected an n x n x n coefficient tensor")
        bad = _violation_report(c, p)
        if bad is not None:
            raise ValueError(
                f"tensor is not alternating: worst triple {bad[0]} has {bad[1]} inconsistent slots"
            )
        n = c.shape[0]
        vec = [int(c[t]) % p for t in wedge_triples(n)]
        return cls(n, p, tuple(vec), dual)

    @property
    def coeffs(self) -> dict[tuple[int, int, int], int]:
        """Nonzero coefficients keyed by ascending triple."""
        return {t: v for t, v in zip(wedge_triples(self.dim), self.data) if v}

    def coeff(self, i: int, j: int, k: int) -> int:
        """Signed coefficient at an arbitrary index triple (0 on repeats)."""
        if i == j or j == k or i == k:
            return 0
        order = sorted((i, j, k))
        val = self.data[triple_index(self.dim)[tuple(order)]]
        inversions = sum(1 for a, b in combinations((i, j, k), 2) if a > b)
        return val if inversions % 2 == 0 else (-val) % self.p

    def to_vec(self) -> NDArray[np.int64]:
        return np.array(self.data, dtype=np.int64)

    def dense(self) -> NDArray[np.int64]:
        """The full sign-extended n x n x n tensor."""
        n = self.dim
        out = np.zeros((n, n, n), dtype=np.int64)
        for (i, j, k), v in zip(wedge_triples(n), self.data):
            if not v:
                continue
            out[i, j, k] = out[j, k, i] = out[k, i, j] = v
            w = (-v) % self.p
            out[i, k, j] = out[j, i, k] = out[k, j, i] = w
        return out

    def contract(self, v) -> NDArray[np.int64]:
        """The skew matrix (t(v, e_i, e_j))_ij for a coordinate vector v."""
        v = np.asarray(v, dtype=np.int64).reshape(1, self.dim) % self.p
        d = self.dense().reshape(self.dim, self.dim * self.dim)
        return matmul_mod(v, d, self.p).reshape(self.dim, self.dim)

    def flattening(self) -> NDArray[np.int64]:
        """The n x C(n,2) matrix whose column at slot (i, j) is t(e_i, e_j, -)."""
        d = self.dense()
        cols = [d[i, j, :] for i, j in wedge_pairs(self.dim)]
        return np.stack(cols, axis=1) % self.p

    def serialize(self) -> list[dict]:
        """Nonzero coefficients as sorted {i, j, k, coeff} records."""
        return [
            {"i": i, "j": j, "k": k, "coeff": int(v)}
            for (i, j, k), v in zip(wedge_triples(self.dim), self.data)
            if v
        ]

    @classmethod
    def deserialize(cls, records, p: int, dim: int = 10, dual: bool = False) -> "Trivector":
        vec = np.zeros(comb(dim, 3), dtype=np.int64)
        tidx = triple_index(dim)
        for r in records:
            i, j, k = int(r["i"]), int(r["j"]), int(r["k"])
            if not i < j < k:
                raise ValueError(f"indices must be ascending, got ({i}, {j}, {k})")
            vec[tidx[(i, j, k)]] = int(r["coeff"]) % p
        return cls(dim, p, tuple(int(x) for x in vec), dual)
