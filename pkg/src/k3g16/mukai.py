"""The random seed of the pipeline and the two bilinear maps built from it.

A seed is a pair of generic subspaces: M (2-dim, inside the 10-dim space of
quadrics on 3-space) and N (2-dim, inside the 20-dim mixed component S21).
From the seed:

* W10 is the 10-dim quotient of the mixed component by pi21(M (x) V*) + N,
  realized by echelonizing that kernel and reading coset representatives
  off the non-pivot coordinates;
* alpha is the (8, 10, 4) tensor of the induced map from the 8-dim quotient
  of quadrics to W10-valued linear forms, alpha(f)(x) = q(pi21(f (x) x));
* beta contracts alpha against a point of the dual 9-space, giving a 4 x 8
  matrix whose rank drops on the quadric model's points.

At every x the class of x^2 mod M spans the kernel of alpha_x; genericity
of a seed means exactly that this kernel is never bigger (rank 7).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .ffla import Subspace, kernel, matmul_mod, rank, rng_stream
from .mpoly import monomials
from .multilinear import pi21_matrix, s21_space
from .report import check, all_pass


class SeedNotGeneric(RuntimeError):
    """A random draw failed one of the genericity checks (retry with fresh draws)."""


class NonGenericPoint(RuntimeError):
    """A sampled point fell on a degeneracy locus (resample)."""


@dataclass(frozen=True, eq=False)
class Seed:
    p: int
    rng_seed: int
    M: Subspace  # 2-dim space of quadrics, ambient dim 10
    N: Subspace  # 2-dim subspace of the mixed component, ambient dim 20
    attempts: int = 1

    def serialize(self) -> dict:
        return {
            "p": self.p,
            "rng_seed": self.rng_seed,
            "attempts": self.attempts,
            "M": [[int(v) for v in row] for row in self.M.basis],
            "N": [[int(v) for v in row] for row in self.N.basis],
        }

    @staticmethod
    def deserialize(data: dict) -> "Seed":
        p = int(data["p"])
        return Seed(
            p,
            int(data["rng_seed"]),
            Subspace.from_rows(np.array(data["M"], dtype=np.int64), p),
            Subspace.from_rows(np.array(data["N"], dtype=np.int64), p),
            int(data.get("attempts", 1)),
        )


@dataclass(frozen=True, eq=False)
class W10Model:
    """The quotient of the 20-dim mixed component by the seed's 10-dim kernel."""

    p: int
    kernel: Subspace  # pi21(M (x) V*) + N, echelonized, dim 10
    matrix: NDArray[np.int64]  # 10 x 20, the quotient map on coordinates
    nonpivots: tuple[int, ...]  # coset-representative coordinates

    def q(self, v) -> NDArray[np.int64]:
        """Quotient coordinates of one or many mixed-component vectors."""
        v = np.asarray(v, dtype=np.int64)
        return matmul_mod(v, self.matrix.T, self.p)

    def section(self, w) -> NDArray[np.int64]:
        """The coset representative supported on the non-pivot coordinates."""
        w = np.asarray(w, dtype=np.int64) % self.p
        out = np.zeros(w.shape[:-1] + (20,), dtype=np.int64)
        out[..., list(self.nonpivots)] = w
        return out


def w10_model(seed: Seed) -> W10Model:
    p = seed.p
    S21 = s21_space(4, p)
    pi = pi21_matrix(4, p)
    gens = []
    for m in seed.M.basis:
        for k in range(4):
            t = np.outer(m, np.eye(4, dtype=np.int64)[k]).reshape(-1)
            gens.append(S21.coords(matmul_mod(pi, t.reshape(-1, 1), p).ravel()))
    ker = Subspace.from_rows(np.vstack([np.array(gens), seed.N.basis]), p)
    nonpiv = tuple(c for c in range(20) if c not in ker.pivots)
    reduced = ker.reduce(np.eye(20, dtype=np.int64))
    matrix = reduced[:, list(nonpiv)].T.copy()
    return W10Model(p, ker, matrix, nonpiv)


@dataclass(frozen=True, eq=False)
class AlphaTensor:
    """alpha as an (8, 10, 4) coefficient block: source, target, linear slot."""

    p: int
    tensor: NDArray[np.int64]
    m_nonpivots: tuple[int, ...]  # source-basis slots: quadric coords not pivotal for M

    def at(self, x) -> NDArray[np.int64]:
        """The 10 x 8 evaluation of alpha at a point x of 3-space."""
        x = np.asarray(x, dtype=np.int64).reshape(4, 1) % self.p
        flat = self.tensor.reshape(-1, 4)
        return matmul_mod(flat, x, self.p).reshape(8, 10).T


def to_source_coords(seed: Seed, f) -> NDArray[np.int64]:
    """Coordinates of a quadric's class modulo M (supported off M's pivots)."""
    nonpiv = [c for c in range(10) if c not in seed.M.pivots]
    return seed.M.reduce(f)[..., nonpiv]


def from_source_coords(seed: Seed, c) -> NDArray[np.int64]:
    """The distinguished representative quadric of a class modulo M."""
    c = np.asarray(c, dtype=np.int64) % seed.p
    nonpiv = [col for col in range(10) if col not in seed.M.pivots]
    out = np.zeros(c.shape[:-1] + (10,), dtype=np.int64)
    out[..., nonpiv] = c
    return out


def build_alpha(seed: Seed, model: Optional[W10Model] = None) -> AlphaTensor:
    p = seed.p
    model = model or w10_model(seed)
    S21 = s21_space(4, p)
    pi = pi21_matrix(4, p)
    nonpiv = tuple(c for c in range(10) if c not in seed.M.pivots)
    tensor = np.zeros((8, 10, 4), dtype=np.int64)
    for a, slot in enumerate(nonpiv):
        f = np.zeros(10, dtype=np.int64)
        f[slot] = 1
        for k in range(4):
            t = np.outer(f, np.eye(4, dtype=np.int64)[k]).reshape(-1)
            w = model.q(S21.coords(matmul_mod(pi, t.reshape(-1, 1), p).ravel()))
            tensor[a, :, k] = w
    # well-definedness on the quotient: M itself must map to zero
    for m in seed.M.basis:
        for k in range(4):
            t = np.outer(m, np.eye(4, dtype=np.int64)[k]).reshape(-1)
            w = model.q(S21.coords(matmul_mod(pi, t.reshape(-1, 1), p).ravel()))
            if w.any():
                raise RuntimeError("quotient map does not kill M (x) V*: wrong kernel")
    return AlphaTensor(p, tensor, nonpiv)


def x_square_class(seed: Seed, x) -> NDArray[np.int64]:
    """The class of the squared linear form x^2 modulo M, in source coordinates."""
    x = np.asarray(x, dtype=np.int64) % seed.p
    sq = np.zeros(10, dtype=np.int64)
    for i, e in enumerate(monomials(4, 2)):
        term = 1
        for k, ek in enumerate(e):
            term = term * pow(int(x[k]), ek, seed.p) % seed.p
        if 1 in e:  # mixed monomial x_i x_j carries the cross coefficient 2
            term = term * 2 % seed.p
        sq[i] = term
    return to_source_coords(seed, sq)


def t_fiber(alpha: AlphaTensor, x) -> Subspace:
    """The 3-dim fiber of the cokernel bundle at x: the annihilator of im(alpha_x)."""
    ax = alpha.at(x)
    if rank(ax, alpha.p) != 7:
        raise NonGenericPoint(f"alpha has rank {rank(ax, alpha.p)} != 7 at {list(map(int, x))}")
    return kernel(ax.T, alpha.p)


def beta_at(alpha: AlphaTensor, w) -> NDArray[np.int64]:
    """Contraction of alpha against a point of the dual 9-space: a 4 x 8 matrix."""
    w = np.asarray(w, dtype=np.int64).reshape(1, 10) % alpha.p
    cols = []
    for k in range(4):
        cols.append(matmul_mod(w, alpha.tensor[:, :, k].T, alpha.p).ravel())
    return np.stack(cols, axis=0)


def validate_seed(seed: Seed, raise_on_fail: bool = True) -> list[dict]:
    """Genericity audit of a seed; raises SeedNotGeneric naming the first failure."""
    p = seed.p
    out = [
        check("seed.dim_M", seed.M.dim, 2, "seed"),
        check("seed.dim_N", seed.N.dim, 2, "seed"),
    ]
    model = w10_model(seed)
    out.append(check("seed.kernel_dim", model.kernel.dim, 10, "seed"))
    out.append(check("seed.w10_dim", 20 - model.kernel.dim, 10, "seed"))
    if model.kernel.dim == 10:
        alpha = build_alpha(seed, model)
        rng = rng_stream(seed.rng_seed, "mukai/validate/x")
        ranks = []
        kernel_is_square = []
        for _ in range(10):
            x = rng.integers(0, p, 4)
            while not x.any():
                x = rng.integers(0, p, 4)
            ax = alpha.at(x)
            ranks.append(rank(ax, p))
            cls = x_square_class(seed, x)
            in_kernel = not matmul_mod(ax, cls.reshape(-1, 1), p).any()
            kernel_is_square.append(bool(cls.any()) and in_kernel)
        out.append(check("seed.alpha_rank7", ranks, [7] * 10, "seed"))
        out.append(check("seed.kernel_is_x_square", kernel_is_square, [True] * 10, "seed"))
    if raise_on_fail and not all_pass(out):
        failing = next(c["id"] for c in out if c["status"] != "pass")
        raise SeedNotGeneric(failing)
    return out


def generate_seed(p: int, rng_seed: int, retries: int = 8) -> Seed:
    """Draw (M, N) from the deterministic stream until the genericity audit passes."""
    if p <= 3:
        raise ValueError("the field must have more than 3 elements")
    for attempt in range(1, retries + 1):
        rng = rng_stream(rng_seed, f"mukai/seed/attempt-{attempt}")
        M = Subspace.from_rows(rng.integers(0, p, (2, 10)), p)
        N = Subspace.from_rows(rng.integers(0, p, (2, 20)), p)
        seed = Seed(p, rng_seed, M, N, attempt)
        if M.dim != 2 or N.dim != 2:
            continue
        try:
            validate_seed(seed)
            return seed
        except SeedNotGeneric:
            continue
    raise SeedNotGeneric(f"no generic seed in {retries} attempts for rng_seed={rng_seed}")
