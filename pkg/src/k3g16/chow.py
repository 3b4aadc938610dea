"""Exact integer intersection theory for the two ambient rings of the pipeline.

Two tiny graded rings, both with hand-coded multiplication tables:

* the Chow ring of the P^1-bundle P(F*) over a K3 surface of genus 16,
  on the basis {1; H, h; hH, p; pH} with the Grothendieck relation
  H^2 = hH - 9p and the surface relations h^2 = 30p, hp = p^2 = 0
  (H = relative hyperplane, h = polarization, p = point);
* the truncated polynomial ring Z[x]/(x^4) of 3-space.

On top of those, the rank-2 Beauville-Bogomolov lattice of the Hilbert
square, Gram diag(30, -2) on the classes (L, delta), with fourfold
intersection numbers given by the Fujiki symmetrization (constant 3).
Everything here is characteristic-zero bookkeeping, so plain Python
integers throughout — no reduction mod p.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .report import check

# basis slots of the bundle ring and their cohomological degrees
_BASIS = ("1", "H", "h", "hH", "p", "pH")
_DEG = {"1": 0, "H": 1, "h": 1, "hH": 2, "p": 2, "pH": 3}

# products of basis elements (commutative; total degree > 3 vanishes)
_MULT: dict[tuple[str, str], dict[str, int]] = {
    ("H", "H"): {"hH": 1, "p": -9},
    ("H", "h"): {"hH": 1},
    ("H", "p"): {"pH": 1},
    ("H", "hH"): {"pH": 30},
    ("h", "h"): {"p": 30},
    ("h", "hH"): {"pH": 30},
    ("h", "p"): {},
}


@dataclass(frozen=True)
class PFChowClass:
    """An integer class in the bundle ring, as coefficients on the fixed basis."""

    c: tuple[int, int, int, int, int, int]

    @staticmethod
    def of(**coeffs: int) -> "PFChowClass":
        unknown = set(coeffs) - set(_BASIS)
        if unknown:
            raise ValueError(f"unknown basis element(s) {sorted(unknown)}")
        return PFChowClass(tuple(coeffs.get(b, 0) for b in _BASIS))

    def __add__(self, other: "PFChowClass") -> "PFChowClass":
        return PFChowClass(tuple(a + b for a, b in zip(self.c, other.c)))

    def __sub__(self, other: "PFChowClass") -> "PFChowClass":
        return PFChowClass(tuple(a - b for a, b in zip(self.c, other.c)))

    def scale(self, k: int) -> "PFChowClass":
        return PFChowClass(tuple(k * a for a in self.c))

    def __mul__(self, other: "PFChowClass") -> "PFChowClass":
        acc = dict.fromkeys(_BASIS, 0)
        for i, bi in enumerate(_BASIS):
            if not self.c[i]:
                continue
            for j, bj in enumerate(_BASIS):
                if not other.c[j]:
                    continue
                f = self.c[i] * other.c[j]
                if bi == "1":
                    acc[bj] += f
                elif bj == "1":
                    acc[bi] += f
                else:
                    key = (bi, bj) if (bi, bj) in _MULT else (bj, bi)
                    if key in _MULT:
                        for b, v in _MULT[key].items():
                            acc[b] += f * v
                    elif _DEG[bi] + _DEG[bj] <= 3:
                        raise AssertionError(f"missing product {bi} * {bj}")
        return PFChowClass(tuple(acc[b] for b in _BASIS))

    def pow(self, k: int) -> "PFChowClass":
        out = ONE
        for _ in range(k):
            out = out * self
        return out

    def inv(self) -> "PFChowClass":
        """Inverse of a class with constant term 1 (geometric series, nilpotent tail)."""
        if self.c[0] != 1:
            raise ValueError("only classes with constant term 1 are inverted here")
        n = self - ONE
        n2 = n * n
        return ONE - n + n2 - n2 * n

    def grade(self, d: int) -> "PFChowClass":
        return PFChowClass(tuple(v if _DEG[b] == d else 0 for b, v in zip(_BASIS, self.c)))

    @property
    def degree(self) -> int:
        """Coefficient of the point class pH (the degree map)."""
        return self.c[_BASIS.index("pH")]

    def coeffs(self) -> dict[str, int]:
        return {b: v for b, v in zip(_BASIS, self.c) if v}


ONE = PFChowClass((1, 0, 0, 0, 0, 0))
H = PFChowClass.of(H=1)
h = PFChowClass.of(h=1)
POINT = PFChowClass.of(p=1)


def degree_X() -> int:
    """Degree of the quadric model: H^3 evaluated in the bundle ring."""
    return H.pow(3).degree


def segre_normal_check() -> list[dict]:
    """Segre class of the embedding's normal bundle and the cover degree.

    s(N) = c(tangent of the bundle) / c(tangent of P^9 restricted)
         = (1 + 24p)(1 + 2H - h)(1 + H)^(-10),
    then pairing against (1 + 2H)^9 counts the sheets of the second
    projection: 2^9 minus the top coefficient.
    """
    s = (ONE + POINT.scale(24)) * (ONE + H.scale(2) - h) * (ONE + H).pow(10).inv()
    prod = s * (ONE + H.scale(2)).pow(9)
    out = [
        check("segre.s1", s.grade(1).coeffs(), {"H": -8, "h": -1}, "chow"),
        check("segre.s2", s.grade(2).coeffs(), {"hH": 45, "p": -291}, "chow"),
        check("segre.s3", s.grade(3).coeffs(), {"pH": -4152}, "chow"),
        check("segre.prod1", prod.grade(1).coeffs(), {"H": 10, "h": -1}, "chow"),
        check("segre.prod2", prod.grade(2).coeffs(), {"hH": 27, "p": -291}, "chow"),
        check("segre.prod3", prod.degree, 510, "chow"),
        check("segre.cover_degree", 2**9 - prod.degree, 2, "chow"),
    ]
    return out


def _series_mul(a: list[int], b: list[int], n: int = 4) -> list[int]:
    out = [0] * n
    for i, ai in enumerate(a[:n]):
        for j, bj in enumerate(b[: n - i]):
            out[i + j] += ai * bj
    return out


def chern_T_check() -> list[dict]:
    """Chern classes of the rank-3 cokernel bundle on 3-space.

    From the resolution 0 -> O(-3) -> O(-1)^8 -> O^10 -> T -> 0:
    c(T) = (1 - 3x)(1 - x)^(-8) in Z[x]/(x^4), and the Euler
    characteristic of T is 10 (all middle twists have chi = 0).
    """
    inv8 = [comb(7 + k, 7) for k in range(4)]  # (1 - x)^(-8)
    c = _series_mul([1, -3, 0, 0], inv8)

    def chi_o(d: int) -> int:
        return comb(d + 3, 3) if d >= -3 else -comb(-d - 1, 3)

    chi_t = 10 * chi_o(0) - 8 * chi_o(-1) + chi_o(-3)
    return [
        check("chern.cT", c, [1, 5, 12, 12], "chow"),
        check("chern.chiT", chi_t, 10, "chow"),
    ]


# --- Beauville-Bogomolov / Fujiki arithmetic on the rank-2 lattice ---------

_GRAM = ((30, 0), (0, -2))
L_CLASS = (1, 0)
DELTA = (0, 1)


def bb_form(a: tuple[int, int], b: tuple[int, int]) -> int:
    return sum(a[i] * _GRAM[i][j] * b[j] for i in range(2) for j in range(2))


def intersection4(a, b, c, d) -> int:
    """Fourfold intersection number via the Fujiki symmetrization.

    With the normalization matching D^4 = 3 q(D)^2 on a Hilbert square.
    """
    return bb_form(a, b) * bb_form(c, d) + bb_form(a, c) * bb_form(b, d) + bb_form(a, d) * bb_form(b, c)


def stability_check() -> list[dict]:
    """Slope stability of the rank-4 quotient bundle on the Hilbert square.

    Its first Chern class is 2L - 7delta.  A destabilizing quotient would
    have a movable first Chern class aL - b*delta with slope bound
    a*3960 - b*924 <= (3/4) c1^4; the integer case analysis over a in
    {1, 2} forces b/a >= 4, which exceeds the movable-cone slope 15/4.
    """
    c1 = (2, -7)
    q_c1 = bb_form(c1, c1)
    c1_4 = intersection4(c1, c1, c1, c1)
    bound = 3 * c1_4 // 4
    l_c13 = intersection4(L_CLASS, c1, c1, c1)
    d_c13 = intersection4(DELTA, c1, c1, c1)
    out = [
        check("stability.q_c1", q_c1, 22, "chow"),
        check("stability.c1_4", c1_4, 1452, "chow"),
        check("stability.bound", bound, 1089, "chow"),
        check("stability.L_c1_3", l_c13, 3960, "chow"),
        check("stability.delta_c1_3", d_c13, 924, "chow"),
    ]
    expected_beta = {1: 4, 2: 8}
    for a in (1, 2):
        beta_min = -((-(a * l_c13 - bound)) // d_c13)  # ceil division
        out.append(check(f"stability.beta_min.alpha{a}", beta_min, expected_beta[a], "chow"))
        # movable classes have slope b/a <= 15/4; the forced b contradicts that
        out.append(check(f"stability.contradiction.alpha{a}", 4 * beta_min > 15 * a, True, "chow"))
    verdict = "no destabilizing movable class" if all(c["status"] == "pass" for c in out) else "unresolved"
    out.append(check("stability.verdict", verdict, "no destabilizing movable class", "chow"))
    return out


def run_all() -> list[dict]:
    out = [check("chow.degree_X", degree_X(), 21, "chow"),
           check("chow.h_H2", (h * H * H).degree, 30, "chow")]
    out += segre_normal_check()
    out += chern_T_check()
    out += stability_check()
    return out
