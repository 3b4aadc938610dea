"""Closed-form intersection numbers: every constant is pinned exactly."""

from itertools import product

import pytest

from k3g16.chow import (
    DELTA,
    H,
    L_CLASS,
    ONE,
    POINT,
    PFChowClass,
    bb_form,
    chern_T_check,
    degree_X,
    h,
    intersection4,
    run_all,
    segre_normal_check,
    stability_check,
)
from k3g16.report import all_pass


def test_ring_relations():
    assert (H * H).coeffs() == {"hH": 1, "p": -9}
    assert (h * h).coeffs() == {"p": 30}
    assert (h * POINT).coeffs() == {}
    assert (POINT * POINT).coeffs() == {}
    assert (H * POINT).coeffs() == {"pH": 1}


def test_ring_is_commutative_and_associative_on_basis():
    basis = [ONE, H, h, H * h, POINT, H * POINT]
    for a, b in product(basis, repeat=2):
        assert (a * b).c == (b * a).c
    for a, b, c in product(basis, repeat=3):
        assert ((a * b) * c).c == (a * (b * c)).c


def test_inverse_is_a_genuine_inverse():
    x = ONE + H.scale(2) - h + POINT.scale(5)
    assert (x * x.inv()).c == ONE.c
    with pytest.raises(ValueError):
        H.inv()


def test_degree_X_and_h_H2():
    assert degree_X() == 21
    assert (h * H * H).degree == 30


def test_segre_pieces_and_cover_degree():
    rep = {c["id"]: c for c in segre_normal_check()}
    assert rep["segre.s1"]["value"] == {"H": -8, "h": -1}
    assert rep["segre.s2"]["value"] == {"hH": 45, "p": -291}
    assert rep["segre.s3"]["value"] == {"pH": -4152}
    assert rep["segre.prod3"]["value"] == 510
    assert rep["segre.cover_degree"]["value"] == 2
    assert all_pass(list(rep.values()))


def test_chern_classes_of_quotient_bundle():
    rep = {c["id"]: c for c in chern_T_check()}
    assert rep["chern.cT"]["value"] == [1, 5, 12, 12]
    assert rep["chern.chiT"]["value"] == 10
    assert all_pass(list(rep.values()))


def test_lattice_numbers():
    c1 = (2, -7)
    assert bb_form(c1, c1) == 22
    assert intersection4(c1, c1, c1, c1) == 3 * 22 * 22 == 1452
    assert intersection4(L_CLASS, c1, c1, c1) == 3960
    assert intersection4(DELTA, c1, c1, c1) == 924
    # Fujiki shape: D1 D2^3 = 3 q(D1, D2) q(D2)
    assert intersection4(L_CLASS, c1, c1, c1) == 3 * bb_form(L_CLASS, c1) * bb_form(c1, c1)


def test_stability_case_analysis():
    rep = {c["id"]: c for c in stability_check()}
    assert rep["stability.beta_min.alpha1"]["value"] == 4
    assert rep["stability.beta_min.alpha2"]["value"] == 8
    assert rep["stability.verdict"]["value"] == "no destabilizing movable class"
    assert all_pass(list(rep.values()))


def test_run_all_green():
    checks = run_all()
    assert len(checks) == 2 + 7 + 2 + 10
    assert all_pass(checks)


def test_of_rejects_unknown_basis():
    with pytest.raises(ValueError):
        PFChowClass.of(Q=1)
