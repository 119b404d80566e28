import csv
import io
from fractions import Fraction

import pytest

from iamsr.analysis import (
    bandwidth_table,
    exact_repair_secrecy_bound,
    ia_repair_bandwidth,
    ia_secrecy_capacity,
    mbr_point,
    msr_point,
    msr_secrecy_bound,
    secrecy_table,
    to_csv,
)


def test_msr_point():
    assert (msr_point(9, 3, 5).alpha, msr_point(9, 3, 5).gamma) == (3, 5)
    assert msr_point(7, 1, 4).alpha == 7 and msr_point(7, 1, 4).gamma == 7
    for k in range(2, 31):
        pt = msr_point(k * k, k, 2 * k - 1)
        assert (pt.alpha, pt.gamma) == (k, 2 * k - 1)


def test_mbr_point():
    pt = mbr_point(9, 3, 5)
    assert pt.alpha == pt.gamma == Fraction(30, 8)
    assert mbr_point(7, 1, 3).gamma == 7
    with pytest.raises(ValueError):
        mbr_point(9, 4, 3)


def test_ia_bandwidth():
    assert [ia_repair_bandwidth(k) for k in (2, 3, 30)] == [3, 5, 59]


def test_exact_repair_bound_examples():
    assert exact_repair_secrecy_bound(3, 5, 3, 1, 1) == 2
    assert exact_repair_secrecy_bound(5, 9, 5, 1, 0) == 20
    assert exact_repair_secrecy_bound(30, 59, 30, 1, 2) == 27 * Fraction(29, 30) ** 2 * 30
    with pytest.raises(ValueError):
        exact_repair_secrecy_bound(3, 5, 3, 2, 1)


def test_bound_ordering_full_region():
    for k in range(2, 31):
        d, alpha = 2 * k - 1, k
        for l1 in range(k):
            for l2 in range(k - l1):
                ia = ia_secrecy_capacity(k, l1, l2)
                gb = exact_repair_secrecy_bound(k, d, alpha, l1, l2)
                mb = msr_secrecy_bound(k, alpha, l1 + l2)
                assert ia <= gb <= msr_secrecy_bound(k, alpha, l1)
                assert mb <= msr_secrecy_bound(k, alpha, l1)
                if l2 == 0:
                    assert ia == gb == (k - l1) * alpha


def test_bandwidth_table():
    rows = bandwidth_table(30)
    assert [r.value for r in rows] == list(range(2, 31))
    assert rows[1].series["ia_gamma"] == 5
    gammas = [r.series["ia_gamma"] for r in rows]
    assert all(a < b for a, b in zip(gammas, gammas[1:]))
    for r in rows:
        assert r.series["ia_gamma"] <= r.series["msr_gamma_d_eq_k"]
        assert r.series["ia_gamma"] == r.series["msr_gamma_d_eq_2k_minus_1"]


def test_secrecy_table():
    rows = secrecy_table(3, 1)
    assert len(rows) == 1 and rows[0].series["ia_secure"] == rows[0].series["exact_repair_bound"] == 2
    rows = secrecy_table(30, 1)
    assert [r.value for r in rows] == list(range(1, 29))
    gaps = [r.series["exact_repair_bound"] - r.series["ia_secure"] for r in rows]
    assert all(g >= 0 for g in gaps)
    last = rows[-1]
    assert last.series["ia_secure"] == 1 * (30 - last.value)


def test_csv_rendering():
    text = to_csv(secrecy_table(5, 1))
    rows = list(csv.DictReader(io.StringIO(text)))
    assert list(rows[0]) == ["l2", "ia_secure", "exact_repair_bound", "exact_repair_bound_decimal", "msr_bound"]
    assert rows[1]["exact_repair_bound"] == "32/5" and rows[1]["exact_repair_bound_decimal"] == "6.400000"
    assert to_csv([]) == ""
    assert to_csv(bandwidth_table(3)).splitlines()[0] == "k,alpha,ia_gamma,msr_gamma_d_eq_k,msr_gamma_d_eq_2k_minus_1"
