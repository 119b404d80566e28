"""Storage/bandwidth tradeoff points and secrecy-capacity comparisons.

All arithmetic is exact (``fractions.Fraction``); decimals appear only in
CSV output.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, TextIO


@dataclass(frozen=True)
class TradeoffPoint:
    alpha: Fraction
    gamma: Fraction


@dataclass(frozen=True)
class ComparisonRow:
    variable: str
    value: int
    series: dict[str, Fraction | int] = field(default_factory=dict)


def _check_kd(k: int, d: int) -> None:
    if k < 1 or k > d:
        raise ValueError(f"need 1 <= k <= d, got k={k} d={d}")


def msr_point(B: int, k: int, d: int) -> TradeoffPoint:
    """Minimum-storage point: (B/k, (B/k) * d / (d - k + 1))."""
    _check_kd(k, d)
    a = Fraction(B, k)
    return TradeoffPoint(a, a * Fraction(d, d - k + 1))


def mbr_point(B: int, k: int, d: int) -> TradeoffPoint:
    _check_kd(k, d)
    v = Fraction(B, k) * Fraction(2 * d, 2 * d - k + 1)
    return TradeoffPoint(v, v)


def ia_repair_bandwidth(k: int) -> int:
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    return 2 * k - 1


def exact_repair_secrecy_bound(k: int, d: int, alpha: int, l1: int, l2: int) -> Fraction:
    """Secure file size bound under exact repair:
    (k - l1 - l2) * (1 - 1/(d - k + 1))**l2 * alpha."""
    if l1 < 0 or l2 < 0 or l1 + l2 >= k:
        raise ValueError(f"need l1 + l2 < k={k}, got {l1} + {l2}")
    _check_kd(k, d)
    return (k - l1 - l2) * (1 - Fraction(1, d - k + 1)) ** l2 * alpha


def ia_secrecy_capacity(k: int, l1: int, l2: int) -> int:
    """Secrecy capacity of the [2k, k, 2k-1] code (alpha = k)."""
    if l1 < 0 or l2 < 0 or l1 + l2 >= k:
        raise ValueError(f"need l1 + l2 < k={k}, got {l1} + {l2}")
    return (k - l1 - l2) * (k - l2)


def msr_secrecy_bound(k: int, alpha: int, l: int) -> int:
    """(k - l) * alpha."""
    if not 0 <= l < k:
        raise ValueError(f"need 0 <= l < k={k}, got {l}")
    return (k - l) * alpha


def bandwidth_table(k_max: int) -> list[ComparisonRow]:
    """Repair bandwidth per k: the IA code vs. a generic MSR code storing
    the same B = k**2 with d = k (worst) and d = 2k - 1 (best)."""
    if k_max < 2:
        raise ValueError(f"k_max must be >= 2, got {k_max}")
    rows = []
    for k in range(2, k_max + 1):
        B = k * k
        rows.append(ComparisonRow("k", k, {
            "alpha": k,
            "ia_gamma": ia_repair_bandwidth(k),
            "msr_gamma_d_eq_k": msr_point(B, k, k).gamma,
            "msr_gamma_d_eq_2k_minus_1": msr_point(B, k, 2 * k - 1).gamma,
        }))
    return rows


def secrecy_table(k: int, l1: int) -> list[ComparisonRow]:
    """Secure message size per l2 for the IA code vs. the exact-repair bound,
    with the plain MSR bound alongside."""
    if not 0 <= l1 < k:
        raise ValueError(f"need 0 <= l1 < k={k}, got {l1}")
    d, alpha = 2 * k - 1, k
    rows = []
    for l2 in range(1, k - l1):
        ia = ia_secrecy_capacity(k, l1, l2)
        bound = exact_repair_secrecy_bound(k, d, alpha, l1, l2)
        if ia > bound:
            raise AssertionError(f"achieved capacity {ia} exceeds bound {bound} at l2={l2}")
        rows.append(ComparisonRow("l2", l2, {
            "ia_secure": ia,
            "exact_repair_bound": bound,
            "msr_bound": msr_secrecy_bound(k, alpha, l1 + l2),
        }))
    return rows


def _fmt(v: Fraction | int) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def write_csv(rows: Sequence[ComparisonRow], out: TextIO) -> None:
    """Integers bare; any series holding a non-integer gets "p/q" plus a
    ``<name>_decimal`` column rounded to 6 places."""
    if not rows:
        return
    names = list(rows[0].series)
    rational = {n for n in names if any(Fraction(r.series[n]).denominator != 1 for r in rows)}
    header = [rows[0].variable]
    for n in names:
        header.append(n)
        if n in rational:
            header.append(f"{n}_decimal")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        line = [str(r.value)]
        for n in names:
            line.append(_fmt(r.series[n]))
            if n in rational:
                line.append(f"{float(r.series[n]):.6f}")
        w.writerow(line)


def to_csv(rows: Sequence[ComparisonRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()
