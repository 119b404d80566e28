"""Cauchy matrices over prime fields and a brute-force check that every
square submatrix is nonsingular."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .gf import Matrix, PrimeField, rank_mod

MAX_CHECK_ORDER = 8


@dataclass(frozen=True)
class InjectiveSequence:
    xs: tuple[int, ...]
    ys: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(int(x) for x in self.xs))
        object.__setattr__(self, "ys", tuple(int(y) for y in self.ys))

    def validate(self, field: PrimeField) -> None:
        values = [v % field.q for v in self.xs + self.ys]
        if len(self.xs) + len(self.ys) > field.q:
            raise ValueError(
                f"{len(self.xs)}+{len(self.ys)} points do not fit in GF({field.q})")
        if len(set(values)) != len(values):
            raise ValueError(f"xs and ys must be pairwise distinct mod {field.q}: {self.xs} {self.ys}")


# xs/ys that reproduce the 3x3 matrix [[5,4,1],[2,5,4],[3,2,5]] over GF(7)
# used in the worked [6, 3, 5] example.
WORKED_EXAMPLE_SEQUENCE = InjectiveSequence((0, 1, 2), (4, 5, 6))


def cauchy_build(field: PrimeField, seq: InjectiveSequence) -> Matrix:
    """s x t matrix with entry (i, j) = 1 / (x_i - y_j)."""
    seq.validate(field)
    q = field.q
    out = np.zeros((len(seq.xs), len(seq.ys)), dtype=np.int64)
    for i, x in enumerate(seq.xs):
        for j, y in enumerate(seq.ys):
            out[i, j] = pow((x - y) % q, -1, q)
    return Matrix(field, out)


def cauchy_canonical(field: PrimeField, s: int, t: int) -> Matrix:
    if s < 0 or t < 0:
        raise ValueError("dimensions must be non-negative")
    if s + t > field.q:
        raise ValueError(f"a {s}x{t} Cauchy matrix needs q >= {s + t}, got {field.q}")
    return cauchy_build(field, InjectiveSequence(range(s), range(s, s + t)))


def verify_total_nonsingularity(m: Matrix, max_order: int) -> bool:
    """True iff every square submatrix of order <= max_order is nonsingular.

    Exhaustive over row/column subsets, so the order is capped at
    ``MAX_CHECK_ORDER``.
    """
    if max_order > MAX_CHECK_ORDER:
        raise ValueError(f"exhaustive check limited to order <= {MAX_CHECK_ORDER}, got {max_order}")
    a = m.array
    q = m.field.q
    for r in range(1, min(max_order, m.rows, m.cols) + 1):
        for rows in combinations(range(m.rows), r):
            sub_rows = a[list(rows)]
            for cols in combinations(range(m.cols), r):
                if rank_mod(sub_rows[:, list(cols)], q) != r:
                    return False
    return True
