"""The published [6, 3, 5] example over GF(7), transcribed verbatim.

Message order is (r1, ..., r7, a8, a9).  Psi comes from xs=(0, 1, 2),
ys=(4, 5, 6) and epsilon = 2.  Each entry is the printed expression for one
stored symbol, with the three per-block cells joined by "+".
"""

from __future__ import annotations

import re

import numpy as np

from .cauchy import WORKED_EXAMPLE_SEQUENCE, cauchy_build
from .iacode import GeneratorSet, build_generators, params_new

SYMBOL_NAMES = ("r1", "r2", "r3", "r4", "r5", "r6", "r7", "a8", "a9")

# node id -> (symbol 1, symbol 2, symbol 3)
WORKED_EXAMPLE_TABLE: dict[int, tuple[str, str, str]] = {
    1: ("r1", "r2", "r3"),
    2: ("r4", "r5", "r6"),
    3: ("r7", "a8", "a9"),
    4: ("3r1+4r2+6r3 + 2r4+0+0 + 3r7+0+0",
        "0+5r2+0 + 3r4+4r5+5r6 + 0+3a8+0",
        "0+0+5r3 + 0+0+2r6 + 3r7+4a8+6a9"),
    5: ("r1+3r2+4r3 + 5r4+0+0 + 2r7+0+0",
        "0+4r2+0 + r4+3r5+4r6 + 0+2a8+0",
        "0+0+4r3 + 0+0+5r6 + r7+3a8+4a9"),
    6: ("2r1+r2+3r3 + 4r4+0+0 + 5r7+0+0",
        "0+r2+0 + 2r4+r5+3r6 + 0+5a8+0",
        "0+0+r3 + 0+0+4r6 + 2r7+a8+3a9"),
}

# (node, symbol, message index) -> (printed, implied by the construction).
# Block 2 of node 4's second symbol is eps * psi^(4) = 2 * (5, 2, 3) = (3, 4, 6),
# so the r6 coefficient is 6; the table prints 5.
KNOWN_ERRATA: dict[tuple[int, int, int], tuple[int, int]] = {
    (4, 2, 6): (5, 6),
}

_TERM = re.compile(r"^(\d*)([ra])(\d+)$")


def parse_expression(expr: str, q: int = 7) -> np.ndarray:
    """Coefficient vector over SYMBOL_NAMES for an expression like '3r1+r2+0'."""
    coeffs = np.zeros(len(SYMBOL_NAMES), dtype=np.int64)
    for term in expr.replace(" ", "").split("+"):
        if term == "0":
            continue
        m = _TERM.match(term)
        if not m:
            raise ValueError(f"cannot parse term {term!r}")
        name = m.group(2) + m.group(3)
        coeffs[SYMBOL_NAMES.index(name)] += int(m.group(1) or 1)
    return coeffs % q


def printed_coefficients() -> np.ndarray:
    """(6, 3, 9) coefficients exactly as printed."""
    return np.array([[parse_expression(e) for e in WORKED_EXAMPLE_TABLE[m]] for m in range(1, 7)])


def corrected_coefficients() -> np.ndarray:
    out = printed_coefficients()
    for (m, j, i), (_, fixed) in KNOWN_ERRATA.items():
        out[m - 1, j - 1, i - 1] = fixed
    return out


def worked_example_generators() -> GeneratorSet:
    p = params_new(3, q_override=7, epsilon=2)
    return build_generators(p, cauchy_build(p.field, WORKED_EXAMPLE_SEQUENCE))


def encoder_coefficients(gens: GeneratorSet) -> np.ndarray:
    """(n, alpha, B): coefficient of each message symbol in each stored symbol."""
    return np.stack([g.array.T for g in gens.generators])


def compare_with_table(gens: GeneratorSet | None = None) -> list[tuple[int, int, int, int, int]]:
    """Every (node, symbol, message index, printed, encoder) disagreement."""
    gens = worked_example_generators() if gens is None else gens
    got = encoder_coefficients(gens)
    want = printed_coefficients()
    return [(int(m) + 1, int(j) + 1, int(i) + 1, int(want[m, j, i]), int(got[m, j, i]))
            for m, j, i in zip(*np.nonzero(got != want))]
