"""Built-in checks run by ``iamsr selftest``."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .iacode import build_generators, encode_stripes, params_new
from .reference import KNOWN_ERRATA, compare_with_table, corrected_coefficients, worked_example_generators
from .secrecy import enumerate_eve_models, verify_secrecy_exhaustive, verify_secrecy_rank


def check_worked_example(say: Callable[[str], None]) -> bool:
    gens = worked_example_generators()
    diffs = compare_with_table(gens)
    unexplained = [d for d in diffs if KNOWN_ERRATA.get(d[:3]) != d[3:]]
    for d in diffs:
        tag = "MISMATCH" if d in unexplained else "known erratum"
        say(f"  node {d[0]} symbol {d[1]} coefficient {d[2]}: printed {d[3]}, encoder {d[4]} ({tag})")
    rng = np.random.default_rng(0)
    u = rng.integers(0, 7, size=(100, 9))
    coded = encode_stripes(gens, u)
    want = np.einsum("mjb,sb->smj", corrected_coefficients(), u) % 7
    numeric = np.array_equal(coded, want)
    ok = not unexplained and numeric
    say(f"worked example [6,3,5] over GF(7): {'ok' if ok else 'FAILED'} "
        f"({len(diffs)} printed coefficient(s) differ, {len(unexplained)} unexplained)")
    return ok


def check_k2_oracle(say: Callable[[str], None]) -> bool:
    p = params_new(2, q_override=5)
    gens = build_generators(p)
    ok = True
    count = 0
    for eve in enumerate_eve_models(p):
        rank_ok = verify_secrecy_rank(gens, eve).perfect
        oracle_ok = verify_secrecy_exhaustive(gens, eve, max_states=5 ** 4)
        ok &= rank_ok and oracle_ok
        count += 1
    say(f"k=2 q=5 exhaustive secrecy oracle over {count} tap models: {'ok' if ok else 'FAILED'}")
    return ok


def run(say: Callable[[str], None] = print) -> bool:
    results = [check_worked_example(say), check_k2_oracle(say)]
    return all(results)
