"""Secure (coset-padded) encoding against a passive (l1, l2) eavesdropper.

The eavesdropper reads the stored content of the nodes in ``e1`` and every
repair download of the systematic nodes in ``e2``.  ``R`` message
positions are filled with uniform random symbols and the remaining
``B - R`` carry the secret.  Which positions get the randomness is a
:class:`SecureLayout`; the default ``"observed"`` layout puts it exactly
on a basis of the positions the taps see, which is what makes the
padding hide the secret.  ``"sequential"`` (random first, secret last, no
regard for the taps) is kept for comparison and generally leaks.

Secrecy is decided two ways.  :func:`verify_secrecy_rank` is the linear
algebra criterion: with observation matrix ``H = [H_r | H_u]`` (columns
for random and secret symbols) the taps are independent of the secret iff
``rank(H) == rank(H_r)``.  :func:`verify_secrecy_exhaustive` enumerates
every secret and every random vector, runs the real encoder and tap
simulation, and compares the induced observation distributions.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .gf import FieldElement, Matrix, as_residues, rank_mod, rref
from .iacode import (
    CodeParams,
    GeneratorSet,
    NodeContent,
    encode_stripes,
    nodes_by_id,
    reconstruct_stripes,
    repair_plan,
)


class SecrecyError(ValueError):
    pass


# --- capacity formulas ------------------------------------------------------


def _check_taps(params: CodeParams, l1: int, l2: int) -> None:
    if l1 < 0 or l2 < 0:
        raise SecrecyError(f"tap counts must be non-negative, got l1={l1} l2={l2}")
    if l1 + l2 >= params.k:
        raise SecrecyError(f"need l1 + l2 < k={params.k}, got {l1} + {l2}")


def secrecy_capacity(params: CodeParams, l1: int, l2: int) -> int:
    """Secret symbols per codeword: (k - l1 - l2) * (alpha - l2)."""
    _check_taps(params, l1, l2)
    return (params.k - l1 - l2) * (params.alpha - l2)


def random_symbol_count(params: CodeParams, l1: int, l2: int) -> int:
    _check_taps(params, l1, l2)
    direct = (l1 + l2) * params.alpha + (params.k - l1 - l2) * l2
    by_difference = params.B - secrecy_capacity(params, l1, l2)
    if direct != by_difference:
        raise SecrecyError(f"random symbol counts disagree: {direct} != {by_difference}")
    return direct


def observed_symbol_count(params: CodeParams, l1: int, l2: int) -> int:
    """Upper bound on independent symbols seen by an (l1, l2) eavesdropper."""
    _check_taps(params, l1, l2)
    return l1 * params.alpha + (params.n - l2) * params.beta * l2 - params.beta * l1 * l2


def capacity_identity_check(params: CodeParams, l1: int, l2: int) -> bool:
    """B minus the observable symbols equals the secrecy capacity."""
    return params.alpha * params.k - observed_symbol_count(params, l1, l2) == secrecy_capacity(params, l1, l2)


@dataclass(frozen=True)
class UpperBounds:
    general: int
    msr: int


def upper_bounds(params: CodeParams, l: int) -> UpperBounds:
    if not 0 <= l < params.k:
        raise SecrecyError(f"need 0 <= l < k={params.k}, got {l}")
    general = sum(min(params.alpha, (params.d - i) * params.beta) for i in range(l, params.k))
    return UpperBounds(general=general, msr=(params.k - l) * params.alpha)


# --- eavesdropper model -----------------------------------------------------


@dataclass(frozen=True)
class EveModel:
    e1: frozenset[int] = frozenset()
    e2: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "e1", frozenset(int(m) for m in self.e1))
        object.__setattr__(self, "e2", frozenset(int(m) for m in self.e2))

    @property
    def l1(self) -> int:
        return len(self.e1)

    @property
    def l2(self) -> int:
        return len(self.e2)

    def validate(self, params: CodeParams) -> None:
        for m in self.e1 | self.e2:
            if not 1 <= m <= params.n:
                raise SecrecyError(f"tapped node {m} outside 1..{params.n}")
        if self.e1 & self.e2:
            raise SecrecyError(f"storage and repair taps overlap on {sorted(self.e1 & self.e2)}")
        if self.l1 + self.l2 >= params.k:
            raise SecrecyError(f"need |e1| + |e2| < k={params.k}, got {self.l1} + {self.l2}")
        bad = sorted(m for m in self.e2 if m > params.k)
        if bad:
            raise SecrecyError(f"repair taps are only modelled on systematic nodes, got {bad}")


def default_eve(params: CodeParams, l1: int, l2: int) -> EveModel:
    """Storage taps on the first l1 systematic nodes, repair taps on the last l2."""
    _check_taps(params, l1, l2)
    return EveModel(range(1, l1 + 1), range(params.k - l2 + 1, params.k + 1))


def enumerate_eve_models(params: CodeParams) -> Iterator[EveModel]:
    """Every valid (e1, e2): e2 among systematic nodes, e1 among all others."""
    k, n = params.k, params.n
    for l2 in range(k):
        for e2 in combinations(range(1, k + 1), l2):
            rest = [m for m in range(1, n + 1) if m not in e2]
            for l1 in range(k - l2):
                for e1 in combinations(rest, l1):
                    yield EveModel(e1, e2)


# --- taps -----------------------------------------------------------------


def tap_schedule(params: CodeParams, eve: EveModel) -> list[tuple]:
    """What each observed symbol is, in observation order.

    ``("stored", m, j)`` for symbol j of a storage-tapped node m, then
    ``("repair", l, m, j)`` for the download from node m during the repair
    of node l.  Symbol indices are 1-based.
    """
    eve.validate(params)
    sched: list[tuple] = []
    for m in sorted(eve.e1):
        sched.extend(("stored", m, j) for j in range(1, params.alpha + 1))
    for ell in sorted(eve.e2):
        sched.extend(("repair", ell, m, j) for m, j in repair_plan(params, ell).items())
    return sched


def eavesdrop_stripes(params: CodeParams, eve: EveModel, payloads: np.ndarray) -> np.ndarray:
    """(S, n, alpha) node payloads -> (S, n_obs) tapped values."""
    payloads = np.asarray(payloads)
    cols = []
    for entry in tap_schedule(params, eve):
        m, j = entry[-2], entry[-1]
        cols.append(payloads[:, m - 1, j - 1])
    if not cols:
        return np.zeros((payloads.shape[0], 0), dtype=np.int64)
    return np.stack(cols, axis=1).astype(np.int64)


def eavesdrop(gens: GeneratorSet, eve: EveModel,
              nodes: Sequence[NodeContent] | Mapping[int, NodeContent]) -> list[FieldElement]:
    p = gens.params
    by_id = nodes_by_id(nodes)
    field = p.field
    out = []
    for entry in tap_schedule(p, eve):
        m, j = entry[-2], entry[-1]
        if m not in by_id:
            raise SecrecyError(f"tap needs node {m}, which was not supplied")
        out.append(field(by_id[m].symbols[j - 1]))
    return out


def _tap_functionals(gens: GeneratorSet, eve: EveModel) -> tuple[np.ndarray, list[tuple]]:
    """Rows of functionals on the B message positions, one per observed symbol."""
    p = gens.params
    sched = tap_schedule(p, eve)
    if not sched:
        return np.zeros((0, p.B), dtype=np.int64), sched
    rows = [gens.G(e[-2]).array[:, e[-1] - 1] for e in sched]
    return np.stack(rows), sched


# --- layouts --------------------------------------------------------------


@dataclass(frozen=True)
class SecureLayout:
    """0-based message positions carrying the random and the secret symbols."""
    random_positions: tuple[int, ...]
    secret_positions: tuple[int, ...]

    @property
    def R(self) -> int:
        return len(self.random_positions)

    @property
    def secret_size(self) -> int:
        return len(self.secret_positions)

    @property
    def order(self) -> list[int]:
        """Message position of each symbol of the combined (rand, secret) vector."""
        return list(self.random_positions) + list(self.secret_positions)

    def scatter(self, combined: np.ndarray) -> np.ndarray:
        combined = np.asarray(combined, dtype=np.int64)
        out = np.zeros(combined.shape[:-1] + (len(self.order),), dtype=np.int64)
        out[..., self.order] = combined
        return out

    def gather(self, messages: np.ndarray) -> np.ndarray:
        return np.asarray(messages)[..., self.order]


def secure_layout(gens: GeneratorSet, eve: EveModel, random_count: int | None = None,
                  strategy: str = "observed") -> SecureLayout:
    """Choose the random positions for a given tap model.

    ``observed``: a column basis of the tap functionals (leftmost first),
    topped up with the lowest unused positions.  Raises SecrecyError when
    the taps see more than ``random_count`` dimensions.
    ``sequential``: positions 0..R-1 regardless of the taps.
    """
    p = gens.params
    eve.validate(p)
    R = random_symbol_count(p, eve.l1, eve.l2) if random_count is None else random_count
    if not 0 <= R <= p.B:
        raise SecrecyError(f"random symbol count must lie in 0..{p.B}, got {R}")
    if strategy == "sequential":
        rand = list(range(R))
    elif strategy == "observed":
        H, _ = _tap_functionals(gens, eve)
        pivots = rref(H, p.q)[1] if len(H) else []
        if len(pivots) > R:
            raise SecrecyError(f"taps observe {len(pivots)} independent symbols but only {R} are random")
        rand = list(pivots)
        rand += [i for i in range(p.B) if i not in set(pivots)][:R - len(rand)]
    else:
        raise ValueError(f"unknown layout strategy {strategy!r}")
    rand = sorted(rand)
    taken = set(rand)
    return SecureLayout(tuple(rand), tuple(i for i in range(p.B) if i not in taken))


# --- secure encode/decode ---------------------------------------------------


@dataclass(frozen=True)
class SecureMessage:
    secret: tuple[int, ...]
    rand: tuple[int, ...]
    layout: SecureLayout

    @property
    def combined(self) -> tuple[int, ...]:
        return self.rand + self.secret

    @property
    def message(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self.layout.scatter(self.combined))


def draw_random(q: int, shape, rng: np.random.Generator | None = None) -> np.ndarray:
    """Uniform symbols; ``rng=None`` draws from OS entropy."""
    rng = np.random.default_rng() if rng is None else rng
    return rng.integers(0, q, size=shape, dtype=np.int64)


def secure_encode_stripes(gens: GeneratorSet, layout: SecureLayout, secrets: np.ndarray,
                          rng: np.random.Generator | None = None,
                          rand: np.ndarray | None = None) -> np.ndarray:
    """(S, secret_size) secrets -> (S, n, alpha); fresh randomness per stripe."""
    p = gens.params
    secrets = np.asarray(secrets, dtype=np.int64)
    if secrets.ndim == 1:
        secrets = secrets[None, :]
    if secrets.shape[1] != layout.secret_size:
        raise SecrecyError(f"secrets must have {layout.secret_size} symbols per stripe, got {secrets.shape[1]}")
    if rand is None:
        rand = draw_random(p.q, (len(secrets), layout.R), rng)
    rand = np.asarray(rand, dtype=np.int64).reshape(len(secrets), layout.R)
    return encode_stripes(gens, layout.scatter(np.hstack([rand, secrets])))


def secure_encode(gens: GeneratorSet, eve: EveModel, secret: Sequence[int | FieldElement],
                  rng: np.random.Generator | None = None, *,
                  rand: Sequence[int] | None = None,
                  layout: SecureLayout | None = None) -> tuple[list[NodeContent], SecureMessage]:
    p = gens.params
    layout = secure_layout(gens, eve) if layout is None else layout
    s = as_residues(secret, p.field)
    if len(s) != layout.secret_size:
        raise SecrecyError(f"secret must have {layout.secret_size} symbols, got {len(s)}")
    if rand is None:
        r = draw_random(p.q, layout.R, rng)
    else:
        r = as_residues(rand, p.field)
        if len(r) != layout.R:
            raise SecrecyError(f"need {layout.R} random symbols, got {len(r)}")
    coded = secure_encode_stripes(gens, layout, s[None, :], rand=r[None, :])[0]
    nodes = [NodeContent(m, p.role(m), coded[m - 1]) for m in range(1, p.n + 1)]
    return nodes, SecureMessage(tuple(int(v) for v in s), tuple(int(v) for v in r), layout)


def secure_decode(gens: GeneratorSet, eve: EveModel, nodes: Sequence[NodeContent],
                  layout: SecureLayout | None = None) -> list[FieldElement]:
    p = gens.params
    layout = secure_layout(gens, eve) if layout is None else layout
    ids = [nd.node_id for nd in nodes]
    y = np.array([nd.symbols for nd in nodes], dtype=np.int64)[None]
    u = reconstruct_stripes(gens, ids, y)[0]
    return [p.field(int(v)) for v in u[list(layout.secret_positions)]]


# --- observation matrix & verifiers -----------------------------------------


@dataclass(frozen=True, eq=False)
class ObservationMatrix:
    """Tapped functionals in (rand, secret) coordinates: values = H @ combined."""
    H: Matrix
    R: int
    labels: tuple[tuple, ...]

    @property
    def rand_block(self) -> Matrix:
        return Matrix(self.H.field, self.H.array[:, :self.R])

    @property
    def secret_block(self) -> Matrix:
        return Matrix(self.H.field, self.H.array[:, self.R:])

    def independent(self) -> ObservationMatrix:
        """Drop every row already in the span of the rows before it."""
        if self.H.rows == 0:
            return self
        keep = rref(self.H.array.T, self.H.field.q)[1]
        return ObservationMatrix(Matrix(self.H.field, self.H.array[keep]), self.R,
                                 tuple(self.labels[i] for i in keep))

    @property
    def redundant_count(self) -> int:
        return self.H.rows - self.independent().H.rows


def observation_matrix(gens: GeneratorSet, eve: EveModel,
                       layout: SecureLayout | None = None) -> ObservationMatrix:
    p = gens.params
    layout = secure_layout(gens, eve) if layout is None else layout
    H, sched = _tap_functionals(gens, eve)
    return ObservationMatrix(Matrix(p.field, H[:, layout.order]), layout.R, tuple(sched))


@dataclass(frozen=True)
class SecrecyReport:
    R: int
    rank_full: int
    rank_rand: int
    step1: bool
    step2: bool
    leakage_dims: int
    perfect: bool

    def lines(self) -> list[str]:
        return [
            f"random symbols R: {self.R}",
            f"rank(H): {self.rank_full}",
            f"rank(H_rand): {self.rank_rand}",
            f"randomness recoverable given secret: {str(self.step1).lower()}",
            f"observations bounded by randomness: {str(self.step2).lower()}",
            f"leaked dimensions: {self.leakage_dims}",
            f"perfect: {str(self.perfect).lower()}",
        ]


def verify_secrecy_rank(gens: GeneratorSet, eve: EveModel,
                        layout: SecureLayout | None = None) -> SecrecyReport:
    obs = observation_matrix(gens, eve, layout)
    q = gens.params.q
    rank_full = rank_mod(obs.H.array, q)
    rank_rand = rank_mod(obs.rand_block.array, q)
    leak = rank_full - rank_rand
    return SecrecyReport(R=obs.R, rank_full=rank_full, rank_rand=rank_rand,
                         step1=rank_rand == obs.R, step2=rank_full <= obs.R,
                         leakage_dims=leak, perfect=leak == 0)


def verify_secrecy_exhaustive(gens: GeneratorSet, eve: EveModel, max_states: int,
                              layout: SecureLayout | None = None) -> bool:
    """Definitional check: every secret induces the same observation multiset."""
    p = gens.params
    layout = secure_layout(gens, eve) if layout is None else layout
    states = p.q ** p.B
    if states > max_states:
        raise SecrecyError(f"{states} states exceed max_states={max_states}; shrink the parameters")
    vectors = list(product(range(p.q), repeat=layout.R))
    rand = np.array(vectors, dtype=np.int64).reshape(len(vectors), layout.R)
    reference = None
    for secret in product(range(p.q), repeat=layout.secret_size):
        s = np.tile(np.array(secret, dtype=np.int64), (len(rand), 1))
        payloads = secure_encode_stripes(gens, layout, s, rand=rand)
        seen = Counter(map(tuple, eavesdrop_stripes(p, eve, payloads).tolist()))
        if reference is None:
            reference = seen
        elif seen != reference:
            return False
    return True


def sweep_secrecy(gens: GeneratorSet, models: Iterable[EveModel] | None = None) -> list[tuple[EveModel, SecrecyReport]]:
    models = enumerate_eve_models(gens.params) if models is None else models
    return [(eve, verify_secrecy_rank(gens, eve)) for eve in models]
