"""The [n = 2k, k, d = 2k - 1] interference-alignment MSR code.

Node ids are 1-based: nodes 1..k are systematic, k+1..n are parity.  A
message is a row vector ``u`` of ``B = k * alpha`` symbols split into k
blocks of alpha symbols; node m stores ``u @ G[m]``.

Every operation has a striped form working on a 2-D array with one
message (or node payload) per row; the single-message functions are thin
wrappers around those.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Callable, Mapping, Sequence

import numpy as np

from .cauchy import MAX_CHECK_ORDER, cauchy_canonical, verify_total_nonsingularity
from .gf import (
    FieldElement,
    Matrix,
    PrimeField,
    as_residues,
    inverse_mod,
    is_prime,
    next_prime,
    rank_mod,
    solve_mod,
)

SYSTEMATIC = "systematic"
PARITY = "parity"


class CodeError(ValueError):
    pass


@dataclass(frozen=True)
class CodeParams:
    k: int
    n: int
    d: int
    alpha: int
    beta: int
    B: int
    q: int
    epsilon: int

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.q)

    def check(self) -> None:
        """Raise CodeError unless every structural invariant holds."""
        k = self.k
        if k < 2:
            raise CodeError(f"k must be >= 2, got {k}")
        expect = dict(n=2 * k, d=2 * k - 1, alpha=k, beta=1, B=k * k)
        for name, want in expect.items():
            if getattr(self, name) != want:
                raise CodeError(f"{name}={getattr(self, name)} but k={k} requires {name}={want}")
        if not is_prime(self.q):
            raise CodeError(f"q={self.q} is not prime")
        if self.q >= 1 << 16:
            raise CodeError(f"q={self.q} exceeds the 16-bit symbol cap")
        if self.q < self.alpha + self.n - self.k or self.q < 4:
            raise CodeError(f"q={self.q} too small: need q >= {max(self.alpha + self.n - self.k, 4)}")
        e = self.epsilon % self.q
        if e == 0 or e * e % self.q == 1:
            raise CodeError(f"epsilon={self.epsilon} must satisfy eps != 0 and eps^2 != 1 mod {self.q}")

    def role(self, node_id: int) -> str:
        self.check_node(node_id)
        return SYSTEMATIC if node_id <= self.k else PARITY

    def check_node(self, node_id: int) -> None:
        if not 1 <= node_id <= self.n:
            raise CodeError(f"node id {node_id} outside 1..{self.n}")


def params_new(k: int, q_override: int | None = None, epsilon: int = 2) -> CodeParams:
    if k < 2:
        raise CodeError(f"k must be >= 2, got {k}")
    q = next_prime(max(2 * k, 5)) if q_override is None else q_override
    p = CodeParams(k=k, n=2 * k, d=2 * k - 1, alpha=k, beta=1, B=k * k, q=q, epsilon=epsilon)
    p.check()
    return p


@dataclass(frozen=True)
class NodeContent:
    node_id: int
    role: str
    symbols: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))


@dataclass(frozen=True)
class RepairDownload:
    source_id: int
    symbol_index: int
    value: int


@dataclass(frozen=True)
class RepairResult:
    node: NodeContent
    downloaded_symbols: int
    optimal: bool


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    params: CodeParams
    psi: Matrix
    generators: tuple[Matrix, ...] = dc_field(repr=False)

    def G(self, node_id: int) -> Matrix:
        self.params.check_node(node_id)
        return self.generators[node_id - 1]

    @cached_property
    def stacked(self) -> np.ndarray:
        """B x (n * alpha) int64 array: all generators side by side."""
        return np.hstack([g.array for g in self.generators])

    def columns(self, node_ids: Sequence[int]) -> np.ndarray:
        """B x (len(node_ids) * alpha) block of generator columns."""
        a = self.params.alpha
        idx = [(m - 1) * a + j for m in node_ids for j in range(a)]
        return self.stacked[:, idx]

    def psi_column(self, node_id: int) -> np.ndarray:
        return self.psi.array[:, node_id - self.params.k - 1]


def _check_psi(params: CodeParams, psi: Matrix) -> None:
    want = (params.alpha, params.n - params.k)
    if psi.shape != want:
        raise CodeError(f"psi must be {want[0]}x{want[1]}, got {psi.shape[0]}x{psi.shape[1]}")
    if psi.field.q != params.q:
        raise CodeError(f"psi is over GF({psi.field.q}), params use GF({params.q})")
    if np.any(psi.array == 0):
        raise CodeError("psi has a zero entry")
    order = min(want)
    if order > MAX_CHECK_ORDER:
        raise CodeError(f"cannot exhaustively verify a supplied psi of order {order}; omit psi to use the canonical Cauchy matrix")
    if not verify_total_nonsingularity(psi, order):
        raise CodeError("psi has a singular square submatrix")


def build_generators(params: CodeParams, psi: Matrix | None = None) -> GeneratorSet:
    """Materialize all n generator matrices.

    Systematic node l carries the identity in block l and zeros elsewhere.
    For parity node m with Cauchy column psi^(m), column j of block i is
    ``eps * psi^(m)`` when i == j and ``psi_i^(m) * e_j`` otherwise.
    """
    params.check()
    field = params.field
    if psi is None:
        psi = cauchy_canonical(field, params.alpha, params.n - params.k)
    else:
        _check_psi(params, psi)
    k, a, q, eps = params.k, params.alpha, params.q, params.epsilon
    gens = []
    for m in range(1, params.n + 1):
        g = np.zeros((params.B, a), dtype=np.int64)
        if m <= k:
            g[(m - 1) * a:m * a] = np.eye(a, dtype=np.int64)
        else:
            col = psi.array[:, m - k - 1]
            for i in range(k):
                for j in range(a):
                    if i == j:
                        g[i * a:(i + 1) * a, j] = eps * col % q
                    else:
                        g[i * a + j, j] = col[i]
        gens.append(Matrix(field, g))
    return GeneratorSet(params, psi, tuple(gens))


# --- encoding -------------------------------------------------------------


def encode_stripes(gens: GeneratorSet, messages: np.ndarray) -> np.ndarray:
    """(S, B) messages -> (S, n, alpha) node payloads."""
    p = gens.params
    messages = np.asarray(messages, dtype=np.int64)
    if messages.ndim != 2 or messages.shape[1] != p.B:
        raise CodeError(f"messages must have shape (S, {p.B}), got {messages.shape}")
    out = messages @ gens.stacked % p.q
    return out.reshape(len(messages), p.n, p.alpha)


def encode(gens: GeneratorSet, message: Sequence[int | FieldElement]) -> list[NodeContent]:
    p = gens.params
    u = as_residues(message, p.field)
    if len(u) != p.B:
        raise CodeError(f"message must have {p.B} symbols, got {len(u)}")
    coded = encode_stripes(gens, u[None, :])[0]
    return [NodeContent(m, p.role(m), coded[m - 1]) for m in range(1, p.n + 1)]


# --- reconstruction -------------------------------------------------------


def _check_contact_set(params: CodeParams, ids: Sequence[int]) -> None:
    if len(set(ids)) != len(ids):
        raise CodeError(f"duplicate node ids in {list(ids)}")
    if len(ids) != params.k:
        raise CodeError(f"need exactly k={params.k} nodes, got {len(ids)}")
    for m in ids:
        params.check_node(m)


def decoding_matrix(gens: GeneratorSet, node_ids: Sequence[int]) -> np.ndarray:
    """Inverse of the B x B matrix of the contacted nodes' generator columns.

    ``message = downloads @ decoding_matrix``, downloads ordered as node_ids.
    """
    _check_contact_set(gens.params, node_ids)
    try:
        return inverse_mod(gens.columns(node_ids), gens.params.q)
    except ArithmeticError as exc:
        raise CodeError(f"nodes {list(node_ids)} give a singular system; generator set is broken") from exc


def _reconstruct_systematic_first(gens: GeneratorSet, node_ids: Sequence[int], y: np.ndarray) -> np.ndarray:
    # Read blocks of contacted systematic nodes directly, cancel them from
    # the parity downloads, then solve only for the missing blocks.
    p = gens.params
    a, k, q = p.alpha, p.k, p.q
    S = y.shape[0]
    u = np.zeros((S, p.B), dtype=np.int64)
    pos = {m: i for i, m in enumerate(node_ids)}
    sys_ids = [m for m in node_ids if m <= k]
    par_ids = [m for m in node_ids if m > k]
    for m in sys_ids:
        u[:, (m - 1) * a:m * a] = y[:, pos[m] * a:(pos[m] + 1) * a]
    if not par_ids:
        return u
    missing = [i for i in range(1, k + 1) if i not in sys_ids]
    miss_rows = [(i - 1) * a + j for i in missing for j in range(a)]
    cols = gens.columns(par_ids)
    rhs = np.hstack([y[:, pos[m] * a:(pos[m] + 1) * a] for m in par_ids])
    rhs = (rhs - u @ cols) % q
    # u_miss @ cols[miss_rows] = rhs  <=>  cols[miss_rows].T @ u_miss.T = rhs.T
    sol = solve_mod(cols[miss_rows].T, rhs.T, q)
    u[:, miss_rows] = sol.T
    return u


def reconstruct_stripes(gens: GeneratorSet, node_ids: Sequence[int], payloads: np.ndarray,
                        shortcut: bool = True) -> np.ndarray:
    """Recover (S, B) messages from (S, k, alpha) payloads of nodes node_ids."""
    p = gens.params
    node_ids = list(node_ids)
    _check_contact_set(p, node_ids)
    y = np.asarray(payloads, dtype=np.int64).reshape(-1, p.k * p.alpha)
    if shortcut:
        try:
            return _reconstruct_systematic_first(gens, node_ids, y)
        except ArithmeticError as exc:
            raise CodeError(f"nodes {node_ids} give a singular system; generator set is broken") from exc
    return y @ decoding_matrix(gens, node_ids) % p.q


def reconstruct(gens: GeneratorSet, nodes: Sequence[NodeContent], shortcut: bool = True) -> list[FieldElement]:
    p = gens.params
    ids = [nd.node_id for nd in nodes]
    _check_contact_set(p, ids)
    for nd in nodes:
        if len(nd.symbols) != p.alpha:
            raise CodeError(f"node {nd.node_id} holds {len(nd.symbols)} symbols, expected {p.alpha}")
    y = np.array([nd.symbols for nd in nodes], dtype=np.int64)[None]
    u = reconstruct_stripes(gens, ids, y, shortcut=shortcut)[0]
    return [p.field(int(v)) for v in u]


# --- repair ---------------------------------------------------------------


def repair_plan(params: CodeParams, failed: int) -> dict[int, int]:
    """Every survivor passes its ``failed``-th symbol (1-based)."""
    params.check_node(failed)
    if failed > params.k:
        raise CodeError(f"node {failed} is a parity node; use repair_parity_fallback")
    return {m: failed for m in range(1, params.n + 1) if m != failed}


def collect_downloads(params: CodeParams, failed: int,
                      fetch: Callable[[int, int], int]) -> list[RepairDownload]:
    """Run the repair plan against ``fetch(node_id, symbol_index) -> value``."""
    return [RepairDownload(m, j, int(fetch(m, j))) for m, j in repair_plan(params, failed).items()]


def repair_systematic_stripes(gens: GeneratorSet, failed: int, downloads: np.ndarray) -> np.ndarray:
    """(S, d) downloads in survivor-id order -> (S, alpha) repaired payloads."""
    p = gens.params
    survivors = list(repair_plan(p, failed))
    D = np.asarray(downloads, dtype=np.int64)
    if D.ndim != 2 or D.shape[1] != p.d:
        raise CodeError(f"expected {p.d} downloads per stripe, got shape {D.shape}")
    col = {m: D[:, i] for i, m in enumerate(survivors)}
    sys_ids = [i for i in range(1, p.k + 1) if i != failed]
    par_ids = list(range(p.k + 1, p.n + 1))
    q = p.q
    residual = np.empty((len(D), len(par_ids)), dtype=np.int64)
    for c, m in enumerate(par_ids):
        psi = gens.psi_column(m)
        # interference from block i is aligned along e_failed: psi_i * u_{i,failed}
        r = col[m].copy()
        for i in sys_ids:
            r -= psi[i - 1] * col[i]
        residual[:, c] = r % q
    # residual = x @ (eps * Psi): solve (eps * Psi)^T x^T = residual^T
    A = p.epsilon * gens.psi.array % q
    return (residual @ inverse_mod(A, q)) % q


def repair_systematic(gens: GeneratorSet, failed: int, downloads: Sequence[RepairDownload]) -> NodeContent:
    p = gens.params
    plan = repair_plan(p, failed)
    got = {}
    for dl in downloads:
        if dl.source_id in got:
            raise CodeError(f"duplicate download from node {dl.source_id}")
        if dl.source_id not in plan:
            raise CodeError(f"unexpected download from node {dl.source_id}")
        if dl.symbol_index != plan[dl.source_id]:
            raise CodeError(f"node {dl.source_id} passed symbol {dl.symbol_index}, plan says {plan[dl.source_id]}")
        got[dl.source_id] = dl.value
    if len(got) != p.d:
        missing = sorted(set(plan) - set(got))
        raise CodeError(f"missing downloads from nodes {missing}")
    D = np.array([[got[m] for m in plan]], dtype=np.int64)
    return NodeContent(failed, SYSTEMATIC, repair_systematic_stripes(gens, failed, D)[0])


def repair_parity_fallback(gens: GeneratorSet, failed: int, nodes: Sequence[NodeContent]) -> RepairResult:
    """Rebuild a parity node by decoding from k survivors and re-encoding.

    Downloads k * alpha symbols, not the optimal d * beta.
    """
    p = gens.params
    p.check_node(failed)
    if failed <= p.k:
        raise CodeError(f"node {failed} is systematic; use repair_systematic")
    if any(nd.node_id == failed for nd in nodes):
        raise CodeError(f"node {failed} cannot help repair itself")
    u = reconstruct(gens, nodes)
    symbols = as_residues(u, p.field) @ gens.G(failed).array % p.q
    return RepairResult(NodeContent(failed, PARITY, symbols), p.k * p.alpha, optimal=False)


def interference_ranks(gens: GeneratorSet, failed: int) -> dict[int, int]:
    """Rank of each message block's share of the repair downloads.

    Blocks other than ``failed`` should have rank 1 (aligned interference);
    the failed block should have full rank alpha.
    """
    p = gens.params
    a = p.alpha
    cols = np.stack([gens.G(m).array[:, j - 1] for m, j in repair_plan(p, failed).items()], axis=1)
    return {i: rank_mod(cols[(i - 1) * a:i * a], p.q) for i in range(1, p.k + 1)}


def cutset_validate(params: CodeParams) -> bool:
    return params.B <= sum(min(params.alpha, (params.d - i) * params.beta) for i in range(params.k))


def nodes_by_id(nodes: Sequence[NodeContent] | Mapping[int, NodeContent]) -> dict[int, NodeContent]:
    if isinstance(nodes, Mapping):
        return dict(nodes)
    return {nd.node_id: nd for nd in nodes}
