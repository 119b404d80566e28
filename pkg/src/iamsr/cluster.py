"""A directory of node files plus a manifest, and the operations on it."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cauchy import InjectiveSequence, cauchy_build
from .iacode import (
    CodeError,
    CodeParams,
    GeneratorSet,
    build_generators,
    encode_stripes,
    reconstruct_stripes,
    repair_plan,
    repair_systematic_stripes,
)
from .secrecy import (
    EveModel,
    SecureLayout,
    observation_matrix,
    secure_encode_stripes,
    secure_layout,
    tap_schedule,
    verify_secrecy_exhaustive,
    verify_secrecy_rank,
)
from .storage import (
    ClusterManifest,
    ManifestError,
    NodeFile,
    atomic_write,
    egest,
    parse_node,
    sha256,
)

MANIFEST_NAME = "manifest.txt"


class ClusterError(RuntimeError):
    pass


def node_path(directory: str | os.PathLike, node_id: int) -> Path:
    return Path(directory) / f"node-{node_id:05d}.bin"


@dataclass
class Cluster:
    directory: Path
    manifest: ClusterManifest
    gens: GeneratorSet
    layout: SecureLayout

    @property
    def params(self) -> CodeParams:
        return self.gens.params

    def available(self) -> list[int]:
        return [m for m in range(1, self.params.n + 1) if node_path(self.directory, m).exists()]

    def read(self, node_id: int) -> NodeFile:
        path = node_path(self.directory, node_id)
        if not path.exists():
            raise ClusterError(f"node {node_id} is missing ({path.name})")
        raw = path.read_bytes()
        want = self.manifest.checksums.get(node_id)
        if want is not None and sha256(raw) != want:
            raise ClusterError(f"node {node_id} fails its checksum")
        nf = parse_node(raw, q=self.params.q, alpha=self.params.alpha)
        if nf.node_id != node_id:
            raise ClusterError(f"{path.name} claims node id {nf.node_id}")
        if nf.stripes != self.manifest.stripes:
            raise ClusterError(f"node {node_id} has {nf.stripes} stripes, manifest says {self.manifest.stripes}")
        return nf

    def write(self, node_id: int, payload: np.ndarray) -> bytes:
        nf = NodeFile(node_id, self.params.role(node_id), np.asarray(payload, dtype=np.uint16))
        raw = nf.to_bytes()
        atomic_write(node_path(self.directory, node_id), raw)
        return raw


def _layout_for(gens: GeneratorSet, mode: str, eve: EveModel | None) -> SecureLayout:
    if mode == "secure":
        return secure_layout(gens, eve)
    return SecureLayout((), tuple(range(gens.params.B)))


def create_cluster(directory: str | os.PathLike, params: CodeParams, psi_seq: InjectiveSequence,
                   stripes: np.ndarray, length: int, mode: str = "plain", payload: str = "bytes",
                   eve: EveModel | None = None, rng: np.random.Generator | None = None) -> Cluster:
    """Encode (S, width) stripes and write n node files plus the manifest.

    Secure mode draws fresh random symbols for every stripe.
    """
    params.check()
    gens = build_generators(params, cauchy_build(params.field, psi_seq))
    if mode == "secure":
        if eve is None:
            raise CodeError("secure mode needs an eavesdropper model")
        eve.validate(params)
    layout = _layout_for(gens, mode, eve)
    manifest = ClusterManifest(
        k=params.k, n=params.n, d=params.d, alpha=params.alpha, beta=params.beta, q=params.q,
        epsilon=params.epsilon, psi_xs=psi_seq.xs, psi_ys=psi_seq.ys, stripes=len(stripes),
        length=length, mode=mode, payload=payload,
        l1=eve.l1 if eve else 0, l2=eve.l2 if eve else 0,
        e1=tuple(sorted(eve.e1)) if eve else (), e2=tuple(sorted(eve.e2)) if eve else (),
        random_positions=layout.random_positions,
    )
    manifest.validate()
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if mode == "secure":
        coded = secure_encode_stripes(gens, layout, stripes, rng=rng)
    else:
        coded = encode_stripes(gens, stripes)
    cluster = Cluster(directory, manifest, gens, layout)
    for m in range(1, params.n + 1):
        manifest.checksums[m] = sha256(cluster.write(m, coded[:, m - 1, :]))
    atomic_write(directory / MANIFEST_NAME, manifest.to_text().encode("utf-8"))
    return cluster


def open_cluster(directory: str | os.PathLike) -> Cluster:
    directory = Path(directory)
    path = directory / MANIFEST_NAME
    if not path.exists():
        raise ClusterError(f"no manifest in {directory}")
    manifest = ClusterManifest.from_text(path.read_text("utf-8"))
    params = manifest.params
    gens = build_generators(params, cauchy_build(params.field, InjectiveSequence(manifest.psi_xs, manifest.psi_ys)))
    layout = _layout_for(gens, manifest.mode, manifest.eve)
    if layout.random_positions != manifest.random_positions:
        raise ManifestError("recorded random positions do not match the tap model")
    return Cluster(directory, manifest, gens, layout)


def read_payloads(cluster: Cluster, node_ids) -> np.ndarray:
    """(S, len(node_ids), alpha) int64 payloads."""
    if not node_ids:
        return np.zeros((cluster.manifest.stripes, 0, cluster.params.alpha), dtype=np.int64)
    return np.stack([cluster.read(m).symbols.astype(np.int64) for m in node_ids], axis=1)


def reconstruct_cluster(cluster: Cluster, node_ids) -> bytes | list[int]:
    node_ids = list(node_ids)
    messages = reconstruct_stripes(cluster.gens, node_ids, read_payloads(cluster, node_ids))
    return egest(cluster.layout.gather(messages)[:, cluster.layout.R:], cluster.manifest)


def fail_node(cluster: Cluster, node_id: int) -> None:
    cluster.params.check_node(node_id)
    path = node_path(cluster.directory, node_id)
    if not path.exists():
        raise ClusterError(f"node {node_id} is already missing")
    path.unlink()


@dataclass(frozen=True)
class RepairReport:
    node_id: int
    symbols_per_stripe: int
    optimal: bool
    sources: tuple[int, ...]

    def describe(self) -> str:
        if self.optimal:
            return f"repaired node {self.node_id}: downloaded {self.symbols_per_stripe} symbols/stripe"
        return (f"repaired node {self.node_id}: downloaded {self.symbols_per_stripe} symbols/stripe"
                " - suboptimal fallback")


def repair_cluster(cluster: Cluster, node_id: int) -> RepairReport:
    """Exact repair of a lost systematic node from all d survivors; parity
    nodes (or any loss with other nodes also missing) fall back to decoding
    from k survivors and re-encoding."""
    p = cluster.params
    p.check_node(node_id)
    if node_path(cluster.directory, node_id).exists():
        raise ClusterError(f"node {node_id} is present; nothing to repair")
    avail = cluster.available()
    if node_id <= p.k and len(avail) == p.d:
        plan = repair_plan(p, node_id)
        # one symbol per survivor per stripe
        downloads = np.stack([cluster.read(m).symbols[:, j - 1].astype(np.int64) for m, j in plan.items()], axis=1)
        repaired = repair_systematic_stripes(cluster.gens, node_id, downloads)
        report = RepairReport(node_id, downloads.shape[1], True, tuple(plan))
    else:
        if len(avail) < p.k:
            raise ClusterError(f"only {len(avail)} nodes survive; need k={p.k}")
        sources = avail[:p.k]
        messages = reconstruct_stripes(cluster.gens, sources, read_payloads(cluster, sources))
        repaired = messages @ cluster.gens.G(node_id).array % p.q
        report = RepairReport(node_id, p.k * p.alpha, False, tuple(sources))
    raw = cluster.write(node_id, repaired)
    want = cluster.manifest.checksums.get(node_id)
    if want is not None and sha256(raw) != want:
        raise ClusterError(f"repaired node {node_id} does not match its recorded checksum")
    return report


def eavesdrop_cluster(cluster: Cluster, eve: EveModel, stripe: int = 0) -> dict:
    """Tapped values for one stripe plus the functionals that produce them.

    Matrix columns are the (random, secret) symbols of the stripe's combined
    message; in plain mode every column is a message symbol.
    """
    p = cluster.params
    if not 0 <= stripe < cluster.manifest.stripes:
        raise ClusterError(f"stripe {stripe} outside 0..{cluster.manifest.stripes - 1}")
    sched = tap_schedule(p, eve)
    needed = sorted({e[-2] for e in sched})
    nodes = {m: cluster.read(m).symbols[stripe] for m in needed}
    values = [int(nodes[e[-2]][e[-1] - 1]) for e in sched]
    obs = observation_matrix(cluster.gens, eve, cluster.layout)
    return {
        "stripe": stripe,
        "q": p.q,
        "e1": sorted(eve.e1),
        "e2": sorted(eve.e2),
        "random_symbols": obs.R,
        "labels": ["-".join(map(str, e)) for e in sched],
        "values": values,
        "matrix": obs.H.tolist(),
    }


def dump_json(obj: dict, path: str | os.PathLike) -> None:
    atomic_write(path, (json.dumps(obj, indent=1) + "\n").encode("utf-8"))


def verify_cluster(cluster: Cluster, eve: EveModel, exhaustive: bool = False,
                   max_states: int = 1 << 20):
    report = verify_secrecy_rank(cluster.gens, eve, cluster.layout)
    oracle = None
    if exhaustive:
        oracle = verify_secrecy_exhaustive(cluster.gens, eve, max_states, cluster.layout)
    return report, oracle
