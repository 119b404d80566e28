"""On-disk node files, the cluster manifest, and payload <-> stripe mapping.

Node file layout (little-endian)::

    magic    6 bytes   b"IAMSR1"
    version  1 byte
    node id  2 bytes
    role     1 byte    0 systematic, 1 parity
    stripes  4 bytes
    symbols  stripes * alpha * 2 bytes, stripe-major

The manifest is UTF-8 ``key=value`` text, one key per line, keys sorted.
"""

from __future__ import annotations

import hashlib
import os
import struct
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .iacode import PARITY, SYSTEMATIC, CodeError, CodeParams
from .secrecy import EveModel, secrecy_capacity

MAGIC = b"IAMSR1"
FORMAT_VERSION = 1
HEADER = struct.Struct("<6sBHBI")
ROLE_CODES = {SYSTEMATIC: 0, PARITY: 1}
ROLE_NAMES = {v: k for k, v in ROLE_CODES.items()}
BYTE_Q_MIN = 257


class NodeFormatError(ValueError):
    pass


class ManifestError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class NodeFile:
    node_id: int
    role: str
    symbols: np.ndarray  # (stripes, alpha)
    version: int = FORMAT_VERSION

    @property
    def stripes(self) -> int:
        return self.symbols.shape[0]

    def to_bytes(self) -> bytes:
        if self.role not in ROLE_CODES:
            raise NodeFormatError(f"unknown role {self.role!r}")
        head = HEADER.pack(MAGIC, self.version, self.node_id, ROLE_CODES[self.role], self.stripes)
        return head + np.ascontiguousarray(self.symbols, dtype="<u2").tobytes()

    def __eq__(self, other):
        if not isinstance(other, NodeFile):
            return NotImplemented
        return (self.node_id, self.role, self.version) == (other.node_id, other.role, other.version) \
            and np.array_equal(self.symbols, other.symbols)


def atomic_write(path: str | os.PathLike, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_node(path: str | os.PathLike, node: NodeFile) -> NodeFile:
    atomic_write(path, node.to_bytes())
    return node


def parse_node(raw: bytes, q: int | None = None, alpha: int | None = None) -> NodeFile:
    if len(raw) < HEADER.size:
        raise NodeFormatError(f"truncated header: {len(raw)} < {HEADER.size} bytes")
    magic, version, node_id, role, stripes = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise NodeFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != FORMAT_VERSION:
        raise NodeFormatError(f"unsupported format version {version}")
    if role not in ROLE_NAMES:
        raise NodeFormatError(f"bad role byte {role}")
    body = raw[HEADER.size:]
    if len(body) % 2:
        raise NodeFormatError("truncated symbol payload (odd byte count)")
    count = len(body) // 2
    if alpha is None:
        if stripes and count % stripes:
            raise NodeFormatError(f"{count} symbols do not split into {stripes} stripes")
        alpha = count // stripes if stripes else 0
    if count != stripes * alpha:
        raise NodeFormatError(f"truncated payload: {count} symbols, expected {stripes} x {alpha}")
    sym = np.frombuffer(body, dtype="<u2").astype(np.uint16)
    if q is not None and count:
        bad = np.flatnonzero(sym >= q)
        if bad.size:
            i = int(bad[0])
            raise NodeFormatError(
                f"symbol {i} (byte offset {HEADER.size + 2 * i}) has value {int(sym[i])} >= q={q}")
    return NodeFile(node_id, ROLE_NAMES[role], sym.reshape(stripes, alpha), version)


def read_node(path: str | os.PathLike, q: int | None = None, alpha: int | None = None) -> NodeFile:
    return parse_node(Path(path).read_bytes(), q=q, alpha=alpha)


# --- payload mapping ------------------------------------------------------


def stripe_width(params: CodeParams, mode: str, eve: EveModel | None = None) -> int:
    if mode == "plain":
        return params.B
    if mode == "secure":
        if eve is None:
            raise CodeError("secure mode needs an eavesdropper model")
        return secrecy_capacity(params, eve.l1, eve.l2)
    raise ValueError(f"unknown mode {mode!r}")


def split_stripes(symbols: np.ndarray, width: int) -> np.ndarray:
    """Zero-pad to a whole number of stripes and reshape to (S, width)."""
    symbols = np.asarray(symbols, dtype=np.int64).ravel()
    S = -(-len(symbols) // width)
    out = np.zeros(S * width, dtype=np.int64)
    out[:len(symbols)] = symbols
    return out.reshape(S, width)


def ingest(data: bytes, params: CodeParams, mode: str = "plain", eve: EveModel | None = None) -> np.ndarray:
    """One byte per symbol; needs q >= 257 so every byte is a residue."""
    if params.q < BYTE_Q_MIN:
        raise CodeError(f"byte payloads need q >= {BYTE_Q_MIN}, got q={params.q}")
    if mode == "secure" and eve is None:
        raise CodeError("secure mode needs an eavesdropper model")
    width = stripe_width(params, mode, eve)
    return split_stripes(np.frombuffer(bytes(data), dtype=np.uint8), width)


def ingest_symbols(values, params: CodeParams, mode: str = "plain", eve: EveModel | None = None) -> np.ndarray:
    """Integer symbols already in [0, q); for fields too small for bytes."""
    v = np.asarray(list(values), dtype=np.int64)
    if v.size and (v.min() < 0 or v.max() >= params.q):
        raise CodeError(f"symbols must lie in [0, {params.q})")
    return split_stripes(v, stripe_width(params, mode, eve))


def parse_symbol_text(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split()]
    except ValueError as exc:
        raise CodeError(f"symbolic payload must be whitespace-separated integers: {exc}") from None


# --- manifest -------------------------------------------------------------


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(",") if t.strip())


def _join(values) -> str:
    return ",".join(str(int(v)) for v in values)


@dataclass
class ClusterManifest:
    k: int
    n: int
    d: int
    alpha: int
    beta: int
    q: int
    epsilon: int
    psi_xs: tuple[int, ...]
    psi_ys: tuple[int, ...]
    stripes: int
    length: int
    mode: str = "plain"
    payload: str = "bytes"
    l1: int = 0
    l2: int = 0
    e1: tuple[int, ...] = ()
    e2: tuple[int, ...] = ()
    random_positions: tuple[int, ...] = ()
    checksums: dict[int, str] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    @property
    def params(self) -> CodeParams:
        return CodeParams(k=self.k, n=self.n, d=self.d, alpha=self.alpha, beta=self.beta,
                          B=self.k * self.alpha, q=self.q, epsilon=self.epsilon)

    @property
    def eve(self) -> EveModel | None:
        return EveModel(self.e1, self.e2) if self.mode == "secure" else None

    @property
    def width(self) -> int:
        return stripe_width(self.params, self.mode, self.eve)

    def validate(self) -> CodeParams:
        if self.format_version != FORMAT_VERSION:
            raise ManifestError(f"unsupported manifest version {self.format_version}")
        p = self.params
        try:
            p.check()
        except CodeError as exc:
            raise ManifestError(f"invalid code parameters: {exc}") from None
        if self.mode not in ("plain", "secure"):
            raise ManifestError(f"unknown mode {self.mode!r}")
        if self.payload not in ("bytes", "symbols"):
            raise ManifestError(f"unknown payload kind {self.payload!r}")
        if self.payload == "bytes" and self.q < BYTE_Q_MIN:
            raise ManifestError(f"byte payloads need q >= {BYTE_Q_MIN}")
        if len(self.psi_xs) != p.alpha or len(self.psi_ys) != p.n - p.k:
            raise ManifestError("psi sequence has the wrong length")
        if self.mode == "secure":
            eve = self.eve
            try:
                eve.validate(p)
            except ValueError as exc:
                raise ManifestError(str(exc)) from None
            if (eve.l1, eve.l2) != (self.l1, self.l2):
                raise ManifestError("l1/l2 disagree with the recorded tap sets")
            if len(self.random_positions) != p.B - self.width:
                raise ManifestError("random position count disagrees with l1/l2")
        if self.stripes * self.width < self.length:
            raise ManifestError(f"{self.stripes} stripes of {self.width} cannot hold {self.length} symbols")
        return p

    def to_text(self) -> str:
        kv = {
            "format_version": self.format_version, "k": self.k, "n": self.n, "d": self.d,
            "alpha": self.alpha, "beta": self.beta, "q": self.q, "epsilon": self.epsilon,
            "psi_xs": _join(self.psi_xs), "psi_ys": _join(self.psi_ys),
            "stripes": self.stripes, "length": self.length, "mode": self.mode,
            "payload": self.payload, "l1": self.l1, "l2": self.l2,
            "e1": _join(self.e1), "e2": _join(self.e2),
            "random_positions": _join(self.random_positions),
        }
        for m, digest in self.checksums.items():
            kv[f"sha256.node{m:05d}"] = digest
        return "".join(f"{key}={kv[key]}\n" for key in sorted(kv))

    @classmethod
    def from_text(cls, text: str) -> ClusterManifest:
        kv = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            if "=" not in line:
                raise ManifestError(f"line {lineno}: expected key=value")
            key, value = line.split("=", 1)
            kv[key.strip()] = value.strip()
        try:
            m = cls(
                k=int(kv["k"]), n=int(kv["n"]), d=int(kv["d"]), alpha=int(kv["alpha"]),
                beta=int(kv["beta"]), q=int(kv["q"]), epsilon=int(kv["epsilon"]),
                psi_xs=_ints(kv["psi_xs"]), psi_ys=_ints(kv["psi_ys"]),
                stripes=int(kv["stripes"]), length=int(kv["length"]), mode=kv["mode"],
                payload=kv["payload"], l1=int(kv["l1"]), l2=int(kv["l2"]),
                e1=_ints(kv["e1"]), e2=_ints(kv["e2"]),
                random_positions=_ints(kv["random_positions"]),
                checksums={int(key[len("sha256.node"):]): v for key, v in kv.items()
                           if key.startswith("sha256.node")},
                format_version=int(kv["format_version"]),
            )
        except KeyError as exc:
            raise ManifestError(f"manifest is missing key {exc.args[0]!r}") from None
        except ValueError as exc:
            raise ManifestError(f"malformed manifest value: {exc}") from None
        m.validate()
        return m


def egest(stripes: np.ndarray, manifest: ClusterManifest) -> bytes | list[int]:
    """Inverse of ingest/ingest_symbols: flatten and strip the padding."""
    flat = np.asarray(stripes, dtype=np.int64).reshape(-1)
    if flat.size != manifest.stripes * manifest.width:
        raise ManifestError(f"got {flat.size} symbols, manifest implies {manifest.stripes * manifest.width}")
    if manifest.length > flat.size:
        raise ManifestError("recorded length exceeds the stripe capacity")
    flat = flat[:manifest.length]
    if manifest.payload == "symbols":
        return [int(v) for v in flat]
    if flat.size and flat.max() > 255:
        raise ManifestError("decoded symbol exceeds a byte; wrong nodes or corrupted data")
    return flat.astype(np.uint8).tobytes()


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
