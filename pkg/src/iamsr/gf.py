"""Prime-field arithmetic and exact linear algebra over GF(q).

Scalars are :class:`FieldElement` values; matrices are :class:`Matrix`
objects backed by read-only ``uint16`` arrays of canonical residues.
Bulk routines (``rref``, ``rank_mod``, ``inverse_mod``) work directly on
integer numpy arrays and are what the coding layers use for striped data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Q_MAX = 1 << 16


class FieldMismatchError(ValueError):
    pass


class SingularMatrixError(ArithmeticError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    p = max(n, 2)
    while not is_prime(p):
        p += 1
    return p


@dataclass(frozen=True)
class PrimeField:
    q: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or not is_prime(int(self.q)):
            raise ValueError(f"field modulus must be prime, got {self.q!r}")
        if self.q >= Q_MAX:
            raise ValueError(f"field modulus must be < 2**16, got {self.q}")
        object.__setattr__(self, "q", int(self.q))

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(int(value) % self.q, self)

    def __repr__(self):
        return f"GF({self.q})"

    def elements(self) -> list[FieldElement]:
        return [FieldElement(v, self) for v in range(self.q)]

    def inv(self, value: int) -> int:
        value %= self.q
        if value == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.q})")
        return pow(value, -1, self.q)


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: PrimeField

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise ValueError(f"{self.value} is not a canonical residue mod {self.field.q}")

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatchError(f"{self.field} vs {other.field}")
            return other.value
        if isinstance(other, (int, np.integer)):
            return int(other) % self.field.q
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement((self.value + b) % self.field.q, self.field)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement((self.value - b) % self.field.q, self.field)

    def __rsub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement((b - self.value) % self.field.q, self.field)

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value * b % self.field.q, self.field)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.value * self.field.inv(b) % self.field.q, self.field)

    def __neg__(self):
        return FieldElement(-self.value % self.field.q, self.field)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** -e
        return FieldElement(pow(self.value, e, self.field.q), self.field)

    def inverse(self) -> FieldElement:
        return FieldElement(self.field.inv(self.value), self.field)

    def __int__(self):
        return self.value

    __index__ = __int__

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.field.q
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field.q))

    def __repr__(self):
        return f"{self.value} (mod {self.field.q})"


def _check_same(a: FieldElement, b: FieldElement):
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field} vs {b.field}")


def fe_add(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_same(a, b)
    return a + b


def fe_sub(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_same(a, b)
    return a - b


def fe_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_same(a, b)
    return a * b


def fe_inv(a: FieldElement) -> FieldElement:
    return a.inverse()


# --- bulk kernels on integer arrays -------------------------------------


def rref(a: np.ndarray, q: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod q and the pivot column indices.

    First-nonzero pivoting; every pivot row is scaled to a leading 1.
    """
    a = np.array(a, dtype=np.int64) % q
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, q) % q
        f = a[:, c].copy()
        f[r] = 0
        a = (a - np.outer(f, a[r])) % q
        pivots.append(c)
        r += 1
    return a, pivots


def rank_mod(a: np.ndarray, q: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(a, q)[1])


def inverse_mod(a: np.ndarray, q: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError(f"inverse needs a square matrix, got shape {a.shape}")
    red, pivots = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), q)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular over GF(%d)" % q)
    return red[:, n:]


def solve_mod(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """Unique x with a @ x == b (mod q); b may carry several right-hand sides."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    vec = b.ndim == 1
    if vec:
        b = b[:, None]
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    n = a.shape[1]
    red, pivots = rref(np.hstack([a, b]), q)
    if any(p >= n for p in pivots):
        raise SingularMatrixError("inconsistent system")
    if len(pivots) < n:
        raise SingularMatrixError("system is singular (solution not unique)")
    x = red[:n, n:]
    return x[:, 0] if vec else x


# --- Matrix ---------------------------------------------------------------


class Matrix:
    """Immutable matrix over a prime field."""

    __slots__ = ("field", "_a")

    def __init__(self, field: PrimeField, entries):
        if isinstance(entries, Matrix):
            if entries.field != field:
                raise FieldMismatchError(f"{entries.field} vs {field}")
            entries = entries._a
        a = np.array(entries, dtype=object if _has_elements(entries) else np.int64)
        if a.dtype == object:
            a = np.vectorize(lambda v: _coerce(v, field), otypes=[np.int64])(a) if a.size else a.astype(np.int64)
        if a.ndim == 1 and a.size == 0:
            a = a.reshape(0, 0)
        if a.ndim != 2:
            raise ValueError(f"matrix entries must be 2-D, got ndim={a.ndim}")
        a = (a.astype(np.int64) % field.q).astype(np.uint16)
        a.flags.writeable = False
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "_a", a)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> Matrix:
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field: PrimeField, rows: int, cols: int) -> Matrix:
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def array(self) -> np.ndarray:
        """int64 copy of the residues, safe to modify."""
        return self._a.astype(np.int64)

    @property
    def T(self) -> Matrix:
        return Matrix(self.field, self._a.T)

    def entries(self) -> list[FieldElement]:
        return [FieldElement(int(v), self.field) for v in self._a.ravel()]

    def tolist(self) -> list[list[int]]:
        return self._a.astype(int).tolist()

    def __getitem__(self, idx):
        out = self._a[idx]
        if np.ndim(out) == 0:
            return FieldElement(int(out), self.field)
        if np.ndim(out) == 1:
            raise IndexError("index with 2-D slices, e.g. m[i:i + 1, :]")
        return Matrix(self.field, out)

    def __matmul__(self, other: Matrix) -> Matrix:
        return mat_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self):
        return hash((self.field.q, self.shape, self._a.tobytes()))

    def __repr__(self):
        return f"Matrix({self.field}, {self.tolist()})"


def _has_elements(entries) -> bool:
    if isinstance(entries, np.ndarray):
        return entries.dtype == object
    stack = [entries]
    while stack:
        e = stack.pop()
        if isinstance(e, FieldElement):
            return True
        if isinstance(e, (list, tuple)):
            stack.extend(e)
    return False


def _coerce(v, field: PrimeField) -> int:
    if isinstance(v, FieldElement):
        if v.field != field:
            raise FieldMismatchError(f"{v.field} vs {field}")
        return v.value
    return int(v)


def _same_field(a: Matrix, b: Matrix):
    if a.field != b.field:
        raise FieldMismatchError(f"{a.field} vs {b.field}")


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    _same_field(a, b)
    if a.cols != b.rows:
        raise ValueError(f"shape mismatch: {a.shape} @ {b.shape}")
    return Matrix(a.field, a.array @ b.array % a.field.q)


def mat_rank(a: Matrix) -> int:
    return rank_mod(a.array, a.field.q)


def mat_inverse(a: Matrix) -> Matrix:
    return Matrix(a.field, inverse_mod(a.array, a.field.q))


def mat_solve(a: Matrix, b: Matrix | Sequence) -> Matrix | list[FieldElement]:
    """Solve a @ x = b. A 1-D ``b`` gives back a list of elements."""
    if isinstance(b, Matrix):
        _same_field(a, b)
        return Matrix(a.field, solve_mod(a.array, b.array, a.field.q))
    rhs = np.array([_coerce(v, a.field) for v in b], dtype=np.int64)
    x = solve_mod(a.array, rhs, a.field.q)
    return [FieldElement(int(v), a.field) for v in x]


def as_residues(values: Iterable, field: PrimeField) -> np.ndarray:
    """Coerce ints or FieldElements to a 1-D int64 array of residues."""
    return np.array([_coerce(v, field) for v in values], dtype=np.int64) % field.q
