"""Bit-packed linear algebra over F_2^d.

Vectors are plain non-negative integers: bit ``k`` holds coordinate ``k + 1``.
Addition is XOR.  Collections of vectors are either Python sequences or
``numpy.uint32`` arrays; the heavy loops live in :mod:`binmatroid._backend`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from binmatroid import _backend

MAX_DIM = 30
ENUM_MAX_DIM = 24

__all__ = [
    "MAX_DIM",
    "ENUM_MAX_DIM",
    "DimensionError",
    "Gf2Basis",
    "Gl2Map",
    "check_dim",
    "check_vector",
    "rank",
    "in_span",
    "reduced_echelon",
    "random_gl2",
    "enumerate_space",
    "space_array",
]


class DimensionError(ValueError):
    """A vector does not fit in the declared dimension, or d is out of range."""


def check_dim(d: int, limit: int = MAX_DIM) -> int:
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool):
        raise DimensionError(f"dimension must be an integer, got {d!r}")
    d = int(d)
    if not 1 <= d <= limit:
        raise DimensionError(f"dimension {d} outside 1..{limit}")
    return d


def check_vector(v: int, d: int) -> int:
    v = int(v)
    if v < 0 or v >> d:
        raise DimensionError(f"vector {v} does not lie in F_2^{d}")
    return v


def _as_array(vectors: Iterable[int], d: int | None) -> np.ndarray:
    if isinstance(vectors, np.ndarray):
        arr = vectors.astype(np.uint32, copy=False).ravel()
    else:
        vals = [int(v) for v in vectors]
        if any(v < 0 for v in vals):
            raise DimensionError("vectors must be non-negative integers")
        if vals and max(vals) >> MAX_DIM:
            raise DimensionError(f"vector exceeds F_2^{MAX_DIM}")
        arr = np.asarray(vals, dtype=np.uint32)
    if d is not None and arr.size and int(arr.max()) >> d:
        raise DimensionError(f"vector {int(arr.max())} does not lie in F_2^{d}")
    return arr


def rank(vectors: Iterable[int], d: int | None = None) -> int:
    """Dimension of the span of ``vectors``.

    When ``d`` is given, every vector must lie in F_2^d.
    """
    if d is not None:
        check_dim(d)
    arr = _as_array(vectors, d)
    if arr.size == 0:
        return 0
    return int(_backend.kernels.rank(arr))


class Gf2Basis:
    """Incrementally built row-echelon basis.

    Rows have pairwise distinct leading bits.  :meth:`checkpoint` and
    :meth:`rollback` make it cheap to use inside a backtracking search.
    """

    __slots__ = ("dim", "_pivot", "_order")

    def __init__(self, dim: int, vectors: Iterable[int] = ()):
        self.dim = check_dim(dim)
        self._pivot = [0] * (self.dim + 1)
        self._order: list[int] = []
        for v in vectors:
            self.insert(v)

    @property
    def rank(self) -> int:
        return len(self._order)

    @property
    def rows(self) -> list[int]:
        """Rows sorted by decreasing leading bit."""
        return [self._pivot[h] for h in range(self.dim, 0, -1) if self._pivot[h]]

    def __len__(self) -> int:
        return len(self._order)

    def reduce(self, v: int) -> int:
        v = check_vector(v, self.dim)
        pivot = self._pivot
        while v:
            h = v.bit_length()
            row = pivot[h]
            if not row:
                return v
            v ^= row
        return 0

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    __contains__ = contains

    def insert(self, v: int) -> bool:
        """Add ``v``; return False (and leave the rows alone) if it is dependent."""
        r = self.reduce(v)
        if not r:
            return False
        h = r.bit_length()
        self._pivot[h] = r
        self._order.append(h)
        return True

    def checkpoint(self) -> int:
        return len(self._order)

    def rollback(self, mark: int) -> None:
        if not 0 <= mark <= len(self._order):
            raise ValueError(f"invalid checkpoint {mark}")
        while len(self._order) > mark:
            self._pivot[self._order.pop()] = 0

    def copy(self) -> Gf2Basis:
        out = Gf2Basis(self.dim)
        out._pivot = self._pivot.copy()
        out._order = self._order.copy()
        return out

    def __repr__(self) -> str:
        return f"Gf2Basis(dim={self.dim}, rows={self.rows})"


def in_span(basis: Gf2Basis, v: int) -> bool:
    """True iff ``v`` reduces to zero against the rows of ``basis``."""
    return basis.contains(v)


def reduced_echelon(vectors: Iterable[int], d: int) -> tuple[int, ...]:
    """Canonical reduced row-echelon form of span(vectors), rows descending.

    Two collections span the same subspace iff their forms are equal.
    """
    basis = Gf2Basis(d, vectors)
    rows = basis.rows
    leads = [r.bit_length() - 1 for r in rows]
    for i in range(len(rows)):
        for j in range(len(rows)):
            if i != j and rows[j] >> leads[i] & 1:
                rows[j] ^= rows[i]
    return tuple(sorted(rows, reverse=True))


@dataclass(frozen=True)
class Gl2Map:
    """Invertible linear map of F_2^d given by its column images.

    ``columns[k]`` is the image of the unit vector ``1 << k``.
    """

    columns: tuple[int, ...]

    def __post_init__(self):
        d = check_dim(len(self.columns))
        cols = tuple(check_vector(c, d) for c in self.columns)
        object.__setattr__(self, "columns", cols)
        if rank(cols, d) != d:
            raise ValueError("columns do not form an invertible matrix")

    @property
    def dim(self) -> int:
        return len(self.columns)

    @classmethod
    def identity(cls, d: int) -> Gl2Map:
        return cls(tuple(1 << k for k in range(check_dim(d))))

    def __call__(self, v: int) -> int:
        v = check_vector(v, self.dim)
        out = 0
        k = 0
        while v:
            if v & 1:
                out ^= self.columns[k]
            v >>= 1
            k += 1
        return out

    def apply_array(self, vectors: np.ndarray) -> np.ndarray:
        vecs = np.asarray(vectors, dtype=np.uint32)
        out = np.zeros_like(vecs)
        for k, col in enumerate(self.columns):
            out ^= ((vecs >> np.uint32(k)) & np.uint32(1)) * np.uint32(col)
        return out

    def compose(self, other: Gl2Map) -> Gl2Map:
        """The map ``v -> self(other(v))``."""
        if other.dim != self.dim:
            raise DimensionError("dimension mismatch")
        return Gl2Map(tuple(self(c) for c in other.columns))

    def inverse(self) -> Gl2Map:
        d = self.dim
        # Gauss-Jordan on [A | I], one integer per row.
        rows = []
        for i in range(d):
            a = 0
            for k, col in enumerate(self.columns):
                a |= (col >> i & 1) << k
            rows.append(a | (1 << (d + i)))
        for col in range(d):
            piv = next(r for r in range(col, d) if rows[r] >> col & 1)
            rows[col], rows[piv] = rows[piv], rows[col]
            for r in range(d):
                if r != col and rows[r] >> col & 1:
                    rows[r] ^= rows[col]
        inv_rows = [r >> d for r in rows]
        cols = []
        for k in range(d):
            c = 0
            for i in range(d):
                c |= (inv_rows[i] >> k & 1) << i
            cols.append(c)
        return Gl2Map(tuple(cols))


def random_gl2(d: int, rng: np.random.Generator) -> Gl2Map:
    """Uniformly random invertible map, by rejection on random column sets."""
    d = check_dim(d)
    while True:
        cols = [int(c) for c in rng.integers(0, 1 << d, size=d, dtype=np.int64)]
        if rank(cols, d) == d:
            return Gl2Map(tuple(cols))


def enumerate_space(d: int) -> Iterator[int]:
    """All 2^d vectors of F_2^d in increasing integer order."""
    d = check_dim(d, ENUM_MAX_DIM)
    return iter(range(1 << d))


def space_array(d: int) -> np.ndarray:
    d = check_dim(d, ENUM_MAX_DIM)
    return np.arange(1 << d, dtype=np.uint32)


def leading_bit(v: int) -> int:
    """1-based position of the highest set bit; 0 for the zero vector."""
    return int(v).bit_length()


def subset_xors(vectors: Sequence[int]) -> set[int]:
    """XORs of all subsets (including the empty one)."""
    out = {0}
    for v in vectors:
        out |= {x ^ v for x in out}
    return out
