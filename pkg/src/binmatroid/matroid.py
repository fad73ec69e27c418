"""Independence oracles for B_d and partition matroids, and matroid greedy."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from binmatroid import _backend
from binmatroid.gf2 import ENUM_MAX_DIM, DimensionError, Gf2Basis, check_dim, check_vector, rank

__all__ = [
    "BinaryMatroid",
    "PartitionReduction",
    "WeightedElement",
    "PartitionViolation",
    "MalformedReduction",
    "is_independent_binary",
    "is_independent_partition",
    "partition_dependence",
    "max_weight_independent",
]


class MalformedReduction(ValueError):
    """Parts overlap, contain the zero vector, or do not number exactly d."""


@dataclass(frozen=True)
class BinaryMatroid:
    """The complete binary matroid on F_2^d; the zero vector is its only loop."""

    dim: int

    def __post_init__(self):
        check_dim(self.dim)

    def is_independent(self, s: Iterable[int]) -> bool:
        return is_independent_binary(self, s)


@dataclass(frozen=True)
class WeightedElement:
    vector: int
    weight: float

    def __post_init__(self):
        if not self.weight >= 0:
            raise ValueError(f"weight must be non-negative, got {self.weight}")


class PartitionReduction:
    """A partition matroid P_0 ∪ ... ∪ P_{d-1} on a subset of F_2^d.

    Stored as a label per vector of F_2^d (part index, or -1 for the residual
    set R), so membership is a single lookup.  Parts may be empty.  Part
    indices are 0-based: index ``i`` is the part written P_{i+1} elsewhere.

    ``validated`` records that every transversal is known to be independent
    in B_d, either by an exact check or by construction.
    """

    def __init__(
        self,
        d: int,
        parts: Sequence[Sequence[int]] | None = None,
        *,
        labels: np.ndarray | None = None,
        validated: bool = False,
    ):
        self.d = check_dim(d, ENUM_MAX_DIM)
        self.validated = bool(validated)
        if (parts is None) == (labels is None):
            raise TypeError("give exactly one of parts or labels")
        if parts is not None:
            self._parts = self._check_parts(parts)
            self.labels = self._labels_from_parts(self._parts)
        else:
            lab = np.asarray(labels)
            if lab.shape != (1 << self.d,):
                raise MalformedReduction(f"labels must have length 2^{self.d}")
            if lab.size and (int(lab.min()) < -1 or int(lab.max()) >= self.d):
                raise MalformedReduction("labels must lie in -1..d-1")
            if lab[0] != -1:
                raise MalformedReduction("the zero vector is a loop and cannot be in a part")
            self.labels = lab.astype(np.int8, copy=False).view()
        self.labels.flags.writeable = False

    def _check_parts(self, parts) -> tuple[tuple[int, ...], ...]:
        if len(parts) != self.d:
            raise MalformedReduction(f"expected exactly {self.d} parts, got {len(parts)}")
        out = []
        seen: set[int] = set()
        for i, part in enumerate(parts):
            vals = []
            for v in part:
                try:
                    v = check_vector(v, self.d)
                except DimensionError as exc:
                    raise MalformedReduction(str(exc)) from None
                if v == 0:
                    raise MalformedReduction(f"part {i} contains the zero vector")
                if v in seen:
                    raise MalformedReduction(f"vector {v} appears more than once")
                seen.add(v)
                vals.append(v)
            out.append(tuple(sorted(vals)))
        return tuple(out)

    def _labels_from_parts(self, parts) -> np.ndarray:
        labels = np.full(1 << self.d, -1, dtype=np.int8)
        for i, part in enumerate(parts):
            if part:
                labels[np.asarray(part, dtype=np.int64)] = i
        return labels

    @cached_property
    def _parts(self) -> tuple[tuple[int, ...], ...]:
        # stable sort keeps each part in increasing vector order; R (-1) sorts first
        order = np.argsort(self.labels, kind="stable")
        lo = self.residual_size
        out = []
        for size in self.part_sizes.tolist():
            out.append(tuple(order[lo : lo + size].tolist()))
            lo += size
        return tuple(out)

    @property
    def parts(self) -> tuple[tuple[int, ...], ...]:
        return self._parts

    @cached_property
    def part_sizes(self) -> np.ndarray:
        return _backend.kernels.part_sizes(self.labels, self.d)

    @property
    def n(self) -> int:
        """Total number of elements, sum of |P_i|."""
        return int(self.part_sizes.sum())

    @property
    def residual_size(self) -> int:
        """|R| = 2^d - n."""
        return (1 << self.d) - self.n

    @property
    def max_part(self) -> int:
        return int(self.part_sizes.max())

    def part_of(self, v: int) -> int:
        return int(self.labels[check_vector(v, self.d)])

    def elements(self) -> np.ndarray:
        """All vectors in some part, increasing."""
        return np.flatnonzero(self.labels >= 0).astype(np.uint32)

    def parts_as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Concatenated part contents and their offsets, in part order."""
        sizes = [len(p) for p in self.parts]
        flat = np.fromiter((v for p in self.parts for v in p), dtype=np.uint32, count=sum(sizes))
        offsets = np.zeros(self.d + 1, dtype=np.int64)
        np.cumsum(sizes, out=offsets[1:])
        return flat, offsets

    def certified(self, validated: bool = True) -> PartitionReduction:
        """Same reduction with the validity flag set."""
        out = PartitionReduction(self.d, labels=self.labels, validated=validated)
        if "_parts" in self.__dict__:
            out.__dict__["_parts"] = self._parts
        return out

    def is_independent(self, s: Iterable[int]) -> bool:
        return is_independent_partition(self, s)

    def to_dict(self) -> dict:
        return {"d": self.d, "parts": [list(p) for p in self.parts]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict, validated: bool = False) -> PartitionReduction:
        if not isinstance(data, dict) or "d" not in data or "parts" not in data:
            raise MalformedReduction('expected an object with keys "d" and "parts"')
        try:
            d = check_dim(data["d"], ENUM_MAX_DIM)
        except DimensionError as exc:
            raise MalformedReduction(str(exc)) from None
        parts = data["parts"]
        if not isinstance(parts, list) or not all(isinstance(p, list) for p in parts):
            raise MalformedReduction('"parts" must be a list of lists')
        if not all(isinstance(v, int) and not isinstance(v, bool) for p in parts for v in p):
            raise MalformedReduction("vectors must be integers")
        return cls(d, parts, validated=validated)

    @classmethod
    def from_json(cls, text: str, validated: bool = False) -> PartitionReduction:
        return cls.from_dict(json.loads(text), validated=validated)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartitionReduction):
            return NotImplemented
        return self.d == other.d and np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash((self.d, self.labels.tobytes()))

    def __repr__(self) -> str:
        sizes = ", ".join(str(int(s)) for s in self.part_sizes)
        return f"PartitionReduction(d={self.d}, sizes=[{sizes}], validated={self.validated})"


def is_independent_binary(m: BinaryMatroid, s: Iterable[int]) -> bool:
    """Linear independence over F_2; repeated vectors count as dependent."""
    vecs = [check_vector(v, m.dim) for v in s]
    if len(set(vecs)) != len(vecs):
        return False
    return rank(vecs, m.dim) == len(vecs)


@dataclass(frozen=True)
class PartitionViolation:
    """Why a set is dependent in a partition matroid.

    ``kind`` is ``"outside"`` when ``vectors[0]`` is in no part (not in the
    ground set) or ``"same_part"`` when both ``vectors`` lie in ``part``.
    """

    kind: str
    vectors: tuple[int, ...]
    part: int = -1


def partition_dependence(p: PartitionReduction, s: Iterable[int]) -> PartitionViolation | None:
    """First reason ``s`` is dependent in ``p``, or None if it is independent."""
    used: dict[int, int] = {}
    for v in s:
        v = int(v)
        lab = int(p.labels[v]) if 0 <= v < (1 << p.d) else -1
        if lab < 0:
            return PartitionViolation("outside", (v,))
        if lab in used:
            return PartitionViolation("same_part", (used[lab], v), lab)
        used[lab] = v
    return None


def is_independent_partition(p: PartitionReduction, s: Iterable[int]) -> bool:
    return partition_dependence(p, s) is None


Oracle = Union[BinaryMatroid, PartitionReduction, Callable[[list], bool]]


def _extender(oracle: Oracle):
    """Return ``try_add(v) -> bool`` keeping the chosen set independent."""
    if isinstance(oracle, BinaryMatroid):
        basis = Gf2Basis(oracle.dim)
        return basis.insert
    if isinstance(oracle, PartitionReduction):
        used: set[int] = set()

        def try_add(v: int) -> bool:
            lab = oracle.part_of(v)
            if lab < 0 or lab in used:
                return False
            used.add(lab)
            return True

        return try_add
    check = oracle.is_independent if hasattr(oracle, "is_independent") else oracle
    chosen: list[int] = []

    def try_add(v: int) -> bool:
        if check(chosen + [v]):
            chosen.append(v)
            return True
        return False

    return try_add


def max_weight_independent(
    oracle: Oracle, elements: Iterable[WeightedElement]
) -> tuple[list[int], float]:
    """Maximum-weight independent set by the matroid greedy algorithm.

    Elements are scanned by weight descending, ties by vector ascending, so
    the result is deterministic.  Repeated vectors are collapsed, keeping the
    largest weight.
    """
    best: dict[int, float] = {}
    for e in elements:
        if e.vector not in best or e.weight > best[e.vector]:
            best[e.vector] = e.weight
    order = sorted(best.items(), key=lambda kv: (-kv[1], kv[0]))
    try_add = _extender(oracle)
    chosen = []
    total = 0
    for v, w in order:
        if try_add(v):
            chosen.append(v)
            total += w
    return chosen, total
