"""Certify, falsify and generate partition reductions of B_d.

A partition matroid on a subset of F_2^d is a reduction of B_d when every
transversal (at most one element per part) is linearly independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from binmatroid import _backend
from binmatroid.gf2 import ENUM_MAX_DIM, Gf2Basis, Gl2Map, check_dim, random_gl2, rank, space_array
from binmatroid.matroid import PartitionReduction

__all__ = [
    "GuardExceeded",
    "ValidityCertificate",
    "CrossSumReport",
    "EXACT_MAX_ELEMENTS",
    "EXACT_MAX_DIM",
    "check_reduction_exact",
    "check_reduction_dfs",
    "check_reduction_randomized",
    "leading_bit_reduction",
    "transform_reduction",
    "delete_elements",
    "prune",
    "perturb",
    "random_candidate",
    "valid_corpus",
    "check_cross_sums",
]

EXACT_MAX_ELEMENTS = 1 << 16
EXACT_MAX_DIM = 20
DFS_MAX_TRANSVERSALS = 2_000_000
PAIR_MAX_ELEMENTS = 1 << 12


class GuardExceeded(ValueError):
    """Instance too large for an exhaustive method."""


@dataclass
class ValidityCertificate:
    valid: bool
    method: str
    witness: list[tuple[int, int]] | None = None
    trials: int = 0

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "method": self.method,
            "witness": None if self.witness is None else [[i, v] for i, v in self.witness],
            "trials": self.trials,
        }


def _witness_ok(witness: list[tuple[int, int]], d: int) -> bool:
    parts = [i for i, _ in witness]
    return len(set(parts)) == len(parts) and rank([v for _, v in witness], d) < len(witness)


def check_reduction_exact(p: PartitionReduction) -> ValidityCertificate:
    """Decide validity exactly.

    Sweeps the parts in index order, keeping the set of XOR-sums of nonempty
    transversals of the parts seen so far.  A dependent transversal exists
    iff some element of the next part is already such a sum; the first hit
    is traced back into an explicit dependent transversal.
    """
    if p.d > EXACT_MAX_DIM or p.n > EXACT_MAX_ELEMENTS:
        raise GuardExceeded(
            f"exact check limited to d <= {EXACT_MAX_DIM} and {EXACT_MAX_ELEMENTS} elements "
            f"(got d={p.d}, n={p.n}); use check_reduction_randomized"
        )
    flat, offsets = p.parts_as_arrays()
    first, hit_part, hit_vec = _backend.kernels.sumset_sweep(flat, offsets, p.d)
    if hit_part < 0:
        return ValidityCertificate(True, "exact")
    witness = _trace_sum(p, first, hit_vec) + [(hit_part, hit_vec)]
    witness.sort()
    assert _witness_ok(witness, p.d)
    return ValidityCertificate(False, "exact", witness)


def _trace_sum(p: PartitionReduction, first: np.ndarray, x: int) -> list[tuple[int, int]]:
    """A transversal of parts before ``first[x]`` whose sum is ``x``."""
    out = []
    while True:
        layer = int(first[x])
        if p.labels[x] == layer:
            out.append((layer, x))
            return out
        for q in p.parts[layer]:
            prev = int(first[x ^ q])
            if 0 <= prev < layer:
                out.append((layer, q))
                x ^= q
                break
        else:  # pragma: no cover - sweep invariant
            raise AssertionError("reachable-sum table is inconsistent")


def check_reduction_dfs(p: PartitionReduction) -> ValidityCertificate:
    """Exact check by depth-first search over transversals.

    Parts are visited largest first; each level either skips the part or
    inserts one of its elements into an incremental echelon basis, rolling
    back on return.  Exponential, so only for small instances.
    """
    count = math.prod(len(part) + 1 for part in p.parts)
    if count > DFS_MAX_TRANSVERSALS:
        raise GuardExceeded(f"{count} transversals exceed the DFS limit {DFS_MAX_TRANSVERSALS}")
    order = sorted((i for i in range(p.d) if p.parts[i]), key=lambda i: (-len(p.parts[i]), i))
    basis = Gf2Basis(p.d)
    chosen: list[tuple[int, int]] = []

    def search(k: int) -> list[tuple[int, int]] | None:
        if k == len(order):
            return None
        i = order[k]
        for v in p.parts[i]:
            mark = basis.checkpoint()
            if not basis.insert(v):
                return sorted(chosen + [(i, v)])
            chosen.append((i, v))
            found = search(k + 1)
            chosen.pop()
            basis.rollback(mark)
            if found:
                return found
        return search(k + 1)

    witness = search(0)
    if witness is None:
        return ValidityCertificate(True, "dfs")
    return ValidityCertificate(False, "dfs", witness)


def check_reduction_randomized(
    p: PartitionReduction, trials: int, rng: np.random.Generator
) -> ValidityCertificate:
    """One-sided falsifier: sample random transversals and test each.

    Every trial keeps each nonempty part with probability 1/2 and picks one
    uniform element from each kept part.  ``valid=False`` is a proof;
    ``valid=True`` only means no dependence was found.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    nonempty = [i for i in range(p.d) if p.parts[i]]
    sizes = np.array([len(p.parts[i]) for i in nonempty], dtype=np.int64)
    for t in range(trials):
        keep = rng.random(len(nonempty)) < 0.5
        picks = rng.integers(0, np.maximum(sizes, 1))
        transversal = [(nonempty[j], p.parts[nonempty[j]][picks[j]]) for j in np.flatnonzero(keep)]
        if len(transversal) < 2:
            continue
        if rank([v for _, v in transversal], p.d) < len(transversal):
            return ValidityCertificate(False, "randomized", transversal, t + 1)
    return ValidityCertificate(True, "randomized", None, trials)


def leading_bit_reduction(d: int) -> PartitionReduction:
    """Part ``b`` holds the vectors whose highest set bit is bit ``b``.

    Any transversal has distinct leading bits, so it is triangular and hence
    independent.
    """
    d = check_dim(d, ENUM_MAX_DIM)
    labels = np.full(1 << d, -1, dtype=np.int8)
    for b in range(d):
        labels[1 << b : 1 << (b + 1)] = b
    return PartitionReduction(d, labels=labels, validated=True)


def transform_reduction(p: PartitionReduction, m: Gl2Map) -> PartitionReduction:
    """Image of ``p`` under an invertible linear map (a matroid automorphism)."""
    if m.dim != p.d:
        raise ValueError(f"map dimension {m.dim} != reduction dimension {p.d}")
    labels = np.empty_like(p.labels)
    labels[m.apply_array(space_array(p.d))] = p.labels
    return PartitionReduction(p.d, labels=labels, validated=p.validated)


def delete_elements(p: PartitionReduction, vectors) -> PartitionReduction:
    """Drop ``vectors`` from their parts.  Deletion preserves validity."""
    labels = p.labels.copy()
    labels[np.asarray(vectors, dtype=np.int64)] = -1
    return PartitionReduction(p.d, labels=labels, validated=p.validated)


def prune(p: PartitionReduction, q: float, rng: np.random.Generator) -> PartitionReduction:
    """Delete each element independently with probability ``q``."""
    elems = p.elements()
    drop = elems[rng.random(elems.size) < q]
    return delete_elements(p, drop)


def perturb(p: PartitionReduction, rng: np.random.Generator) -> PartitionReduction:
    """Move one random element into a different random part (validity unknown)."""
    elems = p.elements()
    if elems.size == 0 or p.d < 2:
        return p.certified(False)
    v = int(elems[rng.integers(elems.size)])
    new = int(rng.integers(p.d - 1))
    if new >= p.labels[v]:
        new += 1
    labels = p.labels.copy()
    labels[v] = new
    return PartitionReduction(p.d, labels=labels)


def random_candidate(d: int, rng: np.random.Generator, density: float = 0.5) -> PartitionReduction:
    """Random subset of nonzero vectors, each put in a uniformly random part."""
    d = check_dim(d, ENUM_MAX_DIM)
    labels = rng.integers(0, d, size=1 << d).astype(np.int8)
    labels[rng.random(1 << d) >= density] = -1
    labels[0] = -1
    return PartitionReduction(d, labels=labels)


def valid_corpus(
    d: int,
    rng: np.random.Generator,
    images: int = 2,
    prune_rates: tuple[float, ...] = (0.0, 0.25, 0.5),
) -> list[PartitionReduction]:
    """Reductions valid by construction.

    The leading-bit reduction, ``images`` random GL(d,2) images of it, and a
    random pruning of each at every rate in ``prune_rates`` (rate 0 is the
    unpruned reduction itself).
    """
    base = [leading_bit_reduction(d)]
    base += [transform_reduction(base[0], random_gl2(d, rng)) for _ in range(images)]
    out = []
    for p in base:
        for q in prune_rates:
            out.append(p if q == 0 else prune(p, q, rng))
    return out


@dataclass
class CrossSumReport:
    """Where the sums x + y of cross-part pairs land."""

    pairs: int
    into_lower_part: int
    into_higher_part: int
    into_residual: int
    violations: int
    first_violation: tuple[int, int] | None = None
    holds: bool = field(init=False)

    def __post_init__(self):
        self.holds = self.violations == 0

    def to_dict(self) -> dict:
        return {
            "pairs": self.pairs,
            "into_lower_part": self.into_lower_part,
            "into_higher_part": self.into_higher_part,
            "into_residual": self.into_residual,
            "violations": self.violations,
            "first_violation": None if self.first_violation is None else list(self.first_violation),
            "holds": self.holds,
        }


def classify_cross_pairs(p: PartitionReduction):
    if p.n > PAIR_MAX_ELEMENTS:
        raise GuardExceeded(f"pair loop limited to {PAIR_MAX_ELEMENTS} elements (got {p.n})")
    elems = p.elements()
    return _backend.kernels.classify_pairs(elems, np.ascontiguousarray(p.labels[elems]), p.labels)


def check_cross_sums(p: PartitionReduction) -> CrossSumReport:
    """Check that x + y lies in P_i, P_j or R for every x in P_i, y in P_j.

    A sum landing in a third part P_k gives the dependent transversal
    {x, y, x + y}, so any violation disproves validity.
    """
    counts, violation = classify_cross_pairs(p)
    c = [int(x) for x in counts]
    return CrossSumReport(sum(c), c[0], c[1], c[2], c[3], violation)
