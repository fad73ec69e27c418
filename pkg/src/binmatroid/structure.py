"""Structural computations on partition reductions of B_d.

Every threshold comparison is done in exact integer or rational arithmetic;
floating point near a threshold would make the certificates unsound.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import asdict, dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from binmatroid.gf2 import Gf2Basis, check_dim, check_vector, rank, reduced_echelon
from binmatroid.matroid import PartitionReduction
from binmatroid.reduction import classify_cross_pairs

log = logging.getLogger(__name__)

__all__ = [
    "IntegrityError",
    "PairCountReport",
    "MaxPartReport",
    "HeavyPartReport",
    "CoverReport",
    "RefutationReport",
    "count_pairs",
    "check_max_part_bound",
    "extract_heavy_parts",
    "heavy_parts_from_sizes",
    "heavy_threshold",
    "removal_cap",
    "compute_beta",
    "covering_number",
    "primitive_polynomial",
    "refutation_certificate",
    "exact_decimal",
]

BETA_MAX_DIM = 6
COVER_MAX_DIM = 10


class IntegrityError(RuntimeError):
    """A proven bound failed on a certified-valid input: an implementation bug."""


def exact_decimal(x: Fraction) -> str:
    """Exact decimal string when the denominator has only factors 2 and 5."""
    den = x.denominator
    while den % 2 == 0:
        den //= 2
    while den % 5 == 0:
        den //= 5
    if den != 1:
        return str(x)
    with localcontext() as ctx:
        ctx.prec = 100
        return str(Decimal(x.numerator) / Decimal(x.denominator))


@dataclass
class PairCountReport:
    cross_pairs_total: int
    pairs_into_R: int
    pairs_into_parts: int
    residual_pair_bound: int
    max_part: int
    r_size: int
    holds: bool = field(init=False)

    def __post_init__(self):
        self.holds = self.pairs_into_R <= self.residual_pair_bound

    def to_dict(self) -> dict:
        return asdict(self)


def count_pairs(p: PartitionReduction) -> PairCountReport:
    """Count cross-part pairs (a, b) by whether a + b falls in R.

    At most 2 * max|P_i| * |R| of them may fall in R when ``p`` is valid.
    """
    counts, _ = classify_cross_pairs(p)
    c = [int(x) for x in counts]
    return PairCountReport(
        cross_pairs_total=sum(c),
        pairs_into_R=c[2],
        pairs_into_parts=c[0] + c[1] + c[3],
        residual_pair_bound=2 * p.max_part * p.residual_size,
        max_part=p.max_part,
        r_size=p.residual_size,
    )


@dataclass
class MaxPartReport:
    max_part: int
    n: int
    c: Fraction
    bound: Fraction
    holds: bool
    applicable: bool

    def to_dict(self) -> dict:
        return {
            "max_part": self.max_part,
            "n": self.n,
            "c": str(self.c),
            "bound": str(self.bound),
            "bound_decimal": exact_decimal(self.bound),
            "holds": self.holds,
            "applicable": self.applicable,
        }


def check_max_part_bound(p: PartitionReduction) -> MaxPartReport:
    """Compare max|P_i| with c*n/8 where n = sum|P_i| and c = n / 2^d.

    The bound needs n > 0; an empty reduction is reported as not applicable.
    """
    n = p.n
    c = Fraction(n, 1 << p.d)
    bound = c * n / 8
    applicable = n > 0
    holds = p.max_part > bound if applicable else True
    if applicable and p.validated and not holds:
        raise IntegrityError(f"max part {p.max_part} <= c*n/8 = {bound} on a certified-valid reduction")
    return MaxPartReport(p.max_part, n, c, bound, holds, applicable)


def heavy_threshold(d: int) -> int:
    """floor(2^d / d^(1/4)), exactly."""
    return math.isqrt(math.isqrt((1 << (4 * d)) // d))


def removal_cap(d: int) -> int:
    """ceil(8 * sqrt(d)), exactly."""
    return math.isqrt(64 * d - 1) + 1


def _at_least_threshold(union: int, d: int) -> bool:
    # union >= 2^d / d^(1/4)  <=>  union^4 * d >= 2^(4d)
    return union**4 * d >= 1 << (4 * d)


@dataclass
class HeavyPartReport:
    t_set: list[int]
    removed: list[int]
    union_size_final: int
    removals: int
    threshold: int
    removal_cap: int
    within_cap: bool
    below_threshold: bool

    def to_dict(self) -> dict:
        return asdict(self)


def heavy_parts_from_sizes(sizes: Sequence[int], d: int, strict: bool = False) -> HeavyPartReport:
    """Greedy removal of the largest parts until the rest is small.

    Starting from all part indices, remove the largest remaining part (lowest
    index on ties) while the union of the remaining parts has at least
    2^d / d^(1/4) elements.  With ``strict``, exceeding ceil(8 sqrt d)
    removals raises :class:`IntegrityError`.
    """
    sizes = [int(s) for s in sizes]
    cap = removal_cap(d)
    remaining = set(range(len(sizes)))
    union = sum(sizes)
    removed = []
    while remaining and _at_least_threshold(union, d):
        j = min(remaining, key=lambda i: (-sizes[i], i))
        remaining.remove(j)
        removed.append(j)
        union -= sizes[j]
    within = len(removed) <= cap
    if strict and not within:
        raise IntegrityError(f"{len(removed)} removals exceed ceil(8 sqrt {d}) = {cap}")
    return HeavyPartReport(
        t_set=sorted(remaining),
        removed=removed,
        union_size_final=union,
        removals=len(removed),
        threshold=heavy_threshold(d),
        removal_cap=cap,
        within_cap=within,
        below_threshold=not _at_least_threshold(union, d),
    )


def extract_heavy_parts(p: PartitionReduction) -> HeavyPartReport:
    """Split the parts into a few heavy ones and a set T with a small union."""
    return heavy_parts_from_sizes(p.part_sizes, p.d, strict=p.validated)


@dataclass
class CoverReport:
    beta: Fraction
    witness_flat_rank: int
    covering_number: int
    cover: list[list[int]] | None = None

    @property
    def beta_num(self) -> int:
        return self.beta.numerator

    @property
    def beta_den(self) -> int:
        return self.beta.denominator

    def to_dict(self) -> dict:
        return {
            "beta_num": self.beta_num,
            "beta_den": self.beta_den,
            "witness_flat_rank": self.witness_flat_rank,
            "covering_number": self.covering_number,
            "cover": self.cover,
        }


def _all_subspaces(d: int) -> list[tuple[int, ...]]:
    """Every nonzero subspace of F_2^d as its reduced echelon form."""
    seen = {(): None}
    frontier = [()]
    while frontier:
        nxt = []
        for rows in frontier:
            basis = Gf2Basis(d, rows)
            for v in range(1, 1 << d):
                if basis.contains(v):
                    continue
                key = reduced_echelon(rows + (v,), d)
                if key not in seen:
                    seen[key] = None
                    nxt.append(key)
        frontier = nxt
    return [k for k in seen if k]


def _span(rows: Sequence[int]) -> list[int]:
    out = [0]
    for r in rows:
        out += [x ^ r for x in out]
    return out


def compute_beta(ground: Iterable[int], d: int, method: str = "auto") -> CoverReport:
    """max over nonempty F of |F| / rank(F), for the restriction of B_d to ``ground``.

    The maximum is attained at a flat, i.e. ``ground`` intersected with a
    subspace.  For the full ground set F_2^d minus zero the value is
    (2^d - 1)/d at the whole space; other ground sets are handled by
    enumerating all subspaces, which needs d <= 6.  ``covering_number`` in
    the returned report is ceil(beta).
    """
    d = check_dim(d)
    g = {check_vector(v, d) for v in ground}
    if not g:
        raise ValueError("ground set is empty")
    if 0 in g:
        raise ValueError("ground set contains the zero vector (a loop); beta is undefined")
    if method not in ("auto", "enumerate"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto" and len(g) == (1 << d) - 1:
        beta = Fraction((1 << d) - 1, d)
        return CoverReport(beta, d, math.ceil(beta))
    if d > BETA_MAX_DIM:
        raise ValueError(f"flat enumeration needs d <= {BETA_MAX_DIM}")
    best = None
    best_rank = 0
    for rows in _all_subspaces(d):
        flat = [v for v in _span(rows) if v in g]
        if not flat:
            continue
        r = rank(flat, d)
        val = Fraction(len(flat), r)
        if best is None or val > best or val == best and r > best_rank:
            best, best_rank = val, r
    return CoverReport(best, best_rank, math.ceil(best))


def primitive_polynomial(d: int) -> int:
    """Smallest degree-d polynomial over F_2 for which x has order 2^d - 1."""
    d = check_dim(d)
    order = (1 << d) - 1
    for low in range(1, 1 << d, 2):
        poly = (1 << d) | low
        v = 1
        for k in range(1, order + 1):
            v <<= 1
            if v >> d:
                v ^= poly
            if v == 1:
                break
        if k == order and v == 1:
            return poly
    raise AssertionError(f"no primitive polynomial of degree {d}")  # pragma: no cover


def _field_cover(d: int) -> list[list[int]]:
    # Powers of a primitive element: any d consecutive ones are alpha^j times
    # the polynomial basis, hence independent.
    poly = primitive_polynomial(d)
    powers = []
    v = 1
    for _ in range((1 << d) - 1):
        powers.append(v)
        v <<= 1
        if v >> d:
            v ^= poly
    return [powers[i : i + d] for i in range(0, len(powers), d)]


def _greedy_cover(d: int, target: int, rng: np.random.Generator, restarts: int) -> list[list[int]] | None:
    elems = np.arange(1, 1 << d)
    for _ in range(restarts):
        remaining = rng.permutation(elems).tolist()
        sets = []
        while remaining and len(sets) <= target:
            basis = Gf2Basis(d)
            take, rest = [], []
            for v in remaining:
                (take if basis.insert(v) else rest).append(v)
            sets.append(take)
            remaining = rest
        if len(sets) <= target:
            return sets
    return None


def verify_cover(cover: Sequence[Sequence[int]], d: int) -> bool:
    """Sets independent, pairwise disjoint, union = F_2^d minus zero."""
    seen: set[int] = set()
    for s in cover:
        if rank(s, d) != len(s) or len(set(s)) != len(s):
            return False
        if seen.intersection(s):
            return False
        seen.update(s)
    return seen == set(range(1, 1 << d))


def covering_number(
    d: int,
    method: str = "greedy",
    rng: np.random.Generator | None = None,
    restarts: int = 200,
) -> CoverReport:
    """Covering number ceil((2^d - 1)/d) of B_d minus zero, with a cover for d <= 10.

    ``method="greedy"`` repeatedly extracts a maximal independent subset of
    the remaining elements in random order, restarting up to ``restarts``
    times; if that fails the report carries no cover and a warning is logged.
    ``method="field"`` partitions the powers of a primitive element of
    GF(2^d) into runs of d, which always succeeds.
    """
    d = check_dim(d)
    beta = Fraction((1 << d) - 1, d)
    k = math.ceil(beta)
    if d > COVER_MAX_DIM:
        return CoverReport(beta, d, k)
    if method == "field":
        cover = _field_cover(d)
    elif method == "greedy":
        cover = _greedy_cover(d, k, rng if rng is not None else np.random.default_rng(0), restarts)
    else:
        raise ValueError(f"unknown method {method!r}")
    if cover is None:
        log.warning("greedy cover for d=%d not found within %d restarts", d, restarts)
        return CoverReport(beta, d, k)
    if len(cover) != k or not verify_cover(cover, d):
        raise IntegrityError(f"constructed cover for d={d} failed verification")
    return CoverReport(beta, d, k, [list(s) for s in cover])


@dataclass
class RefutationRow:
    max_part: int
    violates: bool
    max_part_bound: Fraction


@dataclass
class RefutationReport:
    d: int
    k: int
    two_k: int
    floor: Fraction
    floor_exceeds_two_k: bool
    rows: list[RefutationRow]

    @property
    def verdict(self) -> str:
        return "refuted" if self.floor_exceeds_two_k else "inconclusive"

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "k": self.k,
            "two_k": self.two_k,
            "floor": exact_decimal(self.floor),
            "floor_exceeds_two_k": self.floor_exceeds_two_k,
            "verdict": self.verdict,
            "rows": [
                {"max_part": r.max_part, "violates": r.violates, "max_part_bound": exact_decimal(r.max_part_bound)}
                for r in self.rows
            ],
        }

    def table(self) -> list[dict]:
        return [
            {
                "d": self.d,
                "max_part": r.max_part,
                "k": self.k,
                "2k": self.two_k,
                "bound": exact_decimal(self.floor),
                "verdict": "violated" if r.violates else self.verdict,
            }
            for r in self.rows
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["d", "max_part", "k", "2k", "bound", "verdict"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.table())
        return buf.getvalue()


def refutation_certificate(d: int, corpus: Sequence[PartitionReduction]) -> RefutationReport:
    """Compare full-support reductions of B_d minus zero against 2 * covering number.

    A partition matroid's covering number is its largest part.  Every valid
    reduction has max|P_i| > c*n/8 with c = 1 - 2^-d, so once (2^d - 1)/8
    exceeds 2*ceil((2^d - 1)/d) no reduction can be 2k-coverable.
    """
    d = check_dim(d)
    full = (1 << d) - 1
    k = math.ceil(Fraction(full, d))
    rows = []
    for p in corpus:
        if p.d != d:
            raise ValueError(f"corpus reduction has d={p.d}, expected {d}")
        if p.n != full:
            raise ValueError(f"reduction covers {p.n} of the {full} nonzero vectors; full support required")
        if not p.validated:
            raise ValueError("corpus reductions must be certified valid")
        bound_report = check_max_part_bound(p)
        rows.append(RefutationRow(p.max_part, p.max_part > 2 * k, bound_report.bound))
    floor = Fraction(full, 8)
    return RefutationReport(d, k, 2 * k, floor, floor > 2 * k, rows)
