"""Brute-force reference implementations for small instances.

Exponential on purpose and written without the echelon machinery, so they can
check the fast paths independently.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from binmatroid.matroid import PartitionReduction


def independent(vectors: Sequence[int]) -> bool:
    """No nonempty subset XORs to zero (repeats count as dependent)."""
    vecs = list(vectors)
    for k in range(1, len(vecs) + 1):
        for combo in itertools.combinations(vecs, k):
            acc = 0
            for v in combo:
                acc ^= v
            if acc == 0:
                return False
    return True


def span(vectors: Iterable[int]) -> set[int]:
    out = {0}
    for v in vectors:
        out |= {x ^ v for x in out}
    return out


def rank(vectors: Iterable[int]) -> int:
    return len(span(vectors)).bit_length() - 1


def transversals(p: PartitionReduction):
    """Every transversal with at least one element, as (part, vector) lists."""
    choices = [[None] + [(i, v) for v in part] for i, part in enumerate(p.parts)]
    for pick in itertools.product(*choices):
        t = [c for c in pick if c is not None]
        if t:
            yield t


def reduction_valid(p: PartitionReduction) -> bool:
    return all(independent([v for _, v in t]) for t in transversals(p))


def max_weight(is_indep: Callable[[list[int]], bool], elements: Sequence[tuple[int, float]]) -> float:
    best = 0
    items = list(elements)
    for k in range(len(items) + 1):
        for combo in itertools.combinations(items, k):
            vecs = [v for v, _ in combo]
            if is_indep(vecs):
                best = max(best, sum(w for _, w in combo))
    return best


def expected_rank(d: int) -> Fraction:
    """Average rank over all 2^(d*d) ordered draws of d vectors."""
    total = 0
    count = 0
    for draw in itertools.product(range(1 << d), repeat=d):
        total += rank(draw)
        count += 1
    return Fraction(total, count)


def beta(ground: Sequence[int]) -> Fraction:
    """max |F| / rank(F) over all nonempty subsets F of ``ground``."""
    g = list(ground)
    best = None
    for k in range(1, len(g) + 1):
        for combo in itertools.combinations(g, k):
            r = rank(combo)
            if r == 0:
                continue
            val = Fraction(k, r)
            if best is None or val > best:
                best = val
    return best
