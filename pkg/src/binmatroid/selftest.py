"""Invariant suite at d <= 4, run by ``binmatroid selftest``."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable

import numpy as np

from binmatroid import oracles
from binmatroid.gf2 import Gf2Basis, rank
from binmatroid.reduction import (
    check_reduction_dfs,
    check_reduction_exact,
    perturb,
    random_candidate,
    valid_corpus,
    check_cross_sums,
)
from binmatroid.secretary import exact_expected_rank, trivial_greedy
from binmatroid.structure import (
    check_max_part_bound,
    count_pairs,
    covering_number,
    extract_heavy_parts,
    verify_cover,
)


def _checker_agreement(rng) -> tuple[bool, str]:
    n = 0
    for d in (2, 3, 4):
        cands = [random_candidate(d, rng, density) for density in (0.3, 0.6, 0.9) for _ in range(10)]
        cands += [perturb(p, rng) for p in valid_corpus(d, rng)]
        for p in cands:
            truth = oracles.reduction_valid(p)
            if check_reduction_exact(p).valid != truth or check_reduction_dfs(p).valid != truth:
                return False, f"disagreement on {p.to_json()}"
            n += 1
    return True, f"{n} candidates"


def _corpus(rng):
    for d in (1, 2, 3, 4):
        yield from valid_corpus(d, rng)


def _structure(rng) -> tuple[bool, str]:
    n = 0
    for p in _corpus(rng):
        if not check_reduction_exact(p).valid:
            return False, f"corpus reduction invalid: {p.to_json()}"
        if not check_cross_sums(p).holds or not count_pairs(p).holds:
            return False, f"pair bounds fail on {p.to_json()}"
        if not check_max_part_bound(p).holds:
            return False, f"max-part bound fails on {p.to_json()}"
        h = extract_heavy_parts(p)
        if not (h.within_cap and h.below_threshold):
            return False, f"heavy-part extraction fails on {p.to_json()}"
        n += 1
    return True, f"{n} reductions"


def _cover(rng) -> tuple[bool, str]:
    for d in (1, 2, 3, 4):
        r = covering_number(d, rng=rng)
        if r.cover is None or not verify_cover(r.cover, d) or r.covering_number != -(-((1 << d) - 1) // d):
            return False, f"cover fails at d={d}"
    return True, "d=1..4"


def _expected_rank(rng) -> tuple[bool, str]:
    for d in (1, 2, 3):
        if exact_expected_rank(d) != oracles.expected_rank(d):
            return False, f"d={d}"
    ok = all(exact_expected_rank(d) >= Fraction(d, 2) for d in range(1, 25))
    return ok, "d<=3 exhaustive, bound d/2 for d<=24"


def _trivial_greedy(rng) -> tuple[bool, str]:
    for d in (1, 2, 3):
        for draw in itertools.product(range(1 << d), repeat=d):
            support = sorted(set(draw))
            target = rank(draw, d)
            for order in itertools.permutations(support):
                if len(trivial_greedy(d, [(v, 1) for v in order])) != target:
                    return False, f"d={d}, order {order}"
    return True, "all draws and arrival orders, d<=3"


def _basis_rollback(rng) -> tuple[bool, str]:
    for _ in range(200):
        d = int(rng.integers(1, 5))
        vecs = rng.integers(0, 1 << d, size=6).tolist()
        b = Gf2Basis(d, vecs[:3])
        mark = b.checkpoint()
        rows = b.rows
        for v in vecs[3:]:
            b.insert(v)
        b.rollback(mark)
        if b.rows != rows:
            return False, "rollback changed rows"
        for v in range(1 << d):
            if b.contains(v) != (v in oracles.span(vecs[:3])):
                return False, "span membership mismatch"
    return True, "200 random bases"


CHECKS: list[tuple[str, Callable]] = [
    ("exact and DFS checkers agree with brute force", _checker_agreement),
    ("pair bounds, max-part bound, heavy parts on valid corpus", _structure),
    ("covering number with verified cover", _cover),
    ("expected rank DP", _expected_rank),
    ("trivial greedy reaches opt", _trivial_greedy),
    ("echelon basis checkpoint/rollback", _basis_rollback),
]


def run(seed: int = 0) -> list[tuple[str, bool, str]]:
    rng = np.random.default_rng(seed)
    out = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn(rng)
        except Exception as exc:  # report, don't abort the suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, ok, detail))
    return out
