"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--d 16] [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from binmatroid import _backend
from binmatroid.gf2 import random_gl2
from binmatroid.reduction import leading_bit_reduction, prune, transform_reduction
from binmatroid.secretary import GlImageMapping, run_trial, trial_rng


def cases(d: int, rng: np.random.Generator) -> dict:
    lb = leading_bit_reduction(d)
    img = transform_reduction(lb, random_gl2(d, rng))
    small = prune(leading_bit_reduction(12), 0.0, rng)
    flat, offsets = img.parts_as_arrays()
    sample = rng.choice(1 << d, 1 << (d - 1), replace=False).astype(np.int64)
    elems = small.elements()
    elem_labels = np.ascontiguousarray(small.labels[elems])
    vecs = rng.integers(0, 1 << d, size=d).astype(np.uint32)
    return {
        "rank (d vectors)": lambda k: k.rank(vecs),
        f"part_sizes (2^{d})": lambda k: k.part_sizes(img.labels, d),
        f"index_mask (2^{d - 1} of 2^{d})": lambda k: k.index_mask(1 << d, sample),
        f"restrict_labels (2^{d - 1})": lambda k: k.restrict_labels(img.labels, sample),
        "classify_pairs (d=12, 4095 elements)": lambda k: k.classify_pairs(elems, elem_labels, small.labels),
        f"sumset_sweep (d={d}, full)": lambda k: k.sumset_sweep(flat, offsets, d),
    }


def per_trial(d: int):
    mapping = GlImageMapping(d)

    def go(k):
        _backend.kernels = k
        run_trial(d, mapping, 1 << (d - 1), trial_rng(0, 0))

    return go


def best_of(fn, repeat: int) -> float:
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = _backend.available()
    if "cython" not in backends:
        print("compiled extension not built; timing the fallback only")
    saved = _backend.kernels
    rows = list(cases(args.d, np.random.default_rng(0)).items())
    rows.append((f"run_trial (d={args.d}, half sample)", per_trial(args.d)))
    names = sorted(backends)
    print(f"{'kernel':<40}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, fn in rows:
        times = {n: best_of(lambda: fn(backends[n]), args.repeat) for n in names}
        line = f"{label:<40}" + "".join(f"{times[n] * 1e3:>10.3f}ms" for n in names)
        if len(names) == 2:
            line += f"{times['python'] / times['cython']:>11.1f}x"
        print(line)
    _backend.kernels = saved


if __name__ == "__main__":
    main()
