"""Pure Python / numpy versions of the hot kernels.

Signatures and results match ``_kernels.pyx`` exactly; the test suite runs
both against each other.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def rank(vecs: np.ndarray) -> int:
    pivot = [0] * 33
    r = 0
    for v in vecs.tolist():
        while v:
            h = v.bit_length()
            row = pivot[h]
            if not row:
                pivot[h] = v
                r += 1
                break
            v ^= row
    return r


def part_sizes(labels: np.ndarray, nparts: int) -> np.ndarray:
    counts = np.bincount(labels.astype(np.intp) + 1, minlength=nparts + 1)
    return counts[1 : nparts + 1].astype(np.int64)


def index_mask(size: int, idx: np.ndarray) -> np.ndarray:
    mask = np.zeros(size, dtype=bool)
    mask[idx] = True
    return mask


def restrict_labels(labels: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Copy of ``labels`` with the positions in ``idx`` moved to R (-1)."""
    out = labels.copy()
    out[idx] = -1
    return out


def classify_pairs(elems: np.ndarray, elem_labels: np.ndarray, labels: np.ndarray):
    """Classify x + y over all pairs of ``elems`` with different labels.

    Returns ``(counts, violation)``.  ``counts`` holds the number of pairs whose
    sum lands in the lower-index part, the higher-index part, the residual
    set, and some third part.  ``violation`` is the first third-part pair in
    scan order, or None.
    """
    elems = elems.astype(np.int64)
    lab = elem_labels.astype(np.int64)
    counts = np.zeros(4, dtype=np.int64)
    violation = None
    for a in range(len(elems) - 1):
        ys = elems[a + 1 :]
        ly = lab[a + 1 :]
        cross = ly != lab[a]
        if not cross.any():
            continue
        ys = ys[cross]
        ly = ly[cross]
        ls = labels[ys ^ elems[a]].astype(np.int64)
        lo = np.minimum(ly, lab[a])
        hi = np.maximum(ly, lab[a])
        counts[0] += int(np.count_nonzero(ls == lo))
        counts[1] += int(np.count_nonzero(ls == hi))
        counts[2] += int(np.count_nonzero(ls < 0))
        third = (ls >= 0) & (ls != lo) & (ls != hi)
        n_third = int(np.count_nonzero(third))
        counts[3] += n_third
        if n_third and violation is None:
            violation = (int(elems[a]), int(ys[np.argmax(third)]))
    return counts, violation


def sumset_sweep(part_elems: np.ndarray, offsets: np.ndarray, d: int):
    """Grow the set of XOR-sums of partial transversals part by part.

    ``first[x]`` is the index of the part at which ``x`` first became the sum
    of a nonempty transversal (-1 if never).  The sweep stops at the first
    part holding an element that is already such a sum; its index and the
    element are returned (or ``(-1, 0)`` if there is none).
    """
    first = np.full(1 << d, -1, dtype=np.int32)
    reach = np.empty(0, dtype=np.int64)
    nparts = len(offsets) - 1
    for t in range(nparts):
        part = part_elems[offsets[t] : offsets[t + 1]].astype(np.int64)
        if part.size == 0:
            continue
        seen = first[part] >= 0
        if seen.any():
            return first, t, int(part[np.argmax(seen)])
        if reach.size:
            if part.size <= reach.size:
                for p in part.tolist():
                    cand = reach ^ p
                    first[cand[first[cand] < 0]] = t
            else:
                for r in reach.tolist():
                    cand = part ^ r
                    first[cand[first[cand] < 0]] = t
        first[part] = t
        reach = np.flatnonzero(first >= 0)
    return first, -1, 0
