"""The compiled kernels and the numpy fallback must agree exactly."""

import numpy as np
import pytest

from binmatroid import _backend, _fallback, oracles
from binmatroid.reduction import check_reduction_exact, random_candidate, valid_corpus, check_cross_sums
from binmatroid.secretary import ExperimentConfig, records_csv, run_experiment

BACKENDS = _backend.available()
compiled = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")


def test_backend_selection():
    assert _backend.NAME in BACKENDS
    assert BACKENDS["python"] is _fallback


def test_rank_kernel(kernels, rng):
    for _ in range(200):
        vecs = rng.integers(0, 1 << 10, size=int(rng.integers(0, 14))).astype(np.uint32)
        assert kernels.rank(vecs) == oracles.rank(vecs.tolist())
    assert kernels.rank(np.array([1 << 29, (1 << 30) - 1], dtype=np.uint32)) == 2


def test_part_sizes_kernel(kernels, rng):
    for d in (1, 5, 12):
        p = random_candidate(d, rng)
        assert kernels.part_sizes(p.labels, d).tolist() == [len(x) for x in p.parts]


def test_index_mask_and_restrict(kernels, rng):
    labels = random_candidate(8, rng).labels
    idx = rng.choice(256, 50, replace=False).astype(np.int64)
    mask = kernels.index_mask(256, idx)
    assert mask.dtype == bool and sorted(np.flatnonzero(mask).tolist()) == sorted(idx.tolist())
    out = kernels.restrict_labels(labels, idx)
    assert (out[idx] == -1).all() and (out[~mask] == labels[~mask]).all()


def test_exact_checker_per_backend(kernels, rng):
    for d in (2, 3, 4):
        for _ in range(40):
            p = random_candidate(d, rng, float(rng.uniform(0.1, 1)))
            assert check_reduction_exact(p).valid == oracles.reduction_valid(p)


@compiled
def test_kernels_agree_on_sweeps_and_pairs(rng):
    cy, py = BACKENDS["cython"], BACKENDS["python"]
    for d in range(2, 11):
        cands = valid_corpus(d, rng) + [random_candidate(d, rng, q) for q in (0.2, 0.5, 0.9)]
        for p in cands:
            flat, offsets = p.parts_as_arrays()
            a, b = cy.sumset_sweep(flat, offsets, d), py.sumset_sweep(flat, offsets, d)
            assert a[1:] == b[1:] and np.array_equal(a[0], b[0])
            elems = p.elements()
            el = np.ascontiguousarray(p.labels[elems])
            ca, va = cy.classify_pairs(elems, el, p.labels)
            cb, vb = py.classify_pairs(elems, el, p.labels)
            assert ca.tolist() == cb.tolist() and va == vb


@compiled
def test_experiment_identical_across_backends(monkeypatch):
    cfg = ExperimentConfig(d=10, trials=200, seed=5, sample_size=[0, 512], mapping={"name": "gl-image"})
    out = {}
    for name, impl in BACKENDS.items():
        monkeypatch.setattr(_backend, "kernels", impl)
        report, recs = run_experiment(cfg, keep_records=True)
        out[name] = (report, records_csv(recs))
    assert out["cython"] == out["python"]


def test_cross_sums_per_backend(kernels, rng):
    for p in valid_corpus(7, rng):
        assert check_cross_sums(p).holds
