import itertools
from fractions import Fraction

import numpy as np
import pytest

from binmatroid import oracles
from binmatroid.matroid import PartitionReduction, WeightedElement, max_weight_independent
from binmatroid.reduction import check_reduction_exact, leading_bit_reduction
from binmatroid.secretary import (
    ConfigError,
    ExperimentConfig,
    GlImageMapping,
    InvalidMappingError,
    LeadingBitMapping,
    SampleBasisMapping,
    SampleView,
    WeightAssignment,
    exact_expected_rank,
    make_mapping,
    opt_on_partition,
    rank_chain_formula,
    records_csv,
    run_experiment,
    run_trial,
    sample_adversarial_weights,
    split_sample,
    trial_rng,
    trivial_greedy,
)


def test_weights_d1():
    x = sample_adversarial_weights(1, np.random.default_rng(0))
    assert len(x.x) == 1 and x.opt() == x.x[0]


def test_zero_draws_give_zero_opt():
    # d=2: the only draw with rank 0 is (0, 0), probability 1/16
    zero = sum(1 for draw in itertools.product(range(4), repeat=2) if oracles.rank(draw) == 0)
    assert Fraction(zero, 16) == Fraction(1, 16)
    assert WeightAssignment(2, (0, 0)).opt() == 0
    assert WeightAssignment(2, (0, 0)).elements() == [WeightedElement(0, 1)]


def test_weight_assignment_opt_matches_greedy(rng):
    for _ in range(200):
        x = sample_adversarial_weights(int(rng.integers(1, 10)), rng)
        assert x.opt() == oracles.rank(x.x)


@pytest.mark.parametrize("d, value", [(1, Fraction(1, 2)), (2, Fraction(21, 16)), (3, Fraction(1141, 512))])
def test_expected_rank_frozen(d, value):
    # frozen from oracles.expected_rank (full enumeration)
    assert exact_expected_rank(d) == value


def test_expected_rank_matches_enumeration():
    for d in (1, 2, 3):
        assert exact_expected_rank(d) == oracles.expected_rank(d)


def test_expected_rank_lower_bound():
    for d in range(1, 25):
        e = exact_expected_rank(d)
        assert Fraction(d, 2) <= e <= d


def test_expected_rank_large_d_value():
    assert float(exact_expected_rank(8)) == pytest.approx(7.152206485148921, abs=1e-12)
    assert float(exact_expected_rank(16)) == pytest.approx(15.149829481927574, abs=1e-12)


def test_chain_formula_differs():
    assert rank_chain_formula(2) == Fraction(17, 12) != exact_expected_rank(2)


def test_split_extremes(rng):
    x = sample_adversarial_weights(6, rng)
    s = split_sample(x, 0, rng)
    assert s.x1 == () and s.x2 == x.x
    s = split_sample(x, 64, rng)
    assert s.x2 == () and sorted(s.x1) == sorted(x.x)
    with pytest.raises(ValueError):
        split_sample(x, 65, rng)


def test_split_is_exact_and_consistent(rng):
    for _ in range(50):
        x = sample_adversarial_weights(8, rng)
        s = split_sample(x, 100, rng)
        assert len(set(s.sample.tolist())) == 100
        assert sorted(s.x1 + s.x2) == sorted(x.x)
        assert all(s.mask[v] for v in s.x1) and not any(s.mask[v] for v in s.x2)


def test_split_expected_x1_size():
    # E|X1| = d * s / 2^d; check the mean over 10^5 splits within 3 standard errors
    d, size, n = 8, 96, 100_000
    rng = np.random.default_rng(7)
    sizes = np.empty(n)
    for t in range(n):
        sizes[t] = len(split_sample(sample_adversarial_weights(d, rng), size, rng).x1)
    expected = d * size / (1 << d)
    assert abs(sizes.mean() - expected) <= 3 * sizes.std(ddof=1) / np.sqrt(n)


def test_opt_on_partition_examples():
    p = PartitionReduction(2, [[1], [2, 3]])
    assert opt_on_partition(p, [2, 3]) == 1
    assert opt_on_partition(p, [1, 3]) == 2
    assert opt_on_partition(p, [0, 0]) == 0
    assert opt_on_partition(p, []) == 0


def test_opt_on_partition_matches_greedy(rng):
    p = leading_bit_reduction(6)
    for _ in range(100):
        x2 = rng.integers(0, 64, size=6).tolist()
        _, total = max_weight_independent(p, [WeightedElement(v, 1) for v in set(x2)])
        assert opt_on_partition(p, x2) == total


@pytest.mark.parametrize("name", ["leading-bit", "gl-image", "sample-basis"])
def test_mappings_produce_valid_restricted_reductions(name, rng):
    d = 8
    mapping = make_mapping(d, name)
    for _ in range(20):
        x = sample_adversarial_weights(d, rng)
        split = split_sample(x, 128, rng)
        view = SampleView.of(split)
        p = mapping(view, rng)
        assert not (p.labels[split.sample] >= 0).any()
        assert check_reduction_exact(p).valid


def test_make_mapping_errors():
    with pytest.raises(ConfigError):
        make_mapping(4, "nope")
    with pytest.raises(ConfigError):
        make_mapping(4, {"name": "leading-bit", "seed": 3})
    assert make_mapping(4, {"name": "gl-image", "seed": 5}).params == {"seed": 5}


def test_gl_image_fresh_map_per_call(rng):
    m = GlImageMapping(6, seed=None)
    view = SampleView.of(split_sample(sample_adversarial_weights(6, rng), 0, rng))
    a, b = m(view, rng), m(view, rng)
    assert a.part_sizes.tolist() == b.part_sizes.tolist()
    assert a != b


def test_run_trial_bound_and_fields(rng):
    for mapping in (LeadingBitMapping(10), GlImageMapping(10), SampleBasisMapping(10)):
        for size in (0, 512, 1024):
            r = run_trial(10, mapping, size, rng, check=True)
            assert r.bound_ok and r.opt_P <= 10 and r.opt_M <= 10
            assert r.removals <= 26 and r.sample_size == size
            if size == 1024:
                assert r.opt_P == 0


def test_run_trial_check_rejects_bad_mapping(rng):
    bad = PartitionReduction(3, [[1], [2], [3]], validated=False)
    with pytest.raises(InvalidMappingError):
        run_trial(3, lambda view, rng: bad, 0, rng, check=True)

    def leaky(view, rng):
        return leading_bit_reduction(3)

    with pytest.raises(InvalidMappingError):
        run_trial(3, leaky, 8, rng, check=True)


def test_trivial_greedy_examples():
    assert trivial_greedy(2, [(1, 1), (2, 1), (3, 1)]) == [1, 2]
    assert trivial_greedy(2, [(3, 1), (1, 0), (1, 1)]) == [3, 1]
    assert trivial_greedy(2, [WeightedElement(0, 1)]) == []


def test_trivial_greedy_exhaustive_small():
    for d in (1, 2, 3):
        for draw in itertools.product(range(1 << d), repeat=d):
            target = oracles.rank(draw)
            for order in itertools.permutations(sorted(set(draw))):
                assert len(trivial_greedy(d, [(v, 1) for v in order])) == target


def test_trial_rng_independent_streams():
    assert trial_rng(1, 2).integers(1 << 30) == trial_rng(1, 2).integers(1 << 30)
    assert trial_rng(1, 2).integers(1 << 30) != trial_rng(1, 3).integers(1 << 30)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(d=8, trials=0, seed=1)
    with pytest.raises(ConfigError):
        ExperimentConfig(d=25, trials=1, seed=1)
    with pytest.raises(ConfigError):
        ExperimentConfig(d=8, trials=1, seed=1, sample_size=10, fraction=0.5)
    with pytest.raises(ConfigError):
        ExperimentConfig(d=8, trials=1, seed=1, sample_size=257)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"d": 8, "trials": 1})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"d": 8, "trials": 1, "seed": 0, "bogus": 1})
    c = ExperimentConfig.from_dict({"d": 8, "trials": 1, "seed": 0, "sample_size": {"fraction": 0.5}})
    assert c.sample_sizes() == [128]
    assert ExperimentConfig(d=8, trials=1, seed=0, sample_size=[0, 128]).sample_sizes() == [0, 128]


def test_experiment_deterministic_and_job_independent():
    cfg = ExperimentConfig(d=8, trials=400, seed=11, sample_size=[0, 128], mapping={"name": "gl-image"})
    a, ra = run_experiment(cfg, keep_records=True)
    b, rb = run_experiment(cfg, jobs=2, keep_records=True)
    assert a == b and records_csv(ra) == records_csv(rb)
    assert a.bound_checks_failed == 0
    c = run_experiment(ExperimentConfig(d=8, trials=400, seed=12, sample_size=[0, 128]))
    assert c.mean_opt_M != a.mean_opt_M


def test_trivial_greedy_experiment_ratio_one():
    r = run_experiment(ExperimentConfig(d=10, trials=500, seed=3, algorithm="trivial-greedy"))
    assert r.ratio == 1.0 and r.bound_checks_failed == 0


def test_records_csv_header(rng):
    _, recs = run_experiment(ExperimentConfig(d=4, trials=3, seed=0), keep_records=True)
    lines = records_csv(recs).splitlines()
    assert lines[0] == "trial,opt_M,opt_P,x1_size,removals,bound_ok" and len(lines) == 4
