"""Matroid-secretary experiment on B_d against partition-reduction algorithms.

Weights are indicators of a multiset X of d uniform draws from F_2^d.  A
partition-reduction algorithm sees a uniformly random sample S of fixed size
together with the weights on S, then commits to a partition matroid on the
rest; its offline optimum opt_P(X_2) bounds what any online rule can collect.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from binmatroid import _backend
from binmatroid.gf2 import ENUM_MAX_DIM, Gf2Basis, Gl2Map, check_dim, random_gl2, rank, space_array
from binmatroid.matroid import PartitionReduction, WeightedElement
from binmatroid.reduction import check_reduction_exact, check_reduction_randomized, leading_bit_reduction
from binmatroid.structure import heavy_parts_from_sizes

__all__ = [
    "ConfigError",
    "InvalidMappingError",
    "WeightAssignment",
    "SampleSplit",
    "SampleView",
    "TrialRecord",
    "ExperimentConfig",
    "ExperimentReport",
    "LeadingBitMapping",
    "GlImageMapping",
    "SampleBasisMapping",
    "make_mapping",
    "sample_adversarial_weights",
    "exact_expected_rank",
    "rank_chain_formula",
    "split_sample",
    "opt_on_partition",
    "run_trial",
    "trivial_greedy",
    "run_experiment",
    "trial_rng",
]


class ConfigError(ValueError):
    pass


class InvalidMappingError(RuntimeError):
    """A mapping produced something that is not a reduction on the non-sample."""


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


@dataclass(frozen=True)
class WeightAssignment:
    """w_v = 1 if v occurs in the multiset ``x``, else 0."""

    d: int
    x: tuple[int, ...]

    @property
    def support(self) -> list[int]:
        return sorted(set(self.x))

    def weight(self, v: int) -> int:
        return int(v in self.x)

    def opt(self) -> int:
        """opt_{B_d}(w) = rank of the distinct draws."""
        return rank(self.x, self.d)

    def elements(self) -> list[WeightedElement]:
        """The weight-1 elements; every other vector has weight 0."""
        return [WeightedElement(v, 1) for v in self.support]


def sample_adversarial_weights(d: int, rng: np.random.Generator) -> WeightAssignment:
    """d independent uniform draws from F_2^d, with replacement (zero allowed)."""
    d = check_dim(d, ENUM_MAX_DIM)
    return WeightAssignment(d, tuple(rng.integers(0, 1 << d, size=d).tolist()))


def exact_expected_rank(d: int) -> Fraction:
    """E[rank(X)] for d uniform draws with replacement, exactly.

    Dynamic program over the span dimension r: a draw leaves the span with
    probability (2^d - 2^r) / 2^d.
    """
    d = check_dim(d, ENUM_MAX_DIM)
    size = 1 << d
    dist = [Fraction(0)] * (d + 1)
    dist[0] = Fraction(1)
    for _ in range(d):
        nxt = [Fraction(0)] * (d + 1)
        for r, pr in enumerate(dist):
            if pr:
                up = Fraction(size - (1 << r), size)
                nxt[r] += pr * (1 - up)
                if r < d:
                    nxt[r + 1] += pr * up
        dist = nxt
    value = sum(r * pr for r, pr in enumerate(dist))
    assert value >= Fraction(d, 2)
    return value


def rank_chain_formula(d: int) -> Fraction:
    """sum_i (2^d - 2^(i-1)) / (2^d - (i-1)): the without-replacement chain.

    Kept for comparison only; for draws with replacement the exact value is
    :func:`exact_expected_rank` (e.g. d=2 gives 17/12 here vs 21/16).
    """
    d = check_dim(d, ENUM_MAX_DIM)
    return sum((Fraction((1 << d) - (1 << i), (1 << d) - i) for i in range(d)), Fraction(0))


@dataclass
class SampleSplit:
    d: int
    sample: np.ndarray
    mask: np.ndarray
    x1: tuple[int, ...]
    x2: tuple[int, ...]


@dataclass(frozen=True)
class SampleView:
    """What a partition-reduction algorithm may look at: S and w restricted to S."""

    d: int
    sample: np.ndarray
    mask: np.ndarray
    positive: tuple[int, ...]

    @classmethod
    def of(cls, split: SampleSplit) -> SampleView:
        return cls(split.d, split.sample, split.mask, tuple(sorted(set(split.x1))))


def split_sample(x: WeightAssignment, sample_size: int, rng: np.random.Generator) -> SampleSplit:
    """Uniform sample S of exactly ``sample_size`` vectors; X_1 = X ∩ S, X_2 = X ∖ S.

    Membership is decided per copy of the multiset X.
    """
    size = 1 << x.d
    if not 0 <= sample_size <= size:
        raise ValueError(f"sample size {sample_size} outside 0..{size}")
    if sample_size:
        sample = rng.choice(size, sample_size, replace=False, shuffle=False)
    else:
        sample = np.empty(0, dtype=np.int64)
    mask = _backend.kernels.index_mask(size, sample)
    x1 = tuple(v for v in x.x if mask[v])
    x2 = tuple(v for v in x.x if not mask[v])
    return SampleSplit(x.d, sample, mask, x1, x2)


class _FixedMapping:
    """Restrict a fixed valid reduction to the non-sample."""

    name = ""

    def __init__(self, base: PartitionReduction):
        self.base = base

    def __call__(self, view: SampleView, rng: np.random.Generator) -> PartitionReduction:
        labels = _backend.kernels.restrict_labels(self.base.labels, view.sample)
        return PartitionReduction(view.d, labels=labels, validated=self.base.validated)


class LeadingBitMapping(_FixedMapping):
    name = "leading-bit"

    def __init__(self, d: int):
        super().__init__(leading_bit_reduction(d))
        self.params = {}


class GlImageMapping(_FixedMapping):
    """Leading-bit reduction moved by an invertible map.

    With ``seed`` the map is fixed; without it a fresh map is drawn on every
    call from the trial stream (a randomized choice of mapping).
    """

    name = "gl-image"

    def __init__(self, d: int, seed: int | None = 0):
        self.d = d
        self.seed = seed
        self.params = {"seed": seed}
        self._lb = leading_bit_reduction(d)
        if seed is not None:
            super().__init__(_image(self._lb, random_gl2(d, np.random.default_rng(seed))))

    def __call__(self, view, rng):
        if self.seed is None:
            self.base = _image(self._lb, random_gl2(self.d, rng))
        return super().__call__(view, rng)


def _image(p: PartitionReduction, m: Gl2Map) -> PartitionReduction:
    labels = np.empty_like(p.labels)
    labels[m.apply_array(space_array(p.d))] = p.labels
    return PartitionReduction(p.d, labels=labels, validated=p.validated)


class SampleBasisMapping:
    """Leading-bit reduction in coordinates adapted to the sample.

    The weight-1 sample vectors, scanned by weight descending and vector
    ascending, are taken greedily into a basis that is completed with unit
    vectors; the map sending unit vector k to basis vector k carries the
    leading-bit reduction along, and the result is restricted to the
    non-sample.
    """

    name = "sample-basis"

    def __init__(self, d: int):
        self.d = d
        self.params = {}
        self._lb = leading_bit_reduction(d)

    def __call__(self, view: SampleView, rng: np.random.Generator) -> PartitionReduction:
        basis = Gf2Basis(self.d)
        cols = [v for v in view.positive if basis.insert(v)]
        cols += [1 << k for k in range(self.d) if basis.insert(1 << k)]
        labels = _backend.kernels.restrict_labels(_image(self._lb, Gl2Map(tuple(cols))).labels, view.sample)
        return PartitionReduction(self.d, labels=labels, validated=True)


MAPPINGS = {
    "leading-bit": LeadingBitMapping,
    "gl-image": GlImageMapping,
    "sample-basis": SampleBasisMapping,
}


def make_mapping(d: int, spec: dict | str):
    """Build a mapping from ``{"name": ..., **params}`` or a bare name."""
    if isinstance(spec, str):
        spec = {"name": spec}
    params = dict(spec)
    name = params.pop("name", None)
    if name not in MAPPINGS:
        raise ConfigError(f"unknown mapping {name!r}; choose from {sorted(MAPPINGS)}")
    try:
        return MAPPINGS[name](d, **params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for mapping {name!r}: {exc}") from None


def opt_on_partition(p: PartitionReduction, x2: Iterable[int]) -> int:
    """opt_P for indicator weights: the number of parts that X_2 meets."""
    labels = p.labels
    return len({int(labels[v]) for v in x2} - {-1})


@dataclass
class TrialRecord:
    trial: int
    opt_M: int
    opt_P: int
    x1_size: int
    removals: int
    covered: int
    bound_ok: bool
    sample_size: int


def _check_mapping_output(p: PartitionReduction, view: SampleView, rng: np.random.Generator) -> None:
    if p.d != view.d:
        raise InvalidMappingError("mapping changed the dimension")
    if view.sample.size and (p.labels[view.sample] >= 0).any():
        raise InvalidMappingError("mapping placed a sample vector in a part")
    if p.n <= 1 << 12 and p.d <= 12:
        cert = check_reduction_exact(p)
    else:
        cert = check_reduction_randomized(p, 64, rng)
    if not cert.valid:
        raise InvalidMappingError(f"mapping output is not a reduction: witness {cert.witness}")


def run_trial(
    d: int,
    mapping,
    sample_size: int,
    rng: np.random.Generator,
    check: bool = False,
    trial: int = 0,
) -> TrialRecord:
    """One draw of X, S and the mapping's partition matroid.

    Also checks opt_P(X_2) <= |X_2 ∩ ∪_{i∈T} P_i| + removals, where T and the
    removal count come from the heavy-part extraction on P (X_2 counted
    without repeats).
    """
    x = sample_adversarial_weights(d, rng)
    split = split_sample(x, sample_size, rng)
    view = SampleView.of(split)
    p = mapping(view, rng)
    if check:
        _check_mapping_output(p, view, np.random.default_rng([trial, 1]))
    opt_p = opt_on_partition(p, split.x2)
    heavy = heavy_parts_from_sizes(p.part_sizes, d, strict=p.validated)
    t_set = set(heavy.t_set)
    covered = sum(1 for v in set(split.x2) if int(p.labels[v]) in t_set)
    return TrialRecord(
        trial=trial,
        opt_M=x.opt(),
        opt_P=opt_p,
        x1_size=len(split.x1),
        removals=heavy.removals,
        covered=covered,
        bound_ok=opt_p <= covered + heavy.removals,
        sample_size=sample_size,
    )


def trivial_greedy(d: int, arrival: Iterable) -> list[int]:
    """Accept each arriving element of positive weight that keeps the set independent.

    ``arrival`` holds :class:`WeightedElement` objects or ``(vector, weight)``
    pairs in arrival order.
    """
    basis = Gf2Basis(check_dim(d))
    accepted = []
    for e in arrival:
        v, w = (e.vector, e.weight) if isinstance(e, WeightedElement) else e
        if w > 0 and basis.insert(v):
            accepted.append(v)
    return accepted


def _trivial_trial(d: int, sample_size: int, rng: np.random.Generator, trial: int) -> TrialRecord:
    # Zero-weight elements are never accepted, so only the order of the
    # weight-1 elements matters.
    x = sample_adversarial_weights(d, rng)
    order = rng.permutation(np.asarray(x.support, dtype=np.int64)).tolist()
    got = len(trivial_greedy(d, [(v, 1) for v in order]))
    opt_m = x.opt()
    return TrialRecord(trial, opt_m, got, 0, 0, got, got == opt_m, 0)


@dataclass
class ExperimentConfig:
    d: int
    trials: int
    seed: int
    sample_size: int | list[int] | None = None
    fraction: float | None = None
    mapping: dict = field(default_factory=lambda: {"name": "leading-bit"})
    algorithm: str = "partition"
    check: bool = False

    def __post_init__(self):
        try:
            self.d = check_dim(self.d, ENUM_MAX_DIM)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials must be a positive integer")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if self.algorithm not in ("partition", "trivial-greedy"):
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if isinstance(self.mapping, str):
            self.mapping = {"name": self.mapping}
        if self.sample_size is not None and self.fraction is not None:
            raise ConfigError("give sample_size or fraction, not both")
        for s in self.sample_sizes():
            if not 0 <= s <= 1 << self.d:
                raise ConfigError(f"sample size {s} outside 0..2^{self.d}")

    def sample_sizes(self) -> list[int]:
        if self.fraction is not None:
            if not 0 <= self.fraction <= 1:
                raise ConfigError("fraction must lie in [0, 1]")
            return [round(self.fraction * (1 << self.d))]
        if self.sample_size is None:
            return [0]
        if isinstance(self.sample_size, list):
            if not self.sample_size:
                raise ConfigError("empty sample-size schedule")
            return [int(s) for s in self.sample_size]
        return [int(self.sample_size)]

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data = dict(data)
        size = data.pop("sample_size", None)
        if isinstance(size, dict) and "fraction" in size:
            data["fraction"] = size["fraction"]
            size = None
        known = {"d", "trials", "seed", "fraction", "mapping", "algorithm", "check"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"d", "trials", "seed"} - set(data)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        return cls(sample_size=size, **data)

    def to_dict(self) -> dict:
        return asdict(self)


def _run_chunk(config: ExperimentConfig, start: int, stop: int) -> list[TrialRecord]:
    sizes = config.sample_sizes()
    mapping = None if config.algorithm == "trivial-greedy" else make_mapping(config.d, config.mapping)
    out = []
    for t in range(start, stop):
        rng = trial_rng(config.seed, t)
        size = sizes[0] if len(sizes) == 1 else sizes[int(rng.integers(len(sizes)))]
        if mapping is None:
            out.append(_trivial_trial(config.d, size, rng, t))
        else:
            out.append(run_trial(config.d, mapping, size, rng, check=config.check, trial=t))
    return out


@dataclass
class ExperimentReport:
    d: int
    trials: int
    algorithm: str
    mapping: str
    sample_sizes: list[int]
    seed: int
    mean_opt_P: float
    mean_opt_M: float
    ratio: float
    std_error: float
    se_opt_P: float
    se_opt_M: float
    bound_checks_passed: int
    bound_checks_failed: int
    max_removals: int
    removal_cap: int
    expected_rank: str
    expected_rank_value: float
    comparator_opt_P: float
    comparator_ratio_times_opt_M: float

    def to_dict(self) -> dict:
        return asdict(self)


def _summarize(config: ExperimentConfig, records: Sequence[TrialRecord]) -> ExperimentReport:
    n = len(records)
    p = np.array([r.opt_P for r in records], dtype=np.int64)
    m = np.array([r.opt_M for r in records], dtype=np.int64)
    # integer sums: identical whatever the chunking
    sp, sm = int(p.sum()), int(m.sum())
    spp, smm, spm = int(p @ p), int(m @ m), int(p @ m)
    mean_p, mean_m = sp / n, sm / n
    if n > 1:
        var_p = (spp - sp * sp / n) / (n - 1)
        var_m = (smm - sm * sm / n) / (n - 1)
        cov = (spm - sp * sm / n) / (n - 1)
    else:
        var_p = var_m = cov = 0.0
    ratio = mean_p / mean_m if mean_m else float("nan")
    if mean_m:
        var_r = (var_p - 2 * ratio * cov + ratio * ratio * var_m) / (n * mean_m * mean_m)
        se_ratio = math.sqrt(max(var_r, 0.0))
    else:
        se_ratio = float("nan")
    exact = exact_expected_rank(config.d)
    passed = sum(1 for r in records if r.bound_ok)
    mapping_name = "none" if config.algorithm == "trivial-greedy" else config.mapping.get("name", "")
    return ExperimentReport(
        d=config.d,
        trials=n,
        algorithm=config.algorithm,
        mapping=mapping_name,
        sample_sizes=config.sample_sizes(),
        seed=config.seed,
        mean_opt_P=mean_p,
        mean_opt_M=mean_m,
        ratio=ratio,
        std_error=se_ratio,
        se_opt_P=math.sqrt(max(var_p, 0.0) / n),
        se_opt_M=math.sqrt(max(var_m, 0.0) / n),
        bound_checks_passed=passed,
        bound_checks_failed=n - passed,
        max_removals=max(r.removals for r in records),
        removal_cap=math.isqrt(64 * config.d - 1) + 1,
        expected_rank=str(exact),
        expected_rank_value=float(exact),
        comparator_opt_P=2 * config.d**0.75,
        comparator_ratio_times_opt_M=4 * config.d**-0.25 * mean_m,
    )


def run_experiment(
    config: ExperimentConfig, jobs: int = 1, keep_records: bool = False
) -> ExperimentReport | tuple[ExperimentReport, list[TrialRecord]]:
    """Run ``config.trials`` independent trials and aggregate them.

    Trial ``t`` draws from its own stream seeded by ``(seed, t)``, so results
    do not depend on ``jobs``.
    """
    if config.trials < 1:
        raise ConfigError("trials must be >= 1")
    if jobs <= 1:
        records = _run_chunk(config, 0, config.trials)
    else:
        step = -(-config.trials // (jobs * 4))
        bounds = [(s, min(s + step, config.trials)) for s in range(0, config.trials, step)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = pool.map(_run_chunk, [config] * len(bounds), *zip(*bounds))
            records = [r for chunk in chunks for r in chunk]
    report = _summarize(config, records)
    return (report, records) if keep_records else report


def records_csv(records: Sequence[TrialRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["trial", "opt_M", "opt_P", "x1_size", "removals", "bound_ok"])
    for r in records:
        writer.writerow([r.trial, r.opt_M, r.opt_P, r.x1_size, r.removals, int(r.bound_ok)])
    return buf.getvalue()


def trend(
    dims: Sequence[int],
    trials: int,
    seed: int,
    mapping: dict | str = "leading-bit",
    fraction: float = 0.5,
    jobs: int = 1,
) -> list[ExperimentReport]:
    """Mean opt_P / opt_M per dimension, for eyeballing against d^(-1/4)."""
    if isinstance(mapping, str):
        mapping = {"name": mapping}
    return [
        run_experiment(ExperimentConfig(d=d, trials=trials, seed=seed, fraction=fraction, mapping=mapping), jobs)
        for d in dims
    ]
