"""Train/valid/test index partitions: i.i.d., stratified, compositional.

All strategies return disjoint index sets covering 0..n-1 exactly and
are deterministic in their inputs (plus a seed where one applies).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import substream

DEFAULT_RATIOS = (0.6, 0.2, 0.2)


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class PartitionResult:
    train: np.ndarray
    valid: np.ndarray
    test: np.ndarray
    strategy: str
    params: dict = field(default_factory=dict)
    attributes: tuple[str, ...] = ()

    def sizes(self) -> tuple[int, int, int]:
        return len(self.train), len(self.valid), len(self.test)

    def named(self) -> dict[str, np.ndarray]:
        return {"train": self.train, "valid": self.valid, "test": self.test}

    def to_jsonable(self) -> dict:
        return {
            "strategy": self.strategy,
            "params": self.params,
            "attributes": list(self.attributes),
            "train": self.train.tolist(),
            "valid": self.valid.tolist(),
            "test": self.test.tolist(),
        }

    def check(self, n: int):
        all_idx = np.concatenate([self.train, self.valid, self.test])
        if len(all_idx) != n or len(np.unique(all_idx)) != n:
            raise PartitionError("splits must partition 0..n-1 exactly")


def _largest_remainder_sizes(n: int, ratios) -> list[int]:
    """Integer split sizes summing to n; remainders go to earlier splits."""
    quotas = [n * r for r in ratios]
    sizes = [int(np.floor(q)) for q in quotas]
    short = n - sum(sizes)
    order = sorted(range(len(ratios)), key=lambda i: (-(quotas[i] - sizes[i]), i))
    for i in order[:short]:
        sizes[i] += 1
    return sizes


def split_iid(n: int, ratios=DEFAULT_RATIOS, seed: int = 0) -> PartitionResult:
    """Seeded shuffle, then contiguous cuts at rounded boundaries."""
    if n < 3:
        raise PartitionError("need at least 3 samples")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise PartitionError("ratios must sum to 1")
    perm = substream(seed, "split:iid").permutation(n)
    s_train, s_valid, s_test = _largest_remainder_sizes(n, ratios)
    return PartitionResult(
        train=np.sort(perm[:s_train]),
        valid=np.sort(perm[s_train : s_train + s_valid]),
        test=np.sort(perm[s_train + s_valid :]),
        strategy="iid",
        params={"ratios": list(ratios), "seed": seed},
    )


def split_stratified_continuous(values, lo_pct: float = 0.2, hi_pct: float = 0.2,
                                attribute: str = "") -> PartitionResult:
    """Extreme percentiles of a continuous factor become valid and test.

    valid = lowest lo_pct of values, test = highest hi_pct, train = the
    middle. Ties break by ascending index so sizes land within one
    sample of their targets.
    """
    values = np.asarray(values, dtype=np.float64)
    n = len(values)
    if not np.isfinite(values).all():
        raise PartitionError("values must be finite")
    if lo_pct + hi_pct >= 1.0:
        raise PartitionError("lo_pct + hi_pct must be < 1")
    if np.all(values == values[0]):
        raise PartitionError("constant attribute cannot be stratified")
    order = np.argsort(values, kind="stable")  # stable = index-order tiebreak
    k_lo = int(round(n * lo_pct))
    k_hi = int(round(n * hi_pct))
    return PartitionResult(
        train=np.sort(order[k_lo : n - k_hi]),
        valid=np.sort(order[:k_lo]),
        test=np.sort(order[n - k_hi :]),
        strategy="stratified-continuous",
        params={"lo_pct": lo_pct, "hi_pct": hi_pct},
        attributes=(attribute,) if attribute else (),
    )


def split_stratified_discrete(values, ratios=DEFAULT_RATIOS, seed: int = 0,
                              attribute: str = "") -> PartitionResult:
    """Assign whole categories to splits; no category straddles two.

    Categories are placed largest-first into the currently most
    underfilled split (by sample-mass deficit); equal-frequency
    categories are shuffled by the seed first.
    """
    values = np.asarray(values)
    cats, inverse, counts = np.unique(values, return_inverse=True, return_counts=True)
    if len(cats) < 3:
        raise PartitionError("need at least 3 distinct categories")
    n = len(values)

    rng = substream(seed, "split:discrete")
    perm = rng.permutation(len(cats))  # shuffle, then stable-sort by count
    order = perm[np.argsort(-counts[perm], kind="stable")]

    targets = [n * r for r in ratios]
    filled = [0.0, 0.0, 0.0]
    assignment = np.empty(len(cats), dtype=np.int64)
    for ci in order:
        deficits = [targets[s] - filled[s] for s in range(3)]
        s = int(np.argmax(deficits))
        assignment[ci] = s
        filled[s] += counts[ci]

    split_of_sample = assignment[inverse]
    idx = np.arange(n)
    return PartitionResult(
        train=idx[split_of_sample == 0],
        valid=idx[split_of_sample == 1],
        test=idx[split_of_sample == 2],
        strategy="stratified-discrete",
        params={"ratios": list(ratios), "seed": seed,
                "category_splits": {str(cats[i]): int(assignment[i]) for i in range(len(cats))}},
        attributes=(attribute,) if attribute else (),
    )


def split_compositional(values_a, values_b, attributes: tuple[str, str] = ("", "")) -> PartitionResult:
    """Median-quadrant split leaving held-out holes in the joint space.

    Each attribute is cut at its median into low/high halves. Train is
    the two diagonal quadrants (low, low) and (high, high); the two
    off-diagonal quadrants hold zero training samples and are divided
    between valid and test by alternating index rank, which keeps the
    marginal distribution of each attribute comparable across all three
    sets. Ratios are 50/25/25 by construction, not 60/20/20.
    """
    a = np.asarray(values_a, dtype=np.float64)
    b = np.asarray(values_b, dtype=np.float64)
    if len(a) != len(b):
        raise PartitionError("attribute arrays must align")
    med_a, med_b = float(np.median(a)), float(np.median(b))
    a_high = a > med_a
    b_high = b > med_b
    if a_high.all() or (~a_high).all() or b_high.all() or (~b_high).all():
        raise PartitionError("degenerate median; attribute is effectively constant")

    idx = np.arange(len(a))
    train = idx[a_high == b_high]
    held = idx[a_high != b_high]  # off-diagonal quadrants, no train samples
    test = held[0::2]
    valid = held[1::2]
    return PartitionResult(
        train=train,
        valid=valid,
        test=test,
        strategy="compositional",
        params={"median_a": med_a, "median_b": med_b, "ratios": [0.5, 0.25, 0.25]},
        attributes=attributes if attributes[0] else (),
    )


def ks_statistic(sample_a, sample_b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    a = np.sort(np.asarray(sample_a, dtype=np.float64))
    b = np.sort(np.asarray(sample_b, dtype=np.float64))
    both = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, both, side="right") / len(a)
    cdf_b = np.searchsorted(b, both, side="right") / len(b)
    return float(np.abs(cdf_a - cdf_b).max())
