"""Permutation tests for group parity.

Each replicate shuffles group labels (optionally within strata) and
recomputes the disparity. Replicate ``i`` draws its randomness from a
counter-based generator keyed by ``(seed, attempt, i)``, so results do not
depend on execution order or the number of workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .calibration import NoValidBinError, calibration_bias, calibration_table
from .empirical import UndefinedConditionalError, split_groups
from .ingest import AuditFrame
from .roc import bias_roc, bias_xroc
from .score_bias import BiasResult, score_bias

STRATIFICATIONS = ("none", "by_outcome", "by_bin")
CONCEPTS = ("IND", "EO", "PE", "CALI", "ROC", "xROC")
# replicate totals within this of the observed total count as exceedances
EXCEED_TOL = 1e-12


@dataclass(frozen=True)
class Measure:
    """What to test: a concept with its weighting (and bin count for CALI)."""

    concept: str
    weighting: str = "n/a"
    bins: int = 50
    ties: str = "transform"

    def __post_init__(self):
        if self.concept not in CONCEPTS:
            raise ValueError(f"unknown concept {self.concept!r}")
        if self.concept in ("ROC", "xROC"):
            if self.weighting != "n/a":
                raise ValueError(f"{self.concept} has no weighting")
        elif self.weighting not in ("uniform", "score"):
            raise ValueError(f"{self.concept} needs weighting 'uniform' or 'score'")

    @property
    def label(self) -> str:
        return self.concept if self.weighting == "n/a" else f"{self.concept}^{self.weighting}"

    @property
    def default_stratification(self) -> str:
        if self.concept == "IND":
            return "none"
        if self.concept == "CALI":
            return "by_bin"
        return "by_outcome"

    def evaluate(self, frame: AuditFrame) -> BiasResult:
        if self.concept == "CALI":
            return calibration_bias(calibration_table(frame, self.bins), self.weighting)
        split = split_groups(frame)
        if self.concept == "ROC":
            return bias_roc(split)
        if self.concept == "xROC":
            return bias_xroc(split)
        return score_bias(split, self.concept, self.weighting, frame.score_range, ties=self.ties)


ALL_MEASURES = tuple(
    [Measure(c, w) for c in ("IND", "EO", "PE", "CALI") for w in ("score", "uniform")]
    + [Measure("ROC"), Measure("xROC")]
)


@dataclass(frozen=True)
class PermutationConfig:
    n_permutations: int = 100
    seed: int = 0
    stratification: Optional[str] = None  # None picks the measure's default
    pseudocount: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.n_permutations < 1:
            raise ValueError("n_permutations must be at least 1")
        if self.pseudocount < 0:
            raise ValueError("pseudocount must be nonnegative")
        if self.stratification is not None and self.stratification not in STRATIFICATIONS:
            raise ValueError(f"stratification must be one of {STRATIFICATIONS}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class PermutationOutcome:
    observed: float
    p_value: float
    exceed_count: int
    replicate_totals: tuple
    stratification: str = "none"
    redraws: int = 0


def strata_labels(frame: AuditFrame, stratification: str, bins: int = 50) -> np.ndarray:
    """Integer stratum per sample; labels are shuffled within each stratum."""
    if stratification == "none":
        return np.zeros(frame.n, dtype=np.int64)
    if stratification == "by_outcome":
        return frame.outcomes.astype(np.int64)
    if stratification == "by_bin":
        r = frame.score_range
        edges = np.linspace(r.lo, r.hi, bins + 1)
        return np.clip(np.searchsorted(edges, frame.scores, side="right") - 1, 0, bins - 1)
    raise ValueError(f"stratification must be one of {STRATIFICATIONS}")


def replicate_rng(seed: int, attempt: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, attempt, index, 0]))


def permute_groups(in_group_b: np.ndarray, strata: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Shuffle labels within strata; per-stratum group counts are preserved."""
    out = np.array(in_group_b, copy=True)
    for s in np.unique(strata):
        idx = np.flatnonzero(strata == s)
        out[idx] = out[idx][rng.permutation(idx.size)]
    return out


def permutation_test(frame: AuditFrame, measure: Measure,
                     config: PermutationConfig = PermutationConfig()) -> PermutationOutcome:
    """p-value ``(pseudocount + #{replicate >= observed}) / (n + pseudocount)``.

    Replicates on which the measure is undefined (an empty group/outcome
    cell) are redrawn with a fresh attempt counter, at most
    ``10 * n_permutations`` times in total.
    """
    observed = measure.evaluate(frame).total
    strat = config.stratification or measure.default_stratification
    strata = strata_labels(frame, strat, measure.bins)
    n = config.n_permutations
    max_attempts = 10 * n

    def run(index: int):
        for attempt in range(max_attempts + 1):
            rng = replicate_rng(config.seed, attempt, index)
            permuted = frame.with_groups(permute_groups(frame.in_group_b, strata, rng))
            try:
                return measure.evaluate(permuted).total, attempt
            except (UndefinedConditionalError, NoValidBinError):
                continue
        raise UndefinedConditionalError("permutation (retry cap reached)")

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(run, range(n)))
    else:
        results = [run(i) for i in range(n)]

    redraws = sum(a for _, a in results)
    if redraws > max_attempts:
        raise UndefinedConditionalError("permutation (retry cap reached)")
    totals = tuple(float(t) for t, _ in results)
    exceed = int(sum(t >= observed - EXCEED_TOL for t in totals))
    p = (config.pseudocount + exceed) / (n + config.pseudocount)
    return PermutationOutcome(observed, p, exceed, totals, strat, redraws)
