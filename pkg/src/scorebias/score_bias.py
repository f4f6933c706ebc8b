"""Score-level disparity: expected absolute threshold bias over all thresholds.

``uniform`` weighting draws the threshold uniformly from the score range and
equals ``W1(S_ay, S_by) / |range|``. ``score`` weighting draws the threshold
from the pooled score distribution and equals the Wasserstein distance
after quantile transformation by the pooled CDF; it only depends on ranks.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .empirical import GroupSplit
from .ingest import ScoreRange
from .threshold_bias import Concept, conditional_pair
from .wasserstein import SignedTransportResult, w1, w1_quantile_transformed

WEIGHTINGS = ("uniform", "score")


@dataclass(frozen=True)
class BiasResult:
    """Total disparity with its decomposition into parts favoring b (positive)
    and favoring a (negative)."""

    concept: str
    weighting: str
    total: float
    positive: float
    negative: float
    p_value: Optional[float] = None
    config: dict = field(default_factory=dict)

    @property
    def pos_share(self) -> float:
        return self.positive / self.total if self.total > 0 else 0.0

    @property
    def neg_share(self) -> float:
        return self.negative / self.total if self.total > 0 else 0.0

    def with_p_value(self, p_value: float) -> "BiasResult":
        return replace(self, p_value=float(p_value))

    @property
    def label(self) -> str:
        return self.concept if self.weighting == "n/a" else f"{self.concept}^{self.weighting}"


def from_transport(concept: str, weighting: str, parts: SignedTransportResult,
                   config: Optional[dict] = None) -> BiasResult:
    # clip rounding noise; a disparity is a probability-scale quantity
    total = min(max(parts.total, 0.0), 1.0)
    return BiasResult(concept, weighting, total, parts.positive_part, parts.negative_part,
                      config=dict(config or {}))


def score_bias(split: GroupSplit, concept, weighting: str = "score",
               score_range: Optional[ScoreRange] = None,
               ties: str = "transform") -> BiasResult:
    """Expected absolute classifier bias for IND, EO or PE.

    Parameters
    ----------
    split : GroupSplit
    concept : Concept or str
    weighting : {"uniform", "score"}
    score_range : ScoreRange
        Required for uniform weighting; its length normalizes the distance.
    ties : {"transform", "interpolate"}
        Tie convention for score weighting, see
        :func:`~scorebias.wasserstein.w1_quantile_transformed`.
    """
    concept = Concept(concept)
    da, db = conditional_pair(split, concept)
    if weighting == "uniform":
        if score_range is None:
            raise ValueError("uniform weighting needs the score range")
        parts = w1(da, db).scaled(1.0 / score_range.length)
        config = {"range": [score_range.lo, score_range.hi]}
    elif weighting == "score":
        parts = w1_quantile_transformed(da, db, split.pooled, ties=ties)
        config = {"ties": ties}
    else:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}, got {weighting!r}")
    return from_transport(concept.value, weighting, parts, config)


def mean_gap_lower_bound(split: GroupSplit, concept, weighting: str = "score",
                         score_range: Optional[ScoreRange] = None) -> float:
    """Difference of group means (uniform) or of mean pooled ranks (score).

    Never exceeds the matching :func:`score_bias` total.
    """
    da, db = conditional_pair(split, Concept(concept))
    if weighting == "uniform":
        if score_range is None:
            raise ValueError("uniform weighting needs the score range")
        return abs(db.mean() - da.mean()) / score_range.length
    if weighting == "score":
        F = split.pooled.ecdf
        return abs(float(np.dot(db.weights, F(db.points)) - np.dot(da.weights, F(da.points))))
    raise ValueError(f"weighting must be one of {WEIGHTINGS}, got {weighting!r}")
