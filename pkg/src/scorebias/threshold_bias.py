"""Classifier bias at a single decision threshold.

A score induces the classifier "accept if S > s". For each threshold the
bias is a difference of rates between the groups, oriented so that a
positive value favors group b:

* IND: positive rate difference, ``F_a(s) - F_b(s)``
* EO:  true positive rate difference on Y=0, ``F_a0(s) - F_b0(s)``
* PE:  false positive rate difference on Y=1, ``F_a1(s) - F_b1(s)``
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .empirical import EmpiricalDist, GroupSplit
from .ingest import ScoreRange


class Concept(str, Enum):
    IND = "IND"
    EO = "EO"
    PE = "PE"


def conditional_pair(split: GroupSplit, concept) -> tuple:
    """``(dist_a, dist_b)`` compared by ``concept``."""
    concept = Concept(concept)
    if concept is Concept.IND:
        return split.dist_a, split.dist_b
    if concept is Concept.EO:
        return split.dist_a0, split.dist_b0
    return split.dist_a1, split.dist_b1


def cbias_at(split: GroupSplit, concept, s, inclusive: bool = False):
    """Signed classifier bias at threshold(s) ``s``.

    With ``inclusive=True`` the classifier accepts ``S >= s`` instead, i.e.
    the left limits of the CDFs are compared. The two only differ at support
    points.
    """
    da, db = conditional_pair(split, concept)
    if inclusive:
        return da.ecdf_left(s) - db.ecdf_left(s)
    return da.ecdf(s) - db.ecdf(s)


@dataclass(frozen=True, eq=False)
class ThresholdCurve:
    thresholds: np.ndarray
    values: np.ndarray
    concept: Concept
    weights: Optional[np.ndarray] = None
    inclusive: bool = False


def cbias_curve(split: GroupSplit, concept, grid: Union[None, int, np.ndarray] = None,
                score_range: Optional[ScoreRange] = None,
                inclusive: bool = False) -> ThresholdCurve:
    """Sample the threshold bias on a grid.

    ``grid=None`` uses the pooled support points and attaches the pooled
    point weights, so ``sum(weights * |values|)`` with ``inclusive=True``
    reproduces the score-weighted bias. An integer ``k`` gives the
    midpoints of ``k`` equal cells over ``score_range``; an array is used
    as given.
    """
    weights = None
    if grid is None:
        thresholds = split.pooled.points
        weights = split.pooled.weights
    elif np.isscalar(grid):
        k = int(grid)
        if k < 1:
            raise ValueError("grid needs at least one cell")
        if score_range is None:
            raise ValueError("a uniform grid needs a score range")
        thresholds = score_range.lo + (np.arange(k) + 0.5) * (score_range.length / k)
        weights = np.full(k, 1.0 / k)
    else:
        thresholds = np.sort(np.asarray(grid, dtype=float))
        if thresholds.size == 0:
            raise ValueError("empty threshold grid")
    values = cbias_at(split, concept, thresholds, inclusive=inclusive)
    return ThresholdCurve(thresholds, values, Concept(concept), weights, inclusive)
