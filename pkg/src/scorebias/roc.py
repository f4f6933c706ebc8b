"""ROC curves between empirical distributions and curve-difference disparities.

``roc_curve(G, H)`` sweeps the rule "accept if S > u" over every support
point; ``H`` supplies the false-positive axis and ``G`` the true-positive
axis. Consecutive operating points are joined linearly, so tied mass in both
distributions becomes a diagonal segment and ``roc_curve(X, X)`` is exactly
the diagonal. Vertical segments (mass in ``G`` only) are kept as repeated
false-positive rates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .empirical import EmpiricalDist, GroupSplit
from .score_bias import BiasResult, from_transport
from .wasserstein import SignedTransportResult, _parts, linear_positive_area


@dataclass(frozen=True, eq=False)
class RocCurve:
    """Piecewise-linear curve through ``(fpr[i], tpr[i])``.

    Both arrays are nondecreasing, start at 0 and end at 1. Equal
    consecutive ``fpr`` values encode a vertical segment.
    """

    fpr: np.ndarray
    tpr: np.ndarray

    def segment_values(self, lo, hi):
        """Values at ``lo`` and ``hi`` of the linear piece spanning ``(lo, hi)``.

        ``(lo, hi)`` must not contain a breakpoint, so the result gives the
        right limit at ``lo`` and the left limit at ``hi``.
        """
        mid = (lo + hi) / 2
        j = np.clip(np.searchsorted(self.fpr, mid, side="right") - 1, 0, self.fpr.size - 2)
        f0, f1 = self.fpr[j], self.fpr[j + 1]
        t0, t1 = self.tpr[j], self.tpr[j + 1]
        slope = (t1 - t0) / (f1 - f0)
        return t0 + slope * (lo - f0), t0 + slope * (hi - f0)


def roc_curve(G: EmpiricalDist, H: EmpiricalDist) -> RocCurve:
    """ROC of positives ``G`` against negatives ``H``."""
    u = np.union1d(G.points, H.points)[::-1]
    fpr = np.concatenate([1.0 - H.ecdf(u), [1.0]])
    tpr = np.concatenate([1.0 - G.ecdf(u), [1.0]])
    # the largest threshold gives exactly (0, 0); drop rounding residue
    fpr[0] = tpr[0] = 0.0
    return RocCurve(np.maximum.accumulate(fpr), np.maximum.accumulate(tpr))


def curve_auc(curve: RocCurve) -> float:
    return float(np.dot(np.diff(curve.fpr), (curve.tpr[:-1] + curve.tpr[1:]) / 2))


def auroc(G: EmpiricalDist, H: EmpiricalDist) -> float:
    """Trapezoid area under :func:`roc_curve`; equals ``P(G > H) + P(G = H) / 2``."""
    return curve_auc(roc_curve(G, H))


def gini(G: EmpiricalDist, H: EmpiricalDist) -> float:
    return 2.0 * auroc(G, H) - 1.0


def curve_abs_difference(c1: RocCurve, c2: RocCurve, sign_base: int = 1) -> SignedTransportResult:
    """Exact ``int_0^1 |c1 - c2|`` split by the sign of ``c1 - c2``.

    Between merged breakpoints both curves are linear, so each cell
    contributes the area of a line segment, with crossings solved exactly.
    """
    grid = np.union1d(c1.fpr, c2.fpr)
    lo, hi = grid[:-1], grid[1:]
    a1, b1 = c1.segment_values(lo, hi)
    a2, b2 = c2.segment_values(lo, hi)
    da, db = a1 - a2, b1 - b2
    width = hi - lo
    pos = np.dot(width, linear_positive_area(da, db))
    neg = np.dot(width, linear_positive_area(-da, -db))
    return _parts(pos, neg, sign_base)


def bias_roc(split: GroupSplit) -> BiasResult:
    """Area between the groups' own ROC curves; positive where b's curve is higher."""
    parts = curve_abs_difference(roc_curve(split.dist_b0, split.dist_b1),
                                 roc_curve(split.dist_a0, split.dist_a1))
    return from_transport("ROC", "n/a", parts)


def bias_xroc(split: GroupSplit) -> BiasResult:
    """Area between the cross-group ROC curves ``(b0 vs a1)`` and ``(a0 vs b1)``.

    Positive where b's favorable class separates better from a's unfavorable
    class than the reverse pairing.
    """
    parts = curve_abs_difference(roc_curve(split.dist_b0, split.dist_a1),
                                 roc_curve(split.dist_a0, split.dist_b1))
    return from_transport("xROC", "n/a", parts)


# -- step-composition curves ------------------------------------------------


@dataclass(frozen=True, eq=False)
class StepCurve:
    """Piecewise-constant curve: ``values[i]`` on ``[edges[i], edges[i+1])``."""

    edges: np.ndarray
    values: np.ndarray

    def __call__(self, t):
        i = np.clip(np.searchsorted(self.edges, t, side="right") - 1, 0, self.values.size - 1)
        return self.values[i]


def roc_step(G: EmpiricalDist, H: EmpiricalDist, inclusive: bool = True) -> StepCurve:
    """``t -> 1 - F_G(F_H^{-1}(1 - t))`` without interpolation.

    ``inclusive=True`` uses the rule "accept if S >= u", i.e. the left limit
    of ``F_G``. Against ``H = Z`` this is the exact integrand of the
    quantile-transformed distance, and ``roc_step(Z, Z)`` is a staircase
    rather than the diagonal when ``Z`` has atoms.
    """
    edges = np.unique(np.concatenate([[0.0, 1.0], 1.0 - H.cumulative]))
    edges = edges[(edges >= 0.0) & (edges <= 1.0)]
    mid = (edges[:-1] + edges[1:]) / 2
    q = H.quantile(1.0 - mid)
    cdf = G.ecdf_left(q) if inclusive else G.ecdf(q)
    return StepCurve(edges, 1.0 - cdf)


def step_abs_difference(s1: StepCurve, s2: StepCurve, sign_base: int = 1) -> SignedTransportResult:
    """Exact ``int_0^1 |s1 - s2|`` for two step curves."""
    grid = np.union1d(s1.edges, s2.edges)
    mid = (grid[:-1] + grid[1:]) / 2
    d = s1(mid) - s2(mid)
    width = np.diff(grid)
    return _parts(np.dot(width, np.maximum(d, 0.0)), np.dot(width, np.maximum(-d, 0.0)), sign_base)


def step_area(s: StepCurve) -> float:
    return float(np.dot(np.diff(s.edges), s.values))
