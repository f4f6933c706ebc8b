"""Binned calibration curves per group and the calibration bias.

Within each score bin the realized favorable rate ``P(Y=0 | group, bin)`` of
the two groups is compared. A positive difference means group b receives a
score that overstates its realized favorable rate relative to group a,
i.e. the score favors b at that score level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ingest import AuditFrame
from .score_bias import BiasResult

WEIGHTINGS = ("uniform", "score")


class NoValidBinError(ValueError):
    """No bin holds samples of both groups, so no rate gap is defined."""


@dataclass(frozen=True, eq=False)
class CalibrationTable:
    """Per-bin counts and favorable rates for both groups.

    Attributes
    ----------
    bin_edges : ndarray
        ``bins + 1`` equal-width edges spanning the score range.
    count_a, count_b : ndarray
        Samples per bin and group.
    favorable_a, favorable_b : ndarray
        Samples with ``Y = 0`` per bin and group.
    rate_a, rate_b : ndarray
        Favorable rates; NaN where the group has no samples in the bin.
    pooled_weight : ndarray
        Share of all samples falling in each bin.
    valid : ndarray
        Bins where both groups are present.
    """

    bin_edges: np.ndarray
    count_a: np.ndarray
    count_b: np.ndarray
    favorable_a: np.ndarray
    favorable_b: np.ndarray
    rate_a: np.ndarray
    rate_b: np.ndarray
    pooled_weight: np.ndarray
    valid: np.ndarray

    @property
    def bins(self) -> int:
        return self.bin_edges.size - 1

    @property
    def n_invalid(self) -> int:
        return int(np.count_nonzero(~self.valid))

    @property
    def midpoints(self) -> np.ndarray:
        return (self.bin_edges[:-1] + self.bin_edges[1:]) / 2

    @property
    def signed_gap(self) -> np.ndarray:
        """``rate_a - rate_b`` per bin; positive favors b."""
        return self.rate_a - self.rate_b

    def well_calibration_gap(self):
        """``(|rate_a - midpoint|, |rate_b - midpoint|)`` for scores on [0, 1]."""
        mid = self.midpoints
        return np.abs(self.rate_a - mid), np.abs(self.rate_b - mid)


def calibration_table(frame: AuditFrame, bins: int = 50) -> CalibrationTable:
    """Equal-width binning of the frame's score range into ``bins`` cells.

    The last bin is closed on the right so the range maximum is counted.
    """
    if int(bins) != bins or bins < 2:
        raise ValueError(f"need at least 2 bins, got {bins!r}")
    bins = int(bins)
    r = frame.score_range
    edges = np.linspace(r.lo, r.hi, bins + 1)
    idx = np.clip(np.searchsorted(edges, frame.scores, side="right") - 1, 0, bins - 1)
    fav = frame.outcomes == 0
    in_b = frame.in_group_b

    def count(mask):
        return np.bincount(idx[mask], minlength=bins)

    count_a, count_b = count(~in_b), count(in_b)
    fav_a, fav_b = count(~in_b & fav), count(in_b & fav)
    with np.errstate(invalid="ignore", divide="ignore"):
        rate_a = np.where(count_a > 0, fav_a / np.maximum(count_a, 1), np.nan)
        rate_b = np.where(count_b > 0, fav_b / np.maximum(count_b, 1), np.nan)
    pooled = (count_a + count_b) / frame.n
    valid = (count_a > 0) & (count_b > 0)
    return CalibrationTable(edges, count_a, count_b, fav_a, fav_b, rate_a, rate_b,
                            pooled, valid)


def calibration_bias(table: CalibrationTable, weighting: str = "score") -> BiasResult:
    """Mean absolute gap between the groups' calibration curves.

    Invalid bins are dropped. ``uniform`` averages over the remaining bins,
    ``score`` weights them by their pooled frequency renormalized to one.
    """
    v = table.valid
    if not v.any():
        raise NoValidBinError("no bin contains samples of both groups")
    d = table.signed_gap[v]
    if weighting == "uniform":
        w = np.full(d.size, 1.0 / d.size)
    elif weighting == "score":
        w = table.pooled_weight[v] / table.pooled_weight[v].sum()
    else:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}, got {weighting!r}")
    pos = float(np.dot(w, np.maximum(d, 0.0)))
    neg = float(np.dot(w, np.maximum(-d, 0.0)))
    config = {"bins": table.bins, "invalid_bins": table.n_invalid}
    return BiasResult("CALI", weighting, min(pos + neg, 1.0), pos, neg, config=config)
