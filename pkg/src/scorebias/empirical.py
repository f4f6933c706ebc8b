"""Weighted empirical distributions and the four-cell group split.

Every metric in the package is evaluated on :class:`EmpiricalDist` objects:
tied samples are merged into a single support point carrying the summed
weight, the CDF is the right-continuous step function and the quantile is
the generalized inverse ``inf{x : p <= F(x)}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Sequence

import numpy as np

if TYPE_CHECKING:
    from .ingest import AuditFrame

WEIGHT_TOL = 1e-12


class UndefinedConditionalError(ValueError):
    """A (group, outcome) cell has no samples, so its conditional is undefined."""

    def __init__(self, cell: str):
        super().__init__(f"undefined conditional: cell {cell} is empty")
        self.cell = cell


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class EmpiricalDist:
    """Discrete distribution on strictly increasing support points.

    Attributes
    ----------
    points : ndarray
        Distinct support points, strictly increasing.
    weights : ndarray
        Positive probabilities of the points, summing to one.
    cumulative : ndarray
        Running sums of ``weights``; the last entry is exactly 1.
    """

    points: np.ndarray
    weights: np.ndarray
    cumulative: np.ndarray

    def __post_init__(self):
        p, w, c = self.points, self.weights, self.cumulative
        if p.ndim != 1 or p.size == 0:
            raise ValueError("empirical distribution needs at least one point")
        if not (p.shape == w.shape == c.shape):
            raise ValueError("points, weights and cumulative must align")
        if not np.all(np.isfinite(p)):
            raise ValueError("support points must be finite")
        if p.size > 1 and not np.all(np.diff(p) > 0):
            raise ValueError("support points must be strictly increasing")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        if abs(w.sum() - 1.0) > WEIGHT_TOL * max(1, p.size):
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")

    # -- construction -------------------------------------------------------

    @classmethod
    def from_samples(cls, values, weights=None) -> "EmpiricalDist":
        """Build from raw samples, merging ties.

        With ``weights=None`` every sample counts once; the cumulative sums
        are then formed from integer counts, so ``F(x)`` is exactly
        ``count(X <= x) / n`` in floating point.
        """
        values = np.asarray(values, dtype=float).ravel()
        if values.size == 0:
            raise ValueError("cannot build a distribution from zero samples")
        if weights is None:
            points, counts = np.unique(values, return_counts=True)
            cum = np.cumsum(counts) / values.size
            w = counts / values.size
        else:
            weights = np.asarray(weights, dtype=float).ravel()
            if weights.shape != values.shape:
                raise ValueError("weights must match values")
            if np.any(weights < 0):
                raise ValueError("weights must be nonnegative")
            keep = weights > 0
            points, inverse = np.unique(values[keep], return_inverse=True)
            w = np.bincount(inverse, weights=weights[keep])
            w = w / w.sum()
            cum = np.cumsum(w)
        cum[-1] = 1.0
        return cls(_readonly(points), _readonly(w), _readonly(cum))

    # -- evaluation ---------------------------------------------------------

    @property
    def size(self) -> int:
        return self.points.size

    def ecdf(self, s):
        """P(X <= s); right-continuous, vectorized over ``s``."""
        return self._padded()[np.searchsorted(self.points, s, side="right")]

    def ecdf_left(self, s):
        """P(X < s), the left limit of :meth:`ecdf`."""
        return self._padded()[np.searchsorted(self.points, s, side="left")]

    def _padded(self) -> np.ndarray:
        # cumulative with a leading 0, indexed by searchsorted positions
        return np.concatenate([[0.0], self.cumulative])

    def quantile(self, p):
        """Generalized inverse ``inf{x : p <= F(x)}`` for ``p`` in [0, 1]."""
        p_arr = np.asarray(p, dtype=float)
        if np.any((p_arr < 0) | (p_arr > 1)) or np.any(np.isnan(p_arr)):
            raise ValueError("quantile level must lie in [0, 1]")
        idx = np.searchsorted(self.cumulative, p_arr, side="left")
        out = self.points[np.minimum(idx, self.size - 1)]
        return out if out.ndim else float(out)

    def mean(self) -> float:
        return float(np.dot(self.points, self.weights))

    def pushforward(self, fn: Callable[[np.ndarray], np.ndarray]) -> "EmpiricalDist":
        """Distribution of ``fn(X)``; points that collide are merged."""
        return EmpiricalDist.from_samples(fn(self.points), self.weights)

    def __repr__(self):
        return f"EmpiricalDist(n_points={self.size}, range=[{self.points[0]!r}, {self.points[-1]!r}])"


def ecdf(dist: EmpiricalDist, s):
    return dist.ecdf(s)


def quantile(dist: EmpiricalDist, p):
    return dist.quantile(p)


def mixture(components: Sequence[EmpiricalDist], weights: Sequence[float]) -> EmpiricalDist:
    """Mixture distribution ``sum_i weights[i] * components[i]``.

    The cumulative sums of the result are evaluated as the weighted sum of
    the component CDFs at the union of supports, so the mixture CDF agrees
    with ``sum_i w_i F_i(s)`` pointwise up to rounding.
    """
    weights = np.asarray(weights, dtype=float)
    if len(components) != weights.size or weights.size == 0:
        raise ValueError("need one weight per component")
    if np.any(weights < 0):
        raise ValueError("mixture weights must be nonnegative")
    total = weights.sum()
    if abs(total - 1.0) > WEIGHT_TOL * max(1, weights.size):
        raise ValueError(f"mixture weights sum to {total!r}, not 1")
    active = [(c, w) for c, w in zip(components, weights) if w > 0]
    points = np.unique(np.concatenate([c.points for c, _ in active]))
    w = np.zeros(points.size)
    for c, wc in active:
        w[np.searchsorted(points, c.points)] += wc * c.weights
    w /= total
    cum = sum(wc * c.ecdf(points) for c, wc in active) / total
    cum[-1] = 1.0
    return EmpiricalDist(_readonly(points), _readonly(w), _readonly(cum))


CELLS = ("a0", "a1", "b0", "b1")


@dataclass(frozen=True, eq=False)
class GroupSplit:
    """The four conditional score distributions S_{ay} and their joint weights.

    ``w_a0`` etc. are the empirical joint probabilities P(A=a, Y=0); ``dist_a``
    and ``dist_b`` are the group marginals used by the independence concept.
    """

    dist_a0: EmpiricalDist
    dist_a1: EmpiricalDist
    dist_b0: EmpiricalDist
    dist_b1: EmpiricalDist
    dist_a: EmpiricalDist
    dist_b: EmpiricalDist
    pooled: EmpiricalDist
    w_a0: float
    w_a1: float
    w_b0: float
    w_b1: float
    counts: dict

    @property
    def w_0(self) -> float:
        return self.w_a0 + self.w_b0

    @property
    def w_1(self) -> float:
        return self.w_a1 + self.w_b1

    def cell(self, name: str) -> EmpiricalDist:
        return getattr(self, f"dist_{name}")

    def cell_weight(self, name: str) -> float:
        return getattr(self, f"w_{name}")

    def swapped(self) -> "GroupSplit":
        """Same split with the roles of group a and group b exchanged."""
        c = self.counts
        return GroupSplit(
            self.dist_b0, self.dist_b1, self.dist_a0, self.dist_a1,
            self.dist_b, self.dist_a, self.pooled,
            self.w_b0, self.w_b1, self.w_a0, self.w_a1,
            {"a0": c["b0"], "a1": c["b1"], "b0": c["a0"], "b1": c["a1"]},
        )


def split_from_cells(cells: dict) -> GroupSplit:
    """Build a :class:`GroupSplit` from raw per-cell score arrays.

    ``cells`` maps each of ``"a0", "a1", "b0", "b1"`` to a 1-d array of scores.
    """
    arrays = {k: np.asarray(cells[k], dtype=float).ravel() for k in CELLS}
    for k in CELLS:
        if arrays[k].size == 0:
            raise UndefinedConditionalError(k)
    counts = {k: int(arrays[k].size) for k in CELLS}
    n = sum(counts.values())
    dists = {k: EmpiricalDist.from_samples(arrays[k]) for k in CELLS}
    return GroupSplit(
        dist_a0=dists["a0"], dist_a1=dists["a1"], dist_b0=dists["b0"], dist_b1=dists["b1"],
        dist_a=EmpiricalDist.from_samples(np.concatenate([arrays["a0"], arrays["a1"]])),
        dist_b=EmpiricalDist.from_samples(np.concatenate([arrays["b0"], arrays["b1"]])),
        pooled=EmpiricalDist.from_samples(np.concatenate([arrays[k] for k in CELLS])),
        w_a0=counts["a0"] / n, w_a1=counts["a1"] / n,
        w_b0=counts["b0"] / n, w_b1=counts["b1"] / n,
        counts=counts,
    )


def split_groups(frame: "AuditFrame") -> GroupSplit:
    """Split an audit frame into the four (group, outcome) conditionals."""
    s, in_b, y = frame.scores, frame.in_group_b, frame.outcomes
    return split_from_cells({
        "a0": s[~in_b & (y == 0)],
        "a1": s[~in_b & (y == 1)],
        "b0": s[in_b & (y == 0)],
        "b1": s[in_b & (y == 1)],
    })
