"""Numerical verification of the identities and inequalities behind the measures.

Every check returns :class:`TheoremReport` objects. Random sweeps draw
splits from :func:`random_split`, which mixes continuous, skewed and
heavily tied score families so that tie handling is exercised.

Two tie conventions appear (see :mod:`scorebias.wasserstein`). The reported
score-weighted biases use ``ties="transform"``. Statements phrased through
linearly interpolated ROC curves are checked in ``ties="interpolate"``,
the convention in which those curves are the exact integrands.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .empirical import CELLS, EmpiricalDist, GroupSplit, split_from_cells, split_groups
from .ingest import AuditFrame, ScoreRange, UNIT_RANGE
from .roc import (RocCurve, auroc, bias_roc, bias_xroc, curve_abs_difference, gini,
                  roc_curve, roc_step, step_abs_difference)
from .score_bias import mean_gap_lower_bound, score_bias
from .threshold_bias import Concept, cbias_at, conditional_pair
from .wasserstein import w1, w1_quantile_transformed

IDENTITY_TOL = 1e-12
DECOMPOSITION_TOL = 1e-10
INEQUALITY_TOL = 1e-10
INVARIANCE_TOL = 1e-12
ALIGNED_CELLS = 10 ** 6
UNIFORM_GRIDS = (10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5)
RELATIONS = ("equal", "leq", "geq")


@dataclass(frozen=True)
class TheoremReport:
    """Outcome of one check.

    ``max_violation`` is ``|left - right|`` for equalities and the amount by
    which the inequality ``left <relation> right`` fails (0 if it holds).
    Informational reports never fail.
    """

    theorem: str
    relation: str
    left: float
    right: float
    max_violation: float
    tolerance: float
    fixture: str = ""
    informational: bool = False
    cases: int = 1
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.informational or self.max_violation <= self.tolerance

    def line(self) -> str:
        status = "info" if self.informational else ("PASS" if self.passed else "FAIL")
        sym = {"equal": "==", "leq": "<=", "geq": ">="}[self.relation]
        return (f"{status:4}  {self.theorem:32} {self.left:.12g} {sym} {self.right:.12g}  "
                f"max_violation={self.max_violation:.3g} tol={self.tolerance:g} "
                f"cases={self.cases} worst={self.fixture or '-'}")


def _report(theorem, relation, left, right, tol, fixture="", informational=False, **detail):
    left, right = float(left), float(right)
    if relation == "equal":
        v = abs(left - right)
    elif relation == "leq":
        v = max(left - right, 0.0)
    elif relation == "geq":
        v = max(right - left, 0.0)
    else:
        raise ValueError(f"relation must be one of {RELATIONS}")
    return TheoremReport(theorem, relation, left, right, v, tol, fixture, informational,
                         detail=detail)


# -- fixtures ---------------------------------------------------------------


def _draw_scores(rng: np.random.Generator, n: int, family: str, shift: float) -> np.ndarray:
    if family == "uniform":
        s = rng.uniform(0.0, 1.0, n)
    elif family == "power":
        s = rng.uniform(0.0, 1.0, n) ** rng.uniform(0.3, 3.0)
    else:
        s = rng.integers(1, 11, n) / 10.0
    s = np.clip(s + shift, 0.0, 1.0)
    if rng.random() < 0.3:
        s = np.round(s, 1)
    return s


def random_cells(rng: np.random.Generator) -> dict:
    """Four (group, outcome) cells with sizes in [5, 200] and scores in [0, 1]."""
    families = ("uniform", "power", "deciles")
    family = families[rng.integers(len(families))]
    cells = {}
    for k in CELLS:
        shift = (0.15 if k[1] == "0" else -0.15) * rng.random()
        if k[0] == "b":
            shift += rng.normal(0.0, 0.1)
        cells[k] = _draw_scores(rng, int(rng.integers(5, 201)), family, shift)
    return cells


def random_split(seed: int, index: int = 0) -> GroupSplit:
    return split_from_cells(random_cells(np.random.default_rng([seed, index])))


def frame_from_cells(cells: dict, score_range: ScoreRange = UNIT_RANGE) -> AuditFrame:
    scores = np.concatenate([cells[k] for k in CELLS])
    in_b = np.concatenate([np.full(len(cells[k]), k[0] == "b") for k in CELLS])
    y = np.concatenate([np.full(len(cells[k]), int(k[1])) for k in CELLS])
    return AuditFrame.from_arrays(scores, in_b, y, score_range)


def random_frame(seed: int, index: int = 0) -> AuditFrame:
    return frame_from_cells(random_cells(np.random.default_rng([seed, index])))


# -- identities -------------------------------------------------------------


def uniform_riemann(split: GroupSplit, concept, score_range: ScoreRange, k: int) -> float:
    """Midpoint-rule estimate of the mean of ``|cbias|`` over ``k`` equal cells."""
    r = score_range
    mids = r.lo + (np.arange(k) + 0.5) * (r.length / k)
    return float(np.mean(np.abs(cbias_at(split, concept, mids))))


def aligned_riemann(split: GroupSplit, concept, score_range: ScoreRange,
                    cells: int = ALIGNED_CELLS) -> float:
    """Midpoint rule on ``cells`` cells that never straddle a support point."""
    da, db = conditional_pair(split, concept)
    r = score_range
    knots = np.union1d(np.union1d(da.points, db.points), [r.lo, r.hi])
    width = np.diff(knots)
    keep = width > 0
    lo, width = knots[:-1][keep], width[keep]
    per = np.maximum(1, np.floor(cells * width / r.length)).astype(np.int64)
    cell_lo = np.repeat(lo, per)
    cell_w = np.repeat(width / per, per)
    offset = np.arange(per.sum()) - np.repeat(np.cumsum(per) - per, per)
    mids = cell_lo + (offset + 0.5) * cell_w
    return float(np.dot(cell_w, np.abs(cbias_at(split, concept, mids))) / r.length)


def check_uniform_identity(split: GroupSplit, score_range: ScoreRange, concept="EO",
                           grids=UNIFORM_GRIDS, aligned_cells: int = ALIGNED_CELLS,
                           fixture: str = "") -> TheoremReport:
    """Uniform-threshold average of ``|cbias|`` equals ``W1 / |range|``.

    Plain grids must be within ``2 / k`` (the total variation of ``cbias``
    is at most 2); the breakpoint-aligned grid must agree to 1e-6.
    """
    exact = score_bias(split, concept, "uniform", score_range).total
    errors = {k: abs(uniform_riemann(split, concept, score_range, k) - exact) for k in grids}
    excess = max([e - 2.0 / k for k, e in errors.items()] + [0.0])
    estimate = aligned_riemann(split, concept, score_range, aligned_cells)
    rep = _report("uniform_identity", "equal", estimate, exact, 1e-6, fixture,
                  concept=str(Concept(concept).value), grid_errors=errors)
    if excess > 0:
        rep = TheoremReport(rep.theorem, rep.relation, rep.left, rep.right,
                            max(rep.max_violation, excess), rep.tolerance, fixture,
                            detail=rep.detail)
    return rep


def check_quantile_identity(split: GroupSplit, concept="EO", fixture: str = "") -> list:
    """Three routes to the score-weighted bias must coincide.

    The pooled-sample average of ``|cbias|`` (inclusive thresholds) and the
    plain W1 of the pooled-CDF pushforwards are compared with the
    closed form used for reporting.
    """
    da, db = conditional_pair(split, concept)
    Z = split.pooled
    closed = w1_quantile_transformed(da, db, Z).total
    direct = float(np.dot(Z.weights, np.abs(cbias_at(split, concept, Z.points, inclusive=True))))
    pushed = w1(da.pushforward(Z.ecdf), db.pushforward(Z.ecdf)).total
    c = Concept(concept).value
    return [
        _report("quantile_identity_direct", "equal", direct, closed, IDENTITY_TOL, fixture, concept=c),
        _report("quantile_identity_pushforward", "equal", pushed, closed, IDENTITY_TOL, fixture, concept=c),
    ]


def check_mixture(split: GroupSplit, ties: str = "transform", fixture: str = "") -> list:
    """Pooled-weighted distance equals the cell-weighted sum of per-cell distances."""
    out = []
    for concept in ("EO", "PE"):
        da, db = conditional_pair(split, concept)
        whole = w1_quantile_transformed(da, db, split.pooled, ties=ties).total
        parts = sum(split.cell_weight(k) * w1_quantile_transformed(da, db, split.cell(k), ties=ties).total
                    for k in CELLS)
        out.append(_report("mixture_additivity", "equal", whole, parts, IDENTITY_TOL, fixture,
                           concept=concept, ties=ties))
    return out


DIAGONAL = RocCurve(np.array([0.0, 1.0]), np.array([0.0, 1.0]))


def separation_roc_terms(split: GroupSplit, concept="EO", linear: bool = False) -> dict:
    """The four ROC integrals whose cell-weighted sum is the separation bias.

    ``linear=False`` uses inclusive step-composition curves, exact for the
    ``transform`` convention. ``linear=True`` uses interpolated curves with
    the diagonal for the own-cell terms, exact for ``interpolate``.
    """
    y = "0" if Concept(concept) is Concept.EO else "1"
    X, Y = split.cell("a" + y), split.cell("b" + y)
    terms = {}
    for k in CELLS:
        Zk = split.cell(k)
        if linear:
            cx = DIAGONAL if k == "a" + y else roc_curve(X, Zk)
            cy = DIAGONAL if k == "b" + y else roc_curve(Y, Zk)
            terms[k] = curve_abs_difference(cx, cy).total
        else:
            terms[k] = step_abs_difference(roc_step(X, Zk), roc_step(Y, Zk)).total
    return terms


def check_sep_roc_decomposition(split: GroupSplit, fixture: str = "") -> list:
    """EO and PE score-weighted biases as sums of four weighted ROC integrals."""
    out = []
    for concept in ("EO", "PE"):
        for linear, ties in ((False, "transform"), (True, "interpolate")):
            da, db = conditional_pair(split, concept)
            total = w1_quantile_transformed(da, db, split.pooled, ties=ties).total
            terms = separation_roc_terms(split, concept, linear)
            rhs = sum(split.cell_weight(k) * v for k, v in terms.items())
            out.append(_report("separation_roc_decomposition", "equal", total, rhs,
                               DECOMPOSITION_TOL, fixture, concept=concept, ties=ties))
    return out


def check_roc_rewrite(split: GroupSplit, fixture: str = "") -> list:
    """Per-cell distances as areas between linear ROC curves (interpolated ties)."""
    out = []
    for y, other in (("0", "1"), ("1", "0")):
        for g, h in (("a", "b"), ("b", "a")):
            X, Y = split.cell(g + y), split.cell(h + y)
            own = w1_quantile_transformed(X, Y, X, ties="interpolate").total
            area = curve_abs_difference(roc_curve(Y, X), DIAGONAL).total
            out.append(_report("roc_rewrite_own_cell", "equal", own, area, DECOMPOSITION_TOL,
                               fixture, cell=g + y))
            Zc = split.cell(g + other)
            cross = w1_quantile_transformed(X, Y, Zc, ties="interpolate").total
            area = curve_abs_difference(roc_curve(Y, Zc), roc_curve(X, Zc)).total
            out.append(_report("roc_rewrite_cross_cell", "equal", cross, area, DECOMPOSITION_TOL,
                               fixture, cell=g + other))
    return out


# -- inequalities -----------------------------------------------------------


def min_orientation_gini(X: EmpiricalDist, Y: EmpiricalDist) -> float:
    return min(gini(X, Y), gini(Y, X))


def check_bounds_and_inequalities(split: GroupSplit, score_range: ScoreRange = UNIT_RANGE,
                                  fixture: str = "") -> list:
    out = []
    w = [split.cell_weight(k) for k in CELLS]
    roc_b, xroc_b = bias_roc(split).total, bias_xroc(split).total
    g0 = min_orientation_gini(split.dist_a0, split.dist_b0)
    g1 = min_orientation_gini(split.dist_a1, split.dist_b1)
    for ties in ("transform", "interpolate"):
        eo = score_bias(split, "EO", "score", ties=ties).total
        pe = score_bias(split, "PE", "score", ties=ties).total
        out += [
            _report("eo_upper_bound", "leq", eo, 1 - split.w_0 / 2, INEQUALITY_TOL, fixture, ties=ties),
            _report("pe_upper_bound", "leq", pe, 1 - split.w_1 / 2, INEQUALITY_TOL, fixture, ties=ties),
            _report("separation_sum_bound", "leq", eo + pe, 1.5, INEQUALITY_TOL, fixture, ties=ties),
            _report("separation_roc_inequality", "geq", eo + pe,
                    min(w) / 2 * (roc_b + xroc_b + g0 + g1), INEQUALITY_TOL, fixture, ties=ties),
        ]
    for y in "01":
        for g, h in (("a", "b"), ("b", "a")):
            X, Y = split.cell(g + y), split.cell(h + y)
            own = w1_quantile_transformed(X, Y, X, ties="interpolate").total
            out.append(_report("gini_jensen_bound", "geq", own, abs(gini(Y, X)) / 2,
                               INEQUALITY_TOL, fixture, cell=g + y))
    for concept in ("IND", "EO", "PE"):
        for weighting in ("uniform", "score"):
            total = score_bias(split, concept, weighting, score_range).total
            gap = mean_gap_lower_bound(split, concept, weighting, score_range)
            out.append(_report("mean_gap_bound", "geq", total, gap, INEQUALITY_TOL, fixture,
                               concept=concept, weighting=weighting))
    a_own = abs(auroc(split.dist_b0, split.dist_b1) - auroc(split.dist_a0, split.dist_a1))
    a_cross = abs(auroc(split.dist_a0, split.dist_b1) - auroc(split.dist_b0, split.dist_a1))
    out.append(_report("roc_auroc_bound", "geq", roc_b, a_own, INEQUALITY_TOL, fixture))
    out.append(_report("xroc_auroc_bound", "geq", xroc_b, a_cross, INEQUALITY_TOL, fixture))
    return out


# -- constructions ----------------------------------------------------------


def _all_biases(split: GroupSplit, score_range: ScoreRange) -> dict:
    out = {f"{c}^{w}": score_bias(split, c, w, score_range).total
           for c in ("EO", "PE") for w in ("score", "uniform")}
    out["ROC"] = bias_roc(split).total
    out["xROC"] = bias_xroc(split).total
    return out


def check_zero_separation_corollaries(seed: int = 0) -> list:
    """Constructed splits for the zero-separation statements.

    1. b duplicates a in both classes: every separation and ROC bias is 0.
    2. only the favorable classes coincide: ROC and cross-ROC biases agree
       although the unfavorable-class bias is positive.
    3. b is a shifted copy of a: the own-group ROC curves coincide, so the
       ROC bias is 0, while the uniform EO bias equals the shift.
    """
    rng = np.random.default_rng([seed, 7])
    out = []
    cells = random_cells(rng)
    dup = split_from_cells({"a0": cells["a0"], "a1": cells["a1"],
                            "b0": cells["a0"].copy(), "b1": cells["a1"].copy()})
    biases = _all_biases(dup, UNIT_RANGE)
    out.append(_report("zero_separation", "equal", max(biases.values()), 0.0, 1e-10,
                       f"seed={seed}", **biases))

    one = split_from_cells({"a0": cells["a0"], "a1": cells["a1"],
                            "b0": cells["a0"].copy(), "b1": cells["b1"]})
    pe = score_bias(one, "PE", "score").total
    out.append(_report("one_zero_separation", "equal", bias_roc(one).total,
                       bias_xroc(one).total, 1e-10, f"seed={seed}", pe_bias=pe))
    out.append(_report("one_zero_separation_pe_positive", "geq", pe, 0.0, 0.0, f"seed={seed}"))

    shift = 0.25
    a0 = rng.integers(0, 49, 60) / 64.0
    a1 = rng.integers(0, 40, 45) / 64.0
    shifted = split_from_cells({"a0": a0, "a1": a1, "b0": a0 + shift, "b1": a1 + shift})
    out.append(_report("shifted_groups_roc_zero", "equal", bias_roc(shifted).total, 0.0, 1e-10,
                       f"seed={seed}", shift=shift))
    eo_u = score_bias(shifted, "EO", "uniform", UNIT_RANGE).total
    out.append(_report("shifted_groups_eo_uniform", "equal", eo_u, shift / UNIT_RANGE.length,
                       1e-10, f"seed={seed}"))
    return out


# -- invariance -------------------------------------------------------------


MONOTONE_TRANSFORMS: dict = {
    "affine": lambda s: 3.0 * s + 2.0,
    "cubic": lambda s: (2.0 * s - 1.0) ** 3,
    "logistic": lambda s: 1.0 / (1.0 + np.exp(-8.0 * (s - 0.5))),
}


def rank_quantities(frame: AuditFrame) -> dict:
    """Every value that should only depend on the ordering of scores."""
    split = split_groups(frame)
    out = {}
    for c in ("IND", "EO", "PE"):
        for ties in ("transform", "interpolate"):
            out[f"{c}^score[{ties}]"] = score_bias(split, c, "score", ties=ties).total
    out["ROC"] = bias_roc(split).total
    out["xROC"] = bias_xroc(split).total
    for g, h in (("a0", "a1"), ("b0", "b1"), ("b0", "a1"), ("a0", "b1")):
        out[f"AUROC({g},{h})"] = auroc(split.cell(g), split.cell(h))
    return out


def transformed_frame(frame: AuditFrame, fn: Callable) -> AuditFrame:
    r = frame.score_range
    lo, hi = float(fn(np.float64(r.lo))), float(fn(np.float64(r.hi)))
    scores = np.clip(fn(frame.scores), lo, hi)
    return frame.with_scores(scores, ScoreRange(lo, hi))


def check_monotone_invariance(frame: AuditFrame, transforms: Optional[dict] = None,
                              fixture: str = "") -> list:
    """Rank-based values are unchanged by strictly increasing score maps.

    Uniform-weighted biases are reported for information: they are
    unchanged by affine maps (after renormalization) but not by others.
    """
    transforms = MONOTONE_TRANSFORMS if transforms is None else transforms
    base = rank_quantities(frame)
    split = split_groups(frame)
    base_u = {c: score_bias(split, c, "uniform", frame.score_range).total for c in ("IND", "EO", "PE")}
    out = []
    for name, fn in transforms.items():
        moved = transformed_frame(frame, fn)
        new = rank_quantities(moved)
        worst = max(base, key=lambda k: abs(base[k] - new[k]))
        out.append(_report("monotone_invariance", "equal", new[worst], base[worst], INVARIANCE_TOL,
                           fixture, transform=name, quantity=worst))
        msplit = split_groups(moved)
        new_u = {c: score_bias(msplit, c, "uniform", moved.score_range).total for c in base_u}
        worst_u = max(base_u, key=lambda k: abs(base_u[k] - new_u[k]))
        out.append(_report("uniform_weighting_under_transform", "equal", new_u[worst_u],
                           base_u[worst_u], INVARIANCE_TOL, fixture,
                           informational=(name != "affine"), transform=name, quantity=worst_u))
    return out


def check_exchange_quantile(seed: int = 0, fixtures: int = 20) -> list:
    """Transforming by either group or by their mixture gives the same distance.

    Checked for interpolated ties on common-support fixtures. Under the
    ``transform`` convention the statement does not survive atoms; the
    largest discrepancy on the same fixtures is reported for information.
    """
    rng = np.random.default_rng([seed, 11])
    worst = {"interpolate": (0.0, 0.0, ""), "transform": (0.0, 0.0, "")}
    for i in range(fixtures):
        support = np.unique(rng.uniform(0, 1, int(rng.integers(2, 30))))
        X = EmpiricalDist.from_samples(support, rng.uniform(0.05, 1, support.size))
        Y = EmpiricalDist.from_samples(support, rng.uniform(0.05, 1, support.size))
        lam = rng.uniform(0.1, 0.9)
        Z = EmpiricalDist.from_samples(np.concatenate([support, support]),
                                       np.concatenate([lam * X.weights, (1 - lam) * Y.weights]))
        for ties in worst:
            vals = [w1_quantile_transformed(X, Y, D, ties=ties).total for D in (X, Y, Z)]
            hi, lo, _ = worst[ties]
            if max(vals) - min(vals) >= hi - lo:
                worst[ties] = (max(vals), min(vals), f"seed={seed} fixture={i}")
    return [
        _report("exchange_quantile", "equal", *worst["interpolate"][:2], IDENTITY_TOL,
                worst["interpolate"][2]),
        _report("exchange_quantile_transform_ties", "equal", *worst["transform"][:2],
                IDENTITY_TOL, worst["transform"][2], informational=True),
    ]


# -- drivers ----------------------------------------------------------------


def split_checks(split: GroupSplit, score_range: ScoreRange = UNIT_RANGE, fixture: str = "",
                 aligned_cells: int = ALIGNED_CELLS) -> list:
    """All per-split checks."""
    out = [check_uniform_identity(split, score_range, "EO", aligned_cells=aligned_cells,
                                  fixture=fixture)]
    for c in ("IND", "EO", "PE"):
        out += check_quantile_identity(split, c, fixture)
    for ties in ("transform", "interpolate"):
        out += check_mixture(split, ties, fixture)
    out += check_sep_roc_decomposition(split, fixture)
    out += check_roc_rewrite(split, fixture)
    out += check_bounds_and_inequalities(split, score_range, fixture)
    return out


def aggregate(reports: list) -> list:
    """Keep the worst report per theorem id, counting the cases behind it."""
    by_id: dict = {}
    counts: dict = {}
    for r in reports:
        counts[r.theorem] = counts.get(r.theorem, 0) + 1
        cur = by_id.get(r.theorem)
        if cur is None or r.max_violation > cur.max_violation:
            by_id[r.theorem] = r
    return [TheoremReport(r.theorem, r.relation, r.left, r.right, r.max_violation, r.tolerance,
                          r.fixture, r.informational, counts[r.theorem], r.detail)
            for r in (by_id[k] for k in sorted(by_id))]


@dataclass(frozen=True)
class SuiteResult:
    reports: list
    n_splits: int
    seed: int

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    @property
    def failures(self) -> list:
        return [r for r in self.reports if not r.passed]


def run_suite(n_splits: int = 500, seed: int = 0, invariance_splits: int = 50,
              aligned_cells: int = ALIGNED_CELLS) -> SuiteResult:
    """Full sweep over seeded random splits plus the constructed fixtures."""
    reports = []
    for i in range(n_splits):
        fixture = f"seed={seed} split={i}"
        reports += split_checks(random_split(seed, i), UNIT_RANGE, fixture, aligned_cells)
    for i in range(invariance_splits):
        reports += check_monotone_invariance(random_frame(seed, i), fixture=f"seed={seed} split={i}")
    reports += check_zero_separation_corollaries(seed)
    reports += check_exchange_quantile(seed)
    return SuiteResult(aggregate(reports), n_splits, seed)


def run_on_frame(frame: AuditFrame) -> SuiteResult:
    """Per-split checks and monotone invariance on a user-supplied frame."""
    split = split_groups(frame)
    reports = split_checks(split, frame.score_range, "input")
    reports += check_monotone_invariance(frame, fixture="input")
    return SuiteResult(aggregate(reports), 1, 0)
