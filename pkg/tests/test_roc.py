import numpy as np
import pytest

from scorebias.empirical import EmpiricalDist, split_from_cells
from scorebias.roc import (RocCurve, auroc, bias_roc, bias_xroc, curve_abs_difference, gini,
                           roc_curve, roc_step, step_abs_difference, step_area)

from conftest import random_cells


def E(x):
    return EmpiricalDist.from_samples(x)


def ranking_oracle(g, h):
    g, h = np.asarray(g)[:, None], np.asarray(h)[None, :]
    return float(np.mean((g > h) + 0.5 * (g == h)))


def dense_abs_difference(c1, c2, n=200_001):
    t = (np.arange(n) + 0.5) / n
    return float(np.mean(np.abs(np.interp(t, c1.fpr, c1.tpr) - np.interp(t, c2.fpr, c2.tpr))))


def test_self_roc_is_diagonal():
    X = E([0.1, 0.3, 0.3, 0.3, 0.8])
    c = roc_curve(X, X)
    np.testing.assert_allclose(c.fpr, c.tpr, atol=1e-15)
    assert auroc(X, X) == pytest.approx(0.5, abs=1e-15)
    assert gini(X, X) == pytest.approx(0.0, abs=1e-15)


def test_perfect_separation():
    G, H = E([0.7, 0.9]), E([0.1, 0.3])
    c = roc_curve(G, H)
    assert (c.fpr[0], c.tpr[0]) == (0.0, 0.0) and (c.fpr[-1], c.tpr[-1]) == (1.0, 1.0)
    assert 1.0 in c.tpr[c.fpr == 0.0]
    assert auroc(G, H) == 1.0 and gini(G, H) == 1.0
    diag = roc_curve(H, H)
    assert curve_abs_difference(c, diag).total == pytest.approx(0.5, abs=1e-15)


def test_auroc_matches_ranking_oracle():
    rng = np.random.default_rng(0)
    for _ in range(100):
        g = np.round(rng.normal(0.3, 1, rng.integers(1, 300)), int(rng.integers(0, 3)))
        h = np.round(rng.normal(0, 1, rng.integers(1, 300)), int(rng.integers(0, 3)))
        assert abs(auroc(E(g), E(h)) - ranking_oracle(g, h)) < 1e-12


def test_curve_invariants():
    rng = np.random.default_rng(1)
    c = roc_curve(E(np.round(rng.uniform(0, 1, 50), 1)), E(rng.uniform(0, 1, 40)))
    assert np.all(np.diff(c.fpr) >= 0) and np.all(np.diff(c.tpr) >= 0)
    assert (c.fpr[0], c.tpr[0], c.fpr[-1], c.tpr[-1]) == (0, 0, 1, 1)


def test_curve_difference_against_dense_integration():
    rng = np.random.default_rng(2)
    for _ in range(20):
        c1 = roc_curve(E(rng.uniform(0, 1, 30)), E(np.round(rng.uniform(0, 1, 25), 1)))
        c2 = roc_curve(E(rng.uniform(0.2, 1, 20)), E(rng.uniform(0, 1, 35)))
        r = curve_abs_difference(c1, c2)
        assert r.total == pytest.approx(dense_abs_difference(c1, c2), abs=1e-4)
        assert r.total == pytest.approx(r.positive_part + r.negative_part, abs=1e-15)


def test_curve_difference_antisymmetric():
    rng = np.random.default_rng(3)
    c1 = roc_curve(E(rng.uniform(0, 1, 30)), E(rng.uniform(0, 1, 30)))
    c2 = roc_curve(E(rng.uniform(0, 1, 30)), E(rng.uniform(0, 1, 30)))
    a, b = curve_abs_difference(c1, c2), curve_abs_difference(c2, c1)
    assert a.total == pytest.approx(b.total, abs=1e-15)
    assert a.positive_part == pytest.approx(b.negative_part, abs=1e-15)
    assert curve_abs_difference(c1, c1).total == 0.0


def test_vertical_segments_handled():
    c1 = RocCurve(np.array([0.0, 0.0, 1.0]), np.array([0.0, 1.0, 1.0]))
    c2 = RocCurve(np.array([0.0, 0.5, 0.5, 1.0]), np.array([0.0, 0.0, 1.0, 1.0]))
    assert curve_abs_difference(c1, c2).total == pytest.approx(0.5, abs=1e-15)


def test_within_class_identical_groups_zero():
    c = random_cells(4)
    split = split_from_cells({"a0": c["a0"], "a1": c["a1"], "b0": c["a0"], "b1": c["a1"]})
    assert bias_roc(split).total == 0.0 and bias_xroc(split).total == 0.0


def test_auroc_lower_bounds_on_random_splits():
    for seed in range(100):
        split = split_from_cells(random_cells(seed, ties=seed % 2 == 1))
        own = abs(auroc(split.dist_b0, split.dist_b1) - auroc(split.dist_a0, split.dist_a1))
        cross = abs(auroc(split.dist_a0, split.dist_b1) - auroc(split.dist_b0, split.dist_a1))
        r, x = bias_roc(split), bias_xroc(split)
        assert own <= r.total + 1e-12 and cross <= x.total + 1e-12
        assert 0 <= r.total <= 1 and 0 <= x.total <= 1


def test_roc_biases_monotone_invariant():
    c = random_cells(6, ties=True)
    a = split_from_cells(c)
    b = split_from_cells({k: 1 / (1 + np.exp(-8 * (v - 0.5))) for k, v in c.items()})
    assert bias_roc(a).total == pytest.approx(bias_roc(b).total, abs=1e-12)
    assert bias_xroc(a).total == pytest.approx(bias_xroc(b).total, abs=1e-12)


def test_step_self_curve_is_staircase():
    Z = E([1, 1, 2, 3])
    s = roc_step(Z, Z)
    # inclusive rule: area = P(X >= Z') = sum of weights times upper tail
    assert step_area(s) == pytest.approx(0.5 * 1 + 0.25 * 0.5 + 0.25 * 0.25, abs=1e-15)
    assert step_abs_difference(s, s).total == 0.0


def test_step_curve_definition():
    G, H = E([0.1, 0.4, 0.4, 0.9]), E([0.2, 0.4, 0.6])
    s = roc_step(G, H)
    t = np.array([0.1, 0.5, 0.9])
    expected = 1 - G.ecdf_left(H.quantile(1 - t))
    np.testing.assert_allclose(s(t), expected)


def test_compas_roc(compas_split):
    r = bias_roc(compas_split)
    assert abs(r.total - 0.0160) <= 0.010
    assert r.pos_share == pytest.approx(0.46, abs=0.01)
