import numpy as np
import pytest

from scorebias.calibration import (NoValidBinError, calibration_bias, calibration_table)
from scorebias.ingest import AuditFrame, UNIT_RANGE


@pytest.fixture
def seven():
    """2 bins on [0, 1]. Bin 1: a = (fav, unfav), b = (unfav, unfav); bin 2: all favorable."""
    scores = [0.1, 0.2, 0.3, 0.4, 0.7, 0.8, 0.9]
    in_b = [0, 0, 1, 1, 0, 1, 1]
    y = [0, 1, 1, 1, 0, 0, 0]
    return AuditFrame.from_arrays(scores, in_b, y, UNIT_RANGE)


def test_toy_table(seven):
    t = calibration_table(seven, 2)
    np.testing.assert_array_equal(t.rate_a, [0.5, 1.0])
    np.testing.assert_array_equal(t.rate_b, [0.0, 1.0])
    np.testing.assert_allclose(t.pooled_weight, [4 / 7, 3 / 7])
    assert t.count_a.sum() + t.count_b.sum() == 7


def test_toy_bias(seven):
    t = calibration_table(seven, 2)
    u = calibration_bias(t, "uniform")
    s = calibration_bias(t, "score")
    assert u.total == pytest.approx(0.25, abs=1e-15)
    assert s.total == pytest.approx(0.5 * 4 / 7, abs=1e-15)
    # a realizes more favorable outcomes than b at equal score: the score favors b
    assert u.pos_share == 1.0 and s.pos_share == 1.0


def test_all_favorable():
    rng = np.random.default_rng(0)
    frame = AuditFrame.from_arrays(rng.uniform(0, 1, 100), rng.integers(0, 2, 100),
                                   np.zeros(100), UNIT_RANGE)
    t = calibration_table(frame, 10)
    np.testing.assert_array_equal(t.rate_a[t.valid], 1.0)
    np.testing.assert_array_equal(t.rate_b[t.valid], 1.0)
    assert calibration_bias(t).total == 0.0


def test_counts_partition_groups():
    rng = np.random.default_rng(1)
    n = 500
    in_b = rng.integers(0, 2, n)
    frame = AuditFrame.from_arrays(rng.uniform(0, 1, n) ** 2, in_b, rng.integers(0, 2, n), UNIT_RANGE)
    t = calibration_table(frame, 50)
    assert t.count_b.sum() == in_b.sum() and t.count_a.sum() == n - in_b.sum()
    assert t.pooled_weight.sum() == pytest.approx(1.0, abs=1e-12)
    assert t.n_invalid == np.count_nonzero((t.count_a == 0) | (t.count_b == 0))


def test_range_maximum_lands_in_last_bin(seven):
    frame = AuditFrame.from_arrays([0.0, 1.0, 0.5, 1.0], [0, 0, 1, 1], [0, 1, 0, 1], UNIT_RANGE)
    t = calibration_table(frame, 4)
    assert t.count_a[-1] == 1 and t.count_b[-1] == 1


def test_identical_groups_any_bin_count():
    rng = np.random.default_rng(2)
    s = rng.uniform(0, 1, 80)
    y = rng.integers(0, 2, 80)
    frame = AuditFrame.from_arrays(np.concatenate([s, s]), np.repeat([0, 1], 80),
                                   np.concatenate([y, y]), UNIT_RANGE)
    for bins in (2, 3, 7, 50, 61):
        for w in ("uniform", "score"):
            assert calibration_bias(calibration_table(frame, bins), w).total == 0.0


def test_paired_bins_match_sample_average():
    rng = np.random.default_rng(3)
    B = 64
    ya, yb = rng.integers(0, 2, B), rng.integers(0, 2, B)
    scores = np.concatenate([(np.arange(B) + 0.25) / B, (np.arange(B) + 0.75) / B])
    frame = AuditFrame.from_arrays(scores, np.repeat([0, 1], B), np.concatenate([ya, yb]), UNIT_RANGE)
    r = calibration_bias(calibration_table(frame, B), "score")
    assert r.total == pytest.approx(np.mean(np.abs(ya - yb)), abs=1e-12)


def test_swap_preserves_total(seven):
    swapped = seven.with_groups(~seven.in_group_b)
    for w in ("uniform", "score"):
        r = calibration_bias(calibration_table(seven, 2), w)
        s = calibration_bias(calibration_table(swapped, 2), w)
        assert s.total == pytest.approx(r.total) and s.neg_share == r.pos_share


def test_well_calibration_diagnostic(seven):
    gap_a, gap_b = calibration_table(seven, 2).well_calibration_gap()
    np.testing.assert_allclose(gap_a, [0.25, 0.25])
    np.testing.assert_allclose(gap_b, [0.25, 0.25])


def test_errors(seven):
    with pytest.raises(ValueError):
        calibration_table(seven, 1)
    frame = AuditFrame.from_arrays([0.1, 0.9], [0, 1], [0, 1], UNIT_RANGE)
    with pytest.raises(NoValidBinError):
        calibration_bias(calibration_table(frame, 2))
    with pytest.raises(ValueError):
        calibration_bias(calibration_table(seven, 2), "median")
