"""Audit reports and tidy CSV exports.

Reports are plain dictionaries with a fixed layout. Floats are rounded to
10 significant digits only when serialized, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .calibration import calibration_table
from .empirical import CELLS, split_groups
from .ingest import AuditFrame, LoadReport
from .inference import ALL_MEASURES, Measure, PermutationConfig, permutation_test
from .roc import roc_curve
from .threshold_bias import Concept, cbias_at

SIG_DIGITS = 10


def round_sig(x):
    """Round floats to ``SIG_DIGITS`` significant digits, recursively."""
    if isinstance(x, dict):
        return {k: round_sig(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [round_sig(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return None
        return float(f"{x:.{SIG_DIGITS}g}")
    return x


def dumps(report: dict) -> str:
    return json.dumps(round_sig(report), indent=2, allow_nan=False) + "\n"


def parse_measures(spec: Optional[str], bins: int = 50, ties: str = "transform") -> list:
    """``"EO^score,ROC,CALI"`` -> measures; a bare IND/EO/PE/CALI means both weightings."""
    if spec is None or spec.strip().lower() in ("", "all"):
        return [Measure(m.concept, m.weighting, bins, ties) for m in ALL_MEASURES]
    out = []
    for token in (t.strip() for t in spec.split(",")):
        if not token:
            continue
        concept, _, weighting = token.partition("^")
        concept = {"xroc": "xROC", "roc": "ROC"}.get(concept.lower(), concept.upper())
        if weighting:
            weights = [weighting.lower()]
        elif concept in ("ROC", "xROC"):
            weights = ["n/a"]
        else:
            weights = ["score", "uniform"]
        for w in weights:
            m = Measure(concept, w, bins, ties)
            if m not in out:
                out.append(m)
    if not out:
        raise ValueError("no measures selected")
    return out


def measure_entry(measure: Measure, frame: AuditFrame,
                  config: Optional[PermutationConfig]) -> dict:
    result = measure.evaluate(frame)
    entry = {
        "measure": measure.label,
        "concept": result.concept,
        "weighting": result.weighting,
        "total": result.total,
        "positive": result.positive,
        "negative": result.negative,
        "pos_share": result.pos_share,
        "neg_share": result.neg_share,
        "pos_pct": round(100 * result.pos_share, 1),
        "neg_pct": round(100 * result.neg_share, 1),
    }
    if config is not None:
        outcome = permutation_test(frame, measure, config)
        entry.update(p_value=outcome.p_value, exceed_count=outcome.exceed_count,
                     stratification=outcome.stratification)
    entry["config"] = result.config
    return entry


def audit_report(frame: AuditFrame, measures: Iterable[Measure],
                 config: Optional[PermutationConfig], load: Optional[LoadReport] = None,
                 echo: Optional[dict] = None) -> dict:
    """Full audit: dataset summary, configuration echo and one entry per measure.

    ``config=None`` skips the permutation tests.
    """
    split = split_groups(frame)
    dataset = {
        "path": load.path if load else None,
        "rows_read": load.rows_read if load else frame.n,
        "rows_other_groups": load.rows_other_groups if load else 0,
        "rows_rejected": len(load.rejected) if load else 0,
        "n": frame.n,
        "group_a": frame.group_a,
        "group_b": frame.group_b,
        "cell_counts": {k: split.counts[k] for k in CELLS},
        "cell_weights": {k: split.cell_weight(k) for k in CELLS},
    }
    cfg = {
        "score_range": [frame.score_range.lo, frame.score_range.hi],
        "permutations": config.n_permutations if config else 0,
        "seed": config.seed if config else None,
        "pseudocount": config.pseudocount if config else None,
    }
    cfg.update(echo or {})
    return {
        "dataset": dataset,
        "config": cfg,
        "measures": [measure_entry(m, frame, config) for m in measures],
    }


# -- curves -----------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return "" if math.isnan(x) else repr(x)


def _write_rows(path: Path, header: list, rows: Iterable) -> Path:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else _fmt(c) for c in row])
    return path


ROC_PAIRS = (
    ("own_a", "a0", "a1"),
    ("own_b", "b0", "b1"),
    ("cross_b0_a1", "b0", "a1"),
    ("cross_a0_b1", "a0", "b1"),
)


def write_curves(frame: AuditFrame, directory, bins: int = 50) -> list:
    """Write threshold, ROC and calibration curves as CSV; return the paths.

    Threshold curves are sampled at the pooled support points, so
    ``sum(pooled_weight * |cbias_inclusive|)`` per concept is the
    score-weighted bias.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    split = split_groups(frame)
    pts, wts = split.pooled.points, split.pooled.weights

    def threshold_rows():
        for c in Concept:
            right = cbias_at(split, c, pts)
            left = cbias_at(split, c, pts, inclusive=True)
            for row in zip(pts, wts, right, left):
                yield (c.value,) + row

    paths = [_write_rows(directory / "threshold_curves.csv",
                         ["concept", "threshold", "pooled_weight", "cbias", "cbias_inclusive"],
                         threshold_rows())]

    def roc_rows():
        for name, g, h in ROC_PAIRS:
            curve = roc_curve(split.cell(g), split.cell(h))
            for i, (f, t) in enumerate(zip(curve.fpr, curve.tpr)):
                yield name, g, h, i, f, t

    paths.append(_write_rows(directory / "roc_curves.csv",
                             ["curve", "positive", "negative", "point", "fpr", "tpr"], roc_rows()))

    table = calibration_table(frame, bins)
    gap_a, gap_b = table.well_calibration_gap()
    edges = table.bin_edges
    rows = zip(range(table.bins), edges[:-1], edges[1:], table.count_a, table.count_b,
               table.rate_a, table.rate_b, table.pooled_weight, table.valid, gap_a, gap_b)
    paths.append(_write_rows(directory / "calibration.csv",
                             ["bin", "lo", "hi", "count_a", "count_b", "rate_a", "rate_b",
                              "pooled_weight", "valid", "well_calibration_gap_a",
                              "well_calibration_gap_b"], rows))
    return paths
