"""Loading scored datasets into audit frames.

An :class:`AuditFrame` holds the joint sample of (score, group, outcome) for
exactly two groups. Outcomes are coded 0 = favorable, 1 = unfavorable, and
higher scores are meant to be more favorable.
"""

from __future__ import annotations

import csv
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple, Optional, TextIO

import numpy as np


class ConfigError(ValueError):
    """Column spec, group labels or range do not fit the data."""


class InputError(ValueError):
    """The input file is missing or its contents cannot be used."""


class ScoredSample(NamedTuple):
    score: float
    group: str
    outcome: int


@dataclass(frozen=True)
class ScoreRange:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ConfigError("score range bounds must be finite")
        if not self.hi > self.lo:
            raise ConfigError(f"degenerate score range [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, scores) -> bool:
        scores = np.asarray(scores)
        return bool(np.all((scores >= self.lo) & (scores <= self.hi)))


UNIT_RANGE = ScoreRange(0.0, 1.0)


@dataclass(frozen=True, eq=False)
class AuditFrame:
    """Scores, group membership and outcomes for a two-group audit.

    ``in_group_b`` is True for members of ``group_b`` (the group of interest)
    and False for ``group_a`` (the reference group).
    """

    scores: np.ndarray
    in_group_b: np.ndarray
    outcomes: np.ndarray
    score_range: ScoreRange
    group_a: str
    group_b: str

    def __post_init__(self):
        if self.group_a == self.group_b:
            raise ConfigError("group_a and group_b must differ")
        n = self.scores.shape[0]
        if self.in_group_b.shape != (n,) or self.outcomes.shape != (n,):
            raise ValueError("scores, groups and outcomes must have equal length")
        if not np.all(np.isfinite(self.scores)):
            raise InputError("scores must be finite")
        if not np.all((self.outcomes == 0) | (self.outcomes == 1)):
            raise InputError("outcomes must be 0 (favorable) or 1 (unfavorable)")
        if not self.score_range.contains(self.scores):
            raise ConfigError(
                f"score range [{self.score_range.lo}, {self.score_range.hi}] "
                "excludes observed scores"
            )
        for flag, label in ((False, self.group_a), (True, self.group_b)):
            if not np.any(self.in_group_b == flag):
                which = "b" if flag else "a"
                raise ConfigError(f"group {which} absent (no rows with label {label!r})")
        for arr in (self.scores, self.in_group_b, self.outcomes):
            arr.setflags(write=False)

    @classmethod
    def from_arrays(cls, scores, in_group_b, outcomes, score_range=None,
                    group_a="a", group_b="b") -> "AuditFrame":
        scores = np.array(scores, dtype=float)
        if score_range is None:
            score_range = observed_range(scores)
        return cls(scores, np.array(in_group_b, dtype=bool),
                   np.array(outcomes, dtype=np.int8), score_range, group_a, group_b)

    @property
    def n(self) -> int:
        return int(self.scores.shape[0])

    def samples(self) -> list:
        labels = np.where(self.in_group_b, self.group_b, self.group_a)
        return [ScoredSample(float(s), str(g), int(y))
                for s, g, y in zip(self.scores, labels, self.outcomes)]

    def with_scores(self, scores, score_range: Optional[ScoreRange] = None) -> "AuditFrame":
        return replace(self, scores=np.array(scores, dtype=float),
                       in_group_b=self.in_group_b.copy(), outcomes=self.outcomes.copy(),
                       score_range=score_range or self.score_range)

    def with_groups(self, in_group_b) -> "AuditFrame":
        return replace(self, scores=self.scores.copy(),
                       in_group_b=np.array(in_group_b, dtype=bool),
                       outcomes=self.outcomes.copy())


def observed_range(scores) -> ScoreRange:
    scores = np.asarray(scores, dtype=float)
    if scores.size == 0:
        raise InputError("no scores")
    lo, hi = float(scores.min()), float(scores.max())
    if not hi > lo:
        raise ConfigError("all scores are equal; declare the score range explicitly")
    return ScoreRange(lo, hi)


@dataclass(frozen=True)
class ColumnSpec:
    """How to read a scored CSV file.

    ``favorable`` is the raw outcome value that is mapped to 0. When
    ``invert`` is set the score is reflected inside its range (so that high
    values mean favorable), and ``normalize`` rescales it onto [0, 1].
    """

    score_col: str
    group_col: str
    outcome_col: str
    favorable: str
    group_a: str
    group_b: str
    score_min: Optional[float] = None
    score_max: Optional[float] = None
    invert: bool = False
    normalize: bool = False
    delimiter: str = ","


# Counter-score of the ProPublica two-year file: 11 - decile_score on [1, 10],
# mapped to [0, 1]; favorable = no recidivism within two years.
COMPAS_PRESET = ColumnSpec(
    score_col="decile_score",
    group_col="race",
    outcome_col="two_year_recid",
    favorable="0",
    group_a="Caucasian",
    group_b="African-American",
    score_min=1.0,
    score_max=10.0,
    invert=True,
    normalize=True,
)

PRESETS = {"compas": COMPAS_PRESET}


@dataclass
class LoadReport:
    path: str
    rows_read: int = 0
    rows_kept: int = 0
    rows_other_groups: int = 0
    rejected: list = field(default_factory=list)

    def lines(self) -> list:
        out = [
            f"loaded {self.path}: {self.rows_read} rows read, {self.rows_kept} kept",
            f"dropped {self.rows_other_groups} rows outside the two audited groups",
            f"rejected {len(self.rejected)} rows with missing or unparseable fields",
        ]
        out += [f"  line {line}: {reason}" for line, reason in self.rejected]
        return out

    def emit(self, stream: TextIO = None):
        stream = stream or sys.stderr
        for line in self.lines():
            print(line, file=stream)


def _same_value(raw: str, target: str) -> bool:
    if raw == target:
        return True
    try:
        return float(raw) == float(target)
    except ValueError:
        return False


def load_csv(path, spec: ColumnSpec, report_stream: Optional[TextIO] = None,
             quiet: bool = False) -> AuditFrame:
    """Read a CSV file into an :class:`AuditFrame`.

    Only rows whose group is ``spec.group_a`` or ``spec.group_b`` are kept.
    Kept rows with a missing or non-numeric score, or a missing outcome, are
    rejected and listed (by file line) in the load report written to
    ``report_stream`` (standard error by default).
    """
    frame, report = read_csv(path, spec)
    if not quiet:
        report.emit(report_stream)
    return frame


def read_csv(path, spec: ColumnSpec):
    """Like :func:`load_csv` but returns ``(frame, report)`` without printing."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input file not found: {path}")
    report = LoadReport(str(path))
    scores, groups, outcomes = [], [], []
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh, delimiter=spec.delimiter)
            header = reader.fieldnames or []
            missing = [c for c in (spec.score_col, spec.group_col, spec.outcome_col)
                       if c not in header]
            if missing:
                raise ConfigError(f"missing column(s): {', '.join(missing)}")
            for line_no, row in enumerate(reader, start=2):
                report.rows_read += 1
                group = (row.get(spec.group_col) or "").strip()
                if group not in (spec.group_a, spec.group_b):
                    report.rows_other_groups += 1
                    continue
                raw_score = (row.get(spec.score_col) or "").strip()
                raw_outcome = (row.get(spec.outcome_col) or "").strip()
                try:
                    score = float(raw_score)
                except ValueError:
                    report.rejected.append((line_no, f"unparseable score {raw_score!r}"))
                    continue
                if not math.isfinite(score):
                    report.rejected.append((line_no, f"non-finite score {raw_score!r}"))
                    continue
                if raw_outcome == "":
                    report.rejected.append((line_no, "missing outcome"))
                    continue
                scores.append(score)
                groups.append(group == spec.group_b)
                outcomes.append(raw_outcome)
    except UnicodeDecodeError as exc:
        raise InputError(f"{path} is not valid UTF-8: {exc}") from exc
    except csv.Error as exc:
        raise InputError(f"malformed CSV in {path}: {exc}") from exc

    if not scores and report.rejected:
        raise InputError(f"all {len(report.rejected)} rows for groups {spec.group_a!r} / "
                         f"{spec.group_b!r} rejected; first: line {report.rejected[0][0]}, "
                         f"{report.rejected[0][1]}")
    if not scores:
        raise ConfigError(f"no rows for groups {spec.group_a!r} / {spec.group_b!r}")
    in_b = np.array(groups, dtype=bool)
    if in_b.all():
        raise ConfigError(f"group a absent (no rows with label {spec.group_a!r})")
    if not in_b.any():
        raise ConfigError(f"group b absent (no rows with label {spec.group_b!r})")

    distinct = sorted(set(outcomes))
    unfavorable = [v for v in distinct if not _same_value(v, spec.favorable)]
    if len(distinct) > 2 or len(unfavorable) > 1:
        raise InputError(f"outcome column {spec.outcome_col!r} is not binary: {distinct[:10]}")
    y = np.array([0 if _same_value(v, spec.favorable) else 1 for v in outcomes], dtype=np.int8)

    s = np.array(scores, dtype=float)
    if spec.score_min is not None or spec.score_max is not None:
        lo = float(spec.score_min) if spec.score_min is not None else float(s.min())
        hi = float(spec.score_max) if spec.score_max is not None else float(s.max())
        rng = ScoreRange(lo, hi)
        if not rng.contains(s):
            raise ConfigError(
                f"declared range [{lo}, {hi}] excludes observed scores "
                f"(observed [{s.min()}, {s.max()}])"
            )
    else:
        rng = observed_range(s)
    report.rows_kept = int(s.size)
    frame = AuditFrame(s, in_b, y, rng, spec.group_a, spec.group_b)
    if spec.invert:
        frame = invert_score(frame)
    if spec.normalize:
        frame = normalize_range(frame)
    return frame, report


def invert_score(frame: AuditFrame) -> AuditFrame:
    """Reflect every score inside the range: ``s -> hi + lo - s``."""
    r = frame.score_range
    return frame.with_scores((r.hi + r.lo) - frame.scores)


def normalize_range(frame: AuditFrame, target: ScoreRange = UNIT_RANGE) -> AuditFrame:
    """Affinely map the frame's range onto ``target`` (default [0, 1])."""
    r = frame.score_range
    if (r.lo, r.hi) == (target.lo, target.hi):
        return frame
    t = (frame.scores - r.lo) / r.length
    scores = np.clip(target.lo + t * target.length, target.lo, target.hi)
    return frame.with_scores(scores, target)


def write_csv(frame: AuditFrame, path, favorable: str = "0", unfavorable: str = "1"):
    """Write ``score,group,outcome`` rows; floats use their shortest round-trip repr."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["score", "group", "outcome"])
        for s, b, y in zip(frame.scores, frame.in_group_b, frame.outcomes):
            w.writerow([repr(float(s)), frame.group_b if b else frame.group_a,
                        favorable if y == 0 else unfavorable])
