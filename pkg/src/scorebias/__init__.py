"""Group disparity measures for continuous scores aggregated over all thresholds."""

from .calibration import CalibrationTable, calibration_bias, calibration_table
from .empirical import EmpiricalDist, GroupSplit, UndefinedConditionalError, split_groups
from .inference import Measure, PermutationConfig, PermutationOutcome, permutation_test
from .ingest import (AuditFrame, ColumnSpec, COMPAS_PRESET, ConfigError, InputError,
                     ScoreRange, load_csv)
from .roc import auroc, bias_roc, bias_xroc, gini, roc_curve
from .score_bias import BiasResult, score_bias
from .threshold_bias import Concept, cbias_at, cbias_curve
from .wasserstein import w1, w1_quantile_transformed

__version__ = "0.1.0"
