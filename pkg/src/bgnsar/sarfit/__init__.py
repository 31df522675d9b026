"""SAR intensity workflow: ingestion, description, model comparison, simulation studies."""

from .compare import ComparisonReport, ModelRecord, compare, winners
from .io import FORMATS, IntensityRegion, load_region, parse_rect, read_image, write_csv
from .mc import McConfig, McRow, McTable, default_sweep, ise, mc_study, parse_sweep
from .report import to_json, to_text
from .stats import Descriptive, RngCheck, describe, ks_statistic, rng_check

__all__ = [
    "ComparisonReport",
    "ModelRecord",
    "compare",
    "winners",
    "FORMATS",
    "IntensityRegion",
    "load_region",
    "parse_rect",
    "read_image",
    "write_csv",
    "McConfig",
    "McRow",
    "McTable",
    "default_sweep",
    "ise",
    "mc_study",
    "parse_sweep",
    "to_json",
    "to_text",
    "Descriptive",
    "RngCheck",
    "describe",
    "ks_statistic",
    "rng_check",
]
