"""Hourly load forecasting through sentence templates.

Records become sentences, a generation backend continues them one hour at a
time, and the parsed continuations are scored against ground truth.
"""

from .backends import (
    BackendAnswer,
    GenerationContext,
    OracleBackend,
    PersistenceBackend,
    RemoteBackend,
    ScriptedBackend,
    SeasonalNaiveBackend,
)
from .codec import (
    DEFAULT_PATTERN,
    PromptTemplate,
    parse_lenient,
    parse_strict,
    render,
    render_context,
    render_value,
    round_half_away_from_zero,
)
from .data import (
    DatasetSplit,
    LoadRecord,
    LoadSeries,
    SynthConfig,
    WindowPair,
    ingest_csv,
    make_windows,
    repair_gaps,
    split_by_months,
    synth_generate,
)
from .errors import BackendError, DataError, LoadcastError
from .evaluation import (
    EvalReport,
    EvalRow,
    baseline_linear_ar,
    evaluate_building,
    horizon_sweep,
    mae,
    render_report,
    rmse,
    zeroshot_matrix,
)
from .export import export_eval_windows, export_pairs
from .rollout import FaultRecord, ForecastResult, RolloutConfig, forecast, forecast_horizons

__version__ = "0.1.0"

__all__ = [
    "BackendAnswer",
    "BackendError",
    "DEFAULT_PATTERN",
    "DataError",
    "DatasetSplit",
    "EvalReport",
    "EvalRow",
    "FaultRecord",
    "ForecastResult",
    "GenerationContext",
    "LoadRecord",
    "LoadSeries",
    "LoadcastError",
    "OracleBackend",
    "PersistenceBackend",
    "PromptTemplate",
    "RemoteBackend",
    "RolloutConfig",
    "ScriptedBackend",
    "SeasonalNaiveBackend",
    "SynthConfig",
    "WindowPair",
    "baseline_linear_ar",
    "evaluate_building",
    "export_eval_windows",
    "export_pairs",
    "forecast",
    "forecast_horizons",
    "horizon_sweep",
    "ingest_csv",
    "mae",
    "make_windows",
    "parse_lenient",
    "parse_strict",
    "render",
    "render_context",
    "render_report",
    "render_value",
    "repair_gaps",
    "rmse",
    "round_half_away_from_zero",
    "split_by_months",
    "synth_generate",
    "zeroshot_matrix",
]
