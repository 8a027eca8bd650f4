"""Rolling-window point-anomaly detectors and their overlap table."""

from gesnorm.anomaly.config import (
    DetectionSeries,
    DetectorConfig,
    IForestParams,
    Method,
    log_returns_from_prices,
    returns_from_prices,
)
from gesnorm.anomaly.detectors import detect, ges_detect, mad_zscore_detect, modified_zscore
from gesnorm.anomaly.iforest import IsolationForest, c_factor, iforest_detect
from gesnorm.anomaly.overlap import OverlapMatrix, overlap_matrix
from gesnorm.anomaly.pot import GpdFit, gpd_fit_mle, gpd_tail_quantile, pot_detect
from gesnorm.anomaly.synthetic import SyntheticSeries, recall, synthetic_returns

__all__ = [
    "DetectionSeries",
    "DetectorConfig",
    "GpdFit",
    "IForestParams",
    "IsolationForest",
    "Method",
    "OverlapMatrix",
    "SyntheticSeries",
    "c_factor",
    "detect",
    "ges_detect",
    "gpd_fit_mle",
    "gpd_tail_quantile",
    "iforest_detect",
    "log_returns_from_prices",
    "mad_zscore_detect",
    "modified_zscore",
    "overlap_matrix",
    "pot_detect",
    "recall",
    "returns_from_prices",
    "synthetic_returns",
]
