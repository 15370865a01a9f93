"""Streaming feature-drift monitoring against training baselines."""

from .baseline import BaselineSet, BuildConfig, build_baseline, bucket_of, lookup
from .distribution import EmpiricalSample, Observation, SlidingWindow, sample_from_values, subsample
from .metrics import Histogram, histogram, kl_divergence, wasserstein, wasserstein_binned
from .monitor import Alert, AlertPolicy, DriftReport, MonitorConfig, MonitorEngine, calibrate

__version__ = "0.1.0"

__all__ = [
    "Alert", "AlertPolicy", "BaselineSet", "BuildConfig", "DriftReport", "EmpiricalSample", "Histogram",
    "MonitorConfig", "MonitorEngine", "Observation", "SlidingWindow", "bucket_of", "build_baseline",
    "calibrate", "histogram", "kl_divergence", "lookup", "sample_from_values", "subsample",
    "wasserstein", "wasserstein_binned",
]
