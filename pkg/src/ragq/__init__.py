"""Answer-quality regression for retrieval features.

VMD expands each feature column into frequency modes, PSO tunes a BiLSTM (or
gradient-boosted trees) on validation R^2, and the result is benchmarked
against five classical regressors.
"""

from .config import PipelineConfig
from .data import Dataset, embedded_sample, load_csv, save_csv, split, standardize, synthesize
from .metrics import correlation_matrix, pearson_corr, regression_metrics
from .pipeline import run_benchmark, run_full_pipeline
from .pso import SearchSpace, SwarmConfig, optimize
from .vmd import VmdConfig, decompose, expand_features, reconstruct

__version__ = "0.1.0"
