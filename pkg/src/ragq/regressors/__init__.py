from .base import Regressor
from .baselines import BASELINE_KINDS, BaselineConfig, baseline_fit, make_baseline
from .io import load_model, save_model
from .lstm import (
    BilstmConfig,
    BiLSTMRegressor,
    LstmCellParams,
    bilstm_fit,
    lstm_cell_step,
)
from .trees import (
    AdaBoostR2,
    DecisionTree,
    ExtraTrees,
    GbtConfig,
    GradientBoostedTrees,
    KNeighbors,
    gbt_fit,
)


def predict(model, X):
    return model.predict(X)


__all__ = [
    "AdaBoostR2",
    "BASELINE_KINDS",
    "BaselineConfig",
    "BiLSTMRegressor",
    "BilstmConfig",
    "DecisionTree",
    "ExtraTrees",
    "GbtConfig",
    "GradientBoostedTrees",
    "KNeighbors",
    "LstmCellParams",
    "Regressor",
    "baseline_fit",
    "bilstm_fit",
    "gbt_fit",
    "load_model",
    "lstm_cell_step",
    "make_baseline",
    "predict",
    "save_model",
]
