"""Value estimators that consume a single sample path"""

from .loop import LoopEstimator, NoLoopsYet, loop_statistics, running_estimates
from .modelbased import ModelBasedEstimator
from .td import TDEstimator

__all__ = [
    "LoopEstimator",
    "NoLoopsYet",
    "loop_statistics",
    "running_estimates",
    "ModelBasedEstimator",
    "TDEstimator",
]
