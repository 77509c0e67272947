"""Generalized population-based training with pairwise learning."""

from gpbt.executor import ExecMode, RunArtifacts, RunConfig, derive_stream, run
from gpbt.hyperspace import DimensionSpec, SearchSpace
from gpbt.scheduler import GPBTScheduler, SchedulerConfig
from gpbt.strategies import StrategyConfig, pairwise_learning_update, perturb_update

__version__ = "0.1.0"
