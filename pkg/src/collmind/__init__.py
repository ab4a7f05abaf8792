"""Simulator of topic-network dynamics in online news communities."""

__version__ = "0.1.0"

from .influence import Influence, InfluenceSchedule  # noqa: E402
from .network import InitParams, SemanticNetwork  # noqa: E402
from .simulation import ModelParameters, run_ensemble, run_simulation  # noqa: E402

__all__ = [
    "Influence",
    "InfluenceSchedule",
    "InitParams",
    "ModelParameters",
    "SemanticNetwork",
    "run_ensemble",
    "run_simulation",
    "__version__",
]
