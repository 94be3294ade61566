"""Fully dynamic bipartite matching via edge-degree constrained subgraphs."""

from .edcs_general import GeneralEdcs
from .edcs_weighted import WeightedEdcs
from .errors import (
    CapacityExceededError,
    ConfigError,
    GraphError,
    InvariantBreachError,
    StreamError,
)
from .graph import (
    DynBipartiteGraph,
    Edge,
    Side,
    VertexId,
    left_vertex,
    make_edge,
    right_vertex,
)
from .matching import MaintainedMatching
from .orientation import ArbOrientation, SqrtOrientation, default_delta_cap
from .pipeline import (
    MetricsRow,
    PipelineConfig,
    RunResult,
    plan_parameters,
    run_pipeline,
)
from .streams import generate_stream, read_stream, validate_stream, write_stream

__all__ = [
    "ArbOrientation",
    "CapacityExceededError",
    "ConfigError",
    "DynBipartiteGraph",
    "Edge",
    "GeneralEdcs",
    "GraphError",
    "InvariantBreachError",
    "MaintainedMatching",
    "MetricsRow",
    "PipelineConfig",
    "RunResult",
    "Side",
    "SqrtOrientation",
    "StreamError",
    "VertexId",
    "WeightedEdcs",
    "default_delta_cap",
    "generate_stream",
    "left_vertex",
    "make_edge",
    "plan_parameters",
    "read_stream",
    "right_vertex",
    "run_pipeline",
    "validate_stream",
    "write_stream",
]
