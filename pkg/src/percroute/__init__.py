"""Probe-complexity routing on bond-percolated graphs."""
from ._core import BACKEND
from .errors import (
    CapacityError,
    ConfigError,
    EncodingError,
    FamilyError,
    FitError,
    InsufficientDataError,
    LocalityError,
    PercrouteError,
)
from .percolation import (
    LocalityGuard,
    PercolationConfig,
    ProbeLedger,
    component_size,
    edge_state,
    ground_truth_connected,
    local_probe,
    mix64,
)
from .routers import ROUTERS, RoutingResult, Status, route
from .topology import Complete, DoubleTree, Hypercube, Mesh, Topology, parse_topology

__version__ = "0.1.0"
