"""Exact uniform sampling of proper graph colorings by randomness recycling."""

from .core import BudgetExceeded, GuaranteeWarning, rr_sample, rr_step
from .estimator import ProperColoringSampler, check_graph
from .graph import Graph, generate, parse_graph
from .potential import PotentialParams, epsilon_bound, potential
from .randomness import BitSource
from .state import IndexState, enumerate_members, is_member

__all__ = [
    "BitSource",
    "BudgetExceeded",
    "Graph",
    "GuaranteeWarning",
    "IndexState",
    "PotentialParams",
    "ProperColoringSampler",
    "check_graph",
    "enumerate_members",
    "epsilon_bound",
    "generate",
    "is_member",
    "parse_graph",
    "potential",
    "rr_sample",
    "rr_step",
]

__version__ = "0.1.0"
