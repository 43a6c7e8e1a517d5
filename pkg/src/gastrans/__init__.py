"""Transient isothermal gas pipeline network simulator.

Two polynomial collocation schemes (full recursion and linearized friction)
plus an implicit finite-difference baseline, over tree-shaped networks of
pipelines with supply, demand, and junction nodes.
"""

from .network import (
    GasConstants, GasNetwork, NodeSpec, PipelineSpec, ScenarioConfig,
    ScenarioError, parse_scenario, validate_network,
)

__version__ = "0.1.0"

__all__ = [
    "GasConstants", "GasNetwork", "NodeSpec", "PipelineSpec",
    "ScenarioConfig", "ScenarioError", "parse_scenario", "validate_network",
    "__version__",
]
