"""Steady operating state used as the t = 0 initial condition.

With time derivatives dropped, the isothermal pipe model reduces to a constant
mass flow per pipeline and the closed-form pressure profile

    p(x) = sqrt(p_in^2 - lam * v^2 * q0^2 * x / (d * S^2))

Flows follow from junction mass balance; only tree networks are supported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .network import GasNetwork, PipelineSpec, GasConstants

__all__ = [
    "SteadyStateError",
    "SteadyPressureProfile",
    "SteadyState",
    "CellProfiles",
    "StepState",
    "steady_flows",
    "steady_pressure_profile",
    "solve_steady_state",
    "build_initial_state",
]


class SteadyStateError(ValueError):
    pass


@dataclass(frozen=True)
class SteadyPressureProfile:
    """p(x) along one pipeline, x in [0, L], SI units."""

    p_in: float
    slope: float  # d(p^2)/dx, <= 0
    L: float

    def __call__(self, x: float) -> float:
        disc = self.p_in ** 2 + self.slope * x
        if disc <= 0:
            raise SteadyStateError(f"pressure vanishes at x = {x}")
        return math.sqrt(disc)


@dataclass(frozen=True)
class SteadyState:
    """Flows per pipeline, pressures per node, and p(x) per pipeline."""

    flows: dict[str, float]  # pipeline id -> q0 [kg/s]
    node_pressures: dict[str, float]  # node id -> p [Pa]
    profiles: dict[str, SteadyPressureProfile]  # pipeline id -> p(x)


@dataclass(frozen=True)
class CellProfiles:
    """p and q over one cell as functions of the cell coordinate dx in [0, 1].

    Values are SI (Pa, kg/s); accepts scalars or numpy arrays.
    """

    p: object  # callable dx -> Pa
    q: object  # callable dx -> kg/s


@dataclass(frozen=True)
class StepState:
    """Per-cell initial profiles carried between time steps.

    ``cells[e]`` lists the profiles of pipeline index e, cell 0 at the inlet.
    """

    cells: tuple[tuple[CellProfiles, ...], ...]


def _tree_structure(net: GasNetwork):
    """Rooted tree (parent pointers) from the unique supply node.

    Raises on cycles, multiple supplies, or disconnected parts.
    """
    supplies = [n for n in net.nodes if n.kind == "supply"]
    if len(supplies) != 1:
        raise SteadyStateError(
            f"steady solve needs exactly one supply node, found {len(supplies)}"
        )
    root = supplies[0].id
    adj: dict[str, list[tuple[PipelineSpec, str]]] = {n.id: [] for n in net.nodes}
    for p in net.pipelines:
        adj[p.from_node].append((p, p.to_node))
        adj[p.to_node].append((p, p.from_node))
    parent_edge: dict[str, PipelineSpec] = {}
    order = [root]
    seen = {root}
    stack = [root]
    while stack:
        nid = stack.pop()
        for pipe, other in adj[nid]:
            if other in seen:
                if parent_edge.get(nid) is not pipe:
                    raise SteadyStateError("network contains a cycle; steady solve "
                                           "supports trees only")
                continue
            seen.add(other)
            parent_edge[other] = pipe
            order.append(other)
            stack.append(other)
    if len(seen) != len(net.nodes):
        raise SteadyStateError("network is not connected")
    return root, parent_edge, order


def steady_flows(net: GasNetwork, t0: float = 0.0) -> dict[str, float]:
    """Per-pipeline mass flow balancing demands and junction extractions at t0."""
    root, parent_edge, order = _tree_structure(net)
    consumption = {}
    for n in net.nodes:
        if n.kind == "demand":
            consumption[n.id] = n.signal(t0)
        elif n.kind == "junction":
            consumption[n.id] = n.signal(t0)
        else:
            consumption[n.id] = 0.0
    # Subtree totals, leaves first.
    subtree = dict(consumption)
    for nid in reversed(order):
        if nid == root:
            continue
        pipe = parent_edge[nid]
        parent = pipe.from_node if pipe.to_node == nid else pipe.to_node
        subtree[parent] += subtree[nid]
    flows = {}
    for nid in order:
        if nid == root:
            continue
        pipe = parent_edge[nid]
        q = subtree[nid]
        if pipe.to_node == nid:
            flows[pipe.id] = q
        else:
            # Pipe is oriented against the tree direction: steady flow would be
            # negative, which the model excludes.
            if abs(q) > 1e-12:
                raise SteadyStateError(
                    f"pipeline {pipe.id} would carry reverse flow ({-q} kg/s)"
                )
            flows[pipe.id] = 0.0
    for q in flows.values():
        if q < 0:
            raise SteadyStateError("negative steady flow")
    return flows


def steady_pressure_profile(
    pipe: PipelineSpec, const: GasConstants, p_in: float, q0: float
) -> SteadyPressureProfile:
    """Closed-form p(x) for constant flow q0 entering at pressure p_in."""
    if p_in <= 0:
        raise SteadyStateError("p_in must be positive")
    if q0 < 0:
        raise SteadyStateError("q0 must be nonnegative")
    slope = -pipe.lam * const.v ** 2 * q0 ** 2 / (pipe.d * pipe.S ** 2)
    if p_in ** 2 + slope * pipe.L <= 0:
        raise SteadyStateError(
            f"infeasible steady state on pipeline {pipe.id}: pressure vanishes"
        )
    return SteadyPressureProfile(p_in=p_in, slope=slope, L=pipe.L)


def solve_steady_state(net: GasNetwork, t0: float = 0.0) -> SteadyState:
    """Flows plus pressures anchored at the supply and propagated downstream."""
    root, parent_edge, order = _tree_structure(net)
    flows = steady_flows(net, t0)
    supply = net.node(root)
    pressures = {root: supply.signal(t0)}
    profiles: dict[str, SteadyPressureProfile] = {}
    for nid in order:
        if nid == root:
            continue
        pipe = parent_edge[nid]
        parent = pipe.from_node if pipe.to_node == nid else pipe.to_node
        p_parent = pressures[parent]
        if pipe.to_node == nid:
            prof = steady_pressure_profile(pipe, net.constants, p_parent, flows[pipe.id])
            pressures[nid] = prof(pipe.L)
        else:
            # Zero-flow pipe traversed against orientation: flat profile.
            prof = steady_pressure_profile(pipe, net.constants, p_parent, 0.0)
            pressures[nid] = p_parent
        profiles[pipe.id] = prof
    return SteadyState(flows=flows, node_pressures=pressures, profiles=profiles)


def build_initial_state(net: GasNetwork, steady: SteadyState) -> StepState:
    """Per-cell profiles sampled from the steady solution.

    Cell I of a pipeline covers [I*dL, (I+1)*dL]; its profile is the steady
    p(x) restricted to that window, and q is the constant steady flow.  The
    profile of adjacent cells agrees exactly at shared borders because both
    evaluate the same closed form.
    """
    pipes = []
    for pipe in net.pipelines:
        prof = steady.profiles[pipe.id]
        # Re-anchor on the pipe's own inlet pressure in case the tree walk
        # traversed it against orientation (zero-flow pipes).
        p_in = steady.node_pressures[pipe.from_node]
        prof = steady_pressure_profile(pipe, net.constants, p_in, steady.flows[pipe.id])
        q0 = steady.flows[pipe.id]
        cells = []
        for I in range(pipe.n_cells):
            x0 = I * pipe.dL
            dL = pipe.dL
            cells.append(
                CellProfiles(
                    p=(lambda dx, _prof=prof, _x0=x0, _dL=dL:
                       _eval_profile(_prof, _x0 + dx * _dL)),
                    q=(lambda dx, _q0=q0: _q0 + 0.0 * dx),
                )
            )
        pipes.append(tuple(cells))
    return StepState(cells=tuple(pipes))


def _eval_profile(prof: SteadyPressureProfile, x):
    import numpy as np

    disc = prof.p_in ** 2 + prof.slope * np.asarray(x, dtype=float)
    if np.any(disc <= 0):
        raise SteadyStateError("pressure vanishes inside pipeline")
    return np.sqrt(disc)
