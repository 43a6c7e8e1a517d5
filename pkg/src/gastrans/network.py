"""Gas network domain model, scenario parsing and validation.

A scenario is a TOML document with sections ``[gas]``, ``[[node]]``,
``[[pipeline]]``, ``[sim]`` and ``[[probe]]`` (see ``parse_scenario`` for the
exact field names).  All quantities are SI: Pa, kg/s, m, s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

__all__ = [
    "ScenarioError",
    "GasConstants",
    "PipelineSpec",
    "BoundarySignal",
    "NodeSpec",
    "GasNetwork",
    "Probe",
    "ScenarioConfig",
    "Violation",
    "parse_scenario",
    "emit_scenario",
    "validate_network",
]

METHODS = ("sas1", "sas2", "fdm")
NODE_KINDS = ("supply", "demand", "junction")


class ScenarioError(ValueError):
    """Raised for syntactically or semantically invalid scenario documents."""

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class GasConstants:
    """Base quantities shared by the whole network."""

    v: float  # sound speed [m/s]
    p_b: float  # pressure base [Pa]
    q_b: float  # mass-flow base [kg/s]
    T0: float | None = None  # temperature [K]
    R_gas: float | None = None  # specific gas constant [J/(kg K)]

    def __post_init__(self):
        if self.v <= 0 or self.p_b <= 0 or self.q_b <= 0:
            raise ScenarioError("v, p_b and q_b must be positive", "gas")
        if self.T0 is not None and self.R_gas is not None:
            v_rt = math.sqrt(self.R_gas * self.T0)
            if abs(self.v - v_rt) > 1e-9 * v_rt:
                raise ScenarioError(
                    f"v = {self.v} inconsistent with sqrt(R_gas*T0) = {v_rt}", "gas.v"
                )


@dataclass(frozen=True)
class PipelineSpec:
    """One pipe segment; gas flows from the inlet (x=0) to the outlet (x=L)."""

    id: str
    from_node: str  # inlet
    to_node: str  # outlet
    L: float  # length [m]
    d: float  # diameter [m]
    S: float  # cross-section [m^2]; independent input, never derived from d
    lam: float  # friction factor
    dL: float  # cell length [m]

    def __post_init__(self):
        for name in ("L", "d", "S", "dL"):
            if getattr(self, name) <= 0:
                raise ScenarioError(f"{name} must be positive", f"pipeline.{self.id}")
        if self.lam < 0:
            raise ScenarioError("lambda must be nonnegative", f"pipeline.{self.id}")

    @property
    def n_cells(self) -> int:
        """Number of spatial cells; L/dL must be an integer."""
        n = self.L / self.dL
        if abs(n - round(n)) > 1e-9 or round(n) < 1:
            raise ScenarioError(
                f"L/dL = {n} is not a positive integer", f"pipeline.{self.id}"
            )
        return int(round(n))


@dataclass(frozen=True)
class CosineTerm:
    amplitude: float
    omega: float  # angular frequency [rad/s]
    phase: float = 0.0


@dataclass(frozen=True)
class BoundarySignal:
    """offset + sum of cosine terms, or a sampled table with linear interpolation."""

    offset: float = 0.0
    terms: tuple[CosineTerm, ...] = ()
    times: tuple[float, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.times:
            if len(self.times) != len(self.values):
                raise ScenarioError("table times/values length mismatch", "node.signal")
            if any(b <= a for a, b in zip(self.times, self.times[1:])):
                raise ScenarioError("table times must strictly increase", "node.signal")

    def __call__(self, t: float) -> float:
        if self.times:
            if t < self.times[0] - 1e-12 or t > self.times[-1] + 1e-12:
                raise ValueError(f"t = {t} outside table range "
                                 f"[{self.times[0]}, {self.times[-1]}]")
            import numpy as np

            return float(np.interp(t, self.times, self.values))
        return self.offset + sum(
            c.amplitude * math.cos(c.omega * t + c.phase) for c in self.terms
        )


@dataclass(frozen=True)
class NodeSpec:
    id: str
    kind: str  # supply | demand | junction
    signal: BoundarySignal  # P_B for supply, Q_B for demand, Q_J for junction

    def __post_init__(self):
        if self.kind not in NODE_KINDS:
            raise ScenarioError(f"unknown node kind {self.kind!r}", f"node.{self.id}")


@dataclass(frozen=True)
class GasNetwork:
    constants: GasConstants
    pipelines: tuple[PipelineSpec, ...]
    nodes: tuple[NodeSpec, ...]

    def node(self, node_id: str) -> NodeSpec:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def pipeline(self, pipe_id: str) -> PipelineSpec:
        for p in self.pipelines:
            if p.id == pipe_id:
                return p
        raise KeyError(pipe_id)

    def attachments(self, node_id: str) -> list[tuple[PipelineSpec, str]]:
        """All (pipeline, 'inlet'|'outlet') ends touching the node."""
        out = []
        for p in self.pipelines:
            if p.from_node == node_id:
                out.append((p, "inlet"))
            if p.to_node == node_id:
                out.append((p, "outlet"))
        return out


@dataclass(frozen=True)
class Probe:
    pipeline: str
    end: str  # inlet | outlet
    field: str  # p | q


@dataclass(frozen=True)
class ScenarioConfig:
    network: GasNetwork
    duration: float
    dT: float
    method: str  # sas1 | sas2 | fdm
    M: int = 2
    Mx: int = 1
    R_order: int = 10
    eps_b: float = 1e-12
    probes: tuple[Probe, ...] = ()
    output: str | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ScenarioError(f"unknown method {self.method!r}", "sim.method")
        if self.dT <= 0:
            raise ScenarioError("dT must be positive", "sim.dT")
        steps = self.duration / self.dT
        if abs(steps - round(steps)) > 1e-9 or round(steps) < 1:
            raise ScenarioError(
                f"duration/dT = {steps} is not a positive integer", "sim.duration"
            )
        if self.method in ("sas1", "sas2"):
            if not 0 < self.M - self.Mx < self.M:
                raise ScenarioError(
                    f"balance condition 0 < M - Mx < M violated (M={self.M}, Mx={self.Mx})",
                    "sim.Mx",
                )
        if self.R_order < 1:
            raise ScenarioError("R_order must be >= 1", "sim.R_order")
        if self.eps_b <= 0:
            raise ScenarioError("eps_b must be positive", "sim.eps_b")

    @property
    def steps(self) -> int:
        return int(round(self.duration / self.dT))

    def replace(self, **kwargs) -> "ScenarioConfig":
        import dataclasses

        return dataclasses.replace(self, **kwargs)


# ---------------------------------------------------------------------------
# Parsing

def _require(table, key, where, types):
    if key not in table:
        raise ScenarioError("missing required field", f"{where}.{key}")
    val = table[key]
    if not isinstance(val, types):
        raise ScenarioError(f"expected {types}, got {type(val).__name__}", f"{where}.{key}")
    return val


def _num(table, key, where, default=None):
    if default is not None and key not in table:
        return default
    return float(_require(table, key, where, (int, float)))


def _parse_signal(raw, where) -> BoundarySignal:
    if raw is None:
        return BoundarySignal()
    if "times" in raw or "values" in raw:
        times = tuple(float(t) for t in _require(raw, "times", where, list))
        values = tuple(float(v) for v in _require(raw, "values", where, list))
        return BoundarySignal(times=times, values=values)
    terms = tuple(
        CosineTerm(
            amplitude=_num(t, "amplitude", f"{where}.terms"),
            omega=_num(t, "omega", f"{where}.terms"),
            phase=_num(t, "phase", f"{where}.terms", default=0.0),
        )
        for t in raw.get("terms", [])
    )
    return BoundarySignal(offset=_num(raw, "offset", where, default=0.0), terms=terms)


def parse_scenario(text: str) -> ScenarioConfig:
    """Parse a TOML scenario document into a fully-defaulted config."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"TOML syntax error: {exc}") from None

    gas_raw = _require(doc, "gas", "scenario", dict)
    constants = GasConstants(
        v=_num(gas_raw, "v", "gas"),
        p_b=_num(gas_raw, "p_b", "gas"),
        q_b=_num(gas_raw, "q_b", "gas"),
        T0=float(gas_raw["T0"]) if "T0" in gas_raw else None,
        R_gas=float(gas_raw["R_gas"]) if "R_gas" in gas_raw else None,
    )

    nodes = []
    for raw in _require(doc, "node", "scenario", list):
        nid = _require(raw, "id", "node", str)
        kind = _require(raw, "kind", "node", str)
        signal = _parse_signal(raw.get("signal"), f"node.{nid}.signal")
        if kind in ("supply", "demand") and "signal" not in raw:
            raise ScenarioError("missing required field", f"node.{nid}.signal")
        nodes.append(NodeSpec(id=nid, kind=kind, signal=signal))

    pipelines = []
    for raw in _require(doc, "pipeline", "scenario", list):
        pid = _require(raw, "id", "pipeline", str)
        where = f"pipeline.{pid}"
        pipelines.append(
            PipelineSpec(
                id=pid,
                from_node=_require(raw, "from", where, str),
                to_node=_require(raw, "to", where, str),
                L=_num(raw, "L", where),
                d=_num(raw, "d", where),
                S=_num(raw, "S", where),
                lam=_num(raw, "lambda", where),
                dL=_num(raw, "dL", where),
            )
        )

    net = GasNetwork(constants=constants, pipelines=tuple(pipelines), nodes=tuple(nodes))
    violations = validate_network(net)
    if violations:
        v = violations[0]
        raise ScenarioError(v.rule, v.entity)

    sim = _require(doc, "sim", "scenario", dict)
    probes = tuple(
        Probe(
            pipeline=_require(raw, "pipeline", "probe", str),
            end=_require(raw, "end", "probe", str),
            field=_require(raw, "field", "probe", str),
        )
        for raw in doc.get("probe", [])
    )
    for pr in probes:
        if pr.end not in ("inlet", "outlet") or pr.field not in ("p", "q"):
            raise ScenarioError(f"bad probe {pr}", "probe")
        net.pipeline(pr.pipeline)  # raises KeyError-like if unknown
    cfg = ScenarioConfig(
        network=net,
        duration=_num(sim, "duration", "sim"),
        dT=_num(sim, "dT", "sim"),
        method=_require(sim, "method", "sim", str).lower(),
        M=int(_num(sim, "M", "sim", default=2)),
        Mx=int(_num(sim, "Mx", "sim", default=1)),
        R_order=int(_num(sim, "R_order", "sim", default=10)),
        eps_b=_num(sim, "eps_b", "sim", default=1e-12),
        probes=probes,
        output=sim.get("output"),
    )
    # Per-pipeline cell counts must be valid for any method.
    for p in net.pipelines:
        p.n_cells
    return cfg


def _fmt(x) -> str:
    if isinstance(x, str):
        return f'"{x}"'
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def _emit_signal(sig: BoundarySignal) -> str:
    if sig.times:
        return ("{times = [" + ", ".join(_fmt(t) for t in sig.times) + "], values = ["
                + ", ".join(_fmt(v) for v in sig.values) + "]}")
    parts = [f"offset = {_fmt(sig.offset)}"]
    if sig.terms:
        terms = ", ".join(
            f"{{amplitude = {_fmt(c.amplitude)}, omega = {_fmt(c.omega)}, "
            f"phase = {_fmt(c.phase)}}}"
            for c in sig.terms
        )
        parts.append(f"terms = [{terms}]")
    return "{" + ", ".join(parts) + "}"


def emit_scenario(cfg: ScenarioConfig) -> str:
    """Serialize a config back to the canonical TOML scenario form."""
    g = cfg.network.constants
    lines = ["[gas]", f"v = {_fmt(g.v)}", f"p_b = {_fmt(g.p_b)}", f"q_b = {_fmt(g.q_b)}"]
    if g.T0 is not None:
        lines.append(f"T0 = {_fmt(g.T0)}")
    if g.R_gas is not None:
        lines.append(f"R_gas = {_fmt(g.R_gas)}")
    for n in cfg.network.nodes:
        lines += ["", "[[node]]", f'id = "{n.id}"', f'kind = "{n.kind}"',
                  f"signal = {_emit_signal(n.signal)}"]
    for p in cfg.network.pipelines:
        lines += ["", "[[pipeline]]", f'id = "{p.id}"', f'from = "{p.from_node}"',
                  f'to = "{p.to_node}"', f"L = {_fmt(p.L)}", f"d = {_fmt(p.d)}",
                  f"S = {_fmt(p.S)}", f"lambda = {_fmt(p.lam)}", f"dL = {_fmt(p.dL)}"]
    lines += ["", "[sim]", f"duration = {_fmt(cfg.duration)}", f"dT = {_fmt(cfg.dT)}",
              f'method = "{cfg.method}"', f"M = {cfg.M}", f"Mx = {cfg.Mx}",
              f"R_order = {cfg.R_order}", f"eps_b = {_fmt(cfg.eps_b)}"]
    if cfg.output:
        lines.append(f'output = "{cfg.output}"')
    for pr in cfg.probes:
        lines += ["", "[[probe]]", f'pipeline = "{pr.pipeline}"', f'end = "{pr.end}"',
                  f'field = "{pr.field}"']
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Validation

@dataclass(frozen=True)
class Violation:
    entity: str
    rule: str

    def __str__(self):
        return f"{self.entity}: {self.rule}"


def validate_network(net: GasNetwork) -> list[Violation]:
    """Structural checks; returns an empty list iff the network is well formed."""
    out: list[Violation] = []
    node_ids = {n.id for n in net.nodes}
    if len(node_ids) != len(net.nodes):
        out.append(Violation("nodes", "duplicate node ids"))
    pipe_ids = [p.id for p in net.pipelines]
    if len(set(pipe_ids)) != len(pipe_ids):
        out.append(Violation("pipelines", "duplicate pipeline ids"))

    for p in net.pipelines:
        for end, nid in (("from", p.from_node), ("to", p.to_node)):
            if nid not in node_ids:
                out.append(Violation(f"pipeline.{p.id}", f"unknown {end} node {nid!r}"))
        n = p.L / p.dL
        if abs(n - round(n)) > 1e-9 or round(n) < 1:
            out.append(Violation(f"pipeline.{p.id}", "L/dL not integer"))

    for node in net.nodes:
        att = net.attachments(node.id)
        if node.kind == "supply":
            if any(side == "outlet" for _, side in att):
                out.append(Violation(f"node.{node.id}", "supply must attach to inlet"))
            if not att:
                out.append(Violation(f"node.{node.id}", "supply node unattached"))
        elif node.kind == "demand":
            if any(side == "inlet" for _, side in att):
                out.append(Violation(f"node.{node.id}", "demand must attach to outlet"))
            if not att:
                out.append(Violation(f"node.{node.id}", "demand node unattached"))
        else:
            if len(att) < 2:
                out.append(Violation(f"node.{node.id}", "junction needs >= 2 attachments"))

    if not any(n.kind == "supply" for n in net.nodes):
        out.append(Violation("network", "no supply node"))

    # Connectivity over the undirected graph.
    if net.nodes and net.pipelines and not out:
        adj: dict[str, set[str]] = {n.id: set() for n in net.nodes}
        for p in net.pipelines:
            adj[p.from_node].add(p.to_node)
            adj[p.to_node].add(p.from_node)
        seen = {net.nodes[0].id}
        stack = [net.nodes[0].id]
        while stack:
            for nxt in adj[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        if seen != node_ids:
            out.append(Violation("network", "graph is not connected"))
    return out
