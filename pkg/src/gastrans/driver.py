"""Time-stepping driver, sampling, error metric, and parameter sweeps."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .fdm import FdmContext, FdmError
from .network import GasNetwork, ScenarioConfig, ScenarioError
from .sas.engine import DivergenceError, SasContext, SolverError
from .steady import solve_steady_state, build_initial_state

__all__ = [
    "TimeSeries", "ProbeSeries", "RunResult", "run_simulation",
    "compute_err", "run_sweep", "SweepEntry", "write_sweep_csv",
]

_CSV_FIELDS = ["t_s", "pipeline", "x_m", "p_pa", "q_kg_s"]


@dataclass
class TimeSeries:
    """Columnar border samples: one row per (t, pipeline, x).

    Rows are sorted by time, then pipeline declaration order, then x.
    """

    t_s: np.ndarray
    pipeline: list[str]
    x_m: np.ndarray
    p_pa: np.ndarray
    q_kg_s: np.ndarray

    def write_csv(self, fh) -> None:
        w = csv.writer(fh)
        w.writerow(_CSV_FIELDS)
        for i in range(len(self.t_s)):
            w.writerow([
                f"{self.t_s[i]:.15g}", self.pipeline[i], f"{self.x_m[i]:.15g}",
                f"{self.p_pa[i]:.15g}", f"{self.q_kg_s[i]:.15g}",
            ])

    @classmethod
    def read_csv(cls, fh) -> "TimeSeries":
        r = csv.reader(fh)
        header = next(r)
        if header != _CSV_FIELDS:
            raise ScenarioError(f"unexpected series header: {header}")
        t, pipe, x, p, q = [], [], [], [], []
        for row in r:
            t.append(float(row[0])); pipe.append(row[1]); x.append(float(row[2]))
            p.append(float(row[3])); q.append(float(row[4]))
        return cls(np.asarray(t), pipe, np.asarray(x), np.asarray(p), np.asarray(q))

    def probe(self, pipeline: str, x_m: float, field_name: str) -> "ProbeSeries":
        """Extract a single-location series ('p' or 'q') by nearest x match."""
        mask = np.asarray([pl == pipeline for pl in self.pipeline])
        if not mask.any():
            raise ScenarioError(f"no samples for pipeline {pipeline!r}")
        xs = np.unique(self.x_m[mask])
        x_sel = xs[np.argmin(np.abs(xs - x_m))]
        sel = mask & (np.abs(self.x_m - x_sel) < 1e-9)
        vals = self.p_pa if field_name == "p" else self.q_kg_s
        return ProbeSeries(t_s=self.t_s[sel], values=vals[sel],
                           pipeline=pipeline, x_m=float(x_sel), field=field_name)


@dataclass
class ProbeSeries:
    t_s: np.ndarray
    values: np.ndarray
    pipeline: str
    x_m: float
    field: str


@dataclass
class RunResult:
    series: TimeSeries
    wall_s: float
    factorizations: int
    steps: int
    layer_counts: list[int] = field(default_factory=list)
    method: str = ""


def _probe_x(net: GasNetwork, pipeline: str, end: str) -> float:
    pipe = net.pipeline(pipeline)
    return 0.0 if end == "inlet" else pipe.L


def run_simulation(net: GasNetwork, cfg: ScenarioConfig,
                   refine: int = 1) -> RunResult:
    """Run the configured scheme over the full horizon and collect samples.

    ``refine`` multiplies grid resolution (FDM only); SAS schemes ignore it.
    """
    t0 = time.perf_counter()
    steady = solve_steady_state(net, 0.0)
    rows_t, rows_pipe, rows_x, rows_p, rows_q = [], [], [], [], []

    def collect(t, borders):
        for e, pipe in enumerate(net.pipelines):
            p_si, q_si = borders[e]
            n = len(p_si) - 1
            x = np.linspace(0.0, pipe.L, n + 1)
            rows_t.append(np.full(n + 1, t))
            rows_pipe.extend([pipe.id] * (n + 1))
            rows_x.append(x)
            rows_p.append(p_si)
            rows_q.append(q_si)

    if cfg.method == "fdm":
        ctx = FdmContext(net, cfg.dT, refine=refine)
        state = ctx.initial_state(steady)
        for k in range(cfg.steps):
            state = ctx.step(state, k * cfg.dT)
            collect((k + 1) * cfg.dT, [
                ctx.borders_si(state, e) for e in range(len(net.pipelines))
            ])
        facs = ctx.factorizations
        layers: list[int] = []
    else:
        ctx = SasContext(net, cfg)
        state = build_initial_state(net, steady)
        for k in range(cfg.steps):
            sol = ctx.step(state, k * cfg.dT, k)
            state, borders = ctx.advance(sol, k)
            collect((k + 1) * cfg.dT, borders)
        facs = ctx.factorizations
        layers = list(ctx.layer_counts)

    series = TimeSeries(
        t_s=np.concatenate(rows_t), pipeline=rows_pipe,
        x_m=np.concatenate(rows_x), p_pa=np.concatenate(rows_p),
        q_kg_s=np.concatenate(rows_q),
    )
    return RunResult(series=series, wall_s=time.perf_counter() - t0,
                     factorizations=facs, steps=cfg.steps,
                     layer_counts=layers, method=cfg.method)


def compute_err(sim: ProbeSeries, ref: ProbeSeries, q_b: float) -> float:
    """max_k |q_sim - q_ref| / q_b over the simulation's sample times.

    Reference samples are matched by nearest time; a mismatch beyond 1e-9 s
    is an error (no interpolation).
    """
    order = np.argsort(ref.t_s)
    rt, rv = ref.t_s[order], ref.values[order]
    pos = np.searchsorted(rt, sim.t_s)
    pos = np.clip(pos, 1, len(rt) - 1)
    left, right = rt[pos - 1], rt[pos]
    nearest = np.where(sim.t_s - left <= right - sim.t_s, pos - 1, pos)
    if np.max(np.abs(rt[nearest] - sim.t_s)) > 1e-9:
        raise ScenarioError("reference series does not cover simulation times")
    return float(np.max(np.abs(sim.values - rv[nearest])) / q_b)


@dataclass
class SweepEntry:
    method: str
    M: int
    Mx: int
    dT_s: float
    log10_err: float = math.nan
    wall_s: float = math.nan
    factorizations: int = 0
    status: str = "ok"


def run_sweep(net: GasNetwork, base_cfg: ScenarioConfig,
              entries: list[dict], ref_result: RunResult,
              probe: tuple[str, float, str]) -> list[SweepEntry]:
    """Run each (method, M, Mx, dT) configuration against a fixed reference.

    Statuses: ok, divergent (solver blow-up), invalid-config (rejected
    before stepping).
    """
    pipeline, x_m, fname = probe
    ref_probe = ref_result.series.probe(pipeline, x_m, fname)
    q_b = net.constants.q_b
    out = []
    for ent in entries:
        e = SweepEntry(method=ent["method"], M=int(ent.get("M", base_cfg.M)),
                       Mx=int(ent.get("Mx", base_cfg.Mx)), dT_s=float(ent["dT"]))
        try:
            cfg = base_cfg.replace(method=e.method, M=e.M, Mx=e.Mx, dT=e.dT_s)
        except (ScenarioError, ValueError):
            e.status = "invalid-config"
            out.append(e)
            continue
        try:
            res = run_simulation(net, cfg)
            err = compute_err(res.series.probe(pipeline, x_m, fname),
                              ref_probe, q_b)
            e.log10_err = math.log10(err) if err > 0 else -math.inf
            e.wall_s = res.wall_s
            e.factorizations = res.factorizations
        except (DivergenceError, SolverError, FdmError):
            e.status = "divergent"
        out.append(e)
    return out


def write_sweep_csv(entries: list[SweepEntry], fh) -> None:
    w = csv.writer(fh)
    w.writerow(["method", "M", "Mx", "dT_s", "log10_err", "wall_s",
                "factorizations", "status"])
    for e in entries:
        w.writerow([e.method, e.M, e.Mx, f"{e.dT_s:.15g}",
                    f"{e.log10_err:.6f}" if math.isfinite(e.log10_err) else "",
                    f"{e.wall_s:.6f}" if math.isfinite(e.wall_s) else "",
                    e.factorizations, e.status])
