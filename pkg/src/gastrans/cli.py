"""Command-line interface.

Exit codes: 0 success, 1 validation failure / bad input, 2 solver failure
(divergence or singular system), 3 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import driver, network, steady
from .fdm import FdmError
from .sas.engine import DivergenceError, SolverError


def _load(path: str) -> tuple[network.GasNetwork, network.ScenarioConfig]:
    with open(path, "r", encoding="utf-8") as fh:
        cfg = network.parse_scenario(fh.read())
    return cfg.network, cfg


def _apply_overrides(cfg: network.ScenarioConfig, args) -> network.ScenarioConfig:
    kw = {}
    for opt, name in [("method", "method"), ("M", "M"), ("Mx", "Mx"),
                      ("R", "R_order"), ("dT", "dT"), ("eps_b", "eps_b")]:
        val = getattr(args, opt, None)
        if val is not None:
            kw[name] = val
    return cfg.replace(**kw) if kw else cfg


def _parse_probe(spec: str, net: network.GasNetwork):
    try:
        pipe_id, end, fname = spec.split(":")
    except ValueError:
        raise network.ScenarioError(
            f"probe must be pipeline:end:field, got {spec!r}") from None
    if end not in ("inlet", "outlet") or fname not in ("p", "q"):
        raise network.ScenarioError(f"bad probe spec {spec!r}")
    pipe = net.pipeline(pipe_id)
    return pipe_id, (0.0 if end == "inlet" else pipe.L), fname


def cmd_validate(args) -> int:
    with open(args.scenario, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        cfg = network.parse_scenario(text)
        net = cfg.network
    except network.ScenarioError as exc:
        print(f"INVALID: {exc}")
        return 1
    print(f"OK: {len(net.nodes)} nodes, {len(net.pipelines)} pipelines, "
          f"{cfg.steps} steps of {cfg.dT} s ({cfg.method})")
    return 0


def cmd_steady(args) -> int:
    net, _ = _load(args.scenario)
    ss = steady.solve_steady_state(net, 0.0)
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        out.write("entity,kind,value_si\n")
        for pid in sorted(ss.flows):
            out.write(f"{pid},flow_kg_s,{ss.flows[pid]:.15g}\n")
        for nid in sorted(ss.node_pressures):
            out.write(f"{nid},pressure_pa,{ss.node_pressures[nid]:.15g}\n")
    finally:
        if args.out:
            out.close()
    return 0


def cmd_run(args) -> int:
    net, cfg = _load(args.scenario)
    cfg = _apply_overrides(cfg, args)
    res = driver.run_simulation(net, cfg)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            res.series.write_csv(fh)
    print(f"{cfg.method}: {res.steps} steps in {res.wall_s:.3f} s, "
          f"{res.factorizations} factorizations")
    if res.layer_counts:
        print(f"layers per step: min {min(res.layer_counts)} "
              f"max {max(res.layer_counts)}")
    return 0


def cmd_compare(args) -> int:
    net, cfg = _load(args.scenario)
    cfg = _apply_overrides(cfg, args)
    probe = _parse_probe(args.probe, net)
    res = driver.run_simulation(net, cfg)
    ref_cfg = cfg.replace(method="fdm", dT=args.ref_dT,
                          duration=cfg.duration)
    ref = driver.run_simulation(net, ref_cfg, refine=args.ref_refine)
    err = driver.compute_err(
        res.series.probe(probe[0], probe[1], probe[2]),
        ref.series.probe(probe[0], probe[1], probe[2]),
        net.constants.q_b)
    log_err = math.log10(err) if err > 0 else -math.inf
    print(f"{cfg.method} M={cfg.M} Mx={cfg.Mx} dT={cfg.dT}: "
          f"ERR={err:.6e} log10={log_err:.3f} wall={res.wall_s:.3f}s")
    return 0


def cmd_sweep(args) -> int:
    sweep_cfg = driver_load_sweep(args.sweep)
    net, cfg = _load(sweep_cfg["scenario"])
    probe = _parse_probe(sweep_cfg["probe"], net)
    ref_raw = sweep_cfg["reference"]
    ref_cfg = cfg.replace(method=ref_raw.get("method", "fdm"),
                          dT=float(ref_raw["dT"]))
    ref = driver.run_simulation(net, ref_cfg,
                                refine=int(ref_raw.get("refine", 1)))
    entries = driver.run_sweep(net, cfg, sweep_cfg["entries"], ref, probe)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            driver.write_sweep_csv(entries, fh)
    for e in entries:
        tail = (f"log10_err={e.log10_err:.3f} wall={e.wall_s:.3f}s"
                if e.status == "ok" else e.status)
        print(f"{e.method} M={e.M} Mx={e.Mx} dT={e.dT_s}: {tail}")
    return 0


def driver_load_sweep(path: str) -> dict:
    """Read a sweep file: scenario path, probe spec, [reference], [[entry]].

    Each entry may give dT as a scalar or a list (expanded to one entry per
    value).
    """
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    for key in ("scenario", "probe", "reference", "entry"):
        if key not in raw:
            raise network.ScenarioError(f"sweep file missing {key!r}")
    entries = []
    for ent in raw["entry"]:
        dts = ent["dT"] if isinstance(ent["dT"], list) else [ent["dT"]]
        for dt in dts:
            e = dict(ent)
            e["dT"] = float(dt)
            entries.append(e)
    scenario = raw["scenario"]
    if not os.path.isabs(scenario):
        scenario = os.path.join(os.path.dirname(os.path.abspath(path)), scenario)
    return {"scenario": scenario, "probe": raw["probe"],
            "reference": raw["reference"], "entries": entries}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gastrans",
        description="Transient gas pipeline network simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, scenario=True):
        if scenario:
            p.add_argument("--scenario", required=True)
        p.add_argument("--method", choices=["sas1", "sas2", "fdm"])
        p.add_argument("--M", type=int)
        p.add_argument("--Mx", type=int)
        p.add_argument("--R", type=int)
        p.add_argument("--dT", type=float)
        p.add_argument("--eps-b", dest="eps_b", type=float)
        p.add_argument("--out")

    p = sub.add_parser("validate", help="parse and validate a scenario")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("steady", help="print the steady initial state")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("run", help="run a transient simulation")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="run and score against an FDM reference")
    common(p)
    p.add_argument("--probe", required=True,
                   help="pipeline:end:field, e.g. p1:inlet:q")
    p.add_argument("--ref-dT", type=float, default=0.01)
    p.add_argument("--ref-refine", type=int, default=5)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="run a configuration sweep file")
    p.add_argument("--sweep", required=True)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1,
                   help="reserved; sweeps currently run serially")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 3 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (network.ScenarioError, steady.SteadyStateError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DivergenceError, SolverError, FdmError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
