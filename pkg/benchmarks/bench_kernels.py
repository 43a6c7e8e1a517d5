"""Micro-benchmark: pure-numpy vs compiled assembly kernels.

Times the two hot per-cell kernels (momentum block assembly and the
recursion right-hand side) for a few polynomial degrees, then times a full
single-pipeline simulation with each backend.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""
from __future__ import annotations

import os
import time

import numpy as np

from gastrans.kernels import _pure

try:
    from gastrans.kernels import _core
except ImportError:
    _core = None


def _time(fn, *args, repeat: int = 2000) -> float:
    fn(*args)  # warm caches / JIT-free but primes lru tables
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat


def bench_kernels() -> None:
    rng = np.random.default_rng(7)
    print(f"{'kernel':<22} {'M':>2} {'pure (us)':>10} {'compiled (us)':>14} {'speedup':>8}")
    for M in (2, 3, 4, 6):
        W = M + 1
        p0 = rng.normal(size=(W, W))
        q0 = rng.normal(size=(W, W))
        R = 6
        pl = rng.normal(size=(R, W, W))
        ql = rng.normal(size=(R, W, W))
        for name, pure_fn, core_fn, args in (
            ("momentum_block", _pure.sas1_momentum_block,
             _core.sas1_momentum_block if _core else None,
             (p0, q0, 1.013, M)),
            ("momentum_rhs", _pure.sas1_momentum_rhs,
             _core.sas1_momentum_rhs if _core else None,
             (pl, ql, R - 1, 1.013, 1.315, M)),
        ):
            tp = _time(pure_fn, *args)
            if core_fn is None:
                print(f"{name:<22} {M:>2} {tp * 1e6:>10.2f} {'n/a':>14} {'':>8}")
                continue
            tc = _time(core_fn, *args)
            np.testing.assert_allclose(core_fn(*args), pure_fn(*args),
                                       rtol=1e-12, atol=1e-12)
            print(f"{name:<22} {M:>2} {tp * 1e6:>10.2f} {tc * 1e6:>14.2f} "
                  f"{tp / tc:>7.2f}x")


def bench_simulation() -> None:
    from gastrans import driver, network

    root = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..")
    with open(os.path.join(root, "scenarios", "single_pipeline.toml"),
              encoding="utf-8") as fh:
        cfg = network.parse_scenario(fh.read())
    run_cfg = cfg.replace(method="sas1", M=4, Mx=1, dT=0.5)
    for label, env in (("compiled", "0"), ("pure", "1")):
        if label == "compiled" and _core is None:
            print("full run    compiled: n/a (extension not built)")
            continue
        os.environ["GASTRANS_PURE"] = env
        import importlib
        import gastrans.kernels as K
        importlib.reload(K)
        res = driver.run_simulation(cfg.network, run_cfg)
        print(f"full run    {label:>8}: {res.wall_s:.3f} s "
              f"({res.steps} steps, sas1 M=4 dT=0.5)")
    os.environ.pop("GASTRANS_PURE", None)


if __name__ == "__main__":
    if _core is None:
        print("compiled backend not available; timing pure backend only\n")
    bench_kernels()
    print()
    bench_simulation()
