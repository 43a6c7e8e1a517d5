import numpy as np
import pytest

from gastrans import driver
from gastrans.fdm import FdmContext, FdmError
from gastrans.network import (
    BoundarySignal,
    GasConstants,
    GasNetwork,
    NodeSpec,
    PipelineSpec,
    ScenarioConfig,
)
from gastrans.steady import solve_steady_state


def _steady_cfg():
    net = GasNetwork(
        constants=GasConstants(v=380.0, p_b=1e6, q_b=2e3),
        pipelines=(PipelineSpec("p1", "inlet", "outlet", 2000.0, 1.016,
                                0.8107, 0.0075, 400.0),),
        nodes=(NodeSpec("inlet", "supply", BoundarySignal(offset=6e6)),
               NodeSpec("outlet", "demand", BoundarySignal(offset=300.0))),
    )
    return ScenarioConfig(network=net, duration=100.0, dT=1.0, method="fdm")


def test_steady_state_is_a_fixed_point():
    """With constant boundary signals the analytic steady profile is exact.

    The friction linearization uses the nodal-sum ratio K, so the discrete
    momentum balance reduces to (p_{i+1}^2 - p_i^2)/dL = slope, which the
    closed-form profile satisfies identically.
    """
    cfg = _steady_cfg()
    net = cfg.network
    ctx = FdmContext(net, cfg.dT)
    state = ctx.initial_state(solve_steady_state(net, 0.0))
    p0 = [p.copy() for p in state.p]
    q0 = [q.copy() for q in state.q]
    for k in range(100):
        state = ctx.step(state, k * cfg.dT)
    for e in range(len(net.pipelines)):
        assert np.max(np.abs(state.p[e] - p0[e])) <= 1e-9
        assert np.max(np.abs(state.q[e] - q0[e])) <= 1e-9


def test_refinement_convergence(single_cfg):
    """Halving both steps shrinks the deviation from a fine-grid run."""
    cfg = single_cfg.replace(method="fdm", duration=20.0)
    net = cfg.network
    fine = driver.run_simulation(net, cfg.replace(dT=0.025), refine=8)
    probe_ref = fine.series.probe("p1", 0.0, "q")
    errs = []
    for dT, refine in [(0.4, 1), (0.2, 2), (0.1, 4)]:
        res = driver.run_simulation(net, cfg.replace(dT=dT), refine=refine)
        errs.append(driver.compute_err(res.series.probe("p1", 0.0, "q"),
                                       probe_ref, net.constants.q_b))
    assert errs[0] > errs[1] > errs[2]
    assert errs[1] < 0.75 * errs[0]


def test_refine_scales_unknowns(single_cfg):
    net = single_cfg.network
    assert FdmContext(net, 1.0, refine=1).n_unk == 12  # 2 * (5 + 1)
    assert FdmContext(net, 1.0, refine=4).n_unk == 42  # 2 * (20 + 1)


def test_six_node_assembly_is_square(six_cfg):
    ctx = FdmContext(six_cfg.network, 0.1)
    # 2*(N+1) unknowns per pipeline: N = 20, 20, 20, 10, 10.
    assert ctx.n_unk == sum(2 * (n + 1) for n in (20, 20, 20, 10, 10))


def test_borders_are_si(single_cfg):
    net = single_cfg.network
    ctx = FdmContext(net, 1.0)
    state = ctx.initial_state(solve_steady_state(net, 0.0))
    p, q = ctx.borders_si(state, 0)
    assert p[0] == pytest.approx(6e6)
    assert np.allclose(q, 300.0)


def test_degenerate_state_rejected(single_cfg):
    net = single_cfg.network
    ctx = FdmContext(net, 1.0)
    state = ctx.initial_state(solve_steady_state(net, 0.0))
    state.p[0][:] = -1.0
    with pytest.raises(FdmError):
        ctx.step(state, 0.0)


def test_factorization_counter(single_cfg):
    cfg = single_cfg.replace(method="fdm", duration=10.0, dT=1.0)
    res = driver.run_simulation(cfg.network, cfg)
    assert res.factorizations == 10
