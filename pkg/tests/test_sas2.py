import numpy as np
import pytest

from gastrans.sas.engine import SasContext, compute_C4
from gastrans.steady import (
    CellProfiles,
    build_initial_state,
    solve_steady_state,
)


def test_compute_c4_endpoint_ratio():
    prof = CellProfiles(p=lambda dx: 4e6 + 2e6 * dx, q=lambda dx: 100.0 + 60.0 * dx)
    # ((100 + 160)/q_b) / ((4e6 + 6e6)/p_b) with p_b = 1e6, q_b = 2e3.
    assert compute_C4(prof, 1e6, 2e3) == pytest.approx((260.0 / 2e3) / 10.0)


def test_compute_c4_carries_flow_sign():
    prof = CellProfiles(p=lambda dx: 5e6, q=lambda dx: -80.0)
    assert compute_C4(prof, 1e6, 2e3) < 0


def _step_once(cfg, **over):
    net = cfg.network
    run_cfg = cfg.replace(**over) if over else cfg
    ctx = SasContext(net, run_cfg)
    state = build_initial_state(net, solve_steady_state(net, 0.0))
    sol = ctx.step(state, 0.0)
    return ctx, sol


def test_layer_norms_decay_geometrically(single_cfg):
    """Beyond the first correction the recursion contracts (ratio < 1)."""
    for dT in (0.1, 0.5):
        _, sol = _step_once(single_cfg, method="sas2", dT=dT, R_order=12)
        norms = [float(np.max(np.abs(sol.q_layers[r])) +
                       np.max(np.abs(sol.p_layers[r])))
                 for r in range(sol.layers_used)]
        for r in range(2, len(norms)):
            if norms[r - 1] == 0.0:
                break
            assert norms[r] / norms[r - 1] < 1.0


def test_first_correction_rhs_uses_level0_flow(single_cfg):
    """The r = 1 layer scales with C3*C4 applied to the level-0 solution."""
    ctx, sol = _step_once(single_cfg, method="sas2", dT=0.5)
    assert sol.layers_used >= 2
    st = ctx.struct
    # Rebuild the r = 1 RHS independently from the solved level-0 layer and
    # check it reproduces the solved layer through the cached factorization.
    from scipy.linalg import lu_solve

    nc = st.index.ncells
    b = np.zeros(st.index.n_unk)
    state = build_initial_state(single_cfg.network,
                                solve_steady_state(single_cfg.network, 0.0))
    p000, q000, _, _, p_end, q_end = ctx._profile_values(state)
    c4 = (q000 + q_end) / (p000 + p_end)
    coef = -st.cell_C3 * c4
    b[st.mom_rows] = coef[:, None] * sol.q_layers[0][:, st.mom_n, st.mom_j]
    y = lu_solve(ctx._lu_cached, b).reshape(nc, st.index.ncell_unk)
    from gastrans.sas.engine import _mono_index_arrays

    n_m, j_m = _mono_index_arrays(st.M)
    np.testing.assert_allclose(y[:, :st.index.half],
                               sol.p_layers[1][:, n_m, j_m], rtol=1e-12,
                               atol=1e-14)


def test_single_factorization_across_steps(single_cfg):
    net = single_cfg.network
    ctx = SasContext(net, single_cfg.replace(method="sas2", dT=1.0))
    state = build_initial_state(net, solve_steady_state(net, 0.0))
    for k in range(20):
        sol = ctx.step(state, k * 1.0, k)
        state, _ = ctx.advance(sol, k)
    assert ctx.factorizations == 1


def test_termination_by_layer_tolerance(single_cfg):
    _, tight = _step_once(single_cfg, method="sas2", dT=0.5, eps_b=1e-30,
                          R_order=12)
    _, loose = _step_once(single_cfg, method="sas2", dT=0.5, eps_b=1e-6,
                          R_order=12)
    assert loose.layers_used < tight.layers_used
