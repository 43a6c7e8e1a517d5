import pytest

from gastrans.network import ScenarioError
from gastrans.sas.layout import (
    compute_constants,
    count_and_index,
    layout_collocation,
)


def test_normalized_constants_single(single_cfg):
    net = single_cfg.network
    c = compute_constants(net.pipeline("p1"), net.constants, 1.0)
    assert c.C1 == pytest.approx(0.8905883804119896, rel=1e-14)
    assert c.C2 == pytest.approx(1.013375, rel=1e-14)
    assert c.C3 == pytest.approx(1.3148450498208508, rel=1e-14)


def test_constants_scale_linearly_with_dT(single_cfg):
    net = single_cfg.network
    pipe = net.pipeline("p1")
    c1 = compute_constants(pipe, net.constants, 1.0)
    c2 = compute_constants(pipe, net.constants, 0.25)
    for name in ("C1", "C2", "C3"):
        assert getattr(c2, name) == pytest.approx(getattr(c1, name) / 4.0)


def test_frictionless_pipe_has_zero_C3(single_cfg):
    net = single_cfg.network
    pipe = net.pipeline("p1")
    lossless = type(pipe)(id="f", from_node=pipe.from_node, to_node=pipe.to_node,
                          L=pipe.L, d=pipe.d, S=pipe.S, lam=0.0, dL=pipe.dL)
    c = compute_constants(lossless, net.constants, 1.0)
    assert c.C3 == 0.0 and c.C1 > 0 and c.C2 > 0


def test_collocation_points():
    lay = layout_collocation(2, 1)
    assert lay.dx == (1.0,)
    assert lay.dt == (1.0,)
    lay = layout_collocation(4, 1)
    assert lay.dx == (1.0,)
    assert lay.dt == (1 / 3, 2 / 3, 1.0)
    lay = layout_collocation(3, 2)
    assert lay.dx == (0.5, 1.0)
    assert lay.dt == (1.0,)
    with pytest.raises(ScenarioError):
        layout_collocation(3, 3)
    with pytest.raises(ScenarioError):
        layout_collocation(2, 0)


def test_unknown_counts(single_cfg, six_cfg):
    idx = count_and_index(single_cfg.network, 2)
    assert idx.ncell_unk == 10  # M(M+3)
    assert idx.n_unk == 50  # 5 cells
    idx = count_and_index(single_cfg.network, 4)
    assert idx.ncell_unk == 28
    assert idx.n_unk == 140
    idx = count_and_index(six_cfg.network, 3)
    assert idx.ncells == 80
    assert idx.n_unk == 1440


def test_index_map_is_a_bijection(six_cfg):
    idx = count_and_index(six_cfg.network, 3)
    seen = set()
    for cell in range(idx.ncells):
        sl = idx.cell_slice(cell)
        for field in ("p", "q"):
            for (n, j) in idx.monos:
                col = idx.col(cell, field, n, j)
                assert sl.start <= col < sl.stop
                seen.add(col)
    assert seen == set(range(idx.n_unk))


def test_cell_index_offsets(six_cfg):
    idx = count_and_index(six_cfg.network, 3)
    assert idx.cell_index(0, 0) == 0
    assert idx.cell_index(1, 0) == 20
    assert idx.cell_index(4, 9) == 79
