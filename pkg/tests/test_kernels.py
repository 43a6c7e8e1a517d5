import numpy as np
import pytest

from gastrans import kernels
from gastrans.kernels import _pure

_core = pytest.importorskip("gastrans.kernels._core",
                            reason="compiled kernel extension not built")


def _random_layers(rng, R, M):
    W = M + 1
    out = np.zeros((R, W, W))
    for layer in range(R):
        for n in range(W):
            for j in range(W - n):
                out[layer, n, j] = rng.normal()
    return out


@pytest.mark.parametrize("M", [2, 3, 4, 5, 6])
def test_block_backends_agree(M):
    rng = np.random.default_rng(100 + M)
    for _ in range(10):
        p0 = _random_layers(rng, 1, M)[0]
        q0 = _random_layers(rng, 1, M)[0]
        c2 = float(rng.uniform(0.1, 3.0))
        np.testing.assert_allclose(
            _core.sas1_momentum_block(p0, q0, c2, M),
            _pure.sas1_momentum_block(p0, q0, c2, M),
            rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("M", [2, 3, 4, 6])
@pytest.mark.parametrize("r", [1, 2, 5])
def test_rhs_backends_agree(M, r):
    rng = np.random.default_rng(10 * M + r)
    for _ in range(10):
        p_layers = _random_layers(rng, r, M)
        q_layers = _random_layers(rng, r, M)
        c2 = float(rng.uniform(0.1, 3.0))
        c3 = float(rng.uniform(0.0, 3.0))
        np.testing.assert_allclose(
            _core.sas1_momentum_rhs(p_layers, q_layers, r, c2, c3, M),
            _pure.sas1_momentum_rhs(p_layers, q_layers, r, c2, c3, M),
            rtol=1e-13, atol=1e-13)


def test_monomials_backends_agree():
    for M in range(2, 7):
        assert list(_core.monomials(M)) == _pure.monomials(M)


def test_backend_selection_reports_compiled():
    # The extension imported above, so the default selection must be compiled
    # unless the fallback was forced through the environment.
    import os

    if os.environ.get("GASTRANS_PURE") == "1":
        assert kernels.backend_name == "pure"
    else:
        assert kernels.backend_name == "compiled"
