"""Independent reference implementations used to cross-check the package.

Everything here is written from the model definitions with straightforward
loops, deliberately avoiding the production code paths (index tables,
bincount gathers, closed forms) it is meant to validate.
"""

from __future__ import annotations

import numpy as np

from gastrans.network import (
    BoundarySignal,
    GasConstants,
    GasNetwork,
    NodeSpec,
    PipelineSpec,
)


# ---------------------------------------------------------------------------
# Bivariate polynomial arithmetic (dense (n, j) coefficient grids)

def poly_mul(a: np.ndarray, b: np.ndarray, deg_cap: int) -> np.ndarray:
    """Product of two coefficient grids, truncated at total degree deg_cap."""
    W = deg_cap + 1
    out = np.zeros((W, W))
    na, ja = a.shape
    nb, jb = b.shape
    for n1 in range(na):
        for j1 in range(ja):
            if a[n1, j1] == 0.0:
                continue
            for n2 in range(nb):
                for j2 in range(jb):
                    n, j = n1 + n2, j1 + j2
                    if n + j <= deg_cap:
                        out[n, j] += a[n1, j1] * b[n2, j2]
    return out


def poly_dt(c: np.ndarray) -> np.ndarray:
    out = np.zeros_like(c)
    for n in range(c.shape[0]):
        for j in range(1, c.shape[1]):
            out[n, j - 1] = j * c[n, j]
    return out


def poly_dx(c: np.ndarray) -> np.ndarray:
    out = np.zeros_like(c)
    for n in range(1, c.shape[0]):
        for j in range(c.shape[1]):
            out[n - 1, j] = n * c[n, j]
    return out


def matched_rows(c: np.ndarray, M: int) -> np.ndarray:
    """Read a coefficient grid at the matched monomials dx^n dt^(m-n-1)."""
    out = np.zeros(M * (M + 1) // 2)
    k = 0
    for m in range(1, M + 1):
        for n in range(m):
            out[k] = c[n, m - n - 1]
            k += 1
    return out


def momentum_rhs_literal(p_layers: np.ndarray, q_layers: np.ndarray, r: int,
                         c2: float, c3: float, M: int) -> np.ndarray:
    """Level-r momentum RHS assembled term by term with full products."""
    acc = np.zeros((M, M))
    for j in range(1, r):
        dq = poly_dt(q_layers[r - j]) + c2 * poly_dx(p_layers[r - j])
        acc += poly_mul(p_layers[j], dq, M - 1)
    for j in range(r):
        acc += c3 * poly_mul(q_layers[j], q_layers[r - 1 - j], M - 1)
    return -matched_rows(acc, M)


def momentum_block_literal(p0: np.ndarray, q0: np.ndarray, c2: float,
                           M: int) -> np.ndarray:
    """Level-r momentum matrix block, column by column via unit perturbations."""
    from gastrans.kernels import monomials

    monos = monomials(M)
    half = len(monos)
    cols = np.zeros((M * (M + 1) // 2, 2 * half))
    for k, (n, j) in enumerate(monos):
        unit = np.zeros((M + 1, M + 1))
        unit[n, j] = 1.0
        # p-unknown column: Pr*d_dt(Q0) + C2*(P0*d_dx(Pr) + Pr*d_dx(P0))
        term = (poly_mul(unit, poly_dt(q0), M - 1)
                + c2 * poly_mul(p0, poly_dx(unit), M - 1)
                + c2 * poly_mul(unit, poly_dx(p0), M - 1))
        cols[:, k] = matched_rows(term, M)
        # q-unknown column: P0*d_dt(Qr)
        term = poly_mul(p0, poly_dt(unit), M - 1)
        cols[:, half + k] = matched_rows(term, M)
    return cols


# ---------------------------------------------------------------------------
# Steady pressure profile by numerical integration

def steady_profile_rk4(p_in: float, q0: float, L: float, lam: float, d: float,
                       S: float, v: float, n_steps: int = 4000) -> float:
    """Integrate dp/dx = -lam v^2 q0^2 / (2 d S^2 p) from 0 to L."""
    h = L / n_steps
    c = -lam * v ** 2 * q0 ** 2 / (2.0 * d * S ** 2)
    p = p_in
    f = lambda pv: c / pv
    for _ in range(n_steps):
        k1 = f(p)
        k2 = f(p + 0.5 * h * k1)
        k3 = f(p + 0.5 * h * k2)
        k4 = f(p + h * k3)
        p += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return p


# ---------------------------------------------------------------------------
# Random tree networks

def random_tree_network(rng: np.random.Generator) -> GasNetwork:
    """A valid random tree: one supply at the root, demands at the leaves."""
    n_nodes = int(rng.integers(2, 7))
    parents = [int(rng.integers(0, k)) for k in range(1, n_nodes)]
    children: dict[int, list[int]] = {k: [] for k in range(n_nodes)}
    for child, par in enumerate(parents, start=1):
        children[par].append(child)

    nodes = []
    for k in range(n_nodes):
        if k == 0:
            nodes.append(NodeSpec(id=f"n{k}", kind="supply",
                                  signal=BoundarySignal(offset=6e6)))
        elif not children[k]:
            nodes.append(NodeSpec(id=f"n{k}", kind="demand",
                                  signal=BoundarySignal(offset=float(rng.uniform(10, 200)))))
        else:
            nodes.append(NodeSpec(id=f"n{k}", kind="junction",
                                  signal=BoundarySignal(offset=0.0)))
    # A junction with a single child still needs >= 2 attachments, which the
    # parent edge plus one child edge provides.
    pipes = []
    for child, par in enumerate(parents, start=1):
        n_cells = int(rng.integers(1, 5))
        dL = float(rng.choice([100.0, 200.0, 400.0]))
        pipes.append(PipelineSpec(
            id=f"e{child}", from_node=f"n{par}", to_node=f"n{child}",
            L=n_cells * dL, d=float(rng.uniform(0.5, 1.5)),
            S=float(rng.uniform(0.3, 1.5)), lam=float(rng.uniform(0.005, 0.03)),
            dL=dL,
        ))
    const = GasConstants(v=380.0, p_b=1e6, q_b=2e3)
    return GasNetwork(constants=const, pipelines=tuple(pipes), nodes=tuple(nodes))
