"""Pure numpy kernels for the nonlinear-recursion (full-scheme) assembly.

Conventions shared with the compiled backend and the assembly code:

* Bivariate polynomial coefficients live in ``(M+1, M+1)`` arrays ``c[n, j]``
  (``n``: space power, ``j``: time power); entries with ``n + j > M`` are zero.
* Cell-local unknown order: all p monomials, then all q monomials, where the
  monomial list is ``monomials(M)`` (lexicographic ``(n, j)``, ``(0, 0)``
  excluded).
* Matched-monomial (row) order: ``(m, n)`` for ``m = 1..M``, ``n = 0..m-1``,
  i.e. row ``m(m-1)/2 + n`` matches the monomial ``dx^n dt^(m-n-1)``.

``sas1_momentum_block`` builds the unknown-side coefficients of the momentum
rows at recursion level ``r >= 1``: the level-r unknowns enter multiplied by
level-0 data through ``P0*d_dt(Qr) + Pr*d_dt(Q0) + C2*(P0*d_dx(Pr) +
Pr*d_dx(P0))``, truncated at total degree ``M - 1``.

``sas1_momentum_rhs`` builds the right-hand side from levels ``0..r-1``:
the cross products of intermediate levels plus the friction convolution
``C3 * sum_j Qj * Q(r-1-j)``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


def monomials(M: int) -> list[tuple[int, int]]:
    """Cell-local unknown monomials (n, j), n + j <= M, excluding (0, 0)."""
    return [(n, j) for n in range(M + 1) for j in range(M + 1 - n) if (n, j) != (0, 0)]


def n_matched_rows(M: int) -> int:
    return M * (M + 1) // 2


@lru_cache(maxsize=None)
def _block_tables(M: int):
    monos = monomials(M)
    pos = {nj: k for k, nj in enumerate(monos)}
    half = len(monos)
    nc = 2 * half
    W = M + 1
    lin_q, src_q, mult_q = [], [], []
    lin_pa, src_pa, mult_pa = [], [], []
    lin_d, src_d = [], []
    for m in range(1, M + 1):
        for n in range(m):
            row = m * (m - 1) // 2 + n
            a, b = n, m - n - 1
            for (u, w), k in pos.items():
                # P0 * d_dt(Qr): acts on q_{u,w}, w >= 1
                if w >= 1:
                    i, g = a - u, b - w + 1
                    if i >= 0 and g >= 0 and i + g <= M:
                        lin_q.append(row * nc + half + k)
                        src_q.append(i * W + g)
                        mult_q.append(w)
                # C2 * P0 * d_dx(Pr): acts on p_{u,w}, u >= 1
                if u >= 1:
                    i, g = a - u + 1, b - w
                    if i >= 0 and g >= 0 and i + g <= M:
                        lin_pa.append(row * nc + k)
                        src_pa.append(i * W + g)
                        mult_pa.append(u)
                # Pr * (d_dt(Q0) + C2 d_dx(P0)): acts on p_{u,w}
                i, g = a - u, b - w
                if i >= 0 and g >= 0 and i + g <= M - 1:
                    lin_d.append(row * nc + k)
                    src_d.append(i * M + g)
    asarr = lambda x: np.asarray(x, dtype=np.intp)
    return (
        half,
        asarr(lin_q), asarr(src_q), np.asarray(mult_q, dtype=float),
        asarr(lin_pa), asarr(src_pa), np.asarray(mult_pa, dtype=float),
        asarr(lin_d), asarr(src_d),
    )


@lru_cache(maxsize=None)
def _conv_tables(M: int):
    """Triplets (row, x_flat, y_flat) realizing truncated products at the
    matched monomials: row(a, b) sums x[i, g] * y[a-i, b-g]."""
    W = M + 1
    rows, xl, yl = [], [], []
    for a in range(M):
        for b in range(M - a):
            row = (a + b) * (a + b + 1) // 2 + a
            for i in range(a + 1):
                for g in range(b + 1):
                    rows.append(row)
                    xl.append(i * W + g)
                    yl.append((a - i) * W + (b - g))
    return (
        np.asarray(rows, dtype=np.intp),
        np.asarray(xl, dtype=np.intp),
        np.asarray(yl, dtype=np.intp),
    )


def _d_dt(c: np.ndarray) -> np.ndarray:
    """Time derivative of bivariate coefficient arrays (last axes (n, j))."""
    out = np.zeros_like(c)
    j = np.arange(1, c.shape[-1])
    out[..., :, :-1] = c[..., :, 1:] * j
    return out


def _d_dx(c: np.ndarray) -> np.ndarray:
    out = np.zeros_like(c)
    n = np.arange(1, c.shape[-2])
    out[..., :-1, :] = c[..., 1:, :] * n[:, None]
    return out


def sas1_momentum_block(p0: np.ndarray, q0: np.ndarray, c2: float, M: int) -> np.ndarray:
    """Momentum-row coefficients over one cell's level-r unknowns.

    Returns an array of shape ``(M(M+1)/2, M(M+3))``; column order is the
    cell-local unknown order, row order the matched-monomial order.
    """
    half, lin_q, src_q, mult_q, lin_pa, src_pa, mult_pa, lin_d, src_d = _block_tables(M)
    nm = n_matched_rows(M)
    nc = 2 * half
    W = M + 1
    P = np.asarray(p0, dtype=float).reshape(W, W)
    Q = np.asarray(q0, dtype=float).reshape(W, W)
    p0f = P.ravel()
    # D0[i, g] = (g+1) q0[i, g+1] + C2 (i+1) p0[i+1, g], total degree <= M-1
    jj = np.arange(1, W)
    ii = np.arange(1, W)
    D0 = Q[:M, 1:] * jj[None, :] + c2 * P[1:, :M] * ii[:, None]
    size = nm * nc
    flat = np.bincount(lin_q, weights=mult_q * p0f[src_q], minlength=size)
    flat += c2 * np.bincount(lin_pa, weights=mult_pa * p0f[src_pa], minlength=size)
    flat += np.bincount(lin_d, weights=D0.ravel()[src_d], minlength=size)
    return flat.reshape(nm, nc)


def sas1_momentum_rhs(
    p_layers: np.ndarray, q_layers: np.ndarray, r: int, c2: float, c3: float, M: int
) -> np.ndarray:
    """Momentum-row RHS at recursion level r (levels 0..r-1 already solved).

    ``p_layers``/``q_layers`` have shape ``(>= r, M+1, M+1)`` and must include
    the fixed (0, 0) entries.
    """
    rows, xl, yl = _conv_tables(M)
    nm = n_matched_rows(M)
    flat = lambda arr: arr.reshape(arr.shape[0], -1)
    acc = np.zeros(nm)
    if r >= 2:
        Xs = flat(p_layers[1:r])
        Ys = flat(_d_dt(q_layers[r - 1:0:-1]) + c2 * _d_dx(p_layers[r - 1:0:-1]))
        prod = (Xs[:, xl] * Ys[:, yl]).sum(axis=0)
        acc += np.bincount(rows, weights=prod, minlength=nm)
    Qa = flat(q_layers[0:r])
    Qb = flat(q_layers[r - 1::-1])
    prod = (Qa[:, xl] * Qb[:, yl]).sum(axis=0)
    acc += c3 * np.bincount(rows, weights=prod, minlength=nm)
    return -acc
