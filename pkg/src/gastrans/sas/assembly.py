"""Assembly of the collocation linear system.

One square system per recursion level; the matrix entries of all constraint
rows (initial value, boundary, junction, seam) and of the continuity rows are
level-independent, so a single base matrix ``A0`` is built once.  The
full-recursion scheme replaces only the momentum rows at levels r >= 1.

Row order (documented, bit-reproducible): per pipeline in declaration order:
for each cell, PDE rows (m = 1..M, n = 0..m-1; continuity row then momentum
row); then per cell the initial-value rows (point order, p then q); then the
seam rows (cell pair order, point order, p then q).  After all pipelines, node
rows in node declaration order: supply/demand rows per attached end per point;
junction rows per point (pressure-equality chain anchored on the first
attached end, then the mass-balance row).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..network import GasNetwork, NodeSpec, PipelineSpec, ScenarioError
from .layout import (
    CollocationLayout,
    NormalizedPipeConstants,
    UnknownIndexMap,
    compute_constants,
    count_and_index,
    layout_collocation,
)

__all__ = ["PipeGrid", "SasStructure"]


@dataclass(frozen=True)
class PipeGrid:
    pipe: PipelineSpec
    idx: int
    n_cells: int
    const: NormalizedPipeConstants


class SasStructure:
    """Index maps, row descriptors, and the base matrix for one scenario."""

    def __init__(self, net: GasNetwork, M: int, Mx: int, dT: float):
        self.net = net
        self.M = M
        self.Mx = Mx
        self.dT = dT
        self.K = M - Mx
        self.layout: CollocationLayout = layout_collocation(M, Mx)
        self.index: UnknownIndexMap = count_and_index(net, M)
        self.pipes = [
            PipeGrid(p, i, p.n_cells, compute_constants(p, net.constants, dT))
            for i, p in enumerate(net.pipelines)
        ]
        self._build()

    # -- helpers -----------------------------------------------------------

    def _end_cell(self, pipe: PipelineSpec, side: str) -> int:
        pi = [g.pipe.id for g in self.pipes].index(pipe.id)
        g = self.pipes[pi]
        local = 0 if side == "inlet" else g.n_cells - 1
        return self.index.cell_index(pi, local)

    def _value_cols(self, cell: int, field: str, side: str, dtk: float):
        """(cols, coeffs) of one end value at time dtk, fixed term excluded."""
        idx = self.index
        if side == "inlet":  # dx = 0: only the (0, j) monomials
            cols = [idx.col(cell, field, 0, j) for j in range(1, self.M + 1)]
            coeffs = [dtk ** j for j in range(1, self.M + 1)]
        else:  # dx = 1: every monomial contributes dtk^j
            cols = [idx.col(cell, field, n, j) for (n, j) in idx.monos]
            coeffs = [dtk ** j for (n, j) in idx.monos]
        return cols, coeffs

    # -- construction ------------------------------------------------------

    def _build(self):
        idx = self.index
        M, Mx, K = self.M, self.Mx, self.K
        nm = M * (M + 1) // 2

        n_rows = 0
        for g in self.pipes:
            n_rows += g.n_cells * M * (M + 1)  # PDE
            n_rows += 2 * g.n_cells * Mx  # initial
            n_rows += 2 * (g.n_cells - 1) * K  # seam
        for node in self.net.nodes:
            att = self.net.attachments(node.id)
            if node.kind in ("supply", "demand"):
                n_rows += K * len(att)
            else:
                n_rows += K * len(att)
        if n_rows != idx.n_unk:
            raise ScenarioError(
                f"assembled row count {n_rows} != unknown count {idx.n_unk}"
            )

        A = np.zeros((idx.n_unk, idx.n_unk))
        # Descriptors used by the per-step RHS builder.
        mom_rows = np.zeros((idx.ncells, nm), dtype=np.intp)
        init_rows_p = np.zeros((idx.ncells, Mx), dtype=np.intp)
        init_rows_q = np.zeros((idx.ncells, Mx), dtype=np.intp)
        seam_rows = []  # (row_p_array(K,), row_q_array(K,), cell_left, cell_right)
        supply_rows = []  # (node, cell, rows(K,))
        demand_rows = []  # (node, cell, rows(K,))
        junction_eq_rows = []  # (rows(K,), cell_a, cell_b)
        junction_mass_rows = []  # (node, rows(K,), out_cells, in_cells)

        r = 0
        for g in self.pipes:
            c = g.const
            for local in range(g.n_cells):
                cell = idx.cell_index(g.idx, local)
                k_m = 0
                for m in range(1, M + 1):
                    for n in range(m):
                        # continuity: (m-n) p[n][m-n] + (n+1) C1 q[n+1][m-n-1]
                        A[r, idx.col(cell, "p", n, m - n)] = m - n
                        A[r, idx.col(cell, "q", n + 1, m - n - 1)] = (n + 1) * c.C1
                        r += 1
                        # momentum (level 0 / simplified-recursion form)
                        A[r, idx.col(cell, "q", n, m - n)] = m - n
                        A[r, idx.col(cell, "p", n + 1, m - n - 1)] = (n + 1) * c.C2
                        mom_rows[cell, k_m] = r
                        k_m += 1
                        r += 1
            for local in range(g.n_cells):
                cell = idx.cell_index(g.idx, local)
                for k, dxk in enumerate(self.layout.dx):
                    for mm in range(1, M + 1):
                        A[r, idx.col(cell, "p", mm, 0)] = dxk ** mm
                    init_rows_p[cell, k] = r
                    r += 1
                    for mm in range(1, M + 1):
                        A[r, idx.col(cell, "q", mm, 0)] = dxk ** mm
                    init_rows_q[cell, k] = r
                    r += 1
            for local in range(g.n_cells - 1):
                cl = idx.cell_index(g.idx, local)
                cr = idx.cell_index(g.idx, local + 1)
                rows_p = np.zeros(K, dtype=np.intp)
                rows_q = np.zeros(K, dtype=np.intp)
                for k, dtk in enumerate(self.layout.dt):
                    for field, rows in (("p", rows_p), ("q", rows_q)):
                        cols, coeffs = self._value_cols(cl, field, "outlet", dtk)
                        A[r, cols] += coeffs
                        cols, coeffs = self._value_cols(cr, field, "inlet", dtk)
                        A[r, cols] = np.asarray(A[r, cols]) - coeffs
                        rows[k] = r
                        r += 1
                seam_rows.append((rows_p, rows_q, cl, cr))

        for node in self.net.nodes:
            att = self.net.attachments(node.id)
            if node.kind == "supply":
                for pipe, side in att:
                    cell = self._end_cell(pipe, side)
                    rows = np.arange(r, r + K, dtype=np.intp)
                    for k, dtk in enumerate(self.layout.dt):
                        cols, coeffs = self._value_cols(cell, "p", side, dtk)
                        A[r, cols] += coeffs
                        r += 1
                    supply_rows.append((node, cell, rows))
            elif node.kind == "demand":
                for pipe, side in att:
                    cell = self._end_cell(pipe, side)
                    rows = np.arange(r, r + K, dtype=np.intp)
                    for k, dtk in enumerate(self.layout.dt):
                        cols, coeffs = self._value_cols(cell, "q", side, dtk)
                        A[r, cols] += coeffs
                        r += 1
                    demand_rows.append((node, cell, rows))
            else:
                # Pipes fed by the junction (inlet side) first, then feeders.
                ends = [(p, s) for p, s in att if s == "inlet"] + [
                    (p, s) for p, s in att if s == "outlet"
                ]
                cells = [(self._end_cell(p, s), s) for p, s in ends]
                eq_row_arrays = [np.zeros(K, dtype=np.intp) for _ in cells[1:]]
                mass_rows = np.zeros(K, dtype=np.intp)
                for k, dtk in enumerate(self.layout.dt):
                    c0, s0 = cells[0]
                    for e, (ce, se) in enumerate(cells[1:]):
                        cols, coeffs = self._value_cols(c0, "p", s0, dtk)
                        A[r, cols] += coeffs
                        cols, coeffs = self._value_cols(ce, "p", se, dtk)
                        A[r, cols] = np.asarray(A[r, cols]) - coeffs
                        eq_row_arrays[e][k] = r
                        r += 1
                    for ce, se in cells:
                        sign = 1.0 if se == "outlet" else -1.0
                        cols, coeffs = self._value_cols(ce, "q", se, dtk)
                        A[r, cols] += sign * np.asarray(coeffs)
                    mass_rows[k] = r
                    r += 1
                for e, (ce, se) in enumerate(cells[1:]):
                    junction_eq_rows.append((eq_row_arrays[e], cells[0][0], ce))
                out_cells = [c for c, s in cells if s == "outlet"]
                in_cells = [c for c, s in cells if s == "inlet"]
                junction_mass_rows.append((node, mass_rows, out_cells, in_cells))

        assert r == idx.n_unk
        self.A0 = A
        self.mom_rows = mom_rows
        self.init_rows_p = init_rows_p
        self.init_rows_q = init_rows_q
        self.seam_rows = seam_rows
        self.supply_rows = supply_rows
        self.demand_rows = demand_rows
        self.junction_eq_rows = junction_eq_rows
        self.junction_mass_rows = junction_mass_rows
        # Matched-monomial gather indices: momentum row k of a cell matches
        # dx^n dt^(m-n-1); the simplified-recursion RHS reads q[n, m-n-1].
        n_arr, j_arr = [], []
        for m in range(1, M + 1):
            for n in range(m):
                n_arr.append(n)
                j_arr.append(m - n - 1)
        self.mom_n = np.asarray(n_arr, dtype=np.intp)
        self.mom_j = np.asarray(j_arr, dtype=np.intp)
        # Per-cell recursion constants, aligned with global cell index.
        self.cell_C2 = np.zeros(idx.ncells)
        self.cell_C3 = np.zeros(idx.ncells)
        for g in self.pipes:
            for local in range(g.n_cells):
                cell = idx.cell_index(g.idx, local)
                self.cell_C2[cell] = g.const.C2
                self.cell_C3[cell] = g.const.C3

    def dump_system(self, A: np.ndarray, b: np.ndarray) -> str:
        """Plain-text triplet dump (`row col value` lines) for inspection."""
        lines = [f"# dims {A.shape[0]} {A.shape[1]}"]
        rows, cols = np.nonzero(A)
        for r_, c_ in zip(rows, cols):
            lines.append(f"{r_} {c_} {A[r_, c_]:.17g}")
        lines.append("# rhs")
        for r_, v in enumerate(b):
            lines.append(f"{r_} {v:.17g}")
        return "\n".join(lines) + "\n"
