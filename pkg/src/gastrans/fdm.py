"""Cell-centered implicit finite-difference baseline.

Works on the normalized per-cell model.  Each cell contributes two difference
equations built from its four corners (time derivative averaged over the two
spatial nodes, space derivative taken at the new time level); the friction
term uses the stabilized linearization with the old-level coefficient

    q|q|/p  ~=  K * (q_next(i+1) + q_next(i) - (q(i+1) + q(i)) / 2),
    K = (q(i+1) + q(i)) / (p(i+1) + p(i)).

Unknowns are the nodal p and q of every pipeline at the new time level;
boundary rows fix p at supply inlets and q at demand outlets, junction rows
impose pressure equality and mass balance on the shared nodal values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .network import GasNetwork, ScenarioError
from .sas.layout import compute_constants
from .steady import SteadyState

__all__ = ["FdmState", "FdmContext", "FdmError"]


class FdmError(RuntimeError):
    pass


@dataclass
class FdmState:
    """Normalized nodal values p[i], q[i] per pipeline (length N+1 arrays)."""

    p: list[np.ndarray]
    q: list[np.ndarray]
    step_index: int = 0


class FdmContext:
    """Assembly pattern and per-step solver for one scenario.

    ``refine`` multiplies every pipeline's cell count (grid refinement for
    reference-grade runs); dT is taken as given.
    """

    def __init__(self, net: GasNetwork, dT: float, refine: int = 1):
        self.net = net
        self.dT = dT
        self.refine = refine
        self.factorizations = 0
        self._build()

    def _build(self):
        net = self.net
        self.n_cells = []
        self.consts = []
        self.offsets = []  # variable offset per pipeline (p block, then q block)
        offset = 0
        for pipe in net.pipelines:
            n = pipe.n_cells * self.refine
            dl = pipe.L / n
            scaled = type(pipe)(
                id=pipe.id, from_node=pipe.from_node, to_node=pipe.to_node,
                L=pipe.L, d=pipe.d, S=pipe.S, lam=pipe.lam, dL=dl,
            )
            self.n_cells.append(n)
            self.consts.append(compute_constants(scaled, net.constants, self.dT))
            self.offsets.append(offset)
            offset += 2 * (n + 1)
        self.n_unk = offset

        rows, cols, data = [], [], []
        dyn_entries = []  # (data_index, pipe_idx, cell, node_a, node_b) for q coeffs
        rhs_cont = []  # (row, pipe_idx, i) continuity rows
        rhs_mom = []  # (row, pipe_idx, i) momentum rows
        r = 0

        def p_var(e, i):
            return self.offsets[e] + i

        def q_var(e, i):
            return self.offsets[e] + self.n_cells[e] + 1 + i

        for e, pipe in enumerate(net.pipelines):
            c = self.consts[e]
            for i in range(self.n_cells[e]):
                # continuity
                rows += [r, r, r, r]
                cols += [p_var(e, i), p_var(e, i + 1), q_var(e, i), q_var(e, i + 1)]
                data += [0.5, 0.5, -c.C1, c.C1]
                rhs_cont.append((r, e, i))
                r += 1
                # momentum: q coefficients depend on the old state
                rows += [r, r]
                cols += [p_var(e, i), p_var(e, i + 1)]
                data += [-c.C2, c.C2]
                for node in (i, i + 1):
                    rows.append(r)
                    cols.append(q_var(e, node))
                    data.append(0.0)
                    dyn_entries.append((len(data) - 1, e, i))
                rhs_mom.append((r, e, i))
                r += 1

        self.supply_rows = []  # (row, node)
        self.demand_rows = []  # (row, node)
        self.junction_eq_rows = []  # rows with zero RHS
        self.junction_mass_rows = []  # (row, node)
        pipe_idx = {p.id: e for e, p in enumerate(net.pipelines)}

        def end_vars(pipe, side):
            e = pipe_idx[pipe.id]
            i = 0 if side == "inlet" else self.n_cells[e]
            return p_var(e, i), q_var(e, i)

        for node in net.nodes:
            att = net.attachments(node.id)
            if node.kind == "supply":
                for pipe, side in att:
                    pv, _ = end_vars(pipe, side)
                    rows.append(r); cols.append(pv); data.append(1.0)
                    self.supply_rows.append((r, node))
                    r += 1
            elif node.kind == "demand":
                for pipe, side in att:
                    _, qv = end_vars(pipe, side)
                    rows.append(r); cols.append(qv); data.append(1.0)
                    self.demand_rows.append((r, node))
                    r += 1
            else:
                ends = [(p, s) for p, s in att if s == "inlet"] + [
                    (p, s) for p, s in att if s == "outlet"
                ]
                pv0, _ = end_vars(*ends[0])
                for pipe, side in ends[1:]:
                    pv, _ = end_vars(pipe, side)
                    rows += [r, r]; cols += [pv0, pv]; data += [1.0, -1.0]
                    self.junction_eq_rows.append(r)
                    r += 1
                for pipe, side in ends:
                    _, qv = end_vars(pipe, side)
                    rows.append(r); cols.append(qv)
                    data.append(1.0 if side == "outlet" else -1.0)
                self.junction_mass_rows.append((r, node))
                r += 1

        if r != self.n_unk:
            raise ScenarioError(f"FDM rows {r} != unknowns {self.n_unk}")

        self._rows = np.asarray(rows, dtype=np.intp)
        self._cols = np.asarray(cols, dtype=np.intp)
        self._data = np.asarray(data, dtype=float)
        self._dyn_idx = np.asarray([d[0] for d in dyn_entries], dtype=np.intp)
        self._dyn_pipe = np.asarray([d[1] for d in dyn_entries], dtype=np.intp)
        self._dyn_cell = np.asarray([d[2] for d in dyn_entries], dtype=np.intp)
        self._rhs_cont = rhs_cont
        self._rhs_mom = rhs_mom
        self._p_var = p_var
        self._q_var = q_var
        # Canonical CSC pattern with a permutation from COO entry order, so the
        # per-step rebuild is a pure data copy (entries are all distinct).
        marker = sp.csc_matrix(
            (np.arange(len(data), dtype=float), (self._rows, self._cols)),
            shape=(self.n_unk, self.n_unk),
        )
        self._perm = marker.data.astype(np.intp)
        self._indices = marker.indices
        self._indptr = marker.indptr

    def initial_state(self, steady: SteadyState) -> FdmState:
        const = self.net.constants
        p_arrays, q_arrays = [], []
        for e, pipe in enumerate(self.net.pipelines):
            n = self.n_cells[e]
            x = np.linspace(0.0, pipe.L, n + 1)
            p_in = steady.node_pressures[pipe.from_node]
            q0 = steady.flows[pipe.id]
            slope = -pipe.lam * const.v ** 2 * q0 ** 2 / (pipe.d * pipe.S ** 2)
            p_arrays.append(np.sqrt(p_in ** 2 + slope * x) / const.p_b)
            q_arrays.append(np.full(n + 1, q0 / const.q_b))
        return FdmState(p=p_arrays, q=q_arrays)

    def step(self, state: FdmState, t: float) -> FdmState:
        """Advance one dT; boundary signals are evaluated at t + dT."""
        const = self.net.constants
        b = np.zeros(self.n_unk)
        data = self._data

        for e in range(len(self.net.pipelines)):
            p, q = state.p[e], state.q[e]
            if np.any(p[:-1] + p[1:] <= 0):
                raise FdmError("degenerate state: nonpositive pressure sum")

        # Friction coefficients per cell, then scatter into matrix slots.
        K_all = []
        for e in range(len(self.net.pipelines)):
            p, q = state.p[e], state.q[e]
            K_all.append((q[:-1] + q[1:]) / (p[:-1] + p[1:]))
        c3 = np.asarray([c.C3 for c in self.consts])
        # dyn entries are ordered (pipe, cell, node-pair): two per cell.
        vals = np.concatenate([np.repeat(K_all[e], 2) for e in range(len(K_all))])
        data[self._dyn_idx] = 0.5 + c3[self._dyn_pipe] * vals

        for r, e, i in self._rhs_cont:
            p = state.p[e]
            b[r] = 0.5 * (p[i] + p[i + 1])
        for r, e, i in self._rhs_mom:
            q = state.q[e]
            qs = q[i] + q[i + 1]
            b[r] = 0.5 * qs + self.consts[e].C3 * K_all[e][i] * 0.5 * qs
        for r, node in self.supply_rows:
            b[r] = node.signal(t + self.dT) / const.p_b
        for r, node in self.demand_rows:
            b[r] = node.signal(t + self.dT) / const.q_b
        for r, node in self.junction_mass_rows:
            b[r] = node.signal(t + self.dT) / const.q_b

        A = sp.csc_matrix(
            (data[self._perm], self._indices, self._indptr),
            shape=(self.n_unk, self.n_unk),
        )
        try:
            lu = spla.splu(A)
        except RuntimeError as exc:
            raise FdmError(f"singular FDM system: {exc}") from None
        self.factorizations += 1
        y = lu.solve(b)
        if not np.all(np.isfinite(y)):
            raise FdmError(f"step {state.step_index}: non-finite FDM solution")

        p_new, q_new = [], []
        for e in range(len(self.net.pipelines)):
            n = self.n_cells[e]
            off = self.offsets[e]
            p_new.append(y[off:off + n + 1].copy())
            q_new.append(y[off + n + 1:off + 2 * (n + 1)].copy())
        return FdmState(p=p_new, q=q_new, step_index=state.step_index + 1)

    def borders_si(self, state: FdmState, pipe_idx: int):
        """SI (p, q) arrays over one pipeline's nodal grid."""
        const = self.net.constants
        return state.p[pipe_idx] * const.p_b, state.q[pipe_idx] * const.q_b
