"""Layer-recursive solver and per-step orchestration for the collocation method.

Scheme "sas1" keeps the full nonlinear momentum coupling: at each step the
level-0 system is factored, and the level-1 matrix (momentum rows weighted by
the level-0 solution) is factored once and reused for every higher level.
Scheme "sas2" linearizes the friction term per cell, so a single constant
matrix serves every level of every step and is factored once per simulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .. import kernels
from ..network import GasNetwork, ScenarioConfig
from ..steady import CellProfiles, StepState
from .assembly import SasStructure

__all__ = [
    "SolverError",
    "DivergenceError",
    "ReverseFlowError",
    "SasContext",
    "StepSolution",
    "compute_C4",
    "eval_bivariate",
]

DIVERGENCE_LIMIT = 1e3  # normalized |p| or |q| beyond this counts as divergence


class SolverError(RuntimeError):
    pass


class DivergenceError(SolverError):
    def __init__(self, message, step=None):
        self.step = step
        super().__init__(message if step is None else f"step {step}: {message}")


class ReverseFlowError(SolverError):
    pass


def eval_bivariate(coef: np.ndarray, dx, dt):
    """Nested (Horner) evaluation of sum c[n, j] dx^n dt^j."""
    return np.polynomial.polynomial.polyval2d(dx, dt, coef)


def compute_C4(profiles: CellProfiles, p_b: float, q_b: float) -> float:
    """Segment-linearized friction ratio from a cell's endpoint initial values."""
    p_sum = (float(profiles.p(0.0)) + float(profiles.p(1.0))) / p_b
    if p_sum <= 0:
        raise SolverError("nonpositive pressure sum in friction linearization")
    q_sum = (float(profiles.q(0.0)) + float(profiles.q(1.0))) / q_b
    return q_sum / p_sum


@dataclass
class StepSolution:
    """Solved polynomial coefficients of one time step.

    ``p_layers``/``q_layers`` have shape (layers_used, ncells, M+1, M+1) and
    include the fixed (0, 0) entries.
    """

    p_layers: np.ndarray
    q_layers: np.ndarray
    layers_used: int

    def coeff_sum(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-cell bivariate coefficients at s = 1 (layers summed)."""
        return self.p_layers.sum(axis=0), self.q_layers.sum(axis=0)

    def eval(self, cell: int, dx, dt):
        """Normalized (p, q) of one cell at s = 1."""
        p_c, q_c = self.p_layers[:, cell].sum(axis=0), self.q_layers[:, cell].sum(axis=0)
        return eval_bivariate(p_c, dx, dt), eval_bivariate(q_c, dx, dt)


class SasContext:
    """One simulation run's assembly/solve state (single-owner)."""

    def __init__(self, net: GasNetwork, cfg: ScenarioConfig):
        if cfg.method not in ("sas1", "sas2"):
            raise ValueError(f"not a SAS method: {cfg.method}")
        self.net = net
        self.cfg = cfg
        self.struct = SasStructure(net, cfg.M, cfg.Mx, cfg.dT)
        self.scheme = cfg.method
        self.R = cfg.R_order
        self.eps_b = cfg.eps_b
        self.factorizations = 0
        self.layer_counts: list[int] = []
        self._lu_cached = None  # sas2: one factorization per simulation

    # -- factorization helpers --------------------------------------------

    def _factor(self, A: np.ndarray):
        try:
            lu = lu_factor(A)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise SolverError(f"singular system: {exc}") from None
        self.factorizations += 1
        return lu

    def condition_estimate(self) -> float:
        """1-norm condition estimate of the base matrix (diagnostics only)."""
        return float(np.linalg.cond(self.struct.A0, 1))

    # -- per-step state evaluation ----------------------------------------

    def _profile_values(self, state: StepState):
        st = self.struct
        const = self.net.constants
        Mx = st.Mx
        nc = st.index.ncells
        p000 = np.zeros(nc)
        q000 = np.zeros(nc)
        p_pts = np.zeros((nc, Mx))
        q_pts = np.zeros((nc, Mx))
        p_end = np.zeros(nc)
        q_end = np.zeros(nc)
        dxs = np.asarray(st.layout.dx)
        for g in st.pipes:
            for local in range(g.n_cells):
                cell = st.index.cell_index(g.idx, local)
                prof = state.cells[g.idx][local]
                p000[cell] = float(prof.p(0.0)) / const.p_b
                q000[cell] = float(prof.q(0.0)) / const.q_b
                p_pts[cell] = np.asarray(prof.p(dxs), dtype=float) / const.p_b
                q_pts[cell] = np.asarray(prof.q(dxs), dtype=float) / const.q_b
                p_end[cell] = float(prof.p(1.0)) / const.p_b
                q_end[cell] = float(prof.q(1.0)) / const.q_b
        return p000, q000, p_pts, q_pts, p_end, q_end

    def _build_b0(self, t: float, p000, q000, p_pts, q_pts) -> np.ndarray:
        st = self.struct
        const = self.net.constants
        dT = st.dT
        b = np.zeros(st.index.n_unk)
        b[st.init_rows_p] = p_pts - p000[:, None]
        b[st.init_rows_q] = q_pts - q000[:, None]
        for rows_p, rows_q, cl, cr in st.seam_rows:
            b[rows_p] = p000[cr] - p000[cl]
            b[rows_q] = q000[cr] - q000[cl]
        for node, cell, rows in st.supply_rows:
            for k, dtk in enumerate(st.layout.dt):
                b[rows[k]] = node.signal(t + dtk * dT) / const.p_b - p000[cell]
        for node, cell, rows in st.demand_rows:
            for k, dtk in enumerate(st.layout.dt):
                b[rows[k]] = node.signal(t + dtk * dT) / const.q_b - q000[cell]
        for rows, ca, cb in st.junction_eq_rows:
            b[rows] = p000[cb] - p000[ca]
        for node, rows, out_cells, in_cells in st.junction_mass_rows:
            fixed = sum(q000[c] for c in out_cells) - sum(q000[c] for c in in_cells)
            for k, dtk in enumerate(st.layout.dt):
                b[rows[k]] = node.signal(t + dtk * dT) / const.q_b - fixed
        return b

    # -- the step ----------------------------------------------------------

    def step(self, state: StepState, t: float, step_index: int = 0) -> StepSolution:
        st = self.struct
        idx = st.index
        M = st.M
        W = M + 1
        nc = idx.ncells
        half = idx.half
        n_m, j_m = _mono_index_arrays(M)

        p000, q000, p_pts, q_pts, p_end, q_end = self._profile_values(state)

        p_layers = np.zeros((self.R + 1, nc, W, W))
        q_layers = np.zeros((self.R + 1, nc, W, W))
        p_layers[0, :, 0, 0] = p000
        q_layers[0, :, 0, 0] = q000

        if self.scheme == "sas2":
            if self._lu_cached is None:
                self._lu_cached = self._factor(st.A0)
            lu0 = lu_rec = self._lu_cached
            p_sum = p000 + p_end
            if np.any(p_sum <= 0):
                raise SolverError("nonpositive pressure sum in friction linearization")
            c4 = (q000 + q_end) / p_sum
        else:
            lu0 = self._factor(st.A0)
            lu_rec = None
            c4 = None

        b0 = self._build_b0(t, p000, q000, p_pts, q_pts)
        y = lu_solve(lu0, b0).reshape(nc, idx.ncell_unk)
        p_layers[0][:, n_m, j_m] = y[:, :half]
        q_layers[0][:, n_m, j_m] = y[:, half:]

        layers_used = 1
        for r in range(1, self.R + 1):
            b = np.zeros(idx.n_unk)
            if self.scheme == "sas2":
                coef = -st.cell_C3 * c4
                b[st.mom_rows] = coef[:, None] * q_layers[r - 1][:, st.mom_n, st.mom_j]
            else:
                for cell in range(nc):
                    b[st.mom_rows[cell]] = kernels.sas1_momentum_rhs(
                        p_layers[:r, cell],
                        q_layers[:r, cell],
                        r,
                        st.cell_C2[cell],
                        st.cell_C3[cell],
                        M,
                    )
            if np.max(np.abs(b)) < self.eps_b:
                break
            if self.scheme == "sas1" and lu_rec is None:
                A1 = st.A0.copy()
                for cell in range(nc):
                    block = kernels.sas1_momentum_block(
                        p_layers[0, cell], q_layers[0, cell], st.cell_C2[cell], M
                    )
                    A1[np.ix_(st.mom_rows[cell], np.arange(*idx.cell_slice(cell).indices(idx.n_unk)))] = block
                lu_rec = self._factor(A1)
            y = lu_solve(lu_rec, b).reshape(nc, idx.ncell_unk)
            p_layers[r][:, n_m, j_m] = y[:, :half]
            q_layers[r][:, n_m, j_m] = y[:, half:]
            layers_used = r + 1

        sol = StepSolution(
            p_layers=p_layers[:layers_used],
            q_layers=q_layers[:layers_used],
            layers_used=layers_used,
        )
        self.layer_counts.append(layers_used)

        p_tot, q_tot = sol.coeff_sum()
        if not (np.all(np.isfinite(p_tot)) and np.all(np.isfinite(q_tot))):
            raise DivergenceError("non-finite solution coefficients", step=step_index)
        if np.max(np.abs(p_tot)) > DIVERGENCE_LIMIT:
            raise DivergenceError("normalized pressure out of range", step=step_index)
        return sol

    def advance(self, sol: StepSolution, step_index: int = 0):
        """Evaluate the step at dt = 1: border samples plus next initial state.

        Returns (next_state, borders) where borders[pipe_idx] is a pair of SI
        arrays (p, q) over that pipeline's N+1 cell borders.
        """
        st = self.struct
        const = self.net.constants
        # dt = 1, s = 1: univariate coefficients in dx.
        coef_p = sol.p_layers.sum(axis=(0, 3))  # (ncells, M+1)
        coef_q = sol.q_layers.sum(axis=(0, 3))
        pipes_profiles = []
        borders = []
        for g in st.pipes:
            c0 = st.index.cell_index(g.idx, 0)
            cp = coef_p[c0:c0 + g.n_cells]
            cq = coef_q[c0:c0 + g.n_cells]
            pb = np.empty(g.n_cells + 1)
            qb = np.empty(g.n_cells + 1)
            pb[:-1] = cp[:, 0]
            qb[:-1] = cq[:, 0]
            pb[-1] = cp[-1].sum()
            qb[-1] = cq[-1].sum()
            # The full recursion replaces q|q| by q^2 and is only valid for
            # forward flow; the linearized scheme's friction term carries the
            # sign through C4 and tolerates transient reversals.
            if self.scheme == "sas1" and np.min(qb) < -1e-9:
                raise ReverseFlowError(
                    f"step {step_index}: reverse flow on pipeline {g.pipe.id} "
                    f"(min normalized q = {np.min(qb):.3e})"
                )
            borders.append((pb * const.p_b, qb * const.q_b))
            cells = tuple(
                CellProfiles(
                    p=_poly_si(cp[i], const.p_b), q=_poly_si(cq[i], const.q_b)
                )
                for i in range(g.n_cells)
            )
            pipes_profiles.append(cells)
        return StepState(cells=tuple(pipes_profiles)), borders


def _poly_si(coef: np.ndarray, base: float):
    c = coef * base
    return lambda dx, _c=c: np.polynomial.polynomial.polyval(dx, _c)


_mono_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _mono_index_arrays(M: int):
    if M not in _mono_cache:
        monos = kernels.monomials(M)
        _mono_cache[M] = (
            np.asarray([n for n, _ in monos], dtype=np.intp),
            np.asarray([j for _, j in monos], dtype=np.intp),
        )
    return _mono_cache[M]
