"""Normalized constants, collocation layout, and unknown indexing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..network import GasConstants, GasNetwork, PipelineSpec, ScenarioError
from ..kernels import monomials

__all__ = [
    "NormalizedPipeConstants",
    "CollocationLayout",
    "UnknownIndexMap",
    "compute_constants",
    "layout_collocation",
    "count_and_index",
]


@dataclass(frozen=True)
class NormalizedPipeConstants:
    """Dimensionless per-pipeline constants of the normalized cell model."""

    C1: float
    C2: float
    C3: float


def compute_constants(
    pipe: PipelineSpec, const: GasConstants, dT: float
) -> NormalizedPipeConstants:
    v2 = const.v ** 2
    return NormalizedPipeConstants(
        C1=v2 * const.q_b * dT / (pipe.S * const.p_b * pipe.dL),
        C2=pipe.S * const.p_b * dT / (const.q_b * pipe.dL),
        C3=pipe.lam * v2 * const.q_b * dT / (2 * pipe.d * pipe.S * const.p_b),
    )


@dataclass(frozen=True)
class CollocationLayout:
    """Uniform collocation abscissae.

    ``dx``: initial-value points k/Mx (k = 1..Mx) on the cell bottom border.
    ``dt``: border time points k/K (k = 1..K, K = M - Mx) shared by boundary,
    junction and seam constraints.  Both include the far border (value 1).
    """

    dx: tuple[float, ...]
    dt: tuple[float, ...]


def layout_collocation(M: int, Mx: int) -> CollocationLayout:
    if not 0 < M - Mx < M:
        raise ScenarioError(f"balance condition 0 < M - Mx < M violated "
                            f"(M={M}, Mx={Mx})", "sim.Mx")
    K = M - Mx
    return CollocationLayout(
        dx=tuple(k / Mx for k in range(1, Mx + 1)),
        dt=tuple(k / K for k in range(1, K + 1)),
    )


@dataclass
class UnknownIndexMap:
    """Bijection (cell, field, n, j) <-> global column index.

    Columns are cell-major in pipeline order; within a cell all p monomials
    come first, then all q monomials, both in ``monomials(M)`` order.
    """

    M: int
    cells_per_pipe: tuple[int, ...]

    def __post_init__(self):
        self.monos = monomials(self.M)
        self.mono_pos = {nj: k for k, nj in enumerate(self.monos)}
        self.half = len(self.monos)
        self.ncell_unk = 2 * self.half  # = M(M+3)
        self.cell_offset = []
        base = 0
        for n in self.cells_per_pipe:
            self.cell_offset.append(base)
            base += n
        self.ncells = base
        self.n_unk = self.ncells * self.ncell_unk

    def cell_index(self, pipe_idx: int, cell: int) -> int:
        return self.cell_offset[pipe_idx] + cell

    def col(self, cell_global: int, field: str, n: int, j: int) -> int:
        k = self.mono_pos[(n, j)]
        return cell_global * self.ncell_unk + (0 if field == "p" else self.half) + k

    def cell_slice(self, cell_global: int) -> slice:
        return slice(cell_global * self.ncell_unk, (cell_global + 1) * self.ncell_unk)


def count_and_index(net: GasNetwork, M: int) -> UnknownIndexMap:
    return UnknownIndexMap(M=M, cells_per_pipe=tuple(p.n_cells for p in net.pipelines))
