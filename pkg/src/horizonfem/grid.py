"""Uniform 1D meshes over the domain plus its interaction collar.

The computational domain Omega = (a, b) is split into N equal cells; the
collar of width delta on each side (where the homogeneous volume constraint
u = 0 lives) is meshed with the same spacing.  The horizon must be an exact
multiple of the cell width, so that both the truncation radius and the
collar boundary fall on mesh nodes; this keeps every integration cell
uncut and the assembled operator exactly Toeplitz.

Degrees of freedom are the hat functions of the N-1 nodes strictly inside
Omega; the hats at a, b and in the collar are constrained to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Local coefficients of the piecewise-linear biorthogonal dual basis:
# on each cell, xi_local = 2*phi_local_same - 1*phi_local_other, which makes
# int_K xi_q phi_p = delta_pq int_K phi_p per cell.
DUAL_STENCIL = (2.0, -1.0)


@dataclass(frozen=True)
class FeSpace1D:
    a: float
    b: float
    n_cells: int          # cells inside Omega
    h: float
    delta: float          # snapped to an exact multiple of h
    k_delta: int          # delta / h
    nodes: np.ndarray = field(repr=False)     # all nodes on [a-delta, b+delta]
    free_nodes: np.ndarray = field(repr=False)  # indices into `nodes`

    @property
    def n_free(self) -> int:
        return self.n_cells - 1

    @property
    def total_cells(self) -> int:
        return self.n_cells + 2 * self.k_delta

    @property
    def free_coords(self) -> np.ndarray:
        return self.nodes[self.free_nodes]

    def full_vector(self, v_free: np.ndarray) -> np.ndarray:
        """Embed free-node values into the all-node vector (zeros elsewhere)."""
        full = np.zeros(len(self.nodes))
        full[self.free_nodes] = v_free
        return full


def build_space(a: float, b: float, n_cells: int, delta: float) -> FeSpace1D:
    """Mesh (a,b) with n_cells cells and the delta-collar on both sides."""
    if n_cells < 2:
        raise ValueError("need at least 2 cells")
    if not b > a:
        raise ValueError("domain endpoints must satisfy a < b")
    if not delta > 0.0 or not np.isfinite(delta):
        raise ValueError("horizon delta must be positive and finite")
    h = (b - a) / n_cells
    ratio = delta / h
    k = int(round(ratio))
    if k < 1 or abs(ratio - k) > 1e-12 * max(1.0, ratio):
        lo, hi = max(1, int(np.floor(ratio))), int(np.ceil(ratio))
        raise ValueError(
            "delta=%g is not a multiple of h=%g; nearest admissible values are %g and %g"
            % (delta, h, lo * h, max(lo + 1, hi) * h))
    # index formula (not accumulation) keeps node coordinates exact
    idx = np.arange(-k, n_cells + k + 1)
    nodes = a + idx * ((b - a) / n_cells)
    free = np.arange(k + 1, k + n_cells)
    return FeSpace1D(a=a, b=b, n_cells=n_cells, h=h, delta=k * h, k_delta=k,
                     nodes=nodes, free_nodes=free)


def interpolate_nodal(space: FeSpace1D, fn) -> np.ndarray:
    """Values of fn at the free nodes (the nodal interpolant's coefficients)."""
    vals = np.asarray(fn(space.free_coords), dtype=float)
    if vals.shape != space.free_coords.shape:
        vals = np.broadcast_to(vals, space.free_coords.shape).astype(float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("interpolated function returned non-finite values")
    return vals


def refinement_factor(coarse: FeSpace1D, fine: FeSpace1D) -> int:
    """Integral refinement factor between two nested spaces, or raise."""
    same_box = (coarse.a == fine.a and coarse.b == fine.b
                and abs(coarse.delta - fine.delta) <= 1e-12 * max(1.0, coarse.delta))
    if not same_box or fine.n_cells % coarse.n_cells != 0:
        raise ValueError("spaces are not nested (same domain/horizon, integral factor)")
    return fine.n_cells // coarse.n_cells


def prolong(coarse: FeSpace1D, fine: FeSpace1D, v_coarse: np.ndarray) -> np.ndarray:
    """Fine-mesh nodal values of the coarse piecewise-linear function.

    Exact for nested meshes: index arithmetic is integral, so shared nodes
    are reproduced bit-for-bit and new nodes get convex combinations with
    dyadically exact weights whenever the factor is a power of two.
    """
    m = refinement_factor(coarse, fine)
    v_coarse = np.asarray(v_coarse, dtype=float)
    if v_coarse.shape != (coarse.n_free,):
        raise ValueError("coarse vector has length %d, expected %d" % (len(v_coarse), coarse.n_free))
    # coarse values over Omega nodes 0..N_c, constrained ends at zero
    u = np.zeros(coarse.n_cells + 1)
    u[1:-1] = v_coarse
    i_f = np.arange(1, fine.n_cells)          # fine Omega-interior node numbers
    j, r = np.divmod(i_f, m)
    theta = r / m
    v_fine = (1.0 - theta) * u[j] + theta * u[np.minimum(j + 1, coarse.n_cells)]
    return v_fine
