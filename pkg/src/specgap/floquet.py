"""Abelian Floquet-Bloch bands from the character torus of the cell.

For a free abelian deck group of rank r the periodic spectrum is the union
over the torus of the Bloch fiber spectra; each band function theta ->
lambda_k(theta) stays inside the k-th Neumann-Dirichlet interval.  Complex
phases are realized as real 2x2 rotation blocks, which doubles every fiber
eigenvalue; the doubled values are collapsed before reporting.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .analysis import TOL_CONTAIN, IntervalSet, merge_components
from .cell import Bloch, CellGraph, assemble
from .errors import ArgumentError
from .linalg import eig_lowest


def default_grid(rank: int, points: int = 32) -> np.ndarray:
    """Uniform product grid theta_j in {2 pi j / points}; includes 0.

    With 32 points the grid values at theta = 2 pi j / m for m | 32
    reproduce the Z/m cover spectra exactly, a built-in consistency oracle.
    """
    if points < 1:
        raise ArgumentError("grid needs at least one point per dimension")
    axis = 2 * math.pi * np.arange(points) / points
    return np.array(list(itertools.product(axis, repeat=rank)))


def bloch_eigenvalues(cell: CellGraph, theta, k: int, **solver) -> np.ndarray:
    """Lowest k Bloch fiber eigenvalues at one torus point.

    The realified fiber carries every eigenvalue twice; adjacent sorted
    pairs are collapsed to single values.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    stiff, mass = assemble(cell, Bloch(tuple(theta)))
    kk = min(k, cell.n_vertices)
    doubled = eig_lowest(stiff, mass, 2 * kk, **solver).values
    return doubled[::2][:kk]


@dataclass(frozen=True)
class BandData:
    """Sampled band functions and the enclosing band intervals."""

    thetas: np.ndarray  # (G, r)
    values: np.ndarray  # (G, k), nondecreasing along k for each theta
    bands: np.ndarray   # (k, 2): [min, max] over the sampled grid

    def band_count(self):
        return int(self.bands.shape[0])


def band_functions(cell: CellGraph, k: int, grid=None, points: int = 32,
                   presentation=None, **solver) -> BandData:
    """Sample the band functions of the cell over the character torus.

    ``presentation``, when given, must declare an abelian group matching
    the cell's generator count; non-abelian declarations are refused since
    Bloch fibers only decompose abelian covers.  Bands are reported as the
    sampled min/max enclosures (inner approximations of the true bands).
    """
    if k < 1:
        raise ArgumentError("band count must be >= 1")
    r = cell.n_generators
    if r < 1:
        raise ArgumentError("cell has no ports; no torus to sample")
    if presentation is not None:
        if not presentation.declared_abelian:
            raise ArgumentError("Bloch bands require an abelian group declaration")
        if presentation.generator_count != r:
            raise ArgumentError("presentation arity does not match the cell")
    if grid is None:
        grid = default_grid(r, points)
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    if grid.shape[1] != r:
        raise ArgumentError(f"grid vectors must have {r} components")
    if not any(np.allclose(row, 0.0) for row in grid):
        raise ArgumentError("grid must include theta = 0")
    kk = min(k, cell.n_vertices)
    values = np.array([bloch_eigenvalues(cell, row, kk, **solver) for row in grid])
    bands = np.column_stack([values.min(axis=0), values.max(axis=0)])
    return BandData(thetas=grid, values=values, bands=bands)


@dataclass(frozen=True)
class BandGapReport:
    """Merged bands and the open gaps between them.

    Bands are sampled inner approximations: a reported gap can close under
    grid refinement, never the other way around.
    """

    components: tuple
    gaps: tuple
    caveat: str = "bands are sampled inner approximations"


def band_gap_report(data: BandData) -> BandGapReport:
    intervals = IntervalSet(data.bands[:, 0], data.bands[:, 1])
    comps, gaps = merge_components(intervals)
    return BandGapReport(tuple(comps), tuple(gaps))


def bands_within_intervals(data: BandData, intervals: IntervalSet,
                           tol: float = TOL_CONTAIN) -> bool:
    """Check B_k inside I_k for every band with a computed interval."""
    kk = min(data.band_count(), len(intervals))
    for k in range(kk):
        if data.bands[k, 0] < intervals.lower[k] - tol:
            return False
        if data.bands[k, 1] > intervals.upper[k] + tol:
            return False
    return True
