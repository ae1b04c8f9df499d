"""Interval bookkeeping: Neumann-Dirichlet intervals, gaps, counting.

The k-th interval ``I_k(eps) = [neumann_k(eps), dirichlet_k(eps)]`` of the
scaled cell contains the k-th eigenvalue of every equivariant problem, so
the union of the intervals contains every periodic spectrum built from the
cell.  As eps shrinks the intervals collapse onto the decoupled limit
spectrum and gaps open between their merged components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cell import (
    CellGraph,
    MetricFamily,
    Neumann,
    apply_metric,
    assemble,
    dirichlet_dimension,
    dn_eigenvalues,
    limit_cell,
)
from .errors import ArgumentError
from .linalg import eig_lowest

#: Containment tolerance: interval endpoints are inflated by this amount
#: before membership tests, so floating-point boundary cases count as hits.
TOL_CONTAIN = 1e-7
#: Eigenvalues closer than this count as one spectral point when counting
#: components without multiplicity.
TOL_MULT = 1e-7

DEFAULT_EPS_GRID = tuple(2.0 ** (-i) for i in range(1, 13))


@dataclass(frozen=True)
class IntervalSet:
    """Intervals I_k = [lower_k, upper_k], ascending in k."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if lo.shape != hi.shape or lo.ndim != 1 or lo.size == 0:
            raise ArgumentError("interval arrays must be equal-length and nonempty")
        if np.any(hi < lo - 1e-12):
            raise ArgumentError("interval upper endpoints below lower endpoints")
        if np.any(np.diff(lo) < -1e-12):
            raise ArgumentError("interval lower endpoints must be nondecreasing")

    def __len__(self):
        return int(self.lower.size)

    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def containing_interval(self, x: float, tol: float = TOL_CONTAIN):
        """Index of the first interval containing x (inflated by tol), or None."""
        for k in range(len(self)):
            if self.lower[k] - tol <= x <= self.upper[k] + tol:
                return k
        return None


def dn_intervals(cell: CellGraph, fam: MetricFamily, eps: float, K: int,
                 **solver) -> IntervalSet:
    """Neumann-Dirichlet intervals of the eps-scaled cell, k = 1..K."""
    if K < 1:
        raise ArgumentError("interval count K must be >= 1")
    scaled = apply_metric(cell, fam, eps)
    neumann, dirichlet = dn_eigenvalues(scaled, K, **solver)
    return IntervalSet(neumann.values, dirichlet.values)


def merge_components(intervals: IntervalSet, tol: float = 0.0):
    """Merged closed components of the interval union, plus the gaps.

    Gaps are the maximal open intervals between consecutive components,
    below the top of the last interval.
    """
    order = np.argsort(intervals.lower, kind="stable")
    components = []
    for idx in order:
        lo, hi = float(intervals.lower[idx]), float(intervals.upper[idx])
        if components and lo <= components[-1][1] + tol:
            components[-1][1] = max(components[-1][1], hi)
        else:
            components.append([lo, hi])
    comps = [(lo, hi) for lo, hi in components]
    gaps = [
        (components[i][1], components[i + 1][0]) for i in range(len(components) - 1)
    ]
    return comps, gaps


def count_components(obj, lam: float, tol: float = TOL_CONTAIN) -> int:
    """Number of components of the set intersecting [0, lam].

    ``obj`` may be an IntervalSet, a list of (lo, hi) components, or an
    array of spectral points (counted without multiplicity).
    """
    if lam < 0:
        raise ArgumentError("lambda must be >= 0")
    if isinstance(obj, IntervalSet):
        comps, _ = merge_components(obj)
    elif isinstance(obj, (list, tuple)) and obj and isinstance(obj[0], tuple):
        comps = list(obj)
    else:
        vals = np.sort(np.asarray(obj, dtype=float))
        comps = []
        for v in vals:
            if comps and v <= comps[-1][1] + TOL_MULT:
                comps[-1] = (comps[-1][0], float(v))
            else:
                comps.append((float(v), float(v)))
    return sum(1 for lo, hi in comps if lo <= lam + tol and hi >= -tol)


def limit_spectrum(cell: CellGraph, fam: MetricFamily, K: int, **solver) -> np.ndarray:
    """Neumann spectrum of the decoupled limit cell, lowest K values."""
    lim = limit_cell(cell, fam)
    k = min(K, lim.n_vertices)
    return eig_lowest(*assemble(lim, Neumann()), k, **solver).values


def distinct_values(values, tol: float = TOL_MULT) -> np.ndarray:
    """Collapse near-coincident values (multiplicity removed)."""
    vals = np.sort(np.asarray(values, dtype=float))
    out = []
    for v in vals:
        if not out or v > out[-1] + tol:
            out.append(float(v))
    return np.array(out)


@dataclass(frozen=True)
class GapReport:
    """Per-epsilon sweep record."""

    eps: float
    intervals: IntervalSet
    components: tuple
    gaps: tuple
    hit_flags: tuple = ()
    n_samples: tuple = ()

    def __post_init__(self):
        if len(self.components) != len(self.gaps) + 1:
            raise ArgumentError("component count must equal gap count + 1")

    @property
    def component_count(self):
        return len(self.components)


def gap_report(cell: CellGraph, fam: MetricFamily, eps: float, K: int,
               lam_grid=(), **solver) -> GapReport:
    intervals = dn_intervals(cell, fam, eps, K, **solver)
    comps, gaps = merge_components(intervals)
    samples = tuple(
        (float(lam), count_components(comps, float(lam))) for lam in lam_grid
    )
    return GapReport(eps, intervals, tuple(comps), tuple(gaps), (), samples)


def sweep(cell: CellGraph, fam: MetricFamily, K: int,
          eps_grid=DEFAULT_EPS_GRID, lam_grid=(), **solver) -> list:
    """Gap-emergence sweep over the epsilon grid (descending)."""
    if not eps_grid:
        raise ArgumentError("epsilon grid must not be empty")
    grid = sorted(set(float(e) for e in eps_grid), reverse=True)
    return [gap_report(cell, fam, eps, K, lam_grid, **solver) for eps in grid]


@dataclass(frozen=True)
class EpsSearch:
    """Result of searching the sweep for n gaps."""

    eps: float | None
    gaps_found: int
    distinct_limit_values: int
    requested: int

    @property
    def found(self):
        return self.eps is not None


def find_eps_for_gaps(cell: CellGraph, fam: MetricFamily, n: int, K: int,
                      eps_grid=DEFAULT_EPS_GRID, **solver) -> EpsSearch:
    """Largest grid epsilon whose merged intervals show at least n gaps.

    Returns a miss with the distinct-limit-eigenvalue diagnostic when the
    decoupled limit cannot support n gaps among the first K eigenvalues
    (coincident limit eigenvalues never separate).
    """
    if n < 0:
        raise ArgumentError("gap count must be >= 0")
    limit = distinct_values(limit_spectrum(cell, fam, K, **solver))
    n_distinct = int(limit.size)
    if n > n_distinct - 1:
        return EpsSearch(None, 0, n_distinct, n)
    best = None
    best_gaps = 0
    for eps in sorted(set(float(e) for e in eps_grid), reverse=True):
        report = gap_report(cell, fam, eps, K, **solver)
        found = len(report.gaps)
        if found >= n:
            best = eps
            best_gaps = found
            break
    return EpsSearch(best, best_gaps, n_distinct, n)


@dataclass(frozen=True)
class WeylRow:
    lam: float
    n_limit: int
    eps: float | None
    n_achieved: int
    ok: bool
    sufficient_depth: bool


def weyl_compare(cell: CellGraph, fam: MetricFamily, lam_grid, K: int,
                 eps_grid=DEFAULT_EPS_GRID, **solver) -> list:
    """Counting-level Weyl comparison against the decoupled limit.

    For each lambda: ``n_limit`` counts distinct limit eigenvalues at or
    below lambda; the sweep then looks for the largest epsilon whose merged
    intervals give at least that many components in [0, lambda].  Rows with
    lambda beyond the computed limit depth are flagged as truncated.
    """
    limit = distinct_values(limit_spectrum(cell, fam, K, **solver))
    grid = sorted(set(float(e) for e in eps_grid), reverse=True)
    reports = [(eps, gap_report(cell, fam, eps, K, **solver)) for eps in grid]
    rows = []
    for lam in lam_grid:
        lam = float(lam)
        if lam < 0:
            raise ArgumentError("lambda grid must be nonnegative")
        n_limit = int(np.sum(limit <= lam + TOL_MULT))
        sufficient = bool(limit.size and lam <= limit[-1] + TOL_MULT)
        eps_found = None
        n_achieved = 0
        for eps, report in reports:
            n = count_components(list(report.components), lam)
            if n >= n_limit:
                eps_found = eps
                n_achieved = n
                break
        rows.append(WeylRow(lam, n_limit, eps_found, n_achieved,
                            ok=eps_found is not None, sufficient_depth=sufficient))
    return rows
