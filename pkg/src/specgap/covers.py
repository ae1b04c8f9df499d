"""Finite covering graphs and their spectral decompositions.

A cover glues one copy of the cell per group element: the minus port of
copy ``g`` meets the plus port of copy ``g * gen_j``.  Its spectrum splits
by Peter-Weyl into equivariant spectra weighted by representation
dimension, embeds the quotient spectrum exactly (eigenfunctions lift), and
is bracketed interval-by-interval by the cell's Neumann and Dirichlet
eigenvalues.  Covers are assembled as explicit graphs so these
decompositions are cross-validations, not tautologies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis import TOL_CONTAIN, IntervalSet, dn_intervals, merge_components
from .cell import (
    CellGraph,
    Equivariant,
    MetricFamily,
    apply_metric,
    assemble,
    dirichlet_dimension,
)
from .errors import ArgumentError, UnsupportedGroupError
from .groups import (
    FiniteQuotient,
    Tower,
    UnitaryRep,
    irreps,
    peter_weyl_weight,
    trivial_quotient,
)
from .linalg import (
    MassMatrix,
    Spectrum,
    SymBuilder,
    eig_lowest,
    eig_pairs,
    residual_enclosure,
)


@dataclass(frozen=True)
class CoverGraph:
    """Explicit covering graph: |G| copies of the cell glued along ports."""

    cell: CellGraph
    quotient: FiniteQuotient
    measures: np.ndarray
    edges: tuple

    @property
    def n_vertices(self):
        return int(self.measures.size)

    def laplacian(self):
        b = SymBuilder(self.n_vertices)
        for (u, v, w) in self.edges:
            b.add(u, u, w)
            b.add(v, v, w)
            b.add(u, v, -w)
        return b.build(), MassMatrix(self.n_vertices, self.measures)


def build_cover(cell: CellGraph, q: FiniteQuotient) -> CoverGraph:
    """Assemble the covering graph of the cell over a finite quotient.

    Vertex ``(v, g)`` has index ``g * nv + v``; interior edges are copied
    per group element and each port pair adds the junction edge
    ``(minus, g) ~ (plus, g * gen_j)``.  With the trivial quotient this is
    the periodic quotient graph itself (ports joined by their couplings).
    """
    q.require_complete("cover assembly")
    if cell.n_generators != q.generator_count:
        raise ArgumentError(
            f"cell has {cell.n_generators} ports but quotient has "
            f"{q.generator_count} generators"
        )
    nv = cell.n_vertices
    succ = q.gen_successors()
    acc: dict = {}

    def add_edge(a, b, w):
        if a == b:
            return  # self-loops contribute nothing to the form
        key = (a, b) if a < b else (b, a)
        acc[key] = acc.get(key, 0.0) + w

    for g in range(q.size):
        base = g * nv
        for (u, v, w) in cell.edges:
            add_edge(base + u, base + v, w)
    for j, port in enumerate(cell.ports):
        for g in range(q.size):
            h = int(succ[j, g])
            for pm, pp, w in zip(port.minus, port.plus, port.conductance):
                add_edge(g * nv + pm, h * nv + pp, w)
    edges = tuple((u, v, w) for (u, v), w in sorted(acc.items()))
    return CoverGraph(
        cell=cell,
        quotient=q,
        measures=np.tile(cell.measures, q.size),
        edges=edges,
    )


def relabel_cover(cover: CoverGraph, g_index: int) -> CoverGraph:
    """Deck transformation: relabel copies by left multiplication."""
    q = cover.quotient
    h = q.elements[g_index]
    perm = np.empty(q.size, dtype=np.int64)
    for i, g in enumerate(q.elements):
        perm[i] = q.index[q.mult(h, g)]
    nv = cover.cell.n_vertices
    mapping = np.concatenate([perm[g] * nv + np.arange(nv) for g in range(q.size)])
    measures = np.empty_like(cover.measures)
    measures[mapping] = cover.measures
    edges = tuple(
        (min(mapping[u], mapping[v]), max(mapping[u], mapping[v]), w)
        for (u, v, w) in cover.edges
    )
    return CoverGraph(cover.cell, q, measures, tuple(sorted(edges)))


def cover_spectrum(cover: CoverGraph, k: int, **solver) -> Spectrum:
    """Lowest k eigenvalues of the covering graph."""
    return eig_lowest(*cover.laplacian(), k, **solver)


def quotient_spectrum(cell: CellGraph, k: int, **solver) -> Spectrum:
    """Spectrum of the periodic quotient (trivial cover)."""
    cover = build_cover(cell, trivial_quotient(cell.n_generators))
    return cover_spectrum(cover, k, **solver)


def equivariant_spectrum(cell: CellGraph, rep: UnitaryRep, k: int, **solver) -> Spectrum:
    """Lowest k eigenvalues of the rep-equivariant operator on the cell."""
    return eig_lowest(*assemble(cell, Equivariant(rep)), k, **solver)


# ---------------------------------------------------------------------------
# Peter-Weyl and embedding checks


@dataclass(frozen=True)
class PeterWeylReport:
    """Multiset comparison of a cover spectrum with its irrep decomposition."""

    matched: bool
    skipped: bool
    reason: str
    max_gap: float
    count: int
    cover_values: np.ndarray
    merged_values: np.ndarray
    per_rep: tuple  # (label, weight, values) per representation


def peter_weyl_check(cell: CellGraph, q: FiniteQuotient, k: int | None = None,
                     tol: float = TOL_CONTAIN, **solver) -> PeterWeylReport:
    """Compare the cover spectrum with the weighted union of irrep spectra.

    Each stored representation contributes its equivariant spectrum with
    multiplicity equal to its complex dimension (a conjugate pair stored
    doubled accounts for both members).  With ``k=None`` the full spectra
    are compared, which is an exact multiset equality.
    """
    try:
        reps = irreps(q)
    except UnsupportedGroupError as exc:
        empty = np.array([])
        return PeterWeylReport(False, True, str(exc), float("nan"), 0,
                               empty, empty, ())
    cover = build_cover(cell, q)
    full = cell.n_vertices * q.size
    kk = full if k is None else min(k, full)
    cover_vals = cover_spectrum(cover, kk, **solver).values

    merged = []
    per_rep = []
    for rep in reps:
        dim = rep.dim_real * cell.n_vertices
        want = dim if k is None else min(kk, dim)
        vals = equivariant_spectrum(cell, rep, want, **solver).values
        weight = peter_weyl_weight(rep)
        per_rep.append((rep.label, weight, vals))
        merged.extend(np.repeat(vals, weight))
    merged = np.sort(np.array(merged))[:kk]

    if merged.size != cover_vals.size:
        return PeterWeylReport(False, False, "size mismatch", float("inf"),
                               kk, cover_vals, merged, tuple(per_rep))
    max_gap = float(np.max(np.abs(merged - cover_vals))) if kk else 0.0
    return PeterWeylReport(max_gap <= tol, False, "", max_gap, kk,
                           cover_vals, merged, tuple(per_rep))


def quotient_embedding_check(cell: CellGraph, q: FiniteQuotient, k: int,
                             tol: float = TOL_CONTAIN, **solver) -> bool:
    """True iff the lowest-k quotient eigenvalues appear in the cover spectrum.

    Quotient eigenfunctions lift to the cover exactly, so this holds with
    equality up to solver accuracy.
    """
    qvals = quotient_spectrum(cell, k, **solver).values
    cover = build_cover(cell, q)
    cover_vals = cover_spectrum(cover, cover.n_vertices, **solver).values
    return all(np.min(np.abs(cover_vals - v)) <= tol for v in qvals)


# ---------------------------------------------------------------------------
# tower verification


@dataclass(frozen=True)
class LevelSpectrum:
    level: int
    group_order: int
    values: np.ndarray
    interval_index: tuple  # containing I_k index per value, or None
    inside: bool  # all values inside the merged interval union
    truncated: bool  # eigenvalues beyond the certified window were dropped


@dataclass(frozen=True)
class TowerReport:
    eps: float
    intervals: IntervalSet
    levels: tuple
    all_inside: bool
    hits: tuple  # interval indices hit at the deepest level


def tower_spectrum_union(cell: CellGraph, tower: Tower, k: int, eps: float,
                         fam: MetricFamily, K: int | None = None,
                         tol: float = TOL_CONTAIN, **solver) -> TowerReport:
    """Per-level cover spectra located inside the interval union.

    Every eigenvalue of every level must lie in the union of the first K
    Neumann-Dirichlet intervals (K defaults to k, capped at the Dirichlet
    dimension).  The m-th cover eigenvalue lies in I_j for some
    j <= ceil(m / |G|), so per level only the lowest K * |G| eigenvalues
    are certified by K intervals; anything beyond is dropped and the level
    marked truncated rather than failed.
    """
    scaled = apply_metric(cell, fam, eps)
    kk = K if K is not None else k
    kk = min(kk, dirichlet_dimension(scaled))
    intervals = dn_intervals(cell, fam, eps, kk, **solver)
    comps, _ = merge_components(intervals)
    levels = []
    for i, q in enumerate(tower.quotients):
        cover = build_cover(scaled, q)
        requested = min(k, cover.n_vertices)
        want = min(requested, kk * q.size)
        vals = cover_spectrum(cover, want, **solver).values
        idx = tuple(intervals.containing_interval(float(v), tol) for v in vals)
        inside = all(
            any(lo - tol <= v <= hi + tol for lo, hi in comps) for v in vals
        )
        levels.append(LevelSpectrum(i, q.size, vals, idx, inside,
                                    truncated=want < requested))
    deepest_hits = tuple(sorted({j for j in levels[-1].interval_index if j is not None}))
    return TowerReport(
        eps=eps,
        intervals=intervals,
        levels=tuple(levels),
        all_inside=all(lv.inside for lv in levels),
        hits=deepest_hits,
    )


# ---------------------------------------------------------------------------
# interval hit certification


DIRECT = "direct"
CERTIFIED = "certified"
UNCONFIRMED = "unconfirmed"


@dataclass(frozen=True)
class IntervalHit:
    interval: int  # 0-based index of I_k
    status: str
    value: float
    radius: float


def interval_hits(cell: CellGraph, tower: Tower, fam: MetricFamily, eps: float,
                  k_max: int = 5, tol: float = TOL_CONTAIN, **solver) -> list:
    """Certify that each I_k, k <= k_max, meets the deepest-level spectrum.

    A direct hit is a computed cover eigenvalue inside I_k.  Otherwise the
    k-th quotient eigenpair is lifted to the deepest cover and certified by
    its residual enclosure: the enclosure interval around the lifted
    eigenvalue must sit inside I_k.  Misses are reported as unconfirmed
    rather than fatal.
    """
    scaled = apply_metric(cell, fam, eps)
    kk = min(k_max, dirichlet_dimension(scaled))
    intervals = dn_intervals(cell, fam, eps, kk, **solver)
    deepest = tower.quotients[-1]
    cover = build_cover(scaled, deepest)
    want = min(kk * deepest.size, cover.n_vertices)
    vals = cover_spectrum(cover, want, **solver).values

    quotient_cover = build_cover(scaled, trivial_quotient(cell.n_generators))
    qstiff, qmass = quotient_cover.laplacian()
    qspec, qvecs = eig_pairs(qstiff, qmass, kk, **solver)
    cstiff, cmass = cover.laplacian()

    hits = []
    for j in range(kk):
        lo, hi = intervals.lower[j] - tol, intervals.upper[j] + tol
        direct = vals[(vals >= lo) & (vals <= hi)]
        if direct.size:
            hits.append(IntervalHit(j, DIRECT, float(direct[0]), 0.0))
            continue
        # lift the j-th quotient eigenfunction to the deepest cover
        lam = float(qspec.values[j])
        lifted = np.tile(qvecs[:, j], deepest.size)
        radius = residual_enclosure(cstiff, cmass, lifted, lam)
        if lo <= lam - radius and lam + radius <= hi:
            hits.append(IntervalHit(j, CERTIFIED, lam, radius))
        else:
            hits.append(IntervalHit(j, UNCONFIRMED, lam, radius))
    return hits
