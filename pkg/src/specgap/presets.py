"""Shipped example cells, groups and towers, plus randomized test cells.

The cells mirror the worked examples the construction was designed around:
a rank-1 path cell glued into a line (handle model), a 2-generator cell for
Heisenberg and free-group covers (conformal model), and a single-vertex
loop whose covers are weighted cycles.
"""

from __future__ import annotations

import numpy as np

from . import groups
from .cell import CONFORMAL, HANDLE, CellGraph, MetricFamily, Port
from .errors import ArgumentError


def single_loop_cell(w: float = 1.0) -> CellGraph:
    """One vertex with a self-port: the Z-cover is a weighted line.

    The ZZ/m cover is the weighted cycle C_m, the Bloch fiber the scalar
    ``2 w (1 - cos theta)``.
    """
    return CellGraph(
        measures=np.array([1.0]),
        edges=(),
        ports=(Port(minus=(0,), plus=(0,), conductance=(w,)),),
        name="single_loop",
    )


def z_path_cell(
    core: int = 8,
    junction_w: float = 1.0,
    coupling_w: float = 1.0,
    bridge_measure: float = 1.0,
) -> CellGraph:
    """Path core with one bridge vertex per side, glued into a Z-chain.

    Vertices ``0..core-1`` form the unit-weight core path; vertex ``core``
    is the minus bridge attached to vertex 0 and ``core+1`` the plus bridge
    attached to vertex ``core-1``.  Both bridge edges are junction-flagged,
    so the handle metric family decouples copies as eps -> 0 and the limit
    spectrum is the Neumann path spectrum ``2 - 2 cos(j pi / core)``.
    """
    if core < 1:
        raise ArgumentError("core path needs at least one vertex")
    n = core + 2
    measures = np.ones(n)
    measures[core:] = bridge_measure
    edges = [(i, i + 1, 1.0) for i in range(core - 1)]
    j_minus = len(edges)
    edges.append((0, core, junction_w))
    j_plus = len(edges)
    edges.append((core - 1, core + 1, junction_w))
    return CellGraph(
        measures=measures,
        edges=tuple(edges),
        ports=(Port(minus=(core,), plus=(core + 1,), conductance=(coupling_w,)),),
        junction_edges=frozenset({j_minus, j_plus}),
        name=f"z_path{core}",
    )


def two_generator_cell(
    core: int = 8,
    cross_w: float = 1.0,
    coupling_w: float = 1.0,
    bridge_measure: float = 1.0,
    dimension: int = 4,
) -> CellGraph:
    """Path core with two port pairs, for 2-generator groups (conformal).

    Generator 1 couples through bridges at the core ends, generator 2
    through bridges at two interior core vertices.  The four bridge
    vertices form the conformal zone; with the conformal family in
    dimension ``d`` the cross edges scale by ``eps**((d-2)/2)`` and the
    limit spectrum is again the core path spectrum.
    """
    if core < 4:
        raise ArgumentError("two-generator cell needs a core of >= 4 vertices")
    n = core + 4
    b1m, b1p, b2m, b2p = core, core + 1, core + 2, core + 3
    measures = np.ones(n)
    measures[core:] = bridge_measure
    mid_lo, mid_hi = core // 3, 2 * core // 3
    edges = [(i, i + 1, 1.0) for i in range(core - 1)]
    edges += [
        (0, b1m, cross_w),
        (core - 1, b1p, cross_w),
        (mid_lo, b2m, cross_w),
        (mid_hi, b2p, cross_w),
    ]
    return CellGraph(
        measures=measures,
        edges=tuple(edges),
        ports=(
            Port(minus=(b1m,), plus=(b1p,), conductance=(coupling_w,)),
            Port(minus=(b2m,), plus=(b2p,), conductance=(coupling_w,)),
        ),
        conformal_zone=frozenset({b1m, b1p, b2m, b2p}),
        name=f"gen2_core{core}",
    )


def double_limit_cell() -> CellGraph:
    """Cell whose decoupled limit is a 4-cycle: limit eigenvalue 2 is double."""
    # vertices 0..3: cycle core; 4, 5: bridges
    edges = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]
    j0 = len(edges)
    edges.append((0, 4, 1.0))
    j1 = len(edges)
    edges.append((2, 5, 1.0))
    return CellGraph(
        measures=np.ones(6),
        edges=tuple(edges),
        ports=(Port(minus=(4,), plus=(5,), conductance=(1.0,)),),
        junction_edges=frozenset({j0, j1}),
        name="double_limit",
    )


def handle_family(dimension: int = 3) -> MetricFamily:
    return MetricFamily(HANDLE, dimension)


def conformal_family(dimension: int = 4) -> MetricFamily:
    return MetricFamily(CONFORMAL, dimension)


def z_path3_cell() -> CellGraph:
    """Small demo cell: 3-vertex core (the CLI spectrum example)."""
    return z_path_cell(core=3)


def random_cell(rng: np.random.Generator, max_vertices: int = 20, generators: int | None = None) -> CellGraph:
    """Random connected cell with ports, for property and acceptance tests.

    The base graph is a random spanning tree plus extra edges; each
    generator gets a random one-pair port.  Weights are drawn in
    [0.5, 2.0], so all spectra are order-1.
    """
    n = int(rng.integers(3, max_vertices + 1))
    r = int(generators if generators is not None else rng.integers(1, 4))
    edges = {}
    for i in range(1, n):
        j = int(rng.integers(0, i))
        edges[(j, i)] = float(rng.uniform(0.5, 2.0))
    for _ in range(int(rng.integers(0, n))):
        a, b = int(rng.integers(0, n)), int(rng.integers(0, n))
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        if key not in edges:
            edges[key] = float(rng.uniform(0.5, 2.0))
    ports = []
    for _ in range(r):
        pm = int(rng.integers(0, n))
        pp = int(rng.integers(0, n))
        ports.append(Port(minus=(pm,), plus=(pp,), conductance=(float(rng.uniform(0.5, 2.0)),)))
    port_set = set()
    for p in ports:
        port_set.update(p.minus)
        port_set.update(p.plus)
    if len(port_set) >= n:
        # keep the Dirichlet system nonempty
        ports[0] = Port(minus=(0,), plus=(0,), conductance=ports[0].conductance)
    edge_list = tuple((u, v, w) for (u, v), w in sorted(edges.items()))
    return CellGraph(
        measures=rng.uniform(0.5, 2.0, n),
        edges=edge_list,
        ports=tuple(ports),
        name="random",
    )


def z_tower(ms=(2, 4, 8, 16)) -> groups.Tower:
    """Cyclic quotients of Z: G_i = Z/m_i with m_i | m_{i+1}."""
    return groups.cyclic_tower(ms)


def heisenberg_tower(ms=(2, 4)) -> groups.Tower:
    """Heisenberg quotients H3(Z/m), entrywise reduction as projections."""
    return groups.heisenberg_tower(ms)


def f2_tower() -> groups.Tower:
    """Free-group tower by kernel intersection of permutation images.

    Level 1: F2 -> S3 via (1 2), (2 3).  Level 2 adds a second component
    F2 -> S4 via (1 2 3 4), (1 2); the joint image has order 24.
    """
    level1 = [["(1 2)", "(2 3)"]]
    level2 = [["(1 2)", "(2 3)"], ["(1 2 3 4)", "(1 2)"]]
    return groups.permutation_tower([level1, level2])


def f2_presentation() -> groups.GroupPresentation:
    return groups.free_presentation(2)


def z_presentation() -> groups.GroupPresentation:
    return groups.free_abelian_presentation(1)


def heisenberg_presentation() -> groups.GroupPresentation:
    return groups.heisenberg_presentation()
