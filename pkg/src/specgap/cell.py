"""Fundamental-domain cells: weighted graphs with ports and metric families.

A cell models one fundamental domain of a periodic space as a weighted
graph.  Vertices carry a measure (mass), edges a conductance (stiffness).
For each deck-group generator the cell has a *port*: an ordered pair of
matched vertex lists with per-pair coupling conductances.  A covering graph
glues copies of the cell along these ports; the cell alone supports
Neumann, Dirichlet, equivariant and Bloch boundary conditions, whose
eigenvalues bracket every periodic spectrum built on top of it.

Two epsilon-parameterized metric families shrink the junction region:

* handle model: flagged junction edges scale by ``eps**(d-2)`` and interior
  handle vertices by ``eps**d``;
* conformal model (``d >= 3``): flagged zone vertices scale by ``eps**d``,
  incident edges by ``eps**(d-2)`` (geometric mean across the zone
  boundary).

Port coupling conductances scale like junction edges in both families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ArgumentError
from .linalg import MassMatrix, Spectrum, SymBuilder, SymMatrix, eig_lowest

HANDLE = "handle"
CONFORMAL = "conformal"


@dataclass(frozen=True)
class Port:
    """Matched boundary vertex lists for one generator.

    ``minus[i]`` in one copy of the cell is coupled to ``plus[i]`` in the
    neighbouring copy with conductance ``conductance[i]``.  A vertex may
    appear on both sides (self-port), which models a handle whose two ends
    attach to the same discretized section.
    """

    minus: tuple
    plus: tuple
    conductance: tuple

    def __post_init__(self):
        object.__setattr__(self, "minus", tuple(int(v) for v in self.minus))
        object.__setattr__(self, "plus", tuple(int(v) for v in self.plus))
        object.__setattr__(self, "conductance", tuple(float(w) for w in self.conductance))
        if len(self.minus) != len(self.plus) or len(self.minus) != len(self.conductance):
            raise ArgumentError("port lists must have equal length")
        if len(set(self.minus)) != len(self.minus) or len(set(self.plus)) != len(self.plus):
            raise ArgumentError("port vertex lists must not repeat vertices")
        if any(w <= 0 for w in self.conductance):
            raise ArgumentError("port conductances must be positive")

    @property
    def size(self):
        return len(self.minus)


@dataclass(frozen=True)
class CellGraph:
    """Weighted graph with per-generator ports and a scaled region.

    Parameters
    ----------
    measures : array
        Strictly positive vertex measures.
    edges : tuple
        Internal edges ``(u, v, conductance)`` with ``u != v``.
    ports : tuple of Port
        One port per generator, in generator order.
    junction_edges : frozenset
        Indices into ``edges`` flagged as epsilon-scaled (handle model).
    conformal_zone : frozenset
        Vertex indices flagged as epsilon-scaled (conformal model).
    """

    measures: np.ndarray
    edges: tuple
    ports: tuple
    junction_edges: frozenset = frozenset()
    conformal_zone: frozenset = frozenset()
    name: str = ""

    def __post_init__(self):
        meas = np.asarray(self.measures, dtype=float)
        object.__setattr__(self, "measures", meas)
        if meas.ndim != 1 or meas.size < 1:
            raise ArgumentError("cell needs at least one vertex")
        if not np.all(meas > 0):
            raise ArgumentError("vertex measures must be strictly positive")
        n = meas.size
        edges = []
        for (u, v, w) in self.edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ArgumentError("self-loop edges are not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise ArgumentError(f"edge ({u},{v}) out of range")
            if w <= 0:
                raise ArgumentError("edge conductances must be positive")
            edges.append((min(u, v), max(u, v), w))
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "ports", tuple(self.ports))
        for p in self.ports:
            for v in p.minus + p.plus:
                if not 0 <= v < n:
                    raise ArgumentError(f"port vertex {v} out of range")
        object.__setattr__(self, "junction_edges", frozenset(int(i) for i in self.junction_edges))
        for i in self.junction_edges:
            if not 0 <= i < len(edges):
                raise ArgumentError(f"junction edge index {i} out of range")
        object.__setattr__(self, "conformal_zone", frozenset(int(v) for v in self.conformal_zone))
        for v in self.conformal_zone:
            if not 0 <= v < n:
                raise ArgumentError(f"conformal zone vertex {v} out of range")
        # Port-free graphs (decoupled limits, auxiliary spectra) may be
        # disconnected; a periodic fundamental domain must be connected.
        if self.ports and not self._connected_with_ports():
            raise ArgumentError("cell must be connected once ports are identified")

    @property
    def n_vertices(self):
        return int(self.measures.size)

    @property
    def n_generators(self):
        return len(self.ports)

    def port_vertices(self) -> set:
        out = set()
        for p in self.ports:
            out.update(p.minus)
            out.update(p.plus)
        return out

    def _connected_with_ports(self) -> bool:
        n = self.n_vertices
        adj = [[] for _ in range(n)]
        for (u, v, _) in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for p in self.ports:
            for a, b in zip(p.minus, p.plus):
                adj[a].append(b)
                adj[b].append(a)
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
        return bool(seen.all())

    def handle_vertices(self) -> set:
        """Vertices interior to a handle: every incident edge is flagged.

        A vertex belongs to the scaled handle region when it touches at
        least one junction edge and none of its internal edges is
        unflagged.  Core attachment vertices keep their measure.
        """
        incident = [[] for _ in range(self.n_vertices)]
        for idx, (u, v, _) in enumerate(self.edges):
            incident[u].append(idx)
            incident[v].append(idx)
        out = set()
        for v in range(self.n_vertices):
            if incident[v] and all(i in self.junction_edges for i in incident[v]):
                out.add(v)
        return out


@dataclass(frozen=True)
class MetricFamily:
    """Decoupling weight law, parameterized by epsilon in (0, 1]."""

    mode: str
    dimension: int = 3

    def __post_init__(self):
        if self.mode not in (HANDLE, CONFORMAL):
            raise ArgumentError(f"unknown metric mode {self.mode!r}")
        if self.dimension < 2:
            raise ArgumentError("metric dimension must be >= 2")
        if self.mode == CONFORMAL and self.dimension < 3:
            raise ArgumentError("conformal model requires dimension >= 3")

    def edge_factor(self, eps: float) -> float:
        return eps ** (self.dimension - 2)

    def vertex_factor(self, eps: float) -> float:
        return eps ** self.dimension


def apply_metric(cell: CellGraph, fam: MetricFamily, eps: float) -> CellGraph:
    """Return the cell with the epsilon-metric weights applied.

    Handle model: junction-edge and port-coupling conductances scale by
    ``eps**(d-2)``; measures of handle-interior vertices by ``eps**d``.
    Conformal model: zone-vertex measures scale by ``eps**d``; an edge
    scales by ``eps**(d-2)`` per endpoint in the zone, averaged
    geometrically, and port couplings scale by their port endpoints.
    """
    if not 0 < eps <= 1:
        raise ArgumentError("eps must lie in (0, 1]")
    we = fam.edge_factor(eps)
    wv = fam.vertex_factor(eps)
    measures = cell.measures.copy()
    edges = list(cell.edges)

    if fam.mode == HANDLE:
        for i in cell.junction_edges:
            u, v, w = edges[i]
            edges[i] = (u, v, w * we)
        for v in cell.handle_vertices():
            measures[v] *= wv
        ports = tuple(
            replace(p, conductance=tuple(w * we for w in p.conductance))
            for p in cell.ports
        )
    else:
        zone = cell.conformal_zone
        for v in zone:
            measures[v] *= wv
        half = math.sqrt(we)
        for i, (u, v, w) in enumerate(edges):
            inside = (u in zone) + (v in zone)
            if inside:
                edges[i] = (u, v, w * half**inside)
        ports = []
        for p in cell.ports:
            conds = []
            for a, b, w in zip(p.minus, p.plus, p.conductance):
                inside = (a in zone) + (b in zone)
                conds.append(w * half**inside)
            ports.append(replace(p, conductance=tuple(conds)))
        ports = tuple(ports)

    return replace(cell, measures=measures, edges=tuple(edges), ports=ports)


def cutoff_profile(d: int, eps: float, r: float) -> float:
    """Radial cutoff used for quasimode transplantation.

    With ``h(r) = r**(-d+2)`` for ``d >= 3`` (``log r`` for ``d = 2``) the
    profile is 0 on ``(0, eps]``, ``(h(r)-h(eps)) / (h(sqrt(eps))-h(eps))``
    on ``[eps, sqrt(eps)]`` and 1 beyond; its radial Dirichlet energy
    vanishes as ``eps -> 0``.
    """
    if d < 2:
        raise ArgumentError("dimension must be >= 2")
    if not 0 < eps < 1:
        raise ArgumentError("eps must lie in (0, 1)")
    if not 0 < r <= 1:
        raise ArgumentError("r must lie in (0, 1]")
    if r <= eps:
        return 0.0
    root = math.sqrt(eps)
    if r >= root:
        return 1.0
    if d == 2:
        h = math.log
    else:
        def h(x):
            return x ** (-d + 2)
    return (h(r) - h(eps)) / (h(root) - h(eps))


def cutoff_energy(d: int, eps: float, grid_points: int = 4096) -> float:
    """Discrete radial Dirichlet energy of the cutoff on a fixed grid.

    Midpoint quadrature of ``integral |chi'|**2 r**(d-1) dr`` over (0, 1);
    tends to 0 as ``eps -> 0``.
    """
    rs = (np.arange(grid_points) + 0.5) / grid_points
    dr = 1.0 / grid_points
    chi = np.array([cutoff_profile(d, eps, float(r)) for r in rs])
    dchi = np.diff(chi) / dr
    mid = 0.5 * (rs[:-1] + rs[1:])
    return float(np.sum(dchi**2 * mid ** (d - 1) * dr))


class Dirichlet:
    """Port vertices constrained to zero (rows and columns removed)."""


class Neumann:
    """Ports left free; couplings dropped."""


@dataclass(frozen=True)
class Equivariant:
    """Unitary port couplings: block ``-w * rho(gen)`` between port pairs.

    ``rep`` must expose ``matrices`` (one real orthogonal matrix per
    generator) and ``dim_real``; representations produced by
    :mod:`specgap.groups` are relation-checked on construction.
    """

    rep: object


@dataclass(frozen=True)
class Bloch:
    """Scalar phase couplings ``exp(i theta_j)`` realized as real 2x2 blocks.

    Valid only when the deck group is declared abelian free of the cell's
    rank; the declaration is the caller's responsibility and recorded here.
    """

    thetas: tuple
    declared_abelian: bool = True

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _add_block(builder: SymBuilder, bi: int, bj: int, block: np.ndarray, n: int) -> None:
    """Add ``block`` at block position (bi, bj) of an n-blocked symmetric matrix.

    For ``bi == bj`` the block must already be symmetric; only its upper
    triangle is stored.  For off-diagonal positions the implied transpose
    at (bj, bi) is handled by the upper-triangle representation.
    """
    if bi == bj:
        for a in range(n):
            for b in range(a, n):
                if block[a, b] != 0.0:
                    builder.add(bi * n + a, bi * n + b, block[a, b])
    else:
        for a in range(n):
            for b in range(n):
                if block[a, b] != 0.0:
                    builder.add(bi * n + a, bj * n + b, block[a, b])


def _coupling_matrices(cell: CellGraph, bc) -> tuple:
    """Resolve (n, [U_j per generator]) for the given boundary condition."""
    if isinstance(bc, Bloch):
        if not bc.declared_abelian:
            raise ArgumentError("Bloch condition requires an abelian declaration")
        if len(bc.thetas) != cell.n_generators:
            raise ArgumentError("Bloch phase count must match generator count")
        return 2, [_rotation(t) for t in bc.thetas]
    rep = bc.rep
    mats = [np.asarray(m, dtype=float) for m in rep.matrices]
    if len(mats) != cell.n_generators:
        raise ArgumentError("representation arity does not match cell generators")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape != (n, n):
            raise ArgumentError("representation matrices must share one dimension")
        if np.max(np.abs(m.T @ m - np.eye(n))) > 1e-10:
            raise ArgumentError("representation matrices must be orthogonal")
    return n, mats


def assemble(cell: CellGraph, bc) -> tuple[SymMatrix, MassMatrix]:
    """Assemble (stiffness, mass) for the cell under a boundary condition.

    Neumann keeps every vertex and drops the couplings, Dirichlet removes
    port vertices, Equivariant and Bloch blow each vertex up to a block and
    couple port pairs through the unitary image of the generator.
    """
    nv = cell.n_vertices
    if isinstance(bc, Neumann) or bc is Neumann:
        b = SymBuilder(nv)
        for (u, v, w) in cell.edges:
            b.add(u, u, w)
            b.add(v, v, w)
            b.add(u, v, -w)
        return b.build(), MassMatrix(nv, cell.measures)

    if isinstance(bc, Dirichlet) or bc is Dirichlet:
        keep = sorted(set(range(nv)) - cell.port_vertices())
        if not keep:
            raise ArgumentError("Dirichlet condition removes every vertex")
        index = {v: i for i, v in enumerate(keep)}
        b = SymBuilder(len(keep))
        for (u, v, w) in cell.edges:
            if u in index:
                b.add(index[u], index[u], w)
            if v in index:
                b.add(index[v], index[v], w)
            if u in index and v in index:
                b.add(index[u], index[v], -w)
        return b.build(), MassMatrix(len(keep), cell.measures[keep])

    n, mats = _coupling_matrices(cell, bc)
    eye = np.eye(n)
    b = SymBuilder(nv * n)
    for (u, v, w) in cell.edges:
        _add_block(b, u, u, w * eye, n)
        _add_block(b, v, v, w * eye, n)
        _add_block(b, u, v, -w * eye, n)
    for gen, port in enumerate(cell.ports):
        u_mat = mats[gen]
        for pm, pp, w in zip(port.minus, port.plus, port.conductance):
            if pm == pp:
                _add_block(b, pm, pm, w * (2 * eye - u_mat - u_mat.T), n)
            else:
                _add_block(b, pm, pm, w * eye, n)
                _add_block(b, pp, pp, w * eye, n)
                _add_block(b, pm, pp, -w * u_mat, n)
    mass = np.repeat(cell.measures, n)
    return b.build(), MassMatrix(nv * n, mass)


def dirichlet_dimension(cell: CellGraph) -> int:
    return cell.n_vertices - len(cell.port_vertices())


def dn_eigenvalues(cell: CellGraph, k: int, **solver) -> tuple[Spectrum, Spectrum]:
    """Lowest ``k`` Neumann and Dirichlet eigenvalues of the cell.

    The Neumann value never exceeds the Dirichlet value of the same index;
    together they bound every equivariant eigenvalue.
    """
    if k < 1:
        raise ArgumentError("k must be >= 1")
    ddim = dirichlet_dimension(cell)
    if ddim < 1:
        raise ArgumentError("Dirichlet system is empty for this cell")
    if k > ddim:
        raise ArgumentError(f"k={k} exceeds Dirichlet dimension {ddim}")
    neumann = eig_lowest(*assemble(cell, Neumann()), k, **solver)
    dirichlet = eig_lowest(*assemble(cell, Dirichlet()), k, **solver)
    return neumann, dirichlet


def limit_cell(cell: CellGraph, fam: MetricFamily) -> CellGraph:
    """Decoupled limit of the metric family: the scaled region removed.

    Handle model removes handle vertices and junction edges; conformal
    removes the zone.  Ports are dropped (the limit is Neumann-free).
    """
    if fam.mode == HANDLE:
        dead_vertices = cell.handle_vertices()
        dead_edges = set(cell.junction_edges)
    else:
        dead_vertices = set(cell.conformal_zone)
        dead_edges = set()
    keep = [v for v in range(cell.n_vertices) if v not in dead_vertices]
    if not keep:
        raise ArgumentError("limit cell is empty; nothing outside scaled region")
    index = {v: i for i, v in enumerate(keep)}
    edges = []
    for i, (u, v, w) in enumerate(cell.edges):
        if i in dead_edges or u in dead_vertices or v in dead_vertices:
            continue
        edges.append((index[u], index[v], w))
    return CellGraph(
        measures=cell.measures[keep],
        edges=tuple(edges),
        ports=(),
        name=cell.name + ".limit" if cell.name else "limit",
    )
