import math

import numpy as np
import pytest

from specgap.cell import (
    CONFORMAL,
    HANDLE,
    Bloch,
    CellGraph,
    Dirichlet,
    Equivariant,
    MetricFamily,
    Neumann,
    Port,
    apply_metric,
    assemble,
    cutoff_energy,
    cutoff_profile,
    dn_eigenvalues,
    limit_cell,
)
from specgap.errors import ArgumentError
from specgap.linalg import eig_lowest
from specgap import presets

TOL = 1e-9


def path3_with_end_ports():
    return CellGraph(
        measures=np.ones(3),
        edges=((0, 1, 1.0), (1, 2, 1.0)),
        ports=(Port(minus=(0,), plus=(2,), conductance=(1.0,)),),
    )


# ---------------------------------------------------------------------------
# metric families


def test_apply_metric_identity_at_eps_one():
    cell = presets.z_path_cell(3)
    fam = MetricFamily(HANDLE, 3)
    scaled = apply_metric(cell, fam, 1.0)
    assert np.array_equal(scaled.measures, cell.measures)
    assert scaled.edges == cell.edges
    assert all(
        p.conductance == q.conductance for p, q in zip(scaled.ports, cell.ports)
    )


def test_handle_junction_edge_scaling():
    # single junction edge, base conductance 1, d=3, eps=0.1 -> 0.1
    cell = presets.z_path_cell(3, junction_w=1.0)
    scaled = apply_metric(cell, MetricFamily(HANDLE, 3), 0.1)
    for i in cell.junction_edges:
        assert scaled.edges[i][2] == pytest.approx(0.1, abs=1e-15)
    # non-junction core edges unchanged
    for i in range(len(cell.edges)):
        if i not in cell.junction_edges:
            assert scaled.edges[i][2] == cell.edges[i][2]


def test_handle_vertex_measure_scaling():
    cell = presets.z_path_cell(3)
    scaled = apply_metric(cell, MetricFamily(HANDLE, 3), 0.1)
    handles = cell.handle_vertices()
    assert handles == {3, 4}
    for v in range(cell.n_vertices):
        factor = 0.1**3 if v in handles else 1.0
        assert scaled.measures[v] == pytest.approx(cell.measures[v] * factor)


def test_handle_coupling_scales():
    cell = presets.z_path_cell(3, coupling_w=2.0)
    scaled = apply_metric(cell, MetricFamily(HANDLE, 3), 0.5)
    assert scaled.ports[0].conductance[0] == pytest.approx(2.0 * 0.5)


def test_conformal_vertex_measure():
    # conformal vertex base measure 1, d=3, eps=0.1 -> 0.001
    cell = CellGraph(
        measures=np.ones(3),
        edges=((0, 1, 1.0), (1, 2, 1.0)),
        ports=(Port(minus=(2,), plus=(2,), conductance=(1.0,)),),
        conformal_zone=frozenset({2}),
    )
    scaled = apply_metric(cell, MetricFamily(CONFORMAL, 3), 0.1)
    assert scaled.measures[2] == pytest.approx(1e-3, abs=1e-18)
    # boundary edge (1,2) crosses the zone: geometric mean eps^((d-2)/2)
    assert scaled.edges[1][2] == pytest.approx(math.sqrt(0.1))
    # interior edge (0,1) untouched
    assert scaled.edges[0][2] == 1.0
    # self-port on a zone vertex scales by the full edge factor
    assert scaled.ports[0].conductance[0] == pytest.approx(0.1)


def test_conformal_requires_d3():
    with pytest.raises(ArgumentError):
        MetricFamily(CONFORMAL, 2)


def test_eps_domain():
    cell = presets.z_path_cell(3)
    fam = MetricFamily(HANDLE, 3)
    for bad in (0.0, -0.5, 1.5):
        with pytest.raises(ArgumentError):
            apply_metric(cell, fam, bad)


def test_metric_monotone_in_eps():
    cell = presets.z_path_cell(3)
    fam = MetricFamily(HANDLE, 3)
    last = None
    for eps in (1.0, 0.5, 0.25, 0.1, 0.01):
        scaled = apply_metric(cell, fam, eps)
        weights = [scaled.edges[i][2] for i in cell.junction_edges]
        weights += list(scaled.ports[0].conductance)
        weights += [scaled.measures[v] for v in cell.handle_vertices()]
        if last is not None:
            assert all(w <= lw + 1e-15 for w, lw in zip(weights, last))
        assert all(w > 0 for w in weights)
        last = weights


# ---------------------------------------------------------------------------
# cutoff profile


def test_cutoff_endpoints():
    for d in (2, 3, 4):
        eps = 0.04
        assert cutoff_profile(d, eps, eps) == 0.0
        assert cutoff_profile(d, eps, math.sqrt(eps)) == 1.0
        assert cutoff_profile(d, eps, eps / 2) == 0.0
        assert cutoff_profile(d, eps, 0.9) == 1.0


def test_cutoff_interpolation_value():
    # d=3, eps=0.01, r=0.02: (50-100)/(10-100) = 5/9
    assert cutoff_profile(3, 0.01, 0.02) == pytest.approx(5.0 / 9.0, abs=1e-12)


def test_cutoff_d2_boundary():
    assert cutoff_profile(2, 0.25, 0.5) == pytest.approx(1.0, abs=1e-12)


def test_cutoff_monotone_in_r():
    for d in (2, 3):
        eps = 0.01
        rs = np.linspace(1e-3, 1.0, 400)
        vals = [cutoff_profile(d, eps, float(r)) for r in rs]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        assert all(0 <= v <= 1 for v in vals)


def test_cutoff_domain_errors():
    with pytest.raises(ArgumentError):
        cutoff_profile(3, 0.0, 0.5)
    with pytest.raises(ArgumentError):
        cutoff_profile(3, 1.0, 0.5)
    with pytest.raises(ArgumentError):
        cutoff_profile(3, 0.1, 0.0)
    with pytest.raises(ArgumentError):
        cutoff_profile(1, 0.1, 0.5)


def test_cutoff_energy_vanishes():
    # decrease to zero on the fixed default grid
    energies = [cutoff_energy(3, eps) for eps in (0.1, 0.01, 0.001)]
    assert energies[0] > energies[1] > energies[2]
    d2 = [cutoff_energy(2, eps) for eps in (0.1, 0.01, 0.001)]
    assert d2[0] > d2[1] > d2[2]
    # d=3 analytic value eps/(1-sqrt(eps)) on a grid fine enough to
    # resolve the transition layer
    for eps in (0.1, 0.01, 0.001):
        got = cutoff_energy(3, eps, grid_points=200000)
        assert got == pytest.approx(eps / (1 - math.sqrt(eps)), rel=0.02)


# ---------------------------------------------------------------------------
# assembly


def test_neumann_assembly_p3():
    cell = CellGraph(measures=np.ones(3), edges=((0, 1, 1.0), (1, 2, 1.0)), ports=())
    stiff, mass = assemble(cell, Neumann())
    spec = eig_lowest(stiff, mass, 3)
    assert np.allclose(spec.values, [0.0, 1.0, 3.0], atol=TOL)


def test_dirichlet_assembly_p3_end_ports():
    cell = path3_with_end_ports()
    stiff, mass = assemble(cell, Dirichlet())
    assert stiff.dimension == 1
    assert stiff.to_dense()[0, 0] == pytest.approx(2.0)


def test_bloch_single_vertex_band():
    cell = presets.single_loop_cell(w=1.5)
    for theta in np.linspace(0, 2 * math.pi, 17, endpoint=False):
        stiff, mass = assemble(cell, Bloch((theta,)))
        spec = eig_lowest(stiff, mass, 2)
        expected = 2 * 1.5 * (1 - math.cos(theta))
        assert spec.values[0] == pytest.approx(expected, abs=1e-9)
        # realified scalar problem: eigenvalue appears twice
        assert spec.values[1] == pytest.approx(expected, abs=1e-9)


def test_trivial_rep_equals_periodic_quotient():
    # gluing the ports with their coupling edges = equivariant with rho = 1
    cell = path3_with_end_ports()
    rep = type("TrivialRep", (), {"matrices": (np.eye(1),), "dim_real": 1})()
    stiff, mass = assemble(cell, Equivariant(rep))
    quotient = CellGraph(
        measures=np.ones(3),
        edges=((0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)),
        ports=(),
    )
    qstiff, qmass = assemble(quotient, Neumann())
    assert np.allclose(stiff.to_dense(), qstiff.to_dense())
    assert np.allclose(mass.diagonal, qmass.diagonal)


def test_bloch_requires_abelian_declaration():
    cell = presets.single_loop_cell()
    with pytest.raises(ArgumentError):
        assemble(cell, Bloch((0.3,), declared_abelian=False))


def test_bloch_phase_count_checked():
    cell = presets.single_loop_cell()
    with pytest.raises(ArgumentError):
        assemble(cell, Bloch((0.1, 0.2)))


# ---------------------------------------------------------------------------
# Dirichlet-Neumann eigenvalues


def test_dn_p3_end_ports():
    cell = path3_with_end_ports()
    neumann, dirichlet = dn_eigenvalues(cell, 1)
    assert neumann.values[0] == pytest.approx(0.0, abs=TOL)
    assert dirichlet.values[0] == pytest.approx(2.0, abs=TOL)


def test_dn_ground_state_zero():
    rng = np.random.default_rng(2)
    for _ in range(5):
        cell = presets.random_cell(rng, max_vertices=10)
        neumann, _ = dn_eigenvalues(cell, 1)
        assert neumann.values[0] == pytest.approx(0.0, abs=1e-9)


def test_dn_interlacing_random():
    rng = np.random.default_rng(4)
    for _ in range(10):
        cell = presets.random_cell(rng, max_vertices=10)
        from specgap.cell import dirichlet_dimension

        k = min(5, dirichlet_dimension(cell))
        neumann, dirichlet = dn_eigenvalues(cell, k)
        assert np.all(neumann.values <= dirichlet.values + 1e-9)


def test_dn_k_exceeds_dirichlet_dimension():
    cell = path3_with_end_ports()
    with pytest.raises(ArgumentError):
        dn_eigenvalues(cell, 2)


def test_bracketing_random_reps():
    # lambda_m^- <= lambda_m^rho <= lambda_m^+ with n-fold DN copies
    from specgap import groups

    rng = np.random.default_rng(8)
    for _ in range(6):
        cell = presets.random_cell(rng, max_vertices=8, generators=2)
        q = groups.symmetric_quotient(3)
        for rep in groups.irreps(q):
            n = rep.dim_real
            stiff, mass = assemble(cell, Equivariant(rep))
            m_count = min(stiff.dimension, 3 * n)
            vals = eig_lowest(stiff, mass, m_count).values
            from specgap.cell import dirichlet_dimension

            kk = min((m_count + n - 1) // n, dirichlet_dimension(cell))
            neumann, dirichlet = dn_eigenvalues(cell, kk)
            for m in range(1, m_count + 1):
                k = (m - 1) // n  # 0-based scalar index
                if k < len(neumann.values):
                    assert vals[m - 1] >= neumann.values[k] - 1e-7
                if k < len(dirichlet.values):
                    assert vals[m - 1] <= dirichlet.values[k] + 1e-7


def test_dn_convergence_to_limit():
    # interval widths shrink monotonically along a dyadic sweep and the
    # endpoints approach the decoupled limit spectrum
    cell = presets.z_path_cell(4)
    fam = MetricFamily(HANDLE, 3)
    limit = limit_cell(cell, fam)
    limit_spec = eig_lowest(*assemble(limit, Neumann()), 4).values
    prev_width = None
    for eps in (0.5, 0.25, 0.125, 0.0625, 0.03125):
        scaled = apply_metric(cell, fam, eps)
        neumann, dirichlet = dn_eigenvalues(scaled, 4)
        width = np.max(dirichlet.values - neumann.values)
        if prev_width is not None:
            assert width <= prev_width + 1e-12
        prev_width = width
    assert np.allclose(neumann.values, limit_spec, atol=0.05)
    assert np.allclose(dirichlet.values, limit_spec, atol=0.05)


def test_limit_cell_structure():
    cell = presets.z_path_cell(5)
    lim = limit_cell(cell, MetricFamily(HANDLE, 3))
    assert lim.n_vertices == 5
    assert len(lim.edges) == 4
    assert lim.ports == ()
    heis = presets.two_generator_cell(6)
    lim2 = limit_cell(heis, presets.conformal_family(4))
    assert lim2.n_vertices == 6


# ---------------------------------------------------------------------------
# cell validation


def test_cell_rejects_bad_weights():
    with pytest.raises(ArgumentError):
        CellGraph(measures=np.array([1.0, -1.0]), edges=((0, 1, 1.0),), ports=())
    with pytest.raises(ArgumentError):
        CellGraph(measures=np.ones(2), edges=((0, 1, 0.0),), ports=())
    with pytest.raises(ArgumentError):
        CellGraph(measures=np.ones(2), edges=((0, 0, 1.0),), ports=())


def test_cell_rejects_disconnected_with_ports():
    with pytest.raises(ArgumentError):
        CellGraph(
            measures=np.ones(4),
            edges=((0, 1, 1.0), (2, 3, 1.0)),
            ports=(Port(minus=(0,), plus=(1,), conductance=(1.0,)),),
        )


def test_cell_connected_through_ports_accepted():
    # two components joined only by the port coupling
    cell = CellGraph(
        measures=np.ones(4),
        edges=((0, 1, 1.0), (2, 3, 1.0)),
        ports=(Port(minus=(1,), plus=(2,), conductance=(1.0,)),),
    )
    assert cell.n_vertices == 4


def test_port_validation():
    with pytest.raises(ArgumentError):
        Port(minus=(0, 0), plus=(1, 2), conductance=(1.0, 1.0))
    with pytest.raises(ArgumentError):
        Port(minus=(0,), plus=(1, 2), conductance=(1.0,))
    with pytest.raises(ArgumentError):
        Port(minus=(0,), plus=(1,), conductance=(-1.0,))
