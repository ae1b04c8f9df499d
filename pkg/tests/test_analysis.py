import numpy as np
import pytest

from specgap import presets
from specgap.analysis import (
    DEFAULT_EPS_GRID,
    EpsSearch,
    GapReport,
    IntervalSet,
    count_components,
    distinct_values,
    dn_intervals,
    find_eps_for_gaps,
    gap_report,
    limit_spectrum,
    merge_components,
    sweep,
    weyl_compare,
)
from specgap.cell import HANDLE, MetricFamily
from specgap.errors import ArgumentError


def fam():
    return MetricFamily(HANDLE, 3)


def test_interval_set_validation():
    IntervalSet([0.0, 1.0], [0.5, 2.0])
    with pytest.raises(ArgumentError):
        IntervalSet([0.0, 1.0], [0.5, 0.5])  # upper below lower
    with pytest.raises(ArgumentError):
        IntervalSet([1.0, 0.0], [2.0, 3.0])  # lower not sorted


def test_dn_intervals_first_interval_starts_at_zero():
    intervals = dn_intervals(presets.z_path_cell(3), fam(), 0.5, 1)
    assert intervals.lower[0] == pytest.approx(0.0, abs=1e-9)
    assert intervals.upper[0] > 0


def test_dn_intervals_merge_by_eps():
    cell = presets.z_path_cell(3)
    wide = dn_intervals(cell, fam(), 1.0, 3)
    comps, gaps = merge_components(wide)
    assert len(comps) == 1 and not gaps
    narrow = dn_intervals(cell, fam(), 0.01, 3)
    comps, gaps = merge_components(narrow)
    assert len(comps) == 3 and len(gaps) == 2
    # interval widths of order eps^(d-2) = eps
    assert np.max(narrow.widths()) < 0.1


def test_merge_components_cases():
    one = IntervalSet([0.0, 0.5], [1.0, 2.0])
    comps, gaps = merge_components(one)
    assert comps == [(0.0, 2.0)] and gaps == []
    two = IntervalSet([0.0, 2.0], [1.0, 3.0])
    comps, gaps = merge_components(two)
    assert comps == [(0.0, 1.0), (2.0, 3.0)]
    assert gaps == [(1.0, 2.0)]


def test_component_count_nondecreasing_in_sweep():
    reports = sweep(presets.z_path_cell(3), fam(), K=3,
                    eps_grid=[2.0**-i for i in range(1, 9)])
    counts = [r.component_count for r in reports]
    assert all(b >= a for a, b in zip(counts, counts[1:]))
    for r in reports:
        assert r.component_count == len(r.gaps) + 1


def test_count_components():
    s = IntervalSet([0.0], [1.0])
    assert count_components(s, 0.5) == 1
    two = [(0.0, 1.0), (2.0, 3.0)]
    assert count_components(two, 1.5) == 1
    three = [(0.0, 1.0), (2.0, 3.0), (5.0, 6.0)]
    assert count_components(three, 4.0) == 2
    # spectral points without multiplicity
    assert count_components(np.array([0.0, 0.0, 1.0]), 2.0) == 2
    with pytest.raises(ArgumentError):
        count_components(s, -1.0)


def test_distinct_values():
    vals = distinct_values([0.0, 1e-9, 1.0, 1.0 + 1e-9, 2.0])
    assert len(vals) == 3


def test_find_eps_for_gaps_found():
    search = find_eps_for_gaps(presets.z_path_cell(3), fam(), n=2, K=3)
    assert search.found
    assert 0 < search.eps < 1
    assert search.gaps_found >= 2


def test_find_eps_for_gaps_pigeonhole_none():
    # limit spectrum of the double-limit cell: C4 eigenvalues {0, 2, 2, 4},
    # 3 distinct values among K=4, so n=3 gaps are impossible
    cell = presets.double_limit_cell()
    search = find_eps_for_gaps(cell, fam(), n=3, K=4)
    assert not search.found
    assert search.distinct_limit_values == 3


def test_find_eps_zero_gaps_trivial():
    search = find_eps_for_gaps(presets.z_path_cell(3), fam(), n=0, K=3,
                               eps_grid=(0.5, 0.25))
    assert search.found
    assert search.eps == 0.5


def test_gap_report_samples():
    report = gap_report(presets.z_path_cell(3), fam(), 0.01, 3,
                        lam_grid=(0.5, 4.0))
    assert report.n_samples[0] == (0.5, 1)
    assert report.n_samples[1][1] == 3


def test_sweep_empty_grid_rejected():
    with pytest.raises(ArgumentError):
        sweep(presets.z_path_cell(3), fam(), K=3, eps_grid=())


def test_limit_spectrum_path():
    # decoupled limit of the z-path cell: Neumann path spectrum
    vals = limit_spectrum(presets.z_path_cell(4), fam(), 4)
    expected = sorted(2 - 2 * np.cos(np.pi * j / 4) for j in range(4))
    assert np.allclose(vals, expected, atol=1e-9)


def test_weyl_rows_basic():
    cell = presets.z_path_cell(6)
    limit = distinct_values(limit_spectrum(cell, fam(), 6))
    lam_grid = [0.0] + [0.5 * (limit[j] + limit[j + 1]) for j in range(len(limit) - 1)]
    rows = weyl_compare(cell, fam(), lam_grid, K=6)
    assert rows[0].n_limit == 1 and rows[0].ok
    for j, row in enumerate(rows[1:], start=1):
        assert row.n_limit == j
        assert row.ok
        assert row.n_achieved >= j
        assert row.sufficient_depth


def test_weyl_counts_multiplicity_once():
    cell = presets.double_limit_cell()
    # limit spectrum {0, 2, 2, 4}: between 2 and 4 the count is 2, not 3
    rows = weyl_compare(cell, fam(), [3.0], K=4)
    assert rows[0].n_limit == 2
    assert rows[0].ok


def test_weyl_insufficient_depth_flagged():
    cell = presets.z_path_cell(4)
    rows = weyl_compare(cell, fam(), [100.0], K=4)
    assert not rows[0].sufficient_depth


def test_gap_report_invariant():
    with pytest.raises(ArgumentError):
        GapReport(0.5, IntervalSet([0.0], [1.0]), ((0.0, 1.0),), ((1.0, 2.0),))


def test_default_eps_grid_dyadic():
    assert DEFAULT_EPS_GRID[0] == 0.5
    assert DEFAULT_EPS_GRID[-1] == 2.0**-12
    assert len(DEFAULT_EPS_GRID) == 12
