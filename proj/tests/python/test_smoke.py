import math
from fractions import Fraction

import numpy as np
import pytest

import latids


def test_geometry():
    q = latids.Region.cube(1, 10)
    assert len(q) == 10
    assert latids.van_hove_ratio(q, 1) == Fraction(4, 10)
    assert len(latids.interior_core(q, 1)) == 8
    assert len(latids.s_boundary(latids.Region.cube(2, 3), 1)) == 24

    interior, partial = latids.covering_grid(latids.Region.cube(1, 4), 2, [1])
    assert interior == [(1,)]
    assert partial == [(-1,), (3,)]


def test_colourings():
    vis = latids.visible_colouring(2)
    assert vis.at([3, 5]) == 1
    assert vis.at([2, 4]) == 0
    assert vis.at([0, 0]) == 1

    perc = latids.percolation_colouring(2, [("open", 0.0), ("closed", math.inf)], [0.7, 0.3], 42)
    again = latids.percolation_colouring(2, [("open", 0.0), ("closed", math.inf)], [0.7, 0.3], 42)
    assert [perc.at([x, 0]) for x in range(50)] == [again.at([x, 0]) for x in range(50)]

    table = latids.empirical_frequencies(latids.periodic_coordinate_colouring(1, 2), 1,
                                         latids.Region.cube(1, 100))
    entries = table.entries()
    assert table.positions == 100
    assert all(count == 50 for _, count, _ in entries)
    assert table.frequency(entries[0][0]) == Fraction(1, 2)


def test_path_spectrum_and_counting():
    spec = latids.nn_hopping(1)
    trivial = latids.trivial_colouring(1)
    mat, sites = latids.assemble(spec, trivial, latids.Region.cube(1, 40))
    assert mat.shape == (40, 40)
    values, _ = latids.sym_eigen(mat)
    expect = sorted(2.0 * math.cos(k * math.pi / 41.0) for k in range(1, 41))
    assert np.allclose(values, expect, atol=1e-10)

    n = latids.counting_function(list(values))
    assert n.total() == 40.0
    assert n(0.0) == 20.0


def test_sup_distance_and_jumps():
    f = latids.counting_function([0.0, 2.0]).scaled(0.5)
    g = latids.counting_function([1.0])
    assert latids.sup_distance(f, g) == 0.5
    found = latids.jumps(latids.counting_function([0.0, 0.0, 1.0]).scaled(1 / 3), 0.5)
    assert found == [(0.0, pytest.approx(2 / 3))]


def test_matrix_text():
    mat, _ = latids.assemble(latids.nn_hopping(1), latids.trivial_colouring(1),
                             latids.Region.cube(1, 2))
    assert latids.matrix_text(mat) == "0 1\n1 0\n"


def test_ids_pipeline_with_certificates():
    trivial = latids.trivial_colouring(1)
    spec = latids.nn_hopping(1)
    q = latids.Region.cube(1, 64)
    ref = latids.closed_form_periodic_reference(trivial, 1, 8)
    assert ref.nu_total() == Fraction(1)

    fv = latids.finite_volume_ids(spec, trivial, q)
    assert fv.ids.total() == 1.0
    approx = latids.pattern_ids(spec, trivial, 8, ref)
    measured = latids.sup_distance(fv.ids, approx)
    assert measured <= latids.ids_error_bound(spec, trivial, q, 8, ref)

    report = latids.ids_average_report(spec, trivial, q, 8, ref)
    assert report["certificate_ok"]
    assert report["delta"] <= report["bound_total"]

    full, pattern = latids.periodic_bounds(1, 1, 1, 64, 4)
    assert full == pytest.approx(10.5625)
    assert pattern == pytest.approx(4.0)


def test_percolation_zero_mode():
    tokens = [("open", 0.0), ("closed", math.inf)]
    perc = latids.percolation_colouring(2, tokens, [0.7, 0.3], 42)
    spec = latids.anderson_percolation(latids.nn_hopping(2), [0.0, math.inf])
    q = latids.Region.cube(2, 16)
    found = latids.find_compact_eigenfunction(spec, perc, 0.0, q, 1e-8)
    assert found is not None
    _, residual, _ = found
    assert residual <= 1e-12

    tested, violations = latids.check_invariance(spec, perc, 100, 3)
    assert tested > 0
    assert violations == 0


def test_errors_are_python_exceptions():
    with pytest.raises(ValueError):
        latids.Region.cube(1, 0)
    trivial = latids.trivial_colouring(1)
    with pytest.raises(ValueError):
        latids.pattern_ids(latids.nn_hopping(1), trivial, 2,
                           latids.closed_form_periodic_reference(trivial, 1, 2))
