import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from troplag.errors import DegeneracyError, InputError
from troplag.polyhedral import (LatticePolytope, LiftingFunction, discrete_legendre,
                                dot, is_unimodal, load_polytope_json,
                                regular_subdivision, vsub)

TRIANGLE = LatticePolytope.from_points([(0, 0), (1, 2), (2, 1)])
TRIANGLE_NU = LiftingFunction({(0, 0): 1, (1, 1): 0, (2, 1): 0, (1, 2): 0})
SIMPLEX = LatticePolytope.from_points([(0, 0), (1, 0), (0, 1)])


def cells_as_sets(S):
    return sorted(sorted(c.vertices) for c in S.cells)


def test_triangle_subdivision_is_the_three_triangles():
    S = regular_subdivision(TRIANGLE, TRIANGLE_NU)
    assert cells_as_sets(S) == [
        [(0, 0), (1, 1), (1, 2)],
        [(0, 0), (1, 1), (2, 1)],
        [(1, 1), (1, 2), (2, 1)],
    ]


def test_constant_lift_gives_single_cell():
    S = regular_subdivision(SIMPLEX, LiftingFunction.constant(SIMPLEX))
    assert cells_as_sets(S) == [[(0, 0), (0, 1), (1, 0)]]


def test_segment_with_broken_lift_gives_two_unit_cells():
    P = LatticePolytope.from_points([(0, 0), (2, 0)])
    S = regular_subdivision(P, {(0, 0): 0, (2, 0): 0, (1, 0): -1})
    assert cells_as_sets(S) == [[(0, 0), (1, 0)], [(1, 0), (2, 0)]]


def test_missing_lifting_value_is_input_error():
    with pytest.raises(InputError):
        regular_subdivision(TRIANGLE, LiftingFunction({(0, 0): 1}))


def test_point_polytope_is_degenerate():
    with pytest.raises(DegeneracyError):
        regular_subdivision(LatticePolytope.from_points([(1, 1)]),
                            LiftingFunction({(1, 1): 0}))


def test_non_integral_lifting_rejected():
    with pytest.raises(InputError):
        LiftingFunction({(0, 0): 0.5})


def test_unimodality():
    assert is_unimodal(regular_subdivision(TRIANGLE, TRIANGLE_NU))
    assert is_unimodal(regular_subdivision(SIMPLEX, LiftingFunction.constant(SIMPLEX)))
    big = LatticePolytope.from_points([(0, 0), (2, 1), (1, 2)])
    assert not is_unimodal(regular_subdivision(big, LiftingFunction.constant(big)))


def test_discrete_legendre_pieces_triangle():
    S = regular_subdivision(TRIANGLE, TRIANGLE_NU)
    pa = discrete_legendre(S)
    assert sorted(pa.pieces) == [((0, 0), 1), ((1, 1), 0), ((1, 2), 0), ((2, 1), 0)]
    assert pa.value((5, 7)) == min(1, 5 + 7, 10 + 7, 5 + 14)
    assert pa.value((-3, -4)) == min(1, -7, -10, -11)


def test_discrete_legendre_standard_simplex():
    S = regular_subdivision(SIMPLEX, LiftingFunction.constant(SIMPLEX))
    pa = discrete_legendre(S)
    assert sorted(pa.pieces) == [((0, 0), 0), ((0, 1), 0), ((1, 0), 0)]
    assert pa.value((2, 3)) == 0
    assert pa.value((-1, 5)) == -1


def test_constant_shift_keeps_argmin_structure():
    S0 = regular_subdivision(SIMPLEX, LiftingFunction.constant(SIMPLEX, 0))
    S5 = regular_subdivision(SIMPLEX, LiftingFunction.constant(SIMPLEX, 5))
    pa0, pa5 = discrete_legendre(S0), discrete_legendre(S5)
    for m in [(0, 0), (3, -2), (-1, -1), (7, 7)]:
        assert pa5.value(m) == pa0.value(m) + 5
        assert sorted(pa5.argmin(m)) == sorted(pa0.argmin(m))


def _brute_force_min(poly, nu, m):
    return min(dot(v, m) + nu(v) for v in poly.lattice_points)


def test_lower_hull_matches_brute_force_on_grid():
    S = regular_subdivision(TRIANGLE, TRIANGLE_NU)
    pa = discrete_legendre(S)
    count = 0
    for a in range(-36, 36):
        for b in range(-36, 36):
            for den in (1, 3):
                m = (Fraction(a, den), Fraction(b, den))
                assert pa.value(m) == _brute_force_min(TRIANGLE, TRIANGLE_NU, m)
                count += 1
    assert count >= 10_000


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4),
       st.integers(0, 10**6))
def test_lower_hull_matches_brute_force_random_lifts(vals, probe_seed):
    pts = list(TRIANGLE.lattice_points)
    nu = LiftingFunction(dict(zip(pts, vals)))
    S = regular_subdivision(TRIANGLE, nu)
    pa = discrete_legendre(S)
    m = (Fraction(probe_seed % 101 - 50, 7), Fraction(probe_seed % 97 - 48, 5))
    assert pa.value(m) == _brute_force_min(TRIANGLE, nu, m)


def test_duality_dimensions_complementary():
    for S in (regular_subdivision(TRIANGLE, TRIANGLE_NU),
              regular_subdivision(LatticePolytope.from_points([(0, 0), (2, 0)]),
                                  LiftingFunction({(0, 0): 0, (1, 0): 0, (2, 0): 0}))):
        pa = discrete_legendre(S)
        for f in S.faces():
            assert f.dim + pa.dual_of(f).dim == 2


def test_dual_edge_lies_in_orthogonal_hyperplane():
    S = regular_subdivision(TRIANGLE, TRIANGLE_NU)
    pa = discrete_legendre(S)
    for f in S.faces(1):
        v1, v2 = f.vertices[0], f.vertices[-1]
        target = TRIANGLE_NU(v2) - TRIANGLE_NU(v1)
        dc = pa.dual_of(f)
        probes = list(dc.verts)
        if dc.rays:
            probes.append(tuple(Fraction(a) + 7 * r for a, r in zip(dc.verts[0], dc.rays[0])))
        probes.append(dc.sample_point())
        for m in probes:
            assert dot(vsub(v1, v2), m) == target


def test_cells_cover_polytope_lattice_points():
    S = regular_subdivision(TRIANGLE, TRIANGLE_NU)
    covered = set()
    for c in S.cells:
        covered.update(c.lattice_points)
    assert covered == set(TRIANGLE.lattice_points)


def test_pairwise_cell_intersections_are_faces():
    S = regular_subdivision(TRIANGLE, TRIANGLE_NU)
    for c1, c2 in itertools.combinations(S.cells, 2):
        common = set(c1.vertices) & set(c2.vertices)
        if len(common) == 2:
            a, b = sorted(common)
            assert frozenset({a, b}) in {f.key for f in S.faces(1)}


def test_json_loader_and_default_zero():
    data = {"vertices": [[0, 0], [1, 0], [0, 1]], "lifting": {"0,0": 0}}
    with pytest.raises(InputError):
        load_polytope_json(data)
    poly, nu = load_polytope_json(data, default_zero=True)
    assert nu((1, 0)) == 0 and nu((0, 0)) == 0
    with pytest.raises(InputError):
        load_polytope_json({"vertices": "nope"})


def test_vertices_are_extreme_points_only():
    P = LatticePolytope.from_points([(0, 0), (2, 0), (1, 0), (0, 2), (1, 1)])
    assert sorted(P.vertices) == [(0, 0), (0, 2), (2, 0)]
    assert (1, 1) in P.lattice_points
