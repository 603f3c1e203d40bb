from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from troplag.errors import InputError
from troplag.polyhedral import LatticePolytope, LiftingFunction, regular_subdivision
from troplag.tropical import (AffineFrame, TropicalLine, adapted_frame, balancing_check,
                              is_smooth, load_curve_json, tangent_line,
                              tropical_hypersurface)


def triangle_curve():
    P = LatticePolytope.from_points([(0, 0), (1, 2), (2, 1)])
    S = regular_subdivision(P, {(0, 0): 1, (1, 1): 0, (2, 1): 0, (1, 2): 0})
    return tropical_hypersurface(S)


def standard_line():
    P = LatticePolytope.from_points([(0, 0), (1, 0), (0, 1)])
    return tropical_hypersurface(regular_subdivision(P, LiftingFunction.constant(P)))


def F2(a, b):
    return (Fraction(a), Fraction(b))


def test_triangle_curve_vertices_edges_rays():
    X = triangle_curve()
    assert sorted(X.vertices) == [F2(0, 0), F2(0, 1), F2(1, 0)]
    segs = sorted(tuple(sorted(e.verts)) for e in X.bounded_edges())
    # the cycle edge joining (0,1) and (1,0) is part of the corner locus too
    assert segs == [
        (F2(0, 0), F2(0, 1)),
        (F2(0, 0), F2(1, 0)),
        (F2(0, 1), F2(1, 0)),
    ]
    rays = sorted((tuple(e.verts[0]), e.rays[0]) for e in X.unbounded_edges())
    assert rays == [
        (F2(0, 0), (-1, -1)),
        (F2(0, 1), (-1, 2)),
        (F2(1, 0), (2, -1)),
    ]
    assert all(e.weight == 1 for e in X.edges)


def test_standard_line():
    X = standard_line()
    assert X.vertices == [F2(0, 0)]
    assert sorted(e.rays[0] for e in X.edges) == [(-1, -1), (0, 1), (1, 0)]


def test_weight2_segment_gives_double_line():
    P = LatticePolytope.from_points([(0, 0), (2, 0)])
    S = regular_subdivision(P, LiftingFunction({(0, 0): 0, (1, 0): 0, (2, 0): 0}))
    X = tropical_hypersurface(S)
    assert X.vertices == []
    (e,) = X.edges
    assert e.kind == "line" and e.weight == 2
    assert sorted(e.rays) == [(0, -1), (0, 1)]


def test_smoothness():
    assert is_smooth(triangle_curve())
    P = LatticePolytope.from_points([(0, 0), (2, 0)])
    X2 = tropical_hypersurface(regular_subdivision(P, LiftingFunction.constant(P)))
    assert not is_smooth(X2)
    star = load_curve_json({"vertices": [[0, 0]], "edges": [],
                            "rays": [[0, [1, 1]], [0, [-2, 1]], [0, [1, -2]]]})
    assert not is_smooth(star)  # |det[(1,1),(-2,1)]| = 3


def test_balancing():
    assert balancing_check(standard_line())
    star = load_curve_json({"vertices": [[0, 0]], "edges": [],
                            "rays": [[0, [1, 1]], [0, [-2, 1]], [0, [1, -2]]]})
    assert balancing_check(star)
    bad = {"vertices": [[0, 0]], "edges": [],
           "rays": [[0, [1, 0]], [0, [0, 1]], [0, [-1, -1]]],
           "weights": [1, 1, 2]}
    with pytest.raises(InputError):
        load_curve_json(bad)  # balancing is checked on load


def test_tangent_lines_of_triangle_curve():
    X = triangle_curve()
    L0 = tangent_line(X, (0, 0))
    assert sorted(L0.generators) == [(-1, -1), (0, 1), (1, 0)]
    L1 = tangent_line(X, (1, 0))
    assert sorted(L1.generators) == [(-1, 0), (-1, 1), (2, -1)]
    with pytest.raises(InputError):
        tangent_line(X, (5, 5))


def test_tangent_line_of_line_is_itself():
    X = standard_line()
    L = tangent_line(X, (0, 0))
    assert sorted(L.generators) == sorted(e.rays[0] for e in X.edges)
    assert balancing_check(L.as_complex())


def test_adapted_frame_deterministic_rule():
    # u0 is the lexicographically smallest generator, the rest follow in
    # lexicographic order and are sent to the standard basis
    X = standard_line()
    frame, (u0, u1, u2) = adapted_frame(tangent_line(X, (0, 0)))
    assert (u0, u1, u2) == ((-1, -1), (0, 1), (1, 0))
    assert frame.A == ((0, 1), (1, 0))
    L1 = tangent_line(triangle_curve(), (1, 0))
    frame1, (v0, v1, v2) = adapted_frame(L1)
    assert (v0, v1, v2) == ((-1, 0), (-1, 1), (2, -1))
    assert frame1.A == ((1, 2), (1, 1))
    assert frame1.apply_linear(v1) == (1, 0)
    assert frame1.apply_linear(v2) == (0, 1)
    assert frame1.apply_linear(v0) == (-1, -1)


def test_adapted_frame_invariants():
    for v in [(0, 0), (1, 0), (0, 1)]:
        L = tangent_line(triangle_curve(), v)
        frame, labels = adapted_frame(L)
        assert abs(frame.det) == 1
        # conjugation sends the line exactly to the standard line
        images = sorted(frame.apply_linear(g) for g in L.generators)
        assert images == [(-1, -1), (0, 1), (1, 0)]
        # frame round trip
        for x in [(0, 0), (3, -2), (Fraction(1, 3), Fraction(7, 5))]:
            assert frame.compose_inverse_check(x)


def test_adapted_frame_rejects_nonsmooth():
    L = TropicalLine((0, 0), ((1, 1), (-2, 1), (1, -2)))
    with pytest.raises(InputError):
        adapted_frame(L)


def test_duality_round_trip():
    X = triangle_curve()
    for cell in X.cells:
        face = X.dual_cell(cell)
        back = X.curve_cell_of(face)
        assert back.dual_key == cell.dual_key
        assert back.verts == cell.verts


def test_direct_input_round_trip():
    data = {"vertices": [["1/2", "1/2"]], "edges": [],
            "rays": [[0, [1, 0]], [0, [0, 1]], [0, [-1, -1]]]}
    X = load_curve_json(data)
    assert X.vertices == [(Fraction(1, 2), Fraction(1, 2))]
    assert balancing_check(X)
    assert is_smooth(X)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=4, max_size=4))
def test_curves_from_lifts_are_balanced(vals):
    P = LatticePolytope.from_points([(0, 0), (1, 2), (2, 1)])
    nu = LiftingFunction(dict(zip(P.lattice_points, vals)))
    X = tropical_hypersurface(regular_subdivision(P, nu))
    assert balancing_check(X)


def test_every_smooth_vertex_is_trivalent_unimodular():
    X = triangle_curve()
    for v in X.vertices:
        star = X.edges_at(v)
        assert len(star) == 3
        dirs = [X.outgoing_direction(e, v) for e in star]
        for i in range(3):
            for j in range(i + 1, 3):
                d = dirs[i][0] * dirs[j][1] - dirs[i][1] * dirs[j][0]
                assert abs(d) == 1


def test_tangent_line_output_balances():
    X = triangle_curve()
    for v in X.vertices:
        assert tangent_line(X, v).is_balanced()
