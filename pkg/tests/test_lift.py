import json
import math

import numpy as np
import pytest

from troplag.coamoeba import PI
from troplag.errors import ConfigurationError, InputError
from troplag.fixtures import load_fixture
from troplag.lift import (Cutoff, GluingSchedule, LegSchedule, TwistData,
                          default_schedule, exactness_check, flat_loop,
                          hausdorff_distance, maslov_winding, pants_basis_loop,
                          phase_values, pl_lift, smooth_lift, symplectic_residual,
                          twist, twist_pl_cloud, validate_schedule)
from troplag.polyhedral import LatticePolytope, LiftingFunction, regular_subdivision
from troplag.tropical import load_curve_json, tropical_hypersurface


def standard_line():
    return load_fixture("standard_line")["curve"]


def triangle_curve():
    return load_fixture("triangle")["curve"]


# ---------------------------------------------------------------------------
# PL lifts

def test_pl_lift_standard_line_topology():
    pl = pl_lift(standard_line())
    kinds = sorted(p.kind for p in pl.pieces)
    assert kinds == ["edge", "edge", "edge", "vertex"]
    assert pl.euler_characteristic() == -1
    assert pl.punctures() == 3
    assert pl.genus() == 0  # three-punctured sphere


def test_pl_lift_triangle_topology():
    # the corner locus of the triangle example carries a cycle: six edges,
    # three pants fibers, genus one with three punctures
    pl = pl_lift(triangle_curve())
    assert sum(1 for p in pl.pieces if p.kind == "edge") == 6
    assert sum(1 for p in pl.pieces if p.kind == "vertex") == 3
    assert pl.euler_characteristic() == -3
    assert pl.punctures() == 3
    assert pl.genus() == 1


def test_pl_lift_weight2_edge_has_two_circles():
    P = LatticePolytope.from_points([(0, 0), (2, 0)])
    X = tropical_hypersurface(regular_subdivision(P, LiftingFunction.constant(P)))
    pl = pl_lift(X)
    (piece,) = [p for p in pl.pieces if p.kind == "edge"]
    assert piece.fiber.w == 2
    circles = piece.fiber.circles()
    assert len(circles) == 2
    offsets = sorted(float(b @ np.array(piece.fiber.u)) for b, _ in circles)
    assert np.allclose(np.diff(offsets), PI / 2)


def test_pl_lift_needs_duality():
    X = load_curve_json({"vertices": [[0, 0]], "edges": [],
                         "rays": [[0, [1, 0]], [0, [0, 1]], [0, [-1, -1]]]})
    with pytest.raises(InputError):
        pl_lift(X)


def test_pl_sample_cloud_shape():
    cloud = pl_lift(standard_line()).sample(16)
    assert cloud.shape[1] == 4
    assert np.isfinite(cloud).all()


# ---------------------------------------------------------------------------
# schedules

def test_default_schedule_valid_and_serializable():
    X = triangle_curve()
    sched = default_schedule(X)
    assert validate_schedule(X, sched)
    text = sched.to_json()
    back = GluingSchedule.from_json(text)
    assert back.to_json() == text
    for (vi, j), ls in sched.legs.items():
        assert 0 < ls.r_prime < ls.r_second < ls.r_bar < ls.r <= sched.ball_radius[vi]


def test_schedule_violations_raise():
    X = triangle_curve()
    sched = default_schedule(X)
    bad = GluingSchedule(dict(sched.ball_radius), dict(sched.lam),
                         dict(sched.legs), sched.truncation)
    bad.legs[(0, 0)] = LegSchedule(0.3, 0.2, 0.35, 0.4)
    with pytest.raises(ConfigurationError):
        validate_schedule(X, bad)
    bad2 = GluingSchedule({k: 10.0 for k in sched.ball_radius}, dict(sched.lam),
                          {k: LegSchedule(5.0, 6.5, 8.0, 9.5) for k in sched.legs},
                          sched.truncation)
    with pytest.raises(ConfigurationError):
        validate_schedule(X, bad2)
    # oversized pants scale breaks the ball bound
    bad3 = GluingSchedule(dict(sched.ball_radius), {k: 5.0 for k in sched.lam},
                          dict(sched.legs), sched.truncation)
    with pytest.raises(ConfigurationError):
        validate_schedule(X, bad3)


def test_cutoff_profile():
    c = Cutoff(1.0, 2.0)
    assert c.eta(0.9) == 1.0 and c.eta(1.0) == 1.0
    assert c.eta(2.0) == pytest.approx(0.0, abs=1e-14)
    s = np.linspace(1.0, 2.0, 101)
    vals = c.eta(s)
    assert np.all(np.diff(vals) <= 1e-15)
    # first and second derivatives consistent with finite differences
    mid = np.array([1.3, 1.5, 1.8])
    fd = (c.eta(mid + 1e-6) - c.eta(mid - 1e-6)) / 2e-6
    assert np.abs(fd - c.eta_prime(mid)).max() < 1e-6
    fd2 = (c.eta_prime(mid + 1e-6) - c.eta_prime(mid - 1e-6)) / 2e-6
    assert np.abs(fd2 - c.eta_second(mid)).max() < 1e-5


# ---------------------------------------------------------------------------
# smooth lifts

@pytest.fixture(scope="module")
def line_mesh():
    X = standard_line()
    sched = default_schedule(X)
    return X, sched, smooth_lift(X, 1.0, sched, resolution=32)


def test_smooth_lift_piece_residuals(line_mesh):
    X, sched, mesh = line_mesh
    for piece in mesh.pieces:
        v, w = piece.frames[:, 0, :], piece.frames[:, 1, :]
        om = (np.sum(v[:, :2] * w[:, 2:], axis=1)
              - np.sum(w[:, :2] * v[:, 2:], axis=1)) / PI
        worst = np.abs(om).max() if len(om) else 0.0
        if piece.tag == "flat":
            assert worst == 0.0
        elif piece.tag == "collar":
            assert worst < 1e-6
        else:
            assert worst < 1e-6
    assert symplectic_residual(mesh) < 1e-6


def test_pants_interior_frames_are_exact(line_mesh):
    # the analytic (Hessian) frames annihilate the form to rounding
    X, sched, mesh = line_mesh
    from troplag.lift import LocalModel, _pants_vertex_piece
    model = LocalModel(X, X.vertices[0])
    legs_lat = {j: tuple(getattr(sched.legs[(0, j)], f) / model.leg_norm[j]
                         for f in ("r_prime", "r_second", "r_bar", "r"))
                for j in range(3)}
    from troplag.pants import PantsMap
    pm = PantsMap(1, sched.lam[0])
    res = 24
    grid = (np.arange(res) + 0.5) / res
    l1, l2 = np.meshgrid(grid, grid)
    keep = (l1 + l2) < 1.0 - 1e-9
    ys = np.stack([l1[keep], l2[keep]], axis=1) * (PI / 2)
    H = pm.hessian(ys)
    om = (H[:, 0, 1] - H[:, 1, 0]) / PI
    assert np.abs(om).max() < 1e-9


def test_overlap_identity_collar_equals_pants():
    X = standard_line()
    sched = default_schedule(X)
    from troplag.lift import LocalModel
    from troplag.pants import PantsMap, ProjectionPair
    model = LocalModel(X, X.vertices[0])
    lam = sched.lam[0]
    pm = PantsMap(1, lam)
    pp = ProjectionPair(pm, frozenset({1}), 0)
    ls = sched.legs[(0, 1)]
    worst = 0.0
    for s in np.linspace(ls.r_prime, ls.r_second, 6):
        for th in np.linspace(0.25, 1.25, 5):
            q = pp.fiber_solve(np.array([s, 0.0]), np.array([0.0, th]))
            hq = pm.h(q)
            pants_pt = np.concatenate([model.x_ambient(hq[None, :])[0],
                                       model.y_ambient(q[None, :])[0]])
            collar_x = model.x_ambient(np.array([[s, hq[1]]]))[0]
            collar_y = model.y_ambient(np.array([[q[0], th]]))[0]
            worst = max(worst, np.abs(pants_pt - np.concatenate([collar_x, collar_y])).max())
    assert worst < 1e-8


def test_flat_zone_is_exactly_flat(line_mesh):
    X, sched, mesh = line_mesh
    for piece in mesh.piece("flat"):
        assert np.all(piece.frames[:, 0, 2:] == 0.0)
        assert np.all(piece.frames[:, 1, :2] == 0.0)
        # base points lie on the edge line through the vertex
        e = X.edges[piece.owner[0]]
        d = np.array(e.rays[0], dtype=float)
        base = np.array([float(c) for c in e.verts[0]])
        rel = piece.points[:, :2] - base
        cross = rel[:, 0] * d[1] - rel[:, 1] * d[0]
        assert np.abs(cross).max() < 1e-12


def test_mesh_projects_into_region(line_mesh):
    # at full scale the base projection stays inside the unscaled region
    X, sched, mesh = line_mesh
    from troplag.pants import PantsMap
    from troplag.lift import LocalModel
    model = LocalModel(X, X.vertices[0])
    pm = PantsMap(1, 1.0)
    x_std = (mesh.points[:, :2] - model.v) @ np.linalg.inv(model.B.T)
    slack = pm.region_slack(x_std)
    assert slack.min() >= -1e-9


def test_projection_containment(line_mesh):
    X, sched, mesh = line_mesh
    R = sched.ball_radius[0]
    v = np.array([0.0, 0.0])
    for piece in mesh.piece("pants"):
        d = np.linalg.norm(piece.points[:, :2] - v, axis=1)
        assert d.max() <= R + 1e-9
    # the whole mesh projects into the union of the ball and leg tubes
    for piece in mesh.pieces:
        x = piece.points[:, :2]
        dist_v = np.linalg.norm(x - v, axis=1)
        tube = np.full(len(x), np.inf)
        for e in X.edges:
            dd = np.array(e.rays[0], dtype=float)
            dd = dd / np.linalg.norm(dd)
            t = x @ dd
            perp = np.abs(x @ np.array([-dd[1], dd[0]]))
            on_ray = t >= -1e-9
            tube = np.where(on_ray, np.minimum(tube, perp), tube)
        assert np.all((dist_v <= R + 1e-9) | (tube <= 0.30 * R + 1e-9))


def test_hausdorff_decreases_with_slope():
    X = triangle_curve()
    sched = default_schedule(X)
    cloud_pl = pl_lift(X).sample(32)
    ds = []
    for t in (1.0, 0.5, 0.1):
        mesh = smooth_lift(X, t, sched, resolution=32)
        ds.append(hausdorff_distance(mesh.points, cloud_pl))
    assert ds[0] > ds[1] > ds[2]
    slope = math.log(ds[0] / ds[2]) / math.log(10.0)
    assert slope >= 0.8


def test_hausdorff_edge_cases():
    cloud = np.random.default_rng(0).uniform(0, 1, (50, 4))
    assert hausdorff_distance(cloud, cloud) == 0.0
    with pytest.raises(InputError):
        hausdorff_distance(cloud, np.zeros((0, 4)))
    # torus wrap: clouds differing by a deck translate coincide
    shifted = cloud.copy()
    shifted[:, 2] += PI
    assert hausdorff_distance(cloud, shifted) < 1e-12


def test_smooth_lift_validations():
    X = standard_line()
    with pytest.raises(InputError):
        smooth_lift(X, 0.0)
    P = LatticePolytope.from_points([(0, 0), (2, 0)])
    Xw = tropical_hypersurface(regular_subdivision(P, LiftingFunction.constant(P)))
    with pytest.raises(InputError):
        smooth_lift(Xw, 1.0)


def test_collar_analytic_frames_match_fd(line_mesh):
    # the closed-form frames of the collar graph agree with centered
    # differences of its positions, including through the cutoff ramp
    X, sched, _ = line_mesh
    from troplag.lift import Cutoff, LocalModel, _collar_sheet
    model = LocalModel(X, X.vertices[0])
    lam = sched.lam[0]
    for j in (0, 1, 2):
        ls = sched.legs[(0, j)]
        scale = model.leg_norm[j]
        cutoff = Cutoff(ls.r_second / scale, ls.r_bar / scale)
        rng = np.random.default_rng(j)
        S = rng.uniform(ls.r_prime / scale, ls.r / scale, 40)
        T = rng.uniform(0.1, PI - 0.1, 40)
        P0, fr = _collar_sheet(model, j, lam, cutoff, S, T, reduce_torus=False)
        h = 1e-6
        Ps = _collar_sheet(model, j, lam, cutoff, S + h, T, reduce_torus=False)[0]
        Ms = _collar_sheet(model, j, lam, cutoff, S - h, T, reduce_torus=False)[0]
        Pt = _collar_sheet(model, j, lam, cutoff, S, T + h, reduce_torus=False)[0]
        Mt = _collar_sheet(model, j, lam, cutoff, S, T - h, reduce_torus=False)[0]
        fd_s = (Ps - Ms) / (2 * h)
        fd_t = (Pt - Mt) / (2 * h)
        scale_s = 1 + np.abs(fr[:, 0, :]).max()
        scale_t = 1 + np.abs(fr[:, 1, :]).max()
        assert np.abs(fd_s - fr[:, 0, :]).max() < 1e-5 * scale_s
        assert np.abs(fd_t - fr[:, 1, :]).max() < 1e-5 * scale_t


def test_residual_scales_with_fd_step(line_mesh):
    # recompute frames of a collar piece by finite differences of the grid
    # positions at two spacings: the self-consistency residual must shrink
    # at least linearly, confirming the underlying surface is isotropic
    X, sched, _ = line_mesh
    residuals = []
    for res in (24, 48):
        mesh = smooth_lift(X, 1.0, sched, resolution=res)
        piece = mesh.piece("collar")[0]
        nu, nv = piece.grid
        pts = piece.points.reshape(nu, nv, 4)
        vs = (pts[2:, 1:-1] - pts[:-2, 1:-1])
        vt = (pts[1:-1, 2:] - pts[1:-1, :-2])
        om = (np.sum(vs[..., :2] * vt[..., 2:], axis=-1)
              - np.sum(vt[..., :2] * vs[..., 2:], axis=-1)) / PI
        residuals.append(np.abs(om).max())
    assert residuals[1] < residuals[0] / 1.8


# ---------------------------------------------------------------------------
# twisting

def test_twist_identity_and_classes():
    X = triangle_curve()
    sched = default_schedule(X)
    mesh = smooth_lift(X, 0.5, sched, resolution=16)
    t0, n0 = twist(mesh, TwistData({}))
    assert n0 == 0
    assert np.array_equal(t0.points, mesh.points)
    t1, n1 = twist(mesh, TwistData({3: 1}))
    assert n1 == 1
    assert np.array_equal(t1.points[:, :2], mesh.points[:, :2])  # base preserved
    assert not np.allclose(t1.points, mesh.points)
    t2, n2 = twist(mesh, TwistData({3: 1, 4: -1}))
    assert n2 == 0
    assert not np.allclose(t2.points, mesh.points)
    assert symplectic_residual(t1) < 1e-6


def test_twist_requires_valid_edge():
    X = triangle_curve()
    mesh = smooth_lift(X, 0.5, resolution=16)
    with pytest.raises(InputError):
        twist(mesh, TwistData({99: 1}))


def test_twist_pl_cloud():
    X = triangle_curve()
    pl = pl_lift(X)
    c0 = twist_pl_cloud(pl, TwistData({}), resolution=12)
    c1 = twist_pl_cloud(pl, TwistData({0: 1}), resolution=12)
    assert c0.shape == c1.shape
    assert np.array_equal(c0[:, :2], c1[:, :2])
    assert not np.allclose(c0, c1)


# ---------------------------------------------------------------------------
# exactness

def test_exactness_examples():
    assert exactness_check(standard_line())["exact"]
    res = exactness_check(triangle_curve())
    assert not res["exact"]
    X = triangle_curve()
    found = None
    for i, e in enumerate(X.edges):
        u = e.direction()
        if u[0] * 1 + u[1] * 2 == 0:  # tangent orthogonal to (1, 2)
            found = res["constants"][i]
    assert found == 1
    assert exactness_check(load_fixture("fourvalent_vertex")["curve"])["exact"]
    assert exactness_check(load_fixture("genus1_vertex")["curve"])["exact"]


# ---------------------------------------------------------------------------
# Maslov phase

def test_flat_loop_phase_constant_half():
    pts, fr = flat_loop((2.0, 0.0), (0, 1), 512)
    theta = np.angle(phase_values(pts, fr)) / PI
    assert np.allclose(np.abs(theta), 0.5)
    assert maslov_winding(pts, fr) == 0


def test_pants_basis_loops_wind_zero():
    for leg in (1, 2):
        pts, fr = pants_basis_loop(0.4, leg, 0.3, resolution=1024)
        assert maslov_winding(pts, fr) == 0


def test_collar_loops_wind_zero():
    # fiber loops across the whole collar, including the cutoff ramp where
    # the tangent plane rotates fastest, have vanishing phase winding
    X = standard_line()
    sched = default_schedule(X)
    from troplag.lift import Cutoff, LocalModel, _collar_sheet
    model = LocalModel(X, X.vertices[0])
    for j in (0, 1, 2):
        ls = sched.legs[(0, j)]
        scale = model.leg_norm[j]
        cutoff = Cutoff(ls.r_second / scale, ls.r_bar / scale)
        for frac in (0.0, 0.35, 0.5, 0.65, 1.0):
            s = (ls.r_prime + frac * (ls.r - ls.r_prime)) / scale
            T = (np.arange(1024) + 0.5) * PI / 1024
            pts, fr = _collar_sheet(model, j, sched.lam[0], cutoff,
                                    np.full(1024, s), T)
            assert maslov_winding(pts, fr) == 0


def test_maslov_winding_rejects_sparse_loops():
    from troplag.errors import NumericError
    X = standard_line()
    sched = default_schedule(X)
    mesh = smooth_lift(X, 1.0, sched, resolution=32)
    piece = mesh.piece("collar")[0]
    nu, nv = piece.grid
    pts = piece.points.reshape(nu, nv, 4)[nu // 2]
    fr = piece.frames.reshape(nu, nv, 2, 4)[nu // 2]
    with pytest.raises(NumericError):
        maslov_winding(pts, fr)  # 32 samples alias on the cutoff ramp


# ---------------------------------------------------------------------------
# export

def test_mesh_export_off_obj(tmp_path):
    X = standard_line()
    mesh = smooth_lift(X, 0.5, resolution=12)
    off = tmp_path / "m.off"
    obj = tmp_path / "m.obj"
    mesh.to_off(str(off))
    mesh.to_obj(str(obj), projection="xyy")
    lines = off.read_text().splitlines()
    assert lines[0] == "OFF"
    nv, nf, _ = (int(x) for x in lines[1].split())
    assert nv == len(mesh.points)
    assert nf > 0
    face = lines[2 + nv].split()
    assert face[0] == "4"
    assert all(0 <= int(i) < nv for i in face[1:])
    assert obj.read_text().startswith("v ")
    with pytest.raises(InputError):
        mesh.to_off(str(off), projection="zzz")
