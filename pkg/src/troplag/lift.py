"""Lifts of plane tropical curves.

PL lifts are unions of products (dual cell) x (cell coamoeba).  Smooth
lifts glue rescaled pairs of pants over the curve vertices to flat
cylinders over the edges through Legendre-transform collars; the gluing
schedule fixes ball radii, leg cut points and pants scales.  Verification
quantities (symplectic residual, Hausdorff distance, exactness constants,
Maslov winding) live here as well.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from .coamoeba import PI, EdgeFiber, edge_fiber_from_dual, reduce_mod_pi
from .errors import ConfigurationError, InputError, NumericError
from .pants import PantsMap, ProjectionPair
from .tropical import adapted_frame, tangent_line
from .polyhedral import primitive


# ---------------------------------------------------------------------------
# smooth cutoff profile

class BumpProfile:
    """C-infinity non-increasing 1 -> 0 transition on [0, 1].

    Normalized integral of exp(-1/(s(1-s))); the antiderivative is tabulated
    on 10^3 nodes and evaluated by cubic Hermite interpolation (the exact
    integrand supplies the derivatives), so eta is smooth to ~1e-12 while
    eta' and eta'' are closed-form.
    """

    _N = 1000

    def __init__(self):
        u = np.linspace(0.0, 1.0, self._N + 1)
        f = self._phi(u)
        F = np.zeros_like(u)
        # composite Simpson on each pair of intervals
        h = 1.0 / self._N
        mid = self._phi((u[:-1] + u[1:]) / 2)
        F[1:] = np.cumsum(h / 6.0 * (f[:-1] + 4.0 * mid + f[1:]))
        self._u = u
        self._F = F / F[-1]
        self._f = f / F[-1]
        self._Z = F[-1]

    @staticmethod
    def _phi(u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        inside = (u > 0) & (u < 1)
        ui = u[inside]
        out[inside] = np.exp(-1.0 / (ui * (1.0 - ui)))
        return out

    def psi(self, u):
        """Normalized antiderivative: 0 -> 1, C-infinity."""
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        i = np.clip((u * self._N).astype(int), 0, self._N - 1)
        h = 1.0 / self._N
        s = (u - self._u[i]) / h
        y0, y1 = self._F[i], self._F[i + 1]
        d0, d1 = self._f[i] * h, self._f[i + 1] * h
        h00 = 2 * s ** 3 - 3 * s ** 2 + 1
        h10 = s ** 3 - 2 * s ** 2 + s
        h01 = -2 * s ** 3 + 3 * s ** 2
        h11 = s ** 3 - s ** 2
        return h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1

    def psi_prime(self, u):
        return self._phi(u) / self._Z

    def psi_second(self, u):
        # psi'' = phi'/Z with phi' = phi * (1 - 2u) / (u(1-u))^2
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        inside = (u > 0) & (u < 1)
        ui = u[inside]
        out[inside] = self._phi(ui) * (1 - 2 * ui) / (ui * (1 - ui)) ** 2 / self._Z
        return out


_BUMP = BumpProfile()


class Cutoff:
    """eta on [r1, r2]: 1 at r1 decreasing smoothly to 0 at r2."""

    def __init__(self, r1, r2):
        if not r2 > r1:
            raise ConfigurationError("cutoff needs r1 < r2")
        self.r1, self.r2 = float(r1), float(r2)

    def _u(self, s):
        return (np.asarray(s, dtype=float) - self.r1) / (self.r2 - self.r1)

    def eta(self, s):
        return 1.0 - _BUMP.psi(self._u(s))

    def eta_prime(self, s):
        return -_BUMP.psi_prime(self._u(s)) / (self.r2 - self.r1)

    def eta_second(self, s):
        return -_BUMP.psi_second(self._u(s)) / (self.r2 - self.r1) ** 2


# ---------------------------------------------------------------------------
# vertex-local models

_STD_DIRS = {0: (-1, -1), 1: (1, 0), 2: (0, 1)}
_LEG_AUX = {0: 1, 1: 0, 2: 0}  # smallest admissible k_j per leg


class LocalModel:
    """Adapted coordinates of a smooth curve vertex.

    Base side x = v + B x_std, torus side y = y_c + A^T y_std (mod pi) with
    B = [u_1 u_2], A = B^{-1}, y_c = (pi/2) v_0 for the dual-cell vertex v_0
    shared by the subdivision edges dual to the legs u_1 and u_2.
    """

    def __init__(self, X, v):
        self.X = X
        self.v = np.array([float(c) for c in v])
        line = tangent_line(X, v)
        frame, (u0, u1, u2) = adapted_frame(line)
        self.frame = frame
        self.u = {0: u0, 1: u1, 2: u2}
        self.A = np.array(frame.A, dtype=float)
        self.B = np.linalg.inv(self.A)
        self.B_int = np.round(self.B).astype(int)
        # incident curve edges by leg label
        self.leg_edge = {}
        for e in X.edges_at(v):
            d = X.outgoing_direction(e, v)
            for j, uj in self.u.items():
                if tuple(d) == tuple(uj):
                    self.leg_edge[j] = e
        if len(self.leg_edge) != 3:
            raise InputError(f"vertex {v} has unmatched leg directions")
        # dual data: v0 = common vertex of the dual edges of legs 1 and 2
        f1 = X.dual_cell(self.leg_edge[1])
        f2 = X.dual_cell(self.leg_edge[2])
        common = set(f1.vertices) & set(f2.vertices)
        if len(common) != 1:
            raise InputError("dual edges of the two frame legs do not share a vertex")
        self.v0 = common.pop()
        self.y_c = np.array(self.v0, dtype=float) * PI / 2
        self.leg_norm = {j: float(np.hypot(*self.u[j])) for j in range(3)}

    def x_ambient(self, x_std):
        return self.v[None, :] + np.atleast_2d(x_std) @ self.B.T

    def y_ambient_raw(self, y_std):
        return self.y_c[None, :] + np.atleast_2d(y_std) @ self.A

    def y_ambient(self, y_std):
        return reduce_mod_pi(self.y_ambient_raw(y_std))

    def dx_ambient(self, dx_std):
        return np.atleast_2d(dx_std) @ self.B.T

    def dy_ambient(self, dy_std):
        return np.atleast_2d(dy_std) @ self.A

    @staticmethod
    def leg_coordinate(x_std, j):
        """Lattice coordinate along leg j of a standard-side point."""
        x_std = np.atleast_2d(x_std)
        if j == 1:
            return x_std[:, 0]
        if j == 2:
            return x_std[:, 1]
        return -x_std[:, 0]

    @staticmethod
    def to_working(j, x_std, y_std):
        """Map standard coordinates to leg-j working coordinates in which
        the leg is the first axis and the fiber circle the second torus
        coordinate; an involution."""
        x = np.atleast_2d(np.asarray(x_std, dtype=float))
        y = np.atleast_2d(np.asarray(y_std, dtype=float))
        if j == 1:
            return x.copy(), y.copy()
        if j == 2:
            return x[:, ::-1].copy(), y[:, ::-1].copy()
        # leg 0: conjugate by the vertex symmetry exchanging p_0 and p_1
        xw = np.stack([-x[:, 0], x[:, 1] - x[:, 0]], axis=1)
        yw = np.stack([PI / 2 - y.sum(axis=1), y[:, 1]], axis=1)
        return xw, yw

    from_working = to_working  # all three maps are involutions


# ---------------------------------------------------------------------------
# gluing schedule

@dataclass
class LegSchedule:
    r_prime: float
    r_second: float
    r_bar: float
    r: float

    def validate(self):
        if not (0 < self.r_prime < self.r_second < self.r_bar < self.r):
            raise ConfigurationError("leg parameters must satisfy r' < r'' < rbar < r")

    def as_dict(self):
        return {"r_prime": self.r_prime, "r_second": self.r_second,
                "r_bar": self.r_bar, "r": self.r}


@dataclass
class GluingSchedule:
    """Ball radii, pants scales and leg cut points for a smooth lift.

    Leg parameters are ambient arc lengths from the vertex along the leg;
    `legs[(vi, j)]` holds a LegSchedule for leg j at vertex index vi.
    """

    ball_radius: dict
    lam: dict
    legs: dict
    truncation: float

    def leg(self, vi, j):
        return self.legs[(vi, j)]

    def to_json(self):
        return json.dumps({
            "ball_radius": {str(k): v for k, v in self.ball_radius.items()},
            "lam": {str(k): v for k, v in self.lam.items()},
            "legs": {f"{vi},{j}": ls.as_dict() for (vi, j), ls in self.legs.items()},
            "truncation": self.truncation,
        }, indent=2, sort_keys=True)

    @staticmethod
    def from_json(text):
        d = json.loads(text)
        legs = {}
        for key, ls in d["legs"].items():
            vi, j = (int(p) for p in key.split(","))
            legs[(vi, j)] = LegSchedule(**ls)
        return GluingSchedule(
            {int(k): v for k, v in d["ball_radius"].items()},
            {int(k): v for k, v in d["lam"].items()},
            legs, d["truncation"])


def _leg_functional_std(x_std, j):
    return LocalModel.leg_coordinate(x_std, j)


def _s_boundary_cloud(lam, m=240):
    """Points of the three boundary surfaces S_k of the scaled region."""
    pm = PantsMap(1, lam)
    alphas = np.exp(np.linspace(np.log(5e-3), np.log(2e2), m))[:, None]
    x0 = np.atleast_2d(pm.h_chart(alphas, np.zeros(m)))
    from .coamoeba import rstar_apply
    pts = [x0, rstar_apply(1, 1, x0), rstar_apply(1, 2, x0)]
    return np.vstack(pts)


def _schedule_feasible(lam, model, legs_lat, ball_r):
    """Checks used by the lambda bisection: trimmed body inside 0.9 ball,
    arms slim enough to stay in their leg neighborhoods."""
    cloud = _s_boundary_cloud(lam)
    c = np.stack([_leg_functional_std(cloud, j) for j in range(3)], axis=1)
    rp = np.array([legs_lat[j][0] for j in range(3)])
    body = np.all(c <= rp[None, :], axis=1)
    amb = cloud @ model.B.T
    if np.any(np.linalg.norm(amb[body], axis=1) > 0.9 * ball_r):
        return False
    pm = PantsMap(1, lam)
    for j in range(3):
        arm = (c[:, j] >= rp[j]) & (c[:, j] <= legs_lat[j][3])
        if not np.any(arm):
            continue
        ok = pm.in_V({j}, cloud[arm], k=_LEG_AUX[j], tol=-1e-12)
        if not np.all(ok):
            return False
        if np.any(np.linalg.norm(amb[arm], axis=1) > ball_r):
            return False
    return True


def default_schedule(X, truncation=None, fractions=(0.5, 0.65, 0.8, 0.95),
                     ball_factor=0.45):
    """Schedule per the default policy: balls at 0.45 x min vertex distance,
    cut points at fixed fractions of the ball radius along each leg, pants
    scales by bisection so the trimmed region sits inside 0.9 x ball."""
    if X.subdivision is None:
        raise InputError("schedule needs a subdivision-backed curve")
    R = ball_factor * X.min_vertex_distance()
    if truncation is None:
        vs = np.array([[float(a) for a in v] for v in X.vertices])
        diam = 1.0
        if len(vs) > 1:
            diam = max(1.0, float(np.ptp(vs, axis=0).max()))
        truncation = 3.0 * diam
    ball_radius, lam, legs = {}, {}, {}
    for vi, v in enumerate(X.vertices):
        model = LocalModel(X, v)
        legs_lat = {}
        for j in range(3):
            scale = model.leg_norm[j]
            legs_lat[j] = tuple(f * R / scale for f in fractions)
            legs[(vi, j)] = LegSchedule(*(f * R for f in fractions))
        hi = 2.0 * min(legs_lat[j][0] for j in range(3))
        lo = hi * 1e-3
        if _schedule_feasible(hi, model, legs_lat, R):
            lam_v = hi
        else:
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                if _schedule_feasible(mid, model, legs_lat, R):
                    lo = mid
                else:
                    hi = mid
            lam_v = lo
        ball_radius[vi] = R
        lam[vi] = lam_v
    sched = GluingSchedule(ball_radius, lam, legs, truncation)
    validate_schedule(X, sched)
    return sched


def validate_schedule(X, sched):
    for (vi, j), ls in sched.legs.items():
        ls.validate()
        if ls.r > sched.ball_radius[vi]:
            raise ConfigurationError("leg cut points must stay inside the ball")
    # balls pairwise disjoint
    vs = [np.array([float(c) for c in v]) for v in X.vertices]
    for i in range(len(vs)):
        for k in range(i + 1, len(vs)):
            if np.linalg.norm(vs[i] - vs[k]) <= sched.ball_radius[i] + sched.ball_radius[k]:
                raise ConfigurationError("vertex balls are not pairwise disjoint")
    # bounded edges keep a flat middle segment
    for e in X.bounded_edges():
        a, b = (np.array([float(c) for c in p]) for p in e.verts)
        length = np.linalg.norm(b - a)
        ia = _vertex_index(X, e.verts[0])
        ib = _vertex_index(X, e.verts[1])
        ja = _leg_of_edge(X, ia, e)
        jb = _leg_of_edge(X, ib, e)
        if sched.legs[(ia, ja)].r + sched.legs[(ib, jb)].r >= length:
            raise ConfigurationError("leg cut points overlap on a bounded edge")
    # trimmed regions inside balls, at the scheduled scale
    for vi, v in enumerate(X.vertices):
        model = LocalModel(X, v)
        legs_lat = {j: tuple(getattr(sched.legs[(vi, j)], f) / model.leg_norm[j]
                             for f in ("r_prime", "r_second", "r_bar", "r"))
                    for j in range(3)}
        if not _schedule_feasible(sched.lam[vi], model, legs_lat, sched.ball_radius[vi]):
            raise ConfigurationError(f"pants scale at vertex {vi} violates the ball bound")
    return True


def _vertex_index(X, v):
    vv = tuple(v)
    for i, w in enumerate(X.vertices):
        if tuple(w) == vv:
            return i
    raise InputError("vertex not found")


def _leg_of_edge(X, vi, e):
    model = LocalModel(X, X.vertices[vi])
    for j, ec in model.leg_edge.items():
        if ec is e:
            return j
    raise InputError("edge is not incident to the vertex")


# ---------------------------------------------------------------------------
# PL lift

@dataclass
class PLPiece:
    kind: str            # "vertex" | "edge"
    cell: object         # TropCell of the curve
    fiber: object        # CellCoamoeba-like or EdgeFiber


class PLLift:
    """Union over curve cells of (cell) x (fiber coamoeba)."""

    def __init__(self, X, pieces):
        self.X = X
        self.pieces = pieces

    def sample(self, resolution=64, truncation=None):
        """Point cloud (x1, x2, y1, y2); rays truncated."""
        if truncation is None:
            truncation = 3.0 * max(1.0, _curve_diameter(self.X))
        pts = []
        for piece in self.pieces:
            if piece.kind == "edge":
                cell = piece.cell
                seg = _edge_param_points(cell, resolution, truncation)
                thetas = (np.arange(resolution) + 0.5) * PI / resolution
                for j in range(piece.fiber.w):
                    ys = piece.fiber.points(thetas, j)
                    for p in seg:
                        pts.append(np.concatenate(
                            [np.repeat(p[None, :], len(ys), axis=0), ys], axis=1))
            else:
                v = np.array([float(c) for c in piece.cell.verts[0]])
                ys = _coamoeba_cloud(piece.fiber, resolution)
                pts.append(np.concatenate(
                    [np.repeat(v[None, :], len(ys), axis=0), ys], axis=1))
        return np.vstack(pts)

    def euler_characteristic(self):
        """chi of the lift surface: each vertex contributes minus the
        normalized volume of its dual cell, cylinders contribute zero."""
        chi = 0
        for piece in self.pieces:
            if piece.kind == "vertex":
                dual = self.X.dual_cell(piece.cell)
                chi -= dual.poly.normalized_volume()
        return chi

    def punctures(self):
        return sum(e.weight for e in self.X.unbounded_edges())

    def genus(self):
        chi, p = self.euler_characteristic(), self.punctures()
        g2 = 2 - chi - p
        if g2 % 2:
            raise InputError("inconsistent Euler data")
        return g2 // 2


def _curve_diameter(X):
    vs = np.array([[float(a) for a in v] for v in X.vertices]) if X.vertices else np.zeros((1, 2))
    return float(np.ptp(vs, axis=0).max()) if len(vs) > 1 else 1.0


def _edge_param_points(cell, resolution, truncation):
    if cell.kind == "segment":
        a, b = (np.array([float(c) for c in p]) for p in cell.verts)
        ts = np.linspace(0.0, 1.0, resolution)
        return a[None, :] + ts[:, None] * (b - a)[None, :]
    base = np.array([float(c) for c in cell.verts[0]])
    d = np.array(cell.rays[0], dtype=float)
    tmax = truncation / np.linalg.norm(d)
    ts = np.linspace(0.0, 1.0, resolution) ** 1.0 * tmax
    pts = base[None, :] + ts[:, None] * d[None, :]
    if cell.kind == "line":
        pts = np.vstack([pts, base[None, :] - ts[1:, None] * d[None, :]])
    return pts


def _coamoeba_cloud(fiber, resolution):
    """Sample points of a 2-cell coamoeba (plus and minus halves)."""
    out = []
    if hasattr(fiber, "cell") and fiber.cell.dim == 2 and len(fiber.cell.vertices) == 3:
        v = np.array(fiber.cell.vertices, dtype=float) * PI / 2
        for i in range(resolution + 1):
            for k in range(resolution + 1 - i):
                l1, l2 = i / resolution, k / resolution
                p = v[0] + l1 * (v[1] - v[0]) + l2 * (v[2] - v[0])
                out.append(reduce_mod_pi(p))
                out.append(reduce_mod_pi(-p))
        return np.array(out)
    # covering or general fiber: rejection-sample the torus
    grid = np.linspace(0, PI, 4 * resolution, endpoint=False)
    yy = np.stack(np.meshgrid(grid, grid), axis=-1).reshape(-1, 2)
    keep = [i for i, y in enumerate(yy) if fiber.contains(y)]
    return yy[keep]


def pl_lift(X):
    """PL lift pieces for every curve cell of positive-dimensional dual.

    Vertex fibers are cell coamoebas for unimodular duals and pulled-back
    covering coamoebas for weighted trivalent vertices (whose fibers carry
    the parallel face copies the edge fibers must match).
    """
    if X.subdivision is None:
        raise InputError("missing duality data; build the curve from a subdivision")
    from .coamoeba import CellCoamoeba, covering_coamoeba
    pieces = []
    for e in X.edges:
        dual = X.dual_cell(e)
        pieces.append(PLPiece("edge", e, edge_fiber_from_dual(e, dual)))
    for v in X.vertices:
        key = X._vertex_dual[v]
        dual = X.subdivision.face(key)
        if dual.poly.is_elementary_simplex() or len(X.edges_at(v)) != 3:
            fiber = CellCoamoeba(dual.poly)
        else:
            fiber = covering_coamoeba(tangent_line(X, v))
        pieces.append(PLPiece("vertex", TropCellVertex(v, key), fiber))
    return PLLift(X, pieces)


@dataclass(frozen=True)
class TropCellVertex:
    point: tuple
    dual_key: frozenset

    kind = "vertex"

    @property
    def verts(self):
        return (self.point,)


# ---------------------------------------------------------------------------
# Lagrangian mesh

@dataclass
class MeshPiece:
    tag: str             # "pants" | "collar" | "flat"
    owner: tuple         # (vertex index,) or (vertex index, leg) or (edge index,)
    points: np.ndarray   # (N, 4): x1 x2 y1 y2
    frames: np.ndarray   # (N, 2, 4)
    grid: tuple = None   # grid shape for face export


class LagrangianMesh:
    def __init__(self, pieces, scale, schedule):
        self.pieces = pieces
        self.scale = scale
        self.schedule = schedule

    @property
    def points(self):
        return np.vstack([p.points for p in self.pieces])

    @property
    def frames(self):
        return np.vstack([p.frames for p in self.pieces])

    def piece(self, tag):
        return [p for p in self.pieces if p.tag == tag]

    def to_off(self, path, projection="xxy"):
        verts, faces = self._faces(projection)
        with open(path, "w") as fh:
            fh.write("OFF\n")
            fh.write(f"{len(verts)} {len(faces)} 0\n")
            for v in verts:
                fh.write(f"{v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
            for f in faces:
                fh.write("4 " + " ".join(str(i) for i in f) + "\n")

    def to_obj(self, path, projection="xxy"):
        verts, faces = self._faces(projection)
        with open(path, "w") as fh:
            for v in verts:
                fh.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
            for f in faces:
                fh.write("f " + " ".join(str(i + 1) for i in f) + "\n")

    _PROJ = {"xxy": (0, 1, 2), "xyy": (0, 2, 3), "x1y": (0, 2, 1), "x2y": (1, 2, 3)}

    def _faces(self, projection):
        cols = self._PROJ.get(projection)
        if cols is None:
            raise InputError(f"unknown projection {projection!r}")
        verts, faces = [], []
        offset = 0
        for p in self.pieces:
            verts.append(p.points[:, cols])
            if p.grid is not None:
                nu, nv = p.grid
                for i in range(nu - 1):
                    for j in range(nv - 1):
                        a = offset + i * nv + j
                        faces.append((a, a + 1, a + nv + 1, a + nv))
            offset += len(p.points)
        return np.vstack(verts), faces


# ---------------------------------------------------------------------------
# construction of the smooth lift

def _pants_vertex_piece(model, lam, legs_lat, resolution):
    """Sample the trimmed pants over one vertex, with tangent frames."""
    pm = PantsMap(1, lam)
    res = max(8, resolution)
    grid = (np.arange(res) + 0.5) / res
    l1, l2 = np.meshgrid(grid, grid)
    keep = (l1 + l2) < 1.0 - 1e-9
    bary = np.stack([l1[keep], l2[keep]], axis=1) * (PI / 2)
    y_all = np.vstack([bary, -bary])
    h_all = pm.h(y_all)
    c = np.stack([_leg_functional_std(h_all, j) for j in range(3)], axis=1)
    trims = np.array([legs_lat[j][1] for j in range(3)])  # trim at r''
    keep = np.all(c <= trims[None, :], axis=1)
    y_in = y_all[keep]
    h_in = h_all[keep]
    H = pm.hessian(y_in)
    P = np.concatenate([model.x_ambient(h_in), model.y_ambient(y_in)], axis=1)
    N = len(y_in)
    frames = np.empty((N, 2, 4))
    for i in range(2):
        e = np.zeros((1, 2))
        e[0, i] = 1.0
        frames[:, i, :2] = model.dx_ambient(H[:, :, i])
        frames[:, i, 2:] = np.repeat(model.dy_ambient(e), N, axis=0)
    chart_pts, chart_frames = _pants_chart_points(model, pm, legs_lat, resolution)
    if len(chart_pts):
        P = np.vstack([P, chart_pts])
        frames = np.vstack([frames, chart_frames])
    return P, frames


def _pants_chart_points(model, pm, legs_lat, resolution):
    """Blow-up collars around the three exceptional circles; FD frames in
    chart coordinates (positions are exact, the raw torus lift is used for
    the differences so nothing crosses the fundamental-domain cut)."""
    from .coamoeba import r_apply, rstar_apply
    res_a = max(8, resolution // 2)
    res_t = max(6, resolution // 4)
    alphas = np.exp(np.linspace(np.log(2e-2), np.log(5e1), res_a))
    tgrid = np.linspace(-1.0, 1.0, res_t)
    trims = np.array([legs_lat[j][1] for j in range(3)])
    pts_all, fr_all = [], []
    for k in (0, 1, 2):
        A, Tn = np.meshgrid(alphas, tgrid, indexing="ij")
        a = A.ravel()
        tcap = np.minimum(0.3 * PI / 2, 0.9 * (PI / 2) / (1.0 + a))
        t = Tn.ravel() * tcap

        def emb_raw(aa, tt):
            yy = np.stack([tt * aa, tt], axis=1)
            if k != 0:
                yy = r_apply(1, k, yy)
            hh = np.atleast_2d(pm.h_chart(aa[:, None], tt))
            if k != 0:
                hh = rstar_apply(1, k, hh)
            return np.concatenate([model.x_ambient(hh), model.y_ambient_raw(yy)],
                                  axis=1), hh

        P0, h0 = emb_raw(a, t)
        c = np.stack([_leg_functional_std(h0, j) for j in range(3)], axis=1)
        keep = np.all(c <= trims[None, :], axis=1)
        a, t, tcap, P0 = a[keep], t[keep], tcap[keep], P0[keep]
        if not len(a):
            continue
        da = 1e-5 * a
        dt = 1e-5 * tcap
        va = (emb_raw(a + da, t)[0] - emb_raw(a - da, t)[0]) / (2 * da[:, None])
        vt = (emb_raw(a, t + dt)[0] - emb_raw(a, t - dt)[0]) / (2 * dt[:, None])
        P0[:, 2:] = reduce_mod_pi(P0[:, 2:])
        pts_all.append(P0)
        fr_all.append(np.stack([va, vt], axis=1))
    if not pts_all:
        return np.zeros((0, 4)), np.zeros((0, 2, 4))
    return np.vstack(pts_all), np.vstack(fr_all)


def _collar_sheet(model, j, lam, cutoff, Sf, Tf, reduce_torus=True):
    """Collar points and analytic frames at paired arrays of leg coordinate
    and fiber angle: the graph of d(eta * G) in leg-j working coordinates,
    mapped to ambient coordinates."""
    pm = PantsMap(1, lam)
    pp = ProjectionPair(pm, frozenset({1}), 0)
    minus = Tf > PI / 2
    th_p = np.where(minus, PI - Tf, Tf)
    # solve the 1-d fibers in working coordinates (J = {1}, k = 0)
    wp = np.stack([np.zeros_like(th_p), th_p], axis=1)
    q1 = pp._solve_scalar(1, Sf, wp, 1e-13, 80)[:, 0]
    qw = np.stack([q1, th_p], axis=1)
    qw = np.where(minus[:, None], -qw, qw)

    Fq = pm.F(qw)
    hq = pm.h(qw)
    Hq = pm.hessian(qw)
    eta = cutoff.eta(Sf)
    etap = cutoff.eta_prime(Sf)
    etas = cutoff.eta_second(Sf)
    G = -Fq + Sf * qw[:, 0]
    x2 = eta * hq[:, 1]
    y1 = etap * G + eta * qw[:, 0]
    xw = np.stack([Sf, x2], axis=1)
    yw = np.stack([y1, Tf], axis=1)

    dxw_s = np.stack([np.ones_like(Sf),
                      etap * hq[:, 1] + eta * Hq[:, 1, 0] / Hq[:, 0, 0]], axis=1)
    dyw_s = np.stack([etas * G + 2 * etap * qw[:, 0] + eta / Hq[:, 0, 0],
                      np.zeros_like(Sf)], axis=1)
    dxw_t = np.stack([np.zeros_like(Sf),
                      eta * (Hq[:, 1, 1] - Hq[:, 1, 0] * Hq[:, 0, 1] / Hq[:, 0, 0])], axis=1)
    dyw_t = np.stack([-etap * hq[:, 1] - eta * Hq[:, 0, 1] / Hq[:, 0, 0],
                      np.ones_like(Sf)], axis=1)

    x_std, y_std = LocalModel.from_working(j, xw, yw)
    dxs_std, dys_std = _dworking_to_std(j, dxw_s, dyw_s)
    dxt_std, dyt_std = _dworking_to_std(j, dxw_t, dyw_t)

    y_amb = model.y_ambient(y_std) if reduce_torus else model.y_ambient_raw(y_std)
    P = np.concatenate([model.x_ambient(x_std), y_amb], axis=1)
    fr = np.empty((len(P), 2, 4))
    fr[:, 0, :2] = model.dx_ambient(dxs_std)
    fr[:, 0, 2:] = model.dy_ambient(dys_std)
    fr[:, 1, :2] = model.dx_ambient(dxt_std)
    fr[:, 1, 2:] = model.dy_ambient(dyt_std)
    return P, fr


def _collar_piece(model, vi, j, lam, sched, resolution):
    """Graph of d(eta * G) over [r', r] x (fiber circle) for leg j."""
    ls = sched.legs[(vi, j)]
    scale = model.leg_norm[j]
    s_lat = np.linspace(ls.r_prime / scale, ls.r / scale, resolution)
    cutoff = Cutoff(ls.r_second / scale, ls.r_bar / scale)
    thetas = (np.arange(resolution) + 0.5) * PI / resolution
    S, T = np.meshgrid(s_lat, thetas, indexing="ij")
    P, fr = _collar_sheet(model, j, lam, cutoff, S.ravel(), T.ravel())
    return MeshPiece("collar", (vi, j), P, fr, grid=(resolution, resolution))


def _dworking_to_std(j, dx, dy):
    if j == 1:
        return dx, dy
    if j == 2:
        return dx[:, ::-1], dy[:, ::-1]
    dxs = np.stack([-dx[:, 0], dx[:, 1] - dx[:, 0]], axis=1)
    dys = np.stack([-(dy.sum(axis=1)), dy[:, 1]], axis=1)
    return dxs, dys


def _flat_piece(X, sched, ei, resolution):
    e = X.edges[ei]
    fiber = edge_fiber_from_dual(e, X.dual_cell(e))
    if e.kind == "segment":
        ia = _vertex_index(X, e.verts[0])
        ib = _vertex_index(X, e.verts[1])
        ja = _leg_of_edge(X, ia, e)
        jb = _leg_of_edge(X, ib, e)
        a, b = (np.array([float(c) for c in p]) for p in e.verts)
        d = (b - a) / np.linalg.norm(b - a)
        p0 = a + d * sched.legs[(ia, ja)].r
        p1 = b - d * sched.legs[(ib, jb)].r
    else:
        ia = _vertex_index(X, e.verts[0])
        ja = _leg_of_edge(X, ia, e)
        a = np.array([float(c) for c in e.verts[0]])
        d = np.array(e.rays[0], dtype=float)
        d = d / np.linalg.norm(d)
        p0 = a + d * sched.legs[(ia, ja)].r
        p1 = a + d * sched.truncation
    ts = np.linspace(0.0, 1.0, resolution)
    seg = p0[None, :] + ts[:, None] * (p1 - p0)[None, :]
    thetas = (np.arange(resolution) + 0.5) * PI / resolution
    ys = fiber.points(thetas, 0)
    tangent = (p1 - p0) / np.linalg.norm(p1 - p0)
    circ = np.array(fiber.direction, dtype=float)
    P = np.empty((resolution * resolution, 4))
    fr = np.empty((resolution * resolution, 2, 4))
    P[:, :2] = np.repeat(seg, resolution, axis=0)
    P[:, 2:] = np.tile(ys, (resolution, 1))
    fr[:, 0, :2] = tangent
    fr[:, 0, 2:] = 0.0
    fr[:, 1, :2] = 0.0
    fr[:, 1, 2:] = circ
    return MeshPiece("flat", (ei,), P, fr, grid=(resolution, resolution))


def smooth_lift(X, t=1.0, sched=None, resolution=128):
    """One member of the shrinking family of smooth Lagrangian lifts.

    Pieces: trimmed pants over each vertex, Legendre collars over each
    (vertex, leg) with the smooth cutoff, flat cylinders over each edge
    middle; the whole pants scale is multiplied by t.
    """
    if not 0 < t <= 1:
        raise InputError("scale t must lie in (0, 1]")
    from .tropical import is_smooth
    if not is_smooth(X):
        raise InputError("smooth lifting needs a smooth curve")
    if sched is None:
        sched = default_schedule(X)
    validate_schedule(X, sched)
    pieces = []
    for vi, v in enumerate(X.vertices):
        model = LocalModel(X, v)
        lam = t * sched.lam[vi]
        legs_lat = {j: tuple(getattr(sched.legs[(vi, j)], f) / model.leg_norm[j]
                             for f in ("r_prime", "r_second", "r_bar", "r"))
                    for j in range(3)}
        P, fr = _pants_vertex_piece(model, lam, legs_lat, resolution)
        pieces.append(MeshPiece("pants", (vi,), P, fr))
        for j in range(3):
            pieces.append(_collar_piece(model, vi, j, lam, sched, resolution))
    for ei, e in enumerate(X.edges):
        pieces.append(_flat_piece(X, sched, ei, resolution))
    mesh = LagrangianMesh(pieces, t, sched)
    mesh._curve = X
    return mesh


# ---------------------------------------------------------------------------
# verification quantities

def symplectic_residual(mesh_or_pieces):
    """max |omega(v, w)| over the sampled tangent frames."""
    pieces = mesh_or_pieces.pieces if hasattr(mesh_or_pieces, "pieces") else mesh_or_pieces
    worst = 0.0
    for p in pieces:
        v, w = p.frames[:, 0, :], p.frames[:, 1, :]
        om = (np.sum(v[:, :2] * w[:, 2:], axis=1) - np.sum(w[:, :2] * v[:, 2:], axis=1)) / PI
        if len(om):
            worst = max(worst, float(np.abs(om).max()))
    return worst


def _unfold_torus(pts):
    """Nine torus translates of the y part; x part unchanged."""
    shifts = [(a, b) for a in (-PI, 0.0, PI) for b in (-PI, 0.0, PI)]
    out = []
    for a, b in shifts:
        q = pts.copy()
        q[:, 2] += a
        q[:, 3] += b
        out.append(q)
    return np.vstack(out)


def hausdorff_distance(cloud_a, cloud_b):
    """Symmetric point-sample Hausdorff distance in the product metric
    (Euclidean base x flat torus fiber)."""
    A = np.asarray(cloud_a, dtype=float)
    B = np.asarray(cloud_b, dtype=float)
    if len(A) == 0 or len(B) == 0:
        raise InputError("empty sampling")
    A = A.copy()
    B = B.copy()
    A[:, 2:] = np.mod(A[:, 2:], PI)
    B[:, 2:] = np.mod(B[:, 2:], PI)
    tb = cKDTree(_unfold_torus(B))
    da = tb.query(A, k=1)[0].max()
    ta = cKDTree(_unfold_torus(A))
    db = ta.query(B, k=1)[0].max()
    return float(max(da, db))


def mesh_cloud(mesh):
    return mesh.points


# ---------------------------------------------------------------------------
# twisting

@dataclass
class TwistData:
    """Integer winding per edge index; sections constant outside the flat zone."""

    windings: dict

    def total(self):
        return int(sum(self.windings.values()))


def _dual_basis_vector(u):
    """Integer v with <u, v> = 1 for primitive u."""
    a, b = int(u[0]), int(u[1])
    g, x, y = _egcd(a, b)
    if g != 1:
        raise InputError("edge tangent is not primitive")
    return (x, y)


def _egcd(a, b):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _egcd(b, a % b)
    return (g, y, x - (a // b) * y)


def twist(mesh, data):
    """Twisted lift: fibers over the flat zones rotate by the section.

    Returns (twisted mesh, total class n_sigma).  The base projection is
    untouched.
    """
    X = getattr(mesh, "_curve", None)
    if X is None:
        raise InputError("mesh carries no curve reference; cannot twist")
    for ei in data.windings:
        if not 0 <= ei < len(X.edges):
            raise InputError(f"no edge with index {ei}")
    total = data.total()
    new_pieces = []
    for p in mesh.pieces:
        if p.tag != "flat" or p.owner[0] not in data.windings:
            new_pieces.append(p)
            continue
        m = data.windings[p.owner[0]]
        u = X.edges[p.owner[0]].direction()
        v = np.array(_dual_basis_vector(u), dtype=float)
        q = p.points.copy()
        fr = p.frames.copy()
        nu, nv = p.grid
        s = np.repeat(np.linspace(0.0, 1.0, nu), nv)
        arc = np.linalg.norm(p.points[(nu - 1) * nv, :2] - p.points[0, :2])
        psi = PI * m * _BUMP.psi(s)
        q[:, 2:] = np.mod(q[:, 2:] + psi[:, None] * v[None, :], PI)
        dpsi_darc = PI * m * _BUMP.psi_prime(s) / max(arc, 1e-300)
        fr[:, 0, 2:] = fr[:, 0, 2:] + dpsi_darc[:, None] * v[None, :]
        new_pieces.append(MeshPiece("flat", p.owner, q, fr, p.grid))
    out = LagrangianMesh(new_pieces, mesh.scale, mesh.schedule)
    out._curve = X
    return out, total


def twist_pl_cloud(pl, data, resolution=64, truncation=None):
    """Twisted PL lift sampling: fibers over each edge rotate by the loop."""
    X = pl.X
    if truncation is None:
        truncation = 3.0 * max(1.0, _curve_diameter(X))
    pts = []
    for piece in pl.pieces:
        if piece.kind != "edge":
            v = np.array([float(c) for c in piece.cell.verts[0]])
            ys = _coamoeba_cloud(piece.fiber, resolution)
            pts.append(np.concatenate([np.repeat(v[None, :], len(ys), axis=0), ys], axis=1))
            continue
        ei = X.edges.index(piece.cell)
        m = data.windings.get(ei, 0)
        seg = _edge_param_points(piece.cell, resolution, truncation)
        thetas = (np.arange(resolution) + 0.5) * PI / resolution
        u = piece.cell.direction()
        v = np.array(_dual_basis_vector(u), dtype=float)
        svals = np.linspace(0.0, 1.0, len(seg))
        for j in range(piece.fiber.w):
            ys = piece.fiber.points(thetas, j)
            for p, s in zip(seg, svals):
                shift = PI * m * _BUMP.psi(s) * v
                yy = np.mod(ys + shift[None, :], PI)
                pts.append(np.concatenate([np.repeat(p[None, :], len(yy), axis=0), yy], axis=1))
    return np.vstack(pts)


# ---------------------------------------------------------------------------
# exactness

def exactness_check(X):
    """Integral of the canonical one-form over each fiber circle.

    For the edge on the line <e_f, x> = c_f the integral is c_f; the lift
    is exact iff every c_f vanishes.
    """
    constants = {}
    for i, e in enumerate(X.edges):
        u = e.direction()
        n = primitive((-u[1], u[0]))
        if n[0] < 0 or (n[0] == 0 and n[1] < 0):
            n = (-n[0], -n[1])
        base = e.verts[0]
        c = n[0] * base[0] + n[1] * base[1]
        constants[i] = Fraction(c) if isinstance(c, (int, Fraction)) else float(c)
    exact = all(c == 0 for c in constants.values())
    return {"exact": exact, "constants": constants}


# ---------------------------------------------------------------------------
# Maslov phase winding

def phase_values(points, frames):
    """Complex Omega(v, w) on the frames, z_j = y_j + i x_j."""
    v, w = frames[:, 0, :], frames[:, 1, :]
    a1 = v[:, 2] + 1j * v[:, 0]
    a2 = v[:, 3] + 1j * v[:, 1]
    b1 = w[:, 2] + 1j * w[:, 0]
    b2 = w[:, 3] + 1j * w[:, 1]
    return a1 * b2 - a2 * b1


def maslov_winding(points, frames, max_step=1.0):
    """Winding number of the phase along a sampled closed loop.

    Works with the squared phase so the result is insensitive to frame
    orientation flips between neighboring samples.  Refuses loops whose
    consecutive phase steps exceed max_step radians: the wrap-around
    heuristic would alias and the integer could be silently wrong.
    """
    om = phase_values(points, frames)
    if np.any(np.abs(om) < 1e-14):
        raise NumericError("degenerate frame along the loop")
    ang = np.angle(om ** 2)
    d = np.diff(np.concatenate([ang, ang[:1]]))
    d = np.mod(d + PI, 2 * PI) - PI
    if np.abs(d).max() > max_step:
        raise NumericError("phase steps too large; sample the loop more densely",
                           {"max_step": float(np.abs(d).max())})
    total = d.sum()
    return int(round(total / (2 * PI)))


def pants_basis_loop(lam, leg, x_value, resolution=700):
    """Fiber loop of the standard pants over a point of a leg, with frames.

    leg in {1, 2}; x_value is the leg coordinate (0 < x).  Returns
    (points, frames) sampled along the whole fiber circle.
    """
    pm = PantsMap(1, lam)
    pp = ProjectionPair(pm, frozenset({leg}), 0)
    thetas = (np.arange(resolution) + 0.5) * PI / resolution
    minus = thetas > PI / 2
    th_p = np.where(minus, PI - thetas, thetas)
    comp = 2 if leg == 1 else 1
    wp = np.zeros((resolution, 2))
    wp[:, comp - 1] = th_p
    q = pp._solve_scalar(leg, np.full(resolution, x_value), wp, 1e-13, 80)
    q = np.where(minus[:, None], -q, q)
    h = pm.h(q)
    H = pm.hessian(q)
    pts = np.concatenate([h, q], axis=1)
    fr = np.empty((resolution, 2, 4))
    for i in range(2):
        fr[:, i, :2] = H[:, :, i]
        fr[:, i, 2 + i] = 1.0
        fr[:, i, 2 + (1 - i)] = 0.0
    return pts, fr


def flat_loop(x_point, direction, resolution=700):
    """Constant-fiber loop of a flat cylinder piece."""
    thetas = (np.arange(resolution) + 0.5) * PI / resolution
    d = np.array(direction, dtype=float)
    pts = np.empty((resolution, 4))
    pts[:, :2] = np.asarray(x_point, dtype=float)
    pts[:, 2:] = np.mod(thetas[:, None] * d[None, :], PI)
    fr = np.zeros((resolution, 2, 4))
    fr[:, 0, :2] = (d[1], -d[0])  # leg direction orthogonal to the fiber
    fr[:, 1, 2:] = d
    return pts, fr
