"""Exact lattice/polytope layer.

Convex hulls of lattice polytopes in ambient dimension 1 or 2, regular
subdivisions induced by integral lifting functions, and the discrete
Legendre transform together with its dual polyhedral decomposition.
All computations here are carried out in exact rational arithmetic
(ints and Fraction); floating point only enters downstream modules.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import DegeneracyError, InputError

Point = tuple  # integer lattice point
QPoint = tuple  # point with Fraction coordinates


# ---------------------------------------------------------------------------
# small exact-geometry helpers

def vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def vadd(a, b):
    return tuple(x + y for x, y in zip(a, b))


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def cross2(o, a, b):
    """Signed area form (a-o) x (b-o) in the plane."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def content(v):
    """gcd of the entries; the lattice length of the segment 0..v."""
    g = 0
    for x in v:
        g = gcd(g, abs(int(x)) if x == int(x) else 0)
    return g


def primitive(v):
    """Primitive integer vector positively parallel to v (v rational)."""
    fr = [Fraction(x) for x in v]
    if all(x == 0 for x in fr):
        raise InputError("zero vector has no primitive direction")
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints)


def lattice_length(a, b):
    """Number of primitive steps from lattice point a to lattice point b."""
    d = vsub(b, a)
    g = 0
    for x in d:
        g = gcd(g, abs(x))
    return g


def affine_dim(points):
    pts = list(points)
    if not pts:
        return -1
    base = pts[0]
    dirs = []
    for p in pts[1:]:
        d = vsub(p, base)
        if any(d):
            dirs.append(d)
    if not dirs:
        return 0
    if len(base) == 1:
        return 1
    for a, b in itertools.combinations(dirs, 2):
        if a[0] * b[1] - a[1] * b[0] != 0:
            return 2
    return 1


def convex_hull_2d(points):
    """Extreme points in counterclockwise order (Andrew monotone chain)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross2(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross2(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _hull_1d(points):
    pts = sorted(set(points))
    return [pts[0], pts[-1]] if len(pts) > 1 else pts


def enumerate_lattice_points(vertices):
    """All lattice points of conv(vertices); exact."""
    d = affine_dim(vertices)
    if d <= 0:
        return sorted(set(vertices))
    if len(vertices[0]) == 1:
        lo = min(v[0] for v in vertices)
        hi = max(v[0] for v in vertices)
        return [(k,) for k in range(lo, hi + 1)]
    if d == 1:
        a, b = _hull_1d(vertices)
        step = primitive(vsub(b, a))
        n = lattice_length(a, b)
        return [vadd(a, tuple(step[i] * k for i in range(len(a)))) for k in range(n + 1)]
    hull = convex_hull_2d(vertices)
    xs = [p[0] for p in hull]
    ys = [p[1] for p in hull]
    out = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            p = (x, y)
            inside = True
            for i in range(len(hull)):
                if cross2(hull[i], hull[(i + 1) % len(hull)], p) < 0:
                    inside = False
                    break
            if inside:
                out.append(p)
    return out


# ---------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class LatticePolytope:
    """Convex hull of finitely many lattice points.

    vertices are exactly the extreme points (hull-ordered for 2d cells);
    lattice_points lists every integer point of the polytope.
    """

    vertices: tuple
    lattice_points: tuple
    dim: int

    @staticmethod
    def from_points(points):
        pts = [tuple(int(x) for x in p) for p in points]
        if not pts:
            raise InputError("empty point set")
        d = affine_dim(pts)
        if d == 2:
            verts = tuple(convex_hull_2d(pts))
        elif d == 1:
            verts = tuple(_hull_1d(pts))
        else:
            verts = (pts[0],)
        return LatticePolytope(verts, tuple(enumerate_lattice_points(list(verts))), d)

    @property
    def key(self):
        return frozenset(self.vertices)

    def edges(self):
        """Facet edges (dim-1 faces) of a 1- or 2-dimensional polytope."""
        if self.dim == 2:
            v = self.vertices
            return [LatticePolytope.from_points([v[i], v[(i + 1) % len(v)]])
                    for i in range(len(v))]
        if self.dim == 1:
            return [LatticePolytope.from_points([p]) for p in self.vertices]
        return []

    def normalized_volume(self):
        """Lattice-normalized volume: |det| for 2d, lattice length for 1d."""
        if self.dim == 0:
            return 0
        if self.dim == 1:
            return lattice_length(self.vertices[0], self.vertices[-1])
        v = self.vertices
        tot = 0
        for i in range(1, len(v) - 1):
            tot += abs(cross2(v[0], v[i], v[i + 1]))
        return tot

    def is_elementary_simplex(self):
        if self.dim == 1:
            return len(self.vertices) == 2 and self.normalized_volume() == 1
        if self.dim == 2:
            return len(self.vertices) == 3 and self.normalized_volume() == 1
        return True

    def contains(self, q):
        """Exact membership for a rational point q."""
        q = tuple(Fraction(x) for x in q)
        if self.dim == 2:
            v = self.vertices
            return all(cross2(v[i], v[(i + 1) % len(v)], q) >= 0 for i in range(len(v)))
        if self.dim == 1:
            a, b = self.vertices[0], self.vertices[-1]
            d = vsub(b, a)
            w = vsub(q, a)
            if len(a) == 2 and d[0] * w[1] - d[1] * w[0] != 0:
                return False
            t = None
            for wi, di in zip(w, d):
                if di != 0:
                    t = Fraction(wi, di)
                    break
            return t is not None and 0 <= t <= 1 and all(wi == t * di for wi, di in zip(w, d))
        return all(Fraction(x) == y for x, y in zip(q, self.vertices[0]))


class LiftingFunction:
    """Integral lifting values on lattice points."""

    def __init__(self, values):
        self.values = {}
        for p, v in dict(values).items():
            p = tuple(int(x) for x in p)
            if v != int(v):
                raise InputError(f"lifting value at {p} is not integral: {v!r}")
            self.values[p] = int(v)

    def __call__(self, p):
        p = tuple(int(x) for x in p)
        try:
            return self.values[p]
        except KeyError:
            raise InputError(f"missing lifting value at lattice point {p}")

    @staticmethod
    def constant(polytope, c=0):
        return LiftingFunction({p: c for p in polytope.lattice_points})


@dataclass(frozen=True)
class Face:
    """A cell of the subdivision face lattice of any dimension."""

    poly: LatticePolytope

    @property
    def dim(self):
        return self.poly.dim

    @property
    def key(self):
        return self.poly.key

    @property
    def vertices(self):
        return self.poly.vertices


class Subdivision:
    """Regular subdivision of a lattice polytope by an integral lifting.

    cells holds the maximal linearity domains; faces_by_dim the full face
    lattice.  Cells cover P and meet along common faces (a property of
    lower hulls, asserted rather than re-derived here).
    """

    def __init__(self, polytope, lifting, cells):
        self.polytope = polytope
        self.lifting = lifting
        self.cells = cells
        self.faces_by_dim = {}
        seen = {}
        for c in cells:
            for f in self._faces_of(c):
                if f.key not in seen:
                    seen[f.key] = f
                    self.faces_by_dim.setdefault(f.dim, []).append(f)
        self._face_index = seen

    @staticmethod
    def _faces_of(cell):
        out = [Face(cell)]
        for e in cell.edges():
            out.append(Face(e))
            if e.dim >= 1:
                for p in e.vertices:
                    out.append(Face(LatticePolytope.from_points([p])))
        if cell.dim == 1:
            for p in cell.vertices:
                out.append(Face(LatticePolytope.from_points([p])))
        return out

    def faces(self, dim=None):
        if dim is None:
            return [f for fs in self.faces_by_dim.values() for f in fs]
        return list(self.faces_by_dim.get(dim, []))

    def face(self, key):
        return self._face_index[frozenset(tuple(p) for p in key)]

    def leq(self, f, e):
        """Face order f <= e, i.e. f is a face of e."""
        return f.key <= e.key or all(e.poly.contains(p) for p in f.vertices)

    @property
    def top_dim(self):
        return max(c.dim for c in self.cells)

    def vertex_points(self):
        """Lattice points appearing as vertices of the subdivision."""
        out = []
        for f in self.faces(0):
            out.append(f.vertices[0])
        return sorted(set(out))

    def is_unimodal(self):
        return all(c.is_elementary_simplex() for c in self.cells)


# ---------------------------------------------------------------------------
# operations

def regular_subdivision(polytope, lifting):
    """Projected lower convex hull of the lifted points (v, nu(v)).

    Enumerates supporting affine functions exactly: a cell is the set of
    lattice points where some affine minorant of the lifting is attained.
    Ties (non-generic lifting) keep the non-simplicial cell as-is.
    """
    if isinstance(polytope, (list, tuple)):
        polytope = LatticePolytope.from_points(polytope)
    if isinstance(lifting, dict):
        lifting = LiftingFunction(lifting)
    pts = list(polytope.lattice_points)
    vals = {p: lifting(p) for p in pts}
    if polytope.dim <= 0:
        raise DegeneracyError("polytope has no extent; nothing to subdivide")

    if polytope.dim == 1:
        cells = _lower_hull_1d(pts, vals)
    else:
        cells = _lower_hull_2d(pts, vals)
    return Subdivision(polytope, lifting, cells)


def _lower_hull_1d(pts, vals):
    base = pts[0]
    step = primitive(vsub(pts[-1], base))
    def param(p):
        d = vsub(p, base)
        for di, si in zip(d, step):
            if si != 0:
                return di // si
        return 0
    lifted = sorted((param(p), vals[p], p) for p in pts)
    hull = []
    for s, v, p in lifted:
        while len(hull) >= 2:
            (s1, v1, _), (s2, v2, _) = hull[-2], hull[-1]
            if (v2 - v1) * (s - s2) >= (v - v2) * (s2 - s1):
                hull.pop()
            else:
                break
        hull.append((s, v, p))
    cells = []
    for (s1, v1, p1), (s2, v2, p2) in zip(hull, hull[1:]):
        cells.append(LatticePolytope.from_points([p1, p2]))
    return cells


def _lower_hull_2d(pts, vals):
    pieces = {}
    for tri in itertools.combinations(pts, 3):
        d = cross2(*tri)
        if d == 0:
            continue
        a, b, c = _affine_through(tri, vals)
        key = (a, b, c)
        if key in pieces:
            continue
        if all(a * p[0] + b * p[1] + c <= vals[p] for p in pts):
            pieces[key] = [p for p in pts if a * p[0] + b * p[1] + c == vals[p]]
    cells = [LatticePolytope.from_points(supp) for supp in pieces.values()]
    cells = [c for c in cells if c.dim == 2]
    # dedup (several triples can induce one cell)
    out = {}
    for c in cells:
        out[c.key] = c
    return sorted(out.values(), key=lambda c: sorted(c.vertices))


def _affine_through(tri, vals):
    (x1, y1), (x2, y2), (x3, y3) = tri
    det = Fraction((x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1))
    v1, v2, v3 = (Fraction(vals[t]) for t in tri)
    a = ((v2 - v1) * (y3 - y1) - (v3 - v1) * (y2 - y1)) / det
    b = ((x2 - x1) * (v3 - v1) - (x3 - x1) * (v2 - v1)) / det
    c = v1 - a * x1 - b * y1
    return a, b, c


def is_unimodal(subdivision):
    return subdivision.is_unimodal()


# ---------------------------------------------------------------------------
# discrete Legendre transform and the dual decomposition

@dataclass(frozen=True)
class DualCell:
    """Polyhedron of the dual decomposition: vertex set + recession rays."""

    verts: tuple
    rays: tuple

    @property
    def dim(self):
        pts = [self.verts[0]] if self.verts else [(0, 0)]
        pts = list(self.verts) + [vadd(self.verts[0] if self.verts else (0, 0), r)
                                  for r in self.rays]
        return affine_dim(pts)

    def sample_point(self):
        """A relative-interior rational point."""
        n = len(self.verts)
        p = tuple(sum(Fraction(v[i]) for v in self.verts) / n for i in range(2))
        for r in self.rays:
            p = vadd(p, tuple(Fraction(x, 2) for x in r))
        return p


class PiecewiseAffine:
    """min-of-affine function: one piece <v,m> + c per subdivision vertex.

    Carries the dual polyhedral decomposition and the cell bijection
    e -> dual(e) as computed from the inducing subdivision.
    """

    def __init__(self, pieces, subdivision=None, dual_cells=None):
        seen = {}
        for v, c in pieces:
            seen[(tuple(v), c)] = None
        self.pieces = [(tuple(v), c) for (v, c) in seen]
        self.subdivision = subdivision
        self._dual = dual_cells or {}

    def value(self, m):
        return min(dot(v, m) + c for v, c in self.pieces)

    def argmin(self, m):
        best = self.value(m)
        return [v for v, c in self.pieces if dot(v, m) + c == best]

    def __call__(self, m):
        return self.value(m)

    def dual_of(self, face):
        key = face.key if isinstance(face, Face) else frozenset(tuple(p) for p in face)
        return self._dual[key]

    def dual_items(self):
        return list(self._dual.items())


def discrete_legendre(subdivision):
    """Discrete Legendre transform of the lifting, with dual decomposition."""
    S = subdivision
    nu = S.lifting
    pieces = [(p, nu(p)) for p in S.vertex_points()]
    all_pts = list(S.polytope.lattice_points)
    dual = {}
    if S.top_dim == 2:
        cell_vertex = {}
        for c in S.cells:
            cell_vertex[c.key] = _dual_vertex(c, nu)
        for f in S.faces(2):
            dual[f.key] = DualCell((cell_vertex[f.key],), ())
        for f in S.faces(1):
            owners = [c for c in S.cells if f.key <= c.key]
            if len(owners) == 2:
                dual[f.key] = DualCell(
                    (cell_vertex[owners[0].key], cell_vertex[owners[1].key]), ())
            else:
                base = cell_vertex[owners[0].key]
                ray = _boundary_ray_direction(f, all_pts, nu)
                dual[f.key] = DualCell((base,), (ray,))
        for f in S.faces(0):
            v = f.vertices[0]
            verts, rays = [], []
            for e in S.faces(1):
                if not f.key <= e.key:
                    continue
                dc = dual[e.key]
                verts.extend(dc.verts)
                rays.extend(dc.rays)
            for c in S.cells:
                if f.key <= c.key:
                    verts.append(cell_vertex[c.key])
            uv = sorted(set(verts))
            if not uv:
                uv = [(Fraction(0), Fraction(0))]
            dual[f.key] = DualCell(tuple(uv), tuple(sorted(set(rays))))
    else:
        # segment polytope: duals of 1-cells are full lines
        for f in S.faces(1):
            v1, v2 = f.vertices
            d = vsub(v1, v2)
            c = nu(v2) - nu(v1)
            base = _point_on_line(d, c)
            perp = primitive((-d[1], d[0]))
            dual[f.key] = DualCell((base,), (perp, tuple(-x for x in perp)))
        for f in S.faces(0):
            v = f.vertices[0]
            owners = [c for c in S.cells if f.key <= c.key]
            verts, rays = [], []
            for c in owners:
                dc = dual[c.key]
                verts.extend(dc.verts)
                rays.extend(dc.rays)
            if len(owners) == 1:
                # endpoint of P: dual is a half plane, receding away from
                # the rest of the segment
                c = owners[0]
                other = [p for p in c.vertices if p != v][0]
                n = primitive(vsub(v, other))
                rays.append(tuple(-x for x in n))
            dual[f.key] = DualCell(tuple(sorted(set(verts))), tuple(sorted(set(rays))))
    return PiecewiseAffine(pieces, S, dual)


def _dual_vertex(cell, nu):
    """Point where all pieces of a 2-cell are equal (and minimal)."""
    v0 = cell.vertices[0]
    eqs = [(vsub(v, v0), nu(v0) - nu(v)) for v in cell.vertices[1:3]]
    (d1, c1), (d2, c2) = eqs
    det = Fraction(d1[0] * d2[1] - d1[1] * d2[0])
    x = (Fraction(c1) * d2[1] - Fraction(c2) * d1[1]) / det
    y = (Fraction(c2) * d1[0] - Fraction(c1) * d2[0]) / det
    return (x, y)


def _boundary_ray_direction(face, all_pts, nu):
    """Primitive recession direction of the dual ray of a boundary edge."""
    v1, v2 = face.vertices[0], face.vertices[-1]
    d = vsub(v2, v1)
    for cand in (primitive((-d[1], d[0])), primitive((d[1], -d[0]))):
        ok = True
        for w in all_pts:
            if w in (v1, v2):
                continue
            if dot(vsub(w, v1), cand) < 0:
                ok = False
                break
        if ok:
            return cand
    raise DegeneracyError("no valid dual ray direction; input not a polytope?")


def _point_on_line(d, c):
    """Some rational solution m of <d, m> = c."""
    if d[0] != 0:
        return (Fraction(c, d[0]), Fraction(0))
    return (Fraction(0), Fraction(c, d[1]))


def load_polytope_json(data, default_zero=False):
    """Parse {"vertices": [[i,j],...], "lifting": {"i,j": v, ...}}."""
    try:
        verts = [tuple(int(x) for x in p) for p in data["vertices"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad polytope JSON: {exc}")
    poly = LatticePolytope.from_points(verts)
    raw = data.get("lifting", {})
    values = {}
    for k, v in raw.items():
        if isinstance(k, str):
            p = tuple(int(x) for x in k.split(","))
        else:
            p = tuple(int(x) for x in k)
        values[p] = v
    if default_zero:
        for p in poly.lattice_points:
            values.setdefault(p, 0)
    missing = [p for p in poly.lattice_points if p not in values]
    if missing:
        raise InputError(f"missing lifting values at {missing}; "
                         "pass --default-zero to default them to 0")
    return poly, LiftingFunction(values)
