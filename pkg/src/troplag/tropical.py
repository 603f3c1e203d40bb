"""Tropical hypersurfaces/curves as weighted balanced polyhedral complexes.

Curves live in the plane; cells carry exact rational data (Fractions),
weights are positive integers, and the duality with the inducing
subdivision is kept as an explicit bijection.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError
from .polyhedral import Face, discrete_legendre, primitive, vadd, vsub


@dataclass(frozen=True)
class TropCell:
    """A cell of a tropical complex.

    kind: "vertex" | "segment" | "ray" | "line".
    verts: tuple of rational points (1 or 2); rays: primitive directions.
    weight: positive integer, meaningful on top-dimensional cells.
    dual_key: vertex-set key of the dual subdivision face, if known.
    """

    kind: str
    verts: tuple
    rays: tuple = ()
    weight: int = 1
    dual_key: frozenset | None = None

    @property
    def dim(self):
        return 0 if self.kind == "vertex" else 1

    def direction(self):
        """Primitive direction of a 1-cell (sign is arbitrary for segments)."""
        if self.kind == "segment":
            return primitive(vsub(self.verts[1], self.verts[0]))
        return self.rays[0]

    def points(self, t):
        """Affine parametrization sample at parameter t >= 0 (rays) or t in [0,1]."""
        if self.kind == "segment":
            a, b = self.verts
            return tuple(Fraction(a[i]) + t * (b[i] - a[i]) for i in range(2))
        base = self.verts[0]
        return tuple(Fraction(base[i]) + t * self.rays[0][i] for i in range(2))


class TropicalComplex:
    """Weighted polyhedral complex in the plane with optional duality data."""

    def __init__(self, vertices, edges, subdivision=None, dual=None):
        self.vertices = [tuple(Fraction(x) for x in v) for v in vertices]
        self.edges = list(edges)
        self.subdivision = subdivision
        self.dual = dual  # PiecewiseAffine from discrete_legendre, if any
        self.ambient_dim = 2
        for e in self.edges:
            if e.weight < 1:
                raise InputError("edge weights must be positive integers")

    @property
    def cells(self):
        vdual = getattr(self, "_vertex_dual", {})
        return [TropCell("vertex", (v,), dual_key=vdual.get(v)) for v in self.vertices] \
            + self.edges

    def edges_at(self, v):
        v = tuple(Fraction(x) for x in v)
        out = []
        for e in self.edges:
            if any(tuple(p) == v for p in e.verts):
                out.append(e)
        return out

    def outgoing_direction(self, e, v):
        """Primitive direction of edge e pointing away from vertex v."""
        v = tuple(Fraction(x) for x in v)
        if e.kind == "segment":
            a, b = e.verts
            other = b if tuple(a) == v else a
            return primitive(vsub(other, v))
        return e.rays[0]

    def dual_cell(self, cell):
        """Subdivision face dual to a curve cell (requires duality data)."""
        if self.subdivision is None or cell.dual_key is None:
            raise InputError("complex has no duality data")
        return self.subdivision.face(cell.dual_key)

    def curve_cell_of(self, face):
        key = face.key if isinstance(face, Face) else frozenset(map(tuple, face))
        for c in self.cells:
            if c.dual_key == key:
                return c
        for v, k in getattr(self, "_vertex_dual", {}).items():
            if k == key:
                return TropCell("vertex", (v,), dual_key=k)
        raise KeyError("no curve cell dual to the given face")

    def bounded_edges(self):
        return [e for e in self.edges if e.kind == "segment"]

    def unbounded_edges(self):
        return [e for e in self.edges if e.kind in ("ray", "line")]

    def min_vertex_distance(self):
        vs = self.vertices
        best = None
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                d = vsub(vs[i], vs[j])
                val = float(d[0]) ** 2 + float(d[1]) ** 2
                if best is None or val < best:
                    best = val
        return best ** 0.5 if best is not None else 1.0

    def translate(self, t):
        t = tuple(Fraction(x) for x in t)
        verts = [vadd(v, t) for v in self.vertices]
        edges = []
        for e in self.edges:
            edges.append(TropCell(e.kind, tuple(vadd(v, t) for v in e.verts),
                                  e.rays, e.weight, e.dual_key))
        out = TropicalComplex(verts, edges, self.subdivision, self.dual)
        if hasattr(self, "_vertex_dual"):
            out._vertex_dual = {vadd(v, t): k for v, k in self._vertex_dual.items()}
        return out


def tropical_hypersurface(subdivision):
    """Tropical curve dual to a regular subdivision: the corner locus of
    the discrete Legendre transform, with weights = lattice lengths."""
    pa = discrete_legendre(subdivision)
    S = subdivision
    verts = []
    vertex_dual = {}
    edges = []
    if S.top_dim == 2:
        for f in S.faces(2):
            dc = pa.dual_of(f)
            verts.append(dc.verts[0])
            vertex_dual[dc.verts[0]] = f.key
        for f in S.faces(1):
            dc = pa.dual_of(f)
            w = f.poly.normalized_volume()
            if dc.rays:
                edges.append(TropCell("ray", dc.verts, dc.rays, w, f.key))
            else:
                if dc.verts[0] == dc.verts[1]:
                    raise InputError("degenerate dual edge; subdivision invalid")
                edges.append(TropCell("segment", dc.verts, (), w, f.key))
    else:
        for f in S.faces(1):
            dc = pa.dual_of(f)
            w = f.poly.normalized_volume()
            edges.append(TropCell("line", dc.verts, dc.rays, w, f.key))
    X = TropicalComplex(verts, edges, S, pa)
    X._vertex_dual = vertex_dual
    return X


def load_curve_json(data):
    """Direct curve input, bypassing a polytope.

    {"vertices": [[x,y],...], "edges": [[i,j],...],
     "rays": [[i,[dx,dy]],...], "weights": [w,...]}
    weights align with edges followed by rays; omitted -> all 1.
    Balancing is checked on load.
    """
    try:
        vs = [tuple(Fraction(str(x)) for x in p) for p in data["vertices"]]
        raw_edges = data.get("edges", [])
        raw_rays = data.get("rays", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad curve JSON: {exc}")
    weights = data.get("weights")
    if weights is None:
        weights = [1] * (len(raw_edges) + len(raw_rays))
    if len(weights) != len(raw_edges) + len(raw_rays):
        raise InputError("weights length must match edges + rays")
    edges = []
    k = 0
    for i, j in raw_edges:
        edges.append(TropCell("segment", (vs[i], vs[j]), (), int(weights[k])))
        k += 1
    for i, d in raw_rays:
        edges.append(TropCell("ray", (vs[i],), (primitive(d),), int(weights[k])))
        k += 1
    X = TropicalComplex(vs, edges)
    if not balancing_check(X):
        raise InputError("curve is not balanced")
    return X


def balancing_check(X):
    """Weighted primitive directions at every vertex sum to zero."""
    for v in X.vertices:
        total = (0, 0)
        for e in X.edges_at(v):
            d = X.outgoing_direction(e, v)
            total = vadd(total, tuple(e.weight * x for x in d))
        if any(total):
            return False
    return True


def is_smooth(X):
    """Smoothness: the dual subdivision is unimodal.

    For directly-input curves (no subdivision) the equivalent local test
    is used: all weights 1, all vertices trivalent with pairwise
    unimodular outgoing directions.
    """
    if X.subdivision is not None:
        return X.subdivision.is_unimodal()
    if any(e.weight != 1 for e in X.edges):
        return False
    for v in X.vertices:
        star = X.edges_at(v)
        if len(star) != 3:
            return False
        dirs = [X.outgoing_direction(e, v) for e in star]
        for i in range(3):
            for j in range(i + 1, 3):
                if abs(dirs[i][0] * dirs[j][1] - dirs[i][1] * dirs[j][0]) != 1:
                    return False
    return True


@dataclass(frozen=True)
class TropicalLine:
    """Cone over a vertex star: center plus n+2 primitive ray generators."""

    center: tuple
    generators: tuple  # primitive integer directions, weights implicit 1
    weights: tuple = None

    def __post_init__(self):
        if self.weights is None:
            object.__setattr__(self, "weights", (1,) * len(self.generators))

    def is_balanced(self):
        s = (0, 0)
        for w, g in zip(self.weights, self.generators):
            s = vadd(s, (w * g[0], w * g[1]))
        return not any(s)

    def is_smooth(self):
        gs = self.generators
        if len(gs) != 3 or any(w != 1 for w in self.weights):
            return False
        for i in range(3):
            for j in range(i + 1, 3):
                if abs(gs[i][0] * gs[j][1] - gs[i][1] * gs[j][0]) != 1:
                    return False
        return True

    def as_complex(self):
        edges = [TropCell("ray", (self.center,), (g,), w)
                 for g, w in zip(self.generators, self.weights)]
        return TropicalComplex([self.center], edges)


def tangent_line(X, v):
    """Cone of the star of vertex v, with primitive generators."""
    v = tuple(Fraction(x) for x in v)
    if v not in X.vertices:
        raise InputError(f"vertex {v} not in complex")
    star = X.edges_at(v)
    gens, ws = [], []
    for e in star:
        gens.append(X.outgoing_direction(e, v))
        ws.append(e.weight)
    order = sorted(range(len(gens)), key=lambda i: gens[i])
    return TropicalLine(v, tuple(gens[i] for i in order), tuple(ws[i] for i in order))


@dataclass(frozen=True)
class AffineFrame:
    """Unimodular affine coordinates adapted to a tangent tropical line.

    Base side: x -> A (x - origin); torus side: y -> A^{-T} (y - y0), which
    is the associated automorphism convention of the ambient product.
    """

    origin: tuple
    A: tuple  # ((a,b),(c,d)) integer, |det| = 1

    @property
    def det(self):
        (a, b), (c, d) = self.A
        return a * d - b * c

    @property
    def A_inv(self):
        (a, b), (c, d) = self.A
        s = self.det
        return ((d // s if d % s == 0 else Fraction(d, s), -b // s if b % s == 0 else Fraction(-b, s)),
                (-c // s if c % s == 0 else Fraction(-c, s), a // s if a % s == 0 else Fraction(a, s)))

    def apply(self, x):
        w = vsub(tuple(Fraction(c) for c in x), self.origin)
        (a, b), (c, d) = self.A
        return (a * w[0] + b * w[1], c * w[0] + d * w[1])

    def apply_inverse(self, xs):
        (a, b), (c, d) = self.A_inv
        w = (a * xs[0] + b * xs[1], c * xs[0] + d * xs[1])
        return vadd(w, self.origin)

    def apply_linear(self, v):
        (a, b), (c, d) = self.A
        return (a * v[0] + b * v[1], c * v[0] + d * v[1])

    def compose_inverse_check(self, x):
        return self.apply_inverse(self.apply(x)) == tuple(Fraction(c) for c in x)


def adapted_frame(line):
    """Deterministic adapted frame for a smooth tangent tropical line.

    The generator labelled u0 is the lexicographically smallest; the rest
    are ordered lexicographically and sent to the standard basis.
    """
    if not line.is_smooth():
        raise InputError("line is not smooth; use the covering model instead")
    if not line.is_balanced():
        raise InputError("line is not balanced")
    gens = sorted(line.generators)
    u0, u1, u2 = gens[0], gens[1], gens[2]
    det = u1[0] * u2[1] - u1[1] * u2[0]
    # A = [u1 u2]^{-1} (columns); exact since |det| = 1
    A = ((u2[1] // det, -u2[0] // det), (-u1[1] // det, u1[0] // det))
    frame = AffineFrame(tuple(Fraction(c) for c in line.center), A)
    if frame.apply_linear(u1) != (1, 0) or frame.apply_linear(u2) != (0, 1):
        raise InputError("frame construction failed; generators not unimodular")
    return frame, (u0, u1, u2)
