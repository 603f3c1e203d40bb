"""Torus-side geometry: coamoebas, faces, symmetries, blow-up charts.

The torus is R^{n+1}/(pi Z^{n+1}).  The standard coamoeba is two copies of
the simplex with vertices p_0 = 0 and p_k = (pi/2) e_k glued at vertices;
the minus half is the image of the plus half under y -> -y.  Charts of the
real blow-up at a vertex use coordinates (alpha_1..alpha_n, t) with
projection (t alpha_1, ..., t alpha_n, t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, InputError

PI = math.pi
EPS_FACE = 1e-10  # face-classification tolerance


# ---------------------------------------------------------------------------
# flat torus

class FlatTorus:
    """R^{d}/(pi Z^{d}) with the flat quotient metric."""

    def __init__(self, dim):
        if dim < 1:
            raise InputError("torus dimension must be >= 1")
        self.dim = dim

    def reduce(self, y):
        """Representative in the fundamental domain [0, pi)^d."""
        return np.mod(np.asarray(y, dtype=float), PI)

    def wrap_centered(self, y):
        """Representative in [-pi/2, pi/2)^d."""
        return np.mod(np.asarray(y, dtype=float) + PI / 2, PI) - PI / 2

    def distance(self, y1, y2):
        d = self.wrap_centered(np.asarray(y1, dtype=float) - np.asarray(y2, dtype=float))
        return np.sqrt(np.sum(d * d, axis=-1))


def reduce_mod_pi(y):
    return np.mod(np.asarray(y, dtype=float), PI)


# ---------------------------------------------------------------------------
# symmetries

def rstar_matrix(n, k):
    """Base-side linear involution exchanging the rays u_0 and u_k.

    Row form: (x_1 - x_k, ..., -x_k, ..., x_{n+1} - x_k).
    """
    if not 1 <= k <= n + 1:
        raise InputError(f"symmetry index k={k} out of range")
    m = np.eye(n + 1, dtype=int)
    m[:, k - 1] = -1
    return m


def rstar_apply(n, k, x):
    x = np.asarray(x, dtype=float)
    xk = x[..., k - 1].copy()
    out = x - xk[..., None]
    out[..., k - 1] = -xk
    return out


def r_apply(n, k, y):
    """Torus involution exchanging vertices p_0 and p_k, fixing the others.

    y_j -> y_j for j != k and y_k -> pi/2 - sum(y).
    """
    y = np.asarray(y, dtype=float)
    out = y.copy()
    out[..., k - 1] = PI / 2 - y.sum(axis=-1)
    return out


def apply_index_transposition(k, J, n):
    """Action of R_k on index subsets of {0, ..., n+1}: swap 0 and k."""
    out = set()
    for j in J:
        if j == 0:
            out.add(k)
        elif j == k:
            out.add(0)
        else:
            out.add(j)
    return frozenset(out)


# ---------------------------------------------------------------------------
# the standard coamoeba

class Coamoeba:
    """Standard (n+1)-dimensional Lagrangian coamoeba in R^{n+1}/pi Z^{n+1}.

    Contains its vertices and the two open simplex interiors; open faces of
    intermediate dimension are excluded.  Faces are indexed by proper
    subsets J of {0, ..., n+1}: E_J has vertices {p_k : k not in J}.
    """

    def __init__(self, n):
        if n < 0:
            raise InputError("n must be >= 0")
        self.n = n
        self.dim = n + 1
        self.torus = FlatTorus(n + 1)
        self.vertices = np.vstack([np.zeros(n + 1)] + [PI / 2 * e for e in np.eye(n + 1)])

    # -- halves ------------------------------------------------------------
    def _shifted_wrap(self, y):
        """Wrap to [-pi/4, 3pi/4): keeps the plus simplex away from wrap cuts."""
        return np.mod(np.asarray(y, dtype=float) + PI / 4, PI) - PI / 4

    def plus_coords(self, y):
        """Wrapped coordinates; in closed C+ iff all >= 0 and sum <= pi/2."""
        return self._shifted_wrap(y)

    def in_plus_closure(self, y, eps=EPS_FACE):
        w = self.plus_coords(y)
        return bool(np.all(w >= -eps) and w.sum() <= PI / 2 + eps)

    def in_minus_closure(self, y, eps=EPS_FACE):
        return self.in_plus_closure(-np.asarray(y, dtype=float), eps)

    def vertex_index(self, y, eps=EPS_FACE):
        d = self.torus.distance(np.asarray(y, dtype=float)[None, :], self.vertices)
        k = int(np.argmin(d))
        return k if d[k] <= eps else None

    def membership(self, y, eps=EPS_FACE):
        """Classify a torus point.

        Returns one of ("interior_plus",), ("interior_minus",),
        ("vertex", k), ("face", J), ("outside",).
        """
        y = np.asarray(y, dtype=float)
        k = self.vertex_index(y, eps)
        if k is not None:
            return ("vertex", k)
        w = self.plus_coords(y)
        if np.all(w > eps) and w.sum() < PI / 2 - eps:
            return ("interior_plus",)
        wm = self.plus_coords(-y)
        if np.all(wm > eps) and wm.sum() < PI / 2 - eps:
            return ("interior_minus",)
        if self.in_plus_closure(y, eps) or self.in_minus_closure(y, eps):
            J = self.face_equations(y, eps)
            if J:
                return ("face", J)
        return ("outside",)

    def face_equations(self, y, eps=EPS_FACE):
        """Indices whose closure equation holds: y_j = 0 (j >= 1) and
        sum(y) = pi/2 (j = 0), both mod pi."""
        y = np.asarray(y, dtype=float)
        J = set()
        cw = self.torus.wrap_centered(y)
        for j in range(1, self.n + 2):
            if abs(cw[j - 1]) <= eps:
                J.add(j)
        s = float(np.mod(y.sum() - PI / 2, PI))
        if min(s, PI - s) <= eps:
            J.add(0)
        return frozenset(J)

    def membership_exact(self, y_over_pi):
        """Rational-level classification for y given as fractions of pi.

        Same outcomes as membership(), decided with exact arithmetic; the
        boundary congruences are linear in y so no tolerance is needed.
        """
        y = [Fraction(c) % 1 for c in y_over_pi]
        n = self.n
        for k in range(n + 2):
            target = [Fraction(0)] * (n + 1)
            if k > 0:
                target[k - 1] = Fraction(1, 2)
            if all(c == t for c, t in zip(y, target)):
                return ("vertex", k)
        for sign, tag in ((1, "interior_plus"), (-1, "interior_minus")):
            w = [(sign * c) % 1 for c in y]
            if all(0 < c < Fraction(1, 2) for c in w) and sum(w) < Fraction(1, 2):
                return (tag,)
        for sign in (1, -1):
            w = [(sign * c) % 1 for c in y]
            if all(c <= Fraction(1, 2) for c in w) and sum(w) <= Fraction(1, 2):
                J = {j for j in range(1, n + 2) if w[j - 1] == 0}
                if (sum(w) - Fraction(1, 2)) % 1 == 0:
                    J.add(0)
                if J:
                    return ("face", frozenset(J))
        return ("outside",)

    def face_vertices(self, J):
        """Vertex points of the face E_J."""
        return [self.vertices[k] for k in range(self.n + 2) if k not in J]

    def face_sample(self, J, weights=None):
        """A relative-interior point of E_J^+ (positive convex combination
        of the face vertices)."""
        ks = [k for k in range(self.n + 2) if k not in J]
        if len(ks) == 1:
            return self.vertices[ks[0]].copy()
        if weights is None:
            weights = [1.0 + 0.1 * i for i in range(len(ks))]
        w = np.asarray(weights, dtype=float)
        w = w / w.sum()
        pt = np.zeros(self.n + 1)
        for wk, k in zip(w, ks):
            pt = pt + wk * self.vertices[k]
        return pt

    def complement_index(self, k):
        """J_k, the complement of {k}: the face E_{J_k} is the vertex p_k."""
        return frozenset(j for j in range(self.n + 2) if j != k)

    # -- sampling ----------------------------------------------------------
    def sample_interior(self, m, seed=0, half=+1, margin=1e-6):
        """Deterministic quasi-random points of the open simplex interior.

        Uses the R_d additive recurrence; `seed` offsets the sequence.
        """
        d = self.n + 1
        g = _rd_generator_gamma(d)
        u = np.empty((0, d))
        block = 1
        while len(u) < m:
            idx = (np.arange(block, block + 8 * m, dtype=float)[:, None]
                   + float(seed) * 0.61803398875)
            cand = np.mod(idx * g[None, :], 1.0)
            cand = cand[cand.sum(axis=1) < 1.0]
            u = np.vstack([u, cand])
            block += 8 * m
        u = u[:m]
        u = np.clip(u, margin, 1 - margin)
        scale = np.minimum(1.0, (1 - margin) / np.maximum(u.sum(axis=1), 1e-300))
        u = u * scale[:, None]
        return half * (PI / 2) * u


def _rd_generator_gamma(d):
    # generalized golden-ratio sequence generator
    phi = 2.0
    for _ in range(64):
        phi = (1 + phi) ** (1 / (d + 1))
    return np.array([(1 / phi) ** (k + 1) for k in range(d)])


def standard_coamoeba(n):
    return Coamoeba(n)


def symmetry(n, k):
    """The pair (R_k, R*_k) as callables plus the combined product map."""
    m = rstar_matrix(n, k)

    def R(y):
        return r_apply(n, k, y)

    def Rstar(x):
        return rstar_apply(n, k, x)

    def combined(x, y):
        return Rstar(x), R(y)

    return R, Rstar, combined


# ---------------------------------------------------------------------------
# blow-up charts

@dataclass
class BlowupChart:
    """Chart of the real blow-up of the coamoeba at vertex k.

    Coordinates (alpha_1..alpha_n, t) with alpha_j > 0; the projection is
    (t alpha_1, ..., t alpha_n, t) followed by the symmetry taking the
    p_0 model to p_k.  t = 0 is the exceptional set; t < 0 lands in C^-.
    """

    coamoeba: Coamoeba
    k: int
    axis_permutation: tuple = None

    def __post_init__(self):
        n = self.coamoeba.n
        if self.axis_permutation is None:
            self.axis_permutation = tuple(range(n + 1))
        if not 0 <= self.k <= n + 1:
            raise InputError(f"vertex index {self.k} out of range")

    def project(self, alpha, t):
        """Torus point of the chart point (alpha, t)."""
        alpha = np.atleast_2d(np.asarray(alpha, dtype=float))
        t = np.atleast_1d(np.asarray(t, dtype=float))
        n = self.coamoeba.n
        z = np.empty((alpha.shape[0], n + 1))
        z[:, :n] = alpha * t[:, None]
        z[:, n] = t
        z = z[:, np.argsort(self.axis_permutation)]
        if self.k != 0:
            z = r_apply(n, self.k, z)
        return z if z.shape[0] > 1 else z[0]

    def t_halfwidth(self, alpha=None):
        """Safe |t| bound: 0.3 x (shortest edge of the coamoeba), shrunk so
        the chart image stays inside the closed coamoeba for this alpha."""
        base = 0.3 * (PI / 2)
        if alpha is None:
            return base
        alpha = np.asarray(alpha, dtype=float)
        s = 1.0 + alpha.sum(axis=-1)
        return np.minimum(base, 0.98 * (PI / 2) / s)

    def chart_coords(self, y):
        """Inverse chart for points near the vertex (last coord as axis)."""
        n = self.coamoeba.n
        y = np.asarray(y, dtype=float)
        if self.k != 0:
            y = r_apply(n, self.k, y)
        y = np.atleast_2d(y)
        w = self.coamoeba.torus.wrap_centered(y)
        t = w[:, n]
        alpha = w[:, :n] / t[:, None]
        return (alpha, t) if y.shape[0] > 1 else (alpha[0], t[0])


def blowup_chart(coamoeba, k, axis_permutation=None):
    return BlowupChart(coamoeba, k, axis_permutation)


# ---------------------------------------------------------------------------
# coamoebas of subdivision cells

class CellCoamoeba:
    """Coamoeba of a cell e of (P, nu): points with 2(y - k) in e (scaled).

    In torus coordinates the condition reads (2/pi) y in e mod 2 Z^2.
    """

    def __init__(self, cell):
        self.cell = cell  # LatticePolytope
        if cell.dim < 1:
            raise InputError("cell coamoeba needs dim(e) >= 1")

    def _candidates(self, y):
        z = np.mod(2.0 * np.asarray(y, dtype=float) / PI, 2.0)
        lo = [min(v[i] for v in self.cell.vertices) for i in range(2)]
        hi = [max(v[i] for v in self.cell.vertices) for i in range(2)]
        r0 = range(int(math.floor((lo[0] - z[0]) / 2)) - 1, int(math.ceil((hi[0] - z[0]) / 2)) + 2)
        r1 = range(int(math.floor((lo[1] - z[1]) / 2)) - 1, int(math.ceil((hi[1] - z[1]) / 2)) + 2)
        for k0 in r0:
            for k1 in r1:
                yield z + 2.0 * np.array([k0, k1])

    def _in_cell(self, q, eps):
        if self.cell.dim == 2:
            v = self.cell.vertices
            m = len(v)
            for i in range(m):
                a, b = v[i], v[(i + 1) % m]
                cr = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0])
                if cr < -eps:
                    return False
            return True
        a, b = self.cell.vertices[0], self.cell.vertices[-1]
        d = (b[0] - a[0], b[1] - a[1])
        w = (q[0] - a[0], q[1] - a[1])
        if abs(d[0] * w[1] - d[1] * w[0]) > eps * (abs(d[0]) + abs(d[1])):
            return False
        t = (w[0] * d[0] + w[1] * d[1]) / (d[0] ** 2 + d[1] ** 2)
        return -eps <= t <= 1 + eps

    def classify(self, y, eps=1e-9):
        y = np.asarray(y, dtype=float)
        for sign, tag in ((1.0, "plus"), (-1.0, "minus")):
            for q in self._candidates(sign * y):
                if not self._in_cell(q, eps):
                    continue
                for v in self.cell.vertices:
                    if abs(q[0] - v[0]) <= eps and abs(q[1] - v[1]) <= eps:
                        return ("vertex", tuple(v))
                return ("interior_" + tag,) if self.cell.dim == 2 else ("on_" + tag,)
        return ("outside",)

    def contains(self, y, eps=1e-9):
        return self.classify(y, eps)[0] != "outside"

    def vertex_points(self):
        """Torus points (pi/2) v for vertices v of the cell."""
        return [reduce_mod_pi(np.array(v, dtype=float) * PI / 2) for v in self.cell.vertices]

    def edge_circle(self):
        """For an edge cell: parametrization of the closed fiber geodesic.

        Returns (base, direction) with y(theta) = base + theta*direction,
        theta in [0, pi); direction is the primitive edge direction.
        """
        if self.cell.dim != 1:
            raise InputError("edge_circle needs a 1-cell")
        a = self.cell.vertices[0]
        b = self.cell.vertices[-1]
        from .polyhedral import primitive, vsub
        d = primitive(vsub(b, a))
        base = np.array([float(a[0]) * PI / 2, float(a[1]) * PI / 2])
        return base, np.array(d, dtype=float)


def cell_coamoeba(cell):
    return CellCoamoeba(cell)


# ---------------------------------------------------------------------------
# edge fibers with multiplicity

@dataclass
class EdgeFiber:
    """Fiber circles of the PL lift over a weight-w curve edge.

    w parallel geodesics { y : <u, y> = c + j*pi/w  mod pi }, j = 0..w-1,
    where u is the primitive tangent of the curve edge.
    """

    u: tuple          # primitive integer tangent of the curve edge
    c: float          # base offset of the j = 0 circle
    w: int = 1
    direction: tuple = None  # primitive direction of the circles

    def circles(self):
        d = np.array(self.direction, dtype=float)
        u = np.array(self.u, dtype=float)
        # base point on circle j: solve <u, y> = c + j pi / w
        uu = u @ u
        out = []
        for j in range(self.w):
            cj = self.c + j * PI / self.w
            base = u * (cj / uu)
            out.append((base, d))
        return out

    def points(self, thetas, j=0):
        base, d = self.circles()[j]
        th = np.asarray(thetas, dtype=float)[:, None]
        return reduce_mod_pi(base[None, :] + th * d[None, :])


def edge_fiber_from_dual(curve_edge, dual_face):
    """EdgeFiber of a subdivision-backed curve edge."""
    from .polyhedral import primitive, vsub
    u = curve_edge.direction()
    f0 = dual_face.vertices[0]
    c = (PI / 2) * float(u[0] * f0[0] + u[1] * f0[1])
    a, b = dual_face.vertices[0], dual_face.vertices[-1]
    d = primitive(vsub(b, a)) if a != b else (-u[1], u[0])
    return EdgeFiber(tuple(u), c, curve_edge.weight, tuple(d))


# ---------------------------------------------------------------------------
# covering model for weighted trivalent vertices

class CoveringCoamoeba:
    """Pulled-back coamoeba of a balanced weighted trivalent vertex.

    The span of two weighted directions is a finite-index sublattice; the
    quotient covering of tori has degree m_e = |w1 u1 ^ w2 u2| and the
    standard coamoeba and potential pull back through it.
    """

    def __init__(self, line):
        if len(line.generators) != 3:
            raise InputError("covering model needs a trivalent vertex")
        if not line.is_balanced():
            raise InputError("weighted vertex is not balanced")
        # deterministic labels, matching the adapted-frame convention:
        # u0 is the lexicographically smallest generator
        order = sorted(range(3), key=lambda i: line.generators[i])
        (u0, w0), (u1, w1), (u2, w2) = [
            (line.generators[i], line.weights[i]) for i in order]
        b1 = (w1 * u1[0], w1 * u1[1])
        b2 = (w2 * u2[0], w2 * u2[1])
        self.B = np.array([[b1[0], b2[0]], [b1[1], b2[1]]], dtype=int)  # columns
        self.degree = abs(int(round(np.linalg.det(self.B))))
        self.line = line
        self.standard = Coamoeba(1)
        self._Bt_inv = np.linalg.inv(self.B.T.astype(float))

    def beta(self, y):
        """Covering map to the standard model torus: y' = B^T y."""
        y = np.asarray(y, dtype=float)
        return reduce_mod_pi(y @ self.B.astype(float))

    def potential(self, y):
        """Pulled-back pair-of-pants potential F' o beta."""
        from .pants import PantsMap
        pm = PantsMap(1)
        return pm.F(self.beta(y))

    def contains(self, y, eps=1e-9):
        cls = self.standard.membership(self.beta(y), eps)
        return cls[0] != "outside"

    def vertex_points(self):
        """All preimages of the three model vertices: 3 * degree points."""
        det = int(round(np.linalg.det(self.B.T)))
        reps = _lattice_quotient_reps(self.B.T)
        out = []
        for pk in self.standard.vertices:
            for r in reps:
                target = pk + PI * np.asarray(r, dtype=float)
                out.append(reduce_mod_pi(target @ self._Bt_inv.T))
        return out

    def puncture_count(self):
        return int(sum(self.line.weights))

    def euler_characteristic(self):
        return -self.degree

    def genus(self):
        chi = self.euler_characteristic()
        p = self.puncture_count()
        g2 = 2 - chi - p
        if g2 % 2:
            raise InputError("inconsistent topology data")
        return g2 // 2


def _lattice_quotient_reps(M):
    """Coset representatives of Z^2 / M Z^2 for an integer 2x2 matrix."""
    det = abs(int(round(np.linalg.det(M))))
    Minv = np.linalg.inv(M.astype(float))
    reps = []
    seen = set()
    bound = int(abs(M).max()) * 2 + 2
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            v = np.array([a, b], dtype=float)
            key = tuple(np.round(np.mod(Minv @ v, 1.0), 9))
            key = tuple(x % 1.0 for x in key)
            if key not in seen:
                seen.add(key)
                reps.append((a, b))
            if len(reps) == det:
                return reps
    return reps


def covering_coamoeba(line):
    return CoveringCoamoeba(line)


# ---------------------------------------------------------------------------
# the 4-valent local model

FOUR_VALENT_DIRECTIONS = ((1, 1), (-1, 1), (-1, -1), (1, -1))


def _four_valent_cell(y):
    """Locate y in the pi/4-shifted diagonal grid.

    Returns (kept, eps_sign, on_edge): the cells of the model region are the
    grid squares whose center has exactly one of (s, d) congruent to pi/2
    mod pi; the sign is +1 when s is the pi/2 one.  The potential extends by
    zero to edges of kept squares.
    """
    y = np.asarray(y, dtype=float)
    s = y[0] + y[1]
    d = y[0] - y[1]
    sc = round(s / (PI / 2)) * (PI / 2)
    dc = round(d / (PI / 2)) * (PI / 2)
    on_edge = (abs(abs(s - sc) - PI / 4) < 1e-12) or (abs(abs(d - dc) - PI / 4) < 1e-12)
    s_half = abs((sc % PI) - PI / 2) < 1e-9
    d_half = abs((dc % PI) - PI / 2) < 1e-9
    kept = s_half != d_half
    sign = 1.0 if s_half else -1.0
    return kept, sign, on_edge


def four_valent_region_contains(y):
    kept, _, on_edge = _four_valent_cell(y)
    return kept or on_edge


def four_valent_potential(y):
    """Potential of the 4-valent local model on its four-square coamoeba.

    F(y) = eps(y) * (prod_j |sin(<u_j, y> - pi/4)|)^(1/2) with the square
    marking eps chosen so the gradient graph extends across every corner.
    """
    y = np.asarray(y, dtype=float)
    kept, sign, on_edge = _four_valent_cell(y)
    if not kept and not on_edge:
        raise DomainError("point outside the 4-valent model region")
    prod = 1.0
    for u in FOUR_VALENT_DIRECTIONS:
        prod *= abs(math.sin(u[0] * y[0] + u[1] * y[1] - PI / 4))
    return sign * math.sqrt(prod) if kept else 0.0


def four_valent_vertices():
    """The eight corner points of the model region in [0, pi)^2."""
    pts = []
    for a in (PI / 4, 3 * PI / 4):
        pts.append((a, 0.0))
        pts.append((0.0, a))
        pts.append((a, PI / 2))
        pts.append((PI / 2, a))
    return [tuple(np.mod(p, PI)) for p in pts]
