"""Convex bodies cut out by sampled support half-spaces.

Inner bodies {x >= 0 : (x, n) >= eta(n)} and Wulff bodies
{x : (x, n) <= tau(n)} are built from finitely many normals; the result is
the exact boundary of the polyhedral intersection, so every facet lies on
one of the sampled support planes and carries its normal exactly.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull
from scipy.spatial import QhullError

from . import _geometry as geo
from .entropy import TensionFunction

DEFAULT_WINDOW = 30.0
# deepest boundary refinement: normals with an l1 share below exp(-depth)
# are not sampled (their support points sit beyond any useful window)
_DEPTH_1D = 40.0
_DEPTH_2D = 23.0
# boundary refinement starts at this angle (d=1)
_GRADE_ANGLE = 0.05


@dataclass(frozen=True, eq=False)
class ConvexShape:
    """Polyline (dim 1) or triangulated surface (dim 2) in the closed
    positive octant, with one unit normal and one area per facet.

    ``faces`` index ``vertices``: segments (i, i+1) for dim 1, triangles for
    dim 2. ``window`` is the truncation size W (coordinates <= W), or inf
    for bounded bodies. ``kind`` is "inner" (unbounded body truncated at
    the window), "cube" (a surface in the cube [0, W]^(d+1), nothing beyond
    it), "wulff" (bounded body) or "sample" (sampled closed-form shape)."""

    dim: int
    vertices: np.ndarray
    faces: np.ndarray
    facet_normals: np.ndarray
    facet_areas: np.ndarray
    window: float
    kind: str = "inner"

    @property
    def n_facets(self) -> int:
        return len(self.faces)

    def scaled(self, s: float) -> "ConvexShape":
        return ConvexShape(
            self.dim,
            self.vertices * s,
            self.faces,
            self.facet_normals,
            self.facet_areas * s**self.dim,
            self.window * s,
            self.kind,
        )

    def translated(self, shift) -> "ConvexShape":
        return ConvexShape(
            self.dim,
            self.vertices + np.asarray(shift, float),
            self.faces,
            self.facet_normals,
            self.facet_areas,
            self.window,
            self.kind,
        )

    def recomputed_areas(self) -> np.ndarray:
        return _areas(self.dim, self.vertices, self.faces)

    def check(self, tol: float = 1e-12):
        """Raise ValueError if an invariant fails: normals in the octant
        simplex, unit length, areas consistent with vertices."""
        n = self.facet_normals
        if np.any(n < -tol):
            raise ValueError("facet normal outside the octant")
        if np.any(np.abs(np.linalg.norm(n, axis=1) - 1) > 1e-12):
            raise ValueError("facet normals are not unit vectors")
        a = self.recomputed_areas()
        if np.any(np.abs(a - self.facet_areas) > 1e-12 * np.maximum(a, 1e-300)):
            raise ValueError("facet areas do not match vertices")
        if self.dim == 1 and len(n) > 1:
            ang = np.arctan2(n[:, 1], n[:, 0])
            d = np.diff(ang)
            if not (np.all(d >= -1e-12) or np.all(d <= 1e-12)):
                raise ValueError("normal angle is not monotone along the polyline")


def _areas(dim, V, F):
    if dim == 1:
        return np.linalg.norm(V[F[:, 1]] - V[F[:, 0]], axis=1)
    return geo.triangle_areas(V, F)


def _polyline_shape(P, N, window, kind):
    n = len(P)
    F = np.column_stack([np.arange(n - 1), np.arange(1, n)])
    N = N / np.linalg.norm(N, axis=1)[:, None]
    return ConvexShape(1, P, F, N, _areas(1, P, F), window, kind)


def _mesh_shape(V, F, N, window, kind):
    N = N / np.linalg.norm(N, axis=1)[:, None]
    if len(V):
        finite = V[np.isfinite(V)]
        scale = max(1.0, float(np.abs(finite).max())) if finite.size else 1.0
        V, F, good = geo.weld(V, F, 1e-10 * scale)
        F, N = F[good], N[good]
    # orient each triangle along its normal
    cr = np.cross(V[F[:, 1]] - V[F[:, 0]], V[F[:, 2]] - V[F[:, 0]])
    flip = np.einsum("ij,ij->i", cr, N) < 0
    F = F.copy()
    F[flip, 1], F[flip, 2] = F[flip, 2], F[flip, 1].copy()
    return ConvexShape(2, V, F, N, _areas(2, V, F), window, kind)


# ----------------------------------------------------------------------------
# normal sampling


def _angle_key(N):
    """Sort key for 2-d normals by angle, exact near both ends."""
    upper = N[:, 1] > N[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.where(upper, -N[:, 0] / N[:, 1], N[:, 1] / N[:, 0])
    return np.lexsort((val, upper))


def sample_normals_1d(samples: int, depth: Optional[float] = None) -> np.ndarray:
    """Unit normals in the quarter circle sorted by angle: `samples`
    uniform angles, plus (when depth is given) geometric refinement
    towards both ends down to angle exp(-depth)."""
    if samples < 2:
        raise ValueError("need at least two samples")
    th = np.linspace(0.0, np.pi / 2, samples)
    N = np.column_stack([np.cos(th), np.sin(th)])
    N[0] = (1.0, 0.0)
    N[-1] = (0.0, 1.0)
    parts = [N]
    if depth is not None:
        h = th[1] - th[0]
        dz = h / _GRADE_ANGLE
        count = int(math.ceil((math.log(_GRADE_ANGLE) + depth) / dz))
        if count > 0:
            g = _GRADE_ANGLE * np.exp(-dz * np.arange(1, count + 1))
            c, s = np.cos(g), np.sin(g)
            parts += [np.column_stack([c, s]), np.column_stack([s, c])]
    N = np.concatenate(parts)
    N = N[_angle_key(N)]
    # remove duplicates
    keep = np.ones(len(N), dtype=bool)
    keep[1:] = np.any(np.abs(np.diff(N, axis=0)) > 0, axis=1)
    return N[keep]


def simplex_grid(m: int) -> np.ndarray:
    """Barycentric grid {(i, j, m-i-j)/m} on the l1 simplex."""
    i, j = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
    sel = i + j <= m
    i, j = i[sel], j[sel]
    return np.column_stack([i, j, m - i - j]) / float(m)


def sample_simplex_2d(m: int, depth: Optional[float] = None) -> np.ndarray:
    """l1-normalized nodes: the barycentric grid of resolution m plus,
    when depth is given, log-graded rows approaching each edge."""
    P = [simplex_grid(m)]
    if depth is not None and depth > math.log(m):
        z = np.arange(math.log(m) + 0.5, depth + 1e-9, 0.5)
        small = np.exp(-z)
        r = np.arange(1, m) / m
        S, R = np.meshgrid(small, r, indexing="ij")
        S, R = S.ravel(), R.ravel()
        rest = 1.0 - S
        for e in range(3):
            Q = np.empty((len(S), 3))
            o = [k for k in range(3) if k != e]
            Q[:, e] = S
            Q[:, o[0]] = rest * R
            Q[:, o[1]] = rest * (1.0 - R)
            P.append(Q)
    return np.concatenate(P)


def _samples_to_m(samples: int) -> int:
    return max(4, math.isqrt(int(samples)))


# ----------------------------------------------------------------------------
# d = 1: envelope of support lines


def _meet(na, ha, nc, hc):
    det = na[0] * nc[1] - na[1] * nc[0]
    x = (ha * nc[1] - hc * na[1]) / det
    y = (na[0] * hc - nc[0] * ha) / det
    return x, y


def _chain(N, h, sense):
    """Indices of the support lines on the boundary of the intersection of
    half-planes n.x >= h (sense +1) or n.x <= h (sense -1), for normals
    sorted monotonically in angle spanning less than pi."""
    Nl = N.tolist()
    hl = h.tolist()
    stack = []
    for k in range(len(Nl)):
        nk, hk = Nl[k], hl[k]
        while len(stack) >= 2:
            a, b = stack[-2], stack[-1]
            px, py = _meet(Nl[a], hl[a], nk, hk)
            nb = Nl[b]
            dot = nb[0] * px + nb[1] * py
            tol = 1e-13 * (abs(nb[0] * px) + abs(nb[1] * py) + abs(hl[b]))
            if sense * (dot - hl[b]) >= -tol:
                stack.pop()
            else:
                break
        stack.append(k)
    return stack


def _envelope_1d(N, h, sense, lo, hi, extent):
    """Clipped boundary polyline of the half-plane intersection."""
    idx = _chain(N, h, sense)
    Ns, hs = N[idx], h[idx]
    verts = [(_meet(Ns[i], hs[i], Ns[i + 1], hs[i + 1])) for i in range(len(idx) - 1)]
    verts = np.array(verts, dtype=float).reshape(-1, 2)
    if len(verts) == 0:
        base = hs[0] * Ns[0]
        start = end = base
    else:
        start, end = verts[0], verts[-1]
    L = 4.0 * (extent + float(np.abs(verts).max(initial=0.0)) + 1.0)
    n0, n1 = Ns[0], Ns[-1]
    t0 = np.array([-n0[1], n0[0]])
    t1 = np.array([n1[1], -n1[0]])
    P = np.vstack([start + L * t0, verts, end + L * t1])
    return geo.clip_polyline(P, Ns, lo, hi)


def _tension_values(eta, N, what):
    vals = np.asarray(eta(N), dtype=float)
    if np.any(~np.isfinite(vals)):
        raise ValueError("%s is not finite at a sampled direction" % what)
    return vals


def _check_window(window):
    window = float(window)
    if not (window > 0 and math.isfinite(window)):
        raise ValueError("window must be a positive finite number")
    return window


def build_inner_shape(eta: TensionFunction, samples: int = 4096, window: float = DEFAULT_WINDOW) -> ConvexShape:
    """Boundary of {x >= 0 : (x, n) >= eta(n) for all sampled n}, clipped to
    [0, window]^(d+1).

    dim 1: `samples` uniform angles plus geometric refinement near both
    ends of the quarter circle (or the table nodes of a tabulated
    tension). dim 2: barycentric grid of resolution isqrt(samples) plus
    log-graded rows near the edges; the surface is the dual of the upper
    convex hull of the lifted points (p, eta_hat(p))."""
    if int(samples) < 16:
        raise ValueError("samples must be at least 16")
    window = _check_window(window)
    if eta.dim == 1:
        return _inner_1d(eta, int(samples), window)
    return _inner_2d(eta, int(samples), window)


def _inner_1d(eta, samples, window):
    if eta.nodes is not None:
        N = np.asarray(eta.nodes, float)
        N = N[_angle_key(N)]
    else:
        N = sample_normals_1d(samples, depth=min(window + 5.0, _DEPTH_1D))
    h = _tension_values(eta, N, "eta")
    if np.any(h < 0):
        raise ValueError("eta is negative at a sampled direction")
    lo, hi = np.zeros(2), np.full(2, window)
    P, Ns = _envelope_1d(N, h, +1, lo, hi, window)
    if len(P) == 0:
        raise ValueError("the inner body does not meet the window")
    # octant walls beyond the last sampled normals
    if P[0, 0] <= 1e-12 * window and P[0, 1] < window:
        P = np.vstack([[0.0, window], P])
        Ns = np.vstack([[1.0, 0.0], Ns])
    if P[-1, 1] <= 1e-12 * window and P[-1, 0] < window:
        P = np.vstack([P, [window, 0.0]])
        Ns = np.vstack([Ns, [0.0, 1.0]])
    return _polyline_shape(P, Ns, window, "inner")


def _lifted_hull(P, h, upper):
    """Facets (triples of node indices) of the upper (or lower) convex hull
    of the lifted chart points (p1, p2, h)."""
    pts = np.column_stack([P[:, 0], P[:, 1], h])
    try:
        hull = ConvexHull(pts)
    except QhullError:
        # flat lift: a single plane through the three corners
        corners = [int(np.argmax(P[:, k])) for k in range(3)]
        return np.array([corners])
    z = hull.equations[:, 2]
    sel = z > 1e-12 if upper else z < -1e-12
    S = hull.simplices[sel]
    # triangulating merged coplanar facets can leave zero-area triangles
    return S[np.abs(np.linalg.det(P[S])) > 1e-20]


def _dual_surface(P, h, S, target, lo, hi):
    """Triangulated boundary of the polytope {p.x >= h} (or <=), given the
    hull facets S of the lifted nodes. Cells of nodes on the simplex edge
    are closed by moving their chain ends along the receding axes to the
    coordinate value `target`."""
    X = np.linalg.solve(P[S], h[S][..., None])[..., 0]
    unit = P / np.linalg.norm(P, axis=1)[:, None]
    nodes = S.ravel()
    facets = np.repeat(np.arange(len(S)), 3)
    chart = P[:, :2]
    cent = chart[S].mean(axis=1)
    d = cent[facets] - chart[nodes]
    ang = np.arctan2(d[:, 1], d[:, 0])
    order = np.lexsort((ang, nodes))
    nodes, facets, ang = nodes[order], facets[order], ang[order]
    starts = np.flatnonzero(np.r_[True, nodes[1:] != nodes[:-1]])
    counts = np.diff(np.r_[starts, len(nodes)])
    owner = nodes[starts]
    boundary = np.any(P[owner] == 0.0, axis=1)

    tris = []
    tri_nodes = []
    # interior cells: closed rings, fan from the first corner
    sel = (~boundary) & (counts >= 3)
    st, ct, ow = starts[sel], counts[sel], owner[sel]
    reps = ct - 2
    g = np.repeat(np.arange(len(st)), reps)
    j = np.arange(reps.sum()) - np.repeat(np.cumsum(reps) - reps, reps) + 1
    first = facets[st[g]]
    tris.append(np.column_stack([first, facets[st[g] + j], facets[st[g] + j + 1]]))
    tri_nodes.append(ow[g])

    extra = []
    base = len(X)
    for s0, c0, k in zip(starts[boundary], counts[boundary], owner[boundary]):
        ring_f = facets[s0:s0 + c0]
        a = ang[s0:s0 + c0]
        gaps = np.diff(np.r_[a, a[0] + 2 * np.pi])
        cut = int(np.argmax(gaps))
        ring_f = np.roll(ring_f, -(cut + 1))
        a = np.roll(a, -(cut + 1))
        zero = np.flatnonzero(P[k] == 0.0)
        if len(zero) == 1:
            m_first = m_last = int(zero[0])
        else:
            # the end next to the edge towards corner e_j recedes along the
            # other zero axis
            dirs = {}
            for jj in zero:
                e = np.zeros(3)
                e[jj] = 1.0
                dv = e[:2] - P[k, :2]
                dirs[int(jj)] = math.atan2(dv[1], dv[0])
            j0, j1 = int(zero[0]), int(zero[1])

            def closer(angle):
                d0 = abs((angle - dirs[j0] + np.pi) % (2 * np.pi) - np.pi)
                d1 = abs((angle - dirs[j1] + np.pi) % (2 * np.pi) - np.pi)
                return j0 if d0 <= d1 else j1

            near_first = closer(a[0])
            near_last = j1 if near_first == j0 else j0
            other = {j0: j1, j1: j0}
            m_first, m_last = other[near_first], other[near_last]
        ring = X[ring_f]
        pf, pl = ring[0].copy(), ring[-1].copy()
        pf[m_first] = target
        pl[m_last] = target
        close = [pl]
        if m_first != m_last:
            c = ring[-1].copy()
            c[m_last] = target
            c[m_first] = target
            close.append(c)
        close.append(pf)
        poly = np.vstack([ring, close])
        poly = geo.clip_polygon_box(poly, lo, hi)
        if len(poly) < 3:
            continue
        q = len(poly)
        idx = base + np.arange(q)
        tris.append(np.column_stack([np.full(q - 2, idx[0]), idx[1:-1], idx[2:]]))
        tri_nodes.append(np.full(q - 2, k))
        extra.append(poly)
        base += q
    V = np.vstack([X] + extra)
    F = np.concatenate(tris).astype(np.int64)
    Nn = unit[np.concatenate(tri_nodes)]
    V, F, Nn = geo.clip_mesh_box(V, F, Nn, lo, hi)
    return V, F, Nn


def _inner_2d(eta, samples, window):
    m = _samples_to_m(samples)
    P = sample_simplex_2d(m, depth=min(window + 5.0, _DEPTH_2D))
    h = np.asarray(eta.extended(P), dtype=float)
    if np.any(~np.isfinite(h)):
        raise ValueError("eta is not finite at a sampled direction")
    if np.any(h < 0):
        raise ValueError("eta is negative at a sampled direction")
    S = _lifted_hull(P, h, upper=True)
    lo, hi = np.zeros(3), np.full(3, window)
    V, F, Nn = _dual_surface(P, h, S, window, lo, hi)
    return _mesh_shape(V, F, Nn, window, "inner")


def build_wulff_shape(tau: TensionFunction, samples: int = 4096) -> ConvexShape:
    """Part in the positive octant of the boundary of
    {x : (x, n) <= tau(n) for all sampled n}, tau extended to all normals by
    reflection symmetry."""
    if int(samples) < 16:
        raise ValueError("samples must be at least 16")
    if tau.dim == 1:
        N = sample_normals_1d(int(samples))
        h = _tension_values(tau, N, "tau")
        if np.any(h <= 0):
            raise ValueError("tau must be strictly positive")
        N, h = N[::-1], h[::-1]
        P, Ns = _envelope_1d(N, h, -1, np.zeros(2), np.full(2, np.inf), float(h.max()) * 4)
        if len(P) == 0:
            raise ValueError("empty Wulff shape")
        return _polyline_shape(P, Ns, math.inf, "wulff")
    m = _samples_to_m(samples)
    P = simplex_grid(m)
    h = np.asarray(tau.extended(P), dtype=float)
    if np.any(~np.isfinite(h)):
        raise ValueError("tau is not finite at a sampled direction")
    if np.any(h <= 0):
        raise ValueError("tau must be strictly positive")
    S = _lifted_hull(P, h, upper=False)
    V, F, Nn = _dual_surface(P, h, S, 0.0, np.zeros(3), np.full(3, np.inf))
    return _mesh_shape(V, F, Nn, math.inf, "wulff")


# ----------------------------------------------------------------------------
# functionals and volumes


def functional_value(weight: TensionFunction, shape: ConvexShape) -> float:
    """Sum over facets of weight(normal) * area."""
    if weight.dim != shape.dim:
        raise ValueError("weight and shape dimensions differ")
    if shape.n_facets == 0:
        return 0.0
    w = np.asarray(weight(shape.facet_normals), dtype=float)
    return float(np.dot(w, shape.facet_areas))


def _graph_volume(shape, lo, hi):
    """Corner-side volume of the shape inside the box [lo, hi].

    Wulff bodies: the region under the surface. Inner bodies: the box minus
    the part of the body inside it; floor columns not covered by the
    surface lie entirely outside the body."""
    if shape.dim == 1:
        below, cover = geo.graph_volume_1d(shape.vertices, lo, hi)
    else:
        below, cover = geo.graph_volume_2d(shape.vertices, shape.faces, lo, hi)
    if shape.kind == "wulff":
        return below
    box = float(np.prod(np.asarray(hi) - np.asarray(lo)))
    height = float(hi[-1] - lo[-1])
    return box - (height * cover - below)


def _tail_estimate(shape):
    """Volume beyond the window, per axis, from the decay between the two
    outermost slabs of width W/20 (geometric extrapolation). Zero when the
    outer slab is empty; raises when the slabs do not decay."""
    W = shape.window
    d1 = shape.dim + 1
    delta = W / 20.0
    total = 0.0
    for axis in range(d1):
        lo = np.zeros(d1)
        hi = np.full(d1, W)
        lo[axis], hi[axis] = W - delta, W
        s_out = _graph_volume(shape, lo, hi)
        lo[axis], hi[axis] = W - 2 * delta, W - delta
        s_in = _graph_volume(shape, lo, hi)
        if s_out <= 1e-12 * W ** d1:  # empty slab up to roundoff
            continue
        r = s_out / s_in if s_in > 0 else 1.0
        if r >= 0.9:
            raise ValueError("volume beyond the window does not decay; enlarge the window")
        total += s_out * r / (1.0 - r)
    return total


def _check_closed(shape):
    V = shape.vertices
    if len(V) == 0:
        raise ValueError("empty shape")
    if shape.dim == 1:
        W = shape.window
        ends = (V[0], V[-1])
        tol = 1e-9 * (1.0 + (np.abs(V).max()))
        if shape.kind in ("inner", "cube"):
            ok0 = ends[0][0] <= tol or ends[0][1] >= W - tol
            ok1 = ends[1][1] <= tol or ends[1][0] >= W - tol
        else:
            ok0 = ends[0][0] <= tol
            ok1 = ends[1][1] <= tol
        if not (ok0 and ok1):
            raise ValueError("shape is open: polyline does not end on the window or the axes")
        return
    E = np.concatenate([shape.faces[:, [0, 1]], shape.faces[:, [1, 2]], shape.faces[:, [2, 0]]])
    E = np.sort(E, axis=1)
    uniq, cnt = np.unique(E, axis=0, return_counts=True)
    border = uniq[cnt == 1]
    if len(border) == 0:
        return
    A, B = V[border[:, 0]], V[border[:, 1]]
    tol = 1e-7 * (1.0 + float(np.abs(V[np.isfinite(V)]).max()))
    on = np.zeros(len(border), dtype=bool)
    for axis in range(3):
        on |= (np.abs(A[:, axis]) <= tol) & (np.abs(B[:, axis]) <= tol)
        if math.isfinite(shape.window):
            W = shape.window
            on |= (np.abs(A[:, axis] - W) <= tol) & (np.abs(B[:, axis] - W) <= tol)
    if not np.all(on):
        raise ValueError("shape is open: boundary edges off the window and the walls")


def enclosed_volume(shape: ConvexShape, side: str = "origin") -> float:
    """Volume between the octant corner and the shape ("origin"), or inside
    the convex body ("infinity", bounded Wulff bodies only, where the body
    is the region on the corner side).

    For truncated inner shapes the part beyond the window is estimated by
    geometric extrapolation of the two outermost slabs along each axis."""
    if side not in ("origin", "infinity"):
        raise ValueError("side must be 'origin' or 'infinity'")
    if side == "infinity" and shape.kind != "wulff":
        raise ValueError("the inner body is unbounded; its volume is infinite")
    _check_closed(shape)
    d1 = shape.dim + 1
    if math.isfinite(shape.window):
        hi = np.full(d1, shape.window)
        vol = _graph_volume(shape, np.zeros(d1), hi)
        if shape.kind == "inner":
            vol += _tail_estimate(shape)
        return vol
    hi = shape.vertices.max(axis=0) * (1.0 + 1e-12) + 1e-300
    return _graph_volume(shape, np.zeros(d1), hi)


def _box_volume(shape, B):
    """Corner-side volume of an inner shape inside [0, B]^(d+1)."""
    if B > shape.window:
        return enclosed_volume(shape)
    d1 = shape.dim + 1
    return _graph_volume(shape, np.zeros(d1), np.full(d1, B))


def unit_volume_functional(eta: TensionFunction, shape: ConvexShape) -> float:
    """Functional of the shape rescaled to unit enclosed volume."""
    vol = enclosed_volume(shape)
    if vol <= 0:
        raise ValueError("shape encloses no volume")
    return functional_value(eta, shape) * vol ** (-shape.dim / (shape.dim + 1.0))


# ----------------------------------------------------------------------------
# cube problem: dilatation and scaled maximizer


@dataclass(frozen=True)
class CubeProblem:
    """Maximize the eta-functional over admissible surfaces in [0, N]^(d+1)
    cutting off corner-side volume V."""

    N: float
    V: float
    eta: TensionFunction

    def __post_init__(self):
        if not (self.N > 0 and math.isfinite(self.N)):
            raise ValueError("N must be positive")
        top = self.N ** (self.eta.dim + 1)
        if not (0 < self.V < top):
            raise ValueError("V must lie in (0, N^(d+1))")

    @property
    def dim(self) -> int:
        return self.eta.dim


def _dilated_volume(G, lam, N):
    return lam ** (G.dim + 1) * _box_volume(G, N / lam)


def solve_dilatation(problem: CubeProblem, samples: int = 4096, window: float = DEFAULT_WINDOW,
                     shape: Optional[ConvexShape] = None) -> float:
    """lambda with vol([0,N]^(d+1) minus lambda*K) = V, by bisection.

    `shape` may pass a prebuilt inner shape of problem.eta."""
    G = shape if shape is not None else build_inner_shape(problem.eta, samples, window)
    N, V = problem.N, problem.V
    d1 = problem.dim + 1
    # windowed volume seeds the bracket; tabulated tensions need not have decaying tails
    full = _graph_volume(G, np.zeros(d1), np.full(d1, G.window))
    if not full > 0:
        raise ValueError("the volume map vanishes identically (degenerate tension); V is unattainable")
    lo = (V / full) ** (1.0 / d1)
    # the volume map increases with lambda; stay inside the window when V is
    # reached there, so the tail beyond it is never needed
    lam_w = N / G.window
    f_w = _dilated_volume(G, lam_w, N)
    if f_w <= V:
        lo = max(lo, lam_w)
    f_lo = _dilated_volume(G, lo, N)
    while f_lo > V:
        lo *= 0.5
        if lo < lam_w < 2.0 * lo and f_w <= V:
            lo = lam_w
        f_lo = _dilated_volume(G, lo, N)
    hi = lo
    for _ in range(200):
        hi *= 2.0
        if _dilated_volume(G, hi, N) >= V:
            break
    else:
        raise ValueError("V is above the attainable range for this cube")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _dilated_volume(G, mid, N) < V:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    got = _dilated_volume(G, lam, N)
    if abs(got - V) > 1e-8 * V:
        raise ValueError("dilatation did not converge (volume %.3g vs %.3g)" % (got, V))
    return lam


def _clip_to_cube(shape, N):
    d1 = shape.dim + 1
    lo, hi = np.zeros(d1), np.full(d1, N)
    if shape.dim == 1:
        P, Ns = geo.clip_polyline(shape.vertices, shape.facet_normals, lo, hi)
        if len(P) == 0:
            raise ValueError("shape misses the cube")
        return _polyline_shape(P, Ns, N, "cube")
    V, F, Nn = geo.clip_mesh_box(shape.vertices, shape.faces, shape.facet_normals, lo, hi)
    return _mesh_shape(V, F, Nn, N, "cube")


def cube_faces_shape(N: float, dim: int) -> ConvexShape:
    """The faces of [0, N]^(d+1) through the origin, as a shape."""
    N = float(N)
    if dim == 1:
        P = np.array([[0.0, N], [0.0, 0.0], [N, 0.0]])
        return _polyline_shape(P, np.array([[1.0, 0.0], [0.0, 1.0]]), N, "cube")
    V = []
    F = []
    Ns = []
    for k in range(3):
        a, b = [q for q in range(3) if q != k]
        quad = np.zeros((4, 3))
        quad[1, a] = N
        quad[2, a] = N
        quad[2, b] = N
        quad[3, b] = N
        base = len(V) * 4
        V.append(quad)
        F += [[base, base + 1, base + 2], [base, base + 2, base + 3]]
        e = np.zeros(3)
        e[k] = 1.0
        Ns += [e, e]
    return _mesh_shape(np.vstack(V), np.array(F), np.array(Ns), N, "cube")


LARGENESS_TOL = 1e-3


def scaled_maximizer(problem: CubeProblem, samples: int = 4096, window: float = DEFAULT_WINDOW) -> ConvexShape:
    """[0, N]^(d+1) intersected with lambda * G_eta, lambda from
    solve_dilatation.

    Largeness check: the share of the eta-functional of lambda * G_eta lying
    outside the cube must stay below LARGENESS_TOL, i.e. the cube may only
    cut the asymptotic tails next to the axes. A tension vanishing at every
    sampled normal gives the degenerate axis-hugging shape (the cube faces
    through the origin) with functional 0."""
    G = build_inner_shape(problem.eta, samples, window)
    if not np.any(problem.eta(G.facet_normals) > 0):
        return cube_faces_shape(problem.N, problem.dim)
    lam = solve_dilatation(problem, shape=G)
    if lam * G.window < problem.N:
        G = build_inner_shape(problem.eta, samples, problem.N / lam * 1.05)
        lam = solve_dilatation(problem, shape=G)
    big = G.scaled(lam)
    clipped = _clip_to_cube(big, problem.N)
    f_all = functional_value(problem.eta, big)
    f_in = functional_value(problem.eta, clipped)
    if f_all > 0 and (f_all - f_in) > LARGENESS_TOL * f_all:
        raise ValueError(
            "cube too small: %.3g of the functional lies outside [0, N]^(d+1)" % ((f_all - f_in) / f_all)
        )
    return clipped


def wulff_minimizer(tau: TensionFunction, Lambda: float, samples: int = 4096) -> ConvexShape:
    """Wulff shape of tau rescaled to enclose volume Lambda."""
    if not Lambda > 0:
        raise ValueError("Lambda must be positive")
    Wt = build_wulff_shape(tau, samples)
    F = functional_value(tau, Wt)
    d1 = tau.dim + 1
    s = (Lambda * d1 / F) ** (1.0 / d1)
    return Wt.scaled(s)


# ----------------------------------------------------------------------------
# duality with the Wulff problem


def dual_tension(eta: TensionFunction, N: float, check_samples: int = 1024) -> TensionFunction:
    """n -> N |n|_1 - eta(|n|), symmetric under reflections; verified
    positive on a sample of directions."""
    N = float(N)
    if not N > 0:
        raise ValueError("N must be positive")

    def ev(n):
        a = np.abs(n)
        return N * a.sum(axis=-1) - eta(a)

    def hom_exact(v):
        a = np.abs(v)
        return N * a.sum(axis=-1) - eta.homogeneous(a)

    exact = eta.homogeneous is not None and eta.mollification_delta == 0
    hom = hom_exact if exact else None

    tau = TensionFunction(eta.dim, ev, name="dual-" + eta.name, symmetric=True, homogeneous=hom)
    if eta.dim == 1:
        probe = sample_normals_1d(check_samples)
    else:
        P = simplex_grid(max(4, math.isqrt(check_samples)))
        probe = P / np.linalg.norm(P, axis=1)[:, None]
    if eta.nodes is not None:
        probe = np.vstack([probe, eta.nodes])
    if np.any(tau(probe) <= 0):
        raise ValueError("N is too small: the dual tension is not positive")
    return tau


def projection_area(shape: ConvexShape, N: float) -> float:
    """Area of the projection onto the plane orthogonal to (1, ..., 1):
    sum of (n . 1/sqrt(d+1)) * area over facets."""
    tol = 1e-9 * max(1.0, N)
    if np.any(shape.vertices > N + tol) or np.any(shape.vertices < -tol):
        raise ValueError("shape is not inside the cube [0, N]^(d+1)")
    if np.any(shape.facet_normals < -1e-12):
        raise ValueError("facet normals outside the octant")
    d1 = shape.dim + 1
    c = shape.facet_normals.sum(axis=1) / math.sqrt(d1)
    return float(np.dot(c, shape.facet_areas))


def duality_residual(eta: TensionFunction, N: float, shape: ConvexShape) -> float:
    """|V_eta(G) + W_tau(G) - N sqrt(d+1) S(P(G))| with tau the dual tension.

    Facetwise eta(n) + tau(n) = N |n|_1 = |OA| (n . OA/|OA|) for
    A = (N, ..., N), so the sum equals |OA| times the projected area."""
    tau = dual_tension(eta, N)
    d1 = shape.dim + 1
    lhs = functional_value(eta, shape) + functional_value(tau, shape)
    return abs(lhs - N * math.sqrt(d1) * projection_area(shape, N))


def perturbed_staircase(rng, N: float, V: float, steps: int = 8, tilt: float = 0.3) -> ConvexShape:
    """Random admissible polyline in [0, N]^2 cutting off area V: a
    staircase whose treads and risers are tilted so every normal lies
    strictly inside the quarter circle."""
    for _ in range(1000):
        xs = np.sort(rng.uniform(0.0, 1.0, steps))
        ys = np.sort(rng.uniform(0.0, 1.0, steps))[::-1]
        widths = np.diff(np.r_[0.0, xs])
        drops = -np.diff(np.r_[ys, 0.0])
        pts = [(0.0, ys[0])]
        x, y = 0.0, ys[0]
        for k in range(steps):
            a = rng.uniform(0.05, tilt)
            b = rng.uniform(0.05, tilt)
            # tread: move right, sink a fraction of the next drop
            x += widths[k] * (1 - b)
            y -= drops[k] * a
            pts.append((x, y))
            # riser: drop the rest, drift right a little
            x += widths[k] * b
            y = ys[k + 1] if k < steps - 1 else 0.0
            pts.append((x, y))
        P = np.array(pts)
        if np.any(np.diff(P[:, 0]) <= 0) or np.any(np.diff(P[:, 1]) >= 0):
            continue
        area = geo.graph_volume_1d(P, np.zeros(2), np.full(2, np.inf))[0]
        P *= math.sqrt(V / area)
        if P.max() >= N:
            continue
        d = np.diff(P, axis=0)
        nrm = np.column_stack([-d[:, 1], d[:, 0]])
        P = np.vstack([[0.0, N], P, [N, 0.0]])
        nrm = np.vstack([[1.0, 0.0], nrm, [0.0, 1.0]])
        return _polyline_shape(P, nrm, N, "cube")
    raise ValueError("could not place a staircase of this volume in the cube")
