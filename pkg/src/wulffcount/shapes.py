"""Closed-form limit shapes (the Vershik curve and the Cerf-Kenyon
surface), the support identity linking them to the plane-partition
weight, and a Hausdorff metric between discretized shapes."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import _geometry as geo
from .special_fns import CONSTANTS, lobachevsky, ronkin_f
from .wulff import ConvexShape, _mesh_shape, _polyline_shape, simplex_grid

YOUNG_SCALE = math.sqrt(6.0) / math.pi
SKYSCRAPER_SCALE = (CONSTANTS.zeta3 / 4.0) ** (-1.0 / 3.0)


@dataclass(frozen=True)
class SimplexPoint:
    """(A, B, C) with positive entries summing to 1."""

    A: float
    B: float
    C: float

    def __post_init__(self):
        v = (self.A, self.B, self.C)
        if not all(math.isfinite(x) and x > 0 for x in v):
            raise ValueError("simplex point needs positive entries")
        if abs(sum(v) - 1.0) > 1e-12:
            raise ValueError("simplex point entries must sum to 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C])


def _triple(p, closed=False):
    if isinstance(p, SimplexPoint):
        return p.as_array()
    a = np.asarray(p, dtype=float)
    if a.shape != (3,) or np.any(~np.isfinite(a)):
        raise ValueError("expected three coordinates")
    if np.any(a < 0) or (not closed and np.any(a == 0)):
        raise ValueError("point is not inside the simplex")
    if abs(a.sum() - 1.0) > 1e-12:
        raise ValueError("simplex coordinates must sum to 1")
    return a


def vershik_point(t, scaled: bool = False):
    """(-ln t, -ln(1-t)), times sqrt(6)/pi when scaled. Vectorized in t."""
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)) or np.any(~(t < 1)):
        raise ValueError("t must lie strictly between 0 and 1")
    pt = np.stack([-np.log(t), -np.log1p(-t)], axis=-1)
    return pt * YOUNG_SCALE if scaled else pt


def cerf_kenyon_point(p, scaled: bool = False) -> np.ndarray:
    """(f - ln A, f - ln B, f - ln C) with f = ronkin_f(A, B, C); scaled
    multiplies by (zeta(3)/4)^(-1/3)."""
    a = _triple(p)
    f = ronkin_f(*a)
    # frozen triples give f = ln(max), so that coordinate is exactly 0
    x = f - np.log(a)
    return x * SKYSCRAPER_SCALE if scaled else x


def facet_densities(p) -> np.ndarray:
    """Normal of the Cerf-Kenyon surface at p in l1 normalization.

    Each entry is the angle opposite the corresponding side of the
    triangle with side lengths (A, B, C), divided by pi; when the triangle
    degenerates the largest side gets 1."""
    a = _triple(p, closed=True)
    k = int(np.argmax(a))
    if a[k] >= a.sum() - a[k]:
        out = np.zeros(3)
        out[k] = 1.0
        return out
    A, B, C = a
    alpha = math.acos(min(1.0, max(-1.0, (B * B + C * C - A * A) / (2 * B * C))))
    beta = math.acos(min(1.0, max(-1.0, (A * A + C * C - B * B) / (2 * A * C))))
    pa, pb = alpha / math.pi, beta / math.pi
    return np.array([pa, pb, 1.0 - pa - pb])


def support_identity_residual(p) -> float:
    """|x . q - (1/pi) sum L(pi q_i)| with x the raw Cerf-Kenyon point and q
    the facet densities at p."""
    x = cerf_kenyon_point(p)
    q = facet_densities(p)
    return abs(float(x @ q) - float(np.sum(lobachevsky(np.pi * q))) / math.pi)


def vershik_polyline(samples: int, scaled: bool = False, span: float = 12.0) -> ConvexShape:
    """The Vershik curve sampled at t = logistic(z), z uniform in
    [-span, span]; normals are the exact curve normals at the samples."""
    z = np.linspace(-span, span, int(samples))
    t = 1.0 / (1.0 + np.exp(-z))
    P = vershik_point(t, scaled)
    d = np.diff(P, axis=0)
    nrm = np.column_stack([-d[:, 1], d[:, 0]])
    return _polyline_shape(P, nrm, math.inf, "sample")


def cerf_kenyon_mesh(m: int, scaled: bool = False):
    """Cerf-Kenyon surface on the barycentric grid of resolution m
    (interior grid points), triangulated like the grid.

    Returns (vertices, faces, simplex_points)."""
    P = simplex_grid(m)
    inner = np.all(P > 0, axis=1)
    idx = -np.ones(len(P), dtype=np.int64)
    idx[inner] = np.arange(inner.sum())
    Q = P[inner]
    X = np.array([cerf_kenyon_point(q, scaled) for q in Q]).reshape(-1, 3)
    # grid index lookup
    ij = np.rint(P[:, :2] * m).astype(np.int64)
    lut = -np.ones((m + 1, m + 1), dtype=np.int64)
    lut[ij[:, 0], ij[:, 1]] = idx
    F = []
    for i in range(m):
        for j in range(m - i):
            a, b, c = lut[i, j], lut[i + 1, j], lut[i, j + 1]
            if min(a, b, c) >= 0:
                F.append((a, b, c))
            if i + j + 2 <= m:
                d = lut[i + 1, j + 1]
                if min(b, d, c) >= 0:
                    F.append((b, d, c))
    return X, np.array(F, dtype=np.int64).reshape(-1, 3), Q


def cerf_kenyon_shape(m: int, scaled: bool = False) -> ConvexShape:
    """The sampled Cerf-Kenyon mesh as a shape (facet normals from the
    chordal triangles, oriented away from the origin)."""
    X, F, _ = cerf_kenyon_mesh(m, scaled)
    cr = np.cross(X[F[:, 1]] - X[F[:, 0]], X[F[:, 2]] - X[F[:, 0]])
    nn = np.linalg.norm(cr, axis=1)
    good = nn > 0
    F, cr, nn = F[good], cr[good], nn[good]
    nrm = cr / nn[:, None]
    nrm *= np.where(nrm.sum(axis=1) < 0, -1.0, 1.0)[:, None]
    return _mesh_shape(X, F, nrm, math.inf, "sample")


def _facet_distances(Q, shape):
    """Exact distance from each query point to the union of the shape's
    facets. The distance to the nearest vertex bounds the answer; facets
    are grouped by circumradius and each group is searched with a KD-tree
    on centroids using that bound plus the group's largest radius."""
    V, F = shape.vertices, shape.faces
    T = V[F]
    cen = T.mean(axis=1)
    rad = np.linalg.norm(T - cen[:, None, :], axis=2).max(axis=1)
    vtree = cKDTree(V[np.unique(F)])
    upper, _ = vtree.query(Q)
    tier = np.floor(np.log2(np.maximum(rad, 1e-300))).astype(np.int64)
    groups = []
    for t in np.unique(tier):
        members = np.flatnonzero(tier == t)
        groups.append((members, cKDTree(cen[members]), float(rad[members].max())))
    best = upper.copy()
    for start in range(0, len(Q), 2048):
        q = Q[start:start + 2048]
        u = upper[start:start + 2048]
        for members, tree, rmax in groups:
            lists = tree.query_ball_point(q, u + rmax + 1e-12)
            lens = np.fromiter((len(l) for l in lists), dtype=np.int64, count=len(lists))
            if lens.sum() == 0:
                continue
            qi = np.repeat(np.arange(len(q)), lens)
            fi = members[np.concatenate([np.asarray(l, dtype=np.int64) for l in lists])]
            if shape.dim == 1:
                d = geo.point_segment_distance(q[qi], T[fi, 0], T[fi, 1])
            else:
                d = geo.point_triangle_distance(q[qi], T[fi, 0], T[fi, 1], T[fi, 2])
            sub = best[start:start + 2048]
            np.minimum.at(sub, qi, d)
    return best


def _window_vertices(shape, window):
    V = shape.vertices[np.unique(shape.faces)]
    inside = np.all((V >= -1e-12) & (V <= window + 1e-12), axis=1)
    return V[inside]


def hausdorff_distance(a: ConvexShape, b: ConvexShape, window: float) -> float:
    """Symmetric Hausdorff distance restricted to [0, window]^(d+1): the
    largest distance from a vertex of one shape inside the window to the
    facets of the other."""
    if a.dim != b.dim:
        raise ValueError("shapes have different dimensions")
    qa = _window_vertices(a, window)
    qb = _window_vertices(b, window)
    if len(qa) == 0 or len(qb) == 0:
        raise ValueError("a shape has no vertices inside the window")
    return float(max(_facet_distances(qa, b).max(), _facet_distances(qb, a).max()))
