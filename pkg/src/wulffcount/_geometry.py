"""Low-level polygon/mesh helpers: clipping, graph volumes, distances."""

import numpy as np


def clip_segments(P0, P1, lo, hi):
    """Liang-Barsky clipping of segments P0->P1 to the box [lo, hi].

    Returns (t0, t1, keep) with the kept parameter range of each segment."""
    d = P1 - P0
    n = len(P0)
    t0 = np.zeros(n)
    t1 = np.ones(n)
    keep = np.ones(n, dtype=bool)
    for axis in range(P0.shape[1]):
        for p, q in ((-d[:, axis], P0[:, axis] - lo[axis]), (d[:, axis], hi[axis] - P0[:, axis])):
            par = p == 0
            keep &= ~(par & (q < 0))
            with np.errstate(divide="ignore", invalid="ignore"):
                r = q / p
            enter = (~par) & (p < 0)
            leave = (~par) & (p > 0)
            t0 = np.where(enter, np.maximum(t0, r), t0)
            t1 = np.where(leave, np.minimum(t1, r), t1)
    keep &= t0 <= t1
    return t0, t1, keep


def clip_polyline(points, normals, lo, hi):
    """Clip a connected polyline (vertices, one normal per segment) to a box.

    Assumes the part inside the box is connected, as for monotone chains."""
    P0, P1 = points[:-1], points[1:]
    t0, t1, keep = clip_segments(P0, P1, lo, hi)
    d = P1 - P0
    A = P0 + t0[:, None] * d
    B = P0 + t1[:, None] * d
    idx = np.nonzero(keep)[0]
    if len(idx) == 0:
        return np.zeros((0, points.shape[1])), np.zeros((0, points.shape[1]))
    pts = [A[idx[0]]]
    nrm = []
    for i in idx:
        pts.append(B[i])
        nrm.append(normals[i])
    pts, nrm = np.clip(np.array(pts), lo, hi), np.array(nrm)
    # drop degenerate pieces
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    scale = max(1.0, float(np.abs(pts).max()))
    good = seg > 1e-14 * scale
    if not np.any(good):
        return np.zeros((0, points.shape[1])), np.zeros((0, points.shape[1]))
    out_pts = [pts[0]] + [pts[i + 1] for i in np.nonzero(good)[0]]
    out_nrm = nrm[good]
    return np.array(out_pts), np.array(out_nrm)


def clip_polygon(poly, axis, value, keep_below):
    """Sutherland-Hodgman clip of a planar polygon (k, 3) by x[axis] <= value
    (keep_below) or x[axis] >= value."""
    if len(poly) == 0:
        return poly
    s = poly[:, axis] - value
    if not keep_below:
        s = -s
    inside = s <= 0
    if inside.all():
        return poly
    if not inside.any():
        return poly[:0]
    out = []
    k = len(poly)
    for i in range(k):
        j = (i + 1) % k
        a, b = poly[i], poly[j]
        if inside[i]:
            out.append(a)
        if inside[i] != inside[j]:
            t = s[i] / (s[i] - s[j])
            p = a + t * (b - a)
            p[axis] = value
            out.append(p)
    return np.array(out)


def clip_polygon_box(poly, lo, hi):
    for axis in range(poly.shape[1]):
        poly = clip_polygon(poly, axis, lo[axis], keep_below=False)
        poly = clip_polygon(poly, axis, hi[axis], keep_below=True)
        if len(poly) < 3:
            return poly[:0]
    return poly


def triangle_areas(V, F):
    a = V[F[:, 1]] - V[F[:, 0]]
    b = V[F[:, 2]] - V[F[:, 0]]
    return 0.5 * np.linalg.norm(np.cross(a, b), axis=1)


def clip_mesh_box(V, F, N, lo, hi):
    """Clip a triangle mesh with per-face normals to a box."""
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    T = V[F]
    inside = np.all((T >= lo) & (T <= hi), axis=(1, 2))
    outside = np.any(np.all(T < lo, axis=1) | np.all(T > hi, axis=1), axis=1)
    cross = ~inside & ~outside
    keepF = F[inside]
    keepN = N[inside]
    newV = [V]
    newF = [keepF]
    newN = [keepN]
    base = len(V)
    for i in np.nonzero(cross)[0]:
        poly = clip_polygon_box(T[i].copy(), lo, hi)
        if len(poly) < 3:
            continue
        k = len(poly)
        idx = base + np.arange(k)
        tris = np.column_stack([np.full(k - 2, idx[0]), idx[1:-1], idx[2:]])
        newV.append(poly)
        newF.append(tris)
        newN.append(np.repeat(N[i][None], k - 2, axis=0))
        base += k
    V2 = np.concatenate(newV)
    F2 = np.concatenate(newF).astype(np.int64)
    N2 = np.concatenate(newN)
    return compact_mesh(V2, F2, N2)


def compact_mesh(V, F, N, min_area=0.0):
    """Drop faces of tiny area and unused vertices."""
    if len(F):
        A = triangle_areas(V, F)
        scale = max(1.0, float(np.abs(V[F]).max()))
        good = A > max(min_area, 1e-15 * scale * scale)
        F, N = F[good], N[good]
    used = np.zeros(len(V), dtype=bool)
    used[F.ravel()] = True
    remap = np.cumsum(used) - 1
    return V[used], remap[F], N


def weld(V, F, tol):
    """Merge vertices closer than tol; returns (V, F) with faces remapped
    and faces that collapse to a segment removed."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components
    from scipy.spatial import cKDTree

    pairs = cKDTree(V).query_pairs(tol, output_type="ndarray")
    n = len(V)
    g = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, lab = connected_components(g, directed=False)
    _, first = np.unique(lab, return_index=True)
    V2 = V[first]
    F2 = lab[F]
    good = (F2[:, 0] != F2[:, 1]) & (F2[:, 1] != F2[:, 2]) & (F2[:, 2] != F2[:, 0])
    return V2, F2, good


def _piece_integrals(y0, y1, length, a, b):
    """Integral over a segment of clamp(y, a, b) - a with y linear from y0
    to y1 over the given length, split at the crossings of a and b."""
    t = [np.zeros_like(y0), np.ones_like(y0)]
    dy = y1 - y0
    with np.errstate(divide="ignore", invalid="ignore"):
        for c in (a, b):
            tc = (c - y0) / dy
            tc = np.where(np.isfinite(tc), np.clip(tc, 0.0, 1.0), 0.0)
            t.append(tc)
    t = np.sort(np.stack(t), axis=0)
    total = np.zeros_like(y0)
    for k in range(3):
        lo_, hi_ = t[k], t[k + 1]
        mid = 0.5 * (lo_ + hi_)
        ym = y0 + mid * dy
        total += (hi_ - lo_) * (np.clip(ym, a, b) - a)
    return total * length


def graph_volume_1d(P, lo, hi):
    """For a polyline P that is a graph over x (vertical pieces ignored),
    return (area of {lo <= (x, y) <= hi : y below P}, length of the part
    of [lo_x, hi_x] covered by the graph)."""
    x0, y0 = P[:-1, 0], P[:-1, 1]
    x1, y1 = P[1:, 0], P[1:, 1]
    sw = x1 < x0
    x0, x1 = np.where(sw, x1, x0), np.where(sw, x0, x1)
    y0, y1 = np.where(sw, y1, y0), np.where(sw, y0, y1)
    dx = x1 - x0
    xa = np.clip(x0, lo[0], hi[0])
    xb = np.clip(x1, lo[0], hi[0])
    good = (xb > xa) & (dx > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.where(dx > 0, (y1 - y0) / dx, 0.0)
    ya = y0 + slope * (xa - x0)
    yb = y0 + slope * (xb - x0)
    vals = _piece_integrals(ya, yb, xb - xa, lo[1], hi[1])
    return float(np.sum(np.where(good, vals, 0.0))), float(np.sum(np.where(good, xb - xa, 0.0)))


def _poly_graph_integral(poly, a, b):
    """int over the floor projection of a planar polygon of clamp(z,a,b)-a,
    and the projected area."""
    total = 0.0
    p0 = poly[0]
    e1 = poly[1:-1] - p0
    e2 = poly[2:] - p0
    cover = float(np.sum(0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])))
    for part, mode in (
        (clip_polygon(clip_polygon(poly, 2, a, False), 2, b, True), "mid"),
        (clip_polygon(poly, 2, b, False), "top"),
    ):
        if len(part) < 3:
            continue
        p0 = part[0]
        e1 = part[1:-1] - p0
        e2 = part[2:] - p0
        ar = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        if mode == "mid":
            zc = (p0[2] + part[1:-1, 2] + part[2:, 2]) / 3.0
            total += float(np.sum(ar * (zc - a)))
        else:
            total += float(np.sum(ar)) * (b - a)
    return total, cover


def graph_volume_2d(V, F, lo, hi):
    """For a triangulated surface that is a graph over the (x1, x2) plane
    (vertical faces ignored), return (volume of {lo <= x <= hi : x3 below
    the surface}, area of the floor box covered by the graph)."""
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    T = V[F]
    e1 = T[:, 1] - T[:, 0]
    e2 = T[:, 2] - T[:, 0]
    parea = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    xy = T[:, :, :2]
    z = T[:, :, 2]
    in_floor = np.all((xy >= lo[:2]) & (xy <= hi[:2]), axis=(1, 2))
    off_floor = np.any(np.all(xy <= lo[:2], axis=1) | np.all(xy >= hi[:2], axis=1), axis=1)
    a, b = lo[2], hi[2]
    zin = np.all((z >= a) & (z <= b), axis=1)
    zlow = np.all(z <= a, axis=1)
    zhigh = np.all(z >= b, axis=1)
    live = (parea > 0) & ~off_floor
    total = 0.0
    m = live & in_floor & zin
    total += float(np.sum(parea[m] * (z[m].mean(axis=1) - a)))
    m = live & in_floor & zhigh
    total += float(np.sum(parea[m])) * (b - a)
    done = (live & in_floor & (zin | zhigh | zlow)) | ~live
    cover = float(np.sum(parea[live & in_floor & done]))
    for i in np.nonzero(~done)[0]:
        poly = T[i].copy()
        for axis in (0, 1):
            poly = clip_polygon(poly, axis, lo[axis], keep_below=False)
            poly = clip_polygon(poly, axis, hi[axis], keep_below=True)
        if len(poly) >= 3:
            t, c = _poly_graph_integral(poly, a, b)
            total += t
            cover += c
    return total, cover


def point_segment_distance(Q, A, B):
    """Distances from points Q (k, D) to segments A-B (k, D), pairwise."""
    d = B - A
    dd = np.einsum("ij,ij->i", d, d)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(dd > 0, np.einsum("ij,ij->i", Q - A, d) / dd, 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.linalg.norm(Q - (A + t[:, None] * d), axis=1)


def point_triangle_distance(Q, A, B, C):
    """Distances from points Q to triangles ABC, pairwise (k, 3)."""
    e0 = B - A
    e1 = C - A
    nrm = np.cross(e0, e1)
    nn = np.einsum("ij,ij->i", nrm, nrm)
    w = Q - A
    # barycentric coordinates of the projection
    d00 = np.einsum("ij,ij->i", e0, e0)
    d01 = np.einsum("ij,ij->i", e0, e1)
    d11 = np.einsum("ij,ij->i", e1, e1)
    d20 = np.einsum("ij,ij->i", w, e0)
    d21 = np.einsum("ij,ij->i", w, e1)
    den = d00 * d11 - d01 * d01
    with np.errstate(divide="ignore", invalid="ignore"):
        v = (d11 * d20 - d01 * d21) / den
        u = (d00 * d21 - d01 * d20) / den
        plane = np.abs(np.einsum("ij,ij->i", w, nrm)) / np.sqrt(nn)
        inside = (den > 0) & (v >= 0) & (u >= 0) & (u + v <= 1)
    edge = np.minimum(
        point_segment_distance(Q, A, B),
        np.minimum(point_segment_distance(Q, B, C), point_segment_distance(Q, C, A)),
    )
    return np.where(inside, plane, edge)
