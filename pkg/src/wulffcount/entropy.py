"""Entropy weights on the admissible normals: the Young-diagram weight on
the quarter circle, the plane-partition weight on the spherical triangle,
their 1-homogeneous extensions, and boundary mollification."""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .special_fns import lobachevsky

_NORM_TOL = 1e-12


def make_direction(v, normalize: bool = True) -> np.ndarray:
    """Validate (and by default normalize) a direction with nonnegative
    components in dimension 2 or 3."""
    n = np.asarray(v, dtype=float)
    if n.ndim != 1 or n.size not in (2, 3):
        raise ValueError("a direction has 2 or 3 components")
    if np.any(~np.isfinite(n)) or np.any(n < 0):
        raise ValueError("direction components must be finite and nonnegative")
    r = np.linalg.norm(n)
    if r == 0:
        raise ValueError("zero vector is not a direction")
    if normalize:
        return n / r
    if abs(r - 1.0) > _NORM_TOL:
        raise ValueError("direction is not a unit vector")
    return n


def _shares(n):
    """l1 shares q = n/|n|_1 and log q with the dominant log taken through
    log1p, so values stay relatively accurate next to the boundary."""
    s = n.sum(axis=-1, keepdims=True)
    q = n / s
    with np.errstate(divide="ignore"):
        logq = np.log(q)
    k = np.argmax(q, axis=-1)[..., None]
    rest = s[..., 0] - np.take_along_axis(n, k, axis=-1)[..., 0]
    logdom = np.log1p(-rest / s[..., 0])
    np.put_along_axis(logq, k, logdom[..., None], axis=-1)
    return s[..., 0], q, logq


def _entropy_l1(n):
    """-sum n_i ln(n_i/|n|_1), the 1-homogeneous Shannon form."""
    n = np.asarray(n, dtype=float)
    s, q, logq = _shares(n)
    with np.errstate(invalid="ignore"):
        terms = np.where(q > 0, q * logq, 0.0)
    return -s * terms.sum(axis=-1)


def _lob_sum_l1(n):
    """(|n|_1/pi) sum L(pi n_i/|n|_1); the dominant term is taken through
    L(pi - x) = -L(x) to keep precision near the corners."""
    n = np.asarray(n, dtype=float)
    s = n.sum(axis=-1, keepdims=True)
    q = n / s
    k = np.argmax(q, axis=-1)[..., None]
    others = (s[..., 0:1] - np.take_along_axis(n, k, axis=-1)) / s
    others = np.clip(others, 0.0, 1.0)
    vals = lobachevsky(np.pi * np.clip(q, 0.0, 1.0))
    np.put_along_axis(vals, k, -lobachevsky(np.pi * others), axis=-1)
    return s[..., 0] / np.pi * vals.sum(axis=-1)


def eta_young(n):
    """-(n1 ln(n1/(n1+n2)) + n2 ln(n2/(n1+n2))), with 0 ln 0 = 0.

    Vectorized over leading axes; the last axis holds the components."""
    out = _entropy_l1(n)
    return float(out) if np.ndim(out) == 0 else out


def eta_skyscraper(n):
    """(|n|_1/pi) sum_i L(pi n_i/|n|_1) with L the Lobachevsky function."""
    out = _lob_sum_l1(n)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class TensionFunction:
    """A nonnegative weight on unit normals of dimension ``dim + 1``.

    ``evaluator`` maps an array (..., dim+1) of unit vectors with
    nonnegative entries to values. With ``symmetric`` set, arguments with
    negative entries are reflected into the octant before evaluation.
    ``homogeneous`` optionally gives a direct 1-homogeneous extension.
    ``nodes`` optionally fixes the directions used by shape builders
    (tabulated tensions)."""

    dim: int
    evaluator: Callable
    mollification_delta: float = 0.0
    name: str = "tension"
    symmetric: bool = False
    homogeneous: Optional[Callable] = None
    nodes: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if self.mollification_delta < 0:
            raise ValueError("mollification width must be nonnegative")

    def __call__(self, n):
        n = np.asarray(n, dtype=float)
        if n.shape[-1] != self.dim + 1:
            raise ValueError("direction has the wrong number of components")
        if self.symmetric:
            n = np.abs(n)
        elif np.any(n < -1e-12):
            raise ValueError("normal outside the admissible octant")
        else:
            n = np.maximum(n, 0.0)
        vals = np.asarray(self.evaluator(n), dtype=float)
        if self.mollification_delta > 0:
            vals = vals * _band_factor(n, self.mollification_delta)
        return float(vals) if vals.ndim == 0 else vals

    def extended(self, v):
        """1-homogeneous extension |v|_2 * eta(v/|v|_2), vectorized."""
        v = np.asarray(v, dtype=float)
        r = np.linalg.norm(v, axis=-1)
        if np.any(r == 0):
            raise ValueError("zero vector has no direction")
        if self.homogeneous is not None and self.mollification_delta == 0:
            vv = np.abs(v) if self.symmetric else v
            out = np.asarray(self.homogeneous(vv), dtype=float)
        else:
            out = r * np.asarray(self(v / r[..., None]), dtype=float)
        return float(out) if out.ndim == 0 else out


def inradius(dim: int) -> float:
    """Angular distance from the centre of the spherical simplex to its
    boundary."""
    return math.asin(1.0 / math.sqrt(dim + 1))


def boundary_distance(n):
    """Angular distance of unit normals to the boundary of the octant
    simplex, min_i arcsin(n_i)."""
    n = np.clip(np.asarray(n, dtype=float), 0.0, 1.0)
    return np.arcsin(n).min(axis=-1)


def _band_factor(n, delta):
    dist = boundary_distance(n)
    return np.clip((dist - 0.5 * delta) / (0.5 * delta), 0.0, 1.0)


ETA_YOUNG = TensionFunction(1, eta_young, name="young", homogeneous=_entropy_l1)
ETA_SKYSCRAPER = TensionFunction(2, eta_skyscraper, name="skyscraper", homogeneous=_lob_sum_l1)


def homogeneous_extension(eta: TensionFunction, v) -> float:
    """|v|_2 * eta(v/|v|_2) for a nonzero vector with nonnegative entries."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != eta.dim + 1:
        raise ValueError("vector has the wrong number of components")
    if np.any(v < 0) and not eta.symmetric:
        raise ValueError("components must be nonnegative")
    return eta.extended(v)


def mollify(eta: TensionFunction, delta: float) -> TensionFunction:
    """Force eta to zero on the band of angular width delta/2 along the
    boundary, ramping linearly back to eta at distance delta."""
    delta = float(delta)
    if delta < 0 or not math.isfinite(delta):
        raise ValueError("delta must be a finite nonnegative number")
    if delta == 0:
        return eta
    if delta >= inradius(eta.dim):
        raise ValueError("delta must be smaller than the inradius %.6f" % inradius(eta.dim))
    return replace(eta, mollification_delta=delta, name=eta.name + "-mollified")


def constant_tension(value: float, dim: int) -> TensionFunction:
    """Isotropic weight, symmetric under reflections."""
    value = float(value)

    def ev(n):
        return np.full(np.shape(n)[:-1], value)

    def hom(v):
        return value * np.linalg.norm(v, axis=-1)

    return TensionFunction(dim, ev, name="constant", symmetric=True, homogeneous=hom)


def l1_tension(dim: int) -> TensionFunction:
    """n -> |n_1| + ... + |n_{d+1}|, the support function of the unit cube."""

    def ev(n):
        return np.abs(n).sum(axis=-1)

    return TensionFunction(dim, ev, name="l1", symmetric=True, homogeneous=ev)


def zero_tension(dim: int) -> TensionFunction:
    def ev(n):
        return np.zeros(np.shape(n)[:-1])

    return TensionFunction(dim, ev, name="zero", homogeneous=ev)


def tabulated_tension(directions, values, dim: Optional[int] = None) -> TensionFunction:
    """Tension given by samples (direction, value).

    Directions are normalized on load. Boundary directions missing from the
    table are added with value 0, so the tension vanishes on the boundary.
    For dim 1 the value is interpolated linearly in angle and the table
    directions become the builder's nodes. For dim 2 the l1-homogeneous
    values are interpolated piecewise linearly over a Delaunay triangulation
    of the l1 simplex chart, which keeps them nonnegative."""
    D = np.asarray(directions, dtype=float)
    y = np.asarray(values, dtype=float)
    if D.ndim != 2 or D.shape[1] not in (2, 3) or len(D) != len(y):
        raise ValueError("table must have rows of 2 or 3 direction components and a value")
    if dim is None:
        dim = D.shape[1] - 1
    if D.shape[1] != dim + 1:
        raise ValueError("table dimension does not match")
    if np.any(D < 0) or np.any(~np.isfinite(D)) or np.any(~np.isfinite(y)):
        raise ValueError("table directions must be finite and nonnegative")
    if np.any(y < 0):
        raise ValueError("table values must be nonnegative")
    r = np.linalg.norm(D, axis=1)
    if np.any(r == 0):
        raise ValueError("table contains a zero direction")
    D = D / r[:, None]
    if dim == 1:
        ang = np.arctan2(D[:, 1], D[:, 0])
        order = np.argsort(ang, kind="stable")
        ang, yy, D = ang[order], y[order], D[order]
        # duplicate angles: keep the last entry
        keep = np.append(np.diff(ang) > 0, True)
        ang, yy, D = ang[keep], yy[keep], D[keep]
        if ang[0] > 0:
            ang, yy, D = np.r_[0.0, ang], np.r_[0.0, yy], np.vstack([[1.0, 0.0], D])
        if ang[-1] < np.pi / 2:
            ang, yy, D = np.r_[ang, np.pi / 2], np.r_[yy, 0.0], np.vstack([D, [0.0, 1.0]])

        def ev(n):
            return np.interp(np.arctan2(n[..., 1], n[..., 0]), ang, yy)

        return TensionFunction(1, ev, name="table", nodes=D)

    from scipy.interpolate import LinearNDInterpolator

    s = D.sum(axis=1)
    chart = D[:, :2] / s[:, None]
    hv = y / s
    # repeated chart points (e.g. many frozen samples) are averaged
    key = np.round(chart, 12)
    uniq, inv = np.unique(key, axis=0, return_inverse=True)
    inv = inv.ravel()
    hv = np.bincount(inv, weights=hv) / np.bincount(inv)
    chart = uniq
    # zero values along the edges, where the table has no point
    t = np.linspace(0.0, 1.0, 65)
    corners = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    edge = np.concatenate([(1 - t)[:, None] * corners[i] + t[:, None] * corners[(i + 1) % 3] for i in range(3)])
    edge = np.unique(np.round(edge, 12), axis=0)
    have = {tuple(r) for r in chart.tolist()}
    edge = np.array([r for r in edge.tolist() if tuple(r) not in have]).reshape(-1, 2)
    chart = np.vstack([chart, edge])
    hv = np.r_[hv, np.zeros(len(edge))]
    interp = LinearNDInterpolator(chart, hv, fill_value=np.nan)

    def ev(n):
        n = np.asarray(n, dtype=float)
        ss = n.sum(axis=-1)
        c = n[..., :2] / ss[..., None]
        out = interp(c)
        if np.any(np.isnan(out)):
            raise ValueError("direction outside the tabulated range")
        # convex combinations of nonnegative data; drop barycentric roundoff
        return ss * np.maximum(out, 0.0)

    return TensionFunction(2, ev, name="table")
