"""Planar domains for the positivity pipelines.

Three shapes are supported: simple polygons (counterclockwise, no holes),
disks, and tubular neighborhoods of simple polylines. Every boundary is
represented internally as an ordered list of exact pieces (segments and
circular arcs, counterclockwise with the interior on the left), which
gives exact perimeters and areas (Green's theorem), arclength-uniform
boundary sampling with outward normals, and three-valued containment with
a configurable boundary tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "GeometryError",
    "ShrinkCollapseError",
    "TubeOverlapError",
    "Disk",
    "Polygon",
    "Tube",
    "TargetSet",
    "BoundarySampling",
    "disk",
    "polygon",
    "tube_of",
    "target_set",
    "densify_polyline",
    "area",
    "perimeter",
    "centroid",
    "circumradius",
    "diameter",
    "sample_boundary",
    "boundary_points_at",
    "boundary_distance",
    "locate",
    "locate_points",
    "contains",
    "inside_mask",
    "shrink",
    "domain_to_json",
    "domain_from_json",
    "load_domain",
    "save_domain",
    "targets_to_json",
    "targets_from_json",
    "load_targets",
]

#: Points within this distance of the boundary are classified as "boundary".
BOUNDARY_TOL = 1e-12

INSIDE, BOUNDARY, OUTSIDE = 1, 0, -1


class GeometryError(ValueError):
    """Invalid geometric input or construction."""


class ShrinkCollapseError(GeometryError):
    """Inward offset collapsed or degenerated; delta is too large."""


class TubeOverlapError(GeometryError):
    """Tube offset self-overlaps; epsilon is too large for this spine."""


# ---------------------------------------------------------------------------
# boundary pieces
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class _Seg:
    a: np.ndarray
    b: np.ndarray

    @property
    def length(self) -> float:
        return float(np.hypot(*(self.b - self.a)))

    def point_at(self, s):
        t = np.asarray(s, dtype=float) / self.length
        return self.a + np.multiply.outer(t, self.b - self.a)

    def normal_at(self, s):
        d = (self.b - self.a) / self.length
        n = np.array([d[1], -d[0]])  # right of travel = outward for CCW
        s = np.asarray(s, dtype=float)
        return np.broadcast_to(n, s.shape + (2,)).copy()

    def green_area(self) -> float:
        return 0.5 * (self.a[0] * self.b[1] - self.b[0] * self.a[1])


@dataclass(frozen=True, eq=False)
class _Arc:
    center: np.ndarray
    radius: float
    t0: float
    t1: float  # t1 > t0, counterclockwise sweep

    @property
    def length(self) -> float:
        return self.radius * (self.t1 - self.t0)

    def point_at(self, s):
        ang = self.t0 + np.asarray(s, dtype=float) / self.radius
        return self.center + self.radius * np.stack([np.cos(ang), np.sin(ang)], axis=-1)

    def normal_at(self, s):
        ang = self.t0 + np.asarray(s, dtype=float) / self.radius
        return np.stack([np.cos(ang), np.sin(ang)], axis=-1)

    def green_area(self) -> float:
        dt = self.t1 - self.t0
        cx, cy = self.center
        r = self.radius
        return 0.5 * (
            r * r * dt
            + cx * r * (math.sin(self.t1) - math.sin(self.t0))
            - cy * r * (math.cos(self.t1) - math.cos(self.t0))
        )


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Disk:
    center: np.ndarray
    radius: float


@dataclass(frozen=True, eq=False)
class Polygon:
    vertices: np.ndarray  # (n, 2), counterclockwise, simple


@dataclass(frozen=True, eq=False)
class Tube:
    """Open epsilon-neighborhood of a simple polyline."""

    spine: np.ndarray  # (m, 2), m >= 2
    epsilon: float
    pieces: tuple  # precomputed boundary pieces


@dataclass(frozen=True, eq=False)
class TargetSet:
    """Finite sample of a compact target set."""

    points: np.ndarray  # (n, 2)


@dataclass(frozen=True, eq=False)
class BoundarySampling:
    points: np.ndarray      # (n, 2) on the boundary
    normals: np.ndarray     # (n, 2) outward unit normals
    arclengths: np.ndarray  # (n,) positions along the boundary
    gaps: np.ndarray        # (n,) chord to the next sample, wrap-around
    max_gap: float


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def disk(center, radius: float) -> Disk:
    c = np.asarray(center, dtype=float).reshape(2)
    if not np.all(np.isfinite(c)):
        raise GeometryError("disk center must be finite")
    if not (radius > 0.0 and math.isfinite(radius)):
        raise GeometryError("disk radius must be positive and finite")
    return Disk(center=c, radius=float(radius))


def _signed_area(verts: np.ndarray) -> float:
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _orient(p, q, r) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _on_segment(p, q, r) -> bool:
    """r collinear with p-q: does r lie on the closed segment?"""
    return (min(p[0], q[0]) - 1e-15 <= r[0] <= max(p[0], q[0]) + 1e-15 and
            min(p[1], q[1]) - 1e-15 <= r[1] <= max(p[1], q[1]) + 1e-15)


def polygon(vertices) -> Polygon:
    """Validated simple polygon; orientation is normalized to counterclockwise."""
    verts = np.asarray(vertices, dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 3:
        raise GeometryError("polygon needs an (n, 2) vertex array with n >= 3")
    if not np.all(np.isfinite(verts)):
        raise GeometryError("polygon vertices must be finite")
    edge_len = np.hypot(*(np.roll(verts, -1, axis=0) - verts).T)
    scale = max(1.0, float(np.max(np.abs(verts))))
    if np.any(edge_len <= 1e-14 * scale):
        raise GeometryError("polygon has a zero-length edge")
    sa = _signed_area(verts)
    if abs(sa) <= 1e-14 * scale * scale:
        raise GeometryError("polygon is degenerate (zero area)")
    if sa < 0.0:
        verts = verts[::-1].copy()
    _require_simple(verts, closed=True)
    return Polygon(vertices=verts)


def _require_simple(verts: np.ndarray, closed: bool) -> None:
    n = len(verts)
    m = n if closed else n - 1
    segs = [(verts[i], verts[(i + 1) % n]) for i in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            adjacent = (j == i + 1) or (closed and i == 0 and j == m - 1)
            if adjacent:
                continue
            if _proper_or_touching_intersect(*segs[i], *segs[j]):
                raise GeometryError(
                    f"self-intersection between edges {i} and {j}; shape must be simple"
                )


def _proper_or_touching_intersect(p1, p2, p3, p4) -> bool:
    d1 = _orient(p3, p4, p1)
    d2 = _orient(p3, p4, p2)
    d3 = _orient(p1, p2, p3)
    d4 = _orient(p1, p2, p4)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and \
            d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True
    for d, (a, b, c) in ((d1, (p3, p4, p1)), (d2, (p3, p4, p2)),
                         (d3, (p1, p2, p3)), (d4, (p1, p2, p4))):
        if d == 0 and _on_segment(a, b, c):
            return True
    return False


def _dedupe_points(pts: np.ndarray) -> np.ndarray:
    keep = [0]
    scale = max(1.0, float(np.max(np.abs(pts))))
    for i in range(1, len(pts)):
        if np.hypot(*(pts[i] - pts[keep[-1]])) > 1e-14 * scale:
            keep.append(i)
    return pts[keep]


def tube_of(spine, epsilon: float):
    """Open epsilon-neighborhood of a polyline: {x : dist(x, spine) < epsilon}.

    A single-point spine yields a disk. The boundary is assembled from
    per-segment offsets joined by circular arcs (outer corners) or trimmed
    at the offset-line intersection (inner corners), plus half-disk end
    caps. The construction is validated against the distance function and
    raises TubeOverlapError when epsilon exceeds what the spine admits.
    """
    if not (epsilon > 0.0 and math.isfinite(epsilon)):
        raise GeometryError("tube epsilon must be positive and finite")
    pts = np.asarray(spine, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, 2)
    if pts.shape[-1] != 2 or not np.all(np.isfinite(pts)):
        raise GeometryError("tube spine must be a finite (m, 2) array")
    pts = _dedupe_points(pts)
    if len(pts) == 1:
        return disk(pts[0], epsilon)
    _require_simple(pts, closed=False)
    pieces = _tube_pieces(pts, float(epsilon))
    _validate_tube_pieces(pieces, pts, float(epsilon))
    return Tube(spine=pts, epsilon=float(epsilon), pieces=pieces)


def _line_intersection(p, dp, q, dq):
    denom = dp[0] * dq[1] - dp[1] * dq[0]
    if abs(denom) < 1e-300:
        return None, None, None
    rhs = q - p
    t = (rhs[0] * dq[1] - rhs[1] * dq[0]) / denom
    s = (rhs[0] * dp[1] - rhs[1] * dp[0]) / denom
    return p + t * dp, t, s


def _ccw_span(a0: float, a1: float) -> tuple[float, float]:
    """Normalize so the sweep a0 -> a1 is counterclockwise in (0, 2*pi]."""
    while a1 <= a0 + 1e-15:
        a1 += 2.0 * math.pi
    return a0, a1


def _tube_pieces(V: np.ndarray, eps: float) -> tuple:
    nseg = len(V) - 1
    d = np.diff(V, axis=0)
    seg_len = np.hypot(d[:, 0], d[:, 1])
    d = d / seg_len[:, None]
    left = np.stack([-d[:, 1], d[:, 0]], axis=1)
    right = -left
    cross = d[:-1, 0] * d[1:, 1] - d[:-1, 1] * d[1:, 0]  # turn at interior vertex j+1

    def side_pieces(normals, forward: bool):
        starts = [V[i] + eps * normals[i] for i in range(nseg)]
        ends = [V[i + 1] + eps * normals[i] for i in range(nseg)]
        joins = [None] * (nseg - 1)  # arc or None at interior vertex j+1
        for j in range(nseg - 1):
            c = cross[j]
            outer = (c > 0.0) if normals is right else (c < 0.0)
            if abs(c) <= 1e-14:
                continue
            if outer:
                a0 = math.atan2(normals[j][1], normals[j][0])
                a1 = math.atan2(normals[j + 1][1], normals[j + 1][0])
                if not forward:
                    a0, a1 = a1, a0
                t0, t1 = _ccw_span(a0, a1)
                joins[j] = _Arc(center=V[j + 1].copy(), radius=eps, t0=t0, t1=t1)
            else:
                P, t, s = _line_intersection(V[j] + eps * normals[j], d[j],
                                             V[j + 1] + eps * normals[j + 1], d[j + 1])
                if P is None:
                    raise TubeOverlapError("offset lines are parallel at a reversal corner")
                if not (0.0 <= t <= seg_len[j] and s <= seg_len[j + 1]):
                    raise TubeOverlapError(
                        "inner offset trim falls outside its segments; epsilon too large"
                    )
                ends[j] = P
                starts[j + 1] = P
        out = []
        order = range(nseg) if forward else range(nseg - 1, -1, -1)
        for i in order:
            a, b = (starts[i], ends[i]) if forward else (ends[i], starts[i])
            if np.hypot(*(b - a)) > 1e-14 * max(1.0, eps):
                out.append(_Seg(a=np.asarray(a), b=np.asarray(b)))
            # join index: backward traversal meets the joint between
            # segments i-1 and i after walking segment i
            j = i if forward else i - 1
            if 0 <= j < nseg - 1 and joins[j] is not None:
                out.append(joins[j])
        return out

    pieces: list = []
    pieces.extend(side_pieces(right, forward=True))
    a_end = math.atan2(right[-1][1], right[-1][0])
    t0, t1 = _ccw_span(a_end, a_end + math.pi)
    pieces.append(_Arc(center=V[-1].copy(), radius=eps, t0=t0, t1=t1))
    pieces.extend(side_pieces(left, forward=False))
    a_start = math.atan2(left[0][1], left[0][0])
    t0, t1 = _ccw_span(a_start, a_start + math.pi)
    pieces.append(_Arc(center=V[0].copy(), radius=eps, t0=t0, t1=t1))
    return tuple(pieces)


def _dist_to_polyline(pts: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Distance from each point to a polyline given by its vertices."""
    a = poly[:-1]
    b = poly[1:]
    ab = b - a
    ab2 = np.sum(ab * ab, axis=1)
    pa = pts[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("pse,se->ps", pa, ab) / ab2[None, :], 0.0, 1.0)
    proj = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    dist = np.hypot(pts[:, None, 0] - proj[:, :, 0], pts[:, None, 1] - proj[:, :, 1])
    return np.min(dist, axis=1)


def _validate_tube_pieces(pieces, spine, eps) -> None:
    samples = []
    for p in pieces:
        n = max(8, int(math.ceil(p.length / (0.1 * eps))))
        s = (np.arange(n) + 0.5) * (p.length / n)
        samples.append(p.point_at(s))
    allpts = np.concatenate(samples, axis=0)
    dev = np.abs(_dist_to_polyline(allpts, spine) - eps)
    if float(np.max(dev)) > 1e-9 * max(1.0, eps):
        raise TubeOverlapError(
            "tube boundary self-overlaps (offset points are not at distance "
            "epsilon from the spine); reduce epsilon"
        )


def target_set(points) -> TargetSet:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, 2)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
        raise GeometryError("target set needs a nonempty (n, 2) point array")
    if not np.all(np.isfinite(pts)):
        raise GeometryError("target points must be finite")
    return TargetSet(points=pts)


def densify_polyline(vertices, max_spacing: float) -> np.ndarray:
    """Insert points along a polyline so consecutive spacing <= max_spacing."""
    verts = np.asarray(vertices, dtype=float)
    if max_spacing <= 0.0:
        raise GeometryError("max_spacing must be positive")
    out = [verts[0]]
    for a, b in zip(verts[:-1], verts[1:]):
        L = np.hypot(*(b - a))
        n = max(1, int(math.ceil(L / max_spacing)))
        for j in range(1, n + 1):
            out.append(a + (j / n) * (b - a))
    return np.asarray(out)


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

def boundary_pieces(domain) -> tuple:
    if isinstance(domain, Disk):
        return (_Arc(center=domain.center, radius=domain.radius, t0=0.0, t1=2.0 * math.pi),)
    if isinstance(domain, Polygon):
        v = domain.vertices
        return tuple(_Seg(a=v[i], b=v[(i + 1) % len(v)]) for i in range(len(v)))
    if isinstance(domain, Tube):
        return domain.pieces
    raise GeometryError(f"not a domain: {domain!r}")


def area(domain) -> float:
    """Enclosed area: shoelace for polygons, pi R^2 for disks, and the exact
    piecewise (segment/arc) Green's-theorem area for tubes."""
    if isinstance(domain, Disk):
        return math.pi * domain.radius ** 2
    if isinstance(domain, Polygon):
        return _signed_area(domain.vertices)
    if isinstance(domain, Tube):
        return float(sum(p.green_area() for p in domain.pieces))
    raise GeometryError(f"not a domain: {domain!r}")


def perimeter(domain) -> float:
    return float(sum(p.length for p in boundary_pieces(domain)))


def centroid(domain) -> np.ndarray:
    """Expansion origin: area centroid for polygons, center for disks,
    arclength-weighted spine midpoint for tubes."""
    if isinstance(domain, Disk):
        return domain.center.copy()
    if isinstance(domain, Polygon):
        v = domain.vertices
        w = np.roll(v, -1, axis=0)
        crossterm = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        a = 0.5 * np.sum(crossterm)
        cx = np.sum((v[:, 0] + w[:, 0]) * crossterm) / (6.0 * a)
        cy = np.sum((v[:, 1] + w[:, 1]) * crossterm) / (6.0 * a)
        return np.array([cx, cy])
    if isinstance(domain, Tube):
        s = domain.spine
        mid = 0.5 * (s[:-1] + s[1:])
        L = np.hypot(*(s[1:] - s[:-1]).T)
        return (mid * L[:, None]).sum(axis=0) / L.sum()
    raise GeometryError(f"not a domain: {domain!r}")


def circumradius(domain, origin=None) -> float:
    """Maximum boundary distance from `origin` (default: the centroid)."""
    o = centroid(domain) if origin is None else np.asarray(origin, dtype=float)
    if isinstance(domain, Disk):
        return float(np.hypot(*(domain.center - o)) + domain.radius)
    pts = sample_boundary(domain, 512).points
    if isinstance(domain, Polygon):
        pts = np.concatenate([pts, domain.vertices], axis=0)
    return float(np.max(np.hypot(pts[:, 0] - o[0], pts[:, 1] - o[1])))


def diameter(domain) -> float:
    if isinstance(domain, Disk):
        return 2.0 * domain.radius
    if isinstance(domain, Polygon):
        pts = domain.vertices
    else:
        pts = sample_boundary(domain, 512).points
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.max(np.hypot(diff[..., 0], diff[..., 1])))


# ---------------------------------------------------------------------------
# boundary sampling
# ---------------------------------------------------------------------------

def boundary_points_at(domain, arclengths):
    """Boundary points and outward unit normals at given arclength positions."""
    pieces = boundary_pieces(domain)
    lengths = np.array([p.length for p in pieces])
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    total = cum[-1]
    s = np.mod(np.asarray(arclengths, dtype=float), total)
    idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(pieces) - 1)
    pts = np.empty((len(s), 2))
    nrm = np.empty((len(s), 2))
    for i, piece in enumerate(pieces):
        sel = idx == i
        if not np.any(sel):
            continue
        local = s[sel] - cum[i]
        pts[sel] = piece.point_at(local)
        nrm[sel] = piece.normal_at(local)
    return pts, nrm


def sample_boundary(domain, n: int, offset: float = 0.0) -> BoundarySampling:
    """n boundary points equidistributed in arclength.

    `offset` shifts the sampling by that fraction of one step; distinct
    offsets give disjoint samplings (used to keep validation samples
    independent of collocation samples).
    """
    n = int(n)
    if n < 1:
        raise GeometryError("need at least one boundary sample")
    total = perimeter(domain)
    step = total / n
    s = (np.arange(n) + float(offset)) * step
    pts, nrm = boundary_points_at(domain, s)
    gaps = np.hypot(*(np.roll(pts, -1, axis=0) - pts).T)
    return BoundarySampling(points=pts, normals=nrm, arclengths=s,
                            gaps=gaps, max_gap=float(np.max(gaps)))


# ---------------------------------------------------------------------------
# containment
# ---------------------------------------------------------------------------

def boundary_distance(domain, points) -> np.ndarray:
    """Distance from each point to the domain boundary."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if isinstance(domain, Disk):
        r = np.hypot(pts[:, 0] - domain.center[0], pts[:, 1] - domain.center[1])
        return np.abs(r - domain.radius)
    if isinstance(domain, Polygon):
        closed = np.concatenate([domain.vertices, domain.vertices[:1]], axis=0)
        return _dist_to_polyline(pts, closed)
    if isinstance(domain, Tube):
        d = _dist_to_polyline(pts, domain.spine)
        return np.abs(d - domain.epsilon)
    raise GeometryError(f"not a domain: {domain!r}")


def _crossing_inside(verts: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Even-odd ray casting (horizontal ray to +infinity)."""
    x = pts[:, 0:1]
    y = pts[:, 1:2]
    x1 = verts[None, :, 0]
    y1 = verts[None, :, 1]
    x2 = np.roll(verts, -1, axis=0)[None, :, 0]
    y2 = np.roll(verts, -1, axis=0)[None, :, 1]
    cond = (y1 > y) != (y2 > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xin = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
    hit = cond & (x < xin)
    return (np.count_nonzero(hit, axis=1) % 2) == 1


def _winding_inside(verts: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Winding-number containment (cross-check for the ray caster)."""
    x1 = verts[None, :, 0]
    y1 = verts[None, :, 1]
    x2 = np.roll(verts, -1, axis=0)[None, :, 0]
    y2 = np.roll(verts, -1, axis=0)[None, :, 1]
    x = pts[:, 0:1]
    y = pts[:, 1:2]
    is_left = (x2 - x1) * (y - y1) - (x - x1) * (y2 - y1)
    up = (y1 <= y) & (y2 > y) & (is_left > 0)
    down = (y1 > y) & (y2 <= y) & (is_left < 0)
    wn = np.count_nonzero(up, axis=1) - np.count_nonzero(down, axis=1)
    return wn != 0


def locate_points(domain, points, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """Three-valued containment: INSIDE (1), BOUNDARY (0), OUTSIDE (-1)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.full(len(pts), OUTSIDE, dtype=np.int8)
    on_bdry = boundary_distance(domain, pts) <= tol
    if isinstance(domain, Disk):
        r = np.hypot(pts[:, 0] - domain.center[0], pts[:, 1] - domain.center[1])
        inside = r < domain.radius
    elif isinstance(domain, Polygon):
        inside = _crossing_inside(domain.vertices, pts)
    elif isinstance(domain, Tube):
        inside = _dist_to_polyline(pts, domain.spine) < domain.epsilon
    else:
        raise GeometryError(f"not a domain: {domain!r}")
    out[inside] = INSIDE
    out[on_bdry] = BOUNDARY
    return out


def locate(domain, point, tol: float = BOUNDARY_TOL) -> str:
    code = locate_points(domain, np.asarray(point, dtype=float).reshape(1, 2), tol)[0]
    return {INSIDE: "inside", BOUNDARY: "boundary", OUTSIDE: "outside"}[int(code)]


def contains(domain, point, tol: float = BOUNDARY_TOL) -> bool:
    """Strict interior containment (boundary points report False)."""
    return locate(domain, point, tol) == "inside"


def inside_mask(domain, points, tol: float = BOUNDARY_TOL) -> np.ndarray:
    return locate_points(domain, points, tol) == INSIDE


# ---------------------------------------------------------------------------
# inward offset
# ---------------------------------------------------------------------------

def shrink(domain, delta: float):
    """Inward offset by delta: disk radius R - delta, polygon miter inset,
    tube epsilon reduced to epsilon - delta.

    Raises ShrinkCollapseError when the offset degenerates (delta too large).
    """
    if not (delta > 0.0 and math.isfinite(delta)):
        raise GeometryError("shrink delta must be positive and finite")
    if isinstance(domain, Disk):
        if delta >= domain.radius:
            raise ShrinkCollapseError("delta >= disk radius")
        return disk(domain.center, domain.radius - delta)
    if isinstance(domain, Tube):
        if delta >= domain.epsilon:
            raise ShrinkCollapseError("delta >= tube epsilon")
        return tube_of(domain.spine, domain.epsilon - delta)
    if isinstance(domain, Polygon):
        inner = _offset_polygon_inward(domain.vertices, delta)
        try:
            result = polygon(inner)
        except GeometryError as exc:
            raise ShrinkCollapseError(f"inward offset degenerated: {exc}") from exc
        _validate_shrink(domain, result, delta)
        return result
    raise GeometryError(f"not a domain: {domain!r}")


def _offset_polygon_inward(verts: np.ndarray, delta: float) -> np.ndarray:
    n = len(verts)
    d = np.roll(verts, -1, axis=0) - verts
    L = np.hypot(d[:, 0], d[:, 1])
    d = d / L[:, None]
    inward = np.stack([-d[:, 1], d[:, 0]], axis=1)  # left of travel for CCW
    out = np.empty_like(verts)
    for i in range(n):
        ip = (i - 1) % n
        p, t, _ = _line_intersection(verts[ip] + delta * inward[ip], d[ip],
                                     verts[i] + delta * inward[i], d[i])
        if p is None:  # collinear neighbor edges
            p = verts[i] + delta * inward[i]
        out[i] = p
    return out


def _validate_shrink(original: Polygon, inner: Polygon, delta: float) -> None:
    if _signed_area(inner.vertices) >= _signed_area(original.vertices):
        raise ShrinkCollapseError("inward offset did not reduce the area")
    probes = [inner.vertices]
    for f in (0.25, 0.5, 0.75):
        probes.append(inner.vertices + f * (np.roll(inner.vertices, -1, axis=0) - inner.vertices))
    pts = np.concatenate(probes, axis=0)
    if not np.all(inside_mask(original, pts)):
        raise ShrinkCollapseError("inward offset escaped the original polygon")
    if float(np.min(boundary_distance(original, pts))) < delta * (1.0 - 1e-9):
        raise ShrinkCollapseError("inward offset came closer than delta to the boundary")


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

_DOMAIN_KEYS = {
    "polygon": {"type", "vertices"},
    "disk": {"type", "center", "radius"},
    "tube": {"type", "spine", "epsilon"},
}


def domain_from_json(obj: dict):
    if not isinstance(obj, dict):
        raise GeometryError("domain JSON must be an object")
    kind = obj.get("type")
    if kind not in _DOMAIN_KEYS:
        raise GeometryError(f"unknown domain type {kind!r}")
    extra = set(obj) - _DOMAIN_KEYS[kind]
    missing = _DOMAIN_KEYS[kind] - set(obj)
    if extra:
        raise GeometryError(f"unknown keys in domain JSON: {sorted(extra)}")
    if missing:
        raise GeometryError(f"missing keys in domain JSON: {sorted(missing)}")
    if kind == "polygon":
        return polygon(obj["vertices"])
    if kind == "disk":
        return disk(obj["center"], obj["radius"])
    return tube_of(obj["spine"], obj["epsilon"])


def domain_to_json(domain) -> dict:
    if isinstance(domain, Polygon):
        return {"type": "polygon", "vertices": domain.vertices.tolist()}
    if isinstance(domain, Disk):
        return {"type": "disk", "center": domain.center.tolist(),
                "radius": domain.radius}
    if isinstance(domain, Tube):
        return {"type": "tube", "spine": domain.spine.tolist(),
                "epsilon": domain.epsilon}
    raise GeometryError(f"not a domain: {domain!r}")


def load_domain(path):
    with open(path, "r", encoding="utf-8") as fh:
        return domain_from_json(json.load(fh))


def save_domain(domain, path) -> None:
    Path(path).write_text(json.dumps(domain_to_json(domain), indent=2) + "\n",
                          encoding="utf-8")


def targets_from_json(obj: dict) -> TargetSet:
    if not isinstance(obj, dict) or set(obj) != {"points"}:
        raise GeometryError('target JSON must be exactly {"points": [[x, y], ...]}')
    return target_set(obj["points"])


def targets_to_json(targets: TargetSet) -> dict:
    return {"points": targets.points.tolist()}


def load_targets(path) -> TargetSet:
    with open(path, "r", encoding="utf-8") as fh:
        return targets_from_json(json.load(fh))
