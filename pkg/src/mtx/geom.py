"""Exact planar primitives.

Points are complex numbers throughout.  Everything here is immutable and
pure; the heavier numeric work (hulls, distances) is vectorized over numpy
arrays of complex coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateMapError, DomainError

EPS = 1e-12


def as_points(zs) -> np.ndarray:
    """Coerce a scalar/sequence of points to a 1-d complex array."""
    arr = np.asarray(zs, dtype=np.complex128)
    return np.atleast_1d(arr)


# ---------------------------------------------------------------------------
# similarities and real-linear maps


@dataclass(frozen=True)
class Similarity:
    """Orientation-preserving similarity z -> scale*e^{i rot}*z + translation."""

    scale: float
    rotation: float
    translation: complex = 0j

    def __post_init__(self):
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise DomainError(f"similarity scale must be positive, got {self.scale}")

    @property
    def factor(self) -> complex:
        return self.scale * complex(math.cos(self.rotation), math.sin(self.rotation))

    def apply(self, z):
        return self.factor * z + self.translation

    __call__ = apply

    def compose(self, other: "Similarity") -> "Similarity":
        """self after other: (self.compose(other))(z) == self(other(z))."""
        return Similarity(
            self.scale * other.scale,
            self.rotation + other.rotation,
            self.apply(other.translation),
        )

    def inverse(self) -> "Similarity":
        inv_factor = 1.0 / self.factor
        return Similarity(1.0 / self.scale, -self.rotation, -inv_factor * self.translation)

    @staticmethod
    def identity() -> "Similarity":
        return Similarity(1.0, 0.0, 0j)


def rotation_about(center: complex, angle: float) -> Similarity:
    c = complex(center)
    w = complex(math.cos(angle), math.sin(angle))
    return Similarity(1.0, angle, c - w * c)


def translation_by(v: complex) -> Similarity:
    return Similarity(1.0, 0.0, complex(v))


@dataclass(frozen=True)
class RealLinearMap:
    """Map z -> a*z + b*conj(z), orientation-preserving (|a| > |b|)."""

    a: complex
    b: complex

    def __post_init__(self):
        if not abs(self.a) > abs(self.b):
            raise DegenerateMapError(
                f"need |a| > |b| for invertibility, got |a|={abs(self.a)}, |b|={abs(self.b)}"
            )

    def apply(self, z):
        return self.a * z + self.b * np.conj(z)

    __call__ = apply

    @property
    def determinant(self) -> float:
        return abs(self.a) ** 2 - abs(self.b) ** 2

    def inverse_apply(self, w):
        d = self.determinant
        return (np.conj(self.a) * w - self.b * np.conj(w)) / d

    def inverse(self) -> "RealLinearMap":
        d = self.determinant
        return RealLinearMap(np.conj(self.a) / d, -self.b / d)


def affine_distortion(m: RealLinearMap) -> float:
    """Isometric distortion max{|a|+|b|, 1/(|a|-|b|)} of an invertible real-linear map."""
    a, b = abs(m.a), abs(m.b)
    if not a > b:
        raise DegenerateMapError("degenerate real-linear map")
    return max(a + b, 1.0 / (a - b))


def affine_from_triangles(src: Sequence[complex], dst: Sequence[complex]):
    """Orientation data (a, b, p0, q0) of the affine map sending triangle src to dst.

    The map is z -> q0 + a*(z - p0) + b*conj(z - p0).
    """
    p0, p1, p2 = (complex(p) for p in src)
    q0, q1, q2 = (complex(q) for q in dst)
    d1, d2 = p1 - p0, p2 - p0
    e1, e2 = q1 - q0, q2 - q0
    denom = d1 * d2.conjugate() - d2 * d1.conjugate()
    if abs(denom) < EPS * max(abs(d1), abs(d2), 1.0) ** 2:
        raise DomainError("degenerate source triangle")
    a = (e1 * d2.conjugate() - e2 * d1.conjugate()) / denom
    b = (e2 * d1 - e1 * d2) / denom
    return a, b, p0, q0


# ---------------------------------------------------------------------------
# rectangles, disks, annuli


@dataclass(frozen=True)
class Rectangle:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise DomainError("rectangle requires xmin < xmax and ymin < ymax")

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def center(self) -> complex:
        return complex((self.xmin + self.xmax) / 2, (self.ymin + self.ymax) / 2)

    @property
    def circumradius(self) -> float:
        return math.hypot(self.width, self.height) / 2

    @property
    def inradius(self) -> float:
        return min(self.width, self.height) / 2

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    def corners(self) -> np.ndarray:
        return np.array(
            [
                complex(self.xmin, self.ymin),
                complex(self.xmax, self.ymin),
                complex(self.xmax, self.ymax),
                complex(self.xmin, self.ymax),
            ]
        )

    def contains(self, z, tol: float = 0.0):
        z = np.asarray(z)
        return (
            (z.real >= self.xmin - tol)
            & (z.real <= self.xmax + tol)
            & (z.imag >= self.ymin - tol)
            & (z.imag <= self.ymax + tol)
        )

    def contains_rect(self, other: "Rectangle", tol: float = 0.0) -> bool:
        return (
            other.xmin >= self.xmin - tol
            and other.xmax <= self.xmax + tol
            and other.ymin >= self.ymin - tol
            and other.ymax <= self.ymax + tol
        )

    def erode(self, d: float) -> "Rectangle":
        return Rectangle(self.xmin + d, self.xmax - d, self.ymin + d, self.ymax - d)

    def expand(self, d: float) -> "Rectangle":
        return Rectangle(self.xmin - d, self.xmax + d, self.ymin - d, self.ymax + d)

    def translate(self, v: complex) -> "Rectangle":
        v = complex(v)
        return Rectangle(self.xmin + v.real, self.xmax + v.real, self.ymin + v.imag, self.ymax + v.imag)

    def distance_to(self, z) -> np.ndarray:
        """Euclidean distance from point(s) to the closed rectangle (0 inside)."""
        z = as_points(z)
        dx = np.maximum(np.maximum(self.xmin - z.real, z.real - self.xmax), 0.0)
        dy = np.maximum(np.maximum(self.ymin - z.imag, z.imag - self.ymax), 0.0)
        return np.hypot(dx, dy)

    def max_distance_to(self, c: complex) -> float:
        """Max distance from c to the closed rectangle (realized at a corner)."""
        return float(np.abs(self.corners() - complex(c)).max())

    def sample_interior(self, n: int, rng: np.random.Generator) -> np.ndarray:
        xs = rng.uniform(self.xmin, self.xmax, n)
        ys = rng.uniform(self.ymin, self.ymax, n)
        return xs + 1j * ys

    def boundary_points(self, n: int) -> np.ndarray:
        """n points spread along the boundary, deterministic."""
        per = np.linspace(0.0, 4.0, n, endpoint=False)
        out = np.empty(n, dtype=np.complex128)
        for i, s in enumerate(per):
            side, frac = int(s), s - int(s)
            if side == 0:
                out[i] = complex(self.xmin + frac * self.width, self.ymin)
            elif side == 1:
                out[i] = complex(self.xmax, self.ymin + frac * self.height)
            elif side == 2:
                out[i] = complex(self.xmax - frac * self.width, self.ymax)
            else:
                out[i] = complex(self.xmin, self.ymax - frac * self.height)
        return out

    def project(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return np.clip(z.real, self.xmin, self.xmax) + 1j * np.clip(z.imag, self.ymin, self.ymax)

    def as_polygon(self) -> "ConvexPolygon":
        return ConvexPolygon(tuple(self.corners()))


def rect_distance(a: Rectangle, b: Rectangle) -> float:
    dx = max(a.xmin - b.xmax, b.xmin - a.xmax, 0.0)
    dy = max(a.ymin - b.ymax, b.ymin - a.ymax, 0.0)
    return math.hypot(dx, dy)


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("disk radius must be positive")

    def contains(self, z, tol: float = 0.0):
        z = np.asarray(z)
        return np.abs(z - self.center) <= self.radius + tol

    def sample_interior(self, n: int, rng: np.random.Generator) -> np.ndarray:
        r = self.radius * np.sqrt(rng.uniform(0.0, 1.0, n))
        th = rng.uniform(0.0, 2 * np.pi, n)
        return self.center + r * np.exp(1j * th)

    def boundary_points(self, n: int) -> np.ndarray:
        th = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        return self.center + self.radius * np.exp(1j * th)

    def project(self, z):
        z = np.asarray(z, dtype=np.complex128)
        zeta = z - self.center
        d = np.abs(zeta)
        safe = np.where(d > 0, d, 1.0)
        scale = np.minimum(d, self.radius) / safe
        return self.center + zeta * np.where(d > 0, scale, 0.0)

    @property
    def diameter(self) -> float:
        return 2 * self.radius


@dataclass(frozen=True)
class Annulus:
    """Closed round ring r_in <= |z - center| <= r_out."""

    center: complex
    r_in: float
    r_out: float

    def __post_init__(self):
        if not (0 < self.r_in < self.r_out):
            raise DomainError("annulus requires 0 < r_in < r_out")

    def contains(self, z, tol: float = 0.0):
        d = np.abs(np.asarray(z) - self.center)
        return (d >= self.r_in - tol) & (d <= self.r_out + tol)

    def distance_to(self, z) -> np.ndarray:
        d = np.abs(as_points(z) - self.center)
        inner = np.maximum(self.r_in - d, 0.0)
        outer = np.maximum(d - self.r_out, 0.0)
        return np.maximum(inner, outer)

    def sample_interior(self, n: int, rng: np.random.Generator) -> np.ndarray:
        # area-uniform in the ring
        u = rng.uniform(self.r_in**2, self.r_out**2, n)
        th = rng.uniform(0.0, 2 * np.pi, n)
        return self.center + np.sqrt(u) * np.exp(1j * th)

    def boundary_points(self, n: int) -> np.ndarray:
        half = n // 2
        th1 = np.linspace(0.0, 2 * np.pi, half, endpoint=False)
        th2 = np.linspace(0.0, 2 * np.pi, n - half, endpoint=False)
        return np.concatenate(
            [self.center + self.r_in * np.exp(1j * th1), self.center + self.r_out * np.exp(1j * th2)]
        )

    def project(self, z):
        z = np.asarray(z, dtype=np.complex128)
        zeta = z - self.center
        d = np.abs(zeta)
        mid = 0.5 * (self.r_in + self.r_out)
        safe = np.where(d > 0, d, 1.0)
        scale = np.clip(d, self.r_in, self.r_out) / safe
        return self.center + np.where(d > 0, zeta * scale, mid)

    @property
    def diameter(self) -> float:
        return 2 * self.r_out

    def disjoint_from_annulus(self, other: "Annulus") -> bool:
        d = abs(self.center - other.center)
        if d > self.r_out + other.r_out:
            return True
        if d + other.r_out < self.r_in:
            return True
        if d + self.r_out < other.r_in:
            return True
        return False

    def disjoint_from_rect(self, rect: Rectangle) -> bool:
        dmin = float(rect.distance_to(self.center)[0])
        dmax = rect.max_distance_to(self.center)
        return dmax < self.r_in or dmin > self.r_out


# ---------------------------------------------------------------------------
# convex polygons, hulls, gather loop


def _cross(o: complex, a: complex, b: complex) -> float:
    return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex polygon with CCW vertices; degenerate inputs flagged, not rejected.

    kind is "polygon", "segment" or "point".
    """

    vertices: tuple

    @property
    def kind(self) -> str:
        n = len(self.vertices)
        if n == 1:
            return "point"
        if n == 2:
            return "segment"
        return "polygon"

    @property
    def degenerate(self) -> bool:
        return self.kind != "polygon"

    def points(self) -> np.ndarray:
        return np.array(self.vertices, dtype=np.complex128)

    def diameter(self) -> float:
        pts = self.points()
        if len(pts) == 1:
            return 0.0
        diff = np.abs(pts[:, None] - pts[None, :])
        return float(diff.max())

    def translate(self, v: complex) -> "ConvexPolygon":
        v = complex(v)
        return ConvexPolygon(tuple(p + v for p in self.vertices))

    def bounding_box(self) -> Rectangle:
        pts = self.points()
        xs, ys = pts.real, pts.imag
        pad = 0.0
        if xs.max() - xs.min() < EPS or ys.max() - ys.min() < EPS:
            pad = EPS  # degenerate shapes still get a valid box
        return Rectangle(xs.min() - pad, xs.max() + pad, ys.min() - pad, ys.max() + pad)

    def contains(self, z, tol: float = EPS):
        z = np.asarray(z, dtype=np.complex128)
        if self.kind == "point":
            return np.abs(z - self.vertices[0]) <= tol
        if self.kind == "segment":
            return _segment_distance(self.vertices[0], self.vertices[1], z) <= tol
        res = np.ones(np.shape(z), dtype=bool)
        verts = self.vertices
        for i in range(len(verts)):
            a, b = verts[i], verts[(i + 1) % len(verts)]
            cr = (b.real - a.real) * (np.imag(z) - a.imag) - (b.imag - a.imag) * (np.real(z) - a.real)
            res &= cr >= -tol * max(abs(b - a), 1.0)
        return res


def _segment_distance(p: complex, q: complex, z) -> np.ndarray:
    z = np.asarray(z, dtype=np.complex128)
    d = q - p
    if abs(d) < EPS:
        return np.abs(z - p)
    t = np.clip(((z - p) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
    return np.abs(z - (p + t * d))


def convex_hull(points: Iterable[complex]) -> ConvexPolygon:
    """Monotone-chain hull; collinear input yields a flagged segment/point."""
    pts = sorted({(complex(p).real, complex(p).imag) for p in points})
    if not pts:
        raise DomainError("convex_hull of empty set")
    if len(pts) == 1:
        return ConvexPolygon((complex(*pts[0]),))
    zs = [complex(x, y) for x, y in pts]
    if len(zs) == 2:
        return ConvexPolygon(tuple(zs))

    def half(points_seq):
        out = []
        for p in points_seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(zs)
    upper = half(reversed(zs))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        # all points collinear: extremes of the sorted order
        return ConvexPolygon((zs[0], zs[-1]))
    return ConvexPolygon(tuple(hull))


def _project(poly: ConvexPolygon, axis: complex) -> tuple:
    pts = poly.points()
    proj = pts.real * axis.real + pts.imag * axis.imag
    return float(proj.min()), float(proj.max())


def polygons_intersect(p: ConvexPolygon, q: ConvexPolygon, tol: float = EPS) -> bool:
    """Separating-axis test; tangency counts as intersection."""
    axes = []
    for poly in (p, q):
        verts = poly.vertices
        n = len(verts)
        if n == 1:
            continue
        m = n if n > 2 else 1
        for i in range(m):
            e = verts[(i + 1) % n] - verts[i]
            if abs(e) > tol:
                axes.append(complex(-e.imag, e.real) / abs(e))
                axes.append(e / abs(e))
    if not axes:
        return abs(p.vertices[0] - q.vertices[0]) <= tol
    scale = max(p.diameter(), q.diameter(), 1.0)
    for axis in axes:
        pmin, pmax = _project(p, axis)
        qmin, qmax = _project(q, axis)
        if pmax < qmin - tol * scale or qmax < pmin - tol * scale:
            return False
    return True


def gather_convex(sets: Sequence[ConvexPolygon]) -> list:
    """Merge intersecting convex hulls until mutually disjoint.

    Repeatedly replaces the lowest-index intersecting pair by the hull of its
    union; terminates in at most n-1 merges and never increases the sum of
    diameters.
    """
    hulls = [convex_hull(s.vertices) for s in sets]
    while True:
        merged = False
        n = len(hulls)
        for i in range(n):
            for j in range(i + 1, n):
                if polygons_intersect(hulls[i], hulls[j]):
                    union = list(hulls[i].vertices) + list(hulls[j].vertices)
                    hulls[i] = convex_hull(union)
                    del hulls[j]
                    merged = True
                    break
            if merged:
                break
        if not merged:
            return hulls


# ---------------------------------------------------------------------------
# set distance / diameter dispatch


def annulus_annulus_distance(a: Annulus, b: Annulus) -> float:
    d = abs(a.center - b.center)
    if d > a.r_out + b.r_out:
        return d - a.r_out - b.r_out
    if d + b.r_out < a.r_in:
        return a.r_in - (d + b.r_out)
    if d + a.r_out < b.r_in:
        return b.r_in - (d + a.r_out)
    return 0.0


def annulus_rect_distance(a: Annulus, r: Rectangle) -> float:
    dmin = float(r.distance_to(a.center)[0])
    dmax = r.max_distance_to(a.center)
    if dmin > a.r_out:
        return dmin - a.r_out
    if dmax < a.r_in:
        return a.r_in - dmax
    return 0.0


def set_distance(a, b) -> float:
    """Distance between two sets; exact for rectangle/annulus pairs, brute force for clouds."""
    if isinstance(a, Rectangle) and isinstance(b, Rectangle):
        return rect_distance(a, b)
    if isinstance(a, Annulus) and isinstance(b, Annulus):
        return annulus_annulus_distance(a, b)
    if isinstance(a, Annulus) and isinstance(b, Rectangle):
        return annulus_rect_distance(a, b)
    if isinstance(a, Rectangle) and isinstance(b, Annulus):
        return annulus_rect_distance(b, a)
    if isinstance(a, Annulus):
        return float(a.distance_to(_coerce_cloud(b)).min())
    if isinstance(b, Annulus):
        return float(b.distance_to(_coerce_cloud(a)).min())
    if isinstance(a, Rectangle):
        return float(a.distance_to(_coerce_cloud(b)).min())
    if isinstance(b, Rectangle):
        return float(b.distance_to(_coerce_cloud(a)).min())
    pa, pb = _coerce_cloud(a), _coerce_cloud(b)
    return float(np.abs(pa[:, None] - pb[None, :]).min())


def _coerce_cloud(x) -> np.ndarray:
    if isinstance(x, ConvexPolygon):
        return x.points()
    if isinstance(x, Disk):
        raise DomainError("disk-vs-cloud distance not supported; use Annulus or points")
    pts = as_points(x)
    if pts.size == 0:
        raise DomainError("empty set has no distance/diameter")
    return pts


def set_diameter(a) -> float:
    if isinstance(a, Rectangle):
        return a.diameter
    if isinstance(a, (Annulus, Disk)):
        return a.diameter
    if isinstance(a, ConvexPolygon):
        return a.diameter()
    pts = _coerce_cloud(a)
    if pts.size > 4096:
        # hull first keeps the pairwise pass small
        return convex_hull(pts).diameter()
    return float(np.abs(pts[:, None] - pts[None, :]).max())


def segment_intersects_rect(p: complex, q: complex, rect: Rectangle, tol: float = 0.0) -> bool:
    """Closed-segment vs closed-rectangle intersection (exact up to tol)."""
    if rect.contains(p, tol) or rect.contains(q, tol):
        return True
    corners = rect.corners()
    for i in range(4):
        if _segments_cross(p, q, corners[i], corners[(i + 1) % 4], tol):
            return True
    return False


def _segments_cross(a, b, c, d, tol=0.0) -> bool:
    d1 = _cross(c, d, a)
    d2 = _cross(c, d, b)
    d3 = _cross(a, b, c)
    d4 = _cross(a, b, d)
    if ((d1 > tol and d2 < -tol) or (d1 < -tol and d2 > tol)) and (
        (d3 > tol and d4 < -tol) or (d3 < -tol and d4 > tol)
    ):
        return True
    for (u, v, w, dd) in ((c, d, a, d1), (c, d, b, d2), (a, b, c, d3), (a, b, d, d4)):
        if abs(dd) <= tol and _on_segment(u, v, w, tol):
            return True
    return False


def _on_segment(u, v, w, tol=0.0) -> bool:
    return (
        min(u.real, v.real) - tol <= w.real <= max(u.real, v.real) + tol
        and min(u.imag, v.imag) - tol <= w.imag <= max(u.imag, v.imag) + tol
    )
