"""Evaluable homeomorphism paths and their interpolators.

A Map2 is an invertible planar map given by forward/inverse evaluators over
complex arrays; a Path is a family t in [0,1] -> Map2 with declared
endpoints and a support region.  Everything outside a map's support is the
identity.  Interpolators: Dehn twists, triangle deformations, strip and
annulus interpolation, and translation of a convex body along a PL curve
inside a fixed arena.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    ClearanceError,
    DomainError,
    EndpointMismatchError,
    GlueMismatchError,
)
from .geom import (
    EPS,
    Annulus,
    ConvexPolygon,
    Disk,
    Rectangle,
    RealLinearMap,
    affine_from_triangles,
    as_points,
)

TWO_PI = 2.0 * math.pi
_CHECK_SEED = 20260809


class WholePlane:
    """Unbounded support; sampling draws from a default box."""

    box = Rectangle(-4.0, 4.0, -4.0, 4.0)

    def contains(self, z, tol=0.0):
        return np.ones(np.shape(np.asarray(z)), dtype=bool)

    def sample_interior(self, n, rng):
        return self.box.sample_interior(n, rng)

    def boundary_points(self, n):
        return self.box.boundary_points(n)

    def project(self, z):
        return np.asarray(z, dtype=np.complex128)


@dataclass(frozen=True)
class UnionRegion:
    parts: tuple

    def contains(self, z, tol=0.0):
        z = np.asarray(z)
        res = np.zeros(np.shape(z), dtype=bool)
        for p in self.parts:
            res |= p.contains(z, tol)
        return res

    def sample_interior(self, n, rng):
        k = max(1, n // len(self.parts))
        chunks = [p.sample_interior(k, rng) for p in self.parts]
        return np.concatenate(chunks)[:n] if n >= len(self.parts) else chunks[0][:n]

    def boundary_points(self, n):
        k = max(1, n // len(self.parts))
        return np.concatenate([p.boundary_points(k) for p in self.parts])

    def project(self, z):
        z = np.asarray(z, dtype=np.complex128)
        ok = self.contains(z)
        proj = getattr(self.parts[0], "project", None)
        if proj is None:
            return z
        return np.where(ok, z, proj(z))


class Map2:
    """Invertible planar map: vectorized forward/inverse plus a support region."""

    __slots__ = ("forward", "inverse", "support", "label")

    def __init__(self, forward, inverse, support=None, label=""):
        self.forward = forward
        self.inverse = inverse
        self.support = support if support is not None else WholePlane()
        self.label = label

    def __call__(self, z):
        arr = as_points(z)
        out = self.forward(arr)
        return out if np.ndim(z) else complex(out[0])

    def inv(self, z):
        arr = as_points(z)
        out = self.inverse(arr)
        return out if np.ndim(z) else complex(out[0])

    def after(self, other: "Map2", support=None, label="") -> "Map2":
        """self composed after other: (self.after(other))(z) = self(other(z))."""
        f1, f2 = self.forward, other.forward
        g1, g2 = self.inverse, other.inverse
        sup = support if support is not None else UnionRegion((self.support, other.support))
        return Map2(
            lambda z: f1(f2(z)),
            lambda w: g2(g1(w)),
            sup,
            label or f"({self.label or 'f'} o {other.label or 'g'})",
        )

    def inverted(self) -> "Map2":
        return Map2(self.inverse, self.forward, self.support, f"inv({self.label})")

    @staticmethod
    def identity(support=None) -> "Map2":
        return Map2(lambda z: z, lambda z: z, support, "id")


def identity_map() -> Map2:
    return Map2.identity()


def similarity_map(sim, support=None) -> Map2:
    inv = sim.inverse()
    return Map2(lambda z: sim.apply(z), lambda z: inv.apply(z), support, "similarity")


def rotation_map(center: complex, angle: float, support=None) -> Map2:
    c = complex(center)
    w = complex(math.cos(angle), math.sin(angle))
    return Map2(lambda z: c + w * (z - c), lambda z: c + (z - c) / w, support, "rotation")


@dataclass
class Path:
    """Family t -> Map2 with declared endpoint maps and common support."""

    at_fn: Callable[[float], Map2]
    start: Map2
    end: Map2
    support: object = field(default_factory=WholePlane)
    label: str = ""

    def at(self, t: float) -> Map2:
        if not (0.0 <= t <= 1.0):
            raise DomainError(f"path parameter {t} outside [0,1]")
        return self.at_fn(t)

    def sample_support(self, n: int, rng) -> np.ndarray:
        return self.support.sample_interior(n, rng)


def constant_path(m: Map2, label="const") -> Path:
    return Path(lambda t: m, m, m, m.support, label)


def rotation_path(center: complex, total_angle: float, support=None) -> Path:
    sup = support if support is not None else WholePlane()
    fn = lambda t: rotation_map(center, total_angle * t, sup)
    return Path(fn, fn(0.0), fn(1.0), sup, "rotation-path")


def check_endpoints(path: Path, samples: int = 200, tol: float = 1e-10, seed: int = _CHECK_SEED):
    """Verify at(0)/at(1) against the declared endpoint maps on support samples."""
    rng = np.random.default_rng(seed)
    pts = path.sample_support(samples, rng)
    for t, declared in ((0.0, path.start), (1.0, path.end)):
        got = path.at(t).forward(pts)
        want = declared.forward(pts)
        err = np.abs(got - want)
        k = int(err.argmax())
        if err[k] > tol:
            raise EndpointMismatchError(
                f"endpoint t={t} mismatch {err[k]:.3e} at {pts[k]}", witness=pts[k]
            )


def check_inverse(path: Path, t_grid=None, samples: int = 200, tol: float = 1e-10,
                  seed: int = _CHECK_SEED) -> float:
    """Max |inv(fwd(z)) - z| over support samples and a t grid."""
    rng = np.random.default_rng(seed)
    pts = path.sample_support(samples, rng)
    ts = np.linspace(0.0, 1.0, 9) if t_grid is None else t_grid
    worst = 0.0
    for t in ts:
        m = path.at(float(t))
        err = float(np.abs(m.inverse(m.forward(pts)) - pts).max())
        worst = max(worst, err)
    if worst > tol:
        raise EndpointMismatchError(f"inverse contract violated: {worst:.3e}")
    return worst


# ---------------------------------------------------------------------------
# combinators


def reverse(path: Path) -> Path:
    return Path(lambda t: path.at(1.0 - t), path.end, path.start, path.support,
                f"reverse({path.label})")


def concat(paths: Sequence[Path], weights=None, check: bool = True, samples: int = 64,
           tol: float = 1e-9) -> Path:
    """Play paths in sequence; junction endpoints must agree."""
    paths = list(paths)
    if not paths:
        raise DomainError("concat of no paths")
    if weights is None:
        weights = [1.0] * len(paths)
    w = np.asarray(weights, dtype=float)
    if np.any(w <= 0):
        raise DomainError("concat weights must be positive")
    cum = np.concatenate([[0.0], np.cumsum(w)]) / w.sum()
    if check:
        rng = np.random.default_rng(_CHECK_SEED)
        for a, b in zip(paths[:-1], paths[1:]):
            pts = a.sample_support(samples, rng)
            err = np.abs(a.end.forward(pts) - b.start.forward(pts))
            k = int(err.argmax())
            if err[k] > tol:
                raise EndpointMismatchError(
                    f"concat junction mismatch {err[k]:.3e} at {pts[k]}", witness=pts[k]
                )

    def at(t: float) -> Map2:
        i = int(np.searchsorted(cum, t, side="right") - 1)
        i = min(max(i, 0), len(paths) - 1)
        local = (t - cum[i]) / (cum[i + 1] - cum[i])
        return paths[i].at(min(max(local, 0.0), 1.0))

    support = UnionRegion(tuple(p.support for p in paths))
    return Path(at, paths[0].start, paths[-1].end, support, "concat")


def chain(paths: Sequence[Path], weights=None, check: bool = True) -> Path:
    """Concatenate paths that each start at the identity, composing progress.

    Piece k is pre-composed with the completed maps of pieces 1..k-1, so the
    chain runs id -> P1(1) -> P2(1) o P1(1) -> ...
    """
    pieces = []
    done = None
    for p in paths:
        if done is None:
            pieces.append(p)
            done = p.end
        else:
            prev = done

            def shifted_at(t, _p=p, _prev=prev):
                return _p.at(t).after(_prev)

            pieces.append(Path(shifted_at, p.start.after(prev), p.end.after(prev),
                               UnionRegion((p.support, prev.support)), f"chain({p.label})"))
            done = p.end.after(prev)
    return concat(pieces, weights, check=check)


def restrict(path: Path, region) -> Path:
    def at(t: float) -> Map2:
        m = path.at(t)
        return Map2(m.forward, m.inverse, region, m.label)

    return Path(at, path.start, path.end, region, f"restrict({path.label})")


def glue(pieces: Sequence[tuple], check: bool = True, samples: int = 128,
         tol: float = 1e-10) -> Path:
    """Combine (region, path) pieces that each map their region onto itself.

    Points outside every region are fixed.  Pieces are spot-checked to agree
    on sampled region boundaries at several times.
    """
    regions = [r for r, _ in pieces]
    paths = [p for _, p in pieces]
    if check:
        for t in (0.0, 0.25, 0.5, 0.75, 1.0):
            for i, (reg, p) in enumerate(pieces):
                bpts = reg.boundary_points(samples)
                val = p.at(t).forward(bpts)
                for j, (reg2, p2) in enumerate(pieces):
                    if i == j:
                        continue
                    mask = reg2.contains(bpts, tol=1e-12)
                    if not np.any(mask):
                        continue
                    other = p2.at(t).forward(bpts[mask])
                    err = np.abs(val[mask] - other)
                    k = int(err.argmax())
                    if err[k] > tol:
                        raise GlueMismatchError(
                            f"glue pieces {i},{j} disagree by {err[k]:.3e} at "
                            f"{bpts[mask][k]} (t={t})",
                            witness=bpts[mask][k],
                        )

    def at(t: float) -> Map2:
        maps = [p.at(t) for p in paths]

        def run(z, attr):
            out = np.array(z, copy=True)
            todo = np.ones(z.shape, dtype=bool)
            for reg, m in zip(regions, maps):
                mask = todo & reg.contains(z, tol=0.0)
                if np.any(mask):
                    out[mask] = getattr(m, attr)(z[mask])
                    todo &= ~mask
            return out

        return Map2(lambda z: run(z, "forward"), lambda z: run(z, "inverse"),
                    UnionRegion(tuple(regions)), "glue")

    start = at(0.0)
    end = at(1.0)
    return Path(at, start, end, UnionRegion(tuple(regions)), "glue")


def compose_isometric(outer: Path, inner: Path, check: bool = True, samples: int = 64,
                      tol: float = 1e-9) -> Path:
    """Pointwise composition outer.at(t) o inner.at(t).

    The outer path must act isometrically on the image of inner's support;
    this is spot-checked on sample pairs.
    """
    if check:
        rng = np.random.default_rng(_CHECK_SEED)
        pts = inner.support.sample_interior(samples, rng)
        for t in (0.0, 0.5, 1.0):
            img = inner.at(t).forward(pts)
            a, b = img[: samples // 2], img[samples // 2: 2 * (samples // 2)]
            oa, ob = outer.at(t).forward(a), outer.at(t).forward(b)
            err = np.abs(np.abs(oa - ob) - np.abs(a - b))
            if err.size and err.max() > tol * max(1.0, float(np.abs(a - b).max())):
                raise DomainError(
                    f"outer path is not isometric on inner support (err {err.max():.3e})"
                )

    def at(t: float) -> Map2:
        return outer.at(t).after(inner.at(t))

    return Path(at, outer.start.after(inner.start), outer.end.after(inner.end),
                UnionRegion((outer.support, inner.support)), "compose-isometric")


def compose_fixed(path: Path, pre: Optional[Map2] = None, post: Optional[Map2] = None) -> Path:
    """post o path.at(t) o pre with fixed maps (paper-style conjugation building block)."""

    def wrap(m: Map2) -> Map2:
        out = m
        if pre is not None:
            out = out.after(pre)
        if post is not None:
            out = post.after(out)
        return out

    return Path(lambda t: wrap(path.at(t)), wrap(path.start), wrap(path.end),
                path.support, f"fixed-compose({path.label})")


def conjugate_by_similarity(path: Path, sim, support=None) -> Path:
    """phi o path o phi^{-1}; distortion data is preserved, displacement scales."""
    phi = similarity_map(sim)
    phi_inv = phi.inverted()

    def at(t: float) -> Map2:
        return phi.after(path.at(t)).after(phi_inv)

    sup = support if support is not None else WholePlane()
    return Path(at, phi.after(path.start).after(phi_inv), phi.after(path.end).after(phi_inv),
                sup, f"conj({path.label})")


# ---------------------------------------------------------------------------
# Dehn twists


def _twist_angle(rhat, eta: float, turns: float):
    return TWO_PI * turns * (1.0 - rhat) / eta


def dehn_twist(eta: float, turns: float = 1.0) -> Map2:
    """Twist of the annulus 1-eta <= |z| <= 1: (r, th) -> (r, th + 2*pi*turns*(1-r)/eta)."""
    if not (0.0 < eta < 1.0):
        raise DomainError(f"eta must lie in (0,1), got {eta}")
    ann = Annulus(0j, 1.0 - eta, 1.0)

    def check_domain(z):
        r = np.abs(z)
        if np.any(r < 1.0 - eta - 1e-9) or np.any(r > 1.0 + 1e-9):
            raise DomainError("twist evaluated outside its annulus")
        return r

    def fwd(z):
        r = check_domain(z)
        return z * np.exp(1j * _twist_angle(r, eta, turns))

    def inv(z):
        r = check_domain(z)
        return z * np.exp(-1j * _twist_angle(r, eta, turns))

    return Map2(fwd, inv, ann, f"dehn-twist(eta={eta})")


def dehn_twist_path(eta: float) -> Path:
    """Bi-Lipschitz path from the identity to the full twist."""
    ann = Annulus(0j, 1.0 - eta, 1.0)

    def at(t: float) -> Map2:
        return dehn_twist(eta, turns=t)

    return Path(at, Map2.identity(ann), dehn_twist(eta), ann, f"dehn-path(eta={eta})")


def ring_twist_map(center: complex, r_out: float, eta: float, turns: float = 1.0) -> Map2:
    """Similarity-conjugated twist on the ring r_out*(1-eta) <= |z-c| <= r_out.

    The identity off the annulus, so the map is a global homeomorphism (the
    restriction of a multitwist to one ring).
    """
    c = complex(center)
    ann = Annulus(c, r_out * (1.0 - eta), r_out)

    def transform(z, sign):
        zeta = z - c
        rhat = np.abs(zeta) / r_out
        band = (rhat >= 1.0 - eta - 1e-12) & (rhat <= 1.0 + 1e-12)
        angle = np.where(band, _twist_angle(np.clip(rhat, 1.0 - eta, 1.0), eta, turns), 0.0)
        return c + zeta * np.exp(1j * sign * angle)

    return Map2(lambda z: transform(z, +1.0), lambda z: transform(z, -1.0), ann, "ring-twist")


# ---------------------------------------------------------------------------
# triangle paths


def triangle_path(a: complex, c: complex, b: complex) -> Path:
    """Affine path on T(0,1,a): identity to the map fixing 0, 1->c, a->b.

    Coefficients follow gamma1(t) = c*t + (1-t), gamma2(t) = b*t + (1-t)*a.
    """
    a, b, c = complex(a), complex(b), complex(c)
    if min(abs(a), abs(b), abs(c)) < EPS:
        raise DomainError("triangle parameters must be nonzero")
    arg_a, arg_b, arg_c = np.angle(a), np.angle(b), np.angle(c)
    if not (0.0 < arg_a < math.pi):
        raise DomainError(f"need 0 < arg(a) < pi, got {arg_a}")
    if arg_b < 0 or arg_c < 0 or not (arg_c < arg_b <= math.pi) or (arg_b - arg_c) >= math.pi:
        raise DomainError("need 0 <= arg(c) < arg(b) <= pi with arg(b)-arg(c) < pi")

    denom = a - np.conj(a)

    def coeffs(t: float):
        g1 = c * t + (1.0 - t)
        g2 = b * t + (1.0 - t) * a
        return (g2 - np.conj(a) * g1) / denom, (a * g1 - g2) / denom

    for t in np.linspace(0.0, 1.0, 33):
        A, B = coeffs(float(t))
        if not abs(A) > abs(B):
            raise DomainError(f"triangle path degenerates at t={t}")

    tri = ConvexPolygon((0j, 1 + 0j, a))

    def at(t: float) -> Map2:
        A, B = coeffs(t)
        m = RealLinearMap(A, B)
        return Map2(m.apply, m.inverse_apply, tri, f"tri-affine(t={t:.3f})")

    return Path(at, at(0.0), at(1.0), tri, "triangle-path")


# ---------------------------------------------------------------------------
# 1-d boundary data for strip/annulus interpolation


class LineMap:
    """Increasing homeomorphism of R with 2*pi-periodic displacement."""

    def __init__(self, fwd, inv=None, shift: Optional[float] = None):
        self.fwd = fwd
        self._inv = inv
        self.shift = shift  # exact constant displacement, when the map is one

    def __call__(self, y):
        return self.fwd(np.asarray(y, dtype=float))

    def inv(self, y):
        y = np.asarray(y, dtype=float)
        if self._inv is not None:
            return self._inv(y)
        return _bisect_increasing(self.fwd, y)


def _bisect_increasing(f, target, span: float = 8.0 * math.pi, iters: int = 60):
    lo = target - span
    hi = target + span
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        val = f(mid)
        lo = np.where(val < target, mid, lo)
        hi = np.where(val < target, hi, mid)
    return 0.5 * (lo + hi)


class LinePath:
    """t -> LineMap; boundary data for the strip interpolation."""

    def __init__(self, at_fn, label=""):
        self.at_fn = at_fn
        self.label = label

    def at(self, t: float) -> LineMap:
        return self.at_fn(t)


def shift_line_path(theta: Callable[[float], float], label="shift") -> LinePath:
    """Pure shifts y -> y + theta(t); theta(0)=0 and theta(1)=+-2*pi for loops."""

    def at(t: float) -> LineMap:
        s = float(theta(t))
        return LineMap(lambda y: y + s, lambda y: y - s, shift=s)

    return LinePath(at, label)


def periodic_line_path(theta: Callable[[float], float], wobble: Callable[[float], float],
                       label="periodic") -> LinePath:
    """y -> y + theta(t) + wobble(t)*sin(y); requires |wobble| < 1."""

    def at(t: float) -> LineMap:
        s, w = float(theta(t)), float(wobble(t))
        if abs(w) >= 1.0:
            raise DomainError("wobble amplitude must stay below 1 for monotonicity")
        return LineMap(lambda y: y + s + w * np.sin(y))

    return LinePath(at, label)


def _validate_boundary(lp: LinePath, full_shift: float, samples=17, tol=1e-9):
    ys = np.linspace(-math.pi, math.pi, samples)
    d0 = lp.at(0.0)(ys) - ys
    d1 = lp.at(1.0)(ys) - ys
    if np.abs(d0).max() > tol:
        raise DomainError("boundary path must start at the identity")
    if np.abs(d1 - full_shift).max() > tol:
        raise DomainError(f"boundary path must end at the shift by {full_shift}")
    prev = lp.at(0.0)(ys)
    for t in np.linspace(0.0, 1.0, 9)[1:]:
        cur = lp.at(float(t))(ys)
        if full_shift >= 0 and np.any(cur < prev - tol):
            raise DomainError("boundary path is not monotone in t")
        if full_shift < 0 and np.any(cur > prev + tol):
            raise DomainError("boundary path is not monotone in t")
        prev = cur


def strip_path(f_bdy: LinePath, g_bdy: LinePath, m: float, full_shift: float = TWO_PI,
               validate: bool = True) -> Path:
    """Convex interpolation on the strip 0 <= Re z <= m.

    H_t(x+iy) = x + i*(G_t(y) + (1 - x/m)*(F_t(y) - G_t(y))); H_0 = id and
    H_1 is the vertical shift by `full_shift` (the displayed formula shifts
    by 2*pi*i, not 2*pi).
    """
    if m <= 0:
        raise DomainError("strip width must be positive")
    if validate:
        _validate_boundary(f_bdy, full_shift)
        _validate_boundary(g_bdy, full_shift)
    strip = Rectangle(0.0, m, -4.0 * math.pi, 4.0 * math.pi)

    def at(t: float) -> Map2:
        F, G = f_bdy.at(t), g_bdy.at(t)

        def fwd(z):
            x, y = z.real, z.imag
            lam = 1.0 - x / m
            return x + 1j * (G(y) + lam * (F(y) - G(y)))

        if F.shift is not None and G.shift is not None:
            sf, sg = F.shift, G.shift

            def inv(z):
                x, v = z.real, z.imag
                lam = 1.0 - x / m
                return x + 1j * (v - (sg + lam * (sf - sg)))

        else:

            def inv(z):
                x, v = z.real, z.imag
                lam = 1.0 - x / m

                def h(y):
                    return G(y) + lam * (F(y) - G(y))

                return x + 1j * _bisect_increasing(h, v)

        return Map2(fwd, inv, strip, f"strip(t={t:.3f})")

    return Path(at, at(0.0), at(1.0), strip, "strip-path")


class _AnnulusRegion(Annulus):
    pass


def annulus_rotation_path(p_bdy: LinePath, q_bdy: LinePath, t_ratio: float,
                          validate: bool = True) -> Path:
    """Interpolating loop on 1 <= |z| <= T from boundary circle paths.

    p_bdy/q_bdy are lifts (angle maps) for the inner/outer circle; both must
    run from the identity to a full turn of the same sign.  The path is the
    exp-conjugate of the strip interpolation, so F_0 = F_1 = id on the ring.
    """
    if t_ratio <= 1.0:
        raise DomainError("outer/inner ratio must exceed 1")
    width = math.log(t_ratio)
    ys = np.linspace(-math.pi, math.pi, 9)
    sgn_p = np.sign((p_bdy.at(1.0)(ys) - ys).mean())
    sgn_q = np.sign((q_bdy.at(1.0)(ys) - ys).mean())
    if sgn_p != sgn_q or sgn_p == 0:
        raise DomainError("boundary lifts wind inconsistently")
    full = TWO_PI * float(sgn_p)
    inner = strip_path(p_bdy, q_bdy, width, full_shift=full, validate=validate)
    ann = Annulus(0j, 1.0, t_ratio)

    def at(t: float) -> Map2:
        h = inner.at(t)

        def fwd(z):
            return np.exp(h.forward(np.log(z)))

        def inv(z):
            return np.exp(h.inverse(np.log(z)))

        return Map2(fwd, inv, ann, f"annulus(t={t:.3f})")

    return Path(at, Map2.identity(ann), Map2.identity(ann), ann, "annulus-rotation")


# ---------------------------------------------------------------------------
# translation along a PL curve inside an arena


@dataclass(frozen=True)
class PLCurve:
    vertices: tuple

    def __post_init__(self):
        if len(self.vertices) < 1:
            raise DomainError("curve needs at least one vertex")

    def points(self) -> np.ndarray:
        return np.array(self.vertices, dtype=np.complex128)

    def segments(self):
        pts = self.points()
        out = []
        for i in range(len(pts) - 1):
            v = pts[i + 1] - pts[i]
            if abs(v) > 1e-15:
                out.append((complex(pts[i]), complex(v)))
        return out

    @property
    def length(self) -> float:
        return float(sum(abs(v) for _, v in self.segments()))


def _square(center: complex, half: float) -> Rectangle:
    c = complex(center)
    return Rectangle(c.real - half, c.real + half, c.imag - half, c.imag + half)


def _square_corners(center: complex, half: float) -> list:
    c = complex(center)
    return [
        c + complex(-half, -half),
        c + complex(half, -half),
        c + complex(half, half),
        c + complex(-half, half),
    ]


class _CollarMove:
    """One straight translation of an inner square inside a fixed outer square.

    The frame between the squares is split into 8 triangles deformed
    affinely; everything outside the outer square is fixed.
    """

    def __init__(self, center: complex, h_in: float, v: complex, h_out: float):
        self.center = complex(center)
        self.h_in = h_in
        self.h_out = h_out
        self.v = complex(v)
        self.q_out = _square(self.center + self.v / 2.0, h_out)
        inner = _square_corners(self.center, h_in)
        outer = _square_corners(self.center + self.v / 2.0, h_out)
        tris = []
        for k in range(4):
            o1, o2 = outer[k], outer[(k + 1) % 4]
            i1, i2 = inner[k], inner[(k + 1) % 4]
            tris.append(((o1, o2, i1), (False, False, True)))
            tris.append(((o2, i2, i1), (False, True, True)))
        self.triangles = tris

    def inner_square_at(self, s: float) -> Rectangle:
        return _square(self.center + s * self.v, self.h_in)

    def _tri_at(self, tri, moving, s: float):
        return tuple(p + s * self.v if mv else p for p, mv in zip(tri, moving))

    @staticmethod
    def _locate(z, tris):
        """Index of the containing triangle per point (nearest by signed margin)."""
        n = len(z)
        best = np.full(n, -1, dtype=np.int64)
        best_margin = np.full(n, -np.inf)
        for k, tri in enumerate(tris):
            p0, p1, p2 = tri
            d1, d2 = p1 - p0, p2 - p0
            det = d1.real * d2.imag - d1.imag * d2.real
            w = z - p0
            u = (w.real * d2.imag - w.imag * d2.real) / det
            v = (d1.real * w.imag - d1.imag * w.real) / det
            margin = np.minimum(np.minimum(u, v), 1.0 - u - v)
            upd = margin > best_margin
            best[upd] = k
            best_margin[upd] = margin[upd]
        return best

    def map_at(self, s: float) -> Map2:
        src = [self._tri_at(t, m, 0.0) for t, m in self.triangles]
        dst = [self._tri_at(t, m, s) for t, m in self.triangles]
        coeffs = [affine_from_triangles(a, b) for a, b in zip(src, dst)]
        sv = s * self.v
        q_out, q_in0, q_in_s = self.q_out, self.inner_square_at(0.0), self.inner_square_at(s)

        def fwd(z):
            out = np.array(z, copy=True)
            active = q_out.contains(z, tol=0.0)
            inner = q_in0.contains(z, tol=0.0)
            out[inner] = z[inner] + sv
            collar = active & ~inner
            if np.any(collar):
                zc = z[collar]
                idx = self._locate(zc, src)
                res = np.empty_like(zc)
                for k, (a, b, p0, q0) in enumerate(coeffs):
                    mk = idx == k
                    if np.any(mk):
                        w = zc[mk] - p0
                        res[mk] = q0 + a * w + b * np.conj(w)
                out[collar] = res
            return out

        def inv(z):
            out = np.array(z, copy=True)
            active = q_out.contains(z, tol=0.0)
            inner = q_in_s.contains(z, tol=0.0)
            out[inner] = z[inner] - sv
            collar = active & ~inner
            if np.any(collar):
                zc = z[collar]
                idx = self._locate(zc, dst)
                res = np.empty_like(zc)
                for k, (a, b, p0, q0) in enumerate(coeffs):
                    mk = idx == k
                    if np.any(mk):
                        w = zc[mk] - q0
                        det = abs(a) ** 2 - abs(b) ** 2
                        res[mk] = p0 + (np.conj(a) * w - b * np.conj(w)) / det
                out[collar] = res
            return out

        return Map2(fwd, inv, self.q_out, "collar-move")


def translate_path(body, curve: PLCurve, arena: Rectangle, clearance: float,
                   check: bool = True) -> Path:
    """Path fixing the arena boundary while translating `body` along `curve`.

    The body (convex polygon or rectangle) moves rigidly: at parameter t its
    image is body + (gamma(t) - gamma(0)).  Every segment gets a square
    collar of 8 affinely deformed triangles; the collar must stay at least
    `clearance` inside the arena or the construction aborts.
    """
    bbox = body.bounding_box() if isinstance(body, ConvexPolygon) else body
    if not isinstance(arena, Rectangle):
        raise DomainError("arena must be a rectangle")
    segments = curve.segments()
    if not segments:
        ident = Map2.identity(bbox)
        return Path(lambda t: ident, ident, ident, bbox, "translate(const)")
    h_in = max(bbox.width, bbox.height) / 2.0
    eroded = arena.erode(clearance)
    start = curve.points()[0]
    sub_paths = []
    offset = 0j
    for k, (p, v) in enumerate(segments):
        center = bbox.center + offset
        out_center = center + v / 2.0
        room = min(
            out_center.real - eroded.xmin,
            eroded.xmax - out_center.real,
            out_center.imag - eroded.ymin,
            eroded.ymax - out_center.imag,
        )
        gam_feasible = room - (h_in + abs(v) / 2.0)
        if gam_feasible <= 0:
            raise ClearanceError(
                f"segment {k} of translate move lacks clearance "
                f"(needs {h_in + abs(v) / 2.0:.6g}, room {room:.6g})",
                move=(k, p, v),
            )
        gam = min(h_in, 0.5 * gam_feasible)
        move = _CollarMove(center, h_in, v, h_in + abs(v) / 2.0 + gam)
        sup = move.q_out

        def seg_at(s: float, _move=move) -> Map2:
            return _move.map_at(s)

        seg = Path(seg_at, seg_at(0.0), seg_at(1.0), sup, f"segment-{k}")
        sub_paths.append(seg)
        offset += v
    weights = [abs(v) for _, v in segments]
    return chain(sub_paths, weights, check=check)


# ---------------------------------------------------------------------------
# non-path regression fixture (rotation composed with a translated bump family)


def bump_family_map(copies: int = 50, spin: float = math.pi) -> Map2:
    """Identity outside disks B(n, 1/3), a fixed-distortion swirl inside each."""
    if copies < 1:
        raise DomainError("need at least one copy")
    sup = Rectangle(-1.0, copies + 1.0, -1.0, 1.0)

    def transform(z, sign):
        k = np.clip(np.round(z.real), 0, copies - 1)
        zeta = z - k
        d = np.abs(zeta)
        ramp = np.maximum(0.0, 1.0 - 3.0 * d)
        return k + zeta * np.exp(1j * sign * spin * ramp)

    return Map2(lambda z: transform(z, +1.0), lambda z: transform(z, -1.0), sup, "bump-family")


def example_nonpath(copies: int = 50, spin: float = math.pi, total_angle: float = math.pi) -> Path:
    """Rotation path composed with a fixed translated-bump map.

    The transition maps in one composition order hide the bumps; in the
    other order a far bump is rotated off its footprint and the full bump
    distortion appears for arbitrarily small parameter separation.  Probes
    must detect this.
    """
    bumps = bump_family_map(copies, spin)
    rot = rotation_path(0j, total_angle)
    sup = Rectangle(-float(copies) - 1.0, float(copies) + 1.0,
                    -float(copies) - 1.0, float(copies) + 1.0)

    def at(t: float) -> Map2:
        return rot.at(t).after(bumps, support=sup)

    return Path(at, at(0.0), at(1.0), sup, "example-nonpath")
