"""Grid-square thickenings and polygonal boundary extraction.

The delta-square thickening of a bounded set W is the union of delta-grid
squares meeting the union of 4delta-grid squares meeting W.  Its boundary
is a disjoint collection of axis-aligned Jordan loops whose points sit at
distance between delta and 8*delta from W.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geom import Rectangle, as_points, segment_intersects_rect

_GRID_SNAP = 1e-9


@dataclass(frozen=True)
class Grid:
    spacing: float

    def __post_init__(self):
        if not self.spacing > 0:
            raise DomainError("grid spacing must be positive")


@dataclass(frozen=True)
class SquareSet:
    """Finite set of lattice squares spacing*(n + [0,1]^2)."""

    spacing: float
    indices: frozenset

    def __len__(self):
        return len(self.indices)

    def sorted_indices(self):
        return sorted(self.indices)

    def square_rect(self, n) -> Rectangle:
        a = self.spacing
        return Rectangle(n[0] * a, (n[0] + 1) * a, n[1] * a, (n[1] + 1) * a)

    def union_contains(self, z, tol: float = 0.0) -> bool:
        z = complex(z)
        for n in self.indices:
            if self.square_rect(n).contains(z, tol):
                return True
        return False

    def issubset(self, other: "SquareSet") -> bool:
        return self.spacing == other.spacing and self.indices <= other.indices


@dataclass(frozen=True)
class GridBoundary:
    spacing: float
    curves: tuple  # of np.ndarray of complex vertices, each a closed loop

    def loop_count(self) -> int:
        return len(self.curves)

    def all_vertices(self) -> np.ndarray:
        return np.concatenate([c for c in self.curves])

    def to_json(self) -> dict:
        return {
            "spacing": self.spacing,
            "loops": [[[float(v.real), float(v.imag)] for v in loop] for loop in self.curves],
        }

    def to_svg(self, stroke: str = "#1f77b4") -> str:
        paths = []
        for loop in self.curves:
            cmds = [f"M {loop[0].real:.9g} {loop[0].imag:.9g}"]
            cmds += [f"L {v.real:.9g} {v.imag:.9g}" for v in loop[1:]]
            cmds.append("Z")
            paths.append(f'<path d="{" ".join(cmds)}" fill="none" stroke="{stroke}"/>')
        vs = self.all_vertices()
        pad = 2 * self.spacing
        x0, x1 = vs.real.min() - pad, vs.real.max() + pad
        y0, y1 = vs.imag.min() - pad, vs.imag.max() + pad
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.9g} {y0:.9g} '
            f'{x1 - x0:.9g} {y1 - y0:.9g}">' + "".join(paths) + "</svg>"
        )


def _index_window(lo: float, hi: float, a: float):
    """Over-approximating index window; callers filter with exact tests."""
    return range(int(math.floor(lo / a)) - 1, int(math.floor(hi / a)) + 2)


def _is_segment(w) -> bool:
    return (
        isinstance(w, tuple)
        and len(w) == 2
        and all(isinstance(e, (complex, float, int, np.complexfloating, np.floating)) for e in w)
    )


def squares_meeting(w, alpha: float) -> SquareSet:
    """All closed grid squares of spacing alpha meeting the set w.

    w may be a point array, a Rectangle, or a (p, q) segment tuple.  A point
    on a shared edge belongs to every touching square.
    """
    if alpha <= 0:
        raise DomainError("spacing must be positive")
    snap = _GRID_SNAP * alpha
    idx = set()
    if isinstance(w, Rectangle):
        for ix in _index_window(w.xmin, w.xmax, alpha):
            for iy in _index_window(w.ymin, w.ymax, alpha):
                sq = Rectangle(ix * alpha, (ix + 1) * alpha, iy * alpha, (iy + 1) * alpha)
                if not (
                    sq.xmax < w.xmin - snap
                    or sq.xmin > w.xmax + snap
                    or sq.ymax < w.ymin - snap
                    or sq.ymin > w.ymax + snap
                ):
                    idx.add((ix, iy))
        return SquareSet(alpha, frozenset(idx))
    if _is_segment(w):
        p, q = complex(w[0]), complex(w[1])
        for ix in _index_window(min(p.real, q.real), max(p.real, q.real), alpha):
            for iy in _index_window(min(p.imag, q.imag), max(p.imag, q.imag), alpha):
                sq = Rectangle(ix * alpha, (ix + 1) * alpha, iy * alpha, (iy + 1) * alpha)
                if segment_intersects_rect(p, q, sq, tol=snap):
                    idx.add((ix, iy))
        return SquareSet(alpha, frozenset(idx))

    pts = as_points(w)
    if pts.size == 0:
        raise DomainError("squares_meeting of empty set")
    if not np.all(np.isfinite(pts.real)) or not np.all(np.isfinite(pts.imag)):
        raise DomainError("unbounded input")
    for z in pts:
        idx.update(_squares_at_point(z, alpha))
    return SquareSet(alpha, frozenset(idx))


def _axis_cells(x: float, a: float):
    t = x / a
    r = round(t)
    if abs(t - r) <= _GRID_SNAP * max(1.0, abs(t)):
        return (int(r) - 1, int(r))
    return (int(math.floor(t)),)


def _squares_at_point(z: complex, a: float):
    for ix in _axis_cells(z.real, a):
        for iy in _axis_cells(z.imag, a):
            yield (ix, iy)


def thicken(w, delta: float) -> SquareSet:
    """Square thickening: delta-squares meeting the union of 4delta-squares meeting w.

    The two grids are aligned (4delta is a multiple of delta), so the result
    is the coarse union expanded by exactly delta in the L-inf metric.
    """
    if delta <= 0:
        raise DomainError("delta must be positive")
    coarse = squares_meeting(w, 4.0 * delta)
    fine = set()
    for (nx, ny) in coarse.indices:
        # closed 4delta square spans fine indices [4n, 4n+3]; touching squares add one ring
        for ix in range(4 * nx - 1, 4 * nx + 5):
            for iy in range(4 * ny - 1, 4 * ny + 5):
                fine.add((ix, iy))
    return SquareSet(delta, frozenset(fine))


def components(s: SquareSet) -> list:
    """Edge-adjacent connected components, sorted by minimal lattice index.

    Corner-only contact is not adjacency; this keeps the boundary loops of
    distinct components disjoint.
    """
    if len(s.indices) == 0:
        raise DomainError("components of empty square set")
    remaining = set(s.indices)
    comps = []
    while remaining:
        seed = min(remaining)
        stack = [seed]
        remaining.discard(seed)
        comp = {seed}
        while stack:
            (x, y) = stack.pop()
            for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if nb in remaining:
                    remaining.discard(nb)
                    comp.add(nb)
                    stack.append(nb)
        comps.append(SquareSet(s.spacing, frozenset(comp)))
    comps.sort(key=lambda c: min(c.indices))
    return comps


def boundary_curves(s: SquareSet) -> GridBoundary:
    """Trace the boundary of the square union into disjoint closed loops.

    Each boundary edge is oriented with the filled region on its left; at
    degree-4 vertices (diagonal contact) the trace turns left, which keeps
    loops simple and mutually disjoint.
    """
    if len(s.indices) == 0:
        raise DomainError("boundary of empty square set")
    filled = s.indices
    # oriented edges (vertex -> vertex) in lattice coordinates
    edges = {}
    for (x, y) in filled:
        if (x, y - 1) not in filled:
            edges[((x, y), (x + 1, y))] = True
        if (x + 1, y) not in filled:
            edges[((x + 1, y), (x + 1, y + 1))] = True
        if (x, y + 1) not in filled:
            edges[((x + 1, y + 1), (x, y + 1))] = True
        if (x - 1, y) not in filled:
            edges[((x, y + 1), (x, y))] = True
    out_at = {}
    for (a, b) in edges:
        out_at.setdefault(a, []).append(b)
    loops = []
    visited = set()
    for start in sorted(edges):
        if start in visited:
            continue
        loop = [start[0]]
        cur = start
        while True:
            visited.add(cur)
            a, b = cur
            nxts = out_at[b]
            if len(nxts) == 1:
                nxt = nxts[0]
            else:
                d = (b[0] - a[0], b[1] - a[1])
                left = (b[0] - d[1], b[1] + d[0])
                nxt = left if left in nxts else next(c for c in nxts if (b, c) not in visited)
            loop.append(b)
            cur = (b, nxt)
            if cur == start:
                break
        loops.append(np.array([complex(v[0] * s.spacing, v[1] * s.spacing) for v in loop[:-1]]))
    loops.sort(key=lambda l: (l[0].real, l[0].imag))
    return GridBoundary(s.spacing, tuple(loops))
