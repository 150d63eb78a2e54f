"""Self-similar Cantor set construction and its metric certificates.

The attractor is generated by two similarities that shrink the base
rectangle [-sqrt2, sqrt2] x [-1, 1] by (1-alpha)/sqrt2, rotate a quarter
turn and land on the left/right child rectangles.  Word-indexed cells
D_w (w over the alphabet {1,2}) organize everything downstream: ring
placement, gathering schedules and the dimension estimators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DomainError, EstimationError
from .geom import Rectangle, Similarity, rect_distance

BASE_RECT = Rectangle(-math.sqrt(2), math.sqrt(2), -1.0, 1.0)
DEFAULT_CELL_BUDGET = 2**20


@dataclass(frozen=True)
class IfsSpec:
    """Gap parameter alpha in (0,1) plus the base rectangle."""

    alpha: float
    base: Rectangle = BASE_RECT

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must lie in (0,1), got {self.alpha}")

    @property
    def ratio(self) -> float:
        """Contraction ratio (1-alpha)/sqrt(2) of both child maps."""
        return (1.0 - self.alpha) / math.sqrt(2)

    def child_similarities(self) -> tuple:
        """phi_1, phi_2: quarter-turn contractions onto the two child cells."""
        off = self.base.width / 4.0
        c = self.base.center
        phi1 = Similarity(self.ratio, math.pi / 2, c - off)
        phi2 = Similarity(self.ratio, math.pi / 2, c + off)
        return phi1, phi2


def _image_rect(sim: Similarity, rect: Rectangle) -> Rectangle:
    corners = sim.apply(rect.corners())
    return Rectangle(
        float(corners.real.min()),
        float(corners.real.max()),
        float(corners.imag.min()),
        float(corners.imag.max()),
    )


@dataclass
class CellTree:
    """Word-indexed cells D_w for w in {1,2}^{<=depth}."""

    spec: IfsSpec
    depth: int
    cells: dict = field(repr=False)
    sims: dict = field(repr=False)

    def words(self, level=None):
        if level is None:
            out = []
            for k in range(self.depth + 1):
                out.extend(self.words(k))
            return out
        if level == 0:
            return [""]
        return ["".join(w) for w in _words_of_length(level)]

    def leaf_words(self):
        return self.words(self.depth)

    def cell(self, word: str) -> Rectangle:
        return self.cells[word]

    def sim(self, word: str) -> Similarity:
        return self.sims[word]

    def center(self, word: str) -> complex:
        return self.cells[word].center

    def children(self, word: str):
        if len(word) >= self.depth:
            return []
        return [word + "1", word + "2"]

    @staticmethod
    def parent(word: str) -> str:
        return word[:-1]

    def leaf_centers(self) -> np.ndarray:
        return np.array([self.cells[w].center for w in self.leaf_words()])

    def to_json_fragment(self) -> dict:
        return {
            "alpha": self.spec.alpha,
            "depth": self.depth,
            "cells": [
                {
                    "word": w,
                    "rect": [
                        self.cells[w].xmin,
                        self.cells[w].xmax,
                        self.cells[w].ymin,
                        self.cells[w].ymax,
                    ],
                }
                for w in self.words()
            ],
        }


def _words_of_length(k: int):
    if k == 0:
        yield ()
        return
    for prefix in _words_of_length(k - 1):
        yield prefix + ("1",)
        yield prefix + ("2",)


def build_cells(spec: IfsSpec, depth: int, budget: int = DEFAULT_CELL_BUDGET) -> CellTree:
    """Materialize the cell tree; 2^k cells at level k."""
    if depth < 0:
        raise DomainError("depth must be >= 0")
    if 2**depth > budget:
        raise CapacityError(f"2^{depth} cells exceed budget {budget}")
    phi1, phi2 = spec.child_similarities()
    sims = {"": Similarity.identity()}
    cells = {"": spec.base}
    frontier = [""]
    for _ in range(depth):
        nxt = []
        for w in frontier:
            for digit, phi in (("1", phi1), ("2", phi2)):
                wi = w + digit
                sims[wi] = sims[w].compose(phi)
                cells[wi] = _image_rect(sims[wi], spec.base)
                nxt.append(wi)
        frontier = nxt
    return CellTree(spec=spec, depth=depth, cells=cells, sims=sims)


def assouad_dim_formula(alpha: float) -> float:
    """Closed-form Assouad dimension of the attractor; decreasing in alpha."""
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0,1), got {alpha}")
    return math.log(2.0) / (0.5 * math.log(2.0) - math.log(1.0 - alpha))


@dataclass(frozen=True)
class CantorApprox:
    """Finite stand-in for the attractor: one representative point per leaf cell."""

    depth: int
    points: np.ndarray
    leaf_diameter: float

    @staticmethod
    def from_tree(tree: CellTree) -> "CantorApprox":
        leaf = tree.cells[tree.leaf_words()[0]]
        return CantorApprox(tree.depth, tree.leaf_centers(), leaf.diameter)


def _greedy_separated_count(points: np.ndarray, eps: float) -> int:
    """Size of a greedy eps-separated subset (first-come order)."""
    kept = np.empty(len(points), dtype=np.complex128)
    n = 0
    for p in points:
        if n == 0 or np.abs(kept[:n] - p).min() >= eps:
            kept[n] = p
            n += 1
    return n


def homogeneity_estimate(approx: CantorApprox, scales) -> float:
    """Least-squares slope of log(max separated count in balls) vs log(R/eps).

    Balls are centered on a deterministic subsample of the points at several
    radii; the greedy net count inside each ball is the homogeneity card(V).
    """
    scales = sorted(float(s) for s in scales)
    if len(approx.points) == 1:
        return 0.0
    if len(scales) < 2 or scales[0] <= 0:
        raise EstimationError("need at least two positive scales")
    if scales[-1] / scales[0] < 100.0:
        raise EstimationError("scales must span at least two orders of magnitude")
    if scales[0] < approx.leaf_diameter:
        raise EstimationError(
            f"smallest scale {scales[0]} is below leaf resolution {approx.leaf_diameter}"
        )
    pts = approx.points
    diam = float(np.abs(pts[:, None] - pts[None, :]).max()) if len(pts) <= 4096 else _cloud_diam(pts)
    centers = pts[:: max(1, len(pts) // 32)]
    radii = [diam, diam / 4.0, diam / 16.0]
    xs, ys = [], []
    for radius in radii:
        for eps in scales:
            if eps > radius / 4.0:
                continue
            best = 0
            for c in centers:
                ball = pts[np.abs(pts - c) <= radius]
                if len(ball) < 2:
                    continue
                best = max(best, _greedy_separated_count(ball, eps))
            if best >= 2:
                xs.append(math.log(radius / eps))
                ys.append(math.log(best))
    if len(xs) < 2:
        raise EstimationError("insufficient usable (radius, scale) pairs")
    slope = np.polyfit(np.array(xs), np.array(ys), 1)[0]
    return float(slope)


def _cloud_diam(pts: np.ndarray) -> float:
    from .geom import convex_hull

    return convex_hull(pts).diameter()


def ud_tree_certificate(tree: CellTree) -> float:
    """Certified relative-separation constant of the word tree.

    Returns min over internal words of dist(D_w1, D_w2) / max diam; +inf when
    every split is between point cells (never the case for rectangle cells).
    """
    if tree.depth < 1:
        raise DomainError("certificate needs depth >= 1")
    best = math.inf
    for level in range(tree.depth):
        for w in tree.words(level):
            c1, c2 = tree.cells[w + "1"], tree.cells[w + "2"]
            dmax = max(c1.diameter, c2.diameter)
            if dmax == 0.0:
                continue
            best = min(best, rect_distance(c1, c2) / dmax)
    return best
