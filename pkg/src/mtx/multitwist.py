"""Ring families over the cell tree, the multitwist map, unwinding paths,
and the factorization engine.

Rings are round annuli centered on cell centers, disjoint and nested along
the word tree (each child ring strictly inside its parent's inner disk).
The unwinding path rotates every inner disk rigidly while the innermost
annulus untwists, which keeps every per-ring action an isometry on deeper
structure; partitioning [0,1] finely enough then yields factors of
distortion as close to 1 as requested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernel
from .errors import BudgetExceededError, DomainError, PlacementError
from .fractal import CellTree
from .geom import Annulus, ConvexPolygon, Disk, Rectangle, rect_distance
from .paths import (
    Map2,
    Path,
    PLCurve,
    chain,
    compose_fixed,
    concat,
    conjugate_by_similarity,
    glue,
    restrict,
    reverse,
    ring_twist_map,
    rotation_path,
    shift_line_path,
    annulus_rotation_path,
    translate_path,
)
from .geom import Similarity

# fraction of the feasible ring thickness actually used; keeps the exact
# disjointness checks strictly satisfied under roundoff
_ETA_SAFETY = 63.0 / 64.0

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Ring:
    word: str
    center: complex
    r_out: float
    r_in: float
    eta: float

    @property
    def annulus(self) -> Annulus:
        return Annulus(self.center, self.r_in, self.r_out)

    @property
    def diameter(self) -> float:
        return 2.0 * self.r_out


@dataclass
class RingFamily:
    tree_depth: int
    l_twist: float
    margin: float
    rings: dict
    words: tuple  # DFS preorder

    _arrays: Optional[tuple] = field(default=None, repr=False)

    def ring(self, word: str) -> Ring:
        return self.rings[word]

    @property
    def root(self) -> Ring:
        return self.rings[""]

    @property
    def reported_l(self) -> float:
        """Effective twist constant: max over rings of 1/eta."""
        return max(1.0 / r.eta for r in self.rings.values())

    def shrink_ratios(self) -> dict:
        out = {}
        for w, r in self.rings.items():
            if w and w[:-1] in self.rings:
                out[w] = r.diameter / self.rings[w[:-1]].diameter
        return out

    def arrays(self):
        """Flat tree arrays for the evaluation kernel (DFS preorder)."""
        if self._arrays is None:
            order = {w: i for i, w in enumerate(self.words)}
            n = len(self.words)
            center = np.empty(n, dtype=np.complex128)
            r_in = np.empty(n)
            r_out = np.empty(n)
            eta = np.empty(n)
            child1 = np.full(n, -1, dtype=np.int64)
            child2 = np.full(n, -1, dtype=np.int64)
            level = np.empty(n, dtype=np.int64)
            for w, i in order.items():
                r = self.rings[w]
                center[i], r_in[i], r_out[i], eta[i] = r.center, r.r_in, r.r_out, r.eta
                level[i] = len(w)
                if w + "1" in order:
                    child1[i] = order[w + "1"]
                if w + "2" in order:
                    child2[i] = order[w + "2"]
            self._arrays = (center, r_in, r_out, eta, child1, child2, level)
        return self._arrays

    def to_json_fragment(self) -> list:
        return [
            {
                "word": w,
                "center": [self.rings[w].center.real, self.rings[w].center.imag],
                "r_in": self.rings[w].r_in,
                "r_out": self.rings[w].r_out,
                "eta": self.rings[w].eta,
            }
            for w in self.words
        ]


def _dfs_words(depth: int):
    out = []

    def rec(w):
        out.append(w)
        if len(w) < depth:
            rec(w + "1")
            rec(w + "2")

    rec("")
    return out


def _subtree_leaves(tree: CellTree, word: str):
    return [u for u in tree.leaf_words() if u.startswith(word)]


def place_rings(tree: CellTree, margin: float = 0.25, l_twist: float = 2.0) -> RingFamily:
    """Round ring for every word: r_out from the cell halo, thickness from l_twist.

    r_out(w) = circumradius(D_w) + margin * gap_w, with gap_w half the
    distance to the sibling cell (half the base diameter for the root).  The
    relative thickness eta is 1/l_twist where feasible; rings whose annulus
    would hit a child ring or a leaf cell are thinned to the largest exactly
    verified thickness.  All separation claims are re-checked; violations
    abort naming the offending pair.
    """
    if not (0.0 < margin < 1.0):
        raise DomainError("margin must lie in (0,1)")
    if not l_twist > 1.0:
        raise DomainError("l_twist must exceed 1")
    words = _dfs_words(tree.depth)
    cells = {w: tree.cell(w) for w in words}
    r_out = {}
    for w in words:
        circ = cells[w].circumradius
        if w == "":
            gap = cells[w].diameter / 2.0
        else:
            sib = w[:-1] + ("2" if w[-1] == "1" else "1")
            gap = rect_distance(cells[w], cells[sib]) / 2.0
        r_out[w] = circ + margin * gap
    leaf_words = tree.leaf_words()
    leaf_rects = {u: cells[u] for u in leaf_words}
    rings = {}
    for w in words:
        c = cells[w].center
        # innermost radius must clear child rings and the leaf cells below w
        reach = 0.0
        blocker = None
        for u in leaf_words:
            if u.startswith(w):
                d = leaf_rects[u].max_distance_to(c)
                if d > reach:
                    reach, blocker = d, ("leaf-cell", u)
        for digit in "12":
            wi = w + digit
            if wi in r_out:
                d = abs(cells[wi].center - c) + r_out[wi]
                if d > reach:
                    reach, blocker = d, ("child-ring", wi)
        if reach >= r_out[w]:
            raise PlacementError(
                f"ring '{w}' cannot enclose {blocker[0]} '{blocker[1]}' "
                f"(reach {reach:.6g} >= r_out {r_out[w]:.6g}); "
                "reduce margin or tree depth",
                detail=(w, blocker[1]),
            )
        eta = min(1.0 / l_twist, (1.0 - reach / r_out[w]) * _ETA_SAFETY)
        rings[w] = Ring(w, c, r_out[w], r_out[w] * (1.0 - eta), eta)
    fam = RingFamily(tree.depth, l_twist, margin, rings, tuple(words))
    _verify_family(fam, tree)
    return fam


def _verify_family(fam: RingFamily, tree: CellTree):
    words = fam.words
    # pairwise ring disjointness
    for i, wa in enumerate(words):
        ra = fam.rings[wa]
        for wb in words[i + 1:]:
            rb = fam.rings[wb]
            if not ra.annulus.disjoint_from_annulus(rb.annulus):
                raise PlacementError(
                    f"rings '{wa}' and '{wb}' intersect", detail=(wa, wb)
                )
    # child rings strictly inside parent inner disks
    for w in words:
        if not w:
            continue
        parent = fam.rings[w[:-1]]
        child = fam.rings[w]
        if abs(child.center - parent.center) + child.r_out >= parent.r_in:
            raise PlacementError(
                f"ring '{w}' is not strictly inside the inner disk of '{w[:-1]}'",
                detail=(w[:-1], w),
            )
    # annuli avoid every leaf cell: own subtree inside the hole, others outside
    for w in words:
        ring = fam.rings[w]
        for u in tree.leaf_words():
            cell = tree.cell(u)
            if u.startswith(w):
                if cell.max_distance_to(ring.center) >= ring.r_in:
                    raise PlacementError(
                        f"leaf cell '{u}' is not inside the hole of ring '{w}'",
                        detail=(w, u),
                    )
            elif not ring.annulus.disjoint_from_rect(cell):
                raise PlacementError(
                    f"ring '{w}' touches foreign leaf cell '{u}'", detail=(w, u)
                )


# ---------------------------------------------------------------------------
# the multitwist map and its unwinding path


@dataclass
class MultitwistMap:
    rings: RingFamily
    depth_cut: int
    map2: Map2

    def __call__(self, z):
        return self.map2(z)


def _walk_map(fam: RingFamily, t: float, depth_cut: int) -> Map2:
    center, r_in, r_out, eta, child1, child2, level = fam.arrays()
    sup = Disk(fam.root.center, fam.root.r_out)

    def fwd(z):
        return kernel.ring_walk(z, t, center, r_in, r_out, eta, child1, child2,
                                level, depth_cut, False)

    def inv(z):
        return kernel.ring_walk(z, t, center, r_in, r_out, eta, child1, child2,
                                level, depth_cut, True)

    return Map2(fwd, inv, sup, f"ring-walk(t={t:.6f})")


def multitwist_map(rings: RingFamily, depth_cut: Optional[int] = None) -> MultitwistMap:
    """The map f: conjugated full twist on every ring of depth <= depth_cut."""
    cut = rings.tree_depth if depth_cut is None else depth_cut
    if cut < 0:
        raise DomainError("depth_cut must be >= 0")
    return MultitwistMap(rings, cut, _walk_map(rings, 0.0, cut))


def unwind_path(rings: RingFamily, depth_cut: Optional[int] = None) -> Path:
    """Bi-Lipschitz path from the multitwist map to the identity.

    At parameter t every ring's inner disk rotates rigidly by -2*pi*t while
    the annulus carries the partial twist with 1-t turns; all rings unwind
    simultaneously and each action is an isometry on everything deeper.
    """
    cut = rings.tree_depth if depth_cut is None else depth_cut
    sup = Disk(rings.root.center, rings.root.r_out)
    f0 = _walk_map(rings, 0.0, cut)

    def at(t: float) -> Map2:
        return _walk_map(rings, t, cut)

    path = Path(at, f0, Map2.identity(sup), sup, "unwind")
    # distortion concentrates in the ring annuli; the factor engine
    # oversamples these regions
    path.focus_regions = [
        rings.rings[w].annulus for w in rings.words if len(w) <= cut
    ]
    return path


# ---------------------------------------------------------------------------
# gathering schedule (translate islands into a ball, rotate, translate back)


def _long_dir(word: str) -> complex:
    """Unit vector along the long axis of D_w (alternates with depth)."""
    return 1.0 + 0j if len(word) % 2 == 0 else 1j


@dataclass
class GatherStageRecord:
    stage: int
    word: str
    target: Rectangle       # the schedule rectangle D'_w
    slot_centers: tuple
    blob_half_short: float  # half of the gathered blob's short side


def _blob_rect(center: complex, half_short: float, long_dir: complex) -> Rectangle:
    hs, hl = half_short, math.sqrt(2) * half_short
    if long_dir == 1.0 + 0j:
        return Rectangle(center.real - hl, center.real + hl, center.imag - hs, center.imag + hs)
    return Rectangle(center.real - hs, center.real + hs, center.imag - hl, center.imag + hl)


def gather_path(tree: CellTree, beta: float, n: int, check: bool = True):
    """Translation schedule moving all depth-n cells into the central blob.

    Stage m pairs up the blobs of sibling words at depth n-m+1 and translates
    both into slots inside the target rectangle D'_w; every move is realized
    by translate_path, so depth-n cells ride along as exact rigid translates.
    Returns (path, records).
    """
    alpha = tree.spec.alpha
    sigma = tree.spec.ratio
    if not (0.0 < beta) or (1.0 - alpha) * (1.0 + beta) >= 1.0:
        raise DomainError("need beta > 0 with (1-alpha)*(1+beta) < 1")
    if n < 1 or n > tree.depth:
        raise DomainError(f"gather depth n={n} must lie in [1, tree depth {tree.depth}]")
    u = [((math.sqrt(2) * (1.0 + beta)) ** m) * sigma**n for m in range(n + 1)]
    stages = []
    records = []
    for m in range(1, n + 1):
        pieces = []
        for w in tree.words(n - m):
            dirw = _long_dir(w)
            cw = tree.center(w)
            target = _blob_rect(cw, u[m], dirw)
            slot = {}
            moves = []
            for digit in "12":
                v = w + digit
                cv = tree.center(v)
                sign = 1.0 if ((cv - cw) / dirw).real > 0 else -1.0
                slot[digit] = cw + sign * (1.0 + beta) * u[m - 1] * dirw
            records.append(GatherStageRecord(m, w, target, (slot["1"], slot["2"]), u[m]))
            buf = 0.5 * beta * u[m - 1]
            arena_all = tree.cell(w)
            for digit in "12":
                v = w + digit
                cv = tree.center(v)
                body = _blob_rect(cv, u[m - 1], _long_dir(v)).as_polygon()
                other = "2" if digit == "1" else "1"
                if digit == "1":
                    # the other blob still sits at its cell center
                    guard = tree.center(w + other)
                else:
                    guard = slot[other]
                arena = _cut_arena(arena_all, cw, dirw, cv, guard, u[m - 1], buf)
                curve = PLCurve((cv, slot[digit]))
                moves.append(translate_path(body, curve, arena, clearance=buf / 2.0,
                                            check=check))
            word_path = chain(moves, check=check)
            pieces.append((arena_all, word_path))
        stages.append(glue(pieces, check=check))
    return chain(stages, check=check), records


def _cut_arena(cell: Rectangle, cw: complex, dirw: complex, mover_center: complex,
               guard_center: complex, half_short: float, buf: float) -> Rectangle:
    """Sub-rectangle of the cell on the mover's side, stopping short of the guard blob."""
    xi_guard = ((guard_center - cw) / dirw).real
    xi_mover = ((mover_center - cw) / dirw).real
    if xi_mover < xi_guard:
        hi = xi_guard - half_short - buf
        lo = None
    else:
        lo = xi_guard + half_short + buf
        hi = None
    if dirw == 1.0 + 0j:
        xmin = cell.xmin if lo is None else cw.real + lo
        xmax = cell.xmax if hi is None else cw.real + hi
        return Rectangle(xmin, xmax, cell.ymin, cell.ymax)
    ymin = cell.ymin if lo is None else cw.imag + lo
    ymax = cell.ymax if hi is None else cw.imag + hi
    return Rectangle(cell.xmin, cell.xmax, ymin, ymax)


def gather_unwind_path(tree: CellTree, rings: RingFamily, beta: float, n: int,
                       eps_ball: float, check: bool = True) -> Path:
    """Unwind the root twist by gathering, rotating in a ball, ungathering.

    Phase 1 translates all depth-n cells into the ball B(center, eps_ball)
    while the root ring holds its full twist; phase 2 rotates the root inner
    disk through a full turn (rigid on the ball, interpolated across the
    annulus around it) as the root annulus untwists; phase 3 reverses the
    gather.  Endpoints: the conjugated root twist and the identity — both
    the identity off the root ring's outer disk.
    """
    alpha = tree.spec.alpha
    root = rings.root
    smallness = ((1.0 + beta) * (1.0 - alpha)) ** n
    if smallness >= eps_ball / 4.0:
        raise DomainError(
            f"(1+beta)^n (1-alpha)^n = {smallness:.6g} must be below eps_ball/4 = {eps_ball / 4.0:.6g}"
        )
    if not eps_ball < root.r_in:
        raise DomainError("eps_ball must be smaller than the root ring's inner radius")
    gather, _records = gather_path(tree, beta, n, check=check)
    c0 = root.center
    root_twist = ring_twist_map(c0, root.r_out, root.eta, turns=1.0)

    # phase 1: gather below the frozen full twist
    p1 = compose_fixed(gather, pre=root_twist)

    # phase 2: full backward turn inside, annulus-interpolated, ring untwisting
    ball = Disk(c0, eps_ball)
    mid = Annulus(c0, eps_ball, root.r_in)
    ring_region = Annulus(c0, root.r_in, root.r_out)
    disk_rot = rotation_path(c0, -2.0 * math.pi, support=ball)
    lift = shift_line_path(lambda t: -2.0 * math.pi * t)
    mid_canonical = annulus_rotation_path(lift, lift, root.r_in / eps_ball)
    mid_path = restrict(
        conjugate_by_similarity(mid_canonical, Similarity(eps_ball, 0.0, c0)), mid
    )

    def ring_at(t: float) -> Map2:
        return ring_twist_map(c0, root.r_out, root.eta, turns=1.0 - t)

    ring_path = Path(ring_at, root_twist, Map2.identity(ring_region), ring_region, "root-untwist")
    rotate = glue(
        [(ball, disk_rot), (mid, mid_path), (ring_region, ring_path)], check=check
    )
    p2 = compose_fixed(rotate, pre=gather.end)

    # phase 3: reverse the gather (ring already the identity)
    p3 = reverse(gather)

    return concat([p1, p2, p3], check=check)


# ---------------------------------------------------------------------------
# decomposition into small-distortion factors


@dataclass
class DecomposeConfig:
    pairs: int = 4096
    seed: int = 42
    budget: int = 2**14
    slack_frac: float = 0.01


@dataclass
class Factor:
    interval: tuple
    map2: Map2
    distortion: float
    kind: str = "path-slice"
    params: dict = field(default_factory=dict)


@dataclass
class FactorList:
    factors: list
    eps: float
    seed: int
    intervals_tested: int = 0

    def __len__(self):
        return len(self.factors)

    def compose_all(self, z: np.ndarray) -> np.ndarray:
        out = np.array(z, copy=True)
        for f in self.factors:
            out = f.map2.forward(out)
        return out

    def to_json(self) -> list:
        return [
            {
                "interval": [f.interval[0], f.interval[1]],
                "distortion": f.distortion,
                "kind": f.kind,
                "params": f.params,
            }
            for f in self.factors
        ]


def _transition(path: Path, a: float, b: float) -> Map2:
    """at(a) o at(b)^{-1}: the factor carried by the parameter interval [a, b]."""
    ma, mb = path.at(a), path.at(b)
    return Map2(
        lambda z: ma.forward(mb.inverse(z)),
        lambda z: mb.forward(ma.inverse(z)),
        path.support,
        f"slice[{a:.6f},{b:.6f}]",
    )


_ENGINE_LADDER = (0.3, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5)


def _sampled_transition_distortion(path: Path, a: float, b: float,
                                   cfg: "DecomposeConfig") -> float:
    """Sampled distortion of T = at(a) o at(b)^{-1}.

    Half the pairs are uniform over the support.  The rest are near-diagonal
    pairs inside the at(b)-images of the declared focus annuli (image center
    = at(b) applied to the ring center, radius unchanged), radially biased
    outward where the twist shear peaks and with separations scaled to the
    annulus width.  There T is a plain small shear, so random directions
    give a tight lower bound.
    """
    seed = _interval_seed(cfg.seed, a, b)
    rng = np.random.Generator(np.random.Philox(key=seed & 0xFFFFFFFFFFFFFFFF))
    ma, mb = path.at(a), path.at(b)
    n_u = max(2, cfg.pairs // 2)
    parts_a = [path.support.sample_interior(n_u, rng)]
    parts_b = [path.support.sample_interior(n_u, rng)]
    focus = getattr(path, "focus_regions", None) or []
    if focus:
        centers = np.array([ann.center for ann in focus], dtype=np.complex128)
        moved = mb.forward(centers)
        per_region = max(96, (cfg.pairs // 2) // len(focus))
        per_scale = max(12, per_region // len(_ENGINE_LADDER))
        for ann, c_img in zip(focus, moved):
            width = ann.r_out - ann.r_in
            for scale in _ENGINE_LADDER:
                u = rng.uniform(0.0, 1.0, per_scale)
                rad = ann.r_out - width * u * u  # outward bias
                th = rng.uniform(0.0, TWO_PI, per_scale)
                base = c_img + rad * np.exp(1j * th)
                direction = np.exp(1j * rng.uniform(0.0, TWO_PI, per_scale))
                parts_a.append(base)
                parts_b.append(base + scale * width * direction)
    za = np.concatenate(parts_a)
    zb = np.concatenate(parts_b)
    keep = np.abs(za - zb) > 1e-14
    za, zb = za[keep], zb[keep]
    ta = ma.forward(mb.inverse(za))
    tb = ma.forward(mb.inverse(zb))
    ratios = np.abs(ta - tb) / np.abs(za - zb)
    hi, lo = float(ratios.max()), float(ratios.min())
    return max(hi, 1.0 / lo)


def decompose(path: Path, eps: float, config: Optional[DecomposeConfig] = None) -> FactorList:
    """Adaptive bisection of [0,1] into intervals with factor distortion <= 1+eps.

    An interval is accepted when the sampled distortion of its transition map
    stays below (1+eps)/(1+slack); the slack guards the later, independent
    re-measurement.  Factors come out ordered so composing them left to right
    reproduces the path's starting map.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    cfg = config or DecomposeConfig()
    threshold = (1.0 + eps) / (1.0 + cfg.slack_frac * eps)
    accepted = []
    stack = [(0.0, 1.0)]
    tested = 0
    while stack:
        a, b = stack.pop()
        tested += 1
        if tested > cfg.budget:
            raise BudgetExceededError(
                f"split budget {cfg.budget} exhausted at interval [{a}, {b}]",
                interval=(a, b),
            )
        dist = _sampled_transition_distortion(path, a, b, cfg)
        if dist <= threshold:
            accepted.append((a, b, dist))
        else:
            mid = 0.5 * (a + b)
            stack.append((mid, b))
            stack.append((a, mid))
    accepted.sort(key=lambda x: x[0])
    factors = [
        Factor((a, b), _transition(path, a, b), dist)
        for (a, b, dist) in reversed(accepted)
    ]
    return FactorList(factors, eps, cfg.seed, intervals_tested=tested)


def _interval_seed(seed: int, a: float, b: float) -> int:
    key = hash((int(seed), round(a * 2**40), round(b * 2**40)))
    return key & 0x7FFFFFFF


@dataclass(frozen=True)
class ScalingFactor:
    """One factor of the 1-d warm-up: x -> scale * x."""

    scale: float

    @property
    def distortion(self) -> float:
        return max(self.scale, 1.0 / self.scale)

    def apply(self, x):
        return self.scale * np.asarray(x, dtype=float)


def decompose_dim1(l_const: float, m: int) -> list:
    """Split x -> L*x into m equal scalings of distortion L^{1/m} each."""
    if l_const <= 1.0:
        raise DomainError("model map needs L > 1 (use the inverse convention otherwise)")
    if m < 1:
        raise DomainError("need at least one factor")
    scale = l_const ** (1.0 / m)
    return [ScalingFactor(scale) for _ in range(m)]
