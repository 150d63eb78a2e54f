"""Numerical verification: distortion sampling, path probes, residuals,
and the closed-form modulus utilities.

Distortion estimates are lower bounds obtained from random point pairs plus
a near-diagonal ladder (pair separations at 1e-1 .. 1e-6 of the region
size) that catches derivative-scale stretching.  All sampling is Philox
counter-based, so results are reproducible per seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .geom import RealLinearMap
from .paths import Map2, Path

_LADDER = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & 0xFFFFFFFFFFFFFFFF))


def _region_size(region) -> float:
    d = getattr(region, "diameter", None)
    if d is None:
        return 8.0
    return float(d() if callable(d) else d)


_PAIR_CHUNK = 1024


def _pair_chunk(region, seed: int, index: int, ladder: bool):
    rng = np.random.Generator(
        np.random.Philox(key=np.array([seed & 0xFFFFFFFFFFFFFFFF, index], dtype=np.uint64))
    )
    n_uniform = _PAIR_CHUNK if not ladder else _PAIR_CHUNK - (_PAIR_CHUNK // 2)
    a_parts = [region.sample_interior(n_uniform, rng)]
    b_parts = [region.sample_interior(n_uniform, rng)]
    if ladder:
        per = (_PAIR_CHUNK // 2) // len(_LADDER) + 1
        size = _region_size(region)
        for scale in _LADDER:
            base = region.sample_interior(per, rng)
            ang = rng.uniform(0.0, 2 * math.pi, per)
            off = scale * size * np.exp(1j * ang)
            mate = base + off
            project = getattr(region, "project", None)
            if project is not None:
                mate = project(mate)
            else:
                inside = region.contains(mate, tol=0.0)
                mate = np.where(inside, mate, base - off)
            a_parts.append(base)
            b_parts.append(mate)
    return (
        np.concatenate(a_parts)[:_PAIR_CHUNK],
        np.concatenate(b_parts)[:_PAIR_CHUNK],
    )


def sample_pairs(region, pairs: int, seed: int, ladder: bool = True):
    """(a, b) arrays of point pairs in the region; half uniform, half laddered.

    Generation is chunked with per-chunk counter keys, so a larger budget
    extends a smaller one pair-for-pair (estimates are monotone in budget).
    """
    if pairs < 2:
        raise DomainError("need at least two pairs")
    a_parts, b_parts = [], []
    got = 0
    index = 0
    while got < pairs:
        a, b = _pair_chunk(region, seed, index, ladder)
        take = min(_PAIR_CHUNK, pairs - got)
        a_parts.append(a[:take])
        b_parts.append(b[:take])
        got += take
        index += 1
    a = np.concatenate(a_parts)
    b = np.concatenate(b_parts)
    keep = np.abs(a - b) > 1e-14
    return a[keep], b[keep]


def stretch_bounds(forward, a: np.ndarray, b: np.ndarray):
    """(max, min) of |f(a)-f(b)| / |a-b| over the sampled pairs."""
    num = np.abs(forward(a) - forward(b))
    den = np.abs(a - b)
    ratios = num / den
    return float(ratios.max()), float(ratios.min())


@dataclass(frozen=True)
class DistortionReport:
    map_id: str
    pairs: int
    max_stretch: float
    min_stretch: float
    distortion: float
    seed: int

    def csv_row(self) -> str:
        return (
            f"{self.map_id},{self.pairs},{self.max_stretch!r},"
            f"{self.min_stretch!r},{self.distortion!r},{self.seed}"
        )

    @staticmethod
    def csv_header() -> str:
        return "map_id,pairs,max_stretch,min_stretch,distortion,seed"


def distortion_estimate(m: Map2, region=None, pairs: int = 10**4, seed: int = 0,
                        map_id: str = "") -> DistortionReport:
    """Lower-bound estimate of the isometric distortion by pair sampling."""
    reg = region if region is not None else m.support
    a, b = sample_pairs(reg, pairs, seed)
    hi, lo = stretch_bounds(m.forward, a, b)
    return DistortionReport(
        map_id or m.label, len(a), hi, lo, max(hi, 1.0 / lo), seed
    )


# ---------------------------------------------------------------------------
# path probes (both transition orders; the reversed order catches the
# rotation-of-translated-bumps failure mode)


@dataclass
class ProbeTable:
    s: np.ndarray
    t: np.ndarray
    displacement: np.ndarray
    distortion: np.ndarray

    def eps_of_delta(self, deltas) -> list:
        """Monotone summary: worst displacement/distortion over |s-t| <= delta."""
        gap = np.abs(self.s - self.t)
        out = []
        for d in deltas:
            mask = gap <= d
            if not np.any(mask):
                out.append((d, 0.0, 1.0))
            else:
                out.append(
                    (d, float(self.displacement[mask].max()), float(self.distortion[mask].max()))
                )
        return out

    def csv_lines(self) -> list:
        lines = ["s,t,displacement,distortion"]
        for s, t, dp, ds in zip(self.s, self.t, self.displacement, self.distortion):
            lines.append(f"{s!r},{t!r},{dp!r},{ds!r}")
        return lines


def path_probe(path: Path, pairs, region=None, seed: int = 0, samples: int = 512,
               stretch_pairs: int = 1024) -> ProbeTable:
    """Displacement and sampled distortion of transitions between parameter pairs.

    `pairs` is either an int (that many grid values; all ordered pairs probed)
    or an explicit iterable of (s, t).  Both composition orders
    at(s) o at(t)^{-1} and at(t)^{-1} o at(s) are measured; the table keeps
    the worse value so non-uniform families cannot hide behind cancellation.
    """
    reg = region if region is not None else path.support
    if isinstance(pairs, int):
        grid = np.linspace(0.0, 1.0, pairs)
        st = [(float(s), float(t)) for s in grid for t in grid if s < t]
    else:
        st = [(float(s), float(t)) for s, t in pairs]
    pts = reg.sample_interior(samples, _rng(seed))
    pa, pb = sample_pairs(reg, stretch_pairs, seed + 1)
    svals, tvals, disp, dist = [], [], [], []
    cache = {}

    def maps_at(x):
        if x not in cache:
            cache[x] = path.at(x)
        return cache[x]

    for s, t in st:
        ms, mt = maps_at(s), maps_at(t)
        fwd1 = lambda z: ms.forward(mt.inverse(z))     # at(s) o at(t)^{-1}
        fwd2 = lambda z: mt.inverse(ms.forward(z))     # at(t)^{-1} o at(s)
        d1 = float(np.abs(fwd1(pts) - pts).max())
        d2 = float(np.abs(fwd2(pts) - pts).max())
        hi1, lo1 = stretch_bounds(fwd1, pa, pb)
        hi2, lo2 = stretch_bounds(fwd2, pa, pb)
        svals.append(s)
        tvals.append(t)
        disp.append(max(d1, d2))
        dist.append(max(hi1, 1.0 / lo1, hi2, 1.0 / lo2))
    return ProbeTable(np.array(svals), np.array(tvals), np.array(disp), np.array(dist))


def composition_residual(factors, f: Map2, samples: int = 10**4, seed: int = 0,
                         region=None) -> float:
    """sup over samples of |(g_N o ... o g_1)(z) - f(z)|."""
    if len(factors.factors) == 0:
        raise DomainError("empty factor list")
    reg = region if region is not None else f.support
    pts = reg.sample_interior(samples, _rng(seed))
    return float(np.abs(factors.compose_all(pts) - f.forward(pts)).max())


def verify_factors(factors, f: Map2, eps: float, pairs: int = 2 * 10**4,
                   samples: int = 10**4, seed: int = 0, region=None) -> dict:
    """Independent re-measurement of every factor plus the composition residual."""
    reg = region if region is not None else f.support
    reports = []
    for k, fac in enumerate(factors.factors):
        rep = distortion_estimate(fac.map2, reg, pairs, seed + k, map_id=f"factor-{k}")
        reports.append(rep)
    residual = composition_residual(factors, f, samples, seed + len(reports), reg)
    worst = max(r.distortion for r in reports)
    return {
        "n_factors": len(reports),
        "max_distortion": worst,
        "residual": residual,
        "reports": reports,
        "ok": worst <= 1.0 + eps and residual <= 1e-9,
    }


# ---------------------------------------------------------------------------
# closed-form modulus utilities


def collar_modulus(l: float) -> float:
    """Modulus of the standard collar about a geodesic of length l (increasing in l)."""
    if l <= 0:
        raise DomainError("length must be positive")
    return l / (2.0 * math.asin(math.exp(-l)))


def round_ring_modulus(r_in: float, r_out: float) -> float:
    """Modulus of the family joining the boundary circles: 2*pi / log(r_out/r_in).

    Convention: the modulus measures the joining family, so thinner rings
    have larger modulus.  (Texts differ by a reciprocal.)
    """
    if not (0.0 < r_in < r_out):
        raise DomainError("need 0 < r_in < r_out")
    return 2.0 * math.pi / math.log(r_out / r_in)


def collapse_delta(c_hom: float, s: float, c_cigar: float, eta: float, eps: float) -> float:
    """Thickening scale (min(eta, eps) / (216 c C))^(1/(1-s)) used by the collapse step."""
    if not (0.0 <= s < 1.0):
        raise DomainError("homogeneity exponent must lie in [0, 1)")
    if min(c_hom, c_cigar, eta, eps) <= 0:
        raise DomainError("all parameters must be positive")
    base = min(eta, eps) / (216.0 * c_cigar * c_hom)
    return base ** (1.0 / (1.0 - s))


# ---------------------------------------------------------------------------
# sampling oracle for real-linear maps (independent of the closed form)


def linear_stretch_oracle(m: RealLinearMap, directions: int = 10**4, refine: bool = True):
    """(max, min) of |m(u)| over unit vectors u: coarse scan plus local polish.

    The coarse 10^4-direction scan alone cannot pin the minimum to 1e-6 when
    |a| - |b| is small, so each extremum is polished by ternary search; the
    oracle still only ever evaluates |m(u)|.
    """
    th = np.linspace(0.0, 2.0 * math.pi, directions, endpoint=False)
    u = np.exp(1j * th)
    vals = np.abs(m.apply(u))
    step = 2.0 * math.pi / directions

    def polish(k, sign):
        lo, hi = th[k] - step, th[k] + step
        for _ in range(80):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            v1 = abs(m.apply(np.exp(1j * m1)))
            v2 = abs(m.apply(np.exp(1j * m2)))
            if sign * v1 < sign * v2:
                lo = m1
            else:
                hi = m2
        return abs(m.apply(np.exp(1j * 0.5 * (lo + hi))))

    vmax, vmin = float(vals.max()), float(vals.min())
    if refine:
        vmax = max(vmax, polish(int(vals.argmax()), +1.0))
        vmin = min(vmin, polish(int(vals.argmin()), -1.0))
    return vmax, vmin
