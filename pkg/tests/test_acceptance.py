"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
summary lines.
"""

import json
import math
import time

import numpy as np
import pytest

import mtx
from mtx.cli import main as cli_main
from mtx.fractal import CantorApprox
from mtx.geom import ConvexPolygon, Disk, RealLinearMap, polygons_intersect
from mtx.multitwist import DecomposeConfig
from mtx.paths import (
    annulus_rotation_path,
    dehn_twist_path,
    example_nonpath,
    periodic_line_path,
    shift_line_path,
    strip_path,
    triangle_path,
)
from mtx.scene import load_factors
from mtx.thicken import boundary_curves, thicken
from mtx.verify import (
    composition_residual,
    distortion_estimate,
    linear_stretch_oracle,
    path_probe,
    sample_pairs,
)

TWO_PI = 2 * math.pi


def _report(num, text):
    print(f"[PASS] criterion {num}: {text}")


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """Criterion-1 pipeline: scene files plus the library-side objects."""
    tmp = tmp_path_factory.mktemp("acceptance")
    scene = tmp / "scene.json"
    factors = tmp / "factors.json"
    report = tmp / "report.csv"
    t0 = time.monotonic()
    assert cli_main(["build", "--alpha", "0.5", "--depth", "3", "--out", str(scene)]) == 0
    assert cli_main(["rings", "--scene", str(scene), "--margin", "0.25",
                     "--l-twist", "2.0"]) == 0
    code = cli_main([
        "decompose", "--scene", str(scene), "--epsilon", "0.1",
        "--out-factors", str(factors), "--report", str(report),
        "--pairs", "20000", "--samples", "10000", "--seed", "42",
    ])
    elapsed = time.monotonic() - t0
    tree = mtx.build_cells(mtx.IfsSpec(0.5), 3)
    rings = mtx.place_rings(tree, 0.25, 2.0)
    return {
        "code": code,
        "elapsed": elapsed,
        "scene": scene,
        "factors": factors,
        "report": report,
        "tree": tree,
        "rings": rings,
    }


def test_criterion_1_decomposition_run(pipeline):
    """alpha=0.5, depth 3, margin 0.25, l_twist 2, eps=0.1, seed 42."""
    assert pipeline["code"] == 0, "decompose must exit 0"
    doc = load_factors(pipeline["factors"])
    n = len(doc["factors"])
    assert n <= 4096
    # the CLI already enforced: every factor <= 1.1 at 2e4 pairs (near-diagonal
    # ladder included) and residual <= 1e-9 at 1e4 samples; re-read the report
    rows = pipeline["report"].read_text().strip().splitlines()
    dists = [float(r.split(",")[4]) for r in rows[1:] if r.startswith("factor-")]
    residual = float(rows[-1].split(",")[4])
    assert len(dists) == n
    assert max(dists) <= 1.1
    assert residual <= 1e-9
    assert pipeline["elapsed"] <= 120.0
    _report(1, f"N={n} factors, max sampled distortion {max(dists):.6f}, "
               f"residual {residual:.2e}, wall {pipeline['elapsed']:.1f}s")


def test_criterion_2_endpoint_exactness(pipeline, rng):
    rings = pipeline["rings"]
    path = mtx.unwind_path(rings)
    f = mtx.multitwist_map(rings)
    z = path.support.sample_interior(10**4, rng)
    e0 = float(np.abs(path.at(0.0).forward(z) - f.map2.forward(z)).max())
    e1 = float(np.abs(path.at(1.0).forward(z) - z).max())
    assert e0 <= 1e-10 and e1 <= 1e-10
    _report(2, f"sup|at(0)-f| = {e0:.2e}, sup|at(1)-id| = {e1:.2e} over 1e4 samples")


def test_criterion_3_dehn_path_bounds():
    grid = np.linspace(0.0, 1.0, 33)
    pairs = [(float(s), float(t)) for s in grid for t in grid if s < t]
    worst = {}
    for eta in (0.25, 0.5):
        tab = path_probe(dehn_twist_path(eta), pairs, seed=33, samples=160,
                         stretch_pairs=768)
        gap = np.abs(tab.s - tab.t)
        assert np.all(tab.displacement <= TWO_PI * gap + 1e-12)
        assert np.all(tab.distortion <= 1.0 + (TWO_PI / eta) * gap + 1e-9)
        worst[eta] = float((tab.distortion - 1 - (TWO_PI / eta) * gap).max())
    _report(3, f"33x33 grid, eta in {{1/4, 1/2}}: displacement and distortion "
               f"bounds hold (slack {worst[0.25]:.2e}, {worst[0.5]:.2e})")


def test_criterion_4_thickening_band(rng):
    checked = 0
    for _ in range(100):
        n = int(rng.integers(2, 200))
        pts = 4 * (rng.normal(size=n) + 1j * rng.normal(size=n))
        delta = float(rng.uniform(0.02, 1.0))
        verts = boundary_curves(thicken(pts, delta)).all_vertices()
        d = np.abs(verts[:, None] - pts[None, :]).min(axis=1)
        assert d.min() >= delta - 1e-9, (d.min(), delta)
        assert d.max() <= 8 * delta + 1e-9, (d.max(), delta)
        checked += len(verts)
    _report(4, f"100 random clouds: every boundary vertex ({checked} total) "
               "satisfies delta <= dist(x, W) <= 8*delta")


def test_criterion_5_gather_convex_law(rng):
    for k in range(1000):
        m = int(rng.integers(2, 7))
        ins = []
        for _ in range(m):
            p = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            q = p + 0.8 * complex(rng.normal(), rng.normal())
            ins.append(ConvexPolygon((p, q)))
        out = mtx.gather_convex(ins)
        for i in range(len(out)):
            for j in range(i + 1, len(out)):
                assert not polygons_intersect(out[i], out[j])
        for s in ins:
            assert sum(h.contains(s.points(), tol=1e-9).all() for h in out) == 1
        assert sum(h.diameter() for h in out) <= sum(s.diameter() for s in ins) + 1e-12
    _report(5, "1000 random instances: outputs disjoint, inputs covered, "
               "diameter-sum inequality holds")


def test_criterion_6_affine_distortion_oracle(rng):
    worst = 0.0
    for _ in range(1000):
        phase_a, phase_b = rng.uniform(0, TWO_PI, 2)
        b = rng.uniform(0.0, 1.0) * complex(math.cos(phase_b), math.sin(phase_b))
        a = (abs(b) + rng.uniform(0.01, 1.0)) * complex(math.cos(phase_a), math.sin(phase_a))
        m = RealLinearMap(a, b)
        hi, lo = linear_stretch_oracle(m, directions=10**4)
        err = abs(max(hi, 1.0 / lo) - mtx.affine_distortion(m))
        worst = max(worst, err)
        assert err <= 1e-6
    _report(6, f"1000 random maps: closed form vs 1e4-direction oracle, "
               f"worst gap {worst:.2e} <= 1e-6")


def test_criterion_7_dimension_cross_check():
    exact = mtx.assouad_dim_formula(0.5)
    assert abs(exact - 2.0 / 3.0) < 1e-15
    errs = {}
    for alpha in (0.3, 0.5, 0.7):
        tree = mtx.build_cells(mtx.IfsSpec(alpha), 10)
        ap = CantorApprox.from_tree(tree)
        scales = np.geomspace(max(ap.leaf_diameter * 1.5, 0.004), 0.6, 10)
        s_hat = mtx.homogeneity_estimate(ap, scales)
        errs[alpha] = abs(s_hat - mtx.assouad_dim_formula(alpha))
        assert errs[alpha] <= 0.15
    _report(7, "depth-10 homogeneity estimate within 0.15 of the closed form "
               f"(errors {errs[0.3]:.3f}, {errs[0.5]:.3f}, {errs[0.7]:.3f}); "
               "formula(1/2) = 2/3 exactly")


def test_criterion_8_dim1_warmup():
    factors = mtx.decompose_dim1(8.0, 3)
    assert len(factors) == 3
    for f in factors:
        assert abs(f.distortion - 2.0) <= 1e-12
    x = np.linspace(-3, 3, 101)
    y = x.copy()
    for f in factors:
        y = f.apply(y)
    resid = float(np.abs(y - 8.0 * x).max())
    assert resid <= 1e-12
    _report(8, f"L=8, m=3: three factors of distortion 2, composition residual {resid:.1e}")


def test_criterion_9_interpolator_exactness(rng):
    worst_tri = 0.0
    made = 0
    while made < 1000:
        a = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0.15, math.pi - 0.15))
        argc = rng.uniform(0.0, math.pi - 0.3)
        argb = rng.uniform(argc + 0.05, min(argc + math.pi - 0.05, math.pi))
        c = rng.uniform(0.5, 2.0) * np.exp(1j * argc)
        b = rng.uniform(0.5, 2.0) * np.exp(1j * argb)
        try:
            p = triangle_path(a, c, b)
        except mtx.DomainError:
            continue
        made += 1
        g1 = p.at(1.0)
        worst_tri = max(worst_tri, abs(g1(1 + 0j) - c), abs(g1(a) - b))
    assert worst_tri <= 1e-12
    # strip and annulus boundary agreement at 256 samples
    F = periodic_line_path(lambda t: TWO_PI * t, lambda t: 0.3 * math.sin(math.pi * t))
    G = shift_line_path(lambda t: TWO_PI * t)
    sp = strip_path(F, G, 3.0)
    ys = np.linspace(-2.0, 2.0, 256)
    worst_bdy = 0.0
    for t in (0.2, 0.5, 0.8):
        worst_bdy = max(worst_bdy, float(np.abs(
            sp.at(t).forward(1j * ys) - 1j * F.at(t)(ys)).max()))
        worst_bdy = max(worst_bdy, float(np.abs(
            sp.at(t).forward(3.0 + 1j * ys) - (3.0 + 1j * G.at(t)(ys))).max()))
    ap = annulus_rotation_path(F, G, 2.0)
    th = np.linspace(0, TWO_PI, 256, endpoint=False)
    for t in (0.2, 0.5, 0.8):
        worst_bdy = max(worst_bdy, float(np.abs(
            ap.at(t).forward(np.exp(1j * th)) - np.exp(1j * F.at(t)(th))).max()))
        worst_bdy = max(worst_bdy, float(np.abs(
            ap.at(t).forward(2 * np.exp(1j * th)) - 2 * np.exp(1j * G.at(t)(th))).max()))
    assert worst_bdy <= 1e-10
    _report(9, f"1000 triangle triples exact to {worst_tri:.1e}; strip/annulus "
               f"boundary agreement {worst_bdy:.1e} at 256 samples")


def test_criterion_10_nonpath_regression():
    path = example_nonpath(copies=50)
    far = Disk(49.0 + 0j, 1.0 / 3.0)
    tab = path_probe(path, [(0.0, 0.01)], region=far, seed=50, samples=256,
                     stretch_pairs=2048)
    worst = float(tab.distortion.max())
    assert worst > 1.5
    _report(10, f"translated-bump composition flagged: probe distortion "
                f"{worst:.3f} > 1.5 at |s-t| = 0.01")


def test_criterion_11_ring_shrink(pipeline):
    rings = pipeline["rings"]
    L = rings.reported_l
    bound = 1.0 - 1.0 / L**2
    ratios = rings.shrink_ratios()
    worst = max(ratios.values())
    assert worst <= bound
    _report(11, f"max diam(R_wi)/diam(R_w) = {worst:.4f} <= 1 - 1/L^2 = {bound:.4f} "
                f"(reported L = {L:.3f})")
