import math

import numpy as np
import pytest

from mtx.errors import ClearanceError, DomainError, EndpointMismatchError
from mtx.geom import Annulus, Disk, Rectangle, Similarity
from mtx.paths import (
    Map2,
    PLCurve,
    annulus_rotation_path,
    check_endpoints,
    check_inverse,
    compose_isometric,
    concat,
    conjugate_by_similarity,
    dehn_twist,
    dehn_twist_path,
    example_nonpath,
    glue,
    periodic_line_path,
    restrict,
    reverse,
    ring_twist_map,
    rotation_path,
    shift_line_path,
    strip_path,
    translate_path,
    triangle_path,
)
from mtx.verify import path_probe

TWO_PI = 2 * math.pi


class TestDehnTwist:
    def test_outer_circle_fixed(self):
        d = dehn_twist(0.5)
        z = np.exp(1j * np.linspace(0, 6, 13))
        assert np.abs(d.forward(z) - z).max() < 1e-12

    def test_inner_circle_full_turn(self):
        d = dehn_twist(0.5)
        z = 0.5 * np.exp(1j * np.linspace(0, 6, 13))
        assert np.abs(d.forward(z) - z).max() < 1e-12

    def test_half_radius_half_turn(self):
        # eta=1/2, r=3/4: rotation by pi
        d = dehn_twist(0.5)
        assert abs(d(0.75 + 0j) - (-0.75 + 0j)) < 1e-12

    def test_domain_error(self):
        with pytest.raises(DomainError):
            dehn_twist(0.5).forward(np.array([0.2 + 0j]))

    def test_path_endpoints(self):
        p = dehn_twist_path(0.25)
        check_endpoints(p, tol=1e-12)
        check_inverse(p, tol=1e-12)

    def test_half_time_half_turn_at_inner(self):
        p = dehn_twist_path(0.5)
        z = 0.5 + 0j
        img = p.at(0.5).forward(np.array([z]))[0]
        assert abs(img - 0.5 * np.exp(1j * math.pi)) < 1e-12

    def test_displacement_bound(self, rng):
        p = dehn_twist_path(0.5)
        z = p.support.sample_interior(400, rng)
        for s, t in [(0.1, 0.3), (0.0, 1.0), (0.45, 0.55)]:
            ms, mt = p.at(s), p.at(t)
            disp = np.abs(ms.forward(mt.inverse(z)) - z).max()
            assert disp <= TWO_PI * abs(s - t) + 1e-12


class TestTrianglePath:
    def test_identity_target(self):
        p = triangle_path(1j, 1 + 0j, 1j)
        z = np.array([0.2 + 0.3j, 0.5 + 0.1j])
        assert np.abs(p.at(1.0).forward(z) - z).max() < 1e-12

    def test_doubling_map(self):
        p = triangle_path(1j, 2 + 0j, 2j)
        g1 = p.at(1.0)
        assert abs(g1(1 + 0j) - 2.0) < 1e-12
        assert abs(g1(1j) - 2j) < 1e-12
        assert abs(g1(0j)) < 1e-15

    def test_vertex_exactness_random(self, rng):
        for _ in range(200):
            a = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0.15, math.pi - 0.15))
            argc = rng.uniform(0.0, math.pi - 0.3)
            argb = rng.uniform(argc + 0.05, min(argc + math.pi - 0.05, math.pi))
            c = rng.uniform(0.5, 2.0) * np.exp(1j * argc)
            b = rng.uniform(0.5, 2.0) * np.exp(1j * argb)
            try:
                p = triangle_path(a, c, b)
            except DomainError:
                continue
            g1 = p.at(1.0)
            assert abs(g1(1 + 0j) - c) < 1e-12
            assert abs(g1(a) - b) < 1e-12

    def test_degenerate_rejected(self):
        with pytest.raises(DomainError):
            triangle_path(-1 + 0j, 1 + 0j, 1j)  # arg a = pi
        with pytest.raises(DomainError):
            triangle_path(1j, 1j, 1 + 0j)  # arg c > arg b

    def test_transition_distortion_shrinks(self):
        from mtx.geom import affine_distortion, RealLinearMap

        p = triangle_path(1j, 2 + 0j, 1 + 2j)

        def coeff(t):
            m = p.at(t)
            a = complex(m.forward(np.array([1 + 0j]))[0] - m.forward(np.array([0j]))[0])
            bb = complex(
                m.forward(np.array([1j]))[0] - m.forward(np.array([0j]))[0]
            )
            # reconstruct A, B from images of 1 and i: A+B and (A-B)i
            return (a + bb / 1j) / 2, (a - bb / 1j) / 2

        for gap in (0.2, 0.05, 0.01):
            a0, b0 = coeff(0.5)
            a1, b1 = coeff(0.5 + gap)
            m0 = RealLinearMap(a0, b0)
            m1 = RealLinearMap(a1, b1)
            # distortion of G_{t} o G_{s}^{-1}
            inv = m0.inverse()
            comp = RealLinearMap(
                a1 * inv.a + b1 * np.conj(inv.b), a1 * inv.b + b1 * np.conj(inv.a)
            )
            d = affine_distortion(comp)
            assert d < 1 + 8 * gap  # shrinks linearly with the gap


class TestEstimateInequality:
    def test_three_case_lemma(self, rng):
        # |a + i(c1+c2+c3a) + i(d1c1+d2c2+d3a)| <= (1+8*eps)*|a + i(c1+c2+c3a)|
        for _ in range(2000):
            eps = rng.uniform(0.001, 0.12)
            a = rng.normal() * 2
            c1, c2 = rng.uniform(0.01, 3, 2)
            c3 = rng.uniform(-3, 3)
            d1, d2 = rng.uniform(-eps, eps, 2)
            d3 = rng.uniform(-2 * eps, 2 * eps)
            base = abs(a + 1j * (c1 + c2 + c3 * a))
            pert = abs(a + 1j * (c1 + c2 + c3 * a) + 1j * (d1 * c1 + d2 * c2 + d3 * a))
            assert pert <= (1 + 8 * eps) * base + 1e-14


class TestStripPath:
    def test_shift_endpoints(self):
        F = shift_line_path(lambda t: TWO_PI * t)
        p = strip_path(F, F, 2.0)
        z = np.array([0.5 + 0.3j, 1.5 - 1.0j])
        assert np.abs(p.at(0.0).forward(z) - z).max() < 1e-14
        assert np.abs(p.at(1.0).forward(z) - (z + TWO_PI * 1j)).max() < 1e-14

    def test_edge_extension(self):
        F = periodic_line_path(lambda t: TWO_PI * t, lambda t: 0.3 * math.sin(math.pi * t))
        G = shift_line_path(lambda t: TWO_PI * t)
        p = strip_path(F, G, 3.0)
        ys = np.linspace(-2, 2, 256)
        for t in (0.25, 0.7):
            img = p.at(t).forward(1j * ys)
            want = 1j * F.at(t)(ys)
            assert np.abs(img - want).max() < 1e-10
            img_m = p.at(t).forward(3.0 + 1j * ys)
            want_m = 3.0 + 1j * G.at(t)(ys)
            assert np.abs(img_m - want_m).max() < 1e-10

    def test_equal_boundaries_collapse(self):
        F = periodic_line_path(lambda t: TWO_PI * t, lambda t: 0.4 * t * (1 - t))
        p = strip_path(F, F, 5.0)
        ys = np.linspace(-3, 3, 33)
        for x in (0.0, 2.0, 5.0):
            img = p.at(0.6).forward(x + 1j * ys)
            assert np.abs(img - (x + 1j * F.at(0.6)(ys))).max() < 1e-10

    def test_inverse_bisection(self):
        F = periodic_line_path(lambda t: TWO_PI * t, lambda t: 0.5 * math.sin(math.pi * t))
        G = shift_line_path(lambda t: TWO_PI * t)
        m = strip_path(F, G, 3.0).at(0.8)
        z = np.array([0.1 + 2.2j, 2.9 - 1.7j, 1.5 + 0.0j])
        assert np.abs(m.inverse(m.forward(z)) - z).max() < 1e-10

    def test_nonmonotone_rejected(self):
        F = shift_line_path(lambda t: TWO_PI * math.sin(2.5 * t))
        with pytest.raises(DomainError):
            strip_path(F, F, 1.0)


class TestAnnulusPath:
    def test_loop_endpoints(self):
        lift = shift_line_path(lambda t: TWO_PI * t)
        p = annulus_rotation_path(lift, lift, 3.0)
        z = np.array([1.0 + 0j, 2.0j, -2.5 + 0j, 1.3 - 1.1j])
        assert np.abs(p.at(0.0).forward(z) - z).max() < 1e-12
        assert np.abs(p.at(1.0).forward(z) - z).max() < 1e-12

    def test_equal_rotations_collapse(self):
        lift = shift_line_path(lambda t: TWO_PI * t)
        p = annulus_rotation_path(lift, lift, 2.0)
        z = 1.5 * np.exp(1j * np.linspace(0, 6, 64))
        for t in (0.3, 0.8):
            assert np.abs(p.at(t).forward(z) - z * np.exp(1j * TWO_PI * t)).max() < 1e-12

    def test_boundary_agreement(self):
        inner = periodic_line_path(lambda t: TWO_PI * t, lambda t: 0.35 * math.sin(math.pi * t))
        outer = shift_line_path(lambda t: TWO_PI * t)
        p = annulus_rotation_path(inner, outer, 2.0)
        th = np.linspace(0, TWO_PI, 256, endpoint=False)
        for t in (0.2, 0.55, 0.9):
            m = p.at(t)
            got_in = m.forward(np.exp(1j * th))
            want_in = np.exp(1j * inner.at(t)(th))
            assert np.abs(got_in - want_in).max() < 1e-10
            got_out = m.forward(2.0 * np.exp(1j * th))
            want_out = 2.0 * np.exp(1j * outer.at(t)(th))
            assert np.abs(got_out - want_out).max() < 1e-10

    def test_winding_mismatch_rejected(self):
        plus = shift_line_path(lambda t: TWO_PI * t)
        minus = shift_line_path(lambda t: -TWO_PI * t)
        with pytest.raises(DomainError):
            annulus_rotation_path(plus, minus, 2.0)


class TestTranslatePath:
    def test_constant_curve_is_identity(self, rng):
        body = Rectangle(-0.5, 0.5, -0.5, 0.5).as_polygon()
        p = translate_path(body, PLCurve((0j,)), Rectangle(-2, 2, -2, 2), 0.1)
        z = rng.normal(size=64) + 1j * rng.normal(size=64)
        for t in (0.0, 0.5, 1.0):
            assert np.abs(p.at(t).forward(z) - z).max() == 0.0

    def test_body_translates_exactly(self, rng):
        body = Rectangle(-0.5, 0.5, -0.5, 0.5).as_polygon()
        arena = Rectangle(-6, 6, -6, 6)
        p = translate_path(body, PLCurve((0j, 0.7 + 0j)), arena, 0.2)
        pts = Rectangle(-0.5, 0.5, -0.5, 0.5).sample_interior(64, rng)
        for t in (0.0, 0.5, 1.0):
            off = p.at(t).forward(pts) - pts
            assert np.abs(off - off[0]).max() < 1e-12
            assert abs(off[0] - 0.7 * t) < 1e-12

    def test_arena_boundary_fixed(self):
        body = Rectangle(-0.5, 0.5, -0.5, 0.5).as_polygon()
        arena = Rectangle(-4, 4, -4, 4)
        p = translate_path(body, PLCurve((0j, 1 + 1j)), arena, 0.2)
        bd = arena.boundary_points(256)
        for t in np.linspace(0, 1, 7):
            assert np.abs(p.at(float(t)).forward(bd) - bd).max() <= 1e-12

    def test_multi_segment_inverse(self, rng):
        body = Rectangle(-0.3, 0.3, -0.2, 0.2).as_polygon()
        arena = Rectangle(-5, 5, -5, 5)
        p = translate_path(body, PLCurve((0j, 1.2 + 0j, 1.2 + 1.5j, -0.4 + 1.5j)), arena, 0.2)
        check_inverse(p, samples=300, tol=1e-9)

    def test_clearance_violation(self):
        body = Rectangle(-0.5, 0.5, -0.5, 0.5).as_polygon()
        arena = Rectangle(-1, 2, -1, 1)
        with pytest.raises(ClearanceError):
            translate_path(body, PLCurve((0j, 0.8 + 0j)), arena, 0.3)


class TestCombinators:
    def test_concat_with_reverse_closes(self):
        p = dehn_twist_path(0.5)
        loop = concat([p, reverse(p)])
        z = p.support.sample_interior(64, np.random.default_rng(0))
        assert np.abs(loop.at(0.0).forward(z) - z).max() < 1e-12
        assert np.abs(loop.at(1.0).forward(z) - z).max() < 1e-12

    def test_concat_junction_mismatch_rejected(self):
        p = dehn_twist_path(0.5)
        with pytest.raises(EndpointMismatchError):
            concat([p, p])  # p ends at the twist, not at the identity

    def test_glue_twist_with_rotation(self):
        eta = 0.5
        twist = dehn_twist_path(eta)
        hole = Disk(0j, 1.0 - eta)
        inner_rot = rotation_path(0j, TWO_PI, support=hole)
        g = glue([(Annulus(0j, 1 - eta, 1.0), twist), (hole, inner_rot)])
        # continuity across the shared circle at 256 samples
        th = np.linspace(0, TWO_PI, 256, endpoint=False)
        circle = (1 - eta) * np.exp(1j * th)
        for t in (0.25, 0.5, 0.9):
            m = g.at(t)
            a = m.forward(circle * (1 + 1e-13))
            b = m.forward(circle * (1 - 1e-13))
            assert np.abs(a - b).max() < 1e-10

    def test_restrict_keeps_values(self):
        p = dehn_twist_path(0.5)
        sub = Annulus(0j, 0.6, 0.9)
        r = restrict(p, sub)
        z = sub.sample_interior(32, np.random.default_rng(1))
        assert np.abs(r.at(0.3).forward(z) - p.at(0.3).forward(z)).max() == 0.0

    def test_compose_isometric_probe_invariance(self):
        eta = 0.5
        inner = dehn_twist_path(eta)
        outer = rotation_path(0j, math.pi)  # global rotation: isometry everywhere
        comp = compose_isometric(outer, inner)
        pairs = [(0.0, 0.2), (0.3, 0.33), (0.5, 0.9)]
        t1 = path_probe(inner, pairs, region=inner.support, seed=11, samples=128,
                        stretch_pairs=1024)
        t2 = path_probe(comp, pairs, region=inner.support, seed=11, samples=128,
                        stretch_pairs=1024)
        assert np.abs(t1.distortion - t2.distortion).max() < 1e-9

    def test_conjugation_scales_displacement(self):
        inner = dehn_twist_path(0.5)
        lam = 3.0
        sim = Similarity(lam, 0.0, 1.0 + 2.0j)
        conj = conjugate_by_similarity(inner, sim)
        pairs = [(0.0, 0.4), (0.2, 0.7)]
        reg1 = Annulus(0j, 0.5, 1.0)
        reg2 = Annulus(sim.apply(0j), lam * 0.5, lam * 1.0)
        t1 = path_probe(inner, pairs, region=reg1, seed=7, samples=256, stretch_pairs=512)
        t2 = path_probe(conj, pairs, region=reg2, seed=7, samples=256, stretch_pairs=512)
        assert np.abs(t2.displacement - lam * t1.displacement).max() < 1e-9
        assert np.abs(t2.distortion - t1.distortion).max() < 1e-9


class TestNonPathExample:
    def test_far_translate_flagged(self):
        path = example_nonpath(copies=50)
        far = Disk(49.0 + 0j, 1.0 / 3.0)
        tab = path_probe(path, [(0.0, 0.01)], region=far, seed=5, samples=128,
                         stretch_pairs=1024)
        assert tab.distortion.max() > 1.5

    def test_near_origin_unaffected(self):
        path = example_nonpath(copies=50)
        near = Disk(0.0 + 0j, 0.25)
        tab = path_probe(path, [(0.0, 0.01)], region=near, seed=5, samples=64,
                         stretch_pairs=256)
        # the first bump barely moves under a 0.01*pi rotation
        assert tab.distortion.max() < 1.5


class TestRingTwistMap:
    def test_identity_off_annulus(self, rng):
        m = ring_twist_map(1 + 1j, 2.0, 0.3)
        z = np.array([1 + 1j, 1 + 1j + 0.5j, 1 + 1j + 3.5])
        assert np.abs(m.forward(z) - z).max() == 0.0

    def test_matches_normalized_twist(self):
        eta = 0.4
        m = ring_twist_map(0j, 1.0, eta)
        d = dehn_twist(eta)
        z = Annulus(0j, 1 - eta, 1.0).sample_interior(128, np.random.default_rng(2))
        assert np.abs(m.forward(z) - d.forward(z)).max() < 1e-12
