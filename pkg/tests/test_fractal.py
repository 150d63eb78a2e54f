import math

import numpy as np
import pytest

from mtx.errors import CapacityError, DomainError, EstimationError
from mtx.fractal import (
    CantorApprox,
    IfsSpec,
    assouad_dim_formula,
    build_cells,
    homogeneity_estimate,
    ud_tree_certificate,
)
from mtx.geom import rect_distance

SQRT2 = math.sqrt(2)


class TestBuildCells:
    def test_depth_zero(self):
        tree = build_cells(IfsSpec(0.5), 0)
        assert tree.words() == [""]
        cell = tree.cell("")
        assert (cell.xmin, cell.xmax, cell.ymin, cell.ymax) == (-SQRT2, SQRT2, -1.0, 1.0)

    def test_depth_one_exact_rectangles(self):
        tree = build_cells(IfsSpec(0.5), 1)
        d1 = tree.cell("1")
        assert abs(d1.xmin + 3 * SQRT2 / 4) < 1e-14
        assert abs(d1.xmax + SQRT2 / 4) < 1e-14
        assert abs(d1.ymin + 0.5) < 1e-14 and abs(d1.ymax - 0.5) < 1e-14
        d2 = tree.cell("2")
        assert abs(d2.xmin - SQRT2 / 4) < 1e-14 and abs(d2.xmax - 3 * SQRT2 / 4) < 1e-14

    def test_leaf_count_and_diameter(self):
        alpha = 0.5
        tree = build_cells(IfsSpec(alpha), 3)
        leaves = tree.leaf_words()
        assert len(leaves) == 8
        # oracle: compose the three similarities explicitly and measure
        sigma = (1 - alpha) / SQRT2
        expected = 2 * math.sqrt(3) * sigma**3
        for w in leaves:
            assert abs(tree.cell(w).diameter - expected) < 1e-12

    def test_nesting_and_ratio(self):
        # checked at all depths up to 10
        tree = build_cells(IfsSpec(0.4), 10)
        sigma = tree.spec.ratio
        for w in tree.words():
            if len(w) >= tree.depth:
                continue
            parent = tree.cell(w)
            for wi in tree.children(w):
                child = tree.cell(wi)
                assert parent.contains_rect(child)
                # strict inset
                assert min(
                    child.xmin - parent.xmin,
                    parent.xmax - child.xmax,
                    child.ymin - parent.ymin,
                    parent.ymax - child.ymax,
                ) > 0
                assert abs(child.diameter / parent.diameter - sigma) < 1e-12

    def test_capacity_budget(self):
        with pytest.raises(CapacityError):
            build_cells(IfsSpec(0.5), 12, budget=2**10)

    def test_alpha_domain(self):
        with pytest.raises(DomainError):
            IfsSpec(1.5)
        with pytest.raises(DomainError):
            IfsSpec(0.0)


class TestAssouadFormula:
    def test_dimension_one_at_special_alpha(self):
        # denominator becomes log sqrt2 + log sqrt2 = log 2
        assert abs(assouad_dim_formula(1 - 1 / SQRT2) - 1.0) < 1e-12

    def test_limit_two(self):
        assert abs(assouad_dim_formula(1e-12) - 2.0) < 1e-9

    def test_exact_two_thirds(self):
        assert abs(assouad_dim_formula(0.5) - 2.0 / 3.0) < 1e-15

    def test_strictly_decreasing(self):
        vals = [assouad_dim_formula(a) for a in np.linspace(0.01, 0.99, 50)]
        assert all(x > y for x, y in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            assouad_dim_formula(1.0)


class TestHomogeneity:
    def test_single_point(self):
        ap = CantorApprox(0, np.array([0j]), 0.0)
        assert homogeneity_estimate(ap, [1.0, 2.0]) == 0.0

    def test_cantor_depth10(self):
        tree = build_cells(IfsSpec(0.5), 10)
        ap = CantorApprox.from_tree(tree)
        scales = np.geomspace(max(ap.leaf_diameter * 1.5, 0.004), 0.6, 10)
        s_hat = homogeneity_estimate(ap, scales)
        assert abs(s_hat - assouad_dim_formula(0.5)) < 0.15

    def test_unit_grid_line(self):
        pts = np.arange(2**10, dtype=float) + 0j
        ap = CantorApprox(10, pts, 0.0)
        s_hat = homogeneity_estimate(ap, np.geomspace(2, 300, 12))
        assert abs(s_hat - 1.0) < 0.15

    def test_insufficient_range_rejected(self):
        tree = build_cells(IfsSpec(0.5), 6)
        ap = CantorApprox.from_tree(tree)
        with pytest.raises(EstimationError):
            homogeneity_estimate(ap, [0.1, 0.2])

    def test_below_resolution_rejected(self):
        tree = build_cells(IfsSpec(0.5), 4)
        ap = CantorApprox.from_tree(tree)
        with pytest.raises(EstimationError):
            homogeneity_estimate(ap, np.geomspace(1e-6, 1e-2, 8))


class TestUdCertificate:
    def test_depth_one_value(self):
        tree = build_cells(IfsSpec(0.5), 1)
        delta = ud_tree_certificate(tree)
        # gap sqrt2*alpha = sqrt2/2, child diameter sqrt(3/2)
        assert abs(delta - (SQRT2 / 2) / math.sqrt(1.5)) < 1e-12
        assert abs(delta - 0.5773502691896258) < 1e-12

    def test_level_independence(self):
        for depth in (2, 3, 4):
            tree = build_cells(IfsSpec(0.5), depth)
            # every level realizes the same ratio by self-similarity
            ratios = []
            for level in range(depth):
                for w in tree.words(level):
                    c1, c2 = tree.cell(w + "1"), tree.cell(w + "2")
                    ratios.append(rect_distance(c1, c2) / max(c1.diameter, c2.diameter))
            assert max(ratios) - min(ratios) < 1e-12

    def test_depth_zero_rejected(self):
        with pytest.raises(DomainError):
            ud_tree_certificate(build_cells(IfsSpec(0.5), 0))
