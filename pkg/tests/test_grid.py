import numpy as np
import pytest

from garding.analytic import Polynomial, RadialOnBox, norm_squared, radial_power, re_z1_squared
from garding.errors import BoundaryNode, ValidationError
from garding.grid import (
    BoxGrid,
    ScalarField,
    assemble_g,
    complex_hessian,
    complex_hessian_field,
    face_tangential_trace_min,
    gradient_sq_max,
)


def field_from(grid, func):
    return ScalarField(grid, func.value(grid.points()))


class TestBoxGrid:
    def test_validation(self):
        with pytest.raises(ValidationError):
            BoxGrid(2, ((-1, 1),) * 4, 8)  # even
        with pytest.raises(ValidationError):
            BoxGrid(2, ((-1, 1),) * 4, 7)  # too small
        with pytest.raises(ValidationError):
            BoxGrid(2, ((-1, 1),) * 3, 9)  # wrong extent count
        with pytest.raises(ValidationError):
            BoxGrid(2, ((1, -1),) + ((-1, 1),) * 3, 9)  # empty interval

    def test_center_is_node(self):
        grid = BoxGrid(1, ((-1, 1), (-1, 1)), 9)
        assert 0.0 in grid.axis_coords(0)

    def test_face_distance(self):
        grid = BoxGrid(1, ((-1, 1), (-1, 1)), 9)
        d = grid.face_distance()
        assert d[0, 3] == 0.0
        assert d[4, 4] == pytest.approx(1.0)
        assert d[1, 4] == pytest.approx(0.25)


class TestComplexHessian:
    def test_norm_squared_gives_identity(self):
        grid = BoxGrid(2, ((-1, 1),) * 4, 9)
        u = field_from(grid, norm_squared(2))
        h = complex_hessian_field(u)
        assert np.allclose(h.values, np.eye(2), atol=1e-13)
        assert h.hermitian_defect() == 0.0

    def test_pluriharmonic_annihilated(self):
        grid = BoxGrid(2, ((-1, 1),) * 4, 9)
        u = field_from(grid, re_z1_squared(2))
        h = complex_hessian_field(u)
        assert np.allclose(h.values, 0.0, atol=1e-13)

    def test_boundary_node_rejected(self):
        grid = BoxGrid(2, ((-1, 1),) * 4, 9)
        u = field_from(grid, norm_squared(2))
        with pytest.raises(BoundaryNode):
            complex_hessian(u, (0, 4, 4, 4))

    def test_mixed_product_point_values(self):
        # u = |z_1|^2 |z_2|^2 at z = (1, 1): exact Hessian [[1, 1], [1, 1]]
        f1 = Polynomial(4, {(2, 0, 0, 0): 1.0, (0, 2, 0, 0): 1.0})
        f2 = Polynomial(4, {(0, 0, 2, 0): 1.0, (0, 0, 0, 2): 1.0})
        prod = f1 * f2
        # analytic oracle at (x1, y1, x2, y2) = (1, 0, 1, 0)
        pt = np.array([1.0, 0.0, 1.0, 0.0])
        exact = prod.complex_hessian(pt)
        assert np.allclose(exact, np.array([[1.0, 1.0], [1.0, 1.0]]))
        # discrete value within C h^2, on a grid where the point is a node
        grid = BoxGrid(2, ((-1.5, 1.5),) * 4, 13)
        u = field_from(grid, prod)
        node = (10, 6, 10, 6)
        assert np.allclose(grid.node_coords(node), pt)
        h = complex_hessian(u, node)
        hsq = max(grid.spacing) ** 2
        assert np.abs(h.entries - exact).max() <= 2.0 * hsq

    def test_bilinear_quartic_is_stencil_exact(self):
        # every monomial of |z_1|^2 |z_2|^2 has degree <= 2 per variable, so
        # central and 4-point cross differences reproduce it exactly
        f1 = Polynomial(4, {(2, 0, 0, 0): 1.0, (0, 2, 0, 0): 1.0})
        f2 = Polynomial(4, {(0, 0, 2, 0): 1.0, (0, 0, 0, 2): 1.0})
        prod = f1 * f2
        for res in (9, 17):
            grid = BoxGrid(2, ((-1, 1),) * 4, res)
            u = field_from(grid, prod)
            h = complex_hessian_field(u)
            exact = prod.complex_hessian(grid.interior_points())
            assert np.abs(h.values - exact).max() <= 1e-12

    def test_second_order_convergence(self):
        # |z|^4 has nonzero pure fourth derivatives and the cubic cross term
        # activates the mixed-stencil truncation error
        probe = norm_squared(2) * norm_squared(2) + Polynomial(
            4, {(3, 0, 1, 0): 1.0, (0, 3, 0, 1): 1.0}
        )

        def max_error(res):
            grid = BoxGrid(2, ((-1, 1),) * 4, res)
            u = field_from(grid, probe)
            h = complex_hessian_field(u)
            exact = probe.complex_hessian(grid.interior_points())
            return np.abs(h.values - exact).max()

        e_coarse = max_error(9)
        e_fine = max_error(17)  # halves the spacing
        assert 3.5 <= e_coarse / e_fine <= 4.5

    def test_single_node_matches_field(self):
        rng = np.random.default_rng(0)
        grid = BoxGrid(2, ((-1, 1),) * 4, 9)
        u = ScalarField(grid, rng.standard_normal(grid.shape))
        h = complex_hessian_field(u)
        for node in [(1, 1, 1, 1), (4, 3, 2, 5), (7, 7, 7, 7)]:
            single = complex_hessian(u, node)
            idx = tuple(i - 1 for i in node)
            assert np.allclose(single.entries, h.values[idx], atol=1e-14)

    def test_radial_profile_agreement(self):
        # the radial Hessian formula and the grid Hessian agree at nodes
        grid = BoxGrid(2, ((-1.5, 1.5),) * 4, 13)
        fn = RadialOnBox(radial_power(2), 2)
        u = ScalarField(grid, fn.value(grid.points()))
        h = complex_hessian_field(u)
        exact = fn.complex_hessian(grid.interior_points())
        hsq = max(grid.spacing) ** 2
        assert np.abs(h.values - exact).max() <= 3.0 * hsq


class TestAssembleG:
    def test_chi_plus_zero(self):
        grid = BoxGrid(2, ((-1, 1),) * 4, 9)
        u = ScalarField(grid, np.zeros(grid.shape))
        g = assemble_g(np.eye(2), u)
        assert np.allclose(g.values, np.eye(2))

    def test_zero_chi_norm_squared(self):
        grid = BoxGrid(2, ((-1, 1),) * 4, 9)
        u = field_from(grid, norm_squared(2))
        g = assemble_g(np.zeros((2, 2)), u)
        assert np.allclose(g.values, np.eye(2), atol=1e-13)

    def test_diagonal_chi(self):
        grid = BoxGrid(2, ((-1, 1),) * 4, 9)
        u = field_from(grid, norm_squared(2))
        g = assemble_g(np.diag([1.0, 2.0]), u)
        assert np.allclose(g.values, np.diag([2.0, 3.0]), atol=1e-13)


class TestGradientAndTrace:
    def test_gradient_sq_max_quadratic(self):
        # grad |z|^2 = 2 (x, y); stencils exact, sup at the corner nodes
        for res in (9, 13):
            grid = BoxGrid(1, ((-1, 1), (-1, 1)), res)
            u = field_from(grid, norm_squared(1))
            assert gradient_sq_max(u) == pytest.approx(8.0)

    def test_face_trace_identity_field(self):
        grid = BoxGrid(3, ((-1, 1),) * 6, 9)
        u = field_from(grid, norm_squared(3))
        c0 = face_tangential_trace_min(u, np.zeros((3, 3)))
        assert c0 == pytest.approx(2.0, abs=1e-12)
