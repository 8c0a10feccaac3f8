import numpy as np
import pytest

from oracles import kelvin_t_reference, kelvin_u_reference, random_triangle
from tribem.errors import InvalidMaterialError, SingularEvaluationError
from tribem.kernels import (
    gauss_rule,
    kelvin_T,
    kelvin_U,
    make_material,
    map_rule_to_triangle,
)
from tribem.mesh import Element

MAT = make_material(200000.0, 0.33)


class TestMaterial:
    def test_sample_values(self):
        m = make_material(200000, 0.33)
        assert m.mu == pytest.approx(200000 / 2.66, rel=1e-14)

    def test_simple(self):
        assert make_material(1, 0).mu == pytest.approx(0.5)

    @pytest.mark.parametrize("e,nu", [(200000, 0.5), (0, 0.3), (-1, 0.3), (1, -1.0), (1, 0.7)])
    def test_out_of_range(self, e, nu):
        with pytest.raises(InvalidMaterialError):
            make_material(e, nu)


class TestKelvinU:
    def test_axis_aligned_values(self):
        d = 1.7
        u = kelvin_U((0, 0, 0), (d, 0, 0), MAT)
        assert u[0, 0] == pytest.approx(1.0 / (4 * np.pi * MAT.mu * d), rel=1e-13)
        expected_22 = (3 - 4 * MAT.nu) / (16 * np.pi * MAT.mu * (1 - MAT.nu) * d)
        assert u[1, 1] == pytest.approx(expected_22, rel=1e-13)
        assert u[2, 2] == pytest.approx(expected_22, rel=1e-13)
        off = u - np.diag(np.diag(u))
        assert np.abs(off).max() < 1e-18

    def test_symmetry_and_scaling_random(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            x = rng.uniform(-5, 5, 3)
            y = rng.uniform(-5, 5, 3)
            if np.linalg.norm(y - x) < 1e-6:
                continue
            u = kelvin_U(x, y, MAT)
            assert np.abs(u - u.T).max() <= 1e-14 * np.abs(u).max()
            s = 3.0
            assert np.allclose(kelvin_U(s * x, s * y, MAT), u / s, rtol=1e-12)

    def test_matches_reference(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            x, y = rng.uniform(-2, 2, 3), rng.uniform(-2, 2, 3)
            if np.linalg.norm(y - x) < 1e-3:
                continue
            ref = kelvin_u_reference(x, y, MAT.e, MAT.nu)
            assert np.allclose(kelvin_U(x, y, MAT), ref, rtol=1e-13, atol=0)

    def test_self_point_rejected(self):
        with pytest.raises(SingularEvaluationError):
            kelvin_U((1, 2, 3), (1, 2, 3), MAT)


class TestKelvinT:
    def test_matches_reference_full_block(self):
        # axis case: source at origin, field on z axis, normal along z
        d = 0.9
        t = kelvin_T((0, 0, 0), (0, 0, d), (0, 0, 1), MAT)
        ref = kelvin_t_reference((0, 0, 0), (0, 0, d), (0, 0, 1), MAT.nu)
        assert np.allclose(t, ref, rtol=1e-13, atol=0)
        expected_33 = -(1 - 2 * MAT.nu + 3) / (8 * np.pi * (1 - MAT.nu) * d * d)
        assert t[2, 2] == pytest.approx(expected_33, rel=1e-13)

    def test_matches_reference_random(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            x, y = rng.uniform(-2, 2, 3), rng.uniform(-2, 2, 3)
            if np.linalg.norm(y - x) < 1e-3:
                continue
            n = rng.standard_normal(3)
            n /= np.linalg.norm(n)
            ref = kelvin_t_reference(x, y, n, MAT.nu)
            got = kelvin_T(x, y, n, MAT)
            assert np.allclose(got, ref, rtol=1e-12, atol=1e-16 * np.abs(ref).max())

    def test_tangent_plane_antisymmetric(self):
        # normal perpendicular to (field - source): dr/dn = 0, leaving only
        # the antisymmetric part
        x = np.array([0.0, 0.0, 0.0])
        y = np.array([2.0, 0.0, 0.0])
        n = np.array([0.0, 0.0, 1.0])
        t = kelvin_T(x, y, n, MAT)
        assert np.abs(t + t.T).max() < 1e-16
        k = 1 - 2 * MAT.nu
        expected_13 = k / (8 * np.pi * (1 - MAT.nu) * 4.0)
        assert t[0, 2] == pytest.approx(expected_13, rel=1e-13)

    def test_scaling(self):
        rng = np.random.default_rng(6)
        x, y = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
        n = rng.standard_normal(3)
        n /= np.linalg.norm(n)
        t = kelvin_T(x, y, n, MAT)
        assert np.allclose(kelvin_T(4 * x, 4 * y, n, MAT), t / 16, rtol=1e-12)

    def test_coplanar_collocation_no_normal_gradient(self):
        # flat element with the collocation point in its plane: the
        # dr/dn term vanishes at every quadrature point, leaving a
        # purely antisymmetric block there
        el = Element.from_vertices([(0, 0, 0), (2, 0, 0), (0, 2, 0)])
        c = np.array([5.0, -3.0, 0.0])  # same plane, outside the element
        pts, _ = map_rule_to_triangle(gauss_rule(8), el)
        drdn = (pts - c) @ el.normal / np.linalg.norm(pts - c, axis=1)
        assert np.abs(drdn).max() == 0.0
        for p in pts[::17]:
            t = kelvin_T(c, p, el.normal, MAT)
            assert np.abs(t + t.T).max() <= 1e-16

    def test_non_unit_normal_rejected(self):
        with pytest.raises(ValueError):
            kelvin_T((0, 0, 0), (1, 0, 0), (0, 0, 2), MAT)

    def test_self_point_rejected(self):
        with pytest.raises(SingularEvaluationError):
            kelvin_T((1, 0, 0), (1, 0, 0), (0, 0, 1), MAT)


class TestGaussRule:
    def test_point_counts(self):
        assert gauss_rule(16).n_points == 256
        assert gauss_rule(4).n_points == 16

    @pytest.mark.parametrize("n", [4, 8, 16, 32])
    def test_weights_sum_to_square_measure(self, n):
        rule = gauss_rule(n)
        assert rule.weights.sum() == pytest.approx(4.0, abs=1e-12)
        assert (rule.weights > 0).all()
        assert (np.abs(rule.points) < 1.0).all()

    @pytest.mark.parametrize("n", [4, 8, 16, 32])
    def test_polynomial_exactness(self, n):
        # exact for degree <= 2n-1 per axis; analytic value of
        # int xi^p eta^q over the square is separable
        rule = gauss_rule(n)
        for p, q in ((2 * n - 1, 0), (2 * n - 2, 2 * n - 2), (3, 2 * n - 1)):
            approx = np.sum(rule.weights * rule.points[:, 0] ** p * rule.points[:, 1] ** q)
            exact_1d = lambda d: 0.0 if d % 2 else 2.0 / (d + 1)
            assert approx == pytest.approx(exact_1d(p) * exact_1d(q), abs=1e-12)

    def test_unsupported_order(self):
        with pytest.raises(ValueError):
            gauss_rule(7)


class TestTriangleMap:
    def test_area_reproduction_unit_triangle(self):
        el = Element.from_vertices([(0, 0, 0), (1, 0, 0), (0, 1, 0)])
        for n in (4, 8, 16, 32):
            _, w = map_rule_to_triangle(gauss_rule(n), el)
            assert w.sum() == pytest.approx(0.5, rel=1e-14)

    def test_area_reproduction_random(self):
        rng = np.random.default_rng(8)
        rule = gauss_rule(8)
        for _ in range(100):
            v = random_triangle(rng, scale=3.0, min_quality=0.01)
            el = Element.from_vertices(v)
            _, w = map_rule_to_triangle(rule, el)
            assert w.sum() == pytest.approx(el.area, rel=1e-10)

    def test_constant_integrand(self):
        el = Element.from_vertices([(0, 0, 0), (2, 0, 0), (0, 3, 0)])
        _, w = map_rule_to_triangle(gauss_rule(4), el)
        assert np.sum(7.5 * w) == pytest.approx(7.5 * el.area, rel=1e-13)

    def test_linear_moment(self):
        # int x dA over the unit right triangle is 1/6
        el = Element.from_vertices([(0, 0, 0), (1, 0, 0), (0, 1, 0)])
        pts, w = map_rule_to_triangle(gauss_rule(4), el)
        assert np.sum(w * pts[:, 0]) == pytest.approx(1.0 / 6.0, abs=1e-12)

    def test_points_inside(self):
        rng = np.random.default_rng(9)
        rule = gauss_rule(8)
        for _ in range(20):
            v = random_triangle(rng, scale=2.0)
            el = Element.from_vertices(v)
            pts, _ = map_rule_to_triangle(rule, el)
            # barycentric coordinates all within (0, 1)
            t = np.linalg.lstsq(
                np.vstack([(v[1] - v[0]), (v[2] - v[0])]).T, (pts - v[0]).T, rcond=None
            )[0]
            u, s = t[0], t[1]
            assert (u > 0).all() and (s > 0).all() and (u + s < 1).all()
