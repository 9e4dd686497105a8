"""Lifting operations on the cotangent bundle and the canonical structures."""

import math

import numpy as np
import pytest

from conftest import rng
from cotlift.base_geometry import FieldSpec, GeometryError, ManifoldSpec
from cotlift.cotangent import (
    PhasePoint,
    PhaseVector,
    complete_lift_at,
    complete_lift_field,
    connection_map_at,
    directional_derivative_at,
    field_value_at,
    horizontal_lift_at,
    horizontal_lift_field,
    liouville_at,
    liouville_field,
    omega_at,
    omega_inverse,
    omega_matrix,
    omega_pair,
    phase_bracket_at,
    sample_phase_point,
    tautological_at,
    tautological_field,
    theta_at,
    vertical_oneform_field,
    vlift_oneform_at,
    vlift_tensor_at,
    vlift_tensor_values,
)


def flat1() -> ManifoldSpec:
    return ManifoldSpec.build("flat1", ("x",), {(0, 0): "1"}, domain={"x": (-2.0, 2.0)})


def phase(q, p) -> PhasePoint:
    return PhasePoint(np.asarray(q, float), np.asarray(p, float))


class TestPhaseTypes:
    def test_point_shape_checked(self):
        with pytest.raises(GeometryError):
            PhasePoint(np.zeros(2), np.zeros(3))

    def test_vector_shape_checked(self):
        with pytest.raises(GeometryError):
            PhaseVector(np.zeros(3), phase([0, 0], [1, 1]))

    def test_vector_arithmetic_requires_same_point(self):
        a = PhaseVector(np.ones(4), phase([0, 0], [1, 1]))
        b = PhaseVector(np.ones(4), phase([0, 0], [1, 2]))
        with pytest.raises(GeometryError, match="different points"):
            a + b

    def test_chart_concatenates(self):
        pt = phase([1, 2], [3, 4])
        assert np.array_equal(pt.chart, [1, 2, 3, 4])


class TestTautological:
    def test_coordinate_field(self, flat):
        X = FieldSpec.vector(flat.coords, ["1", "0"])
        assert tautological_at(X, phase([0.5, 0.5], [2, 3])) == 2.0

    def test_zero_field(self, flat):
        X = FieldSpec.vector(flat.coords, ["0", "0"])
        assert tautological_at(X, phase([0.1, 0.9], [2, 3])) == 0.0

    def test_linear_field_1d(self):
        M = flat1()
        X = FieldSpec.vector(M.coords, ["x"])
        assert tautological_at(X, phase([1.5], [2.0])) == 3.0


class TestCanonicalStructures:
    def test_theta_components(self):
        pt = phase([0.0], [5.0])
        assert np.array_equal(theta_at(pt), [5.0, 0.0])

    def test_omega_1d(self):
        assert np.array_equal(omega_matrix(1), [[0.0, -1.0], [1.0, 0.0]])

    def test_omega_blocks(self):
        w = omega_matrix(2)
        assert np.array_equal(w[:2, 2:], -np.eye(2))
        assert np.array_equal(w[2:, :2], np.eye(2))
        assert np.array_equal(w[:2, :2], np.zeros((2, 2)))
        assert np.array_equal(w, -w.T)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_omega_determinant_one(self, n):
        assert np.linalg.det(omega_matrix(n)) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_omega_inverse_closed_form(self, n):
        w = omega_matrix(n)
        assert np.allclose(w @ omega_inverse(n), np.eye(2 * n), atol=0)

    def test_omega_at_point_and_pairing(self):
        pt = phase([0.1, 0.2], [1.0, -1.0])
        assert np.array_equal(omega_at(pt), omega_matrix(2))
        u = PhaseVector(np.array([1.0, 0, 0, 0]), pt)
        w = PhaseVector(np.array([0, 0, 1.0, 0]), pt)
        assert omega_pair(u, w) == -1.0
        assert omega_pair(w, u) == 1.0

    def test_theta_pairs_horizontal_to_tautological(self, catalog_manifold):
        # <theta, hX> equals the tautological function, residual <= 1e-12
        gen = rng(31)
        fields = [
            FieldSpec.vector(catalog_manifold.coords, comps)
            for comps in (
                [catalog_manifold.coords[0], catalog_manifold.coords[1]],
                [f"sin({catalog_manifold.coords[1]})", "1"],
            )
        ]
        for _ in range(50):
            pt = sample_phase_point(catalog_manifold, gen)
            for X in fields:
                hx = horizontal_lift_at(catalog_manifold, X, pt)
                lhs = float(theta_at(pt) @ hx.components)
                assert abs(lhs - tautological_at(X, pt)) <= 1e-12


class TestVerticalLifts:
    def test_oneform_components(self, halfplane):
        alpha = FieldSpec.oneform(halfplane.coords, ["1", "0"])  # dx
        out = vlift_oneform_at(alpha, phase([0.3, 1.2], [0.5, 0.5]))
        assert np.array_equal(out.components, [0, 0, 1, 0])

    def test_zero_form(self, flat):
        alpha = FieldSpec.oneform(flat.coords, ["0", "0"])
        out = vlift_oneform_at(alpha, phase([0, 0], [1, 1]))
        assert np.array_equal(out.components, np.zeros(4))

    def test_tensor_identity_is_liouville(self, flat):
        T = FieldSpec.tensor(flat.coords, [["1", "0"], ["0", "1"]])
        pt = phase([0.2, -0.1], [2, 3])
        out = vlift_tensor_at(T, pt)
        assert np.array_equal(out.components, [0, 0, 2, 3])
        assert np.array_equal(out.components, liouville_at(pt).components)

    def test_tensor_factorization(self, sphere):
        # v(X (x) alpha) = tautological(X) * v(alpha)
        gen = rng(32)
        coords = sphere.coords
        X = FieldSpec.vector(coords, ["sin(phi)", "theta"])
        alpha = FieldSpec.oneform(coords, ["1 + phi^2", "cos(theta)"])
        for _ in range(20):
            pt = sample_phase_point(sphere, gen)
            xv = np.array([math.sin(pt.q[1]), pt.q[0]])
            av = np.array([1 + pt.q[1] ** 2, math.cos(pt.q[0])])
            T = FieldSpec.tensor(
                coords,
                [
                    [
                        f"({xc})*({ac})"
                        for ac in ("1 + phi^2", "cos(theta)")
                    ]
                    for xc in ("sin(phi)", "theta")
                ],
            )
            direct = vlift_tensor_at(T, pt).components
            factored = tautological_at(X, pt) * vlift_oneform_at(alpha, pt).components
            assert np.allclose(direct, factored, atol=1e-12)

    def test_oneform_derivative_of_tautological(self, catalog_manifold):
        # v(alpha) differentiates the tautological function to the pairing
        gen = rng(33)
        coords = catalog_manifold.coords
        X = FieldSpec.vector(coords, [f"1 + {c}^2" for c in coords])
        alpha = FieldSpec.oneform(coords, [f"cos({c})" for c in coords])
        xt = tautological_field(X)
        for _ in range(30):
            pt = sample_phase_point(catalog_manifold, gen)
            va = vlift_oneform_at(alpha, pt)
            dd = directional_derivative_at(xt, va, pt)
            from cotlift.base_geometry import field_values

            pairing = float(field_values(alpha, pt.q) @ field_values(X, pt.q))
            assert abs(dd - pairing) <= 1e-12

    def test_tensor_derivative_of_tautological(self, sphere):
        gen = rng(34)
        coords = sphere.coords
        X = FieldSpec.vector(coords, ["theta", "sin(phi)"])
        T = FieldSpec.tensor(coords, [["1", "theta*phi"], ["0", "cos(theta)"]])
        xt = tautological_field(X)
        from cotlift.base_geometry import field_values

        for _ in range(20):
            pt = sample_phase_point(sphere, gen)
            vt = vlift_tensor_at(T, pt)
            dd = directional_derivative_at(xt, vt, pt)
            tx = field_values(T, pt.q) @ field_values(X, pt.q)
            assert abs(dd - float(pt.p @ tx)) <= 1e-12


class TestCompleteLift:
    def test_linear_field_1d(self):
        # cX = (x; -p) for X = x d/dx
        M = flat1()
        X = FieldSpec.vector(M.coords, ["x"])
        out = complete_lift_at(X, phase([1.5], [2.0]))
        assert np.allclose(out.components, [1.5, -2.0])

    def test_coordinate_field(self, flat):
        X = FieldSpec.vector(flat.coords, ["0", "1"])
        out = complete_lift_at(X, phase([0.7, -0.7], [1, 4]))
        assert np.array_equal(out.components, [0, 1, 0, 0])

    def test_defining_relation(self, catalog_manifold):
        # omega(V, cX) = d(tautological X)(V) for all basis vectors V
        gen = rng(35)
        coords = catalog_manifold.coords
        X = FieldSpec.vector(coords, [f"sin({coords[-1]})", f"{coords[0]}^2"])
        xt = tautological_field(X)
        w = omega_matrix(2)
        for _ in range(20):
            pt = sample_phase_point(catalog_manifold, gen)
            cx = complete_lift_at(X, pt)
            jet = xt(pt, 1)
            unit = np.eye(4, dtype=int)
            for a in range(4):
                lhs = float(w[a] @ cx.components)
                assert abs(lhs - jet.partial(unit[a])) <= 1e-12

    def test_bracket_value_1d(self):
        # (cX)(tautological Y) = tautological([X, Y]); for X = x d/dx,
        # Y = d/dx the bracket is -d/dx, giving -p
        M = flat1()
        X = FieldSpec.vector(M.coords, ["x"])
        Y = FieldSpec.vector(M.coords, ["1"])
        pt = phase([0.8], [1.7])
        yt = tautological_field(Y)
        dd = directional_derivative_at(yt, complete_lift_at(X, pt), pt)
        assert dd == pytest.approx(-1.7, abs=1e-14)


class TestHorizontalLift:
    def test_flat_no_fiber_part(self, flat):
        X = FieldSpec.vector(flat.coords, ["y", "x"])
        pt = phase([0.4, -0.6], [1.5, -2.5])
        out = horizontal_lift_at(flat, X, pt)
        assert np.array_equal(out.fiber, [0.0, 0.0])

    def test_halfplane_frozen_fiber(self, halfplane):
        # fiber part (p_y, -p_x) for X = d/dx at (0, 1), from oracle Christoffels
        X = FieldSpec.vector(halfplane.coords, ["1", "0"])
        pt = phase([0.0, 1.0], [0.7, -1.1])
        out = horizontal_lift_at(halfplane, X, pt)
        assert np.allclose(out.fiber, [-1.1, -0.7], atol=1e-12)

    def test_decomposition(self, catalog_manifold):
        # hX - cX = v(grad X) componentwise
        gen = rng(36)
        coords = catalog_manifold.coords
        from cotlift.base_geometry import grad_vector_field_at

        X = FieldSpec.vector(coords, [f"sin({coords[1]})", f"1 + {coords[0]}^2"])
        for _ in range(30):
            pt = sample_phase_point(catalog_manifold, gen)
            hx = horizontal_lift_at(catalog_manifold, X, pt)
            cx = complete_lift_at(X, pt)
            grad = grad_vector_field_at(catalog_manifold, X, pt.q)
            vgrad = vlift_tensor_values(grad, pt)
            assert np.abs((hx - cx - vgrad).components).max() <= 1e-12


class TestSymplecticPairings:
    """The four pairing identities of vertical and horizontal lifts, at the
    tight 1e-10 bound over 100 samples per manifold."""

    def test_pairings(self, catalog_manifold):
        gen = rng(90)
        coords = catalog_manifold.coords
        from cotlift.base_geometry import field_values

        X = FieldSpec.vector(coords, [f"sin({coords[1]})", f"1 + {coords[0]}^2"])
        Y = FieldSpec.vector(coords, [coords[0], f"cos({coords[0]})"])
        alpha = FieldSpec.oneform(coords, [f"1 + {c}^2" for c in coords])
        beta = FieldSpec.oneform(coords, [f"cos({c})" for c in coords])
        T = FieldSpec.tensor(coords, [["1", f"{coords[0]}*{coords[1]}"],
                                      ["0", f"cos({coords[0]})"]])
        w = omega_matrix(2)

        def pair(u, v):
            return float(u.components @ w @ v.components)

        for _ in range(100):
            pt = sample_phase_point(catalog_manifold, gen)
            va = vlift_oneform_at(alpha, pt)
            vb = vlift_oneform_at(beta, pt)
            vt = vlift_tensor_at(T, pt)
            hx = horizontal_lift_at(catalog_manifold, X, pt)
            hy = horizontal_lift_at(catalog_manifold, Y, pt)
            assert abs(pair(va, vb)) <= 1e-10
            assert abs(
                pair(va, hx) - float(field_values(alpha, pt.q) @ field_values(X, pt.q))
            ) <= 1e-10
            tx = field_values(T, pt.q) @ field_values(X, pt.q)
            assert abs(pair(vt, hx) - float(pt.p @ tx)) <= 1e-10
            assert abs(pair(hx, hy)) <= 1e-10


class TestConnectionMap:
    def test_annihilates_horizontal(self, catalog_manifold):
        gen = rng(37)
        X = FieldSpec.vector(catalog_manifold.coords, ["1", "1"])
        for _ in range(30):
            pt = sample_phase_point(catalog_manifold, gen)
            hx = horizontal_lift_at(catalog_manifold, X, pt)
            assert np.abs(connection_map_at(catalog_manifold, hx)).max() <= 1e-12

    def test_restores_oneform(self, catalog_manifold):
        gen = rng(38)
        alpha = FieldSpec.oneform(
            catalog_manifold.coords, [f"exp({c}/2)" for c in catalog_manifold.coords]
        )
        from cotlift.base_geometry import field_values

        for _ in range(30):
            pt = sample_phase_point(catalog_manifold, gen)
            va = vlift_oneform_at(alpha, pt)
            K = connection_map_at(catalog_manifold, va)
            assert np.abs(K - field_values(alpha, pt.q)).max() <= 1e-12


class TestLiouville:
    def test_components(self):
        assert np.array_equal(liouville_at(phase([0, 0], [2, 3])).components, [0, 0, 2, 3])

    def test_equals_identity_tensor_lift(self, flat):
        T = FieldSpec.tensor(flat.coords, [["1", "0"], ["0", "1"]])
        pt = phase([0.9, 0.1], [0.4, -1.9])
        assert np.array_equal(
            liouville_at(pt).components, vlift_tensor_at(T, pt).components
        )


class TestBrackets:
    def test_coordinate_fields_commute(self, flat):
        pt = phase([0.1, 0.2], [0.5, 0.6])

        def dx(point, order):
            from cotlift.jets import Jet

            one = Jet.constant(1.0, 4, order)
            zero = Jet.constant(0.0, 4, order)
            return [one, zero, zero, zero]

        def dp(point, order):
            from cotlift.jets import Jet

            one = Jet.constant(1.0, 4, order)
            zero = Jet.constant(0.0, 4, order)
            return [zero, zero, one, zero]

        out = phase_bracket_at(dx, dp, pt)
        assert np.abs(out.components).max() == 0.0

    def test_liouville_scales_fiber_directions(self, flat):
        # [xi, d/dp_i] = -d/dp_i
        pt = phase([0.1, 0.2], [0.5, 0.6])

        def dp0(point, order):
            from cotlift.jets import Jet

            one = Jet.constant(1.0, 4, order)
            zero = Jet.constant(0.0, 4, order)
            return [zero, zero, one, zero]

        out = phase_bracket_at(liouville_field(), dp0, pt)
        assert np.allclose(out.components, [0, 0, -1, 0])

    def test_complete_lifts_intertwine_brackets(self, catalog_manifold):
        # [cX, cY] = c[X, Y] to 1e-10 at random samples
        gen = rng(39)
        coords = catalog_manifold.coords
        from cotlift.base_geometry import field_jets

        X = FieldSpec.vector(coords, [f"sin({coords[1]})", f"{coords[0]}^2"])
        Y = FieldSpec.vector(coords, [coords[0], f"cos({coords[0]})"])
        cX, cY = complete_lift_field(X), complete_lift_field(Y)
        for _ in range(20):
            pt = sample_phase_point(catalog_manifold, gen)
            lhs = phase_bracket_at(cX, cY, pt).components

            # c[X, Y] needs first derivatives of the bracket components
            xj = field_jets(X, pt.q, 2)
            yj = field_jets(Y, pt.q, 2)
            n = 2
            br = []
            for k in range(n):
                acc = xj[0].truncate(1) * yj[k].derivative(0)
                acc = acc + xj[1].truncate(1) * yj[k].derivative(1)
                acc = acc - yj[0].truncate(1) * xj[k].derivative(0)
                acc = acc - yj[1].truncate(1) * xj[k].derivative(1)
                br.append(acc)
            unit = np.eye(n, dtype=int)
            base = [b.value for b in br]
            fiber = [
                -sum(pt.p[k] * br[k].partial(unit[i]) for k in range(n))
                for i in range(n)
            ]
            rhs = np.array(base + fiber)
            assert np.abs(lhs - rhs).max() <= 1e-10


class TestFieldEvaluators:
    def test_field_value_matches_pointwise(self, sphere):
        gen = rng(40)
        X = FieldSpec.vector(sphere.coords, ["theta", "sin(phi)"])
        for _ in range(10):
            pt = sample_phase_point(sphere, gen)
            via_field = field_value_at(horizontal_lift_field(sphere, X), pt)
            direct = horizontal_lift_at(sphere, X, pt)
            assert np.allclose(via_field.components, direct.components, atol=1e-14)
            via_c = field_value_at(complete_lift_field(X), pt)
            direct_c = complete_lift_at(X, pt)
            assert np.allclose(via_c.components, direct_c.components, atol=1e-14)

    def test_vertical_field_value(self, sphere):
        gen = rng(41)
        alpha = FieldSpec.oneform(sphere.coords, ["cos(phi)", "theta"])
        pt = sample_phase_point(sphere, gen)
        via_field = field_value_at(vertical_oneform_field(alpha), pt)
        direct = vlift_oneform_at(alpha, pt)
        assert np.allclose(via_field.components, direct.components, atol=1e-14)


class TestPhaseSampling:
    def test_momentum_outside_exclusion_ball(self, catalog_manifold):
        gen = rng(42)
        for _ in range(100):
            pt = sample_phase_point(catalog_manifold, gen)
            assert np.linalg.norm(pt.p) >= catalog_manifold.fiber_exclusion
            for value, (lo, hi) in zip(pt.p, catalog_manifold.fiber_box):
                assert lo <= value <= hi

    def test_roles_enforced(self, flat):
        alpha = FieldSpec.oneform(flat.coords, ["1", "0"])
        with pytest.raises(GeometryError):
            tautological_at(alpha, phase([0, 0], [1, 1]))
        X = FieldSpec.vector(flat.coords, ["1", "0"])
        with pytest.raises(GeometryError):
            vlift_oneform_at(X, phase([0, 0], [1, 1]))
