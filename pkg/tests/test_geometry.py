import math

import numpy as np
import pytest

from rspider.geometry import (
    AntipodalError,
    Euclidean,
    GeometryError,
    Sphere,
    TangentVector,
)

S2 = Sphere(2)
S3 = Sphere(3)


def e(i, d):
    v = np.zeros(d)
    v[i] = 1.0
    return v


class TestInner:
    def test_unit_vector_with_itself(self):
        x = S2.point(e(0, 2))
        u = S2.tangent(x, [0.0, 1.0])
        assert S2.inner(u, u) == pytest.approx(1.0, abs=1e-15)

    def test_bilinearity(self):
        x = S2.point(e(0, 2))
        u = S2.tangent(x, [0.0, 2.0])
        v = S2.tangent(x, [0.0, 3.0])
        assert S2.inner(u, v) == pytest.approx(6.0, abs=1e-14)

    def test_symmetry_random(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            x = S3.random_point(rng)
            u = S3.random_tangent(x, rng, scale=rng.uniform(0.1, 2.0))
            v = S3.random_tangent(x, rng, scale=rng.uniform(0.1, 2.0))
            assert abs(S3.inner(u, v) - S3.inner(v, u)) <= 1e-14

    def test_mismatched_bases_rejected(self):
        rng = np.random.default_rng(1)
        x, y = S3.random_point(rng), S3.random_point(rng)
        u = S3.random_tangent(x, rng)
        v = S3.random_tangent(y, rng)
        with pytest.raises(GeometryError):
            S3.inner(u, v)


class TestExp:
    def test_zero_vector(self):
        rng = np.random.default_rng(2)
        x = S3.random_point(rng)
        y = S3.exp(x, S3.zero_tangent(x))
        assert np.allclose(y.coords, x.coords, atol=1e-15)

    def test_quarter_great_circle(self):
        x = S3.point(e(0, 3))
        v = S3.tangent(x, (math.pi / 2) * e(1, 3))
        y = S3.exp(x, v)
        assert np.allclose(y.coords, e(1, 3), atol=1e-15)

    def test_constant_speed(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            x = S3.random_point(rng)
            v = S3.random_tangent(x, rng, scale=rng.uniform(1e-4, 1.2))
            assert S3.dist(S3.exp(x, v), x) == pytest.approx(v.norm(), abs=1e-10)

    def test_output_on_manifold(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            x = S3.random_point(rng)
            v = S3.random_tangent(x, rng, scale=rng.uniform(0, 3.0))
            y = S3.exp(x, v)
            assert abs(np.linalg.norm(y.coords) - 1.0) <= 1e-9


class TestLog:
    def test_identity(self):
        rng = np.random.default_rng(5)
        x = S3.random_point(rng)
        assert S3.log(x, x).norm() == 0.0

    def test_quarter_circle_inverse(self):
        x = S3.point(e(0, 3))
        y = S3.point(e(1, 3))
        w = S3.log(x, y)
        assert np.allclose(w.coords, (math.pi / 2) * e(1, 3), atol=1e-15)

    def test_round_trip(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            x = S3.random_point(rng)
            v = S3.random_tangent(x, rng, scale=rng.uniform(0, math.pi / 2))
            w = S3.log(x, S3.exp(x, v))
            assert np.linalg.norm(w.coords - v.coords) <= 1e-9 * (1 + v.norm())

    def test_antipodal_rejected(self):
        x = S3.point(e(0, 3))
        y = S3.point(-e(0, 3))
        with pytest.raises(AntipodalError):
            S3.log(x, y)

    def test_norm_equals_dist(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            x, y = S3.random_point(rng), S3.random_point(rng)
            assert S3.log(x, y).norm() == pytest.approx(S3.dist(x, y), abs=1e-12)


class TestTransport:
    def test_identity_case(self):
        rng = np.random.default_rng(8)
        x = S3.random_point(rng)
        v = S3.random_tangent(x, rng)
        w = S3.transport(x, x, v)
        assert np.array_equal(w.coords, v.coords)

    def test_quarter_circle_rotation(self):
        x = S2.point(e(0, 2))
        y = S2.point(e(1, 2))
        v = S2.tangent(x, e(1, 2))
        w = S2.transport(x, y, v)
        assert np.allclose(w.coords, -e(0, 2), atol=1e-15)
        assert abs(w.norm() - 1.0) <= 1e-12
        assert abs(w.coords @ y.coords) <= 1e-12

    def test_isometry(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            x, y = S3.random_point(rng), S3.random_point(rng)
            u = S3.random_tangent(x, rng, scale=rng.uniform(0.1, 2.0))
            v = S3.random_tangent(x, rng, scale=rng.uniform(0.1, 2.0))
            tu, tv = S3.transport(x, y, u), S3.transport(x, y, v)
            assert abs(S3.inner(tu, tv) - S3.inner(u, v)) <= 1e-10
            assert abs(tu.norm() - u.norm()) <= 1e-10

    def test_reversal(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            x, y = S3.random_point(rng), S3.random_point(rng)
            fwd = S3.transport(x, y, S3.log(x, y))
            back = S3.log(y, x)
            assert np.linalg.norm(fwd.coords + back.coords) <= 1e-9

    def test_output_tangent_at_target(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            x, y = S3.random_point(rng), S3.random_point(rng)
            v = S3.random_tangent(x, rng, scale=2.0)
            w = S3.transport(x, y, v)
            assert abs(w.coords @ y.coords) <= 1e-9 * max(1.0, w.norm())


class TestRetract:
    def test_zero(self):
        rng = np.random.default_rng(12)
        x = S3.random_point(rng)
        y = S3.retract(x, S3.zero_tangent(x))
        assert np.allclose(y.coords, x.coords, atol=1e-15)

    def test_hand_normalized(self):
        x = S2.point(e(0, 2))
        v = S2.tangent(x, e(1, 2))
        y = S2.retract(x, v)
        assert np.allclose(y.coords, [1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)

    def test_second_order_agreement_with_exp(self):
        # dist(retract, exp) / |v|^2 stays bounded as |v| shrinks
        rng = np.random.default_rng(13)
        x = S3.random_point(rng)
        u = S3.random_tangent(x, rng)
        ratios = []
        for s in (0.2, 0.1, 0.05):
            v = u._scaled(s)
            gap = S3.dist(S3.retract(x, v), S3.exp(x, v))
            ratios.append(gap / s**2)
        assert max(ratios) <= 0.5
        # ratio does not blow up as the step shrinks
        assert ratios[-1] <= 2.0 * ratios[0] + 1e-12


class TestDist:
    def test_zero(self):
        rng = np.random.default_rng(14)
        x = S3.random_point(rng)
        assert S3.dist(x, x) == 0.0

    def test_orthogonal_units(self):
        assert S3.dist(S3.point(e(0, 3)), S3.point(e(1, 3))) == pytest.approx(
            math.pi / 2, abs=1e-15
        )

    def test_symmetry(self):
        rng = np.random.default_rng(15)
        for _ in range(50):
            x, y = S3.random_point(rng), S3.random_point(rng)
            assert abs(S3.dist(x, y) - S3.dist(y, x)) <= 1e-12


class TestEuclidean:
    def test_exp_retract_transport_exact(self):
        E = Euclidean(4)
        rng = np.random.default_rng(16)
        x = E.random_point(rng)
        v = E.random_tangent(x, rng, scale=2.5)
        y1, y2 = E.exp(x, v), E.retract(x, v)
        assert np.array_equal(y1.coords, y2.coords)
        w = E.transport(x, y1, v)
        assert np.array_equal(w.coords, v.coords)
        assert np.allclose(E.log(x, y1).coords, v.coords, atol=1e-15)
        assert E.dist(x, y1) == pytest.approx(v.norm(), abs=1e-14)

    def test_nonfinite_rejected(self):
        E = Euclidean(2)
        with pytest.raises(GeometryError):
            E.point([1.0, math.inf])


class TestInvariants:
    def test_point_renormalized(self):
        x = S2.point([3.0, 4.0])
        assert np.allclose(x.coords, [0.6, 0.8], atol=1e-15)

    def test_zero_point_rejected(self):
        with pytest.raises(GeometryError):
            S2.point([0.0, 0.0])

    def test_tangent_projected(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            x = S3.random_point(rng)
            v = S3.tangent(x, rng.standard_normal(3) * 5)
            assert abs(x.coords @ v.coords) <= 1e-9 * max(1.0, v.norm())

    def test_dimension_mismatch(self):
        with pytest.raises(GeometryError):
            S3.point([1.0, 0.0])

    def test_manifold_mismatch(self):
        x3 = S3.point(e(0, 3))
        # equality is by value: a separate Sphere(3) instance is the same manifold
        assert S3.dist(x3, Sphere(3).point(e(1, 3))) == pytest.approx(math.pi / 2)
        with pytest.raises(GeometryError):
            Euclidean(3).dist(x3, x3)

    def test_degenerate_retraction(self):
        x = S2.point(e(0, 2))
        v = TangentVector._raw(x, np.array([-1.0, 0.0]))  # forced: x + v = 0
        with pytest.raises(GeometryError):
            S2.retract(x, v)

    def test_tangent_arithmetic(self):
        rng = np.random.default_rng(18)
        x = S3.random_point(rng)
        u = S3.random_tangent(x, rng)
        v = S3.random_tangent(x, rng)
        s = u + v - 2.0 * u
        assert np.allclose(s.coords, v.coords - u.coords, atol=1e-15)
        assert np.allclose((-u).coords, -u.coords, atol=0)
