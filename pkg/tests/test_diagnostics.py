import math

import numpy as np
import pytest

import rspider as r
from rspider.diagnostics import CONVERGED, STALLED, epochs_to_double
from rspider.geometry import Euclidean
from rspider.oracle import ComponentObjective
from rspider.optim import FrozenState, params_finite, spider_nonconvex


def diag21_problem():
    Z = np.array([[2.0, 0.0], [0.0, math.sqrt(2.0)]])
    return r.PcaProblem(Z, spectrum=np.array([2.0, 1.0]))


def linear_objective(d=4, n=3, seed=0):
    rng = np.random.default_rng(seed)
    cs = [rng.standard_normal(d) for _ in range(n)]
    return ComponentObjective(
        Euclidean(d),
        values=[(lambda x, c=c: float(c @ x)) for c in cs],
        grads=[(lambda x, c=c: c) for c in cs],
        L_hint=0.0,
    )


class TestFdGradientCheck:
    def test_linear_objective_exact(self):
        obj = linear_objective()
        x = obj.manifold.point(np.random.default_rng(1).standard_normal(4))
        rep = r.fd_gradient_check(obj, x, trials=20, t_step=1e-3, seed=2)
        assert rep.statistic <= 1e-12

    def test_hand_directional_derivative(self):
        P = diag21_problem()
        s = 1.0 / math.sqrt(2.0)
        x = P.manifold.point([s, s])
        v = P.manifold.tangent(x, [-s, s])
        with P.counter.paused():
            g = P.full_rgrad(x)
        assert P.manifold.inner(g, v) == pytest.approx(1.0, abs=1e-14)

    def test_second_order_decay(self):
        P = r.generate_gap_matrix(r.SyntheticSpec(d=6, n=30, delta=0.4, seed=3))
        x = P.manifold.random_point(np.random.default_rng(4))
        e4 = r.fd_gradient_check(P, x, trials=30, t_step=1e-4, seed=5).statistic
        e5 = r.fd_gradient_check(P, x, trials=30, t_step=1e-5, seed=5).statistic
        assert 30.0 <= e4 / e5 <= 300.0

    def test_probe_is_free_and_deterministic(self):
        P = diag21_problem()
        x = P.manifold.point([0.6, 0.8])
        r1 = r.fd_gradient_check(P, x, trials=10, seed=6)
        r2 = r.fd_gradient_check(P, x, trials=10, seed=6)
        assert r1.statistic == r2.statistic
        assert P.counter.calls == 0

    def test_step_validation(self):
        P = diag21_problem()
        x = P.manifold.point([1.0, 0.0])
        with pytest.raises(ValueError):
            r.fd_gradient_check(P, x, t_step=0.1)


class TestSmoothnessProbe:
    def test_constant_gradient_objective(self):
        obj = linear_objective()
        rep = r.smoothness_probe(obj, pairs=20, radius=0.7, seed=0, bound=1e-9)
        assert rep.statistic <= 1e-10
        assert rep.passed

    def test_quadratic_bounded_by_four_lambda1(self):
        P = diag21_problem()
        rep = r.smoothness_probe(P, pairs=200, radius=0.8, seed=1, bound=8.0)
        assert rep.statistic <= 8.0
        assert rep.passed

    def test_symmetry_under_role_swap(self):
        P = diag21_problem()
        man = P.manifold
        rng = np.random.default_rng(2)
        with P.counter.paused():
            for _ in range(20):
                x = man.random_point(rng)
                y = man.exp(x, man.random_tangent(x, rng, scale=0.5))
                gx, gy = P.full_rgrad(x), P.full_rgrad(y)
                a = (gx - man.transport(y, x, gy)).norm()
                b = (gy - man.transport(x, y, gx)).norm()
                assert abs(a - b) <= 1e-10

    def test_default_bound_is_smoothness_hint(self):
        P = diag21_problem()
        rep = r.smoothness_probe(P, pairs=50, radius=0.5, seed=3)
        assert rep.bound == P.L_hint
        assert rep.passed


class TestPlConstantEstimate:
    def test_near_critical_points_rejected(self):
        P = diag21_problem()
        x_star = P.manifold.point([1.0, 0.0])
        with pytest.raises(ValueError):
            r.pl_constant_estimate(P, -2.0, [x_star])

    def test_two_dimensional_closed_form(self):
        # ratio at x = (cos t, sin t) is 1 / (4 delta cos^2 t)
        for delta in (1.0, 0.5, 0.25):
            lam = np.array([1.0, 1.0 - delta])
            Z = np.diag(np.sqrt(2.0 * lam))
            P = r.PcaProblem(Z, spectrum=lam)
            for t in (0.3, math.pi / 4, 1.1):
                x = P.manifold.point([math.cos(t), math.sin(t)])
                rep = r.pl_constant_estimate(P, -1.0, [x])
                assert rep.statistic == pytest.approx(
                    1.0 / (4.0 * delta * math.cos(t) ** 2), abs=1e-9
                )

    def test_tau_doubles_when_gap_halves(self):
        taus = {}
        for delta in (0.2, 0.1):
            P = r.generate_gap_matrix(r.SyntheticSpec(d=50, n=200, delta=delta, seed=21))
            taus[delta] = r.pl_constant_estimate(P, P.f_star, 200, seed=5).statistic
        assert 1.6 <= taus[0.1] / taus[0.2] <= 2.4

    def test_sampling_requires_center_for_generic_objectives(self):
        obj = linear_objective()
        with pytest.raises(ValueError):
            r.pl_constant_estimate(obj, -1.0, 10)


class TestVarianceProbe:
    def _state_with_exact_carry(self, P, s2, seed=0):
        # v_prev equal to the exact gradient: the probe sees pure sampling noise
        man = P.manifold
        rng = np.random.default_rng(seed)
        x_prev = man.random_point(rng)
        with P.counter.paused():
            v_prev = P.full_rgrad(x_prev)
        x_curr = man.exp(x_prev, man.random_tangent(x_prev, rng, scale=0.05))
        return FrozenState(k=1, x_prev=x_prev, x_curr=x_curr, v_prev=v_prev,
                           s2=s2, eps=0.05)

    def test_full_batch_correction_with_exact_carry_is_zero(self):
        P = r.generate_gap_matrix(r.SyntheticSpec(d=6, n=20, delta=0.4, seed=6))
        st = self._state_with_exact_carry(P, s2=P.n, seed=1)
        rep = r.variance_probe(P, st, resamples=50, seed=2)
        assert rep.statistic == 0.0

    def test_two_component_enumeration(self):
        # n=2, s2=1: the exact population variance is the average over both draws
        Z = np.array([[1.0, 0.4], [-0.3, 0.8], [0.2, -0.5]])
        P = r.PcaProblem(Z)
        st = self._state_with_exact_carry(P, s2=1, seed=3)
        man = P.manifold
        with P.counter.paused():
            target = P.full_rgrad(st.x_curr)
            vals = []
            for i in range(2):
                v = P.minibatch_rgrad([i], st.x_curr) - man.transport(
                    st.x_prev, st.x_curr, P.minibatch_rgrad([i], st.x_prev) - st.v_prev
                )
                vals.append((v - target)._sq)
        exact = sum(vals) / 2.0
        rep = r.variance_probe(P, st, resamples=4000, seed=4)
        spread = (max(vals) - min(vals)) / 2.0
        se = spread / math.sqrt(4000)
        assert abs(rep.statistic - exact) <= 3.0 * se + 1e-15

    def test_variance_scales_inversely_with_batch(self):
        P = r.generate_gap_matrix(r.SyntheticSpec(d=8, n=40, delta=0.3, seed=7))
        stats = []
        sizes = (1, 2, 4, 8)
        for s2 in sizes:
            st = self._state_with_exact_carry(P, s2=s2, seed=5)
            stats.append(r.variance_probe(P, st, resamples=4000, seed=6).statistic)
        slope = np.polyfit(np.log(sizes), np.log(stats), 1)[0]
        assert abs(slope + 1.0) <= 0.15

    def test_bound_comes_from_state_eps(self):
        P = r.generate_gap_matrix(r.SyntheticSpec(d=6, n=20, delta=0.4, seed=8))
        st = self._state_with_exact_carry(P, s2=4, seed=7)
        rep = r.variance_probe(P, st, resamples=100, seed=8)
        assert rep.bound == pytest.approx(2 * 0.05**2)


class TestEpochsToDouble:
    def test_exact_halving(self):
        pairs = [(float(t), -1.0 + 0.5 ** (t / 5.0)) for t in range(0, 31, 1)]
        out = epochs_to_double(pairs, f_star=-1.0, window=5.0)
        assert out[0][1] == pytest.approx(5.0, rel=1e-12)

    def test_quartering(self):
        pairs = [(float(t), -1.0 + 0.25 ** (t / 5.0)) for t in range(0, 11)]
        out = epochs_to_double(pairs, f_star=-1.0, window=5.0)
        assert out[0][1] == pytest.approx(2.5, rel=1e-12)

    def test_stalled(self):
        pairs = [(float(t), -1.0 + 0.125) for t in range(0, 11)]
        out = epochs_to_double(pairs, f_star=-1.0, window=5.0)
        assert out[0][1] == STALLED

    def test_converged_sentinel(self):
        pairs = [(float(t), -1.0 + (1e-16 if t else 1e-3)) for t in range(0, 11)]
        out = epochs_to_double(pairs, f_star=-1.0, window=5.0)
        assert math.isnan(out[0][1])
        assert math.isnan(CONVERGED)

    def test_too_few_checkpoints(self):
        with pytest.raises(ValueError):
            epochs_to_double([(0.0, -0.5), (1.0, -0.6)], f_star=-1.0, window=5.0)

    def test_accepts_run_trace(self):
        P = r.generate_gap_matrix(r.SyntheticSpec(d=6, n=20, delta=0.4, seed=9))
        x0 = P.manifold.random_point(np.random.default_rng(10))
        cfg = params_finite(P.n, 0.1, 1.0, P.L_hint, seed=11)
        _, trace = spider_nonconvex(P, x0, cfg, checkpoint_every=0.5, max_ifo=8 * P.n)
        out = epochs_to_double(trace, f_star=P.f_star, window=2.0)
        assert len(out) >= 1
        assert all(e >= 0 for e, _ in out)


class TestProbeReport:
    def test_pass_rule(self):
        rep = r.ProbeReport(name="x", samples=3, statistic=1.0, bound=2.0)
        assert rep.passed
        rep = r.ProbeReport(name="x", samples=3, statistic=3.0, bound=2.0)
        assert not rep.passed
        rep = r.ProbeReport(name="x", samples=3, statistic=3.0, bound=None)
        assert rep.passed

    def test_text_serialization(self):
        rep = r.ProbeReport(
            name="demo", samples=5, statistic=0.25, bound=1.0, details={"radius": 0.5}
        )
        text = rep.to_text()
        assert "probe=demo" in text
        assert "statistic=0.25" in text
        assert "passed=true" in text
        assert text.endswith("\n")
