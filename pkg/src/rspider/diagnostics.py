"""Runtime verification probes for objectives and estimator state.

Checks the analytic regularity quantities the optimizers rely on: gradient
correctness against geodesic finite differences, smoothness and
gradient-domination constants, correction-estimator variance at frozen
mid-run states, and the epochs-to-double-accuracy rate statistic used by
the benchmark. All probes evaluate the objective with accounting paused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ManifoldPoint
from .oracle import FiniteSumObjective, PcaProblem, leading_eigpair
from .optim import FrozenState, RunTrace

__all__ = [
    "CONVERGED",
    "STALLED",
    "ProbeReport",
    "epochs_to_double",
    "fd_gradient_check",
    "pl_constant_estimate",
    "smoothness_probe",
    "variance_probe",
]

#: Sentinels produced by :func:`epochs_to_double`.
STALLED = math.inf  # no error reduction in the window
CONVERGED = math.nan  # error already at (or below) the measurement floor


@dataclass
class ProbeReport:
    """Outcome of one probe: a scalar statistic and an optional bound."""

    name: str
    samples: int
    statistic: float
    bound: float | None = None
    passed: bool = True
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.bound is not None:
            self.passed = self.statistic <= self.bound

    def to_text(self) -> str:
        """Flat key=value block for appending to run logs."""
        lines = [
            f"probe={self.name}",
            f"samples={self.samples}",
            f"statistic={self.statistic!r}",
            f"bound={'none' if self.bound is None else repr(self.bound)}",
            f"passed={str(self.passed).lower()}",
        ]
        lines.extend(f"{k}={v!r}" for k, v in sorted(self.details.items()))
        return "\n".join(lines) + "\n"


def fd_gradient_check(
    obj: FiniteSumObjective,
    x: ManifoldPoint,
    trials: int = 32,
    t_step: float = 1e-6,
    seed: int = 0,
    bound: float | None = None,
) -> ProbeReport:
    """Compare directional derivatives with central geodesic differences.

    For random unit tangents v, checks <grad f(x), v> against
    (f(exp(x, t v)) - f(exp(x, -t v))) / (2 t). The statistic is the largest
    absolute error; central differencing makes it decay as t^2.
    """
    if not 0.0 < t_step <= 1e-3:
        raise ValueError("t_step must lie in (0, 1e-3]")
    man = obj.manifold
    rng = np.random.default_rng(seed)
    with obj.counter.paused():
        g = obj.full_rgrad(x)
        errs = []
        for _ in range(trials):
            v = man.random_tangent(x, rng)
            lhs = man.inner(g, v)
            fp = obj.value(man.exp(x, v._scaled(t_step)))
            fm = obj.value(man.exp(x, v._scaled(-t_step)))
            errs.append(abs(lhs - (fp - fm) / (2.0 * t_step)))
    return ProbeReport(
        name="fd_gradient_check",
        samples=trials,
        statistic=max(errs),
        bound=bound,
        details={"mean_error": sum(errs) / len(errs), "t_step": t_step},
    )


def smoothness_probe(
    obj: FiniteSumObjective,
    pairs: int = 64,
    radius: float = 0.5,
    seed: int = 0,
    bound: float | None = None,
) -> ProbeReport:
    """Empirical lower bound on the gradient Lipschitz constant.

    Over random geodesic pairs (x, y) with dist <= radius, measures
    |grad f(x) - transport(grad f(y))| / dist(x, y). Passes when the maximum
    stays below ``bound`` (default: the objective's smoothness hint).
    """
    if bound is None:
        bound = obj.L_hint
    man = obj.manifold
    rng = np.random.default_rng(seed)
    worst = 0.0
    used = 0
    with obj.counter.paused():
        for _ in range(pairs):
            x = man.random_point(rng)
            r = float(rng.uniform(0.0, radius))
            if r < 1e-12:
                continue
            y = man.exp(x, man.random_tangent(x, rng, scale=r))
            gx = obj.full_rgrad(x)
            gy = obj.full_rgrad(y)
            den = man.dist(x, y)
            if den < 1e-12:
                continue
            num = (gx - man.transport(y, x, gy)).norm()
            worst = max(worst, num / den)
            used += 1
    return ProbeReport(
        name="smoothness_probe",
        samples=used,
        statistic=worst,
        bound=bound,
        details={"radius": radius},
    )


def _slow_direction(P: PcaProblem, center: ManifoldPoint, tol=1e-10, max_iter=50_000):
    """Unit tangent at ``center`` along the second eigendirection (deflated
    power iteration). This is the flattest ascent direction of the quadratic,
    where the domination ratio peaks."""
    Z, n = P.Z, P.n
    c = center.coords
    rng = np.random.default_rng(0x51<<8)
    v = rng.standard_normal(P.d)
    v -= (c @ v) * c
    v /= math.sqrt(float(v @ v))
    lam_prev = math.inf
    for _ in range(max_iter):
        w = Z @ (Z.T @ v) / n
        w -= (c @ w) * c
        lam = float(v @ w)
        if abs(lam - lam_prev) < tol:
            break
        nw = math.sqrt(float(w @ w))
        if nw <= 1e-300:
            break
        v = w / nw
        lam_prev = lam
    return P.manifold.tangent(center, v)


def pl_constant_estimate(
    obj: FiniteSumObjective,
    f_star: float,
    points,
    center: ManifoldPoint | None = None,
    radius: float = math.pi / 4,
    seed: int = 0,
    min_grad_sq: float = 1e-12,
) -> ProbeReport:
    """Empirical gradient-domination constant: max of (f(x) - f*) / |grad f(x)|^2.

    ``points`` is either an explicit sequence of points or a sample count; in
    the latter case points are drawn in the geodesic ball of the given radius
    around ``center`` (derived from the top eigenvector for the quadratic
    instances when omitted). Uniform directions alone dilute the flat mode in
    high dimension, so sampling for quadratic instances also walks the
    estimated second eigendirection, where the ratio peaks. Points with
    |grad|^2 below ``min_grad_sq`` carry no information (0/0 at optima) and
    are excluded.
    """
    man = obj.manifold
    if isinstance(points, int):
        if center is None:
            if isinstance(obj, PcaProblem):
                _, center = leading_eigpair(obj)
            else:
                raise ValueError("sampling needs a center point")
        rng = np.random.default_rng(seed)
        pts = []
        for _ in range(points):
            r = float(rng.uniform(0.0, radius))
            pts.append(man.exp(center, man.random_tangent(center, rng, scale=r)))
        if isinstance(obj, PcaProblem):
            u = _slow_direction(obj, center)
            for r in np.linspace(radius / 8.0, radius, 8):
                pts.append(man.exp(center, u._scaled(r)))
                pts.append(man.exp(center, u._scaled(-r)))
    else:
        pts = list(points)
    ratios = []
    excluded = 0
    with obj.counter.paused():
        for p in pts:
            g = obj.full_rgrad(p)
            if g._sq < min_grad_sq:
                excluded += 1
                continue
            ratios.append((obj.value(p) - f_star) / g._sq)
    if not ratios:
        raise ValueError("all probe points are near-critical: no domination ratio")
    return ProbeReport(
        name="pl_constant_estimate",
        samples=len(ratios),
        statistic=max(ratios),
        bound=None,
        details={
            "excluded": excluded,
            "min_ratio": min(ratios),
            "mean_ratio": sum(ratios) / len(ratios),
            "radius": radius,
        },
    )


def variance_probe(
    obj: FiniteSumObjective,
    frozen: FrozenState,
    resamples: int = 500,
    seed: int = 0,
    slack: float = 2.0,
) -> ProbeReport:
    """Monte-Carlo check of the correction estimator's conditional variance.

    Re-draws the correction minibatch of a captured mid-run state and measures
    the mean of |v_k - grad f(x_k)|^2. The analytic budget for a full epoch is
    eps^2; the reported bound applies ``slack`` (default 2) to absorb sampling
    noise. A batch of size >= n is the deterministic full-batch correction, so
    every resample coincides.
    """
    man = obj.manifold
    rng = np.random.default_rng(seed)
    vals = []
    with obj.counter.paused():
        target = obj.full_rgrad(frozen.x_curr)
        carried = (frozen.v_prev - obj.full_rgrad(frozen.x_prev)).norm()
        if frozen.s2 >= obj.n:
            g_new = obj.full_rgrad(frozen.x_curr)
            g_old = obj.full_rgrad(frozen.x_prev)
            v = g_new - man.transport(frozen.x_prev, frozen.x_curr, g_old - frozen.v_prev)
            vals = [(v - target)._sq] * resamples
        else:
            for _ in range(resamples):
                idx = rng.integers(0, obj.n, size=frozen.s2)
                g_new = obj.minibatch_rgrad(idx, frozen.x_curr)
                g_old = obj.minibatch_rgrad(idx, frozen.x_prev)
                v = g_new - man.transport(
                    frozen.x_prev, frozen.x_curr, g_old - frozen.v_prev
                )
                vals.append((v - target)._sq)
    return ProbeReport(
        name="variance_probe",
        samples=resamples,
        statistic=sum(vals) / len(vals),
        bound=slack * frozen.eps**2,
        details={
            "s2": frozen.s2,
            "k": frozen.k,
            "max": max(vals),
            "min": min(vals),
            "carried_error_norm": carried,
        },
    )


def _accuracy(f: float, f_star: float) -> float:
    return (f - f_star) / abs(f_star)


def epochs_to_double(
    trace,
    f_star: float,
    window: float = 5.0,
    step: float | None = None,
) -> list[tuple[float, float]]:
    """Per-window estimate of how many epochs the run needs to halve its error.

    ``trace`` is a :class:`RunTrace` (its checkpoint records are used) or an
    iterable of (epoch, objective value) pairs sampled on a uniform checkpoint
    grid of spacing ``step``. With c the multiplicative error factor over one
    window, the estimate is log(2) / log(1/c) * window. Windows without
    progress (c >= 1) give STALLED (inf); windows starting at or crossing the
    measurement floor give CONVERGED (nan).
    """
    if f_star == 0:
        raise ValueError("the optimum value must be nonzero for relative accuracy")
    if isinstance(trace, RunTrace):
        pairs = [(r.epoch, r.f) for r in trace.records if r.boundary is not None]
        if step is None:
            step = float(trace.meta.get("checkpoint_every", 1.0))
    else:
        pairs = [(float(e), float(f)) for e, f in trace]
        if step is None:
            if len(pairs) < 2:
                raise ValueError("need at least two checkpoints")
            step = (pairs[-1][0] - pairs[0][0]) / (len(pairs) - 1)
    if step <= 0:
        raise ValueError("checkpoint spacing must be positive")
    m = max(1, round(window / step))
    if len(pairs) < m + 1:
        raise ValueError(
            f"need at least {m + 1} checkpoints to span a {window}-epoch window"
        )
    out = []
    for i in range(len(pairs) - m):
        e0, f0 = pairs[i]
        _e1, f1 = pairs[i + m]
        a0 = _accuracy(f0, f_star)
        a1 = _accuracy(f1, f_star)
        if a0 <= 1e-15:
            out.append((e0, CONVERGED))
            continue
        c = a1 / a0
        if c <= 0.0 or a1 <= 1e-15:
            out.append((e0, CONVERGED))
        elif c >= 1.0:
            out.append((e0, STALLED))
        else:
            out.append((e0, math.log(2.0) / math.log(1.0 / c) * window))
    return out
