"""Variance-reduced stochastic optimizers on geodesic manifolds.

The core estimator keeps a running gradient surrogate ``v`` that is
corrected each step with a paired minibatch evaluated at the current and
previous iterates, combined via parallel transport, and re-anchored every
``q`` steps. Two restart schemes give linear convergence on
gradient-dominated objectives. SGD and SVRG baselines share the same
tracing and accounting machinery.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .geometry import AntipodalError, GeometryError, ManifoldPoint, TangentVector
from .oracle import FiniteSumObjective

__all__ = [
    "FrozenState",
    "GdConfig",
    "OptimizerError",
    "RunTrace",
    "SpiderConfig",
    "TraceRecord",
    "correction_batch_size",
    "params_finite",
    "params_stochastic",
    "rsgd",
    "rsvrg",
    "spider_gd1",
    "spider_gd2",
    "spider_nonconvex",
]

MAP_MODES = ("exp", "retract")
IFO_CONVENTIONS = ("paired", "single")


class OptimizerError(RuntimeError):
    """An optimizer run aborted (degenerate geometry or invalid state)."""


def _ceil_tol(x: float) -> int:
    """Ceiling with a relative guard against float noise just above an integer."""
    return math.ceil(x - 1e-9 * max(1.0, abs(x)))


def correction_batch_size(
    q: int, L: float, step_len: float, eps: float, n: int | None = None
) -> int:
    """Samples for one correction step: ceil(min(n, q L^2 step^2 / (2 eps^2))).

    Clamped to at least one sample; a zero-length step would otherwise skip
    the correction and break the estimator recursion.
    """
    raw = q * L**2 * step_len**2 / (2.0 * eps**2)
    if n is not None:
        raw = min(float(n), raw)
    return max(1, _ceil_tol(raw))


@dataclass
class SpiderConfig:
    """Schedule for the recursive variance-reduced solver.

    ``n = None`` selects sample-only mode: anchors draw ``S1`` components
    with replacement and correction batches are not capped at n.
    """

    L: float
    eps: float
    q: int
    S1: int
    T: int
    eta: float | None = None  # defaults to 1/(2L)
    n: int | None = None
    map_mode: str = "exp"
    seed: int = 0
    ifo_convention: str = "paired"

    def __post_init__(self):
        if self.L <= 0 or self.eps <= 0:
            raise ValueError("L and eps must be positive")
        if self.q < 1 or self.S1 < 1 or self.T < 0:
            raise ValueError("need q >= 1, S1 >= 1, T >= 0")
        if self.eta is None:
            self.eta = 1.0 / (2.0 * self.L)
        if self.eta <= 0:
            raise ValueError("step size must be positive")
        if self.map_mode not in MAP_MODES:
            raise ValueError(f"map_mode must be one of {MAP_MODES}")
        if self.ifo_convention not in IFO_CONVENTIONS:
            raise ValueError(f"ifo_convention must be one of {IFO_CONVENTIONS}")


@dataclass
class GdConfig:
    """Restart schedule for gradient-dominated objectives.

    ``tau`` is the gradient-domination constant, ``M0`` an upper bound on the
    initial optimality gap. ``eta_mode="eps-scaled"`` uses the stage step
    eps_t / L instead of the constant 1/(2L). ``chain`` picks which iterate a
    stage hands to the next one: the solver's randomized pick or the last.
    """

    M0: float
    tau: float
    L: float
    K: int
    map_mode: str = "exp"
    seed: int = 0
    ifo_convention: str = "paired"
    eta_mode: str = "constant"
    chain: str = "random"

    def __post_init__(self):
        if self.M0 <= 0 or self.tau <= 0 or self.L <= 0:
            raise ValueError("M0, tau and L must be positive")
        if self.K < 0:
            raise ValueError("need K >= 0")
        if self.map_mode not in MAP_MODES:
            raise ValueError(f"map_mode must be one of {MAP_MODES}")
        if self.ifo_convention not in IFO_CONVENTIONS:
            raise ValueError(f"ifo_convention must be one of {IFO_CONVENTIONS}")
        if self.eta_mode not in ("constant", "eps-scaled"):
            raise ValueError("eta_mode must be 'constant' or 'eps-scaled'")
        if self.chain not in ("random", "last"):
            raise ValueError("chain must be 'random' or 'last'")


@dataclass
class TraceRecord:
    """One checkpoint: iteration, cost so far, and free objective probes.

    ``boundary`` is the nominal checkpoint epoch this record was emitted for,
    or None for the end-of-run record.
    """

    k: int
    epoch: float
    ifo: int
    f: float
    grad_sq: float
    step_dist: float
    batch: int
    boundary: float | None = None


@dataclass
class RunTrace:
    records: list[TraceRecord] = field(default_factory=list)
    meta: dict = field(default_factory=dict)


@dataclass
class FrozenState:
    """Mid-run estimator state captured just before a correction step."""

    k: int
    x_prev: ManifoldPoint
    x_curr: ManifoldPoint
    v_prev: TangentVector
    s2: int
    eps: float


class _Tracer:
    """Emits one record per crossed checkpoint boundary (free evaluations)."""

    def __init__(self, obj: FiniteSumObjective, every: float):
        if every <= 0:
            raise ValueError("checkpoint interval must be positive")
        self.obj = obj
        self.every = float(every)
        self.records: list[TraceRecord] = []
        self._next_idx = 0

    def _snap(self, k, x, step_dist, batch, boundary):
        calls = self.obj.counter.calls
        with self.obj.counter.paused():
            f = self.obj.value(x)
            g = self.obj.full_rgrad(x)
        self.records.append(
            TraceRecord(
                k=k,
                epoch=calls / self.obj.n,
                ifo=calls,
                f=f,
                grad_sq=g._sq,
                step_dist=step_dist,
                batch=batch,
                boundary=boundary,
            )
        )

    def after_step(self, k, x, step_dist, batch):
        epoch = self.obj.counter.calls / self.obj.n
        while epoch >= self._next_idx * self.every - 1e-12:
            self._snap(k, x, step_dist, batch, self._next_idx * self.every)
            self._next_idx += 1

    def final(self, k, x, step_dist, batch):
        self._snap(k, x, step_dist, batch, None)


def _update(man, x, v, eta, map_mode, k):
    """One descent step; returns the new point and the geodesic step length."""
    step = v._scaled(-eta)
    try:
        if map_mode == "exp":
            x_next = man.exp(x, step)
            step_len = eta * v.norm()
        else:
            x_next = man.retract(x, step)
            step_len = man.dist(x, x_next)
    except (AntipodalError, GeometryError) as e:
        raise OptimizerError(f"degenerate step at iteration {k}: {e}") from e
    return x_next, step_len


def _paired_minibatch(obj, idx, x_curr, x_prev, convention):
    """Evaluate one index multiset at both points.

    Under the "paired" convention each sampled component charges one call per
    evaluation point (two total); "single" charges only the current point.
    """
    g_new = obj.minibatch_rgrad(idx, x_curr)
    if convention == "paired":
        g_old = obj.minibatch_rgrad(idx, x_prev)
    else:
        with obj.counter.paused():
            g_old = obj.minibatch_rgrad(idx, x_prev)
    return g_new, g_old


def _paired_full(obj, x_curr, x_prev, convention):
    g_new = obj.full_rgrad(x_curr)
    if convention == "paired":
        g_old = obj.full_rgrad(x_prev)
    else:
        with obj.counter.paused():
            g_old = obj.full_rgrad(x_prev)
    return g_new, g_old


def _spider_core(
    obj,
    x0,
    cfg: SpiderConfig,
    *,
    checkpoint_every=1.0,
    max_ifo=None,
    on_correction=None,
    rng=None,
    tracer=None,
    k_offset=0,
):
    """Run the recursive estimator; returns (random iterate, last iterate, steps done)."""
    man = obj.manifold
    if x0.manifold != man:
        raise ValueError("x0 does not live on the objective's manifold")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    own_trace = tracer is None
    if own_trace:
        tracer = _Tracer(obj, checkpoint_every)
    tallies = {"anchor": 0, "correction": 0}
    calls_start = obj.counter.calls

    x = x0
    x_prev = None
    v = None
    step_len = 0.0
    x_out = x0
    seen = 0
    done = 0

    if cfg.T >= 1 and own_trace:
        tracer.after_step(k_offset, x0, 0.0, 0)

    for k in range(cfg.T):
        if max_ifo is not None and obj.counter.calls >= max_ifo:
            break
        if k % cfg.q == 0:
            if cfg.n is not None and cfg.S1 >= obj.n:
                v = obj.full_rgrad(x)  # deterministic anchor
                batch = obj.n
            else:
                idx = rng.integers(0, obj.n, size=cfg.S1)
                v = obj.minibatch_rgrad(idx, x)
                batch = cfg.S1
            tallies["anchor"] += batch
        else:
            cap = obj.n if cfg.n is not None else None
            s2 = correction_batch_size(cfg.q, cfg.L, step_len, cfg.eps, cap)
            if on_correction is not None:
                on_correction(FrozenState(k_offset + k, x_prev, x, v, s2, cfg.eps))
            if cfg.n is not None and s2 >= obj.n:
                g_new, g_old = _paired_full(obj, x, x_prev, cfg.ifo_convention)
                batch = obj.n
            else:
                idx = rng.integers(0, obj.n, size=s2)
                g_new, g_old = _paired_minibatch(obj, idx, x, x_prev, cfg.ifo_convention)
                batch = s2
            charged = 2 * batch if cfg.ifo_convention == "paired" else batch
            tallies["correction"] += charged
            try:
                v = g_new - man.transport(x_prev, x, g_old - v)
            except (AntipodalError, GeometryError) as e:
                raise OptimizerError(
                    f"transport failed at iteration {k_offset + k}: {e}"
                ) from e

        x_next, step_len = _update(man, x, v, cfg.eta, cfg.map_mode, k_offset + k)
        seen += 1
        if rng.random() * seen < 1.0:
            x_out = x_next  # reservoir pick: uniform over produced iterates
        x_prev = x
        x = x_next
        done = k + 1
        tracer.after_step(k_offset + done, x, step_len, batch)

    info = {
        "steps": done,
        "ifo": obj.counter.calls - calls_start,
        "ifo_breakdown": tallies,
    }
    if own_trace and cfg.T >= 1:
        tracer.final(k_offset + done, x, step_len, 0 if done == 0 else batch)
    return x_out, x, info, tracer


def spider_nonconvex(
    obj: FiniteSumObjective,
    x0: ManifoldPoint,
    cfg: SpiderConfig,
    *,
    checkpoint_every: float = 1.0,
    max_ifo: int | None = None,
    on_correction=None,
    rng=None,
) -> tuple[ManifoldPoint, RunTrace]:
    """Recursive variance-reduced descent for smooth nonconvex objectives.

    Every ``q``-th step re-anchors the gradient surrogate (full gradient when
    ``S1 >= n`` in finite-sum mode, an S1-sample mean otherwise); the other
    steps apply a transported paired-minibatch correction whose size adapts
    to the squared length of the previous step. Returns a uniformly random
    iterate from the produced sequence (seeded) plus the run trace.

    ``on_correction``, when given, receives a :class:`FrozenState` right
    before each correction step is sampled.
    """
    x_rand, _x_last, info, tracer = _spider_core(
        obj,
        x0,
        cfg,
        checkpoint_every=checkpoint_every,
        max_ifo=max_ifo,
        on_correction=on_correction,
        rng=rng,
    )
    meta = {
        "algo": "spider",
        "config": asdict(cfg),
        "seed": cfg.seed,
        "n": obj.n,
        "ifo_convention": cfg.ifo_convention,
        "checkpoint_every": tracer.every,
        **info,
    }
    return x_rand, RunTrace(records=tracer.records, meta=meta)


def params_stochastic(sigma_sq, eps, M, L, **kwargs) -> SpiderConfig:
    """Sample-only schedule: S1 = ceil(2 sigma^2/eps^2), eta = 1/(2L),
    q = ceil(1/eps), T = ceil(4 M L / eps^2)."""
    if sigma_sq < 0 or eps <= 0 or M <= 0 or L <= 0:
        raise ValueError("need sigma_sq >= 0 and positive eps, M, L")
    s1 = _ceil_tol(2.0 * sigma_sq / eps**2)
    if s1 < 1:
        warnings.warn("anchor batch size 0 (zero variance); clamping to 1")
        s1 = 1
    return SpiderConfig(
        L=L,
        eps=eps,
        q=max(1, _ceil_tol(1.0 / eps)),
        S1=s1,
        T=_ceil_tol(4.0 * M * L / eps**2),
        eta=1.0 / (2.0 * L),
        n=None,
        **kwargs,
    )


def params_finite(n, eps, M, L, **kwargs) -> SpiderConfig:
    """Finite-sum schedule: full-gradient anchors, q = ceil(sqrt(n)),
    eta = 1/(2L), T = ceil(4 M L / eps^2)."""
    if n < 1 or eps <= 0 or M <= 0 or L <= 0:
        raise ValueError("need n >= 1 and positive eps, M, L")
    return SpiderConfig(
        L=L,
        eps=eps,
        q=max(1, _ceil_tol(math.sqrt(n))),
        S1=int(n),
        T=_ceil_tol(4.0 * M * L / eps**2),
        eta=1.0 / (2.0 * L),
        n=int(n),
        **kwargs,
    )


def spider_gd1(
    obj: FiniteSumObjective,
    x0: ManifoldPoint,
    cfg: GdConfig,
    *,
    checkpoint_every: float = 1.0,
    max_ifo: int | None = None,
    rng=None,
) -> tuple[ManifoldPoint, RunTrace]:
    """Restarted solver: stage t runs the nonconvex solver to accuracy
    eps_t = sqrt(M0 / (2^t * 10 tau)) and chains its output.

    Stage budgets follow the halved gap bound M_t = M0 / 2^(t-1), giving
    T_t = ceil(4 M_t L / eps_t^2) inner iterations. The trace concatenates
    stage traces; stage boundaries are recorded in ``meta["stages"]``.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    tracer = _Tracer(obj, checkpoint_every)
    n = obj.n
    x = x0
    k_off = 0
    stages = []
    tracer.after_step(0, x0, 0.0, 0)
    for t in range(1, cfg.K + 1):
        if max_ifo is not None and obj.counter.calls >= max_ifo:
            break
        eps_t = math.sqrt(cfg.M0 / (2.0**t * 10.0 * cfg.tau))
        m_t = cfg.M0 / 2.0 ** (t - 1)
        t_t = _ceil_tol(4.0 * m_t * cfg.L / eps_t**2)
        eta_t = 1.0 / (2.0 * cfg.L) if cfg.eta_mode == "constant" else eps_t / cfg.L
        inner = SpiderConfig(
            L=cfg.L,
            eps=eps_t,
            q=max(1, _ceil_tol(math.sqrt(n))),
            S1=n,
            T=t_t,
            eta=eta_t,
            n=n,
            map_mode=cfg.map_mode,
            seed=cfg.seed,
            ifo_convention=cfg.ifo_convention,
        )
        x_rand, x_last, info, _ = _spider_core(
            obj,
            x,
            inner,
            max_ifo=max_ifo,
            rng=rng,
            tracer=tracer,
            k_offset=k_off,
        )
        x = x_rand if cfg.chain == "random" else x_last
        k_off += info["steps"]
        stages.append(
            {
                "stage": t,
                "eps": eps_t,
                "eta": eta_t,
                "T": t_t,
                "steps": info["steps"],
                "ifo_end": obj.counter.calls,
            }
        )
    tracer.final(k_off, x, 0.0, 0)
    meta = {
        "algo": "spider-gd1",
        "config": asdict(cfg),
        "seed": cfg.seed,
        "n": n,
        "ifo_convention": cfg.ifo_convention,
        "checkpoint_every": tracer.every,
        "stages": stages,
        "ifo": obj.counter.calls,
    }
    return x, RunTrace(records=tracer.records, meta=meta)


def spider_gd2(
    obj: FiniteSumObjective,
    x0: ManifoldPoint,
    cfg: GdConfig,
    *,
    checkpoint_every: float = 1.0,
    max_ifo: int | None = None,
    on_correction=None,
    rng=None,
) -> tuple[ManifoldPoint, RunTrace]:
    """Single-loop variant for gradient-dominated objectives.

    Runs q*K steps with q = ceil(4 L tau log 4) and step 1/(2L). Full-gradient
    anchors every q steps halve the variance budget ``delta`` (initially
    M0 / (4 tau)); correction batches are sized by
    ceil(min(n, q L^2 (step length)^2 / delta)). Returns the final iterate.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    man = obj.manifold
    n = obj.n
    q = max(1, _ceil_tol(4.0 * cfg.L * cfg.tau * math.log(4.0)))
    delta = cfg.M0 / (4.0 * cfg.tau)
    eta = 1.0 / (2.0 * cfg.L)
    tracer = _Tracer(obj, checkpoint_every)
    tallies = {"anchor": 0, "correction": 0}

    x = x0
    x_prev = None
    v = None
    step_len = 0.0
    batch = 0
    total = q * cfg.K
    done = 0
    if total >= 1:
        tracer.after_step(0, x0, 0.0, 0)
    for k in range(total):
        if max_ifo is not None and obj.counter.calls >= max_ifo:
            break
        if k % q == 0:
            v = obj.full_rgrad(x)
            batch = n
            tallies["anchor"] += n
            if k > 0:
                delta /= 2.0
        else:
            s2 = max(1, _ceil_tol(min(float(n), q * cfg.L**2 * step_len**2 / delta)))
            if on_correction is not None:
                on_correction(FrozenState(k, x_prev, x, v, s2, math.sqrt(delta)))
            if s2 >= n:
                g_new, g_old = _paired_full(obj, x, x_prev, cfg.ifo_convention)
                batch = n
            else:
                idx = rng.integers(0, n, size=s2)
                g_new, g_old = _paired_minibatch(obj, idx, x, x_prev, cfg.ifo_convention)
                batch = s2
            tallies["correction"] += 2 * batch if cfg.ifo_convention == "paired" else batch
            try:
                v = g_new - man.transport(x_prev, x, g_old - v)
            except (AntipodalError, GeometryError) as e:
                raise OptimizerError(f"transport failed at iteration {k}: {e}") from e
        x_next, step_len = _update(man, x, v, eta, cfg.map_mode, k)
        x_prev = x
        x = x_next
        done = k + 1
        tracer.after_step(done, x, step_len, batch)
    tracer.final(done, x, step_len, batch)
    meta = {
        "algo": "spider-gd2",
        "config": asdict(cfg),
        "seed": cfg.seed,
        "n": n,
        "q": q,
        "delta0": cfg.M0 / (4.0 * cfg.tau),
        "ifo_convention": cfg.ifo_convention,
        "checkpoint_every": tracer.every,
        "ifo": obj.counter.calls,
        "ifo_breakdown": tallies,
    }
    return x, RunTrace(records=tracer.records, meta=meta)


def rsgd(
    obj: FiniteSumObjective,
    x0: ManifoldPoint,
    eta,
    T: int,
    seed: int = 0,
    *,
    map_mode: str = "exp",
    checkpoint_every: float = 1.0,
    max_ifo: int | None = None,
) -> tuple[ManifoldPoint, RunTrace]:
    """Baseline stochastic gradient descent: one sampled component per step.

    ``eta`` is a constant or a callable k -> step size.
    """
    if map_mode not in MAP_MODES:
        raise ValueError(f"map_mode must be one of {MAP_MODES}")
    eta_fn = eta if callable(eta) else (lambda k: eta)
    rng = np.random.default_rng(seed)
    man = obj.manifold
    tracer = _Tracer(obj, checkpoint_every)
    x = x0
    step_len = 0.0
    done = 0
    if T >= 1:
        tracer.after_step(0, x0, 0.0, 0)
    for k in range(T):
        if max_ifo is not None and obj.counter.calls >= max_ifo:
            break
        i = int(rng.integers(0, obj.n))
        g = obj.minibatch_rgrad([i], x)
        x, step_len = _update(man, x, g, float(eta_fn(k)), map_mode, k)
        done = k + 1
        tracer.after_step(done, x, step_len, 1)
    tracer.final(done, x, step_len, 0 if done == 0 else 1)
    meta = {
        "algo": "rsgd",
        "config": {"eta": eta if not callable(eta) else repr(eta), "T": T},
        "seed": seed,
        "n": obj.n,
        "map_mode": map_mode,
        "checkpoint_every": tracer.every,
        "ifo": obj.counter.calls,
    }
    return x, RunTrace(records=tracer.records, meta=meta)


def rsvrg(
    obj: FiniteSumObjective,
    x0: ManifoldPoint,
    eta: float,
    epochs: int,
    inner_len: int | None = None,
    *,
    map_mode: str = "exp",
    seed: int = 0,
    checkpoint_every: float = 1.0,
    max_ifo: int | None = None,
    ifo_convention: str = "paired",
) -> tuple[ManifoldPoint, RunTrace]:
    """Snapshot-based variance reduction.

    Each outer epoch takes a full gradient at a snapshot point, then runs
    ``inner_len`` single-sample steps whose estimator subtracts the
    transported snapshot correction. In "retract" mode the update is the
    normalization (x + v)/|x + v|, the classical power-method-flavored
    approximation of the exponential update.
    """
    if map_mode not in MAP_MODES:
        raise ValueError(f"map_mode must be one of {MAP_MODES}")
    if ifo_convention not in IFO_CONVENTIONS:
        raise ValueError(f"ifo_convention must be one of {IFO_CONVENTIONS}")
    m = obj.n if inner_len is None else int(inner_len)
    if m < 1:
        raise ValueError("inner loop length must be >= 1")
    rng = np.random.default_rng(seed)
    man = obj.manifold
    tracer = _Tracer(obj, checkpoint_every)
    x = x0
    step_len = 0.0
    k_global = 0
    stopped = False
    if epochs >= 1:
        tracer.after_step(0, x0, 0.0, 0)
    for _s in range(epochs):
        if stopped or (max_ifo is not None and obj.counter.calls >= max_ifo):
            break
        x_snap = x
        mu = obj.full_rgrad(x_snap)
        tracer.after_step(k_global, x, 0.0, obj.n)
        for _j in range(m):
            if max_ifo is not None and obj.counter.calls >= max_ifo:
                stopped = True
                break
            i = int(rng.integers(0, obj.n))
            g_new = obj.component_rgrad(i, x)
            if ifo_convention == "paired":
                g_old = obj.component_rgrad(i, x_snap)
            else:
                with obj.counter.paused():
                    g_old = obj.component_rgrad(i, x_snap)
            try:
                v = g_new - man.transport(x_snap, x, g_old - mu)
            except (AntipodalError, GeometryError) as e:
                raise OptimizerError(
                    f"transport failed at inner step {k_global}: {e}"
                ) from e
            x, step_len = _update(man, x, v, eta, map_mode, k_global)
            k_global += 1
            tracer.after_step(k_global, x, step_len, 1)
    tracer.final(k_global, x, step_len, 1 if k_global else 0)
    meta = {
        "algo": "rsvrg",
        "config": {
            "eta": eta,
            "epochs": epochs,
            "inner_len": m,
            "map_mode": map_mode,
        },
        "seed": seed,
        "n": obj.n,
        "ifo_convention": ifo_convention,
        "checkpoint_every": tracer.every,
        "ifo": obj.counter.calls,
    }
    return x, RunTrace(records=tracer.records, meta=meta)
