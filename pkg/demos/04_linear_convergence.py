#!/usr/bin/env python3
"""Linear convergence on gradient-dominated objectives.

The leading-eigenvector objective satisfies a domination inequality
f(x) - f* <= tau |grad f(x)|^2 near the optimum, so the restarted solvers
halve the optimality gap per stage. Both variants are compared against the
2^-K guarantee, with their oracle bills.
"""

import numpy as np

import rspider as r
from rspider.optim import GdConfig, spider_gd1, spider_gd2

P = r.generate_gap_matrix(r.SyntheticSpec(d=20, n=200, delta=0.5, seed=7))
f_star = P.f_star

tau = r.pl_constant_estimate(P, f_star, 128, seed=0).statistic
print(f"estimated domination constant tau = {tau:.4f} "
      f"(gap delta = 0.5 suggests ~1/(2 delta) = 1.0)")

x0 = P.manifold.random_point(np.random.default_rng(3))
M0 = P.value(x0) - f_star
K = 5
print(f"initial gap M0 = {M0:.4f}, stages K = {K}, guarantee 2^-K M0 = {2.0**-K * M0:.5f}\n")

for name, runner in (("stage-restarted", spider_gd1), ("single-loop", spider_gd2)):
    P.counter.reset()
    cfg = GdConfig(M0=M0, tau=tau, L=P.L_hint, K=K, seed=1)
    x, trace = runner(P, x0, cfg)
    gap = P.value(x) - f_star
    print(f"{name:>16}: final gap {gap:.3e}  (<= guarantee: {gap <= 2.0**-K * M0})"
          f"  oracle calls {P.counter.calls}")
    if name == "single-loop":
        bound = K * (P.n + 100 * P.L_hint**2 * tau**2)
        print(f"{'':>16}  call bound K(n + 100 L^2 tau^2) = {bound:.0f}")

# gap halving stage by stage (variance budget halves at every anchor)
P.counter.reset()
cfg = GdConfig(M0=M0, tau=tau, L=P.L_hint, K=K, seed=1)
_, trace = spider_gd2(P, x0, cfg, checkpoint_every=trace.meta["q"] / P.n)
print("\nsingle-loop trajectory (one line per epoch of q steps):")
seen = set()
for rec in trace.records:
    epoch_idx = rec.k // trace.meta["q"]
    if epoch_idx not in seen and rec.k % trace.meta["q"] == 0:
        seen.add(epoch_idx)
        print(f"  after {epoch_idx} epochs: gap = {rec.f - f_star:.3e} "
              f"(guarantee {2.0**-epoch_idx * M0:.3e})")
