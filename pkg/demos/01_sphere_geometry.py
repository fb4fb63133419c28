#!/usr/bin/env python3
"""Tour of the geodesic primitives on the unit sphere.

Walks a point along a geodesic, brings it back with the logarithm, moves
tangent vectors around with parallel transport, and compares the cheap
normalization retraction against the exact exponential map.
"""

import math

import numpy as np

from rspider import Sphere

sphere = Sphere(3)
rng = np.random.default_rng(0)

x = sphere.random_point(rng)
v = sphere.random_tangent(x, rng, scale=0.8)
print(f"start point        x = {np.round(x.coords, 4)}")
print(f"tangent direction  v = {np.round(v.coords, 4)}  (|v| = {v.norm():.4f})")

# travel along the geodesic and invert the trip
y = sphere.exp(x, v)
w = sphere.log(x, y)
print(f"\nexp_x(v)           y = {np.round(y.coords, 4)}")
print(f"geodesic distance  d(x, y) = {sphere.dist(x, y):.6f}  (equals |v|)")
print(f"log round trip     |log(x, exp(x, v)) - v| = {np.linalg.norm(w.coords - v.coords):.2e}")

# parallel transport preserves the metric
u = sphere.random_tangent(x, rng)
tu = sphere.transport(x, y, u)
tv = sphere.transport(x, y, v)
print("\nparallel transport x -> y:")
print(f"  <u, v> at x = {sphere.inner(u, v):+.6f}")
print(f"  <Gu, Gv> at y = {sphere.inner(tu, tv):+.6f}   (isometry)")
print(f"  transported log vs reversed log: "
      f"{np.linalg.norm(sphere.transport(x, y, sphere.log(x, y)).coords + sphere.log(y, x).coords):.2e}")

# the normalization retraction is a second-order approximation of exp
print("\nretraction (x + v)/|x + v| versus the exponential map:")
print(f"{'|v|':>8}  {'dist(retract, exp)':>20}  {'ratio to |v|^2':>16}")
for s in (0.4, 0.2, 0.1, 0.05):
    vs = sphere.tangent(x, s * v.coords / v.norm())
    gap = sphere.dist(sphere.retract(x, vs), sphere.exp(x, vs))
    print(f"{s:8.2f}  {gap:20.3e}  {gap / s**2:16.3e}")
print("the ratio stays bounded: the retraction error is (at worst) quadratic")
