"""The three quasiconvexity conditions as signed margins.

(a) segment inequality:
      f(lam*x + (1-lam)*y) <= max{f(x), f(y)} - (sigma/2)*lam*(1-lam)*||x-y||^2
(b) if f(x) <= f(y) then <grad f(y), x-y> <= -(sigma/2)*||x-y||^2
(c) if <grad f(x), y-x> > -(sigma/2)*||x-y||^2, same conclusion as (b)

A negative margin means the condition fails at that witness. sigma = 0 is
plain quasiconvexity; sigma > 0 the strong form.

Run: python3 demos/conditions_walkthrough.py
"""

import numpy as np

from quasicheck.conditions import CheckConfig, check_b, check_c, margin_a
from quasicheck.field import catalog_field

# ||x||^2 is 2-strongly quasiconvex: all margins stay nonnegative at sigma=2
f = catalog_field("sqnorm", 2)
cfg = CheckConfig(sigma=2.0)
x, y = np.array([-0.5, 0.6]), np.array([0.8, -0.3])  # f(x) <= f(y)
print(f"{f.name} at sigma=2")
print(f"  (a) margin at lam=0.5: {margin_a(f, x, y, 0.5, cfg):+.6f}")
print(f"  (b) {check_b(f, x, y, cfg).status}, "
      f"margin {check_b(f, x, y, cfg).margin:+.6f}")
print(f"  (c) {check_c(f, x, y, cfg).status}, "
      f"margin {check_c(f, x, y, cfg).margin:+.6f}")

# sin on [0, 2pi] is not quasiconvex: the interior max between
# x = 0 and y = pi gives margin sin(0) - sin(pi/2) = -1
f = catalog_field("sin", 1)
cfg = CheckConfig(sigma=0.0)
x, y = np.array([0.0]), np.array([np.pi])
print(f"\n{f.name} at sigma=0")
print(f"  (a) margin at lam=0.5: {margin_a(f, x, y, 0.5, cfg):+.6f}  "
      "(negative: quasiconvexity fails)")

# a vacuous verdict: the premise of (b) does not hold, so the
# implication is trivially true at this pair
f = catalog_field("affine", 2)
v = check_b(f, np.array([0.9, 0.9]), np.array([-0.9, -0.9]), cfg)
print(f"\n{f.name}: f(x) > f(y) makes (b) {v.status} at this pair")
