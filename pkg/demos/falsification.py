"""Adversarial falsification: multi-start compass search that minimizes a
condition's signed margin over the box. A negative best margin is a
confirmed violation witness; a nonnegative one is only evidence.

Run: python3 demos/falsification.py
"""

from quasicheck.conditions import CheckConfig, margin_a
from quasicheck.field import catalog_field
from quasicheck.search import Sampler, SearchBudget, falsify, implication_harness

budget = SearchBudget(max_evals=10_000)

# sin on [0, 2pi]: the search drives the (a) margin to the global optimum -1
f = catalog_field("sin", 1)
res = falsify(f, "a", CheckConfig(), budget, seed=3)
w = res.witness
print(f"sin, target (a): best margin {res.best_margin:+.4f} "
      f"after {res.evaluations} evaluations")
print(f"  witness x={w.x[0]:.4f} y={w.y[0]:.4f} lam={w.lam:.4f}")
print(f"  recomputed margin: "
      f"{margin_a(f, w.x, w.y, w.lam, CheckConfig()):+.4f}")

# x^3 - x on [-2, 2]: a first-order (b) violation
f = catalog_field("cubic_minus_x", 1)
res = falsify(f, "b", CheckConfig(), budget, seed=3)
print(f"\ncubic_minus_x, target (b): best margin {res.best_margin:+.4f}")

# the same field under the bulk harness: counts per condition over
# seeded pairs, worst witnesses attached
rep = implication_harness(f, CheckConfig(),
                          Sampler("uniform_box", 7, 20_000, f.domain))
print(f"\nharness over {rep.sample_count} pairs:")
for cond_name in ("a", "b", "c"):
    print(f"  ({cond_name}) {rep.counts[cond_name]}")

# no violation on a field that is quasiconvex at the tested sigma
f = catalog_field("sqnorm", 2)
res = falsify(f, "a", CheckConfig(sigma=2.0), budget, seed=3)
print(f"\nsqnorm at sigma=2, target (a): best margin {res.best_margin:+.2e} "
      f"(no violation found)")
