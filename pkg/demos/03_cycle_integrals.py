#!/usr/bin/env python3
"""Cycle integrals over circle actions on the Sasaki-Einstein family.

Integrates the degree-5 Wodzicki-Chern-Simons form over the cycle induced by
the fiber rotation on the (7,3) member, demonstrating:

* the trivial action integrates to exactly zero;
* the fiber rotation gives a nonzero rational multiple of pi^4
  (-432/6125 under this package's conventions; see README.md for the
  detailed comparison against the historically reported value);
* the n-fold iterate scales the integral exactly by n;
* the result is bit-reproducible across worker counts;
* quadrature refinement stays within the reported error estimate.
"""
import math

from loopcs import metrics
from loopcs.cycles import CircleAction, integrate_cycle
from loopcs.quadrature import QuadratureSpec
from loopcs.records import result_to_json

checks = []


def audit(name, ok, detail=""):
    checks.append(ok)
    print(f"{'PASS' if ok else 'FAIL'}  {name:<44} {detail}")


metric = metrics.ypq_metric(metrics.solve_ypq(7, 3))
rotate = CircleAction.rotation(axis=4)  # alpha fiber, one loop per revolution

res0 = integrate_cycle(metric, CircleAction.trivial(), 3)
audit("trivial action integrates to exactly 0", res0.value == 0.0)

res = integrate_cycle(metric, rotate, 3, QuadratureSpec(nodes=32))
print(f"\nfiber rotation: value = {res.value:.12f}")
print(f"  as multiple of pi^4 : {res.pi4_multiple}")
print(f"  error estimate      : {res.error_estimate:.3e}")
print(f"  node counts         : {res.node_counts}")
print(f"  wall time           : {res.wall_time:.2f} s\n")
audit("value snaps to a rational multiple of pi^4", res.pi4_multiple is not None,
      str(res.pi4_multiple))
expected = -432.0 * math.pi**4 / 6125.0
audit("matches the exact closed form -432 pi^4 / 6125",
      abs(res.value - expected) / abs(expected) < 1e-9,
      f"rel err {abs(res.value-expected)/abs(expected):.2e}")

for n in (2, 3):
    resn = integrate_cycle(metric, CircleAction.iterate(rotate, n), 3,
                           QuadratureSpec(nodes=16))
    base = integrate_cycle(metric, rotate, 3, QuadratureSpec(nodes=16))
    audit(f"iterate n={n} scales the integral by {n}",
          abs(resn.value - n * base.value) / abs(n * base.value) < 1e-9,
          f"rel dev {abs(resn.value - n*base.value)/abs(n*base.value):.2e}")

one = integrate_cycle(metric, rotate, 3, QuadratureSpec(nodes=16, workers=1))
two = integrate_cycle(metric, rotate, 3, QuadratureSpec(nodes=16, workers=2))
audit("bit-identical across 1 and 2 workers", one.value == two.value,
      f"{one.value!r} vs {two.value!r}")

# Refinement sanity in the convergent regime (at very high node counts the
# near-boundary conditioning of the degenerate chart sets a ~1e-10 relative
# noise floor, so the comparison uses the low-node levels).
coarse = integrate_cycle(metric, rotate, 3, QuadratureSpec(nodes=8))
doubled = integrate_cycle(metric, rotate, 3, QuadratureSpec(nodes=16))
audit("doubling nodes moves the value less than the error estimate",
      abs(doubled.value - coarse.value) <= coarse.error_estimate,
      f"delta {abs(doubled.value-coarse.value):.2e} vs est {coarse.error_estimate:.2e}")

print("\nserialized record:")
print(result_to_json(res))
print(f"\n{sum(checks)}/{len(checks)} checks passed")
raise SystemExit(0 if all(checks) else 1)
