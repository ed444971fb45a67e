"""The map is a second-order integrator of the underlying flow.

Halving the step size should cut the endpoint error by a factor of four.
This script measures endpoint errors against a high-accuracy reference
integration and prints the observed orders, for the built-in family and for
a plain linear rotation (where the map reduces to the implicit midpoint
rule).
"""

import math

from kahan2d import (
    Mat2,
    Point2,
    QuadraticField2,
    QuarticParams,
    StepConfig,
    build_quartic,
    reference_flow,
    step,
)


def endpoint_errors(field, p0, T, h_list):
    ref = reference_flow(field, p0, T, 1e-12)
    errors = []
    for h in h_list:
        p = p0
        cfg = StepConfig(h)
        for _ in range(round(T / h)):
            p = step(field, cfg, p)
        errors.append(p.dist(ref))
    return errors


h_list = (1 / 64, 1 / 128, 1 / 256)

print("quartic family, start (1, 1), horizon T = 0.5:")
field = build_quartic(QuarticParams(1, 0, 1, 0, 1)).field
errs = endpoint_errors(field, Point2(1.0, 1.0), 0.5, h_list)
for h, e in zip(h_list, errs):
    print(f"  h = {h:<10.6g} endpoint error = {e:.3e}")
orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
print(f"  observed orders between consecutive levels: "
      f"{', '.join(f'{o:.4f}' for o in orders)}")

print()
print("linear rotation (xdot = y, ydot = -x), start (1, 0), horizon pi:")
rotation = QuadraticField2(
    quad=(Mat2.zero(), Mat2.zero()), lin=Mat2(0.0, 1.0, -1.0, 0.0)
)
errs = endpoint_errors(rotation, Point2(1.0, 0.0), math.pi, (math.pi / 64, math.pi / 128, math.pi / 256))
orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
print(f"  endpoint errors: {', '.join(f'{e:.3e}' for e in errs)}")
print(f"  observed orders: {', '.join(f'{o:.4f}' for o in orders)}")
