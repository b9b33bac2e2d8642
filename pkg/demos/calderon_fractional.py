"""The Calderón operator, its spectrum and its square root.

C f(x) = (1/x) ∫_0^x f + ∫_x^∞ f(v)/v dv has the real symbol 1/(s² + 1/4),
so its spectrum is [0, 4]. Real powers C^α are again Hausdorff operators;
their kernels have a closed form in the Macdonald function K_{α-1/2}.

Run: python3 demos/calderon_fractional.py
"""

import math

import numpy as np

from hausdorff import (
    Grid,
    OperatorSpec,
    apply,
    calderon_fractional_kernel,
    fractional_kernel,
    preset,
    rel_l2,
    scalar_symbol,
    spectrum_estimate,
)
from hausdorff.verify import gaussians

cal = OperatorSpec(*preset("calderon"))
phi = scalar_symbol(cal)
est = spectrum_estimate(phi)
print(f"symbol at s = 0: {phi.values[len(phi.values) // 2].real:.12f}")
print(f"spectrum hull:   [{est.interval[0]}, {est.interval[1]:.12f}]")

# C^alpha through the pipeline, against the closed form
u = np.array([0.1, 0.5, math.e, 10.0])
print("\nalpha      u    pipeline     closed form")
for alpha in (0.5, 1.0, 1.5):
    k = fractional_kernel(cal, alpha)
    for uu, a, b in zip(u, k(u).real, calderon_fractional_kernel(alpha, u)):
        print(f"{alpha:5.2f} {uu:6.3f} {a:12.8f} {b:12.8f}")

# semigroup: applying C^{1/2} twice is C
t = Grid.uniform(-40, 40, 8001)
half = OperatorSpec(fractional_kernel(cal, 0.5, t_grid=t), cal.family)
x = Grid.half_line(math.exp(-30), math.exp(30), 2001)
for f in gaussians(x, 2, np.random.default_rng(1)):
    print(f"rel-L2(C^0.5 C^0.5 f, C f) = {rel_l2(apply(half, apply(half, f)), apply(cal, f)):.4e}")
