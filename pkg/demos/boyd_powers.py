"""Powers of the Boyd averaging operator, three ways.

P_α f(x) = ∫_0^1 u^{-α} f(u x) du. Its l-th power is again an averaging
operator with kernel (log 1/u)^{l-1} u^{-α} / (l-1)!. This script obtains
that kernel by composing the operator, by convolving log kernels and by
raising the symbol to the l-th power, then compares all three.

Run: python3 demos/boyd_powers.py
"""

import math

import numpy as np

from hausdorff import (
    Grid,
    HoloFunctionSpec,
    SampledFunction,
    OperatorSpec,
    apply,
    apply_iterated,
    boyd_power_kernel,
    boyd_symbol,
    holomorphic_kernel,
    preset,
    product_kernel,
    rel_l2,
    scalar_symbol,
)

alpha, l = 0.25, 2
base = OperatorSpec(*preset("boyd", alpha=alpha))
print(f"P_alpha with alpha = {alpha}: admissibility bound {base.admissibility.bound:.6f}")

# symbol: 1/((1/2 - α) - is)
s = Grid.uniform(-5, 5, 11)
phi = scalar_symbol(base, s)
print("max |phi - closed form| on s in [-5, 5]:",
      f"{np.max(np.abs(phi.values - boyd_symbol(alpha, s.axes[0].points))):.2e}")

# the kernel of P^2 from the symbol pipeline and from a log-kernel convolution
closed = boyd_power_kernel(alpha, l)
by_symbol = holomorphic_kernel(base, HoloFunctionSpec.power(l))
by_product = product_kernel(base, base)
u = np.array([0.05, 0.2, math.exp(-1), 0.8])
print("\n     u    closed form   z^2 pipeline   convolution")
for uu, a, b, c in zip(u, closed(u), by_symbol(u).real, by_product(u).real):
    print(f"{uu:6.3f}  {a:12.8f}  {b:12.8f}  {c:12.8f}")

# the same operator by brute force: P(P f) against one application of the power kernel
x = Grid.uniform(-10, 10, 2001)
gauss = SampledFunction.from_callable(x, lambda t: np.exp(-0.5 * (t - 1.0) ** 2))
twice = apply_iterated(base, l, gauss)
once = apply(OperatorSpec(closed, base.family), gauss)
print(f"\nrel-L2(P(P f), P^2 f) on a Gaussian: {rel_l2(twice, once):.2e}")
