"""Matrix symbols when the dilations change sign.

With A(u) = u and K supported on (-1, 0) the operator maps the positive
half-line onto the negative one and back, so its 2×2 symbol is purely
off-diagonal. A two-dimensional diagonal family has a 4×4 symbol indexed
by quadrants (1: ++, 2: -+, 3: +-, 4: --).

Run: python3 demos/matrix_symbols.py
"""

import numpy as np

from hausdorff import Grid, OperatorSpec, matrix_symbol, preset, symbol_norm

s = Grid.uniform(-2, 2, 5)
phi = matrix_symbol(OperatorSpec(*preset("neg-box")), s)
print("neg-box, Phi(0):")
print(np.round(phi.as_array()[2], 10))
print("symmetric:", phi.is_symmetric(), " norm:", round(symbol_norm(phi), 10))

ax = Grid.uniform(-3, 3, 7).axes[0]
phi2 = matrix_symbol(OperatorSpec(*preset("dilation-diag-2d")), Grid((ax, ax)))
print("\ndilation-diag-2d, |Phi(0, 0)|:")
print(np.round(np.abs(phi2.as_array()[3, 3]), 6))
print("symmetric:", phi2.is_symmetric(), " norm:", round(symbol_norm(phi2), 6))
