"""Composite Gauss-Legendre rules in logarithmic coordinates.

Integrals over ``u ∈ ℝⁿ`` are split by the sign pattern of ``u`` and each
coordinate is written as ``u_k = σ_k exp(v_k)`` so that ``du = Π|u_k| dv``.
The ``v`` range ``[-T, T]`` is cut into panels whose ends include the
images of the kernel breakpoints, so piecewise-smooth kernels are
integrated at full Gauss-Legendre order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = ["QuadratureConfig", "gauss_legendre", "panel_rule", "log_rule"]


@dataclass(frozen=True)
class QuadratureConfig:
    """Settings of the log-coordinate rule.

    truncation : |log|u_k|| is cut at this value (u ∈ [e^-T, e^T]).
    panel_width : nominal panel length in log coordinates.
    order : Gauss-Legendre nodes per panel.
    """

    truncation: float = 30.0
    panel_width: float = 0.5
    order: int = 16

    def __post_init__(self):
        if not (self.truncation > 0 and self.panel_width > 0 and self.order >= 1):
            raise ValueError("quadrature settings must be positive")

    def with_truncation(self, T: float) -> "QuadratureConfig":
        return QuadratureConfig(T, self.panel_width, self.order)


@lru_cache(maxsize=32)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(lo: float, hi: float, breaks, width: float, order: int):
    """Composite rule on [lo, hi] with panel ends at every break inside."""
    if not hi > lo:
        return np.empty(0), np.empty(0)
    cuts = sorted({lo, hi, *(b for b in breaks if lo < b < hi)})
    x0, w0 = gauss_legendre(order)
    xs, ws = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        m = max(1, math.ceil((b - a) / width - 1e-9))
        edges = np.linspace(a, b, m + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        xs.append((mid[:, None] + half[:, None] * x0[None, :]).ravel())
        ws.append((half[:, None] * w0[None, :]).ravel())
    return np.concatenate(xs), np.concatenate(ws)


def _axis_rule(lo, hi, sign, breaks, cfg: QuadratureConfig):
    """Rule for u = sign·e^v restricted to u ∈ (lo, hi); returns (u, w)."""
    T = cfg.truncation
    if sign > 0:
        a, b = max(lo, 0.0), hi
    else:
        a, b = max(-hi, 0.0), -lo
    if not b > a:
        return None
    va = -T if a <= math.exp(-T) else math.log(a)
    vb = T if b >= math.exp(T) else math.log(b)
    if not vb > va:
        return None
    vbreaks = [math.log(sign * p) for p in breaks if sign * p > 0]
    v, w = panel_rule(va, vb, vbreaks, cfg.panel_width, cfg.order)
    ev = np.exp(v)
    return sign * ev, w * ev


def log_rule(box, breaks, cfg: QuadratureConfig):
    """Tensor rules for each sign pattern of u.

    Parameters
    ----------
    box : per-axis ``(lo, hi)`` interval containing the integrand's support.
    breaks : per-axis iterable of u-values where the integrand has kinks.

    Returns
    -------
    list of ``(sign, u, w)`` with ``u`` of shape ``(N, n)`` and weights ``w``
    that already include the ``Π|u_k|`` Jacobian.
    """
    n = len(box)
    out = []
    for sign in itertools.product((1, -1), repeat=n):
        rules = []
        for k in range(n):
            r = _axis_rule(box[k][0], box[k][1], sign[k], breaks[k], cfg)
            if r is None:
                break
            rules.append(r)
        else:
            if n == 1:
                u, w = rules[0]
                out.append((sign, u[:, None], w))
            else:
                mesh_u = np.meshgrid(*[r[0] for r in rules], indexing="ij")
                mesh_w = np.meshgrid(*[r[1] for r in rules], indexing="ij")
                u = np.stack([m.ravel() for m in mesh_u], axis=-1)
                w = np.prod([m.ravel() for m in mesh_w], axis=0)
                out.append((sign, u, w))
    return out
