"""Shared quadrature plumbing: cached Gauss-Legendre rules and panel composition."""
from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=128)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1], cached; n up to a few thousand is fine."""
    if n < 1:
        raise ValueError("need at least one node")
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gl_nodes(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule mapped to [a, b]."""
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def panel_nodes(a: float, b: float, panels: int, per_panel: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre: `panels` equal panels of `per_panel` nodes each."""
    edges = np.linspace(a, b, panels + 1)
    x, w = gauss_legendre(per_panel)
    half = 0.5 * (edges[1] - edges[0])
    mids = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mids[:, None] + half * x[None, :]).ravel()
    weights = np.broadcast_to(half * w, (panels, per_panel)).ravel()
    return nodes, weights
