"""Shared numeric helpers: exact trig at lattice points, composite Gauss rules."""

from functools import lru_cache

import numpy as np


def sinpi(x):
    """sin(pi*x) with exact zeros at integer x.

    Arguments are reduced to [-1/2, 1/2] before calling sin, so sinpi(k)
    is bit-exact 0.0 for every integer k that is exactly representable.
    """
    x = np.asarray(x, dtype=float)
    n = np.round(x)
    r = x - n
    sign = np.where(np.mod(n, 2.0) == 0.0, 1.0, -1.0)
    out = sign * np.sin(np.pi * r)
    return out if out.shape else float(out)


def cospi(x):
    """cos(pi*x) with exact zeros at half-integer x."""
    x = np.asarray(x, dtype=float)
    return sinpi(x + 0.5)


def cispi(x):
    """exp(i*pi*x) built from sinpi/cospi, exact on the lattice."""
    return cospi(x) + 1j * np.asarray(sinpi(x))


@lru_cache(maxsize=128)
def _gauss_base(nodes_per_panel: int):
    return np.polynomial.legendre.leggauss(nodes_per_panel)


def composite_gauss(lo: float, hi: float, panels: int, nodes_per_panel: int = 24):
    """Nodes and weights of a composite Gauss-Legendre rule on [lo, hi]."""
    if hi <= lo:
        raise ValueError("empty quadrature interval")
    x0, w0 = _gauss_base(nodes_per_panel)
    edges = np.linspace(lo, hi, panels + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mids[:, None] + half[:, None] * x0[None, :]).ravel()
    w = (half[:, None] * w0[None, :]).ravel()
    return x, w


def frac(x):
    """Fractional part in [0, 1)."""
    x = np.asarray(x, dtype=float)
    out = x - np.floor(x)
    # floor(1.0 - tiny) rounding can leave exactly 1.0; fold it back
    out = np.where(out >= 1.0, out - 1.0, out)
    return out if out.shape else float(out)


def circle_dist(a, b=0.0):
    """Distance on the unit circle R/Z."""
    d = np.abs(frac(np.asarray(a, dtype=float) - b))
    d = np.minimum(d, 1.0 - d)
    return d if d.shape else float(d)
