"""Gauss-Legendre rules and order-independent accumulation."""

import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def _leggauss(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(order, a=0.0, b=1.0):
    """Nodes and weights of the ``order``-point rule on ``[a, b]``."""
    if order < 1:
        raise ValueError("quadrature order must be positive")
    x, w = _leggauss(int(order))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def tensor_rule(order1, order2, box):
    """Product rule on ``box = ((a1, b1), (a2, b2))``: nodes ``(N, 2)``, weights ``(N,)``."""
    (a1, b1), (a2, b2) = box
    x1, w1 = gauss_legendre(order1, a1, b1)
    x2, w2 = gauss_legendre(order2, a2, b2)
    u = np.stack(np.meshgrid(x1, x2, indexing="ij"), axis=-1).reshape(-1, 2)
    return u, np.outer(w1, w2).ravel()


def accurate_sum(values):
    """Correctly rounded sum; the result does not depend on summation order."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())
