"""Shared 1d Gauss rules and node sets.

All rules are returned on [0, 1] (or a mapped interval) and cached; the
returned arrays are read-only so cached instances can be shared freely.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np


def _freeze(*arrays):
    for a in arrays:
        a.flags.writeable = False
    return arrays


@lru_cache(maxsize=None)
def gauss_legendre_01(n: int):
    """n-point Gauss-Legendre rule on [0, 1], exact through degree 2n-1."""
    if n < 1:
        raise ValueError(f"need at least one quadrature point, got {n}")
    x, w = np.polynomial.legendre.leggauss(n)
    return _freeze(0.5 * (x + 1.0), 0.5 * w)


def gauss_legendre(a: float, b: float, n: int):
    """n-point Gauss-Legendre rule on [a, b]."""
    x, w = gauss_legendre_01(n)
    return a + (b - a) * x, (b - a) * w


@lru_cache(maxsize=None)
def tensor_square_01(n: int):
    """Tensor-product Gauss rule with n*n points on the unit square."""
    x, w = gauss_legendre_01(n)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    ww = np.outer(w, w)
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    return _freeze(pts, ww.ravel())


@lru_cache(maxsize=None)
def gauss_lobatto_01(degree: int):
    """The degree+1 Gauss-Lobatto points on [0, 1] (both endpoints included)."""
    if degree < 1:
        raise ValueError(f"Lobatto node set needs degree >= 1, got {degree}")
    if degree == 1:
        nodes = np.array([0.0, 1.0])
    else:
        # interior points are the roots of P_degree' on [-1, 1]
        leg = np.polynomial.legendre.Legendre.basis(degree)
        interior = leg.deriv().roots()
        nodes = np.concatenate([[-1.0], np.sort(interior.real), [1.0]])
        nodes = 0.5 * (nodes + 1.0)
    return _freeze(nodes)[0]


def points_for_degree(degree: int) -> int:
    """Number of Gauss points needed per axis to integrate the given degree."""
    return max(1, (degree + 2) // 2)
