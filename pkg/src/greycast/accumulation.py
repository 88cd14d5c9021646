"""Accumulation operators and their inverses.

Two families are provided:

* classical fractional accumulation, the lower-triangular generalized-binomial
  matrix applied at any real order (negative orders give the exact inverse);
* conformable fractional accumulation (weighted cumulative sums with weights
  ``j**(alpha-1)``) and the conformable fractional difference that inverts it.

Both reduce to plain cumulative sum / plain differencing at order 1, and both
are defined as the identity at order 0. All operators are O(n^2) at worst,
which is plenty for the short series this library targets.
"""

from __future__ import annotations

import math

import numpy as np

CLASSICAL = "classical"
CONFORMABLE = "conformable"
ACCUMULATION_KINDS = (CLASSICAL, CONFORMABLE)


def frac_binomial_coefficient(r: float, i: int) -> float:
    """Generalized binomial coefficient r(r+1)...(r+i-1)/i!.

    Total over all real ``r``; equals 1 at i=0 and 0 for r=0, i>0.
    """
    if i < 0:
        raise ValueError(f"index i={i} must be non-negative")
    out = 1.0
    for j in range(i):
        out *= (r + j) / (j + 1)
    return out


def _binomial_weights(r: float, n: int) -> np.ndarray:
    w = np.empty(n)
    w[0] = 1.0
    for i in range(1, n):
        w[i] = w[i - 1] * (r + i - 1) / i
    return w


def classical_ago(r: float, x) -> np.ndarray:
    """Classical fractional accumulation of order ``r`` (any real).

    y(k) = sum_j binom(r, k-j) x(j); r=1 is the cumulative sum, r=-1 the
    first difference, and orders compose additively.
    """
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("input sequence must be non-empty")
    w = _binomial_weights(r, x.size)
    return np.convolve(x, w)[: x.size]


def cfa(alpha: float, x) -> np.ndarray:
    """Conformable fractional accumulation of order ``alpha`` >= 0.

    For alpha in (0, 1] this is the cumulative sum of x(j)/j**(1-alpha); for
    alpha in (n, n+1] the fractional-part weighting is followed by n further
    plain cumulative sums. Order 0 is the identity.
    """
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("input sequence must be non-empty")
    if alpha < 0:
        raise ValueError(f"accumulation order alpha={alpha} must be >= 0 (use cfd to invert)")
    if alpha == 0:
        return x.copy()
    extra_sums = math.ceil(alpha) - 1  # alpha in (extra_sums, extra_sums + 1]
    frac_exp = math.ceil(alpha) - alpha
    j = np.arange(1, x.size + 1, dtype=float)
    y = np.cumsum(x / j**frac_exp)
    for _ in range(extra_sums):
        y = np.cumsum(y)
    return y


def cfd(alpha: float, x) -> np.ndarray:
    """Conformable fractional difference of order ``alpha`` >= 0.

    Exact left inverse of :func:`cfa` at the same order, with the convention
    x(0) = 0 so the first difference of the first element is the element itself.
    """
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("input sequence must be non-empty")
    if alpha < 0:
        raise ValueError(f"difference order alpha={alpha} must be >= 0")
    if alpha == 0:
        return x.copy()
    n_diffs = math.ceil(alpha)  # one per cumulative sum applied by cfa
    frac_exp = math.ceil(alpha) - alpha
    y = x.copy()
    for _ in range(n_diffs):
        y = np.diff(y, prepend=0.0)
    j = np.arange(1, x.size + 1, dtype=float)
    return y * j**frac_exp


def accumulate(kind: str, order: float, x) -> np.ndarray:
    """Apply the named accumulation family at ``order``."""
    if kind == CLASSICAL:
        return classical_ago(order, x)
    if kind == CONFORMABLE:
        return cfa(order, x)
    raise ValueError(f"unknown accumulation kind {kind!r}; expected one of {ACCUMULATION_KINDS}")


def restore(kind: str, order: float, x) -> np.ndarray:
    """Invert :func:`accumulate` at the same kind and order."""
    if kind == CLASSICAL:
        return classical_ago(-order, x)
    if kind == CONFORMABLE:
        return cfd(order, x)
    raise ValueError(f"unknown accumulation kind {kind!r}; expected one of {ACCUMULATION_KINDS}")
