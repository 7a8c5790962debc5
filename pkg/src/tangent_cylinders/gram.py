"""Gram-determinant polynomials P and Q for pairs of lines.

For ``x = (a, b)`` and ``y = (c, d)`` with offset ``w = b - d``::

    Q = det [[1+|a|^2, 1+a.c], [1+c.a, 1+|c|^2]]
    P = det [[|w|^2, w.a, w.c], [a.w, 1+|a|^2, 1+a.c], [c.w, 1+c.a, 1+|c|^2]]

and ``dist(L_x, L_y)^2 = P / Q``.  The 3x3 determinant is expanded along its
first row and regrouped as ``|w|^2 Q + 2 B (w.a)(w.c) - (C (w.a)^2 + A (w.c)^2)``
so that swapping the arguments reproduces every floating-point operation
(the result is bit-for-bit symmetric).

Every function here broadcasts over leading axes, so stacks of pairs can
be evaluated at once.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

#: Relative threshold below which Q counts as zero (parallel lines).
PARALLEL_EPS = 1e-12


def _dot(u, v):
    return np.sum(u * v, axis=-1)


class PairTerms(NamedTuple):
    A: np.ndarray  # 1 + |a|^2
    B: np.ndarray  # 1 + a.c
    C: np.ndarray  # 1 + |c|^2
    w: np.ndarray  # b - d
    W: np.ndarray  # |w|^2
    alpha: np.ndarray  # w.a
    gamma: np.ndarray  # w.c
    Q: np.ndarray
    P: np.ndarray


def pair_terms(a, b, c, d) -> PairTerms:
    a, b, c, d = (np.asarray(v, dtype=float) for v in (a, b, c, d))
    if not (a.shape[-1] == b.shape[-1] == c.shape[-1] == d.shape[-1]):
        raise ValueError(
            f"dimension mismatch: a={a.shape[-1]}, b={b.shape[-1]}, c={c.shape[-1]}, d={d.shape[-1]}"
        )
    A = 1.0 + _dot(a, a)
    C = 1.0 + _dot(c, c)
    B = 1.0 + _dot(a, c)
    w = b - d
    W = _dot(w, w)
    alpha = _dot(w, a)
    gamma = _dot(w, c)
    Q = A * C - B * B
    P = W * Q + 2.0 * B * (alpha * gamma) - (C * alpha * alpha + A * gamma * gamma)
    return PairTerms(A, B, C, w, W, alpha, gamma, Q, P)


def gram_Q_arrays(a, c):
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    if a.shape[-1] != c.shape[-1]:
        raise ValueError(f"dimension mismatch: {a.shape[-1]} != {c.shape[-1]}")
    A = 1.0 + _dot(a, a)
    C = 1.0 + _dot(c, c)
    B = 1.0 + _dot(a, c)
    return A * C - B * B


def parallel_scale(A, C):
    """Scale against which Q is compared: ``(1+|a|^2)(1+|c|^2)``."""
    return A * C


def is_parallel_terms(t: PairTerms, eps: float = PARALLEL_EPS):
    return t.Q < eps * parallel_scale(t.A, t.C)


def gram_P(x, y) -> float:
    """P(x, y) for two ``LineParam`` objects."""
    return float(pair_terms(x.a, x.b, y.a, y.b).P)


def gram_Q(x, y) -> float:
    """Q(x, y) for two ``LineParam`` objects; zero exactly when the slopes agree."""
    return float(gram_Q_arrays(x.a, y.a))
