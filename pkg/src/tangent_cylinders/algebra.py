"""Tangency polynomials F and G, their exact gradients, and pair classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .geometry import _perpendicular_offset, line_distance
from .gram import PARALLEL_EPS, gram_P, gram_Q, pair_terms, parallel_scale
from .model import Cylinder, LineParam

__all__ = [
    "gram_P",
    "gram_Q",
    "tangency_F",
    "tangency_G",
    "PairResidual",
    "residual_with_gradient",
    "pair_gradients",
    "TangencyClass",
    "classify_pair",
]

DEFAULT_TOL = 1e-8


def tangency_F(x: LineParam, y: LineParam) -> float:
    """``P - 4Q``: vanishes on every touching pair of unit cylinders."""
    t = pair_terms(x.a, x.b, y.a, y.b)
    return float(t.P - 4.0 * t.Q)


def tangency_G(w: Cylinder, v: Cylinder) -> float:
    """``P - (r+s)^2 Q`` for cylinders of radii r and s."""
    t = pair_terms(w.line.a, w.line.b, v.line.a, v.line.b)
    rs = w.radius + v.radius
    return float(t.P - rs * rs * t.Q)


def pair_gradients(a, b, c, d, rs):
    """Value and partial derivatives of ``P - rs^2 Q``.

    Broadcasts over leading axes.  Returns ``(value, dQ_term, g_a, g_b, g_c, g_d)``
    where ``dQ_term = Q`` so callers can form ``d/dr = -2 rs Q`` themselves.
    """
    t = pair_terms(a, b, c, d)
    a, c = np.asarray(a, dtype=float), np.asarray(c, dtype=float)
    A, B, C, w, W, al, ga = t.A[..., None], t.B[..., None], t.C[..., None], t.w, t.W[..., None], t.alpha[..., None], t.gamma[..., None]
    Q = t.Q[..., None]
    rs = np.asarray(rs, dtype=float)
    k = (rs * rs)[..., None]

    dQ_da = 2.0 * (a * C - B * c)
    dQ_dc = 2.0 * (c * A - B * a)
    dP_da = W * dQ_da - 2.0 * C * al * w + 2.0 * al * ga * c + 2.0 * B * ga * w - 2.0 * ga * ga * a
    dP_dc = W * dQ_dc - 2.0 * A * ga * w + 2.0 * al * ga * a + 2.0 * B * al * w - 2.0 * al * al * c
    dP_dw = 2.0 * Q * w - 2.0 * C * al * a + 2.0 * B * (ga * a + al * c) - 2.0 * A * ga * c

    value = t.P - (rs * rs) * t.Q
    g_a = dP_da - k * dQ_da
    g_c = dP_dc - k * dQ_dc
    return value, t.Q, g_a, dP_dw, g_c, -dP_dw


@dataclass(frozen=True)
class PairResidual:
    value: float
    gradient_x: np.ndarray
    gradient_y: np.ndarray


def residual_with_gradient(w: Cylinder, v: Cylinder, unit: bool = True) -> PairResidual:
    """F (``unit``) or G together with its gradient in both arguments.

    Gradients are ordered ``(a, b)`` for the first cylinder and ``(c, d)``
    for the second, each followed by the radius partial in the general case.
    """
    rs = 2.0 if unit else w.radius + v.radius
    value, Q, g_a, g_b, g_c, g_d = pair_gradients(w.line.a, w.line.b, v.line.a, v.line.b, rs)
    gx = np.concatenate([g_a, g_b])
    gy = np.concatenate([g_c, g_d])
    if not unit:
        dr = -2.0 * rs * float(Q)
        gx = np.append(gx, dr)
        gy = np.append(gy, dr)
    return PairResidual(float(value), gx, gy)


class TangencyClass(enum.Enum):
    EXTERNALLY_TANGENT = "ExternallyTangent"
    SEPARATED = "Separated"
    OVERLAPPING = "Overlapping"
    PARALLEL_TANGENT = "ParallelTangent"
    PARALLEL_SEPARATED = "ParallelSeparated"
    PARALLEL_OVERLAPPING = "ParallelOverlapping"
    COINCIDENT = "Coincident"

    def __str__(self):
        return self.value

    @property
    def touching(self) -> bool:
        return self in (TangencyClass.EXTERNALLY_TANGENT, TangencyClass.PARALLEL_TANGENT)


def classify_pair(w: Cylinder, v: Cylinder, tol: float = DEFAULT_TOL) -> TangencyClass:
    """Classify by the gap ``dist(lines) - (r + s)`` in distance units.

    Touching means external tangency: the gap is zero to within ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x, y = w.line, v.line
    t = pair_terms(x.a, x.b, y.a, y.b)
    target = w.radius + v.radius
    if t.Q < PARALLEL_EPS * parallel_scale(t.A, t.C):
        offset = _perpendicular_offset(x, y)
        if offset <= tol:
            return TangencyClass.COINCIDENT
        gap = offset - target
        if abs(gap) <= tol:
            return TangencyClass.PARALLEL_TANGENT
        return TangencyClass.PARALLEL_SEPARATED if gap > 0 else TangencyClass.PARALLEL_OVERLAPPING
    gap = line_distance(x, y) - target
    if abs(gap) <= tol:
        return TangencyClass.EXTERNALLY_TANGENT
    return TangencyClass.SEPARATED if gap > 0 else TangencyClass.OVERLAPPING
