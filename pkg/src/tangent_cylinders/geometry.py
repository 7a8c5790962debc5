"""Lines in R^d: evaluation, distances and rotation into slope/offset form."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy.stats import special_ortho_group

from .gram import PARALLEL_EPS, gram_Q_arrays, pair_terms, parallel_scale
from .model import Configuration, Cylinder, LineParam, RotationMap

#: Minimum |u_1| / |u| for a direction to be stored in slope/offset form.
REPRESENTABILITY_MARGIN = 1e-3
ROTATION_RETRIES = 1000


def _check_same_dim(x: LineParam, y: LineParam):
    if x.a.size != y.a.size:
        raise ValueError(f"dimension mismatch: R^{x.dimension} vs R^{y.dimension}")


def direction(line: LineParam) -> np.ndarray:
    """Unnormalized direction ``(1, a)``."""
    return np.concatenate([[1.0], line.a])


def point_at(line: LineParam, t: float) -> np.ndarray:
    return np.concatenate([[t], line.a * t + line.b])


def dist_squared_rational(x: LineParam, y: LineParam) -> tuple[float, float]:
    """Return ``(P, Q)``; the squared distance is ``P / Q`` whenever ``Q != 0``."""
    _check_same_dim(x, y)
    t = pair_terms(x.a, x.b, y.a, y.b)
    return float(t.P), float(t.Q)


def is_parallel(x: LineParam, y: LineParam, eps: float = PARALLEL_EPS) -> bool:
    _check_same_dim(x, y)
    Q = gram_Q_arrays(x.a, y.a)
    scale = parallel_scale(1.0 + x.a @ x.a, 1.0 + y.a @ y.a)
    return bool(Q < eps * scale)


def _perpendicular_offset(x: LineParam, y: LineParam) -> float:
    # Average slope keeps the result symmetric in (x, y).
    u = np.concatenate([[1.0], 0.5 * (x.a + y.a)])
    w = np.concatenate([[0.0], x.b - y.b])
    perp = w - (w @ u) / (u @ u) * u
    return float(np.sqrt(perp @ perp))


def line_distance(x: LineParam, y: LineParam) -> float:
    """Euclidean distance between the two lines, with an explicit parallel branch."""
    _check_same_dim(x, y)
    t = pair_terms(x.a, x.b, y.a, y.b)
    if t.Q < PARALLEL_EPS * parallel_scale(t.A, t.C):
        return _perpendicular_offset(x, y)
    return float(np.sqrt(max(float(t.P), 0.0) / float(t.Q)))


def default_half_range(x: LineParam, y: LineParam) -> float:
    return 10.0 * (1.0 + np.linalg.norm(x.b) + np.linalg.norm(y.b))


def oracle_distance(
    x: LineParam,
    y: LineParam,
    half_range: float | None = None,
    grid: int = 128,
    newton_steps: int = 50,
) -> float:
    """Closest approach of two lines by brute-force search.

    Samples ``|p(t) - q(u)|^2`` on a ``grid x grid`` lattice over
    ``[-half_range, half_range]^2``, then polishes the best lattice point with
    Newton steps on the 2x2 normal equations.  Deliberately independent of
    the Gram-determinant formula so it can be used to check it.
    """
    _check_same_dim(x, y)
    if half_range is None:
        half_range = default_half_range(x, y)
    if half_range <= 0:
        raise ValueError("half_range must be positive")
    if grid < 16:
        raise ValueError("grid must be at least 16")

    p0 = np.concatenate([[0.0], x.b])
    q0 = np.concatenate([[0.0], y.b])
    u = np.concatenate([[1.0], x.a])
    v = np.concatenate([[1.0], y.a])
    w0 = p0 - q0

    # |w0 + t u - s v|^2 over the lattice, expanded to avoid a (grid, grid, d) array.
    ts = np.linspace(-half_range, half_range, grid)
    uu, vv, uv = u @ u, v @ v, u @ v
    wu, wv, ww = w0 @ u, w0 @ v, w0 @ w0
    T, S = np.meshgrid(ts, ts, indexing="ij")
    vals = ww + 2 * T * wu - 2 * S * wv + T * T * uu + S * S * vv - 2 * T * S * uv
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    t, s = ts[i], ts[j]

    H = np.array([[uu, -uv], [-uv, vv]])
    clamp = 10.0 * half_range
    best = None
    for _ in range(newton_steps):
        r = w0 + t * u - s * v
        g = np.array([r @ u, -(r @ v)])
        step, *_ = np.linalg.lstsq(H, -g, rcond=1e-14)
        norm = np.hypot(*step)
        if norm > clamp:
            step *= clamp / norm
        t, s = t + step[0], s + step[1]
        dist = float(np.linalg.norm(w0 + t * u - s * v))
        if best is not None and dist >= best:
            best = min(best, dist)
            break
        best = dist
    return best


def _rotate_line(R: np.ndarray, point: np.ndarray, dirn: np.ndarray, shift=None) -> tuple[np.ndarray, np.ndarray]:
    p = R @ point
    if shift is not None:
        p = p + shift
    u = R @ dirn
    return p, u


def line_from_point_direction(point, dirn) -> LineParam:
    """Slope/offset form of the line through ``point`` with direction ``dirn``."""
    point = np.asarray(point, dtype=float)
    dirn = np.asarray(dirn, dtype=float)
    if dirn[0] == 0:
        raise ValueError("direction is parallel to the {x_1 = 0} hyperplane")
    a = dirn[1:] / dirn[0]
    b = point[1:] - point[0] * a
    return LineParam(a, b)


def margin(dirn) -> float:
    dirn = np.asarray(dirn, dtype=float)
    return abs(dirn[0]) / np.linalg.norm(dirn)


def transform_configuration(config: Configuration, R: np.ndarray, shift=None) -> Configuration:
    """Apply ``p -> R p + shift`` to every line and re-express in slope/offset form."""
    cyls = []
    for c in config.cylinders:
        p, u = _rotate_line(R, point_at(c.line, 0.0), direction(c.line), shift)
        cyls.append(Cylinder(line_from_point_direction(p, u), c.radius))
    return Configuration(config.dimension, cyls, config.unit)


def canonical_rotate(
    config: Configuration | Sequence[tuple],
    rng_seed: int = 0,
    min_margin: float = REPRESENTABILITY_MARGIN,
    retries: int = ROTATION_RETRIES,
) -> tuple[Configuration, RotationMap]:
    """Rotate so that no line is nearly parallel to ``{x_1 = 0}``.

    ``config`` is either a :class:`Configuration` or a sequence of
    ``(point, direction)`` or ``(point, direction, radius)`` tuples; the raw
    form accepts lines that slope/offset coordinates cannot express.
    Returns the rotated configuration together with the rotation applied.
    """
    if isinstance(config, Configuration):
        if all(margin(direction(c.line)) >= min_margin for c in config.cylinders):
            same = Configuration(config.dimension, config.cylinders, config.unit)
            return same, RotationMap.identity(config.dimension)
        d = config.dimension
        unit = config.unit
        raw = [(point_at(c.line, 0.0), direction(c.line), c.radius) for c in config.cylinders]
    else:
        raw = [(np.asarray(r[0], float), np.asarray(r[1], float), float(r[2]) if len(r) > 2 else 1.0) for r in config]
        if not raw:
            raise ValueError("cannot infer dimension of an empty line list")
        d = raw[0][0].size
        unit = all(r[2] == 1.0 for r in raw)

    def build(R):
        cyls = []
        for p, u, r in raw:
            p2, u2 = _rotate_line(R, p, u)
            cyls.append(Cylinder(line_from_point_direction(p2, u2), r))
        return Configuration(d, cyls, unit)

    if all(margin(u) >= min_margin for _, u, _ in raw):
        return build(np.eye(d)), RotationMap.identity(d)

    rng = np.random.default_rng(rng_seed)
    for _ in range(retries):
        R = special_ortho_group.rvs(d, random_state=rng) if d > 1 else np.eye(1)
        if all(margin(R @ u) >= min_margin for _, u, _ in raw):
            return build(R), RotationMap(R)
    raise RuntimeError(f"no rotation with margin {min_margin} found in {retries} attempts")
