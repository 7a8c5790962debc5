"""Multi-start Levenberg-Marquardt search for mutually touching cylinders.

Each pair (i, j) contributes the residual ``G_ij / ((1+|a_i|^2)(1+|a_j|^2))``,
which equals ``sin^2(angle) * (dist^2 - (r_i+r_j)^2)``; the normalizer stops
steep lines from dominating the least-squares problem.  Success is never
judged on this residual: a run counts as Certified only after every pair's
distance gap is re-checked in distance units, including by brute force.
"""

from __future__ import annotations

import enum
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .algebra import pair_gradients
from .config_io import verify
from .geometry import line_distance
from .gram import PARALLEL_EPS, pair_terms, parallel_scale
from .model import Configuration, Cylinder, LineParam

log = logging.getLogger(__name__)

LAMBDA_0 = 1e-3
LAMBDA_FACTOR = 3.0
MIN_STEP = 1e-14
LAMBDA_MAX = 1e16


class NonGenericPair(ValueError):
    """Two lines are parallel to within the parallel threshold."""

    def __init__(self, i: int, j: int):
        super().__init__(f"cylinders {i} and {j} are parallel; re-randomize")
        self.pair = (i, j)


class Gauge(enum.Enum):
    PIN_FIRST = "PinFirst"
    FREE = "Free"


class Status(enum.Enum):
    CERTIFIED = "Certified"
    # Residual target met but independent verification failed.
    CONVERGED = "Converged"
    STALLED = "Stalled"
    DIVERGED = "Diverged"

    def __str__(self):
        return self.value


class Normalization(enum.Enum):
    # G / ((1+|a_i|^2)(1+|a_j|^2)) = sin^2(angle) * (dist^2 - (r+s)^2)
    SLOPE = "slope"
    # G / Q = dist^2 - (r+s)^2
    GRAM = "gram"


def default_init_scale(d: int) -> float:
    return 1.5 * np.sqrt(d / 3.0)


@dataclass(frozen=True)
class SearchSpec:
    dimension: int
    count: int
    unit: bool = True
    r_min: float = 1.0
    seeds: Sequence[int] = (0,)
    max_iterations: int = 200
    residual_tolerance: float = 1e-8
    init_scale: float | None = None
    # PinFirst is available but certifies d=3, n=7 far less often (scripts/success_rate.py).
    gauge: Gauge = Gauge.FREE
    # Stop at the first Certified seed, in seed order (deterministic).
    stop_on_certified: bool = False
    workers: int = 1
    normalization: Normalization = Normalization.GRAM


    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.dimension < 3:
            raise ValueError("dimension must be >= 3")
        if not self.residual_tolerance > 0:
            raise ValueError("residual_tolerance must be positive")
        if not self.r_min > 0:
            raise ValueError("r_min must be positive")
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    @property
    def scale(self) -> float:
        return self.init_scale if self.init_scale is not None else default_init_scale(self.dimension)


@dataclass
class SolverReport:
    status: Status
    configuration: Configuration
    gaps: np.ndarray
    history: list[float] = field(default_factory=list)
    iterations: int = 0
    seed: int | None = None
    wall_time: float = 0.0
    message: str = ""

    @property
    def max_gap(self) -> float:
        if self.gaps.size == 0:
            return 0.0
        g = np.abs(self.gaps[np.triu_indices(len(self.gaps), 1)])
        return float(g.max()) if g.size else 0.0

    @property
    def certified(self) -> bool:
        return self.status is Status.CERTIFIED


# --- parameter packing ----------------------------------------------------


def block_size(d: int, unit: bool) -> int:
    return 2 * (d - 1) + (0 if unit else 1)


def pack(config: Configuration) -> np.ndarray:
    A, B, R = config.arrays()
    parts = [A, B] if config.unit else [A, B, R[:, None]]
    return np.hstack(parts).reshape(-1)


def unpack(theta: np.ndarray, d: int, unit: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    k = d - 1
    blocks = theta.reshape(-1, block_size(d, unit))
    A, B = blocks[:, :k], blocks[:, k : 2 * k]
    R = np.ones(len(blocks)) if unit else blocks[:, 2 * k]
    return A, B, R


def to_configuration(theta: np.ndarray, d: int, unit: bool) -> Configuration:
    A, B, R = unpack(theta, d, unit)
    return Configuration.from_arrays(A, B, R, unit)


# --- residuals --------------------------------------------------------------


def _pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, 1)


def _residual_and_jacobian(A, B, R, I, J, unit: bool, want_jac: bool = True, norm: Normalization = Normalization.SLOPE):
    """Normalized pair residuals for index arrays I, J (and their Jacobian blocks)."""
    a, b, c, d = A[I], B[I], A[J], B[J]
    rs = R[I] + R[J]
    t = pair_terms(a, b, c, d)
    bad = np.flatnonzero(t.Q < PARALLEL_EPS * parallel_scale(t.A, t.C))
    if bad.size:
        raise NonGenericPair(int(I[bad[0]]), int(J[bad[0]]))
    N = t.A * t.C if norm is Normalization.SLOPE else t.Q
    value = t.P - rs * rs * t.Q
    res = value / N
    if not want_jac:
        return res, None
    value, Q, g_a, g_b, g_c, g_d = pair_gradients(a, b, c, d, rs)
    coef = (value / (N * N))[:, None]
    if norm is Normalization.SLOPE:
        # dN/da = 2a C, dN/dc = 2c A
        dN_da = 2.0 * a * t.C[:, None]
        dN_dc = 2.0 * c * t.A[:, None]
    else:
        dN_da = 2.0 * (a * t.C[:, None] - t.B[:, None] * c)
        dN_dc = 2.0 * (c * t.A[:, None] - t.B[:, None] * a)
    g_a = g_a / N[:, None] - coef * dN_da
    g_c = g_c / N[:, None] - coef * dN_dc
    g_b = g_b / N[:, None]
    g_d = g_d / N[:, None]
    gx = [g_a, g_b]
    gy = [g_c, g_d]
    if not unit:
        dr = (-2.0 * rs * Q / N)[:, None]
        gx.append(dr)
        gy.append(dr)
    return res, (np.hstack(gx), np.hstack(gy))


def residual_vector(config: Configuration, normalization: Normalization = Normalization.SLOPE) -> np.ndarray:
    """Normalized F (unit) or G residuals for pairs i < j in lexicographic order.

    Raises :class:`NonGenericPair` if any two lines are parallel.
    """
    A, B, R = config.arrays()
    I, J = _pairs(len(config))
    if I.size == 0:
        return np.zeros(0)
    res, _ = _residual_and_jacobian(A, B, R, I, J, config.unit, want_jac=False, norm=normalization)
    return res


def _full_jacobian(A, B, R, unit: bool, norm: Normalization = Normalization.SLOPE):
    n, k = A.shape
    I, J = _pairs(n)
    bs = 2 * k + (0 if unit else 1)
    if I.size == 0:
        return np.zeros(0), np.zeros((0, n * bs))
    res, (gx, gy) = _residual_and_jacobian(A, B, R, I, J, unit, norm=norm)
    jac = np.zeros((len(I), n * bs))
    rows = np.arange(len(I))[:, None]
    cols = np.arange(bs)[None, :]
    jac[rows, I[:, None] * bs + cols] = gx
    jac[rows, J[:, None] * bs + cols] = gy
    return res, jac


def gauge_fix(spec: SearchSpec, config: Configuration) -> np.ndarray:
    """Boolean mask over packed parameters; True marks a frozen parameter.

    PinFirst freezes all of cylinder 0's line (meant to sit on the x_1 axis)
    and the first offset coordinate of cylinder 1.  Radii stay free.
    """
    d, n = config.dimension, len(config)
    k = d - 1
    bs = block_size(d, config.unit)
    mask = np.zeros(n * bs, dtype=bool)
    if spec.gauge is Gauge.FREE or n == 0:
        return mask
    mask[: 2 * k] = True
    if n >= 2:
        mask[bs + k] = True
    return mask


def jacobian(
    config: Configuration,
    frozen: np.ndarray | None = None,
    normalization: Normalization = Normalization.SLOPE,
) -> np.ndarray:
    """Jacobian of :func:`residual_vector`, dropping columns marked in ``frozen``."""
    A, B, R = config.arrays()
    _, jac = _full_jacobian(A, B, R, config.unit, normalization)
    if frozen is not None:
        jac = jac[:, ~frozen]
    return jac


def distance_gaps(config: Configuration) -> np.ndarray:
    """Symmetric matrix of ``dist(L_i, L_j) - (r_i + r_j)`` (zero diagonal)."""
    n = len(config)
    gaps = np.zeros((n, n))
    cyls = config.cylinders
    for i in range(n):
        for j in range(i + 1, n):
            g = line_distance(cyls[i].line, cyls[j].line) - (cyls[i].radius + cyls[j].radius)
            gaps[i, j] = gaps[j, i] = g
    return gaps


def _fast_max_gap(A, B, R, I, J) -> float:
    t = pair_terms(A[I], B[I], A[J], B[J])
    dist = np.sqrt(np.maximum(t.P, 0.0) / t.Q)
    return float(np.max(np.abs(dist - (R[I] + R[J])))) if I.size else 0.0


# --- Levenberg-Marquardt core -------------------------------------------------


@dataclass
class _LMResult:
    theta: np.ndarray
    reason: str  # "tolerance", "step", "iterations", "diverged", "nongeneric"
    history: list[float]
    iterations: int
    message: str = ""


def levenberg_marquardt(
    fun: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    theta0: np.ndarray,
    free: np.ndarray,
    converged: Callable[[np.ndarray], bool],
    max_iterations: int,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
    polish: int = 5,
) -> _LMResult:
    """Damped Gauss-Newton on ``fun(theta) -> (residuals, jacobian)``.

    Only entries where ``free`` is True move.  A step is accepted only if it
    strictly lowers the residual norm, so the recorded history decreases.
    Once ``converged`` holds, up to ``polish`` further iterations push the
    residual toward machine precision.
    """
    theta = theta0.copy()
    lam = LAMBDA_0
    try:
        r, jac = fun(theta)
    except NonGenericPair as exc:
        return _LMResult(theta, "nongeneric", [], 0, str(exc))
    norm = float(np.linalg.norm(r))
    history = [norm]
    if not np.isfinite(norm):
        return _LMResult(theta, "diverged", history, 0, "non-finite initial residual")
    if converged(theta):
        return _LMResult(theta, "tolerance", history, 0)

    it = 0
    polishing = -1
    while it < max_iterations:
        it += 1
        if polishing >= 0:
            polishing += 1
            if polishing > polish:
                return _LMResult(theta, "tolerance", history, it - 1)
        Jf = jac[:, free]
        g = Jf.T @ r
        H = Jf.T @ Jf
        diag = np.eye(len(H))
        try:
            step = np.linalg.solve(H + lam * diag, -g)
        except np.linalg.LinAlgError:
            lam *= LAMBDA_FACTOR
            continue
        if not np.all(np.isfinite(step)):
            return _LMResult(theta, "diverged", history, it, "non-finite step")
        if np.linalg.norm(step) < MIN_STEP * (1.0 + np.linalg.norm(theta)):
            if polishing >= 0:
                return _LMResult(theta, "tolerance", history, it)
            return _LMResult(theta, "step", history, it, "step below threshold")

        trial = theta.copy()
        trial[free] += step
        if project is not None:
            trial = project(trial)
        try:
            r_new, jac_new = fun(trial)
            new_norm = float(np.linalg.norm(r_new))
        except NonGenericPair:
            new_norm = np.inf
        if not np.all(np.isfinite(trial)):
            return _LMResult(theta, "diverged", history, it, "non-finite parameters")

        if new_norm < norm:
            theta, r, jac, norm = trial, r_new, jac_new, new_norm
            history.append(norm)
            lam = max(lam / LAMBDA_FACTOR, 1e-15)
            if polishing < 0 and converged(theta):
                polishing = 0
        else:
            lam *= LAMBDA_FACTOR
            if lam > LAMBDA_MAX:
                if polishing >= 0:
                    return _LMResult(theta, "tolerance", history, it)
                return _LMResult(theta, "step", history, it, "damping exhausted")
    if polishing >= 0 or converged(theta):
        return _LMResult(theta, "tolerance", history, it)
    return _LMResult(theta, "iterations", history, it, "iteration cap reached")


def _finish(result: _LMResult, config: Configuration, spec: SearchSpec, seed, t0) -> SolverReport:
    try:
        gaps = distance_gaps(config)
    except ValueError:
        gaps = np.full((len(config), len(config)), np.nan)
    msg = result.message
    if result.reason == "tolerance":
        report = verify(config, spec.residual_tolerance)
        status = Status.CERTIFIED if report.certified and report.parallel_pairs == 0 else Status.CONVERGED
        if status is Status.CONVERGED:
            msg = "residual target met but independent verification failed"
    elif result.reason == "diverged":
        status = Status.DIVERGED
    else:
        status = Status.STALLED
    return SolverReport(
        status=status,
        configuration=config,
        gaps=gaps,
        history=result.history,
        iterations=result.iterations,
        seed=seed,
        wall_time=time.perf_counter() - t0,
        message=msg,
    )


def lm_refine(init: Configuration, spec: SearchSpec, seed: int | None = None) -> SolverReport:
    """Drive every pair residual of ``init`` to zero; never raises on bad starts."""
    t0 = time.perf_counter()
    d, unit = init.dimension, init.unit
    if d != spec.dimension or unit != spec.unit:
        raise ValueError("initial configuration does not match the search spec")
    n = len(init)
    theta0 = pack(init)
    free = ~gauge_fix(spec, init)
    I, J = _pairs(n)
    tol = spec.residual_tolerance

    def fun(theta):
        A, B, R = unpack(theta, d, unit)
        return _full_jacobian(A, B, R, unit, spec.normalization)

    def converged(theta):
        A, B, R = unpack(theta, d, unit)
        return _fast_max_gap(A, B, R, I, J) <= tol

    project = None
    if not unit:
        bs = block_size(d, unit)

        def project(theta):
            theta = theta.copy()
            theta[bs - 1 :: bs] = np.maximum(theta[bs - 1 :: bs], spec.r_min)
            return theta

    result = levenberg_marquardt(fun, theta0, free, converged, spec.max_iterations, project)
    try:
        config = to_configuration(result.theta, d, unit)
    except ValueError as exc:
        result = replace(result, theta=theta0, reason="diverged", message=str(exc))
        config = init
    return _finish(result, config, spec, seed, t0)


# --- multi-start --------------------------------------------------------------


def random_configuration(spec: SearchSpec, seed: int) -> Configuration:
    """Seeded random start; with PinFirst the first line is the x_1 axis."""
    rng = np.random.default_rng(seed)
    n, k, s = spec.count, spec.dimension - 1, spec.scale
    A = rng.uniform(-s, s, size=(n, k))
    B = rng.uniform(-2 * s, 2 * s, size=(n, k))
    R = np.ones(n) if spec.unit else rng.uniform(spec.r_min, 2 * spec.r_min, size=n)
    if spec.gauge is Gauge.PIN_FIRST:
        A[0] = 0.0
        B[0] = 0.0
    return Configuration.from_arrays(A, B, R, spec.unit)


def _run_seed(args) -> SolverReport:
    spec, seed = args
    return lm_refine(random_configuration(spec, seed), spec, seed)


def _rank(report: SolverReport) -> tuple:
    gap = report.max_gap
    if not np.isfinite(gap):
        gap = np.inf
    return (not report.certified, gap, report.seed)


def best_report(reports) -> SolverReport:
    """Deterministic reduction: Certified first, then smallest max gap, then lowest seed."""
    return min(reports, key=_rank)


def _map_seeds(fn, spec: SearchSpec, items):
    if spec.workers > 1 and not spec.stop_on_certified:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            yield from pool.map(fn, items, chunksize=8)
    else:
        yield from map(fn, items)


def multi_start_search(spec: SearchSpec) -> SolverReport:
    """Run :func:`lm_refine` from one random start per seed and keep the best."""
    if spec.count < 2:
        raise ValueError("search needs at least two cylinders")
    if not spec.seeds:
        raise ValueError("at least one seed is required")
    best = None
    for report in _map_seeds(_run_seed, spec, [(spec, s) for s in spec.seeds]):
        log.info("seed %d: %s after %d iterations, max gap %.3e", report.seed, report.status, report.iterations, report.max_gap)
        best = report if best is None else best_report([best, report])
        if spec.stop_on_certified and report.certified:
            break
    return best


# --- extension ----------------------------------------------------------------


def _random_extension(base: Configuration, spec: SearchSpec, seed: int) -> Cylinder:
    rng = np.random.default_rng(seed)
    k, s = base.dimension - 1, spec.scale
    _, B, _ = base.arrays()
    center = B.mean(axis=0)
    a = rng.uniform(-s, s, size=k)
    b = center + rng.uniform(-2 * s, 2 * s, size=k)
    r = 1.0 if base.unit else float(rng.uniform(spec.r_min, 2 * spec.r_min))
    return Cylinder(LineParam(a, b), r)


def _extend_one(base: Configuration, spec: SearchSpec, seed: int) -> SolverReport:
    t0 = time.perf_counter()
    d, unit = base.dimension, base.unit
    k = d - 1
    bs = block_size(d, unit)
    A0, B0, R0 = base.arrays()
    n = len(base)
    I = np.arange(n)
    J = np.full(n, n)
    tol = spec.residual_tolerance
    new = _random_extension(base, spec, seed)
    theta0 = np.concatenate([new.line.a, new.line.b] + ([] if unit else [[new.radius]]))

    def stacked(theta):
        a, b = theta[:k], theta[k : 2 * k]
        r = 1.0 if unit else theta[2 * k]
        return np.vstack([A0, a]), np.vstack([B0, b]), np.append(R0, r)

    def fun(theta):
        A, B, R = stacked(theta)
        res, (_, gy) = _residual_and_jacobian(A, B, R, I, J, unit, norm=spec.normalization)
        return res, gy

    def converged(theta):
        return _fast_max_gap(*stacked(theta), I, J) <= tol

    project = None
    if not unit:

        def project(theta):
            theta = theta.copy()
            theta[bs - 1] = max(theta[bs - 1], spec.r_min)
            return theta

    result = levenberg_marquardt(fun, theta0, np.ones(bs, dtype=bool), converged, spec.max_iterations, project)
    A, B, R = stacked(result.theta)
    config = Configuration.from_arrays(A, B, R, unit)
    return _finish(result, config, spec, seed, t0)


def extend_configuration(base: Configuration, spec: SearchSpec) -> SolverReport:
    """Look for one more cylinder touching every cylinder of ``base``.

    ``base`` stays fixed; only the new cylinder moves.  A Stalled result over
    many seeds is evidence that ``base`` is maximal, not a proof.
    """
    if len(base) == 0:
        raise ValueError("base configuration is empty")
    check = verify(base, spec.residual_tolerance)
    if not check.certified or check.parallel_pairs:
        raise ValueError("base configuration is not a certified touching configuration")
    if base.dimension != spec.dimension or base.unit != spec.unit:
        raise ValueError("base configuration does not match the search spec")
    if not spec.seeds:
        raise ValueError("at least one seed is required")
    best = None
    for seed in spec.seeds:
        report = _extend_one(base, spec, seed)
        best = report if best is None else best_report([best, report])
        if spec.stop_on_certified and report.certified:
            break
    return best
