import numpy as np
import pytest

from tangent_cylinders.algebra import TangencyClass, classify_pair, tangency_F, tangency_G
from tangent_cylinders.config_io import verify
from tangent_cylinders.geometry import canonical_rotate, line_distance, oracle_distance, transform_configuration
from tangent_cylinders.model import Configuration, Cylinder, LineParam
from tangent_cylinders.solver import (
    Gauge,
    NonGenericPair,
    Normalization,
    SearchSpec,
    Status,
    extend_configuration,
    gauge_fix,
    jacobian,
    lm_refine,
    multi_start_search,
    pack,
    random_configuration,
    residual_vector,
    to_configuration,
)

TOUCHING_PAIR = Configuration(3, [Cylinder(LineParam([0, 0], [0, 0])), Cylinder(LineParam([1, 0], [0, 2]))])


def random_config(rng, n, d, unit=True):
    A = rng.uniform(-1.5, 1.5, size=(n, d - 1))
    B = rng.uniform(-3, 3, size=(n, d - 1))
    R = None if unit else rng.uniform(1.0, 2.0, size=n)
    return Configuration.from_arrays(A, B, R, unit)


def test_residual_vector_touching_pair():
    assert residual_vector(TOUCHING_PAIR).tolist() == [0.0]


def test_residual_vector_pinned(pinned7):
    r = residual_vector(pinned7)
    assert r.shape == (21,)
    assert np.max(np.abs(r)) <= 1e-8


def test_residual_vector_order_and_normalization(rng):
    cfg = random_config(rng, 5, 4, unit=False)
    r_slope = residual_vector(cfg, Normalization.SLOPE)
    r_gram = residual_vector(cfg, Normalization.GRAM)
    k = 0
    for i in range(5):
        for j in range(i + 1, 5):
            w, v = cfg.cylinders[i], cfg.cylinders[j]
            N = (1 + w.line.a @ w.line.a) * (1 + v.line.a @ v.line.a)
            assert r_slope[k] == pytest.approx(tangency_G(w, v) / N, rel=1e-12)
            dist = line_distance(w.line, v.line)
            assert r_gram[k] == pytest.approx(dist**2 - (w.radius + v.radius) ** 2, rel=1e-9, abs=1e-9)
            k += 1


def test_residual_vector_unit_uses_F(rng):
    cfg = random_config(rng, 3, 3)
    r = residual_vector(cfg)
    x, y = cfg.lines[0], cfg.lines[1]
    assert r[0] == pytest.approx(tangency_F(x, y) / ((1 + x.a @ x.a) * (1 + y.a @ y.a)), rel=1e-12)


def test_parallel_pair_raises():
    cfg = Configuration(
        3,
        [Cylinder(LineParam([0, 0], [0, 0])), Cylinder(LineParam([1, 0], [0, 2])), Cylinder(LineParam([0, 0], [0, 2]))],
    )
    with pytest.raises(NonGenericPair) as exc:
        residual_vector(cfg)
    assert exc.value.pair == (0, 2)


def fd_jacobian(cfg, norm, h=1e-6):
    theta = pack(cfg)
    cols = []
    for e in np.eye(len(theta)) * h:
        plus = residual_vector(to_configuration(theta + e, cfg.dimension, cfg.unit), norm)
        minus = residual_vector(to_configuration(theta - e, cfg.dimension, cfg.unit), norm)
        cols.append((plus - minus) / (2 * h))
    return np.array(cols).T


@pytest.mark.parametrize("norm", list(Normalization))
@pytest.mark.parametrize("unit", [True, False])
def test_jacobian_matches_central_differences(norm, unit, rng):
    for i in range(25):
        cfg = random_config(rng, 4, 3 + i % 3, unit)
        J = jacobian(cfg, normalization=norm)
        fd = fd_jacobian(cfg, norm)
        assert np.max(np.abs(J - fd)) <= 1e-6 * np.max(np.abs(J))


def test_jacobian_row_sparsity(rng):
    cfg = random_config(rng, 5, 4)
    J = jacobian(cfg)
    bs = 6
    for row, (i, j) in zip(J, zip(*np.triu_indices(5, 1))):
        blocks = {c // bs for c in np.flatnonzero(row)}
        assert blocks == {i, j}


def test_jacobian_single_pair_and_frozen_columns():
    spec = SearchSpec(3, 2, gauge=Gauge.PIN_FIRST)
    J = jacobian(TOUCHING_PAIR)
    assert J.shape == (1, 8)
    Jf = jacobian(TOUCHING_PAIR, gauge_fix(spec, TOUCHING_PAIR))
    assert Jf.shape == (1, 3)


def test_gauge_fix_counts(rng):
    d, n = 3, 7
    spec = SearchSpec(d, n, gauge=Gauge.PIN_FIRST)
    mask = gauge_fix(spec, random_config(rng, n, d))
    assert mask.size == (2 * d - 2) * n == 28
    assert (~mask).sum() == (2 * d - 2) * n - (2 * (d - 1) + 1) == 23
    assert not gauge_fix(SearchSpec(d, n, gauge=Gauge.FREE), random_config(rng, n, d)).any()
    one = gauge_fix(SearchSpec(d, 1, gauge=Gauge.PIN_FIRST), random_config(rng, 1, d))
    assert one.all()


def test_search_spec_validation():
    with pytest.raises(ValueError):
        SearchSpec(2, 3)
    with pytest.raises(ValueError):
        SearchSpec(3, 3, residual_tolerance=0)
    with pytest.raises(ValueError):
        SearchSpec(3, 3, r_min=0)


@pytest.mark.parametrize("gauge", list(Gauge))
def test_lm_refine_perturbed_pair(gauge, rng):
    A, B, R = TOUCHING_PAIR.arrays()
    A[1] += rng.normal(scale=1e-4, size=2)
    B[1] += rng.normal(scale=1e-4, size=2)
    init = Configuration.from_arrays(A, B, R, True)
    report = lm_refine(init, SearchSpec(3, 2, gauge=gauge))
    assert report.status is Status.CERTIFIED
    assert report.iterations <= 25
    assert report.max_gap <= 1e-8


def test_lm_refine_already_certified(pinned7):
    report = lm_refine(pinned7, SearchSpec(3, 7))
    assert report.certified
    assert report.iterations <= 1


@pytest.mark.parametrize("seed", range(5))
def test_lm_refine_total_on_wild_starts(seed):
    spec = SearchSpec(3, 7, init_scale=20.0, max_iterations=60)
    report = lm_refine(random_configuration(spec, seed), spec, seed)
    assert report.status in set(Status)
    assert report.iterations <= 60


def test_lm_refine_nongeneric_start_is_reported():
    init = Configuration(3, [Cylinder(LineParam([0, 0], [0, 0])), Cylinder(LineParam([0, 0], [0, 2]))])
    report = lm_refine(init, SearchSpec(3, 2))
    assert report.status is Status.STALLED
    assert "parallel" in report.message


@pytest.mark.parametrize("seed", range(8))
def test_history_strictly_decreasing(seed):
    spec = SearchSpec(3, 6, max_iterations=80)
    report = lm_refine(random_configuration(spec, seed), spec, seed)
    h = np.array(report.history)
    assert np.all(np.diff(h) < 0)


def test_general_radii_respect_r_min():
    spec = SearchSpec(3, 5, unit=False, r_min=1.0, seeds=range(10))
    report = multi_start_search(spec)
    radii = report.configuration.arrays()[2]
    assert np.all(radii >= 1.0)
    assert report.certified


def test_deterministic(pinned7):
    spec = SearchSpec(3, 7, seeds=range(130, 140))
    r1, r2 = multi_start_search(spec), multi_start_search(spec)
    assert r1.status == r2.status and r1.seed == r2.seed
    assert residual_vector(r1.configuration).tobytes() == residual_vector(r2.configuration).tobytes()


def test_small_search_is_quick():
    report = multi_start_search(SearchSpec(3, 2, seeds=[0]))
    assert report.certified and report.wall_time < 1.0


def test_stop_on_certified_takes_first_certified_seed():
    spec = SearchSpec(4, 6, seeds=range(10), stop_on_certified=True)
    first = next(s for s in spec.seeds if lm_refine(random_configuration(spec, s), spec, s).certified)
    assert multi_start_search(spec).seed == first


def test_certified_output_is_sound(pinned7):
    for i in range(7):
        for j in range(i + 1, 7):
            w, v = pinned7.cylinders[i], pinned7.cylinders[j]
            assert classify_pair(w, v, 1e-8) is TangencyClass.EXTERNALLY_TANGENT
            assert abs(oracle_distance(w.line, v.line) - 2.0) <= 1e-8
            assert np.linalg.norm(w.line.vector() - v.line.vector()) >= 2 * (1 - 1e-6)


def test_rigid_motion_preserves_certification(pinned7, rng):
    for _ in range(5):
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        if np.linalg.det(q) < 0:
            q[:, 0] *= -1
        shift = rng.normal(size=3)
        pts = []
        for cyl in pinned7.cylinders:
            p = q @ np.concatenate([[0.0], cyl.line.b]) + shift
            u = q @ np.concatenate([[1.0], cyl.line.a])
            pts.append((p, u))
        moved, _ = canonical_rotate(pts, rng_seed=1)
        assert verify(moved, 1e-8).certified


def test_extend_single_cylinder():
    base = Configuration(3, [Cylinder(LineParam([0, 0], [0, 0]))])
    report = extend_configuration(base, SearchSpec(3, 2, seeds=[0]))
    assert report.certified and len(report.configuration) == 2


def test_extend_rejects_degenerate_base():
    c = Cylinder(LineParam([0.5, 0.5], [1, 1]))
    with pytest.raises(ValueError):
        extend_configuration(Configuration(3, [c, c]), SearchSpec(3, 3))


def test_extend_rejects_uncertified_base(rng):
    with pytest.raises(ValueError):
        extend_configuration(random_config(rng, 3, 3), SearchSpec(3, 4))


def test_extend_keeps_base_fixed(pinned7):
    base = pinned7.without(2)
    report = extend_configuration(base, SearchSpec(3, 7, seeds=range(100), stop_on_certified=True))
    assert report.certified
    for c1, c2 in zip(base.cylinders, report.configuration.cylinders):
        assert c1 == c2


def test_worker_pool_matches_serial():
    serial = multi_start_search(SearchSpec(4, 6, seeds=range(6)))
    pooled = multi_start_search(SearchSpec(4, 6, seeds=range(6), workers=2))
    assert serial.seed == pooled.seed
    assert pooled.configuration == serial.configuration
