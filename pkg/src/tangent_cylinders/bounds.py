"""Exact integer upper bounds for mutually touching cylinders in R^d.

All values are Python ints, so nothing overflows for large d.  ``d = 2`` is
accepted and simply evaluates the formulas.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from math import comb, isqrt


def _check_positive(**kw):
    for name, val in kw.items():
        if int(val) != val or val < 1:
            raise ValueError(f"{name} must be a positive integer, got {val!r}")


def _check_dim(d):
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")


def milnor_thom_bound(D: int, k: int) -> int:
    """Betti-sum bound ``D (2D-1)^(k-1)`` for a variety of degree <= D in R^k."""
    _check_positive(D=D, k=k)
    return D * (2 * D - 1) ** (k - 1)


def three_sign_bound(D: int, k: int) -> int:
    """Bound ``5 D (2D-1)^(k-1)`` on components of Z cut by {P<0}, {P=0}, {P>0}."""
    _check_positive(D=D, k=k)
    return 5 * D * (2 * D - 1) ** (k - 1)


def component_bound_unit(d: int) -> int:
    """``4 * 7^(2d-3)``: components of the restricted closure for unit cylinders."""
    _check_dim(d)
    return 4 * 7 ** (2 * d - 3)


def component_bound_general(d: int) -> int:
    """``20 * 7^(2d-2)``: components after intersecting with ``r >= 1``."""
    _check_dim(d)
    return 20 * 7 ** (2 * d - 2)


def theorem_bound_unit(d: int) -> int:
    """Upper bound ``4d * 7^(2d-3)`` on mutually touching unit cylinders.

    The argument only needs ``max(d, 4 * 7^(2d-3))`` (parallel families plus one
    point per component); this returns the stated, looser product.
    """
    _check_dim(d)
    return 4 * d * 7 ** (2 * d - 3)


def theorem_bound_general(d: int) -> int:
    """Upper bound ``20(d+1) * 7^(2d-2)`` for arbitrary radii."""
    _check_dim(d)
    return 20 * (d + 1) * 7 ** (2 * d - 2)


def parameter_count_slack(d: int, n: int) -> int:
    """``(2d-2) n - C(n,2) - C(d+1,2)``; nonnegative when counting constants allows n."""
    return (2 * d - 2) * n - comb(n, 2) - comb(d + 1, 2)


def parameter_count_prediction(d: int) -> int:
    """Largest n with ``(2d-2) n >= C(n,2) + C(d+1,2)``.

    Multiplying by 2 gives ``n^2 - (4d-3) n + d(d+1) <= 0``; the answer is the
    floor of the larger root, corrected by direct substitution.
    """
    _check_dim(d)
    p = 4 * d - 3
    disc = p * p - 4 * d * (d + 1)
    if disc < 0:
        raise ValueError(f"no n satisfies the parameter count in dimension {d}")
    n = (p + isqrt(disc)) // 2
    while parameter_count_slack(d, n + 1) >= 0:
        n += 1
    while n > 0 and parameter_count_slack(d, n) < 0:
        n -= 1
    return n


def parallel_family_bound(d: int, unit: bool = True) -> int:
    """Most mutually touching cylinders sharing one direction.

    Unit: at most d unit spheres touch in R^(d-1).  General: the accepted
    count for circles with arbitrary radii is d + 1.
    """
    _check_dim(d)
    return d if unit else d + 1


@dataclass(frozen=True)
class BoundsTable:
    dimension: int
    milnor_thom_D: int
    milnor_thom_k: int
    milnor_thom: int
    component_bound_unit: int
    component_bound_general: int
    theorem_bound_unit: int
    theorem_bound_general: int
    parameter_count_prediction: int
    parallel_family_unit: int
    parallel_family_general: int

    def as_dict(self) -> dict:
        return asdict(self)


def bounds_table(d: int) -> BoundsTable:
    _check_dim(d)
    return BoundsTable(
        dimension=d,
        milnor_thom_D=4,
        milnor_thom_k=2 * d - 2,
        milnor_thom=milnor_thom_bound(4, 2 * d - 2),
        component_bound_unit=component_bound_unit(d),
        component_bound_general=component_bound_general(d),
        theorem_bound_unit=theorem_bound_unit(d),
        theorem_bound_general=theorem_bound_general(d),
        parameter_count_prediction=parameter_count_prediction(d),
        parallel_family_unit=parallel_family_bound(d, True),
        parallel_family_general=parallel_family_bound(d, False),
    )
