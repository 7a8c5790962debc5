"""Core data types: lines in slope/offset form, cylinders and configurations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite reals")
    return arr


@dataclass(frozen=True, eq=False)
class LineParam:
    """The line ``{(t, a*t + b) : t real}`` in R^d, stored as ``a, b`` in R^(d-1)."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _as_vector(self.a, "a")
        b = _as_vector(self.b, "b")
        if a.shape != b.shape:
            raise ValueError(f"a and b differ in length ({a.size} != {b.size})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def dimension(self) -> int:
        return self.a.size + 1

    def vector(self) -> np.ndarray:
        """Flat parameter vector ``(a, b)`` in R^(2d-2)."""
        return np.concatenate([self.a, self.b])

    def __eq__(self, other):
        if not isinstance(other, LineParam):
            return NotImplemented
        return np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b)

    def __repr__(self):
        return f"LineParam(a={self.a.tolist()}, b={self.b.tolist()})"


@dataclass(frozen=True, eq=False)
class Cylinder:
    line: LineParam
    radius: float = 1.0

    def __post_init__(self):
        r = float(self.radius)
        if not (np.isfinite(r) and r > 0):
            raise ValueError(f"radius must be a positive finite real, got {self.radius!r}")
        object.__setattr__(self, "radius", r)

    @property
    def dimension(self) -> int:
        return self.line.dimension

    def __eq__(self, other):
        if not isinstance(other, Cylinder):
            return NotImplemented
        return self.line == other.line and self.radius == other.radius

    def __repr__(self):
        return f"Cylinder(a={self.line.a.tolist()}, b={self.line.b.tolist()}, r={self.radius!r})"


@dataclass(eq=False)
class Configuration:
    """An ordered family of cylinders in R^d.

    ``unit=True`` means every radius is exactly 1 and radii are not free
    parameters anywhere downstream.
    """

    dimension: int
    cylinders: list[Cylinder] = field(default_factory=list)
    unit: bool = True

    def __post_init__(self):
        self.dimension = int(self.dimension)
        if self.dimension < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dimension}")
        self.cylinders = list(self.cylinders)
        for i, cyl in enumerate(self.cylinders):
            if cyl.dimension != self.dimension:
                raise ValueError(
                    f"cylinder {i}: line vectors have length {cyl.dimension - 1}, "
                    f"expected {self.dimension - 1}"
                )
            if self.unit and cyl.radius != 1.0:
                raise ValueError(f"cylinder {i}: unit configuration requires radius 1, got {cyl.radius!r}")

    def __len__(self):
        return len(self.cylinders)

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return (
            self.dimension == other.dimension
            and self.unit == other.unit
            and len(self) == len(other)
            and all(x == y for x, y in zip(self.cylinders, other.cylinders))
        )

    @property
    def lines(self) -> list[LineParam]:
        return [c.line for c in self.cylinders]

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Stacked ``(A, B, radii)`` with shapes (n, d-1), (n, d-1), (n,)."""
        k = self.dimension - 1
        n = len(self.cylinders)
        A = np.array([c.line.a for c in self.cylinders], dtype=float).reshape(n, k)
        B = np.array([c.line.b for c in self.cylinders], dtype=float).reshape(n, k)
        R = np.array([c.radius for c in self.cylinders], dtype=float)
        return A, B, R

    @classmethod
    def from_arrays(cls, A, B, radii=None, unit: bool = True) -> "Configuration":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.atleast_2d(np.asarray(B, dtype=float))
        if radii is None:
            radii = np.ones(len(A))
        cyls = [Cylinder(LineParam(a, b), float(r)) for a, b, r in zip(A, B, radii)]
        return cls(A.shape[1] + 1, cyls, unit)

    def without(self, index: int) -> "Configuration":
        cyls = [c for i, c in enumerate(self.cylinders) if i != index]
        return Configuration(self.dimension, cyls, self.unit)

    def with_cylinder(self, cylinder: Cylinder) -> "Configuration":
        return Configuration(self.dimension, [*self.cylinders, cylinder], self.unit)


@dataclass(frozen=True, eq=False)
class RotationMap:
    """A proper rotation of R^d, as a d x d orthogonal matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("rotation matrix must be square")
        if not np.allclose(m @ m.T, np.eye(len(m)), atol=1e-12, rtol=0):
            raise ValueError("rotation matrix rows are not orthonormal")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, d: int) -> "RotationMap":
        return cls(np.eye(d))

    @property
    def is_identity(self) -> bool:
        return bool(np.array_equal(self.matrix, np.eye(len(self.matrix))))
