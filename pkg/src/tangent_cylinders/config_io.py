"""Configuration files, verification reports and triangle-mesh export.

Configuration files are JSON::

    {"dimension": 3, "unit": true,
     "cylinders": [{"a": [0.0, 0.0], "b": [0.0, 0.0], "r": 1.0}, ...]}

Floats are written with Python's shortest round-trip ``repr``, so
``load(save(c))`` reproduces every parameter bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import DEFAULT_TOL, TangencyClass, classify_pair
from .geometry import direction, line_distance, oracle_distance, point_at
from .model import Configuration, Cylinder, LineParam


class ConfigFormatError(ValueError):
    """A configuration file could not be parsed or failed validation."""


# --- persistence --------------------------------------------------------------


def to_dict(config: Configuration) -> dict:
    return {
        "dimension": config.dimension,
        "unit": config.unit,
        "cylinders": [
            {"a": c.line.a.tolist(), "b": c.line.b.tolist(), "r": c.radius} for c in config.cylinders
        ],
    }


def dumps(config: Configuration) -> str:
    return json.dumps(to_dict(config), indent=1) + "\n"


def _real_list(value, where: str) -> list[float]:
    if not isinstance(value, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        raise ConfigFormatError(f"{where}: expected an array of numbers")
    if not all(math.isfinite(v) for v in value):
        raise ConfigFormatError(f"{where}: entries must be finite")
    return [float(v) for v in value]


def from_dict(data) -> Configuration:
    if not isinstance(data, dict):
        raise ConfigFormatError("top level must be an object")
    for key in ("dimension", "cylinders"):
        if key not in data:
            raise ConfigFormatError(f"missing field '{key}'")
    d = data["dimension"]
    if isinstance(d, bool) or not isinstance(d, int) or d < 2:
        raise ConfigFormatError(f"field 'dimension': expected an integer >= 2, got {d!r}")
    unit = data.get("unit", True)
    if not isinstance(unit, bool):
        raise ConfigFormatError("field 'unit': expected true or false")
    cyls_raw = data["cylinders"]
    if not isinstance(cyls_raw, list):
        raise ConfigFormatError("field 'cylinders': expected an array")

    cylinders = []
    for i, item in enumerate(cyls_raw):
        where = f"cylinder {i}"
        if not isinstance(item, dict):
            raise ConfigFormatError(f"{where}: expected an object")
        for key in ("a", "b"):
            if key not in item:
                raise ConfigFormatError(f"{where}: missing field '{key}'")
        a = _real_list(item["a"], f"{where}, field 'a'")
        b = _real_list(item["b"], f"{where}, field 'b'")
        for name, vec in (("a", a), ("b", b)):
            if len(vec) != d - 1:
                raise ConfigFormatError(f"{where}, field '{name}': length {len(vec)}, expected {d - 1}")
        r = item.get("r", 1.0)
        if isinstance(r, bool) or not isinstance(r, (int, float)) or not math.isfinite(r) or r <= 0:
            raise ConfigFormatError(f"{where}, field 'r': radius must be a positive finite number, got {r!r}")
        if unit and r != 1.0:
            raise ConfigFormatError(f"{where}, field 'r': unit configuration requires r = 1, got {r!r}")
        cylinders.append(Cylinder(LineParam(a, b), float(r)))
    return Configuration(d, cylinders, unit)


def loads(text: str) -> Configuration:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return from_dict(data)


def load(path) -> Configuration:
    path = Path(path)
    try:
        return loads(path.read_text())
    except ConfigFormatError as exc:
        raise ConfigFormatError(f"{path}: {exc}") from exc


def save(config: Configuration, path) -> None:
    Path(path).write_text(dumps(config))


# --- verification ---------------------------------------------------------------


@dataclass
class PairReport:
    i: int
    j: int
    formula_distance: float
    oracle_distance: float
    gap: float
    tangency: TangencyClass

    def as_dict(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "formula_distance": self.formula_distance,
            "oracle_distance": self.oracle_distance,
            "gap": self.gap,
            "class": str(self.tangency),
        }


@dataclass
class VerificationReport:
    pairs: list[PairReport]
    tolerance: float
    max_gap: float
    certified: bool
    parallel_pairs: int

    @property
    def offending(self) -> list[PairReport]:
        return [
            p
            for p in self.pairs
            if not p.tangency.touching or abs(p.formula_distance - p.oracle_distance) > 10 * self.tolerance
        ]

    def summary(self) -> dict:
        return {
            "certified": self.certified,
            "max_gap": self.max_gap,
            "tolerance": self.tolerance,
            "pairs": len(self.pairs),
            "parallel_pairs": self.parallel_pairs,
        }

    def as_dict(self) -> dict:
        return {**self.summary(), "pair_reports": [p.as_dict() for p in self.pairs]}

    def format_table(self) -> str:
        lines = [f"{'i':>3} {'j':>3} {'formula':>22} {'oracle':>22} {'gap':>12}  class"]
        for p in self.pairs:
            lines.append(
                f"{p.i:>3} {p.j:>3} {p.formula_distance:>22.16g} {p.oracle_distance:>22.16g} {p.gap:>12.3e}  {p.tangency}"
            )
        return "\n".join(lines)


def verify(config: Configuration, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Check every pair with the closed-form distance and the brute-force oracle.

    Certified when every pair is (parallel or not) externally tangent within
    ``tol`` and the two distance computations agree within ``10 * tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    cyls = config.cylinders
    pairs = []
    for i in range(len(cyls)):
        for j in range(i + 1, len(cyls)):
            x, y = cyls[i].line, cyls[j].line
            dist = line_distance(x, y)
            pairs.append(
                PairReport(
                    i,
                    j,
                    dist,
                    oracle_distance(x, y),
                    dist - (cyls[i].radius + cyls[j].radius),
                    classify_pair(cyls[i], cyls[j], tol),
                )
            )
    parallel = sum(
        p.tangency
        in (TangencyClass.PARALLEL_TANGENT, TangencyClass.PARALLEL_SEPARATED, TangencyClass.PARALLEL_OVERLAPPING, TangencyClass.COINCIDENT)
        for p in pairs
    )
    certified = all(
        p.tangency.touching and abs(p.formula_distance - p.oracle_distance) <= 10 * tol for p in pairs
    )
    max_gap = max((abs(p.gap) for p in pairs), default=0.0)
    return VerificationReport(pairs, tol, max_gap, certified, parallel)


# --- mesh export -----------------------------------------------------------------


MIN_SEGMENTS = 8


def _orthonormal_frame(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Gram-Schmidt against the coordinate axis least aligned with u.
    e = np.zeros(3)
    e[np.argmin(np.abs(u))] = 1.0
    p = e - (e @ u) * u
    p /= np.linalg.norm(p)
    return p, np.cross(u, p)


def tube_mesh(cylinder: Cylinder, half_length: float, segments: int):
    """Vertices (2*segments, 3) and triangles (0-based) of one closed tube."""
    center = point_at(cylinder.line, 0.0)
    u = direction(cylinder.line)
    u = u / np.linalg.norm(u)
    p, q = _orthonormal_frame(u)
    ang = 2 * np.pi * np.arange(segments) / segments
    ring = cylinder.radius * (np.cos(ang)[:, None] * p + np.sin(ang)[:, None] * q)
    verts = np.vstack([center - half_length * u + ring, center + half_length * u + ring])
    faces = []
    for s in range(segments):
        s1 = (s + 1) % segments
        faces.append((s, s1, segments + s1))
        faces.append((s, segments + s1, segments + s))
    # End caps as triangle fans, no extra vertices.
    for s in range(1, segments - 1):
        faces.append((0, s + 1, s))
        faces.append((segments, segments + s, segments + s + 1))
    return verts, faces


def mesh_text(config: Configuration, half_length: float = 5.0, segments: int = 32) -> str:
    if config.dimension != 3:
        raise ValueError(
            f"mesh export needs a configuration in R^3, got R^{config.dimension}; "
            "use the verify distance table to inspect higher-dimensional configurations"
        )
    if segments < MIN_SEGMENTS:
        raise ValueError(f"segments must be at least {MIN_SEGMENTS}, got {segments}")
    if not half_length > 0:
        raise ValueError("half_length must be positive")
    vlines, flines = [], []
    offset = 0
    for idx, cyl in enumerate(config.cylinders):
        verts, faces = tube_mesh(cyl, half_length, segments)
        flines.append(f"g cylinder_{idx}")
        vlines.extend(f"v {x!r} {y!r} {z!r}" for x, y, z in verts.tolist())
        flines.extend(f"f {i + 1 + offset} {j + 1 + offset} {k + 1 + offset}" for i, j, k in faces)
        offset += len(verts)
    return "\n".join(vlines + flines) + "\n"


def export_mesh(config: Configuration, half_length: float, segments: int, path) -> None:
    """Write the configuration as a Wavefront-style ``v``/``f`` text mesh."""
    text = mesh_text(config, half_length, segments)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
