"""Catalog of pointwise-orthogonal initial matrix fields.

The 2D entries tile the torus with rotation and reflection blocks whose
determinants (+1 / -1) mark the two phases; the 3D entries place the -1
phase inside tubular neighborhoods of circles and are snapped to the
orthogonal group by a pointwise projection. Every generated field has
per-cell Frobenius norm sqrt(m).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .fields import GridSpec
from .matrices import project_orthogonal

__all__ = [
    "InitialCondition",
    "EXAMPLES",
    "make_initial_field",
    "rotation_2d",
    "reflection_2d",
]


def rotation_2d(alpha) -> np.ndarray:
    """[[cos a, -sin a], [sin a, cos a]] per point, det +1."""
    alpha = np.asarray(alpha, dtype=float)
    out = np.empty(alpha.shape + (2, 2))
    c, s = np.cos(alpha), np.sin(alpha)
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def reflection_2d(alpha) -> np.ndarray:
    """[[cos a, sin a], [sin a, -cos a]] per point, det -1."""
    alpha = np.asarray(alpha, dtype=float)
    out = np.empty(alpha.shape + (2, 2))
    c, s = np.cos(alpha), np.sin(alpha)
    out[..., 0, 0] = c
    out[..., 0, 1] = s
    out[..., 1, 0] = s
    out[..., 1, 1] = -c
    return out


def _require(grid: GridSpec, d: int) -> None:
    if grid.d != d:
        raise ValueError(f"this initial condition needs a {d}-dimensional grid, got d={grid.d}")


def example1_field(grid: GridSpec) -> np.ndarray:
    """Smooth rotation field, angle 1 + (pi/2) sin(2 pi (x+y))."""
    _require(grid, 2)
    x, y = grid.meshgrid()
    return rotation_2d(1.0 + 0.5 * np.pi * np.sin(2.0 * np.pi * (x + y)))


def example2_field(grid: GridSpec, variant: str = "sine") -> np.ndarray:
    """Rotation band |x - y| < 0.5 inside a reflection background.

    ``variant`` selects the angle: "zero" for a piecewise-constant field,
    "sine" for (pi/2) sin(2 pi (x+y)).
    """
    _require(grid, 2)
    x, y = grid.meshgrid()
    if variant == "zero":
        alpha = np.zeros(grid.shape)
    elif variant == "sine":
        alpha = 0.5 * np.pi * np.sin(2.0 * np.pi * (x + y))
    else:
        raise ValueError(f"unknown variant {variant!r}; expected 'zero' or 'sine'")
    inside = np.abs(x - y) < 0.5
    return np.where(inside[..., None, None], rotation_2d(alpha), reflection_2d(alpha))


_EXAMPLE3_ANGLES = {
    1: (2.0 * np.pi, 4.0 * np.pi),
    2: (2.0 * np.pi, 8.0 * np.pi),
    3: (8.0 * np.pi, 2.0 * np.pi),
}


def example3_field(grid: GridSpec, case: int) -> np.ndarray:
    """Two straight vertical interfaces at |x| = 0.25.

    Rotation by a1*y outside, reflection by a2*y inside, with the
    frequency pair selected by ``case`` in {1, 2, 3}. Both angles are
    harmonic (linear in y).
    """
    _require(grid, 2)
    if case not in _EXAMPLE3_ANGLES:
        raise ValueError(f"case must be 1, 2 or 3, got {case!r}")
    w1, w2 = _EXAMPLE3_ANGLES[case]
    x, y = grid.meshgrid()
    outside = np.abs(x) > 0.25
    return np.where(
        outside[..., None, None], rotation_2d(w1 * y), reflection_2d(w2 * y)
    )


def example4_field(grid: GridSpec) -> np.ndarray:
    """Checkerboard of phases split by the coordinate axes (xy <= 0)."""
    _require(grid, 2)
    x, y = grid.meshgrid()
    alpha = 0.5 * np.pi * np.sin(2.0 * np.pi * x) * np.sin(2.0 * np.pi * y)
    inside = x * y <= 0.0
    return np.where(inside[..., None, None], rotation_2d(alpha), reflection_2d(alpha))


_SQ2 = np.sqrt(2.0) / 2.0
_SQ3 = np.sqrt(3.0) / 2.0
_SQ6 = np.sqrt(6.0) / 2.0


def _branch3d(alpha, flip: bool) -> np.ndarray:
    """The two 3x3 branch matrices; columns are orthogonal with norms
    (1, sqrt(2), 1/sqrt(2)), so a projection is required to land on the
    orthogonal group."""
    alpha = np.asarray(alpha, dtype=float)
    c, s = np.cos(alpha), np.sin(alpha)
    sign = -1.0 if flip else 1.0
    out = np.empty(alpha.shape + (3, 3))
    out[..., 0, 0] = sign * 0.5 * c
    out[..., 0, 1] = _SQ6 * c
    out[..., 0, 2] = -sign * _SQ2 * s
    out[..., 1, 0] = sign * 0.5 * s
    out[..., 1, 1] = _SQ6 * s
    out[..., 1, 2] = sign * _SQ2 * c
    out[..., 2, 0] = _SQ3
    out[..., 2, 1] = -sign * _SQ2
    out[..., 2, 2] = 0.0
    return out


def ring_region(x, y, z) -> np.ndarray:
    """Tubular neighborhood of the circle x^2 + y^2 = 0.2^2 in the z=0 plane."""
    return (0.2 - np.sqrt(x**2 + y**2)) ** 2 + z**2 < 0.15**2


def interlocked_rings_region(x, y, z, r: float) -> np.ndarray:
    """Union of three tubes of radius r around mutually linked circles."""
    first = (0.15 - np.sqrt(x**2 + (y + 0.21) ** 2)) ** 2 + z**2 < r**2
    second = (0.2 - np.sqrt(y**2 + z**2)) ** 2 + x**2 < r**2
    third = (0.15 - np.sqrt(x**2 + (y - 0.21) ** 2)) ** 2 + z**2 < r**2
    return first | second | third


def _two_phase_3d(inside: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    raw = np.where(
        inside[..., None, None], _branch3d(alpha, flip=False), _branch3d(alpha, flip=True)
    )
    return project_orthogonal(raw)


def example5_field(grid: GridSpec) -> np.ndarray:
    """Single ring; angle 2 pi x (y + z)."""
    _require(grid, 3)
    x, y, z = grid.meshgrid()
    return _two_phase_3d(ring_region(x, y, z), 2.0 * np.pi * x * (y + z))


def example6_field(grid: GridSpec, r: float = 0.06) -> np.ndarray:
    """Three interlocked rings of tube radius r; angle 4 pi x y z."""
    _require(grid, 3)
    if r <= 0.0:
        raise ValueError(f"tube radius must be positive, got {r}")
    x, y, z = grid.meshgrid()
    return _two_phase_3d(interlocked_rings_region(x, y, z, r), 4.0 * np.pi * x * y * z)


@dataclass(frozen=True)
class InitialCondition:
    """Catalog entry: grid dimension, matrix dimension, parameter defaults."""

    name: str
    d: int
    m: int
    description: str
    build: callable = dataclass_field(repr=False, compare=False, default=None)
    defaults: dict = dataclass_field(default_factory=dict)


EXAMPLES = {
    ic.name: ic
    for ic in [
        InitialCondition(
            "example1", 2, 2, "smooth rotation field, det +1 everywhere",
            build=lambda grid, p: example1_field(grid),
        ),
        InitialCondition(
            "example2-zero", 2, 2, "diagonal band interface, constant angles",
            build=lambda grid, p: example2_field(grid, "zero"),
        ),
        InitialCondition(
            "example2-sine", 2, 2, "diagonal band interface, sinusoidal angles",
            build=lambda grid, p: example2_field(grid, "sine"),
        ),
        InitialCondition(
            "example3-i", 2, 2, "straight interfaces, angles (2 pi y, 4 pi y)",
            build=lambda grid, p: example3_field(grid, 1),
        ),
        InitialCondition(
            "example3-ii", 2, 2, "straight interfaces, angles (2 pi y, 8 pi y)",
            build=lambda grid, p: example3_field(grid, 2),
        ),
        InitialCondition(
            "example3-iii", 2, 2, "straight interfaces, angles (8 pi y, 2 pi y)",
            build=lambda grid, p: example3_field(grid, 3),
        ),
        InitialCondition(
            "example4", 2, 2, "phases split by the coordinate axes",
            build=lambda grid, p: example4_field(grid),
        ),
        InitialCondition(
            "example5", 3, 3, "single 3D ring",
            build=lambda grid, p: example5_field(grid),
        ),
        InitialCondition(
            "example6", 3, 3, "three interlocked 3D rings of tube radius r",
            build=lambda grid, p: example6_field(grid, p["r"]),
            defaults={"r": 0.06},
        ),
    ]
}


def make_initial_field(name: str, grid: GridSpec, m: int | None = None, params: dict | None = None) -> np.ndarray:
    """Build a catalog field by name, merging parameter defaults."""
    try:
        entry = EXAMPLES[name]
    except KeyError:
        known = ", ".join(sorted(EXAMPLES))
        raise ValueError(f"unknown initial condition {name!r}; known: {known}") from None
    if m is not None and m != entry.m:
        raise ValueError(f"{name} generates {entry.m}x{entry.m} matrices, config says m={m}")
    merged = dict(entry.defaults)
    merged.update(params or {})
    unknown = set(merged) - set(entry.defaults)
    if unknown:
        raise ValueError(f"{name} does not take parameters {sorted(unknown)}")
    return entry.build(grid, merged)
