"""Tube and ribbon tessellation along fiber polylines.

Cross-sections are swept with parallel-transport frames: the initial normal is
derived from the coordinate axis with the smallest tangent component (so it is
deterministic), and each subsequent normal is the previous one projected onto
the plane of the new tangent and renormalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .model import Fiber

Vec = tuple[float, float, float]


def _sub(a: Vec, b: Vec) -> Vec:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _add(a: Vec, b: Vec) -> Vec:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _scale(a: Vec, s: float) -> Vec:
    return (a[0] * s, a[1] * s, a[2] * s)


def _dot(a: Vec, b: Vec) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross(a: Vec, b: Vec) -> Vec:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _norm(a: Vec) -> float:
    return math.sqrt(_dot(a, a))


def _unit(a: Vec) -> Vec:
    n = _norm(a)
    if n == 0.0:
        raise ValueError("cannot normalize zero vector")
    return _scale(a, 1.0 / n)


def _axis_normal(tangent: Vec) -> Vec:
    # Axis with the smallest tangent component gives a stable seed normal.
    axis_index = min(range(3), key=lambda i: abs(tangent[i]))
    axis = tuple(1.0 if i == axis_index else 0.0 for i in range(3))
    return _unit(_sub(axis, _scale(tangent, _dot(axis, tangent))))


def transport_frames(points: Sequence[Vec]) -> list[tuple[Vec, Vec, Vec]]:
    """Per-point (tangent, normal, binormal) frames along a polyline."""
    if len(points) < 2:
        raise ValueError("polyline needs at least 2 points")
    segments = []
    for a, b in zip(points, points[1:]):
        d = _sub(b, a)
        if _norm(d) == 0.0:
            raise ValueError("coincident consecutive points")
        segments.append(_unit(d))
    tangents = [segments[0]]
    for prev_seg, next_seg in zip(segments, segments[1:]):
        blended = _add(prev_seg, next_seg)
        tangents.append(_unit(blended) if _norm(blended) > 1e-12 else next_seg)
    tangents.append(segments[-1])

    frames = []
    normal = _axis_normal(tangents[0])
    for tangent in tangents:
        projected = _sub(normal, _scale(tangent, _dot(normal, tangent)))
        if _norm(projected) < 1e-12:
            projected = _axis_normal(tangent)
        normal = _unit(projected)
        frames.append((tangent, normal, _unit(_cross(tangent, normal))))
    return frames


@dataclass(frozen=True)
class Mesh:
    vertices: tuple[Vec, ...]
    normals: tuple[Vec, ...]
    triangles: tuple[tuple[int, int, int], ...]
    colors: tuple[tuple[float, float, float, float], ...] = field(default=())


def tessellate_tube(fiber: Fiber, radii: Sequence[float], sides: int = 8) -> Mesh:
    """Sweep a regular polygon along the fiber; ring k uses radii[k]. Open ends."""
    points = [v.position for v in fiber.vertices]
    if sides < 3:
        raise ValueError("tube needs at least 3 sides")
    if len(radii) != len(points):
        raise ValueError("one radius per fiber vertex required")
    if any(r <= 0.0 for r in radii):
        raise ValueError("radii must be positive")
    frames = transport_frames(points)

    vertices: list[Vec] = []
    normals: list[Vec] = []
    for center, (_, normal, binormal), radius in zip(points, frames, radii):
        for j in range(sides):
            theta = 2.0 * math.pi * j / sides
            offset = _add(_scale(normal, math.cos(theta)), _scale(binormal, math.sin(theta)))
            vertices.append(_add(center, _scale(offset, radius)))
            normals.append(offset)

    triangles: list[tuple[int, int, int]] = []
    for k in range(len(points) - 1):
        base = k * sides
        for j in range(sides):
            a = base + j
            b = base + (j + 1) % sides
            c = a + sides
            d = b + sides
            triangles.append((a, b, c))
            triangles.append((b, d, c))
    return Mesh(tuple(vertices), tuple(normals), tuple(triangles))


def tessellate_ribbon(fiber: Fiber, width: float) -> Mesh:
    """Flat strip of the given width centered on the polyline."""
    if width <= 0.0:
        raise ValueError("ribbon width must be positive")
    points = [v.position for v in fiber.vertices]
    frames = transport_frames(points)
    half = width / 2.0

    vertices: list[Vec] = []
    normals: list[Vec] = []
    for center, (_, normal, binormal) in zip(points, frames):
        vertices.append(_add(center, _scale(normal, half)))
        vertices.append(_sub(center, _scale(normal, half)))
        normals.append(binormal)
        normals.append(binormal)

    triangles: list[tuple[int, int, int]] = []
    for k in range(len(points) - 1):
        a = 2 * k
        triangles.append((a, a + 1, a + 2))
        triangles.append((a + 1, a + 3, a + 2))
    return Mesh(tuple(vertices), tuple(normals), tuple(triangles))
