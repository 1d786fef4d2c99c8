"""Deterministic synthetic five-bundle brain model for tests and demos.

Geometry is a desk-scale stand-in for a clinical tractography model: five
bundles (CC: coronal arc, CST: near-vertical columns, CG: horizontal arc,
ILF/IFO: longitudinal curves), each a smooth parametric curve with seeded
per-fiber jitter. Coordinates are mm; x is left-right, y posterior-anterior,
z inferior-superior.

The scalar profile is analytic so threshold counts have a closed form.
With n fibers per bundle, fiber index i in [0, n) and arc parameter
t = k / (VERTS - 1):

    fa(b, i, t) = FA_BASE[b] + FA_RAMP * t + FA_SPREAD * (i + 0.5) / n
    la(b, i, t) = LA_BASE[b] + LA_RAMP * t + LA_SPREAD * (i + 0.5) / n

Vertex parameters are uniform in t, so the per-fiber mean equals the value
at t = 1/2 (see mean_fa / mean_la). All profile values stay inside [0, 1]
by construction, so no clamping ever occurs. Jitter affects geometry only.
"""

from __future__ import annotations

import math
import random

from .model import Fiber, FiberModel, Vertex

BUNDLE_ORDER = ("CC", "CST", "CG", "ILF", "IFO")
VERTS = 24

FA_BASE = {"CC": 0.30, "CST": 0.25, "CG": 0.20, "ILF": 0.15, "IFO": 0.10}
LA_BASE = {"CC": 0.35, "CST": 0.30, "CG": 0.25, "ILF": 0.20, "IFO": 0.15}
FA_RAMP, FA_SPREAD = 0.25, 0.30
LA_RAMP, LA_SPREAD = 0.20, 0.25


def mean_fa(bundle: str, index: int, n: int) -> float:
    """Closed-form per-fiber mean FA of the generated profile."""
    return FA_BASE[bundle] + FA_RAMP / 2.0 + FA_SPREAD * (index + 0.5) / n


def mean_la(bundle: str, index: int, n: int) -> float:
    return LA_BASE[bundle] + LA_RAMP / 2.0 + LA_SPREAD * (index + 0.5) / n


def count_mean_fa_below(bundle: str, n: int, threshold: float) -> int:
    """Closed-form number of fibers in a bundle whose mean FA < threshold."""
    return sum(1 for i in range(n) if mean_fa(bundle, i, n) < threshold)


def _curve(bundle: str, i: int, n: int, rng: random.Random):
    """Return a position function t -> (x, y, z) for fiber i of a bundle."""
    u = (i + 0.5) / n
    side = -1.0 if i % 2 == 0 else 1.0
    if bundle == "CC":
        radius = 52.0 + rng.uniform(-3.0, 3.0)
        height = 30.0 + rng.uniform(-2.0, 2.0)
        y0 = -12.0 + 24.0 * u + rng.uniform(-1.0, 1.0)
        return lambda t: (
            radius * math.cos(math.pi * (1.0 - t)),
            y0,
            18.0 + height * math.sin(math.pi * (1.0 - t)),
        )
    if bundle == "CST":
        x0 = side * 18.0 + rng.uniform(-3.0, 3.0)
        y0 = -8.0 + rng.uniform(-4.0, 4.0)
        bow = 5.0 + rng.uniform(-1.0, 1.0)
        return lambda t: (
            x0 + bow * math.sin(math.pi * t),
            y0 + 3.0 * math.sin(math.pi * t),
            -45.0 + 95.0 * t,
        )
    if bundle == "CG":
        x0 = side * 7.0 + rng.uniform(-1.5, 1.5)
        lift = 10.0 + rng.uniform(-1.0, 1.0)
        return lambda t: (
            x0,
            55.0 * math.cos(0.15 * math.pi + 0.7 * math.pi * t),
            36.0 + lift * math.sin(0.15 * math.pi + 0.7 * math.pi * t),
        )
    if bundle == "ILF":
        x0 = side * (44.0 + rng.uniform(-2.0, 2.0))
        z0 = -14.0 + rng.uniform(-2.0, 2.0)
        return lambda t: (
            x0 - side * 6.0 * math.sin(math.pi * t),
            -78.0 + 113.0 * t,
            z0 + 6.0 * math.sin(math.pi * t),
        )
    if bundle == "IFO":
        x0 = side * (36.0 + rng.uniform(-2.0, 2.0))
        z0 = -4.0 + rng.uniform(-1.5, 1.5)
        return lambda t: (
            x0 - side * 4.0 * math.sin(math.pi * t),
            -72.0 + 124.0 * t,
            z0 + 4.0 * math.sin(math.pi * t) - 2.0 * t,
        )
    raise ValueError(f"unknown bundle {bundle!r}")


def generate_synthetic_brain(seed: int, fibers_per_bundle: int) -> FiberModel:
    """Pure function of (seed, fibers_per_bundle); 5 * n fibers in bundle order."""
    if fibers_per_bundle < 1:
        raise ValueError("fibers_per_bundle must be >= 1")
    rng = random.Random(seed)
    n = fibers_per_bundle
    fibers = []
    fid = 0
    for bundle in BUNDLE_ORDER:
        for i in range(n):
            pos = _curve(bundle, i, n, rng)
            vertices = []
            for k in range(VERTS):
                t = k / (VERTS - 1)
                x, y, z = pos(t)
                fa = FA_BASE[bundle] + FA_RAMP * t + FA_SPREAD * (i + 0.5) / n
                la = LA_BASE[bundle] + LA_RAMP * t + LA_SPREAD * (i + 0.5) / n
                vertices.append(Vertex(x, y, z, fa, la))
            fibers.append(Fiber(id=fid, bundle=bundle, vertices=tuple(vertices)))
            fid += 1
    return FiberModel.from_fibers(fibers)
