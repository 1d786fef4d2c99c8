"""Deterministic scene resolution: vertex attributes, depth cues, snapshots.

Pinned rendering constants (required for byte-reproducible snapshots):
default shape tube with 8 sides and 0.4 mm radius, ribbon width 1.0 mm,
context fibers at alpha 0.25, scalar colormap linear blue->red, default
view direction (0, 0, -1), snapshot floats at 6 decimals.

Snapshot text layout (stable order; ``meshes`` section only on request)::

    zfzscene 1
    generation <int>
    view <x> <y> <z>
    planes 3
    plane <name> axis <x|y|z> position <f> enabled <0|1>
    fibers <count>
    fiber <id> bundle <tag> shape <s> focus <0|1> culled <0|1> vertices <n>
    v <x> <y> <z> <r> <g> <b> <a> <radius>     (per vertex; none if culled)
    meshes <count>
    mesh <fiber-id> vertices <nv> triangles <nt>
    mv <x> <y> <z> <nx> <ny> <nz> <r> <g> <b> <a>
    mt <i> <j> <k>
    end
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .encoding import (
    DEFAULT_RADIUS,
    EncodingState,
    bundle_color,
)
from .mesh import Mesh, tessellate_ribbon, tessellate_tube
from .model import FiberModel
from .state import PLANE_AXIS_NAMES, PLANE_ORDER, Session, effective_focus, visible_ids

DEFAULT_VIEW = (0.0, 0.0, -1.0)
CONTEXT_ALPHA = 0.25
TUBE_SIDES = 8
RIBBON_WIDTH = 1.0

Vec = tuple[float, float, float]
Rgba = tuple[float, float, float, float]


def as_view(vec: Sequence[float]) -> Vec:
    """Normalize a view direction to unit length; zero vectors are invalid."""
    x, y, z = (float(c) for c in vec)
    if not all(math.isfinite(c) for c in (x, y, z)):
        raise ValueError("view direction must be finite")
    n = math.sqrt(x * x + y * y + z * z)
    if n == 0.0:
        raise ValueError("view direction must be non-zero")
    return (x / n, y / n, z / n)


def colormap_scalar(v: float) -> tuple[float, float, float]:
    """Linear blue (0) -> red (1) map; input clamped to [0, 1]."""
    v = min(1.0, max(0.0, v))
    return (v, 0.0, 1.0 - v)


def depth_mapper(depths: Sequence[float], lower: float, upper: float) -> Callable[[float], float]:
    """Affine map of the population depth range onto [lower, upper], clamped.

    A constant-depth population maps everything to the midpoint.
    """
    if lower > upper:
        raise ValueError("depth bounds require lower <= upper")
    if not depths:
        mid = (lower + upper) / 2.0
        return lambda d: mid
    dmin = min(depths)
    dmax = max(depths)
    if dmax == dmin:
        mid = (lower + upper) / 2.0
        return lambda d: mid
    scale = (upper - lower) / (dmax - dmin)

    def mapped(d: float) -> float:
        # Endpoints snap exactly; out-of-population depths clamp to the bounds.
        if d <= dmin:
            return lower
        if d >= dmax:
            return upper
        return min(upper, max(lower, lower + (d - dmin) * scale))

    return mapped


def depth_normalize(positions: Sequence[Vec], view: Sequence[float],
                    lower: float, upper: float) -> list[float]:
    """Per-vertex depth values for a vertex population (its own min/max span)."""
    if not positions:
        raise ValueError("depth_normalize needs at least one vertex")
    vx, vy, vz = as_view(view)
    depths = [p[0] * vx + p[1] * vy + p[2] * vz for p in positions]
    mapper = depth_mapper(depths, lower, upper)
    return [mapper(d) for d in depths]


@dataclass(frozen=True)
class FiberAttributes:
    fiber_id: int
    bundle: str
    shape: str
    focused: bool
    culled: bool
    vertices: tuple[tuple[float, float, float, float, float, float, float, float], ...]
    # per vertex: x y z r g b a radius


def compute_vertex_attributes(model: FiberModel, focus_ids: frozenset[int],
                              unculled_ids: frozenset[int], encoding: EncodingState,
                              view: Sequence[float]) -> list[FiberAttributes]:
    """Resolve encodings into per-vertex color/alpha/radius; depth cues last.

    Depth cues normalize against the focused, unculled vertex population so
    they span exactly what the user is examining.
    """
    vx, vy, vz = as_view(view)

    population = [
        (v.x * vx + v.y * vy + v.z * vz)
        for f in model.fibers
        if f.id in focus_ids and f.id in unculled_ids
        for v in f.vertices
    ]
    if not population:
        population = [
            (v.x * vx + v.y * vy + v.z * vz)
            for f in model.fibers
            if f.id in unculled_ids
            for v in f.vertices
        ]

    out: list[FiberAttributes] = []
    for f in model.fibers:
        culled = f.id not in unculled_ids
        focused = f.id in focus_ids and not culled
        shape = encoding.shape_of(f.id)
        if culled:
            out.append(FiberAttributes(f.id, f.bundle, shape, False, True, ()))
            continue

        color_dir = encoding.color_of(f.id)
        size_dir = encoding.size_of(f.id)
        depth_dir = encoding.depth_of(f.id)
        base_alpha = 1.0 if focused else CONTEXT_ALPHA

        rows = []
        mapper = None
        if depth_dir is not None:
            lower, upper = depth_dir[1]
            mapper = depth_mapper(population, lower, upper)
        for v in f.vertices:
            if color_dir is None:
                rgb = bundle_color(f.bundle)
            else:
                rgb = colormap_scalar(v.fa if color_dir[0] == "FA" else v.la)
            if size_dir is None:
                radius = DEFAULT_RADIUS
            else:
                minimal, scale = size_dir[1]
                radius = minimal + scale * (v.fa if size_dir[0] == "FA" else v.la)
            alpha = base_alpha
            if mapper is not None:
                dval = mapper(v.x * vx + v.y * vy + v.z * vz)
                cue = depth_dir[0]
                if cue == "size":
                    radius *= dval
                elif cue == "color":
                    rgb = colormap_scalar(dval)
                elif cue == "value":
                    rgb = (rgb[0] * dval, rgb[1] * dval, rgb[2] * dval)
                else:  # transparency
                    alpha = dval
            rows.append((v.x, v.y, v.z, rgb[0], rgb[1], rgb[2], alpha, radius))
        out.append(FiberAttributes(f.id, f.bundle, shape, focused, False, tuple(rows)))
    return out


@dataclass(frozen=True)
class SceneSnapshot:
    generation: int
    view: Vec
    planes: tuple[tuple[str, str, float, bool], ...]  # name, axis, position, enabled
    fibers: tuple[FiberAttributes, ...]
    meshes: tuple[tuple[int, Mesh], ...] | None = None


def emit_snapshot(session: Session, view: Sequence[float] = DEFAULT_VIEW,
                  include_meshes: bool = False) -> SceneSnapshot:
    """Pure read of the session into a render-ready snapshot."""
    if session.model is None:
        raise ValueError("no model loaded")
    view = as_view(view)
    model = session.model
    unculled = visible_ids(model, session.planes)
    focus = effective_focus(session)
    fibers = compute_vertex_attributes(model, focus, unculled, session.encoding, view)

    meshes: list[tuple[int, Mesh]] | None = None
    if include_meshes:
        meshes = []
        for attrs in fibers:
            if attrs.culled or attrs.shape == "line":
                continue
            fiber = model.fiber(attrs.fiber_id)
            colors = [(r, g, b, a) for (_, _, _, r, g, b, a, _) in attrs.vertices]
            if attrs.shape == "tube":
                radii = [row[7] for row in attrs.vertices]
                mesh = tessellate_tube(fiber, radii, TUBE_SIDES)
                per_vertex = [colors[k // TUBE_SIDES] for k in range(len(mesh.vertices))]
            else:
                mesh = tessellate_ribbon(fiber, RIBBON_WIDTH)
                per_vertex = [colors[k // 2] for k in range(len(mesh.vertices))]
            meshes.append((attrs.fiber_id, Mesh(mesh.vertices, mesh.normals,
                                                mesh.triangles, tuple(per_vertex))))

    planes = tuple(
        (name, PLANE_AXIS_NAMES[name], session.planes.position[name], session.planes.enabled[name])
        for name in PLANE_ORDER
    )
    return SceneSnapshot(
        generation=session.generation,
        view=view,
        planes=planes,
        fibers=tuple(fibers),
        meshes=tuple(meshes) if meshes is not None else None,
    )


def _fmt(v: float) -> str:
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def serialize_snapshot(snap: SceneSnapshot) -> str:
    lines = [
        "zfzscene 1",
        f"generation {snap.generation}",
        f"view {_fmt(snap.view[0])} {_fmt(snap.view[1])} {_fmt(snap.view[2])}",
        f"planes {len(snap.planes)}",
    ]
    for name, axis, position, enabled in snap.planes:
        lines.append(f"plane {name} axis {axis} position {_fmt(position)} enabled {int(enabled)}")
    lines.append(f"fibers {len(snap.fibers)}")
    for f in snap.fibers:
        lines.append(
            f"fiber {f.fiber_id} bundle {f.bundle} shape {f.shape} "
            f"focus {int(f.focused)} culled {int(f.culled)} vertices {len(f.vertices)}"
        )
        for row in f.vertices:
            lines.append("v " + " ".join(_fmt(c) for c in row))
    if snap.meshes is not None:
        lines.append(f"meshes {len(snap.meshes)}")
        for fid, mesh in snap.meshes:
            lines.append(f"mesh {fid} vertices {len(mesh.vertices)} triangles {len(mesh.triangles)}")
            for p, n, c in zip(mesh.vertices, mesh.normals, mesh.colors):
                lines.append("mv " + " ".join(_fmt(x) for x in (*p, *n, *c)))
            for tri in mesh.triangles:
                lines.append(f"mt {tri[0]} {tri[1]} {tri[2]}")
    lines.append("end")
    return "\n".join(lines) + "\n"
