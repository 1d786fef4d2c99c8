"""Fiber dataset containers, anisotropy metrics, and the ZFZ text format.

A model is a set of 3D polylines ("fibers"), each tagged with a bundle name
and carrying per-vertex fractional anisotropy (FA) and linear anisotropy (LA)
scalars in [0, 1]. Models are immutable after construction and safe to share.

ZFZ file format (line oriented, UTF-8, whitespace separated, lines starting
with ``#`` are comments):

    ZFZ 1
    fibers <count>
    fiber <bundle-tag> <nvertices>
    x y z fa la          <- 5-float vertex line, or
    x y z l1 l2 l3       <- 6-float eigenvalue variant (converted at load)

The vertex-line arity must be uniform within one file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .diagnostics import Diagnostic, FatalError, warning


class Vertex(NamedTuple):
    x: float
    y: float
    z: float
    fa: float
    la: float

    @property
    def position(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class Box:
    """Axis-aligned bounding box, coordinates in mm."""

    lo: tuple[float, float, float]
    hi: tuple[float, float, float]

    def contains(self, p: Sequence[float], tol: float = 0.0) -> bool:
        return all(self.lo[i] - tol <= p[i] <= self.hi[i] + tol for i in range(3))


@dataclass(frozen=True)
class Fiber:
    id: int
    bundle: str
    vertices: tuple[Vertex, ...]

    def __post_init__(self):
        if len(self.vertices) < 2:
            raise ValueError(f"fiber {self.id}: needs at least 2 vertices")
        if not self.bundle or any(c.isspace() for c in self.bundle):
            raise ValueError(f"fiber {self.id}: bundle tag must be non-empty and whitespace-free")
        for v in self.vertices:
            if not all(math.isfinite(c) for c in v.position):
                raise ValueError(f"fiber {self.id}: non-finite coordinate")
            if not (0.0 <= v.fa <= 1.0 and 0.0 <= v.la <= 1.0):
                raise ValueError(f"fiber {self.id}: FA/LA outside [0, 1]")
        for a, b in zip(self.vertices, self.vertices[1:]):
            if a.position == b.position:
                raise ValueError(f"fiber {self.id}: coincident consecutive vertices")

    def centroid(self) -> tuple[float, float, float]:
        n = len(self.vertices)
        return (
            sum(v.x for v in self.vertices) / n,
            sum(v.y for v in self.vertices) / n,
            sum(v.z for v in self.vertices) / n,
        )


@dataclass(frozen=True)
class FiberModel:
    fibers: tuple[Fiber, ...]
    bundles: frozenset[str]
    bounds: Box

    @classmethod
    def from_fibers(cls, fibers: Iterable[Fiber]) -> "FiberModel":
        fibers = tuple(fibers)
        if not fibers:
            raise ValueError("empty model")
        ids = [f.id for f in fibers]
        if ids != list(range(len(fibers))):
            raise ValueError("fiber ids must be dense and unique, in order")
        return cls(
            fibers=fibers,
            bundles=frozenset(f.bundle for f in fibers),
            bounds=model_bounds(fibers),
        )

    @property
    def all_ids(self) -> frozenset[int]:
        return frozenset(f.id for f in self.fibers)

    def bundle_ids(self, tag: str) -> frozenset[int]:
        return frozenset(f.id for f in self.fibers if f.bundle == tag)

    def fiber(self, fid: int) -> Fiber:
        return self.fibers[fid]


def model_bounds(fibers: Sequence[Fiber]) -> Box:
    """Minimal axis-aligned box containing every vertex."""
    if not fibers:
        raise ValueError("empty model")
    lo = [math.inf] * 3
    hi = [-math.inf] * 3
    for f in fibers:
        for v in f.vertices:
            for i, c in enumerate(v.position):
                lo[i] = min(lo[i], c)
                hi[i] = max(hi[i], c)
    return Box(lo=tuple(lo), hi=tuple(hi))


# --- anisotropy metrics -----------------------------------------------------
#
# The eigenvalue-derived metrics used throughout the language:
#   FA = sqrt(3/2) * ||lambda - mean(lambda)|| / ||lambda||
#   LA = (l1 - l2) / (l1 + l2 + l3)        (Westin linear coefficient)


def as_eigen_triple(values: Sequence[float]) -> tuple[float, float, float]:
    """Sort a 3-sequence of eigenvalues descending; reject negatives."""
    if len(values) != 3:
        raise ValueError("eigenvalue triple must have exactly 3 entries")
    vals = sorted((float(v) for v in values), reverse=True)
    if vals[2] < 0.0:
        raise ValueError("eigenvalues must be nonnegative")
    return (vals[0], vals[1], vals[2])


def fractional_anisotropy(e: Sequence[float]) -> float:
    l1, l2, l3 = as_eigen_triple(e)
    norm_sq = l1 * l1 + l2 * l2 + l3 * l3
    if norm_sq == 0.0:
        raise ValueError("degenerate tensor")
    mean = (l1 + l2 + l3) / 3.0
    dev_sq = (l1 - mean) ** 2 + (l2 - mean) ** 2 + (l3 - mean) ** 2
    fa = math.sqrt(1.5 * dev_sq / norm_sq)
    return min(1.0, max(0.0, fa))


def linear_anisotropy(e: Sequence[float]) -> float:
    l1, l2, l3 = as_eigen_triple(e)
    trace = l1 + l2 + l3
    if trace == 0.0:
        raise ValueError("degenerate tensor")
    return min(1.0, max(0.0, (l1 - l2) / trace))


def fiber_mean(f: Fiber, metric: str) -> float:
    """Unweighted arithmetic mean of a per-vertex scalar over the fiber."""
    metric = metric.upper()
    if metric == "FA":
        return sum(v.fa for v in f.vertices) / len(f.vertices)
    if metric == "LA":
        return sum(v.la for v in f.vertices) / len(f.vertices)
    raise ValueError(f"unknown metric {metric!r}")


# --- ZFZ parsing and serialization ------------------------------------------


def _clamped(value: float, what: str, line: int, diags: list[Diagnostic]) -> float:
    if value < 0.0 or value > 1.0:
        diags.append(warning(f"{what} {value:g} outside [0, 1], clamped", line))
        return min(1.0, max(0.0, value))
    return value


def parse_model(text: str) -> tuple[FiberModel, list[Diagnostic]]:
    """Parse ZFZ text into a FiberModel, collecting non-fatal diagnostics.

    Raises FatalError (with a line number) on malformed input.
    """
    diags: list[Diagnostic] = []
    lines = [
        (i + 1, stripped)
        for i, raw in enumerate(text.splitlines())
        if (stripped := raw.strip()) and not stripped.startswith("#")
    ]
    pos = 0

    def take(expect: str) -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(lines):
            raise FatalError(f"unexpected end of file, expected {expect}", len(lines))
        lineno, content = lines[pos]
        pos += 1
        return lineno, content.split()

    lineno, header = take("header")
    if header != ["ZFZ", "1"]:
        raise FatalError("unrecognized format: expected 'ZFZ 1' header", lineno)
    lineno, count_line = take("fiber count")
    if len(count_line) != 2 or count_line[0] != "fibers" or not count_line[1].isdigit():
        raise FatalError("unrecognized format: expected 'fibers <count>'", lineno)
    declared = int(count_line[1])
    if declared == 0:
        raise FatalError("empty model", lineno)

    arity: int | None = None
    fibers: list[Fiber] = []
    for fid in range(declared):
        lineno, head = take("fiber header")
        if len(head) != 3 or head[0] != "fiber":
            raise FatalError("expected 'fiber <bundle-tag> <nvertices>'", lineno)
        _, tag, nv_text = head
        if not nv_text.isdigit():
            raise FatalError(f"bad vertex count {nv_text!r}", lineno)
        nv = int(nv_text)
        if nv < 2:
            raise FatalError(f"fiber {tag!r} has {nv} vertices, need at least 2", lineno)
        vertices = []
        for _ in range(nv):
            lineno, fields = take("vertex line")
            try:
                nums = [float(x) for x in fields]
            except ValueError:
                raise FatalError("vertex line is not numeric", lineno) from None
            if len(nums) not in (5, 6):
                raise FatalError(f"vertex line has {len(nums)} fields, expected 5 or 6", lineno)
            if arity is None:
                arity = len(nums)
            elif len(nums) != arity:
                raise FatalError("vertex-line arity must be uniform per file", lineno)
            x, y, z = nums[:3]
            if not all(math.isfinite(c) for c in (x, y, z)):
                raise FatalError("non-finite coordinate", lineno)
            if arity == 5:
                fa = _clamped(nums[3], "FA", lineno, diags)
                la = _clamped(nums[4], "LA", lineno, diags)
            else:
                evs = [max(0.0, v) for v in nums[3:]]
                if evs != nums[3:]:
                    diags.append(warning("negative eigenvalue clamped to 0", lineno))
                if sum(evs) == 0.0:
                    diags.append(warning("all-zero eigenvalue triple, FA/LA set to 0", lineno))
                    fa = la = 0.0
                else:
                    triple = as_eigen_triple(evs)
                    fa = fractional_anisotropy(triple)
                    la = linear_anisotropy(triple)
            vertices.append(Vertex(x, y, z, fa, la))
        try:
            fibers.append(Fiber(id=fid, bundle=tag, vertices=tuple(vertices)))
        except ValueError as exc:
            raise FatalError(str(exc), lineno) from None

    if pos < len(lines):
        raise FatalError("trailing content after declared fibers", lines[pos][0])
    return FiberModel.from_fibers(fibers), diags


def serialize_model(model: FiberModel) -> str:
    """Write a model back to ZFZ text (5-float variant, full float precision)."""
    out = ["ZFZ 1", f"fibers {len(model.fibers)}"]
    for f in model.fibers:
        out.append(f"fiber {f.bundle} {len(f.vertices)}")
        for v in f.vertices:
            out.append(" ".join(repr(c) for c in v))
    return "\n".join(out) + "\n"


def load_model_file(path: str) -> tuple[FiberModel, list[Diagnostic]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FatalError(f"cannot read model file {path!r}: {exc.strerror}") from None
    return parse_model(text)
