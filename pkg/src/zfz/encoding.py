"""Per-fiber visual encoding state and the UPDATE combination rules.

Legal (attribute, mode, parameter-arity) combinations:

    shape   BY line | tube | ribbon                 no parameters
    color   BY FA | LA                              no parameters
    size    BY FA | LA          WITH minimal,scale  (optional, default 0.1,0.6)
    depth   BY size | color | value | transparency
                                WITH lower,upper    (optional, default 0.2,1.0)
    DEFAULT                                         no mode, no parameters
    RESET                                           no mode, no parameters

Resolution is last-writer-wins per fiber per attribute; unset attributes fall
back to the defaults (tube shape, bundle-palette color, constant 0.4 mm
radius, no depth cue).
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

DEFAULT_RADIUS = 0.4
DEFAULT_SIZE_PARAMS = (0.1, 0.6)
DEFAULT_DEPTH_BOUNDS = (0.2, 1.0)

LEGAL_MODES = {
    "shape": ("line", "tube", "ribbon"),
    "color": ("FA", "LA"),
    "size": ("FA", "LA"),
    "depth": ("size", "color", "value", "transparency"),
}
PARAM_ARITY = {"shape": 0, "color": 0, "size": 2, "depth": 2}

# Pinned so snapshots are reproducible; the five anatomical bundles get fixed
# colors, anything else hashes into a 12-color cycle.
BUNDLE_PALETTE = {
    "CC": (0.89, 0.10, 0.11),
    "CST": (0.22, 0.49, 0.72),
    "CG": (0.30, 0.69, 0.29),
    "ILF": (0.99, 0.55, 0.24),
    "IFO": (0.60, 0.31, 0.64),
}
FALLBACK_CYCLE = (
    (0.12, 0.47, 0.71), (1.00, 0.50, 0.05), (0.17, 0.63, 0.17),
    (0.84, 0.15, 0.16), (0.58, 0.40, 0.74), (0.55, 0.34, 0.29),
    (0.89, 0.47, 0.76), (0.50, 0.50, 0.50), (0.74, 0.74, 0.13),
    (0.09, 0.75, 0.81), (0.68, 0.78, 0.91), (1.00, 0.73, 0.47),
)


def bundle_color(tag: str) -> tuple[float, float, float]:
    known = BUNDLE_PALETTE.get(tag)
    if known is not None:
        return known
    return FALLBACK_CYCLE[zlib.crc32(tag.encode("utf-8")) % len(FALLBACK_CYCLE)]


def validate_directive(attribute: str, mode: str | None, params: tuple[float, ...] | None) -> str | None:
    """Return an error message for an illegal combination, or None if legal."""
    if attribute in ("DEFAULT", "RESET"):
        if mode is not None or params is not None:
            return f"UPDATE {attribute} takes no BY or WITH clause"
        return None
    legal = LEGAL_MODES[attribute]
    if mode is None:
        return f"invalid encoding combination: UPDATE {attribute} requires BY one of {', '.join(legal)}"
    if mode not in legal:
        return f"invalid encoding combination: {attribute} BY {mode}"
    arity = PARAM_ARITY[attribute]
    if params is not None:
        if arity == 0:
            return f"{attribute} BY {mode} takes no WITH parameters"
        if len(params) != arity:
            return f"{attribute} BY {mode} takes {arity} WITH parameters, got {len(params)}"
        if not all(math.isfinite(p) for p in params):
            return "WITH parameters must be finite"
        if attribute == "depth":
            lower, upper = params
            if not (0.0 <= lower <= upper):
                return "depth bounds require 0 <= lower <= upper"
    return None


def resolve_params(attribute: str, params: tuple[float, ...] | None) -> tuple[float, ...]:
    if params is not None:
        return params
    if attribute == "size":
        return DEFAULT_SIZE_PARAMS
    if attribute == "depth":
        return DEFAULT_DEPTH_BOUNDS
    return ()


@dataclass(frozen=True)
class EncodingDirective:
    attribute: str  # shape | color | size | depth
    mode: str
    params: tuple[float, ...]
    fiber_ids: frozenset[int]


@dataclass(frozen=True)
class EncodingState:
    """Resolved (mode, params) per fiber per attribute; missing = default."""

    shape: dict[int, tuple[str, tuple[float, ...]]] = field(default_factory=dict)
    color: dict[int, tuple[str, tuple[float, ...]]] = field(default_factory=dict)
    size: dict[int, tuple[str, tuple[float, ...]]] = field(default_factory=dict)
    depth: dict[int, tuple[str, tuple[float, ...]]] = field(default_factory=dict)

    def channel(self, attribute: str) -> dict[int, tuple[str, tuple[float, ...]]]:
        return getattr(self, attribute)

    def shape_of(self, fid: int) -> str:
        return self.shape.get(fid, ("tube", ()))[0]

    def color_of(self, fid: int) -> tuple[str, tuple[float, ...]] | None:
        return self.color.get(fid)

    def size_of(self, fid: int) -> tuple[str, tuple[float, ...]] | None:
        return self.size.get(fid)

    def depth_of(self, fid: int) -> tuple[str, tuple[float, ...]] | None:
        return self.depth.get(fid)


def apply_encoding(state: EncodingState, d: EncodingDirective) -> EncodingState:
    """Record a directive for its fiber set; other attributes untouched."""
    updated = {
        name: dict(state.channel(name))
        for name in ("shape", "color", "size", "depth")
    }
    channel = updated[d.attribute]
    for fid in d.fiber_ids:
        channel[fid] = (d.mode, d.params)
    return EncodingState(**updated)
