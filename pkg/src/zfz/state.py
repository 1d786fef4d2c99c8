"""Mutable interpreter session state: model, variables, selection, planes, log.

A session is single-writer: statement execution is serialized per session.
Scene generation advances at run boundaries when the view-independent state
fingerprint changes, so read endpoints never mutate anything.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable

from .diagnostics import Diagnostic
from .encoding import EncodingState
from .model import Box, FiberModel, serialize_model

PLANE_AXES = {"sagittal": 0, "coronal": 1, "axial": 2}
PLANE_AXIS_NAMES = {"sagittal": "x", "coronal": "y", "axial": "z"}
PLANE_ORDER = ("sagittal", "coronal", "axial")
ALL_KEY = "ALL"


@dataclass(frozen=True)
class FiberSetVal:
    ids: frozenset[int]


@dataclass(frozen=True)
class ScalarVal:
    value: float


@dataclass(frozen=True)
class ModelHandleVal:
    name: str


Binding = FiberSetVal | ScalarVal | ModelHandleVal


@dataclass
class SelectionState:
    """Scope-key -> focused fiber ids; effective focus is the union, plane-culled."""

    focus: dict[str, frozenset[int]] = field(default_factory=dict)


@dataclass
class PlaneState:
    position: dict[str, float]
    enabled: dict[str, bool]

    @classmethod
    def for_bounds(cls, bounds: Box) -> "PlaneState":
        # Initial positions sit at the bounding-box minima: nothing is cut.
        return cls(
            position={p: bounds.lo[ax] for p, ax in PLANE_AXES.items()},
            enabled={p: False for p in PLANE_AXES},
        )

    @classmethod
    def empty(cls) -> "PlaneState":
        return cls(
            position={p: 0.0 for p in PLANE_AXES},
            enabled={p: False for p in PLANE_AXES},
        )


@dataclass
class LogEntry:
    seq: int
    generation: int
    kind: str  # fatal | warning | notice | result
    text: str
    line: int = 0
    column: int = 0
    name: str | None = None
    value: float | None = None


LoadResolver = Callable[[str], tuple[FiberModel, list[Diagnostic]]]


@dataclass
class Session:
    model: FiberModel | None = None
    env: dict[str, Binding] = field(default_factory=dict)
    selection: SelectionState = field(default_factory=SelectionState)
    planes: PlaneState = field(default_factory=PlaneState.empty)
    encoding: EncodingState = field(default_factory=EncodingState)
    messages: list[LogEntry] = field(default_factory=list)
    generation: int = 0
    load_resolver: LoadResolver | None = None
    last_fingerprint: str = ""

    def __post_init__(self):
        if not self.last_fingerprint:
            self.last_fingerprint = state_fingerprint(self)

    def log(self, kind: str, text: str, line: int = 0, column: int = 0,
            name: str | None = None, value: float | None = None) -> LogEntry:
        entry = LogEntry(seq=len(self.messages) + 1, generation=self.generation,
                         kind=kind, text=text, line=line, column=column,
                         name=name, value=value)
        self.messages.append(entry)
        return entry

    def log_diagnostic(self, diag: Diagnostic) -> LogEntry:
        return self.log(diag.level.value, diag.message, diag.line, diag.column)

    def reset_view_state(self):
        """Back to freshly-loaded defaults: everything focused, planes parked."""
        if self.model is None:
            self.selection = SelectionState()
            self.planes = PlaneState.empty()
        else:
            self.selection = SelectionState(focus={ALL_KEY: self.model.all_ids})
            self.planes = PlaneState.for_bounds(self.model.bounds)
        self.encoding = EncodingState()

    def adopt_model(self, model: FiberModel, warnings: list[Diagnostic] = ()):
        self.model = model
        self.env = {}
        self.reset_view_state()
        for diag in warnings:
            self.log_diagnostic(diag)

    def rebase_generation(self):
        """Mark the current state as already seen, so out-of-run setup (model
        preloading) is not attributed to the next run."""
        self.last_fingerprint = state_fingerprint(self)


def visible_ids(model: FiberModel, planes: PlaneState) -> frozenset[int]:
    """Fibers whose centroid lies on the kept (greater-coordinate) side of
    every enabled plane."""
    active = [(PLANE_AXES[p], planes.position[p]) for p in PLANE_ORDER if planes.enabled[p]]
    if not active:
        return model.all_ids
    kept = set()
    for f in model.fibers:
        c = f.centroid()
        if all(c[axis] >= pos for axis, pos in active):
            kept.add(f.id)
    return frozenset(kept)


def effective_focus(session: Session) -> frozenset[int]:
    if session.model is None:
        return frozenset()
    focused: set[int] = set()
    for ids in session.selection.focus.values():
        focused |= ids
    return frozenset(focused) & visible_ids(session.model, session.planes)


def state_fingerprint(session: Session) -> str:
    """Stable digest of the view-independent visual state."""
    h = hashlib.sha256()
    if session.model is not None:
        h.update(serialize_model(session.model).encode("utf-8"))
    focus_repr = sorted((k, sorted(v)) for k, v in session.selection.focus.items())
    h.update(repr(focus_repr).encode("utf-8"))
    planes_repr = [(p, session.planes.position[p], session.planes.enabled[p]) for p in PLANE_ORDER]
    h.update(repr(planes_repr).encode("utf-8"))
    for channel in ("shape", "color", "size", "depth"):
        h.update(repr(sorted(session.encoding.channel(channel).items())).encode("utf-8"))
    return h.hexdigest()
