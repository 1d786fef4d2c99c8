"""zfz: a declarative scripting language and deterministic scene engine for
exploring DTI fiber-tract models."""

from .diagnostics import Diagnostic, FatalError, Level
from .interpreter import ExecutionOutcome, execute_script, execute_statement, resolve_target
from .model import (
    Fiber,
    FiberModel,
    Vertex,
    fiber_mean,
    fractional_anisotropy,
    linear_anisotropy,
    load_model_file,
    parse_model,
    serialize_model,
)
from .render import SceneSnapshot, emit_snapshot, serialize_snapshot
from .script import Script, Statement, format_script, parse_script, tokenize
from .state import Session
from .synthetic import generate_synthetic_brain

__all__ = [
    "Diagnostic",
    "ExecutionOutcome",
    "FatalError",
    "Fiber",
    "FiberModel",
    "Level",
    "SceneSnapshot",
    "Script",
    "Session",
    "Statement",
    "Vertex",
    "emit_snapshot",
    "execute_script",
    "execute_statement",
    "fiber_mean",
    "format_script",
    "fractional_anisotropy",
    "generate_synthetic_brain",
    "linear_anisotropy",
    "load_model_file",
    "parse_model",
    "parse_script",
    "resolve_target",
    "serialize_model",
    "serialize_snapshot",
    "tokenize",
]
