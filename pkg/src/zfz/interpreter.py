"""Sequential statement execution against a session.

Execution is strictly in source order and stops at the first fatal
diagnostic. Every handler validates fully before mutating, so a fatal
statement leaves no partial effect and session state after a halt equals
the state after running the prefix above the failing line.

Focus-map semantics: each SELECT writes its scope keys. A scope of ALL
replaces the whole map; a non-ALL scope drops any ALL entry (otherwise the
everything-focused state after LOAD would mask it) and accumulates with
other scope keys by union. Repeating a scope key replaces that entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Diagnostic, FatalError, Level
from .encoding import (
    EncodingDirective,
    EncodingState,
    apply_encoding,
    resolve_params,
    validate_directive,
)
from .model import fiber_mean, load_model_file
from .script import ConditionExpr, Script, Statement, TargetSpec
from .state import (
    ALL_KEY,
    FiberSetVal,
    LogEntry,
    ModelHandleVal,
    ScalarVal,
    Session,
    state_fingerprint,
)


@dataclass
class ExecutionOutcome:
    statements_run: int = 0
    halted_at: int | None = None
    messages: list[LogEntry] = field(default_factory=list)
    scene_dirty: bool = False
    generation: int = 0


def _require_model(session: Session, line: int):
    if session.model is None:
        raise FatalError("no model loaded", line)


def _resolve_name(name: str, session: Session) -> frozenset[int] | None:
    model = session.model
    if name in model.bundles:
        return model.bundle_ids(name)
    binding = session.env.get(name)
    if binding is not None:
        if not isinstance(binding, FiberSetVal):
            raise FatalError(f"variable {name!r} is not a fiber set")
        return binding.ids
    matches = [tag for tag in model.bundles if tag.lower() == name.lower()]
    if len(matches) == 1:
        return model.bundle_ids(matches[0])
    return None


def resolve_target(spec: TargetSpec, session: Session) -> frozenset[int]:
    """Union over listed names (bundles or fiber-set variables); OUT complements."""
    model = session.model
    if spec.is_all:
        ids = model.all_ids
    else:
        ids = frozenset()
        for name in spec.names:
            got = _resolve_name(name, session)
            if got is None:
                raise FatalError(f"unknown target {name!r}")
            ids |= got
    if spec.polarity == "OUT":
        return model.all_ids - ids
    return ids


def _scope_entries(spec: TargetSpec, session: Session) -> list[tuple[str, frozenset[int]]]:
    """Focus-map entries for a target: one per name under IN, one combined
    complement entry under OUT, the ALL key for the full scope."""
    model = session.model
    if spec.is_all:
        ids = model.all_ids
        if spec.polarity == "OUT":
            return [("OUT:ALL", frozenset())]
        return [(ALL_KEY, ids)]
    if spec.polarity == "OUT":
        return [("OUT:" + ",".join(spec.names), resolve_target(spec, session))]
    entries = []
    for name in spec.names:
        got = _resolve_name(name, session)
        if got is None:
            raise FatalError(f"unknown target {name!r}")
        entries.append((name, got))
    return entries


def _condition_rhs(cond: ConditionExpr, session: Session) -> float | tuple[float, float]:
    if cond.interval is not None:
        return cond.interval
    if cond.variable is not None:
        binding = session.env.get(cond.variable)
        if binding is None:
            raise FatalError(f"unknown variable {cond.variable!r}")
        if not isinstance(binding, ScalarVal):
            raise FatalError(f"variable {cond.variable!r} is not a number")
        return binding.value
    return cond.value


def eval_condition(cond: ConditionExpr, fiber, env_or_session) -> bool:
    """Compare the fiber's mean metric against the condition's bound(s)."""
    session = env_or_session if isinstance(env_or_session, Session) else Session(env=dict(env_or_session))
    rhs = _condition_rhs(cond, session)
    mean = fiber_mean(fiber, cond.metric)
    if cond.op == "in":
        a, b = rhs
        return a <= mean <= b
    bound = rhs
    if cond.op == "<":
        return mean < bound
    if cond.op == "<=":
        return mean <= bound
    if cond.op == ">":
        return mean > bound
    if cond.op == ">=":
        return mean >= bound
    return mean == bound  # ==


def _matching_ids(cond: ConditionExpr, ids: frozenset[int], session: Session) -> frozenset[int]:
    model = session.model
    return frozenset(fid for fid in ids if eval_condition(cond, model.fiber(fid), session))


def exec_load(stmt: Statement, session: Session):
    resolver = session.load_resolver or load_model_file
    model, warnings = resolver(stmt.path)
    session.adopt_model(model, warnings)
    if stmt.assign_to:
        session.env[stmt.assign_to] = ModelHandleVal(name=stmt.path)


def exec_select(stmt: Statement, session: Session):
    _require_model(session, stmt.line)
    if stmt.spatial is not None:
        if stmt.target.raw is not None:
            raise FatalError("a spatial operation takes no IN/OUT clause", stmt.line)
        plane = stmt.spatial.plane
        session.planes.position[plane] += stmt.spatial.delta
        session.planes.enabled[plane] = True
        return
    if stmt.condition is not None:
        spec = stmt.target
        entries = [
            (key, _matching_ids(stmt.condition, ids, session))
            for key, ids in _scope_entries(spec, session)
        ]
    else:
        if stmt.target.raw is not None:
            raise FatalError("a target-form SELECT takes no IN/OUT clause", stmt.line)
        spec = stmt.select_scope
        entries = _scope_entries(spec, session)
    if spec.is_all:
        session.selection.focus = dict(entries)
    else:
        session.selection.focus.pop(ALL_KEY, None)
        session.selection.focus.update(entries)


def exec_locate(stmt: Statement, session: Session):
    _require_model(session, stmt.line)
    if stmt.assign_to is None:
        raise FatalError("LOCATE requires a result variable", stmt.line)
    ids = resolve_target(stmt.target, session)
    matching = _matching_ids(stmt.condition, ids, session)
    if not matching:
        session.log("warning", f"empty result bound to {stmt.assign_to!r}", stmt.line)
    session.env[stmt.assign_to] = FiberSetVal(ids=matching)


def exec_update(stmt: Statement, session: Session):
    _require_model(session, stmt.line)
    error = validate_directive(stmt.attribute, stmt.mode, stmt.params)
    if error is not None:
        raise FatalError(error, stmt.line)
    if stmt.attribute in ("DEFAULT", "RESET"):
        if stmt.target.raw is not None:
            resolve_target(stmt.target, session)  # names must still be valid
        if stmt.attribute == "DEFAULT":
            # Revoke all data filtering: everything focused, planes parked.
            session.selection = type(session.selection)(focus={ALL_KEY: session.model.all_ids})
            session.planes = type(session.planes).for_bounds(session.model.bounds)
        else:
            session.encoding = EncodingState()
        return
    ids = resolve_target(stmt.target, session)
    directive = EncodingDirective(
        attribute=stmt.attribute,
        mode=stmt.mode,
        params=resolve_params(stmt.attribute, stmt.params),
        fiber_ids=ids,
    )
    session.encoding = apply_encoding(session.encoding, directive)


def _describe_scope(spec: TargetSpec) -> str:
    if spec.is_all:
        base = "the whole model"
    else:
        base = ", ".join(spec.names)
    return f"outside {base}" if spec.polarity == "OUT" else base


def exec_calculate(stmt: Statement, session: Session):
    _require_model(session, stmt.line)
    ids = resolve_target(stmt.target, session)
    scope = _describe_scope(stmt.target)
    if stmt.routine == "NumFibers":
        value = float(len(ids))
        if not ids:
            session.log("notice", f"no fibers in {scope}", stmt.line)
        text = f"Number of fibers in {scope} is {len(ids)}"
    else:
        if not ids:
            raise FatalError("average over empty set", stmt.line)
        metric = "FA" if stmt.routine == "AvgFA" else "LA"
        model = session.model
        value = sum(fiber_mean(model.fiber(fid), metric) for fid in sorted(ids)) / len(ids)
        text = f"Average {metric} over {scope} is {value:.6f}"
    name = stmt.assign_to if stmt.assign_to else stmt.routine
    session.log("result", text, stmt.line, name=name, value=value)
    if stmt.assign_to:
        session.env[stmt.assign_to] = ScalarVal(value=value)


_HANDLERS = {
    "LOAD": exec_load,
    "SELECT": exec_select,
    "LOCATE": exec_locate,
    "UPDATE": exec_update,
    "CALCULATE": exec_calculate,
}


def execute_statement(stmt: Statement, session: Session):
    """Run one statement; FatalError propagates with the statement's line."""
    try:
        _HANDLERS[stmt.verb](stmt, session)
    except FatalError as err:
        if err.diagnostic.line == 0:
            raise FatalError(err.diagnostic.message, stmt.line) from None
        raise


def execute_script(script: Script, session: Session) -> ExecutionOutcome:
    """Execute statements in source order, halting at the first fatal.

    The scene generation advances at the end of the run if the
    view-independent state fingerprint changed.
    """
    outcome = ExecutionOutcome()
    first_message = len(session.messages)

    events: dict[int, dict] = {}
    for diag in script.diagnostics:
        events.setdefault(diag.line, {}).setdefault("diags", []).append(diag)
    for stmt in script.statements:
        events.setdefault(stmt.line, {})["stmt"] = stmt

    for line in sorted(events):
        event = events[line]
        halted = False
        for diag in event.get("diags", ()):
            session.log_diagnostic(diag)
            if diag.level is Level.FATAL:
                outcome.halted_at = line
                halted = True
                break
        if halted:
            break
        stmt = event.get("stmt")
        if stmt is None:
            continue
        try:
            execute_statement(stmt, session)
            outcome.statements_run += 1
        except FatalError as err:
            session.log_diagnostic(err.diagnostic)
            outcome.halted_at = err.diagnostic.line or line
            break

    after = state_fingerprint(session)
    if after != session.last_fingerprint:
        session.generation += 1
        session.last_fingerprint = after
        outcome.scene_dirty = True
    outcome.generation = session.generation
    outcome.messages = session.messages[first_message:]
    return outcome
