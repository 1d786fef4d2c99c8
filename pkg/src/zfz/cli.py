"""Command-line gateway: batch script runs, script checking, data generation.

    zfz run SCRIPT [--data FILE | --synthetic SEED,N] [--view X,Y,Z]
                   [--export PATH] [--meshes]
    zfz check SCRIPT [SCRIPT ...]
    zfz generate SEED N OUT
    zfz serve [--host HOST]          (port from the ZFZ_PORT env var)

``run`` executes the script against the given data; when --data/--synthetic
is supplied the model is preloaded and LOAD paths inside the script resolve
to it, so scripts written against other machines' files run unchanged.
Exit code 0 means no fatal diagnostic was produced.
"""

from __future__ import annotations

import argparse
import os
import sys

from .diagnostics import FatalError, Level
from .model import load_model_file, serialize_model
from .render import DEFAULT_VIEW, emit_snapshot, serialize_snapshot
from .script import parse_script
from .state import LogEntry, Session
from .interpreter import execute_script
from .synthetic import generate_synthetic_brain

DEFAULT_PORT = 8642


def _parse_floats(text: str, count: int, what: str) -> tuple[float, ...]:
    parts = text.split(",")
    if len(parts) != count:
        raise argparse.ArgumentTypeError(f"{what} needs {count} comma-separated values")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what}: not numeric: {text!r}") from None


def _render_entry(entry: LogEntry) -> str:
    where = f" (line {entry.line})" if entry.line else ""
    return f"{entry.kind}: {entry.text}{where}"


def cmd_run(args) -> int:
    try:
        with open(args.script, "r", encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        print(f"fatal: cannot read script {args.script!r}: {exc.strerror}", file=sys.stderr)
        return 1

    session = Session()
    script = parse_script(source)
    model = None
    warnings = []
    if args.synthetic is not None:
        seed, n = args.synthetic
        model = generate_synthetic_brain(int(seed), int(n))
    elif args.data is not None:
        try:
            model, warnings = load_model_file(args.data)
        except FatalError as err:
            print(_render_entry(LogEntry(0, 0, "fatal", err.diagnostic.message, err.diagnostic.line)))
            return 1
    if model is not None:
        session.load_resolver = lambda path: (model, [])
        if not any(s.verb == "LOAD" for s in script.statements):
            # LOAD-less scripts still need the model; scripts with LOAD adopt
            # it themselves so generation counting matches a service run.
            session.adopt_model(model, warnings)
            session.rebase_generation()
    outcome = execute_script(script, session)
    for entry in session.messages:
        print(_render_entry(entry))

    if args.export:
        if session.model is not None:
            view = args.view if args.view else DEFAULT_VIEW
            snap = emit_snapshot(session, view, include_meshes=args.meshes)
            with open(args.export, "wb") as fh:
                fh.write(serialize_snapshot(snap).encode("utf-8"))
        else:
            print("notice: no model loaded at halt, snapshot not exported")
    return 1 if outcome.halted_at is not None else 0


def cmd_check(args) -> int:
    failed = False
    for path in args.scripts:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                source = fh.read()
        except OSError as exc:
            print(f"{path}: fatal: cannot read: {exc.strerror}")
            failed = True
            continue
        script = parse_script(source)
        for diag in script.diagnostics:
            print(f"{path}: {diag.render()}")
            if diag.level is Level.FATAL:
                failed = True
        if not script.diagnostics:
            print(f"{path}: ok ({len(script.statements)} statements)")
    return 1 if failed else 0


def cmd_generate(args) -> int:
    if args.n < 1:
        print("fatal: fiber count per bundle must be >= 1", file=sys.stderr)
        return 1
    model = generate_synthetic_brain(args.seed, args.n)
    try:
        with open(args.out, "wb") as fh:
            fh.write(serialize_model(model).encode("utf-8"))
    except OSError as exc:
        print(f"fatal: cannot write {args.out!r}: {exc.strerror}", file=sys.stderr)
        return 1
    print(f"wrote {len(model.fibers)} fibers ({args.n} per bundle) to {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    port = int(os.environ.get("ZFZ_PORT", DEFAULT_PORT))
    uvicorn.run(create_app(), host=args.host, port=port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zfz", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a script and export a scene snapshot")
    run.add_argument("script")
    run.add_argument("--data", help="ZFZ model file; LOAD paths resolve to it")
    run.add_argument("--synthetic", type=lambda s: _parse_floats(s, 2, "--synthetic"),
                     metavar="SEED,N", help="use the generated model instead of a file")
    run.add_argument("--view", type=lambda s: _parse_floats(s, 3, "--view"),
                     metavar="X,Y,Z", help="view direction for depth cues")
    run.add_argument("--export", metavar="PATH", help="write the scene snapshot here")
    run.add_argument("--meshes", action="store_true", help="include tessellated meshes")
    run.set_defaults(func=cmd_run)

    check = sub.add_parser("check", help="parse scripts and report diagnostics")
    check.add_argument("scripts", nargs="+")
    check.set_defaults(func=cmd_check)

    gen = sub.add_parser("generate", help="write a deterministic synthetic model")
    gen.add_argument("seed", type=int)
    gen.add_argument("n", type=int, help="fibers per bundle")
    gen.add_argument("out")
    gen.set_defaults(func=cmd_generate)

    serve = sub.add_parser("serve", help="start the session service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
