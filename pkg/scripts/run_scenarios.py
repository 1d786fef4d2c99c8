#!/usr/bin/env python3
"""Run the bundled example scripts against the synthetic brain and export
scene snapshots into out/.

Usage: python3 scripts/run_scenarios.py [--seed 1] [--fibers 10]
"""

import argparse
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from zfz.interpreter import execute_script  # noqa: E402
from zfz.render import emit_snapshot, serialize_snapshot  # noqa: E402
from zfz.script import parse_script  # noqa: E402
from zfz.state import Session  # noqa: E402
from zfz.synthetic import generate_synthetic_brain  # noqa: E402


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--fibers", type=int, default=10, help="fibers per bundle")
    parser.add_argument("--out", default=str(REPO / "out"))
    args = parser.parse_args()

    model = generate_synthetic_brain(args.seed, args.fibers)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    for path in sorted((REPO / "corpus").glob("*.zfz")):
        session = Session(load_resolver=lambda p: (model, []))
        script = parse_script(path.read_text())
        if not any(s.verb == "LOAD" for s in script.statements):
            session.adopt_model(model)
            session.rebase_generation()
        outcome = execute_script(script, session)
        status = "halted" if outcome.halted_at else "ok"
        print(f"{path.stem:24s} {status:6s} statements={outcome.statements_run}")
        for entry in outcome.messages:
            print(f"    {entry.kind}: {entry.text}")
        if session.model is not None:
            snapshot = serialize_snapshot(emit_snapshot(session))
            (out_dir / f"{path.stem}.scene").write_text(snapshot)
    print(f"\nsnapshots in {out_dir}")


if __name__ == "__main__":
    main()
