#!/usr/bin/env python3
"""Start the session service, serving the browser studio when it is built.

Build the studio first (cd frontend && npm install && npm run build), then:

    python3 scripts/serve_studio.py            # port from ZFZ_PORT, default 8642
"""

import os
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

import uvicorn  # noqa: E402
from fastapi.staticfiles import StaticFiles  # noqa: E402

from zfz.service import create_app  # noqa: E402


def main():
    app = create_app()
    frontend = REPO / "frontend"
    if (frontend / "dist").is_dir():
        # index.html resolves ./dist and ./node_modules relative to this root
        app.mount("/", StaticFiles(directory=str(frontend), html=True), name="studio")
    else:
        print(f"note: {frontend}/dist not found (run `npm run build` there); serving the API only")
    port = int(os.environ.get("ZFZ_PORT", 8642))
    uvicorn.run(app, host=os.environ.get("ZFZ_HOST", "127.0.0.1"), port=port)


if __name__ == "__main__":
    main()
