"""Acceptance suite: one test per criterion, at its stated tolerance.

Each test prints a PASS line on success; the conftest terminal-summary hook
also prints one PASS/FAIL line per criterion at the end of the run.
"""

import math
import random
import re

import numpy as np
import pytest
from fastapi.testclient import TestClient

from conftest import CORPUS_FILES, corpus_text, run_text
from zfz.cli import main
from zfz.diagnostics import Level
from zfz.encoding import EncodingState
from zfz.interpreter import execute_statement, execute_script
from zfz.mesh import tessellate_ribbon, tessellate_tube
from zfz.model import (
    Fiber,
    Vertex,
    fiber_mean,
    fractional_anisotropy,
    linear_anisotropy,
    serialize_model,
)
from zfz.render import compute_vertex_attributes, depth_normalize, emit_snapshot, serialize_snapshot
from zfz.script import KEYWORDS, parse_script
from zfz.service import create_app
from zfz.state import Session, effective_focus, visible_ids
from zfz.synthetic import generate_synthetic_brain

SCENARIOS = ("compose_encodings", "roi_planes", "quantify_model")

FUZZ_WORDS = sorted(
    [w for w in KEYWORDS.values() if w != "NumFiber"] + ["ALL"],
    key=len,
    reverse=True,
)
FUZZ_RE = re.compile(r"\b(" + "|".join(FUZZ_WORDS) + r")\b", re.IGNORECASE)


def fresh_session(brain):
    s = Session(load_resolver=lambda path: (brain, []))
    s.adopt_model(brain)
    s.rebase_generation()
    return s


def brute_mean(fiber, metric):
    vals = [v.fa if metric == "FA" else v.la for v in fiber.vertices]
    return sum(vals) / len(vals)


def brute_scope(model, names, polarity="IN"):
    all_ids = {f.id for f in model.fibers}
    ids = all_ids if names == "ALL" else {f.id for f in model.fibers if f.bundle in names}
    return all_ids - ids if polarity == "OUT" else ids


def brute_centroid(fiber):
    n = len(fiber.vertices)
    return tuple(sum(v.position[i] for v in fiber.vertices) / n for i in range(3))


def _report(n, text):
    print(f"ACCEPTANCE {n:02d} PASS - {text}")


# -------------------------------------------------------------------------


def test_c01_corpus_parses_and_case_fuzz_stable():
    rng = random.Random(101)
    for path in CORPUS_FILES:
        source = path.read_text()
        script = parse_script(source)
        assert not script.fatal_diagnostics, (path.name, script.diagnostics)
        assert script.statements
        for _ in range(100):
            fuzzed = FUZZ_RE.sub(
                lambda m: "".join(c.upper() if rng.random() < 0.5 else c.lower() for c in m.group(0)),
                source,
            )
            refuzzed = parse_script(fuzzed)
            assert not refuzzed.fatal_diagnostics, (path.name, fuzzed)
            assert refuzzed.statements == script.statements, (path.name, fuzzed)
    _report(1, f"{len(CORPUS_FILES)} corpus scripts parse; 100 casings each leave the AST unchanged")


def test_c02_selection_oracle_200_randomized(brain):
    rng = random.Random(202)
    bundles = sorted(brain.bundles)
    for trial in range(200):
        metric = rng.choice(["FA", "LA"])
        roll = rng.random()
        if roll < 0.4:
            a = round(rng.uniform(0.0, 0.8), 3)
            b = round(a + rng.uniform(0.0, 0.3), 3)
            cond_text = f"{metric} in [{a},{b}]"
            test = lambda m, a=a, b=b: a <= m <= b
        else:
            op = rng.choice(["<", "<=", ">", ">="])
            bound = round(rng.uniform(0.2, 0.9), 3)
            cond_text = f"{metric} {op} {bound}"
            ops = {"<": lambda m: m < bound, "<=": lambda m: m <= bound,
                   ">": lambda m: m > bound, ">=": lambda m: m >= bound}
            test = ops[op]

        scope_roll = rng.random()
        if scope_roll < 0.2:
            clause, names, polarity = "", "ALL", "IN"
        elif scope_roll < 0.35:
            clause, names, polarity = ' IN "ALL"', "ALL", "IN"
        elif scope_roll < 0.8:
            chosen = rng.sample(bundles, rng.randint(1, 3))
            clause, names, polarity = f' IN "{",".join(chosen)}"', set(chosen), "IN"
        else:
            chosen = rng.sample(bundles, rng.randint(1, 2))
            clause, names, polarity = f' OUT "{",".join(chosen)}"', set(chosen), "OUT"

        session = fresh_session(brain)
        out = run_text(session, f'SELECT "{cond_text}"{clause}')
        assert out.halted_at is None, (trial, cond_text, clause)
        expected = {
            fid for fid in brute_scope(brain, names, polarity)
            if test(brute_mean(brain.fibers[fid], metric))
        }
        assert effective_focus(session) == expected, (trial, cond_text, clause)
    _report(2, "200 randomized condition SELECTs equal the brute-force scan exactly")


def test_c03_locate_purity_over_corpus(brain):
    locates_checked = 0
    for path in CORPUS_FILES:
        script = parse_script(path.read_text())
        if not any(s.verb == "LOCATE" for s in script.statements):
            continue
        session = fresh_session(brain)
        for stmt in script.statements:
            if stmt.verb == "LOCATE":
                before = serialize_snapshot(emit_snapshot(session))
                execute_statement(stmt, session)
                after = serialize_snapshot(emit_snapshot(session))
                assert before == after, (path.name, stmt.line)
                locates_checked += 1
            else:
                execute_statement(stmt, session)
    assert locates_checked >= 4
    _report(3, f"snapshot bytes identical across {locates_checked} corpus LOCATEs")


def test_c04_metric_suite(brain):
    rng = random.Random(404)
    for _ in range(300):
        e = tuple(rng.uniform(0.01, 10.0) for _ in range(3))
        k = rng.uniform(0.001, 500.0)
        scaled = tuple(k * v for v in e)
        assert abs(fractional_anisotropy(e) - fractional_anisotropy(scaled)) < 1e-12
        assert abs(linear_anisotropy(e) - linear_anisotropy(scaled)) < 1e-12
    assert fractional_anisotropy((1, 1, 1)) == 0.0
    assert fractional_anisotropy((1, 0, 0)) == 1.0
    assert linear_anisotropy((2, 1, 1)) == 0.25

    for f in brain.fibers:
        for metric in ("FA", "LA"):
            vals = [v.fa if metric == "FA" else v.la for v in f.vertices]
            assert min(vals) <= fiber_mean(f, metric) <= max(vals)

    for tag in sorted(brain.bundles):
        ids = sorted(brute_scope(brain, {tag}))
        expected_avg = sum(brute_mean(brain.fibers[i], "FA") for i in ids) / len(ids)
        session = fresh_session(brain)
        out = run_text(session, f'n = CALCULATE NumFibers IN "{tag}"\na = CALCULATE AvgFA IN "{tag}"')
        assert out.halted_at is None
        assert session.env["n"].value == len(ids) == 10
        assert session.env["a"].value == expected_avg  # identical accumulation order: exact
    _report(4, "scale invariance at 1e-12, endpoints exact, means bounded, bundle stats exact")


def test_c05_plane_algebra_and_scenario2(brain):
    rng = random.Random(505)
    for _ in range(30):
        a = rng.randint(-400, 400) / 8.0
        b = rng.randint(-400, 400) / 8.0
        plane = rng.choice(["sagittal", "coronal", "axial"])
        s1, s2 = fresh_session(brain), fresh_session(brain)
        run_text(s1, f'SELECT "{plane} {a:+.3f}"\nSELECT "{plane} {b:+.3f}"')
        run_text(s2, f'SELECT "{plane} {a + b:+.3f}"')
        assert abs(s1.planes.position[plane] - s2.planes.position[plane]) < 1e-9
        assert visible_ids(brain, s1.planes) == visible_ids(brain, s2.planes)
        assert effective_focus(s1) == effective_focus(s2)

    session = fresh_session(brain)
    out = run_text(session, corpus_text("roi_planes"))
    assert out.halted_at is None
    lo = brain.bounds.lo
    assert session.planes.position["axial"] == pytest.approx(lo[2] + 63.35 + 7.2, abs=1e-9)
    assert session.planes.position["sagittal"] == pytest.approx(lo[0] + 71 - 0.25, abs=1e-9)
    assert session.planes.position["coronal"] == pytest.approx(lo[1] - 48.5, abs=1e-9)
    assert all(session.planes.enabled.values())

    positions = {0: session.planes.position["sagittal"],
                 1: session.planes.position["coronal"],
                 2: session.planes.position["axial"]}
    brute_kept = {
        f.id for f in brain.fibers
        if all(brute_centroid(f)[axis] >= pos for axis, pos in positions.items())
    }
    assert visible_ids(brain, session.planes) == brute_kept
    _report(5, "plane deltas compose additively; scenario-2 positions and culled set match")


def test_c06_update_combination_rules_exhaustive(brain):
    # independent restatement of the combination table
    table = {
        "shape": ({"line", "tube", "ribbon"}, 0),
        "color": ({"FA", "LA"}, 0),
        "size": ({"FA", "LA"}, 2),
        "depth": ({"size", "color", "value", "transparency"}, 2),
    }

    def legal(attr, mode, nparams):
        if attr in ("DEFAULT", "RESET"):
            return mode is None and nparams is None
        modes, arity = table[attr]
        if mode is None or mode not in modes:
            return False
        return nparams is None or nparams == arity

    all_modes = [None, "line", "tube", "ribbon", "FA", "LA", "size", "color", "value", "transparency"]
    param_choices = [None, 1, 2, 3]
    params_text = {1: "0.3", 2: "0.3,0.8", 3: "0.3,0.8,0.9"}

    legal_seen = illegal_seen = 0
    for attr in ("shape", "color", "size", "depth", "DEFAULT", "RESET"):
        for mode in all_modes:
            for nparams in param_choices:
                text = f"UPDATE {attr}"
                if mode is not None:
                    text += f" BY {mode}"
                if nparams is not None:
                    text += f" WITH {params_text[nparams]}"
                text += ' IN "CC"'
                session = fresh_session(brain)
                out = run_text(session, text)
                if legal(attr, mode, nparams):
                    assert out.halted_at is None, text
                    legal_seen += 1
                else:
                    assert out.halted_at == 1, text
                    assert any(m.kind == "fatal" for m in out.messages), text
                    illegal_seen += 1
    assert legal_seen == 3 + 2 + 2 * 2 + 4 * 2 + 1 + 1
    _report(6, f"{legal_seen} legal combinations execute; {illegal_seen} illegal ones are fatal")


def test_c07_reset_and_default_restore(brain):
    rng = random.Random(707)
    bundles = sorted(brain.bundles)
    fresh_attrs = compute_vertex_attributes(
        brain, brain.all_ids, brain.all_ids, EncodingState(), (0, 0, -1)
    )
    for _ in range(10):
        session = fresh_session(brain)
        lines = []
        for _ in range(rng.randint(1, 8)):
            tag = rng.choice(bundles)
            kind = rng.choice(["shape", "color", "size", "depth"])
            if kind == "shape":
                lines.append(f'UPDATE shape BY {rng.choice(["line", "tube", "ribbon"])} IN "{tag}"')
            elif kind == "color":
                lines.append(f'UPDATE color BY {rng.choice(["FA", "LA"])} IN "{tag}"')
            elif kind == "size":
                lines.append(f'UPDATE size BY FA WITH {rng.uniform(0.1, 1):.2f},{rng.uniform(1, 5):.2f} IN "{tag}"')
            else:
                lines.append(f'UPDATE depth BY {rng.choice(["size", "color", "value", "transparency"])} IN "{tag}"')
        out = run_text(session, "\n".join(lines))
        assert out.halted_at is None
        run_text(session, "UPDATE RESET")
        after = compute_vertex_attributes(
            brain, effective_focus(session), brain.all_ids, session.encoding, (0, 0, -1)
        )
        assert after == fresh_attrs

    session = fresh_session(brain)
    run_text(session, 'SELECT "FA < 0.5" IN "CST"\nSELECT "axial +40"\nSELECT "coronal +30"')
    assert effective_focus(session) != brain.all_ids
    run_text(session, "UPDATE DEFAULT")
    assert effective_focus(session) == brain.all_ids
    assert not any(session.planes.enabled.values())
    assert session.planes.position["axial"] == brain.bounds.lo[2]
    _report(7, "RESET restores default attributes exactly; DEFAULT revokes all filtering")


def test_c08_depth_cues():
    rng = random.Random(808)
    pts = [(rng.uniform(-80, 80), rng.uniform(-80, 80), rng.uniform(-80, 80)) for _ in range(1000)]
    view = (0.2, -0.4, 0.6)
    unit = np.asarray(view) / np.linalg.norm(view)
    raw = [float(np.dot(p, unit)) for p in pts]
    vals = depth_normalize(pts, view, 0.2, 0.8)
    assert all(0.2 <= v <= 0.8 for v in vals)
    # raw-depth order must equal mapped order (stable sort keeps ties adjacent)
    order = np.argsort(raw, kind="stable")
    sorted_vals = [vals[i] for i in order]
    assert sorted_vals == sorted(vals)
    assert all(a <= b for a, b in zip(sorted_vals, sorted_vals[1:]))
    assert vals[raw.index(min(raw))] == 0.2
    assert vals[raw.index(max(raw))] == 0.8
    _report(8, "depth values bounded, order preserving, extremes map to 0.2/0.8 exactly")


def test_c09_snapshot_determinism_cli_and_service(tmp_path, brain):
    payload = serialize_model(brain)
    for name in SCENARIOS:
        script_path = str((tmp_path / f"{name}.zfz"))
        with open(script_path, "w") as fh:
            fh.write(corpus_text(name))
        e1 = tmp_path / f"{name}.1.scene"
        e2 = tmp_path / f"{name}.2.scene"
        assert main(["run", script_path, "--synthetic", "1,10", "--export", str(e1)]) == 0
        assert main(["run", script_path, "--synthetic", "1,10", "--export", str(e2)]) == 0
        assert e1.read_bytes() == e2.read_bytes(), name

        client = TestClient(create_app())
        sid = client.post("/sessions").json()["session_id"]
        assert client.post(f"/sessions/{sid}/model", content=payload).status_code == 200
        r = client.post(f"/sessions/{sid}/run", json={"script": corpus_text(name), "mode": "full"})
        assert r.json()["halted_at"] is None, name
        svc = client.get(f"/sessions/{sid}/scene").text.encode("utf-8")
        assert svc == e1.read_bytes(), name
    _report(9, "scenario exports byte-identical across runs and across CLI/service")


def test_c10_stop_on_fatal_prefix_equality(brain):
    full = (
        'SELECT "CC"\n'
        'SELECT "FA < 0.6" IN "CST"\n'
        'SELECT "FA >= undefinedvar" IN "CC"\n'
        'UPDATE shape BY ribbon IN "CG"\n'
        "CALCULATE NumFibers\n"
    )
    halted = fresh_session(brain)
    out = execute_script(parse_script(full), halted)
    assert out.halted_at == 3
    assert out.statements_run == 2

    prefix = fresh_session(brain)
    run_text(prefix, 'SELECT "CC"\nSELECT "FA < 0.6" IN "CST"')

    assert serialize_snapshot(emit_snapshot(halted)) == serialize_snapshot(emit_snapshot(prefix))
    assert halted.env == prefix.env
    assert halted.selection.focus == prefix.selection.focus
    assert halted.encoding == prefix.encoding
    fatal = [m for m in out.messages if m.kind == "fatal"]
    assert len(fatal) == 1 and fatal[0].line == 3
    _report(10, "line-3 fatal runs exactly 2 statements; state equals the 2-line prefix run")


def test_c11_tessellation():
    def straight(n):
        return Fiber(0, "CC", tuple(Vertex(0.0, 0.0, 2.0 * i, 0.5, 0.5) for i in range(n)))

    def arc(n, radius):
        pts = []
        for k in range(n):
            t = (math.pi / 2) * k / (n - 1)
            pts.append(Vertex(radius * math.cos(t), radius * math.sin(t), 0.0, 0.5, 0.5))
        return Fiber(0, "CC", tuple(pts))

    def worst_ring_error(fiber, sides, radius):
        pts = [v.position for v in fiber.vertices]
        mesh = tessellate_tube(fiber, [radius] * len(pts), sides=sides)
        assert len(mesh.vertices) == len(pts) * sides
        assert len(mesh.triangles) == 2 * sides * (len(pts) - 1)
        worst = 0.0
        arr = [np.asarray(p) for p in pts]
        for i, v in enumerate(mesh.vertices):
            k = i // sides
            best = math.inf
            for s in range(max(0, k - 3), min(len(pts) - 1, k + 3)):
                a, b = arr[s], arr[s + 1]
                ab = b - a
                t = np.clip(np.dot(np.asarray(v) - a, ab) / np.dot(ab, ab), 0.0, 1.0)
                best = min(best, float(np.linalg.norm(np.asarray(v) - (a + t * ab))))
            worst = max(worst, abs(best - radius))
        return worst

    assert worst_ring_error(straight(12), sides=4, radius=1.0) < 1e-6
    assert worst_ring_error(arc(1000, 30.0), sides=8, radius=1.0) < 1e-6

    ribbon = tessellate_ribbon(straight(2), width=1.0)
    assert len(ribbon.vertices) == 4
    assert len(ribbon.triangles) == 2
    _report(11, "ring distances within 1e-6 on straight and arc fibers; count formulas exact")
