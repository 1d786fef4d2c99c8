import pytest
from fastapi.testclient import TestClient

from conftest import CORPUS, CORPUS_FILES, corpus_text
from zfz.cli import main
from zfz.model import parse_model, serialize_model
from zfz.service import create_app
from zfz.synthetic import generate_synthetic_brain


@pytest.fixture
def client():
    return TestClient(create_app())


@pytest.fixture(scope="module")
def brain_payload():
    return serialize_model(generate_synthetic_brain(1, 10))


def new_session(client):
    r = client.post("/sessions")
    assert r.status_code == 201
    return r.json()["session_id"]


# --- CLI --------------------------------------------------------------------


def test_generate_deterministic(tmp_path):
    a, b = tmp_path / "a.zfz", tmp_path / "b.zfz"
    assert main(["generate", "1", "10", str(a)]) == 0
    assert main(["generate", "1", "10", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    model, diags = parse_model(a.read_text())
    assert len(model.fibers) == 50
    assert diags == []


def test_generate_seeds_differ(tmp_path):
    a, b = tmp_path / "a.zfz", tmp_path / "b.zfz"
    main(["generate", "1", "10", str(a)])
    main(["generate", "2", "10", str(b)])
    assert a.read_bytes() != b.read_bytes()


def test_generate_rejects_bad_count(tmp_path):
    assert main(["generate", "1", "0", str(tmp_path / "x.zfz")]) == 1


def test_check_corpus_clean(capsys):
    rc = main(["check"] + [str(p) for p in CORPUS_FILES])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.count(": ok") == len(CORPUS_FILES)


def test_check_reports_fatal(tmp_path, capsys):
    bad = tmp_path / "bad.zfz"
    bad.write_text('SELEKT "CC"\n')
    assert main(["check", str(bad)]) == 1
    assert "unknown verb" in capsys.readouterr().out


def test_run_exit_codes(tmp_path, capsys):
    script = tmp_path / "ok.zfz"
    script.write_text('SELECT "CC"\n')
    assert main(["run", str(script), "--synthetic", "1,10"]) == 0

    bad = tmp_path / "bad.zfz"
    bad.write_text('SELECT "CC"\nWOBBLE "x"\n')
    capsys.readouterr()
    assert main(["run", str(bad), "--synthetic", "1,10"]) == 1
    out = capsys.readouterr().out
    assert "fatal" in out and "line 2" in out


def test_run_exports_partial_snapshot_on_fatal(tmp_path):
    bad = tmp_path / "bad.zfz"
    bad.write_text('SELECT "CC"\nSELECT "FA >= missing" IN "CC"\nSELECT "CST"\n')
    export = tmp_path / "scene.txt"
    assert main(["run", str(bad), "--synthetic", "1,10", "--export", str(export)]) == 1
    text = export.read_text()
    assert text.startswith("zfzscene 1")

    prefix = tmp_path / "prefix.zfz"
    prefix.write_text('SELECT "CC"\n')
    ref = tmp_path / "ref.txt"
    main(["run", str(prefix), "--synthetic", "1,10", "--export", str(ref)])
    assert export.read_bytes() == ref.read_bytes()


def test_run_with_data_file(tmp_path):
    data = tmp_path / "brain.zfz"
    main(["generate", "4", "3", str(data)])
    script = tmp_path / "s.zfz"
    script.write_text('LOAD "whatever/path.data"\nCALCULATE NumFibers\n')
    export = tmp_path / "scene.txt"
    assert main(["run", str(script), "--data", str(data), "--export", str(export)]) == 0
    assert "fibers 15" in export.read_text()


def test_run_meshes_flag(tmp_path):
    script = tmp_path / "s.zfz"
    script.write_text('SELECT "CC"\n')
    export = tmp_path / "scene.txt"
    main(["run", str(script), "--synthetic", "1,2", "--export", str(export), "--meshes"])
    assert "\nmeshes " in export.read_text()


def test_run_view_flag_changes_depth_cues(tmp_path):
    script = tmp_path / "s.zfz"
    script.write_text('UPDATE depth BY color IN "CC"\n')
    e1, e2 = tmp_path / "a.txt", tmp_path / "b.txt"
    main(["run", str(script), "--synthetic", "1,4", "--export", str(e1), "--view", "0,0,-1"])
    main(["run", str(script), "--synthetic", "1,4", "--export", str(e2), "--view", "1,0,0"])
    assert e1.read_bytes() != e2.read_bytes()


# --- service ----------------------------------------------------------------


def test_session_ids_unique_and_listed(client):
    ids = {new_session(client) for _ in range(100)}
    assert len(ids) == 100
    listed = client.get("/sessions").json()["sessions"]
    assert set(listed) == ids


def test_upload_summary(client, brain_payload):
    sid = new_session(client)
    r = client.post(f"/sessions/{sid}/model", content=brain_payload)
    assert r.status_code == 200
    body = r.json()
    assert body["name"] == "model1"
    assert body["fibers"] == 50
    assert body["bundles"] == ["CC", "CG", "CST", "IFO", "ILF"]


def test_upload_garbage_422(client):
    sid = new_session(client)
    r = client.post(f"/sessions/{sid}/model", content="not a model")
    assert r.status_code == 422
    assert "unrecognized format" in r.json()["detail"]["message"]


def test_scene_before_model_is_error(client):
    sid = new_session(client)
    r = client.get(f"/sessions/{sid}/scene")
    assert r.status_code == 409


def test_load_uploaded_model_by_name(client, brain_payload):
    sid = new_session(client)
    name = client.post(f"/sessions/{sid}/model", content=brain_payload).json()["name"]
    r = client.post(f"/sessions/{sid}/run",
                    json={"script": f'LOAD "uploaded:{name}"', "mode": "full"})
    assert r.status_code == 200
    assert r.json()["halted_at"] is None
    assert client.get(f"/sessions/{sid}/scene").status_code == 200


def test_load_bare_path_redirects_with_notice(client, brain_payload):
    sid = new_session(client)
    client.post(f"/sessions/{sid}/model", content=brain_payload)
    r = client.post(f"/sessions/{sid}/run",
                    json={"script": 'LOAD "/somewhere/else.data"', "mode": "full"})
    assert r.json()["halted_at"] is None
    notices = [m for m in r.json()["messages"] if m["level"] == "notice"]
    assert any("redirected" in m["text"] for m in notices)


def test_load_bare_path_without_upload_fatal(client):
    sid = new_session(client)
    r = client.post(f"/sessions/{sid}/run",
                    json={"script": 'LOAD "/etc/passwd"', "mode": "full"})
    assert r.json()["halted_at"] == 1


def test_single_statement_mode_dirty_tracking(client, brain_payload):
    sid = new_session(client)
    client.post(f"/sessions/{sid}/model", content=brain_payload)
    client.post(f"/sessions/{sid}/run", json={"script": 'LOAD "uploaded:model1"', "mode": "full"})
    r1 = client.post(f"/sessions/{sid}/run", json={"script": 'SELECT "CC"', "mode": "single"})
    assert r1.json()["scene_dirty"] is True
    r2 = client.post(f"/sessions/{sid}/run",
                     json={"script": 'x = LOCATE "FA < 0.9" IN "CC"', "mode": "single"})
    assert r2.json()["scene_dirty"] is False
    assert r2.json()["generation"] == r1.json()["generation"]


def test_full_mode_resets_variables(client, brain_payload):
    sid = new_session(client)
    client.post(f"/sessions/{sid}/model", content=brain_payload)
    script = 'LOAD "uploaded:model1"\nx = LOCATE "FA < 0.9" IN "CC"\n'
    client.post(f"/sessions/{sid}/run", json={"script": script, "mode": "full"})
    assert [v["name"] for v in client.get(f"/sessions/{sid}/variables").json()["variables"]] == ["x"]
    client.post(f"/sessions/{sid}/run",
                json={"script": 'LOAD "uploaded:model1"', "mode": "full"})
    assert client.get(f"/sessions/{sid}/variables").json()["variables"] == []


def test_variables_endpoint_lists_scalar(client, brain_payload):
    sid = new_session(client)
    client.post(f"/sessions/{sid}/model", content=brain_payload)
    client.post(f"/sessions/{sid}/run",
                json={"script": corpus_text("quantify_model"), "mode": "full"})
    variables = client.get(f"/sessions/{sid}/variables").json()["variables"]
    assert variables == [{"name": "cstFAavg", "kind": "scalar", "value": pytest.approx(0.575)}]


def test_scene_reads_idempotent(client, brain_payload):
    sid = new_session(client)
    client.post(f"/sessions/{sid}/model", content=brain_payload)
    client.post(f"/sessions/{sid}/run",
                json={"script": 'LOAD "uploaded:model1"\nSELECT "CC"', "mode": "full"})
    a = client.get(f"/sessions/{sid}/scene").text
    b = client.get(f"/sessions/{sid}/scene").text
    assert a == b
    m1 = client.get(f"/sessions/{sid}/messages").json()
    m2 = client.get(f"/sessions/{sid}/messages").json()
    assert m1 == m2


def test_messages_since_cursor(client, brain_payload):
    sid = new_session(client)
    client.post(f"/sessions/{sid}/model", content=brain_payload)
    client.post(f"/sessions/{sid}/run",
                json={"script": 'LOAD "uploaded:model1"\nCALCULATE NumFibers IN "CST"', "mode": "full"})
    all_msgs = client.get(f"/sessions/{sid}/messages").json()["messages"]
    assert all_msgs
    result = [m for m in all_msgs if m["level"] == "result"]
    assert result and result[0]["value"] == 10
    cursor = all_msgs[-1]["seq"]
    client.post(f"/sessions/{sid}/run",
                json={"script": 'CALCULATE NumFibers IN "CG"', "mode": "single"})
    newer = client.get(f"/sessions/{sid}/messages", params={"since": cursor}).json()["messages"]
    assert len(newer) == 1
    assert all(m["seq"] > cursor for m in newer)


def test_run_fatal_keeps_session_usable(client, brain_payload):
    sid = new_session(client)
    client.post(f"/sessions/{sid}/model", content=brain_payload)
    r = client.post(f"/sessions/{sid}/run",
                    json={"script": 'LOAD "uploaded:model1"\nSELECT "FA > x" IN "CC"', "mode": "full"})
    assert r.json()["halted_at"] == 2
    r2 = client.post(f"/sessions/{sid}/run", json={"script": 'SELECT "CC"', "mode": "single"})
    assert r2.json()["halted_at"] is None


def test_session_isolation(client, brain_payload):
    a, b = new_session(client), new_session(client)
    for sid in (a, b):
        client.post(f"/sessions/{sid}/model", content=brain_payload)
        client.post(f"/sessions/{sid}/run", json={"script": 'LOAD "uploaded:model1"', "mode": "full"})
    client.post(f"/sessions/{a}/run", json={"script": 'SELECT "CC"', "mode": "single"})
    client.post(f"/sessions/{b}/run", json={"script": 'SELECT "ILF"', "mode": "single"})
    sa = client.get(f"/sessions/{a}/scene").text
    sb = client.get(f"/sessions/{b}/scene").text
    assert sa != sb
    assert client.get(f"/sessions/{a}/scene").text == sa


def test_delete_session(client):
    sid = new_session(client)
    assert client.delete(f"/sessions/{sid}").status_code == 204
    assert client.get(f"/sessions/{sid}/scene").status_code == 404
    assert client.delete(f"/sessions/{sid}").status_code == 404


def test_bad_mode_and_view_rejected(client, brain_payload):
    sid = new_session(client)
    client.post(f"/sessions/{sid}/model", content=brain_payload)
    assert client.post(f"/sessions/{sid}/run",
                       json={"script": "x", "mode": "partial"}).status_code == 400
    client.post(f"/sessions/{sid}/run", json={"script": 'LOAD "uploaded:model1"', "mode": "full"})
    assert client.get(f"/sessions/{sid}/scene", params={"view": "1,2"}).status_code == 400
    assert client.get(f"/sessions/{sid}/scene", params={"detail": "wireframe"}).status_code == 400


def test_scene_mesh_detail_vertex_count(client):
    payload = serialize_model(generate_synthetic_brain(1, 1))
    sid = new_session(client)
    client.post(f"/sessions/{sid}/model", content=payload)
    client.post(f"/sessions/{sid}/run", json={"script": 'LOAD "uploaded:model1"', "mode": "full"})
    text = client.get(f"/sessions/{sid}/scene", params={"detail": "meshes"}).text
    assert "mesh 0 vertices 192 triangles 368" in text  # 24 verts * 8 sides
