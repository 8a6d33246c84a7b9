import json
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from clearspeech.audio_io import write_wav
from clearspeech.service import create_app
from clearspeech.synthdata import SynthDatasetConfig, synth_dataset


@pytest.fixture(scope="module")
def fixture_wav(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("input")
    mix, _, _ = synth_dataset(SynthDatasetConfig(
        count=1, duration_s=3.0, seed=31, snr_range_db=(3.0, 3.0)))[0]
    path = tmp / "mix.wav"
    write_wav(mix, path, "float32")
    return path


@pytest.fixture
def client(tmp_path):
    app = create_app(artifact_dir=tmp_path / "artifacts", start_worker=False)
    return TestClient(app, raise_server_exceptions=False)


def submit_and_run(client, fixture_wav, **overrides):
    body = {"input_path": str(fixture_wav)}
    body.update(overrides)
    resp = client.post("/jobs", json=body)
    assert resp.status_code == 202
    job_id = resp.json()["id"]
    store = client.app.state.store
    while store.run_next():
        pass
    return job_id


def test_submit_poll_done(client, fixture_wav):
    job_id = submit_and_run(client, fixture_wav)
    resp = client.get(f"/jobs/{job_id}")
    assert resp.status_code == 200
    body = resp.json()
    assert body["state"] == "done"
    for key in ("enhanced_track", "manifest", "package_metadata",
                "dialogue", "background", "mix"):
        assert Path(body["artifacts"][key]).is_file()


def test_duplicate_submission_409(client, fixture_wav):
    submit_and_run(client, fixture_wav)
    resp = client.post("/jobs", json={"input_path": str(fixture_wav)})
    assert resp.status_code == 409


def test_invalid_spec_422(client, fixture_wav):
    resp = client.post("/jobs", json={"input_path": str(fixture_wav),
                                      "backend": "quantum"})
    assert resp.status_code == 422
    resp = client.post("/jobs", json={"input_path": "/missing.wav"})
    assert resp.status_code == 422
    resp = client.post("/jobs", json={"input_path": str(fixture_wav),
                                      "preset": "Unbekannt"})
    assert resp.status_code == 422


def test_unknown_job_404(client):
    resp = client.get("/jobs/deadbeef")
    assert resp.status_code == 404
    assert "unknown" in resp.json()["detail"]


def test_unknown_program_404(client):
    resp = client.get("/programs/deadbeef/metadata")
    assert resp.status_code == 404


def test_programs_listing(client, fixture_wav):
    job_id = submit_and_run(client, fixture_wav,
                            programme_name="Abendschau")
    programs = client.get("/programs").json()
    assert any(p["id"] == job_id and p["programme_name"] == "Abendschau"
               for p in programs)


def test_metadata_matches_manifest(client, fixture_wav):
    job_id = submit_and_run(client, fixture_wav)
    meta = client.get(f"/programs/{job_id}/metadata").json()
    job = client.get(f"/jobs/{job_id}").json()
    manifest = json.loads(Path(job["artifacts"]["manifest"]).read_text())
    assert meta["manifest"] == manifest
    assert meta["mix_loudness_lufs"] == pytest.approx(
        manifest["loudness_mix_lufs"], abs=0.2)
    assert set(meta["stems"]) == {"dialogue", "background"}
    assert meta["bounds"]["dialogue_gain_min_db"] <= 0
    assert meta["bounds"]["dialogue_gain_max_db"] >= 0
    names = [p["name"] for p in meta["presets"]]
    assert "Sprache betont" in names and "Sprache stärker betont" in names


def test_stem_content_length_matches_disk(client, fixture_wav):
    job_id = submit_and_run(client, fixture_wav)
    job = client.get(f"/jobs/{job_id}").json()
    for stem in ("dialogue", "background", "mix"):
        resp = client.get(f"/programs/{job_id}/stems/{stem}.wav")
        assert resp.status_code == 200
        disk = Path(job["artifacts"][stem]).stat().st_size
        assert int(resp.headers["content-length"]) == disk
        assert resp.headers["content-type"] == "audio/wav"


def test_unknown_stem_404(client, fixture_wav):
    job_id = submit_and_run(client, fixture_wav)
    resp = client.get(f"/programs/{job_id}/stems/vocals.wav")
    assert resp.status_code == 404


def test_done_job_serves_artifacts_immediately(client, fixture_wav):
    job_id = submit_and_run(client, fixture_wav)
    body = client.get(f"/jobs/{job_id}").json()
    assert body["state"] == "done"
    for stem in ("dialogue", "background", "mix"):
        assert client.get(
            f"/programs/{job_id}/stems/{stem}.wav").status_code == 200


def test_index_rebuilt_on_restart(tmp_path, fixture_wav):
    artifacts = tmp_path / "artifacts"
    app1 = create_app(artifact_dir=artifacts, start_worker=False)
    c1 = TestClient(app1)
    job_id = submit_and_run(c1, fixture_wav)
    # new app instance over the same directory sees the finished job
    app2 = create_app(artifact_dir=artifacts, start_worker=False)
    c2 = TestClient(app2)
    resp = c2.get(f"/jobs/{job_id}")
    assert resp.status_code == 200
    assert resp.json()["state"] == "done"


def test_job_state_machine():
    from clearspeech.jobs import Job, JobSpec
    job = Job(id="x", spec=JobSpec(input_path="y"))
    with pytest.raises(ValueError):
        job.transition("done")      # queued cannot skip to done
    job.transition("running")
    job.transition("done")
    with pytest.raises(ValueError):
        job.transition("running")   # done is terminal
