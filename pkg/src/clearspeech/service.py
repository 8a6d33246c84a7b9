"""HTTP service feeding the audition UI: job submission plus processed
programs (stems as static WAV, metadata as JSON). CORS-enabled so the
page can be served from a different origin during development.
"""

from __future__ import annotations

import os
from dataclasses import asdict
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, JSONResponse
from pydantic import BaseModel

from .delivery import read_manifest, xml_to_document
from .jobs import DuplicateJobError, InvalidJobSpecError, JobSpec, JobStore
from .remix import UnknownPresetError, preset_registry

ARTIFACT_DIR_ENV = "CLEARSPEECH_ARTIFACTS"
STEM_NAMES = ("dialogue", "background", "mix")


class JobRequest(BaseModel):
    input_path: str
    backend: str = "center"
    preset: str = "Sprache betont"
    boost_db: float = 2.0
    checkpoint: str | None = None
    programme_name: str | None = None


def _job_body(job):
    return {"id": job.id, "state": job.state, "artifacts": job.artifacts,
            "error": job.error}


def create_app(artifact_dir=None, start_worker: bool = True) -> FastAPI:
    root = Path(artifact_dir or os.environ.get(ARTIFACT_DIR_ENV, "artifacts"))
    store = JobStore(root)
    if start_worker:
        store.start_worker()

    app = FastAPI(title="clearspeech")
    app.state.store = store
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(Exception)
    async def unhandled(request, exc):
        # sanitized: class name only, no paths or stack detail
        return JSONResponse(status_code=500,
                            content={"error": type(exc).__name__})

    @app.post("/jobs", status_code=202)
    def submit_job(req: JobRequest):
        spec = JobSpec(**req.model_dump())
        try:
            job = store.submit(spec)
        except DuplicateJobError as exc:
            raise HTTPException(409, f"job already submitted: {exc}")
        except (InvalidJobSpecError, UnknownPresetError) as exc:
            raise HTTPException(422, str(exc))
        return _job_body(job)

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        job = store.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id}")
        return _job_body(job)

    @app.get("/programs")
    def list_programs():
        return [{"id": job.id,
                 "programme_name": (job.spec.programme_name
                                    or Path(job.spec.input_path).stem),
                 "preset": job.spec.preset}
                for job in store.done_jobs()]

    def _done_job(program_id: str):
        job = store.get(program_id)
        if job is None or job.state != "done":
            raise HTTPException(404, f"unknown program {program_id}")
        return job

    @app.get("/programs/{program_id}/stems/{stem}.wav")
    def get_stem(program_id: str, stem: str):
        job = _done_job(program_id)
        if stem not in STEM_NAMES:
            raise HTTPException(404, f"unknown stem {stem!r}")
        path = Path(job.artifacts[stem])
        if not path.is_file():
            raise HTTPException(404, f"missing artifact for {stem}")
        return FileResponse(path, media_type="audio/wav")

    @app.get("/programs/{program_id}/metadata")
    def get_metadata(program_id: str):
        job = _done_job(program_id)
        doc = xml_to_document(
            Path(job.artifacts["package_metadata"]).read_bytes())
        manifest = read_manifest(job.artifacts["manifest"])
        return {
            "programme_name": doc.programme_name,
            "mix_loudness_lufs": doc.mix_loudness_lufs,
            "stems": {
                o.role: {"loudness_lufs": o.loudness_lufs}
                for o in doc.objects
            },
            "bounds": {"dialogue_gain_min_db": doc.bounds.min_db,
                       "dialogue_gain_max_db": doc.bounds.max_db},
            "presets": [{"name": p.name,
                         "global_atten_db": p.params.global_atten_db,
                         "duck_extra_db": p.params.duck_extra_db}
                        for p in preset_registry()],
            "manifest": manifest,
        }

    return app
