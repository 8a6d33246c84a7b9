"""Filesystem-backed processing jobs for the batch/service workflows.

The artifact directory is the source of truth: each job owns a
subdirectory holding its outputs plus a job.json status file, and the
index is rebuilt by scanning those on startup. Jobs run sequentially on
one worker thread by default; artifacts are immutable once written.
"""

from __future__ import annotations

import hashlib
import json
import queue
import threading
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .delivery import GainBounds, export_package, render_enhanced_track
from .masknet import MaskModel
from .remix import find_preset
from .separation import separate_center, separate_model, speech_boost
from .audio_io import read_wav, write_wav

JOB_STATES = ("queued", "running", "done", "failed")
_TRANSITIONS = {"queued": {"running"}, "running": {"done", "failed"},
                "done": set(), "failed": set()}


class DuplicateJobError(Exception):
    pass


class InvalidJobSpecError(ValueError):
    pass


@dataclass
class JobSpec:
    input_path: str
    backend: str = "center"          # "center" | "model"
    preset: str = "Sprache betont"
    boost_db: float = 2.0
    checkpoint: str | None = None
    programme_name: str | None = None

    def validate(self):
        if self.backend not in ("center", "model"):
            raise InvalidJobSpecError(f"unknown backend {self.backend!r}")
        if self.backend == "model" and not self.checkpoint:
            raise InvalidJobSpecError("model backend needs a checkpoint path")
        if self.boost_db < 0:
            raise InvalidJobSpecError("boost must be >= 0 dB")
        find_preset(self.preset)   # raises UnknownPresetError
        if not Path(self.input_path).is_file():
            raise InvalidJobSpecError(f"input not found: {self.input_path}")

    def job_id(self) -> str:
        key = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha1(key).hexdigest()[:16]


@dataclass
class Job:
    id: str
    spec: JobSpec
    state: str = "queued"
    artifacts: dict = field(default_factory=dict)
    error: str | None = None

    def transition(self, new_state: str):
        if new_state not in _TRANSITIONS[self.state]:
            raise ValueError(f"illegal transition {self.state} -> {new_state}")
        self.state = new_state

    def to_json(self) -> dict:
        return {"id": self.id, "spec": asdict(self.spec), "state": self.state,
                "artifacts": self.artifacts, "error": self.error}

    @classmethod
    def from_json(cls, data: dict) -> "Job":
        return cls(id=data["id"], spec=JobSpec(**data["spec"]),
                   state=data["state"], artifacts=data.get("artifacts", {}),
                   error=data.get("error"))


def run_pipeline(spec: JobSpec, out_dir: Path) -> dict:
    """separate -> boost -> remix -> deliver; returns artifact name->path."""
    mix = read_wav(spec.input_path)
    if spec.backend == "center":
        stems = separate_center(mix)
    else:
        model = MaskModel.load(spec.checkpoint)
        stems = separate_model(mix, model)
    if spec.boost_db > 0:
        stems = speech_boost(stems, spec.boost_db)
    preset = find_preset(spec.preset)

    out_dir.mkdir(parents=True, exist_ok=True)
    name = spec.programme_name or Path(spec.input_path).stem
    track_path, manifest_path, _ = render_enhanced_track(
        stems, preset, out_dir / "enhanced.wav")
    wav_path, xml_path = export_package(stems, out_dir, GainBounds(),
                                        programme_name=name)
    # per-stem files for the UI: untouched mix plus the two stems
    write_wav(mix, out_dir / "mix.wav", "float32")
    write_wav(stems.dialogue, out_dir / "dialogue.wav", "float32")
    write_wav(stems.background, out_dir / "background.wav", "float32")
    return {
        "enhanced_track": str(track_path),
        "manifest": str(manifest_path),
        "package_audio": str(wav_path),
        "package_metadata": str(xml_path),
        "mix": str(out_dir / "mix.wav"),
        "dialogue": str(out_dir / "dialogue.wav"),
        "background": str(out_dir / "background.wav"),
    }


class JobStore:
    """Single-writer job index over an artifact directory."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._jobs: dict[str, Job] = {}
        self._queue: queue.Queue = queue.Queue()
        self._worker = None
        self._load_existing()

    def _load_existing(self):
        for status in sorted(self.root.glob("*/job.json")):
            try:
                job = Job.from_json(json.loads(status.read_text()))
            except (json.JSONDecodeError, KeyError, TypeError):
                continue
            if job.state == "running":   # interrupted by restart
                job.state = "failed"
                job.error = "interrupted"
            self._jobs[job.id] = job

    def job_dir(self, job_id: str) -> Path:
        return self.root / job_id

    def _persist(self, job: Job):
        d = self.job_dir(job.id)
        d.mkdir(parents=True, exist_ok=True)
        (d / "job.json").write_text(json.dumps(job.to_json(), indent=2,
                                               ensure_ascii=False))

    def submit(self, spec: JobSpec) -> Job:
        spec.validate()
        job_id = spec.job_id()
        with self._lock:
            if job_id in self._jobs:
                raise DuplicateJobError(job_id)
            job = Job(id=job_id, spec=spec)
            self._jobs[job_id] = job
            self._persist(job)
        self._queue.put(job_id)
        return job

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)

    def list_jobs(self):
        with self._lock:
            return list(self._jobs.values())

    def done_jobs(self):
        return [j for j in self.list_jobs() if j.state == "done"]

    def run_next(self) -> bool:
        """Process one queued job; returns False when the queue is empty."""
        try:
            job_id = self._queue.get_nowait()
        except queue.Empty:
            return False
        self._execute(job_id)
        return True

    def _execute(self, job_id: str):
        job = self.get(job_id)
        job.transition("running")
        self._persist(job)
        try:
            artifacts = run_pipeline(job.spec, self.job_dir(job_id))
        except Exception as exc:   # any pipeline failure lands in the job
            job.error = f"{type(exc).__name__}: {exc}"
            job.transition("failed")
        else:
            job.artifacts = artifacts
            job.transition("done")
        self._persist(job)

    def start_worker(self):
        if self._worker is not None:
            return

        def loop():
            while True:
                job_id = self._queue.get()
                if job_id is None:
                    return
                self._execute(job_id)

        self._worker = threading.Thread(target=loop, daemon=True)
        self._worker.start()

    def stop_worker(self):
        if self._worker is not None:
            self._queue.put(None)
            self._worker.join()
            self._worker = None
