"""HTTP/JSON service exposing ranking, preview, simulation-study, and catalog.

Handlers are stateless over an immutable catalog; the only mutable state is
the run store (persisted study artifacts) and the in-process job registry
for asynchronous studies.
"""

from __future__ import annotations

import os
import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..catalog import Catalog, load_catalog
from ..errors import FluidrankError, UnknownIdentifier
from ..store import RunStore, canonical_json, resolve_store_root
from ..workflows import preview_payload, rank_payload, run_study_payload, study_inputs_payload
from .models import PreviewRequest, RankRequest, StudyRunRequest


class StudyJobs:
    """Minimal job registry; report writes are serialized per run id."""

    def __init__(self):
        self._lock = threading.Lock()
        self._jobs: dict[str, dict] = {}

    def create(self, job_id: str) -> None:
        with self._lock:
            self._jobs[job_id] = {"status": "running"}

    def finish(self, job_id: str, payload: dict) -> None:
        with self._lock:
            self._jobs[job_id] = {"status": "done", "report": payload}

    def fail(self, job_id: str, message: str) -> None:
        with self._lock:
            self._jobs[job_id] = {"status": "error", "error": message}

    def get(self, job_id: str) -> dict | None:
        with self._lock:
            job = self._jobs.get(job_id)
            return dict(job) if job else None


def create_app(catalog: Catalog | None = None, store: RunStore | None = None, ui_dir: str | None = None) -> FastAPI:
    catalog = catalog or Catalog()
    store = store or RunStore(resolve_store_root(None))
    jobs = StudyJobs()
    app = FastAPI(title="fluidrank service", version="0.1.0")

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        errors = exc.errors()
        malformed = any(str(e.get("type", "")).startswith("json") for e in errors)
        detail = [
            {"loc": [str(x) for x in e.get("loc", [])], "msg": e.get("msg", ""), "type": e.get("type", "")}
            for e in errors
        ]
        return JSONResponse(status_code=400 if malformed else 422, content={"detail": detail})

    @app.exception_handler(UnknownIdentifier)
    async def unknown_handler(request: Request, exc: UnknownIdentifier):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(FluidrankError)
    async def domain_handler(request: Request, exc: FluidrankError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def value_handler(request: Request, exc: ValueError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/api/catalog")
    def get_catalog():
        return catalog.to_dict()

    @app.post("/api/rank")
    def post_rank(req: RankRequest):
        return rank_payload(
            catalog,
            preferences=req.preferences.model_dump(),
            task_id=req.task_id,
            alpha=req.alpha,
            beta=req.beta,
        )

    @app.post("/api/preview")
    def post_preview(req: PreviewRequest):
        return preview_payload(
            catalog,
            configuration_id=req.configuration_id,
            theta=req.theta,
            task_id=req.task_id,
            seconds_per_channel=req.seconds_per_channel,
        )

    @app.post("/api/study/run")
    def post_study_run(req: StudyRunRequest):
        profiles_spec = (
            req.profiles if isinstance(req.profiles, int) else [p.model_dump() for p in req.profiles]
        )
        config_ids = req.configuration_ids or [c.id for c in catalog.study_configurations()]
        for cid in config_ids:
            catalog.configuration(cid)
        for tid in req.tasks:
            catalog.task(tid)
        inputs = study_inputs_payload(
            req.tasks, req.trials_per_config, req.decode_mode, req.master_seed,
            req.jitter, profiles_spec, config_ids,
        )
        run_id = store.persist("study", inputs, {"status.txt": "running\n"})
        jobs.create(run_id)

        def work():
            try:
                _, payload = run_study_payload(
                    catalog,
                    tasks=req.tasks,
                    trials_per_config=req.trials_per_config,
                    decode_mode=req.decode_mode,
                    master_seed=req.master_seed,
                    jitter=req.jitter,
                    profiles_spec=profiles_spec,
                    configuration_ids=config_ids,
                )
                with open(os.path.join(store.root, run_id, "report.json"), "w") as fh:
                    fh.write(canonical_json(payload))
                jobs.finish(run_id, payload)
            except Exception as exc:  # job failures surface through polling
                jobs.fail(run_id, str(exc))

        threading.Thread(target=work, daemon=True).start()
        return {"report_id": run_id}

    @app.get("/api/study/{report_id}")
    def get_study(report_id: str):
        job = jobs.get(report_id)
        if job is None:
            raise UnknownIdentifier(f"no study run {report_id!r}")
        return {"report_id": report_id, **job}

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="console")

    return app


def build_default_app() -> FastAPI:
    catalog = load_catalog(os.environ.get("FLUIDRANK_MODALITIES") or None)
    return create_app(catalog=catalog)


app = build_default_app()
