"""Recommendation service: classify open issues, reclassify on a schedule,
answer skill-filtered queries over /api/v1.

Match semantics are ANY-overlap between an issue's predicted labels and the
requested skills, ranked by overlap size (descending) then issue number
(ascending). A query never mutates state; classification runs write their
batch atomically through the store.
"""

from __future__ import annotations

import hashlib
import logging
import os
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse

from .errors import (
    DuplicateProject,
    ModelSchemaViolation,
    UnknownLabel,
    UnknownProject,
    UnsupportedModel,
)
from .forest import ForestModel, load_model, predict, save_model
from .mining import TOKEN_ENV_VAR, GitHubClient
from .snapshot import Issue, ProjectRef, load_snapshot
from .store import CatalogEntry, ClassifiedIssue, IssueStore
from .taxonomy import ApiTaxonomy
from .text import preprocess
from .tfidf import TfidfModel, load_tfidf, transform

log = logging.getLogger(__name__)

OPERATOR_TOKEN_ENV_VAR = "GIMLI_OPERATOR_TOKEN"
SUPPORTED_MODELS = ("tfidf",)
DEFAULT_RESULT_CAP = 200


@dataclass
class RegisteredProject:
    ref: ProjectRef
    forest: ForestModel
    tfidf: TfidfModel
    model_id: str
    snapshot_path: Path | None = None
    threshold: float = 0.5


class ProjectRegistry:
    """In-memory models per project; the store holds the durable catalog."""

    def __init__(self, store: IssueStore):
        self.store = store
        self._projects: dict[str, RegisteredProject] = {}
        self._lock = threading.Lock()

    def register(
        self,
        ref: ProjectRef,
        forest: ForestModel | bytes,
        tfidf: TfidfModel | bytes,
        taxonomy: ApiTaxonomy | None = None,
        snapshot_path: str | Path | None = None,
        threshold: float = 0.5,
    ) -> RegisteredProject:
        if isinstance(forest, bytes):
            forest = load_model(forest)
        if isinstance(tfidf, bytes):
            tfidf = load_tfidf(tfidf)
        if forest.feature_dim != tfidf.dimension:
            raise ModelSchemaViolation(
                f"forest expects {forest.feature_dim} features, "
                f"tfidf produces {tfidf.dimension}"
            )
        if taxonomy is not None:
            extra = set(forest.label_universe) - set(taxonomy.label_universe)
            if extra:
                raise ModelSchemaViolation(
                    f"model labels missing from taxonomy: {sorted(extra)}"
                )
        model_id = hashlib.sha256(save_model(forest)).hexdigest()[:12]
        project = RegisteredProject(
            ref=ref,
            forest=forest,
            tfidf=tfidf,
            model_id=model_id,
            snapshot_path=Path(snapshot_path) if snapshot_path else None,
            threshold=threshold,
        )
        with self._lock:
            if ref.display_label in self._projects:
                raise DuplicateProject(ref.display_label)
            self.store.add_project(
                CatalogEntry(
                    display_label=ref.display_label,
                    owner=ref.owner,
                    name=ref.name,
                    label_universe=forest.label_universe,
                    model_id=model_id,
                )
            )
            self._projects[ref.display_label] = project
        return project

    def get(self, display_label: str) -> RegisteredProject:
        project = self._projects.get(display_label)
        if project is None:
            raise UnknownProject(display_label)
        return project

    def labels(self) -> list[str]:
        return sorted(self._projects)


def _default_open_issue_source(project: RegisteredProject) -> list[Issue]:
    """Live fetch when credentials are present, else the latest snapshot."""
    if os.environ.get(TOKEN_ENV_VAR):
        client = GitHubClient()
        return [i for i in client.fetch_issues(project.ref) if i.state == "open"]
    if project.snapshot_path is None:
        raise UnknownProject(project.ref.display_label)
    return load_snapshot(project.snapshot_path).open_issues()


def classify_open_issues(
    project: RegisteredProject,
    store: IssueStore,
    open_issues: list[Issue] | None = None,
    issue_source: Callable[[RegisteredProject], list[Issue]] | None = None,
) -> int:
    """Predict labels for the project's open issues and persist the batch."""
    if open_issues is None:
        source = issue_source or _default_open_issue_source
        open_issues = source(project)
    now = datetime.now(timezone.utc).replace(microsecond=0)
    rows = []
    for issue in open_issues:
        tokens = preprocess(issue.title, issue.body, project.tfidf.config)
        vector = transform(project.tfidf, tokens)
        prediction = predict(project.forest, vector, project.threshold)
        rows.append(
            ClassifiedIssue(
                project=project.ref.display_label,
                number=issue.number,
                title=issue.title,
                body=issue.body,
                url=issue.url,
                labels=prediction.labels,
                model_id=project.model_id,
                classified_at=now,
            )
        )
    return store.replace_classifications(
        project.ref.display_label, project.model_id, rows
    )


# -- scheduler ----------------------------------------------------------------


@dataclass
class JobStatus:
    last_run: str | None = None
    last_status: str = "never"
    last_error: str | None = None
    completed_runs: int = 0
    skipped_ticks: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def to_dict(self) -> dict:
        return {
            "last_run": self.last_run,
            "last_status": self.last_status,
            "last_error": self.last_error,
            "completed_runs": self.completed_runs,
            "skipped_ticks": self.skipped_ticks,
        }


class ReclassifyScheduler:
    """Runs the classification job per project every interval.

    A tick dispatches one worker per project; if a project's previous run is
    still in flight the tick is skipped for it (coalescing). Job failures are
    recorded and retried at the next tick; they never propagate.
    """

    def __init__(
        self,
        projects: Callable[[], list[str]],
        job: Callable[[str], None],
        interval_seconds: float = 24 * 3600,
    ):
        self.projects = projects
        self.job = job
        self.interval_seconds = interval_seconds
        self.status: dict[str, JobStatus] = {}
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self._workers: list[threading.Thread] = []

    def _status_for(self, label: str) -> JobStatus:
        if label not in self.status:
            self.status[label] = JobStatus()
        return self.status[label]

    def _run_one(self, label: str, status: JobStatus) -> None:
        try:
            self.job(label)
        except Exception as exc:  # noqa: BLE001 - job failures must not kill ticks
            status.last_status = "error"
            status.last_error = f"{type(exc).__name__}: {exc}"
            log.warning("reclassification for %s failed: %s", label, exc)
        else:
            status.last_status = "ok"
            status.last_error = None
            status.completed_runs += 1
        finally:
            status.last_run = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
            status.lock.release()

    def tick(self, wait: bool = False) -> None:
        """Dispatch one round of jobs; with wait=True, block until done."""
        workers = []
        for label in self.projects():
            status = self._status_for(label)
            if not status.lock.acquire(blocking=False):
                status.skipped_ticks += 1
                continue
            worker = threading.Thread(
                target=self._run_one, args=(label, status), daemon=True
            )
            worker.start()
            workers.append(worker)
        self._workers = workers
        if wait:
            for worker in workers:
                worker.join()

    def start(self) -> None:
        if self._thread is not None:
            return

        def loop():
            while not self._stop.wait(self.interval_seconds):
                self.tick()

        self._thread = threading.Thread(target=loop, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
        for worker in self._workers:
            worker.join(timeout=5)


def schedule_daily(
    registry: ProjectRegistry,
    store: IssueStore,
    interval_seconds: float = 24 * 3600,
    issue_source: Callable[[RegisteredProject], list[Issue]] | None = None,
) -> ReclassifyScheduler:
    def job(label: str) -> None:
        classify_open_issues(registry.get(label), store, issue_source=issue_source)

    scheduler = ReclassifyScheduler(registry.labels, job, interval_seconds)
    scheduler.start()
    return scheduler


# -- query --------------------------------------------------------------------


def query_issues(
    registry: ProjectRegistry,
    store: IssueStore,
    project_label: str,
    requested_labels: list[str],
    model: str = "tfidf",
    cap: int = DEFAULT_RESULT_CAP,
) -> dict:
    """Stored open issues whose labels intersect the requested skills,
    ordered by overlap size descending then issue number ascending."""
    if model not in SUPPORTED_MODELS:
        raise UnsupportedModel(model)
    project = registry.get(project_label)
    universe = set(project.forest.label_universe)
    if not requested_labels:
        raise UnknownLabel("")
    for label in requested_labels:
        if label not in universe:
            raise UnknownLabel(label)
    requested = set(requested_labels)
    universe_order = {l: i for i, l in enumerate(project.forest.label_universe)}

    items = []
    for row in store.classified_issues(project_label, project.model_id):
        matched = row.labels & requested
        if not matched:
            continue
        items.append(
            {
                "url": row.url,
                "title": row.title,
                "number": row.number,
                "matched_labels": sorted(matched, key=universe_order.get),
                "labels": sorted(row.labels, key=universe_order.get),
            }
        )
    items.sort(key=lambda item: (-len(item["matched_labels"]), item["number"]))
    return {"items": items[:cap]}


# -- HTTP app -------------------------------------------------------------------


def create_app(
    registry: ProjectRegistry,
    store: IssueStore,
    scheduler: ReclassifyScheduler | None = None,
    issue_source: Callable[[RegisteredProject], list[Issue]] | None = None,
    result_cap: int = DEFAULT_RESULT_CAP,
) -> FastAPI:
    app = FastAPI(title="gimli", version="1")

    @app.exception_handler(UnknownProject)
    async def unknown_project(_req: Request, exc: UnknownProject):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(UnknownLabel)
    async def unknown_label(_req: Request, exc: UnknownLabel):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(UnsupportedModel)
    async def unsupported_model(_req: Request, exc: UnsupportedModel):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/api/v1/projects")
    def projects():
        return [
            {
                "display_label": label,
                "label_universe": list(registry.get(label).forest.label_universe),
            }
            for label in registry.labels()
        ]

    @app.get("/api/v1/issues")
    def issues(
        project: str,
        labels: str = Query(..., description="comma-separated skill labels"),
        model: str = "tfidf",
    ):
        requested = [l for l in labels.split(",") if l != ""]
        return query_issues(registry, store, project, requested, model, cap=result_cap)

    @app.get("/api/v1/health")
    def health():
        status = {}
        if scheduler is not None:
            status = {label: s.to_dict() for label, s in scheduler.status.items()}
        return {"status": "ok", "projects": status}

    @app.post("/api/v1/classify")
    def classify(project: str, request: Request):
        expected = os.environ.get(OPERATOR_TOKEN_ENV_VAR)
        supplied = request.headers.get("X-Operator-Token")
        if not expected or supplied != expected:
            return JSONResponse(
                status_code=403, content={"detail": "operator token required"}
            )
        count = classify_open_issues(
            registry.get(project), store, issue_source=issue_source
        )
        return {"project": project, "rows": count}

    return app
