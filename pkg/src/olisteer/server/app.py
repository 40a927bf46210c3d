"""HTTP boundary: sessions, the interaction loop, dataset discovery, and a
per-session WebSocket push channel.

Concurrency: requests for distinct sessions proceed independently; within a
session mutations serialize on the session lock. Mutations run off the event
loop in worker threads; if one exceeds the configured deadline the request
returns 202 with the revision to await on the push channel. A newly arriving
mutation cancels an in-flight solve (the cancelled update commits its
best-so-far result flagged non-converged).
"""

from __future__ import annotations

import asyncio
import logging
import threading
from pathlib import Path
from typing import Callable

import anyio
from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse, JSONResponse

from olisteer.errors import (
    ContractViolation,
    DatasetFormatError,
    UnknownDatasetError,
    UnknownItemError,
)
from olisteer.ingest import MANIFEST_NAME, DatasetManifest, load_dataset
from olisteer.session import DragEvent, Session, SessionSnapshot, WeightEdit
from olisteer.server.schemas import (
    CreateSessionRequest,
    DatasetInfo,
    FeatureValuesResponse,
    LayoutPayload,
    LogEntryOut,
    OliRequest,
    PendingResponse,
    PositionOut,
    RevisionEvent,
    SessionCreated,
    SolveInfo,
    WeightUpdateRequest,
)

log = logging.getLogger(__name__)

DEFAULT_SOLVE_DEADLINE = 10.0


def snapshot_payload(snap: SessionSnapshot) -> LayoutPayload:
    report = snap.last_report
    return LayoutPayload(
        revision=snap.revision,
        positions=[
            PositionOut(item_id=item, x=float(x), y=float(y))
            for item, (x, y) in zip(snap.item_ids, snap.layout.positions)
        ],
        weights=[float(v) for v in snap.weights.values],
        solve=SolveInfo(
            converged=report.converged,
            iterations=report.iterations,
            final_objective=report.final_objective,
        ),
        warning=snap.warning,
    )


class SessionEvents:
    """Revision-ordered event history with blocking waits.

    Events are appended under the session lock (via the commit hook), so
    their order matches revision order; readers receive every event from
    their cursor onward with no gaps.
    """

    def __init__(self) -> None:
        self._events: list[RevisionEvent] = []
        self._cond = threading.Condition()

    def append(self, event: RevisionEvent) -> None:
        with self._cond:
            self._events.append(event)
            self._cond.notify_all()

    def cursor(self) -> int:
        with self._cond:
            return len(self._events)

    def wait(self, cursor: int, timeout: float) -> list[RevisionEvent]:
        with self._cond:
            if len(self._events) <= cursor:
                self._cond.wait(timeout)
            return self._events[cursor:]


class DatasetRegistry:
    """Datasets found under the data directory, addressed by the name of
    the subdirectory holding their manifest."""

    def __init__(self, data_dir: str | Path | None):
        self.data_dir = Path(data_dir) if data_dir else None

    def list(self) -> list[tuple[str, DatasetManifest]]:
        if self.data_dir is None or not self.data_dir.is_dir():
            return []
        manifests = []
        for manifest_path in sorted(self.data_dir.glob(f"*/{MANIFEST_NAME}")):
            try:
                from olisteer.ingest import read_manifest

                manifests.append((manifest_path.parent.name, read_manifest(manifest_path)))
            except DatasetFormatError as exc:
                log.warning("skipping %s: %s", manifest_path, exc)
        return manifests

    def manifest_path(self, name: str) -> Path:
        if self.data_dir is None:
            raise UnknownDatasetError(name)
        path = self.data_dir / name / MANIFEST_NAME
        if not path.is_file():
            raise UnknownDatasetError(name)
        return path


class SessionHub:
    def __init__(self) -> None:
        self._sessions: dict[str, tuple[Session, SessionEvents]] = {}
        self._lock = threading.Lock()

    def add(self, session: Session) -> SessionEvents:
        events = SessionEvents()
        session.add_commit_hook(
            lambda s: events.append(
                RevisionEvent(revision=s.revision, payload=snapshot_payload(s.snapshot()))
            )
        )
        with self._lock:
            self._sessions[session.session_id] = (session, events)
        return events

    def get(self, session_id: str) -> tuple[Session, SessionEvents]:
        with self._lock:
            found = self._sessions.get(session_id)
        if found is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return found


def _http_error(exc: Exception) -> HTTPException:
    if isinstance(exc, (UnknownDatasetError,)):
        return HTTPException(status_code=404, detail=str(exc))
    if isinstance(exc, (ContractViolation, DatasetFormatError)):
        return HTTPException(status_code=422, detail=str(exc))
    if isinstance(exc, UnknownItemError):
        return HTTPException(status_code=422, detail=f"unknown item {exc.args[0]!r}")
    raise exc


def create_app(
    data_dir: str | Path | None = None,
    solve_deadline: float = DEFAULT_SOLVE_DEADLINE,
) -> FastAPI:
    app = FastAPI(title="olisteer", version="0.1.0")
    registry = DatasetRegistry(data_dir)
    hub = SessionHub()
    app.state.registry = registry
    app.state.hub = hub
    app.state.solve_deadline = solve_deadline

    async def run_mutation(session: Session, fn: Callable[[], SessionSnapshot]):
        """Run a session mutation in a worker thread, bounded by the deadline."""
        session.request_supersede()
        loop = asyncio.get_running_loop()
        future = loop.run_in_executor(None, fn)
        done, pending = await asyncio.wait({future}, timeout=app.state.solve_deadline)
        if pending:
            future.add_done_callback(_log_background_error)
            pending_rev = session.pending_revision or session.revision + 1
            return JSONResponse(
                status_code=202, content=PendingResponse(revision=pending_rev).model_dump()
            )
        try:
            snap = done.pop().result()
        except Exception as exc:
            raise _http_error(exc) from exc
        return snapshot_payload(snap)

    def _log_background_error(future) -> None:
        exc = future.exception()
        if exc is not None:
            log.error("background solve failed: %s", exc)

    @app.post("/sessions", response_model=SessionCreated, status_code=201)
    def create_session_endpoint(req: CreateSessionRequest):
        try:
            manifest_path = registry.manifest_path(req.dataset)
            features, _ = load_dataset(manifest_path)
            session = Session(features, dataset_ref=req.dataset)
        except Exception as exc:
            raise _http_error(exc) from exc
        hub.add(session)
        return SessionCreated(session_id=session.session_id, payload=snapshot_payload(session.snapshot()))

    @app.get("/sessions/{session_id}", response_model=LayoutPayload)
    def get_session(session_id: str):
        session, _ = hub.get(session_id)
        return snapshot_payload(session.snapshot())

    @app.post("/sessions/{session_id}/oli", response_model=LayoutPayload, responses={202: {"model": PendingResponse}})
    async def oli(session_id: str, req: OliRequest):
        session, _ = hub.get(session_id)
        try:
            drags = [DragEvent(item_id=d.item_id, x=d.x, y=d.y) for d in req.drags]
            if len({d.item_id for d in drags}) < 2:
                raise ContractViolation("need at least 2 distinct dragged items")
        except Exception as exc:
            raise _http_error(exc) from exc
        return await run_mutation(session, lambda: session.oli_update(drags))

    @app.put("/sessions/{session_id}/weights/{k}", response_model=LayoutPayload, responses={202: {"model": PendingResponse}})
    async def set_weight(session_id: str, k: int, req: WeightUpdateRequest):
        session, _ = hub.get(session_id)
        edit = WeightEdit(feature_index=k, new_weight=req.value)
        return await run_mutation(session, lambda: session.apply_weight_edit(edit))

    @app.post("/sessions/{session_id}/weights/{k}/maximize", response_model=LayoutPayload, responses={202: {"model": PendingResponse}})
    async def maximize_weight(session_id: str, k: int):
        session, _ = hub.get(session_id)
        return await run_mutation(session, lambda: session.maximize_weight(k))

    @app.post("/sessions/{session_id}/reset", response_model=LayoutPayload, responses={202: {"model": PendingResponse}})
    async def reset_session(session_id: str):
        session, _ = hub.get(session_id)
        return await run_mutation(session, session.reset)

    @app.get("/sessions/{session_id}/items/{item_id}/features", response_model=FeatureValuesResponse)
    def item_features(session_id: str, item_id: str):
        session, _ = hub.get(session_id)
        try:
            values = session.get_item_feature_values(item_id)
        except UnknownItemError as exc:
            raise HTTPException(status_code=404, detail=f"unknown item {item_id!r}") from exc
        return FeatureValuesResponse(values=[float(v) for v in values])

    @app.get("/sessions/{session_id}/log", response_model=list[LogEntryOut])
    def session_log(session_id: str):
        session, _ = hub.get(session_id)
        entries = session.get_log()
        return [
            LogEntryOut(
                kind=e.kind,
                payload=list(e.payload),
                revision=e.revision,
                timestamp=e.timestamp,
                reports=[
                    SolveInfo(
                        converged=r.converged,
                        iterations=r.iterations,
                        final_objective=r.final_objective,
                    )
                    for r in e.reports
                ],
            )
            for e in entries
        ]

    @app.get("/sessions/{session_id}/cost")
    def session_cost(session_id: str):
        session, _ = hub.get(session_id)
        return {"cost": session.interaction_cost()}

    @app.websocket("/sessions/{session_id}/events")
    async def events_channel(websocket: WebSocket, session_id: str):
        try:
            _, events = hub.get(session_id)
        except HTTPException:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        cursor = events.cursor()
        try:
            while True:
                batch = await anyio.to_thread.run_sync(events.wait, cursor, 0.25)
                for event in batch:
                    await websocket.send_json(event.model_dump())
                cursor += len(batch)
        except (WebSocketDisconnect, RuntimeError):
            return

    @app.get("/datasets", response_model=list[DatasetInfo])
    def list_datasets():
        return [
            DatasetInfo(
                name=ref,
                n_items=m.n_items,
                n_features=m.n_features,
                abstraction_level=m.abstraction_level,
            )
            for ref, m in registry.list()
        ]

    @app.get("/datasets/{name}/thumbs/{filename}")
    def dataset_thumbnail(name: str, filename: str):
        try:
            manifest_path = registry.manifest_path(name)
        except UnknownDatasetError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        base = manifest_path.parent.resolve()
        target = (base / "thumbs" / filename).resolve()
        if not str(target).startswith(str(base)) or not target.is_file():
            raise HTTPException(status_code=404, detail=f"no thumbnail {filename!r}")
        return FileResponse(target)

    return app
