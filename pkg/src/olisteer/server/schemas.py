"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class PositionOut(BaseModel):
    item_id: str
    x: float
    y: float


class SolveInfo(BaseModel):
    converged: bool
    iterations: int
    final_objective: float


class LayoutPayload(BaseModel):
    """Snapshot of one session revision: positions, weights, solve status."""

    revision: int
    positions: list[PositionOut]
    weights: list[float]
    solve: SolveInfo
    warning: str | None = None


class SessionCreated(BaseModel):
    session_id: str
    payload: LayoutPayload


class CreateSessionRequest(BaseModel):
    dataset: str


class DragIn(BaseModel):
    item_id: str
    x: float = Field(allow_inf_nan=False)
    y: float = Field(allow_inf_nan=False)


class OliRequest(BaseModel):
    drags: list[DragIn]


class WeightUpdateRequest(BaseModel):
    value: float = Field(ge=0, allow_inf_nan=False)


class PendingResponse(BaseModel):
    """Returned with 202 when a solve exceeds the request deadline; await
    this revision on the push channel or poll the session."""

    revision: int


class FeatureValuesResponse(BaseModel):
    values: list[float]


class LogEntryOut(BaseModel):
    kind: str
    payload: list
    revision: int
    timestamp: float
    reports: list[SolveInfo]


class DatasetInfo(BaseModel):
    name: str
    n_items: int
    n_features: int
    abstraction_level: str


class RevisionEvent(BaseModel):
    revision: int
    payload: LayoutPayload
