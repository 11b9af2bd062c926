"""Pydantic request models for the HTTP service.

Field constraints mirror the domain invariants so out-of-range payloads are
rejected with 422 and field-level locations before any handler runs.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class PreferenceMap(BaseModel):
    pressure: float = Field(ge=0.0, le=1.0)
    frequency: float = Field(ge=0.0, le=1.0)
    area: float = Field(ge=0.0, le=1.0)


class RankRequest(BaseModel):
    preferences: PreferenceMap
    task_id: str = "search"
    alpha: float = Field(default=0.25, gt=0.0, lt=1.0)
    beta: float = Field(default=24.0, ge=0.0)


class PreviewRequest(BaseModel):
    configuration_id: str
    theta: list[int]
    task_id: str = "search"
    seconds_per_channel: float = Field(default=3.0, gt=0.0)


class StudyProfile(BaseModel):
    pressure: float = Field(ge=0.0, le=1.0)
    frequency: float = Field(ge=0.0, le=1.0)
    area: float = Field(ge=0.0, le=1.0)
    alpha: float = Field(default=0.25, gt=0.0, lt=1.0)
    beta: float = Field(default=24.0, ge=0.0)


class StudyRunRequest(BaseModel):
    tasks: list[str] = Field(default=["search"], min_length=1)
    trials_per_config: int = Field(default=1000, ge=1)
    decode_mode: str = Field(default="map", pattern="^(map|sample)$")
    master_seed: int = 0
    jitter: bool = False
    profiles: int | list[StudyProfile] = 1
    configuration_ids: list[str] | None = None
