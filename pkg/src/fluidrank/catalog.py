"""Default modality/configuration/task catalog and file-based overrides."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import UnknownIdentifier
from .signals import Configuration, Modality, default_modalities, enumerate_configurations
from .study import default_tasks
from .tasks import TaskSpec


@dataclass
class Catalog:
    modalities: list[Modality] = field(default_factory=default_modalities)
    tasks: dict[str, TaskSpec] = field(default_factory=default_tasks)

    def __post_init__(self):
        self.configurations = enumerate_configurations(self.modalities, 2)
        self._by_id = {c.id: c for c in self.configurations}

    def configuration(self, config_id: str) -> Configuration:
        if config_id not in self._by_id:
            raise UnknownIdentifier(
                f"unknown configuration {config_id!r}; have {sorted(self._by_id)}"
            )
        return self._by_id[config_id]

    def task(self, task_id: str) -> TaskSpec:
        if task_id not in self.tasks:
            raise UnknownIdentifier(f"unknown task {task_id!r}; have {sorted(self.tasks)}")
        return self.tasks[task_id]

    def study_configurations(self) -> list[Configuration]:
        """The three deployed modality pairs in canonical orientation.

        One deployment per pair, finer modality on the wider task axis;
        this is the set the study harness compares as Rank 1/2/3.
        """
        return [self.configuration(cid) for cid in ("PA", "PF", "AF")]

    def to_dict(self) -> dict:
        return {
            "modalities": [
                {"kind": m.kind, "levels": list(m.levels)} for m in self.modalities
            ],
            "configurations": [
                {
                    "id": c.id,
                    "channels": [m.kind for m in c.channels],
                    "level_counts": [m.level_count for m in c.channels],
                    "space_size": c.space_size,
                }
                for c in self.configurations
            ],
            "tasks": [
                {"id": t.id, "axes": list(t.axes)} for t in sorted(self.tasks.values(), key=lambda t: t.id)
            ],
        }


def load_catalog(path: str | None = None) -> Catalog:
    """Build the catalog, optionally overriding modalities from a JSON file.

    File schema: {"modalities": [{"kind": ..., "levels": [...]}, ...]}.
    """
    if path is None:
        return Catalog()
    with open(path) as fh:
        data = json.load(fh)
    modalities = [
        Modality(kind=m["kind"], levels=tuple(float(x) for x in m["levels"]))
        for m in data["modalities"]
    ]
    return Catalog(modalities=modalities)
