"""Run-artifact persistence: per-run folders with input-linked manifests.

A run folder is named by UTC timestamp plus a short hash of the canonical
input payload. The manifest links inputs to output files; timestamps live
only in the manifest, never in hashed content, so re-running with identical
inputs reproduces byte-identical report payloads.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import UnknownIdentifier

ENV_STORE = "FLUIDRANK_STORE"
DEFAULT_STORE = "./runs"


def resolve_store_root(flag_value: str | None) -> str:
    if flag_value:
        return flag_value
    return os.environ.get(ENV_STORE, DEFAULT_STORE)


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def input_hash(inputs: dict) -> str:
    return hashlib.sha256(canonical_json(inputs).encode()).hexdigest()[:12]


@dataclass
class RunStore:
    root: str

    def __post_init__(self):
        os.makedirs(self.root, exist_ok=True)

    def persist(self, kind: str, inputs: dict, outputs: dict[str, str]) -> str:
        """Write one run folder; returns the run id.

        `outputs` maps file name to text content. The manifest records the
        input payload, its hash, and the output file list.
        """
        h = input_hash(inputs)
        stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")
        run_id = f"{stamp}_{h}"
        run_dir = os.path.join(self.root, run_id)
        os.makedirs(run_dir, exist_ok=False)
        for name, content in outputs.items():
            with open(os.path.join(run_dir, name), "w") as fh:
                fh.write(content)
        manifest = {
            "run_id": run_id,
            "kind": kind,
            "created_utc": datetime.now(timezone.utc).isoformat(),
            "input_hash": h,
            "inputs": inputs,
            "outputs": sorted(outputs),
        }
        with open(os.path.join(run_dir, "manifest.json"), "w") as fh:
            fh.write(canonical_json(manifest))
        return run_id

    def manifest(self, run_id: str) -> dict:
        path = os.path.join(self.root, run_id, "manifest.json")
        if not os.path.exists(path):
            raise UnknownIdentifier(f"no run {run_id!r} in store {self.root}")
        with open(path) as fh:
            return json.load(fh)

    def read_output(self, run_id: str, name: str) -> str:
        path = os.path.join(self.root, run_id, name)
        if not os.path.exists(path):
            raise UnknownIdentifier(f"run {run_id!r} has no output {name!r}")
        with open(path) as fh:
            return fh.read()

    def list_runs(self) -> list[str]:
        return sorted(
            d for d in os.listdir(self.root) if os.path.isdir(os.path.join(self.root, d))
        )
