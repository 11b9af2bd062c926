import json

import pytest

from fluidrank.catalog import Catalog
from fluidrank.errors import UnknownIdentifier
from fluidrank.store import RunStore, canonical_json, input_hash
from fluidrank.workflows import run_study_payload, study_inputs_payload


def test_persist_and_manifest_round_trip(tmp_path):
    store = RunStore(str(tmp_path / "runs"))
    inputs = {"tasks": ["search"], "seed": 3}
    run_id = store.persist("study", inputs, {"report.json": "{}\n"})
    manifest = store.manifest(run_id)
    assert manifest["kind"] == "study"
    assert manifest["inputs"] == inputs
    assert manifest["input_hash"] == input_hash(inputs)
    assert manifest["outputs"] == ["report.json"]
    assert store.read_output(run_id, "report.json") == "{}\n"
    assert run_id in store.list_runs()


def test_unknown_run_raises(tmp_path):
    store = RunStore(str(tmp_path))
    with pytest.raises(UnknownIdentifier):
        store.manifest("nope")
    with pytest.raises(UnknownIdentifier):
        store.read_output("nope", "report.json")


def test_identical_inputs_reproduce_identical_payload(tmp_path):
    """A persisted study can be re-materialized from its manifest alone."""
    catalog = Catalog()
    store = RunStore(str(tmp_path))
    inputs = study_inputs_payload(["search"], 50, "map", 4, False, 3, ["PA", "PF", "AF"])
    _, payload = run_study_payload(
        catalog, tasks=inputs["tasks"], trials_per_config=inputs["trials_per_config"],
        decode_mode=inputs["decode_mode"], master_seed=inputs["master_seed"],
        jitter=inputs["jitter"], profiles_spec=inputs["profiles"],
        configuration_ids=inputs["configuration_ids"],
    )
    run_id = store.persist("study", inputs, {"report.json": canonical_json(payload)})

    manifest = store.manifest(run_id)
    _, payload2 = run_study_payload(
        catalog,
        tasks=manifest["inputs"]["tasks"],
        trials_per_config=manifest["inputs"]["trials_per_config"],
        decode_mode=manifest["inputs"]["decode_mode"],
        master_seed=manifest["inputs"]["master_seed"],
        jitter=manifest["inputs"]["jitter"],
        profiles_spec=manifest["inputs"]["profiles"],
        configuration_ids=manifest["inputs"]["configuration_ids"],
    )
    assert canonical_json(payload2) == store.read_output(run_id, "report.json")


def test_hash_excludes_timestamps(tmp_path):
    inputs = {"a": 1}
    assert input_hash(inputs) == input_hash(json.loads(json.dumps(inputs)))
    store = RunStore(str(tmp_path))
    r1 = store.persist("x", inputs, {"o.txt": "1"})
    r2 = store.persist("x", inputs, {"o.txt": "1"})
    assert r1 != r2  # distinct run folders
    assert r1.split("_")[1] == r2.split("_")[1]  # same input hash suffix


def test_env_var_store_root(tmp_path, monkeypatch):
    from fluidrank.store import resolve_store_root

    monkeypatch.setenv("FLUIDRANK_STORE", str(tmp_path / "envstore"))
    assert resolve_store_root(None) == str(tmp_path / "envstore")
    assert resolve_store_root("explicit") == "explicit"
    monkeypatch.delenv("FLUIDRANK_STORE")
    assert resolve_store_root(None) == "./runs"
