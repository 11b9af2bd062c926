"""Shared entry points behind both the CLI and the HTTP service.

Keeping payload assembly here guarantees the two interfaces return
identical JSON for identical inputs.
"""

from __future__ import annotations

from .catalog import Catalog
from .perception import DEFAULT_ALPHA, DEFAULT_BETA, PerceptionProfile, encode_nearest
from .ranking import rank_configurations
from .signals import render_timeline
from .study import StudyConfig, random_profiles, run_study


def rank_payload(
    catalog: Catalog,
    preferences: dict[str, float],
    task_id: str,
    alpha: float = DEFAULT_ALPHA,
    beta: float = DEFAULT_BETA,
) -> dict:
    task = catalog.task(task_id)
    profile = PerceptionProfile(preferences=dict(preferences), alpha=alpha, beta=beta)
    report = rank_configurations(catalog.configurations, task, profile)
    return report.to_dict()


def preview_payload(
    catalog: Catalog,
    configuration_id: str,
    theta,
    task_id: str = "search",
    seconds_per_channel: float = 3.0,
) -> dict:
    config = catalog.configuration(configuration_id)
    task = catalog.task(task_id)
    point = encode_nearest(config, task, tuple(int(x) for x in theta))
    timeline = render_timeline(config, point, seconds_per_channel=seconds_per_channel, dt=0.01)
    payload = timeline.to_payload()
    payload["configuration_id"] = configuration_id
    payload["task_id"] = task_id
    payload["theta"] = [int(x) for x in theta]
    payload["point_indices"] = list(point.indices)
    return payload


def study_inputs_payload(
    tasks, trials_per_config, decode_mode, master_seed, jitter, profiles_spec, configuration_ids
) -> dict:
    """Canonical study input description used for hashing and manifests."""
    return {
        "tasks": list(tasks),
        "trials_per_config": trials_per_config,
        "decode_mode": decode_mode,
        "master_seed": master_seed,
        "jitter": jitter,
        "profiles": profiles_spec,
        "configuration_ids": list(configuration_ids),
    }


def run_study_payload(
    catalog: Catalog,
    tasks,
    trials_per_config: int,
    decode_mode: str = "map",
    master_seed: int = 0,
    jitter: bool = False,
    profiles_spec=1,
    configuration_ids=None,
    collect_trials: bool = False,
):
    """Run a study from a JSON-shaped description; returns (report, payload).

    `profiles_spec` is either an integer (that many random profiles, seeded
    from the master seed) or a list of preference dicts with optional
    alpha/beta entries.
    """
    if configuration_ids is None:
        configuration_ids = [c.id for c in catalog.study_configurations()]
    configs = [catalog.configuration(cid) for cid in configuration_ids]
    if isinstance(profiles_spec, int):
        profiles = random_profiles(profiles_spec, seed=master_seed)
    else:
        profiles = [PerceptionProfile.from_dict(dict(p)) for p in profiles_spec]
    sc = StudyConfig(
        tasks=tuple(tasks),
        trials_per_config=trials_per_config,
        decode_mode=decode_mode,
        master_seed=master_seed,
        jitter=jitter,
        profiles=tuple(profiles),
    )
    report = run_study(sc, configs, tasks=catalog.tasks, collect_trials=collect_trials)
    return report, report.to_dict()
