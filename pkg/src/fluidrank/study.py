"""Simulated user-study harness: seeded trials, error metrics, rank comparison.

Each trial draws a latent task value from the prior, presents the nearest
renderable signal point (the encoder), draws the signal the user actually
perceives from the max-entropy channel (their perception noise), decodes
that percept through the perception model, and scores squared-error and
Manhattan distance on the axis indices. A study ranks the configurations
for each profile, runs a trial batch per configuration, and aggregates
error statistics per rank, which is the software analog of comparing
deployed Rank 1/2/3 interfaces.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidStudyConfig
from .perception import (
    DEFAULT_ALPHA,
    DEFAULT_BETA,
    PerceptionProfile,
    encode_nearest,
    likelihood_table,
)
from .ranking import RankingReport, rank_configurations
from .signals import Configuration, signal_space
from .tasks import TaskSpec, uniform_task
from .units import OPEN_FLOW_SLM, OPEN_FLOW_STD_SLM, SNAP_UP_KPA, SNAP_UP_STD_KPA, default_valve_params

SEARCH_AXES = (4, 4)
ASSEMBLY_AXES = (7, 3)


def build_search_task() -> TaskSpec:
    """Goal search on a 4x4 grid, uniform prior."""
    return uniform_task("search", SEARCH_AXES)


def build_assembly_task() -> TaskSpec:
    """Seven ingredients by three destination plates, uniform prior."""
    return uniform_task("assembly", ASSEMBLY_AXES)


def default_tasks() -> dict[str, TaskSpec]:
    return {"search": build_search_task(), "assembly": build_assembly_task()}


@dataclass(frozen=True)
class TrialRecord:
    task_id: str
    configuration_id: str
    theta: tuple[int, ...]
    presented: tuple[int, ...]  # per-channel level indices
    decoded: tuple[int, ...]
    squared_error: int
    manhattan: int
    seed: int
    completion_time_s: None = None  # no motor model; kept for schema parity
    valve_jitter: dict | None = None


@dataclass(frozen=True)
class StudyConfig:
    tasks: tuple[str, ...] = ("search", "assembly")
    trials_per_config: int = 1000
    decode_mode: str = "map"
    master_seed: int = 0
    jitter: bool = False
    profiles: tuple[PerceptionProfile, ...] = ()

    def __post_init__(self):
        if self.trials_per_config < 1:
            raise InvalidStudyConfig(
                f"trials_per_config must be >= 1, got {self.trials_per_config}"
            )
        if self.decode_mode not in ("map", "sample"):
            raise InvalidStudyConfig(f"decode_mode must be map or sample, got {self.decode_mode!r}")
        if not self.profiles:
            raise InvalidStudyConfig("at least one perception profile is required")
        if not self.tasks:
            raise InvalidStudyConfig("at least one task is required")


def random_profiles(
    n: int, seed: int, beta: float = DEFAULT_BETA, alpha: float = DEFAULT_ALPHA
) -> list[PerceptionProfile]:
    """Synthetic population: preferences i.i.d. uniform on [0, 1]."""
    rng = np.random.default_rng([seed, 0x5EED])
    out = []
    for _ in range(n):
        prefs = {
            "pressure": float(rng.uniform()),
            "frequency": float(rng.uniform()),
            "area": float(rng.uniform()),
        }
        out.append(PerceptionProfile(preferences=prefs, beta=beta, alpha=alpha))
    return out


def _errors(theta: tuple[int, ...], decoded: tuple[int, ...]) -> tuple[int, int]:
    sq = sum((a - b) ** 2 for a, b in zip(theta, decoded))
    man = sum(abs(a - b) for a, b in zip(theta, decoded))
    return sq, man


def _jitter_params(rng) -> dict:
    """Per-trial valve parameter noise at the characterized spread.

    The decode path abstracts over valve physics, so jitter is recorded as
    rendering metadata (perturbed snap threshold, flow, and the resulting
    single-stage cascade delay) rather than fed into the decoder.
    """
    snap = max(0.5, float(rng.normal(SNAP_UP_KPA, SNAP_UP_STD_KPA)))
    flow = max(0.05, float(rng.normal(OPEN_FLOW_SLM, OPEN_FLOW_STD_SLM)))
    v = default_valve_params()
    delay = (v.snap_fill_volume_ml + 1.25) / (flow * 1000.0 / 60.0)
    return {"snap_up_kPa": snap, "open_flow_slm": flow, "stage_delay_s": delay}


class DecisionTables:
    """Precomputed encoder/decoder tables for one (config, task, profile).

    The encoder and MAP decoder are pure functions of theta and of the
    signal column respectively, so trials reduce to table lookups.
    """

    def __init__(self, config: Configuration, task: TaskSpec, profile: PerceptionProfile):
        self.config = config
        self.task = task
        self.profile = profile
        self.table = likelihood_table(config, task, profile)
        points = signal_space(config)
        self.point_col = {p.indices: c for c, p in enumerate(points)}
        self.points = points
        self.encode_col = []
        for theta in task.theta_values():
            pt = encode_nearest(config, task, theta)
            self.encode_col.append(self.point_col[pt.indices])
        # MAP decode per column: lowest flat index wins ties.
        self.map_theta = []
        for col in range(len(points)):
            post = [task.prior[i] * self.table[i][col] for i in range(task.size)]
            best = 0
            for i in range(1, task.size):
                if post[i] > post[best]:
                    best = i
            self.map_theta.append(best)

    def posterior(self, col: int) -> list[float]:
        raw = [self.task.prior[i] * self.table[i][col] for i in range(self.task.size)]
        total = math.fsum(raw)
        if total <= 0:
            return list(self.task.prior)
        return [r / total for r in raw]


def run_trial(
    task: TaskSpec,
    config: Configuration,
    profile: PerceptionProfile,
    seed: int,
    decode_mode: str = "map",
    jitter: bool = False,
    tables: DecisionTables | None = None,
) -> TrialRecord:
    """One seeded trial: draw theta, encode, perceive, decode, score.

    The presented signal is the deterministic nearest grid point to
    h(theta); the perceived signal is drawn from the channel p(s | theta),
    which is where the profile's sensitivity and saliency weights act.
    """
    t = tables or DecisionTables(config, task, profile)
    rng = np.random.default_rng([seed])
    theta_idx = int(rng.choice(task.size, p=np.asarray(task.prior)))
    theta = task.unflatten(theta_idx)
    presented_col = t.encode_col[theta_idx]
    perceived_col = int(rng.choice(len(t.points), p=np.asarray(t.table[theta_idx])))
    if decode_mode == "map":
        decoded_idx = t.map_theta[perceived_col]
    elif decode_mode == "sample":
        post = t.posterior(perceived_col)
        decoded_idx = int(rng.choice(task.size, p=np.asarray(post) / math.fsum(post)))
    else:
        raise InvalidStudyConfig(f"decode_mode must be map or sample, got {decode_mode!r}")
    decoded = task.unflatten(decoded_idx)
    sq, man = _errors(theta, decoded)
    return TrialRecord(
        task_id=task.id,
        configuration_id=config.id,
        theta=theta,
        presented=t.points[presented_col].indices,
        decoded=decoded,
        squared_error=sq,
        manhattan=man,
        seed=seed,
        valve_jitter=_jitter_params(rng) if jitter else None,
    )


def expected_errors(
    task: TaskSpec, config: Configuration, profile: PerceptionProfile
) -> tuple[float, float]:
    """Exact prior-expected (squared_error, manhattan) under MAP decoding.

    Averages over the percept channel exactly instead of sampling.
    """
    t = DecisionTables(config, task, profile)
    sq = 0.0
    man = 0.0
    for i, theta in enumerate(task.theta_values()):
        for col, p_col in enumerate(t.table[i]):
            if p_col <= 0:
                continue
            decoded = task.unflatten(t.map_theta[col])
            s, m = _errors(theta, decoded)
            sq += task.prior[i] * p_col * s
            man += task.prior[i] * p_col * m
    return sq, man


@dataclass(frozen=True)
class RankOutcome:
    rank: int
    configuration_id: str
    mi_nats: float
    mean_squared_error: float
    sd_squared_error: float
    mean_manhattan: float
    sd_manhattan: float

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "configuration_id": self.configuration_id,
            "mi_nats": self.mi_nats,
            "mean_squared_error": self.mean_squared_error,
            "sd_squared_error": self.sd_squared_error,
            "mean_manhattan": self.mean_manhattan,
            "sd_manhattan": self.sd_manhattan,
        }


@dataclass(frozen=True)
class ProfileTaskResult:
    profile_index: int
    task_id: str
    ranking: RankingReport
    outcomes: tuple[RankOutcome, ...]

    def outcome_for_rank(self, rank: int) -> RankOutcome:
        return self.outcomes[rank - 1]


@dataclass
class StudyReport:
    config: StudyConfig
    results: list[ProfileTaskResult]
    trials: list[TrialRecord] = field(default_factory=list)

    def rank1_counts(self, task_id: str) -> dict[str, int]:
        counts: dict[str, int] = {}
        for r in self.results:
            if r.task_id != task_id:
                continue
            cid = r.outcomes[0].configuration_id
            counts[cid] = counts.get(cid, 0) + 1
        return dict(sorted(counts.items()))

    def rank_vs_rank_fraction(self, task_id: str, better: int = 1, worse: int = 3) -> float:
        """Fraction of profiles whose rank-`better` error <= rank-`worse` error."""
        wins = 0
        total = 0
        for r in self.results:
            if r.task_id != task_id:
                continue
            total += 1
            if r.outcome_for_rank(better).mean_squared_error <= r.outcome_for_rank(worse).mean_squared_error:
                wins += 1
        return wins / total if total else float("nan")

    def to_dict(self) -> dict:
        return {
            "study": {
                "tasks": list(self.config.tasks),
                "trials_per_config": self.config.trials_per_config,
                "decode_mode": self.config.decode_mode,
                "master_seed": self.config.master_seed,
                "jitter": self.config.jitter,
                "n_profiles": len(self.config.profiles),
            },
            "rank1_counts": {t: self.rank1_counts(t) for t in self.config.tasks},
            "rank1_vs_rank3": {t: self.rank_vs_rank_fraction(t) for t in self.config.tasks},
            "results": [
                {
                    "profile_index": r.profile_index,
                    "task_id": r.task_id,
                    "profile": self.config.profiles[r.profile_index].to_dict(),
                    "outcomes": [o.to_dict() for o in r.outcomes],
                }
                for r in self.results
            ],
        }

    def trials_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(
            [
                "task_id",
                "configuration_id",
                "seed",
                "theta",
                "presented",
                "decoded",
                "squared_error",
                "manhattan",
            ]
        )
        for tr in self.trials:
            writer.writerow(
                [
                    tr.task_id,
                    tr.configuration_id,
                    tr.seed,
                    "|".join(map(str, tr.theta)),
                    "|".join(map(str, tr.presented)),
                    "|".join(map(str, tr.decoded)),
                    tr.squared_error,
                    tr.manhattan,
                ]
            )
        return buf.getvalue()


def run_study(
    study: StudyConfig,
    configs: list[Configuration],
    tasks: dict[str, TaskSpec] | None = None,
    collect_trials: bool = False,
) -> StudyReport:
    """Rank configurations per profile, run seeded trial batches, aggregate.

    Deterministic: per-batch seeds derive from the master seed and the
    (profile, task, configuration) coordinates, so identical StudyConfig
    values reproduce the report byte for byte.
    """
    task_map = tasks or default_tasks()
    results: list[ProfileTaskResult] = []
    all_trials: list[TrialRecord] = []

    for p_idx, profile in enumerate(study.profiles):
        for task_id in study.tasks:
            if task_id not in task_map:
                raise InvalidStudyConfig(f"unknown task {task_id!r}")
            task = task_map[task_id]
            ranking = rank_configurations(configs, task, profile)
            config_by_id = {c.id: c for c in configs}
            outcomes = []
            for row in ranking.rows:
                config = config_by_id[row.configuration_id]
                tables = DecisionTables(config, task, profile)
                batch_seed = [study.master_seed, p_idx, _stable_id(task_id), _stable_id(row.configuration_id)]
                sq, man, trials = _run_batch(
                    tables, study.trials_per_config, batch_seed, study.decode_mode,
                    study.jitter, collect_trials,
                )
                outcomes.append(
                    RankOutcome(
                        rank=row.rank,
                        configuration_id=row.configuration_id,
                        mi_nats=row.mi_nats,
                        mean_squared_error=float(np.mean(sq)),
                        sd_squared_error=float(np.std(sq)),
                        mean_manhattan=float(np.mean(man)),
                        sd_manhattan=float(np.std(man)),
                    )
                )
                all_trials.extend(trials)
            results.append(
                ProfileTaskResult(
                    profile_index=p_idx,
                    task_id=task_id,
                    ranking=ranking,
                    outcomes=tuple(outcomes),
                )
            )
    return StudyReport(config=study, results=results, trials=all_trials)


def _stable_id(text: str) -> int:
    out = 0
    for ch in text:
        out = (out * 131 + ord(ch)) % (2**31)
    return out


def _run_batch(
    tables: DecisionTables,
    n_trials: int,
    batch_seed: list[int],
    decode_mode: str,
    jitter: bool,
    collect: bool,
):
    task = tables.task
    rng = np.random.default_rng(batch_seed)
    thetas = rng.choice(task.size, size=n_trials, p=np.asarray(task.prior))
    enc = np.asarray(tables.encode_col, dtype=np.int64)
    presented = enc[thetas]

    # Perceived signal drawn from the channel row of each trial's theta.
    channel = np.asarray(tables.table)
    cum = np.cumsum(channel, axis=1)
    draws = rng.random(n_trials)
    perceived = (cum[thetas] < draws[:, None]).sum(axis=1)
    np.clip(perceived, 0, len(tables.points) - 1, out=perceived)

    if decode_mode == "map":
        dec_tab = np.asarray(tables.map_theta, dtype=np.int64)
        decoded = dec_tab[perceived]
    else:
        posts = np.asarray([tables.posterior(c) for c in range(len(tables.points))])
        decoded = np.empty(n_trials, dtype=np.int64)
        for i in range(n_trials):
            decoded[i] = rng.choice(task.size, p=posts[perceived[i]])

    theta_tuples = np.asarray([task.unflatten(i) for i in range(task.size)], dtype=np.int64)
    dt = theta_tuples[thetas]
    dd = theta_tuples[decoded]
    sq = ((dt - dd) ** 2).sum(axis=1)
    man = np.abs(dt - dd).sum(axis=1)

    trials: list[TrialRecord] = []
    if collect:
        jit_rng = np.random.default_rng(batch_seed + [7])
        for i in range(n_trials):
            trials.append(
                TrialRecord(
                    task_id=task.id,
                    configuration_id=tables.config.id,
                    theta=tuple(int(x) for x in dt[i]),
                    presented=tables.points[int(presented[i])].indices,
                    decoded=tuple(int(x) for x in dd[i]),
                    squared_error=int(sq[i]),
                    manhattan=int(man[i]),
                    seed=int(thetas[i]),
                    valve_jitter=_jitter_params(jit_rng) if jitter else None,
                )
            )
    return sq, man, trials
