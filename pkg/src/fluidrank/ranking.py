"""Entropy, mutual information, and configuration ranking.

All quantities are exact enumerations over the joint (theta, signal) space
in natural log; reports also carry bits for human consumption. Mutual
information is computed both as the entropy difference H(s) - H(s|theta)
and in Kullback-Leibler form, and the two must agree within 1e-9; the
ranking never uses sampling or the constant first-term approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .perception import PerceptionProfile, likelihood_table
from .signals import Configuration
from .tasks import TaskSpec

LN2 = math.log(2.0)
FORM_AGREEMENT_NATS = 1e-9


def _entropy(probs) -> float:
    return -math.fsum(p * math.log(p) for p in probs if p > 0.0)


def conditional_entropy(
    config: Configuration, task: TaskSpec, profile: PerceptionProfile
) -> float:
    """H(s | theta) in nats, with 0 log 0 = 0."""
    table = likelihood_table(config, task, profile)
    return math.fsum(task.prior[i] * _entropy(table[i]) for i in range(task.size))


def signal_marginal(
    config: Configuration, task: TaskSpec, profile: PerceptionProfile
) -> list[float]:
    table = likelihood_table(config, task, profile)
    n_s = len(table[0])
    return [
        math.fsum(task.prior[i] * table[i][col] for i in range(task.size))
        for col in range(n_s)
    ]


def marginal_entropy(
    config: Configuration, task: TaskSpec, profile: PerceptionProfile
) -> float:
    """H(s) in nats under the prior-averaged signal distribution."""
    return _entropy(signal_marginal(config, task, profile))


def mutual_information(
    config: Configuration, task: TaskSpec, profile: PerceptionProfile
) -> float:
    """I(theta; s) in nats, clamped at zero.

    Computed as H(s) - H(s|theta) and cross-checked against the KL form;
    disagreement beyond 1e-9 indicates a numerical defect and raises.
    """
    table = likelihood_table(config, task, profile)
    n_s = len(table[0])
    marginal = [
        math.fsum(task.prior[i] * table[i][col] for i in range(task.size))
        for col in range(n_s)
    ]
    h_s = _entropy(marginal)
    h_s_given_theta = math.fsum(task.prior[i] * _entropy(table[i]) for i in range(task.size))
    diff_form = h_s - h_s_given_theta

    kl_terms = []
    for i in range(task.size):
        rho = task.prior[i]
        if rho <= 0:
            continue
        for col in range(n_s):
            p = table[i][col]
            if p > 0 and marginal[col] > 0:
                kl_terms.append(rho * p * (math.log(p) - math.log(marginal[col])))
    kl_form = math.fsum(kl_terms)

    if abs(diff_form - kl_form) > FORM_AGREEMENT_NATS:
        raise ArithmeticError(
            f"MI forms disagree: {diff_form} (entropy diff) vs {kl_form} (KL) "
            f"for {config.id} on {task.id}"
        )
    return max(0.0, diff_form)


def paper_first_term(config: Configuration, n_configs: int) -> float:
    """Diagnostic constant log(|S| * N); never used for ranking."""
    if n_configs < 1:
        raise ValueError(f"n_configs must be >= 1, got {n_configs}")
    return math.log(config.space_size * n_configs)


@dataclass(frozen=True)
class RankingRow:
    configuration_id: str
    channel_kinds: tuple[str, ...]
    rank: int
    mi_nats: float
    mi_bits: float
    marginal_entropy_nats: float
    conditional_entropy_nats: float
    first_term_nats: float

    def to_dict(self) -> dict:
        return {
            "configuration_id": self.configuration_id,
            "channel_kinds": list(self.channel_kinds),
            "rank": self.rank,
            "mi_nats": self.mi_nats,
            "mi_bits": self.mi_bits,
            "marginal_entropy_nats": self.marginal_entropy_nats,
            "conditional_entropy_nats": self.conditional_entropy_nats,
            "diagnostics": {"first_term_nats": self.first_term_nats},
        }


@dataclass(frozen=True)
class RankingReport:
    task_id: str
    alpha: float
    beta: float
    preferences: dict
    rows: tuple[RankingRow, ...]

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "alpha": self.alpha,
            "beta": self.beta,
            "preferences": {k: v for k, v in sorted(self.preferences.items())},
            "rows": [r.to_dict() for r in self.rows],
        }

    def rank1(self) -> RankingRow:
        return self.rows[0]


def rank_configurations(
    configs: list[Configuration], task: TaskSpec, profile: PerceptionProfile
) -> RankingReport:
    """Evaluate MI for every configuration and sort into ranks 1..N.

    Ties break by configuration id, lexicographically, so reports are
    deterministic.
    """
    if not configs:
        raise ValueError("configs must be non-empty")
    n = len(configs)
    scored = []
    for c in configs:
        mi = mutual_information(c, task, profile)
        scored.append(
            {
                "config": c,
                "mi": mi,
                "h_s": marginal_entropy(c, task, profile),
                "h_s_theta": conditional_entropy(c, task, profile),
                "first_term": paper_first_term(c, n),
            }
        )
    scored.sort(key=lambda rec: (-rec["mi"], rec["config"].id))
    rows = tuple(
        RankingRow(
            configuration_id=rec["config"].id,
            channel_kinds=tuple(m.kind for m in rec["config"].channels),
            rank=i + 1,
            mi_nats=rec["mi"],
            mi_bits=rec["mi"] / LN2,
            marginal_entropy_nats=rec["h_s"],
            conditional_entropy_nats=rec["h_s_theta"],
            first_term_nats=rec["first_term"],
        )
        for i, rec in enumerate(scored)
    )
    return RankingReport(
        task_id=task.id,
        alpha=profile.alpha,
        beta=profile.beta,
        preferences=dict(profile.preferences),
        rows=rows,
    )
