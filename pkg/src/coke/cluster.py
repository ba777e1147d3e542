"""Cluster-level Thompson Sampling over model families (LLM vs KGM).

Each cluster keeps a Beta(alpha, beta) belief over its success rate, seeded
from the published accuracies of its member arms. Selection samples one
theta per cluster and plays the argmax; only the played cluster's posterior
is updated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .errors import ConfigError
from .rng import RandomSource
from .types import KGM, ArmSpec

# Keeps the Beta well-defined when a reported accuracy is exactly 0 or 1.
MIN_PSEUDO_COUNT = 1e-3


@dataclass
class ClusterBelief:
    """Beta success/failure belief for one cluster."""

    cluster: str
    alpha: float
    beta: float
    pulls: int = 0

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    def to_dict(self) -> dict[str, Any]:
        return {"cluster": self.cluster, "alpha": self.alpha, "beta": self.beta, "pulls": self.pulls}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ClusterBelief:
        return cls(cluster=d["cluster"], alpha=d["alpha"], beta=d["beta"], pulls=d["pulls"])


def seed_prior(arms_in_cluster: Sequence[ArmSpec], prior_strength: float) -> ClusterBelief:
    """Belief seeded from the mean reported accuracy of the cluster's arms."""
    if not arms_in_cluster:
        raise ConfigError("cannot seed a prior for an empty cluster")
    clusters = {a.cluster for a in arms_in_cluster}
    if len(clusters) != 1:
        raise ConfigError(f"arms span multiple clusters: {sorted(clusters)}")
    mean_acc = sum(a.reported_accuracy for a in arms_in_cluster) / len(arms_in_cluster)
    alpha = max(prior_strength * mean_acc, MIN_PSEUDO_COUNT)
    beta = max(prior_strength * (1.0 - mean_acc), MIN_PSEUDO_COUNT)
    return ClusterBelief(cluster=clusters.pop(), alpha=alpha, beta=beta)


def sample_theta(belief: ClusterBelief, rng: RandomSource) -> float:
    """One Beta(alpha, beta) draw via two gamma draws: G1 / (G1 + G2)."""
    g1 = rng.gamma(belief.alpha)
    g2 = rng.gamma(belief.beta)
    total = g1 + g2
    if total <= 0.0:
        # Tiny shapes can underflow both draws to zero; fall back to the mean.
        theta = belief.mean
    else:
        theta = g1 / total
    return float(min(max(theta, 1e-12), 1.0 - 1e-12))


def select_cluster(
    beliefs: Iterable[ClusterBelief], rng: RandomSource
) -> tuple[str, dict[str, float]]:
    """Sample theta for every cluster and return the argmax cluster.

    Clusters are sampled in name order so draw sequences are reproducible.
    Exact theta ties break toward KGM (the cheap cluster), then by name.
    """
    ordered = sorted(beliefs, key=lambda b: b.cluster)
    if not ordered:
        raise ConfigError("select_cluster needs at least one cluster")
    thetas = {b.cluster: sample_theta(b, rng) for b in ordered}
    best = min(thetas, key=lambda c: (-thetas[c], c != KGM, c))
    return best, thetas


def update_posterior(belief: ClusterBelief, reward: int) -> ClusterBelief:
    """Conjugate update: success bumps alpha, failure bumps beta."""
    if reward not in (0, 1):
        raise ValueError(f"reward must be 0 or 1, got {reward!r}")
    belief.alpha += reward
    belief.beta += 1 - reward
    belief.pulls += 1
    return belief
