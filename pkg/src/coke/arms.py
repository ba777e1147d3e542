"""Per-arm contextual linear model.

Each arm keeps the running ridge sufficient statistics A = sum(q q^T) + sigma*I
and b = sum(r * q). The posterior mean mu solves A mu = b and scoring adds an
optimism bonus gamma * sqrt(q^T A^-1 q), computed via a linear solve rather
than an explicit inverse.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .errors import ConfigError
from .types import ArmSpec, Question

# Max-abs residual allowed on A*mu = b after a refresh.
MU_RESIDUAL_TOL = 1e-9


class ArmModel:
    """Ridge state and scoring for a single arm."""

    def __init__(self, spec: ArmSpec, d: int, sigma: float) -> None:
        if d <= 0:
            raise ConfigError("embedding dimension must be positive")
        self.spec = spec
        self.d = d
        self.sigma = spec.sigma if spec.sigma is not None else sigma
        if self.sigma <= 0:
            raise ConfigError(f"arm {spec.arm_id!r}: ridge coefficient must be > 0")
        self.gram = self.sigma * np.eye(d)
        self.response = np.zeros(d)
        self.mu = np.zeros(d)
        self.pulls = 0

    def _check_dim(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if q.shape != (self.d,):
            raise ConfigError(
                f"arm {self.spec.arm_id!r}: embedding has shape {q.shape}, expected ({self.d},)"
            )
        return q

    def score(self, question: Question, gamma: float) -> tuple[float, float]:
        """(exploit, explore) = (q . mu, gamma * sqrt(q^T A^-1 q))."""
        q = self._check_dim(question.embedding)
        exploit = float(q @ self.mu)
        solved = np.linalg.solve(self.gram, q)
        explore = float(gamma * np.sqrt(max(q @ solved, 0.0)))
        return exploit, explore

    def confidence_interval(self, question: Question, gamma: float) -> tuple[float, float]:
        """Interval q.mu +/- gamma * sqrt(q^T A^-1 q); upper == exploit + explore."""
        exploit, explore = self.score(question, gamma)
        return exploit - explore, exploit + explore

    def update(self, question: Question, reward: int) -> None:
        """Rank-1 update of (A, b) and a fresh solve for mu."""
        if reward not in (0, 1):
            raise ValueError(f"reward must be 0 or 1, got {reward!r}")
        q = self._check_dim(question.embedding)
        self.gram += np.outer(q, q)
        self.response += reward * q
        self.mu = np.linalg.solve(self.gram, self.response)
        self.pulls += 1
        residual = np.max(np.abs(self.gram @ self.mu - self.response))
        if residual > MU_RESIDUAL_TOL:
            raise FloatingPointError(
                f"arm {self.spec.arm_id!r}: ridge solve residual {residual:.3e} "
                f"exceeds {MU_RESIDUAL_TOL:.0e}"
            )

    def to_dict(self) -> dict[str, Any]:
        return {
            "arm_id": self.spec.arm_id,
            "gram": [float(x) for x in self.gram.ravel()],
            "response": [float(x) for x in self.response],
            "pulls": self.pulls,
        }

    def restore(self, d: dict[str, Any]) -> None:
        """Load checkpointed (A, b, pulls); mu is re-solved, not stored."""
        gram = np.asarray(d["gram"], dtype=float).reshape(self.d, self.d)
        response = np.asarray(d["response"], dtype=float)
        if response.shape != (self.d,):
            raise ConfigError(f"arm {self.spec.arm_id!r}: checkpoint dimension mismatch")
        self.gram = gram
        self.response = response
        self.mu = np.linalg.solve(self.gram, self.response)
        self.pulls = int(d["pulls"])
