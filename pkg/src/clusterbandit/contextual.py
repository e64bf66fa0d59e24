"""Linear contextual bandit policies with clustered arms.

Each arm (and, for the clustered variants, each cluster) carries a ridge
posterior over a d-dimensional coefficient vector: a precision matrix B
starting at the identity, a reward-weighted context sum f, and the mean
B^-1 f. Thompson variants sample a scalar score per entity from
N(mu'x, v x'B^-1 x); UCB variants score with mu'x + alpha sqrt(x'B^-1 x).

Inverses are maintained with rank-one updates and re-solved densely every
1000 updates per entity to cap numerical drift.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
import numpy as np

from .core import DisjointClustering, random_argmax
from .policies import Choice

__all__ = [
    "LinearBelief",
    "lin_sample",
    "lin_update",
    "ContextualInstance",
    "ContextualPolicy",
    "LinThompson",
    "ClusteredLinThompson",
    "LinUcb",
    "ClusteredLinUcb",
    "CONTEXTUAL_POLICY_KEYS",
    "make_contextual_policy",
]

RESOLVE_EVERY = 1000


def _check_context(x: np.ndarray, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (dim,):
        raise ValueError(f"context shape {x.shape} does not match dimension {dim}")
    if not np.all(np.isfinite(x)):
        raise ValueError("context has non-finite entries")
    return x


# ---------------------------------------------------------------------------
# Single ridge posterior
# ---------------------------------------------------------------------------

class LinearBelief:
    """Ridge posterior over one d-dimensional coefficient vector.

    Starts at B = I, f = 0, mu = 0. ``update`` adds one (context, reward)
    observation: B += x x', f += r x, mu = B^-1 f, with the cached inverse
    maintained by the Sherman-Morrison identity and refreshed by a dense
    solve every ``RESOLVE_EVERY`` updates.
    """

    def __init__(self, dim: int, v: float = 1.0) -> None:
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        if v <= 0:
            raise ValueError("sampling-variance scale v must be positive")
        self.dim = dim
        self.v = float(v)
        self.b_matrix = np.eye(dim)
        self.b_inv = np.eye(dim)
        self.f_vec = np.zeros(dim)
        self.mu_vec = np.zeros(dim)
        self.n_updates = 0

    def copy(self) -> "LinearBelief":
        out = LinearBelief(self.dim, self.v)
        out.b_matrix = self.b_matrix.copy()
        out.b_inv = self.b_inv.copy()
        out.f_vec = self.f_vec.copy()
        out.mu_vec = self.mu_vec.copy()
        out.n_updates = self.n_updates
        return out

    def update(self, x: np.ndarray, reward: float) -> None:
        x = _check_context(x, self.dim)
        if not np.isfinite(reward):
            raise ValueError(f"non-finite reward {reward}")
        u = self.b_inv @ x
        self.b_inv -= np.outer(u, u) / (1.0 + x @ u)
        self.b_matrix += np.outer(x, x)
        self.f_vec += reward * x
        self.n_updates += 1
        if self.n_updates % RESOLVE_EVERY == 0:
            self.b_inv = np.linalg.inv(self.b_matrix)
            self.mu_vec = np.linalg.solve(self.b_matrix, self.f_vec)
        else:
            self.mu_vec = self.b_inv @ self.f_vec

    def sample(self, x: np.ndarray, rng: np.random.Generator) -> float:
        x = _check_context(x, self.dim)
        mean = float(self.mu_vec @ x)
        var = self.v * float(x @ self.b_inv @ x)
        return float(rng.normal(mean, math.sqrt(max(var, 0.0))))

    def ucb_index(self, x: np.ndarray, alpha: float) -> float:
        x = _check_context(x, self.dim)
        width = math.sqrt(max(float(x @ self.b_inv @ x), 0.0))
        return float(self.mu_vec @ x) + alpha * width


def lin_sample(belief: LinearBelief, x: np.ndarray, rng: np.random.Generator) -> float:
    """Gaussian score draw N(mu'x, v x'B^-1 x) from one belief."""
    return belief.sample(x, rng)


def lin_update(belief: LinearBelief, x: np.ndarray, reward: float) -> LinearBelief:
    """Posterior after one (context, reward) observation; the input is unchanged."""
    out = belief.copy()
    out.update(x, reward)
    return out


# ---------------------------------------------------------------------------
# Stacked posteriors (vectorized across entities)
# ---------------------------------------------------------------------------

class _LinearBank:
    """Ridge posteriors for n entities, stored stacked for vector scoring."""

    def __init__(self, n: int, dim: int, v: float) -> None:
        self.n = n
        self.dim = dim
        self.v = float(v)
        eye = np.eye(dim)
        self.B = np.tile(eye, (n, 1, 1))
        self.Binv = np.tile(eye, (n, 1, 1))
        self.F = np.zeros((n, dim))
        self.Mu = np.zeros((n, dim))
        self.counts = np.zeros(n, dtype=np.int64)

    def _quad(self, x: np.ndarray, subset: np.ndarray | None) -> np.ndarray:
        binv = self.Binv if subset is None else self.Binv[subset]
        return np.maximum(np.einsum("nij,i,j->n", binv, x, x), 0.0)

    def sample(self, x: np.ndarray, rng: np.random.Generator, subset: np.ndarray | None = None) -> np.ndarray:
        mu = self.Mu if subset is None else self.Mu[subset]
        mean = mu @ x
        scale = np.sqrt(self.v * self._quad(x, subset))
        return rng.normal(mean, scale)

    def ucb(self, x: np.ndarray, alpha: float, subset: np.ndarray | None = None) -> np.ndarray:
        mu = self.Mu if subset is None else self.Mu[subset]
        return mu @ x + alpha * np.sqrt(self._quad(x, subset))

    def update(self, i: int, x: np.ndarray, reward: float) -> None:
        if not np.isfinite(reward):
            raise ValueError(f"non-finite reward {reward}")
        u = self.Binv[i] @ x
        self.Binv[i] -= np.outer(u, u) / (1.0 + x @ u)
        self.B[i] += np.outer(x, x)
        self.F[i] += reward * x
        self.counts[i] += 1
        if self.counts[i] % RESOLVE_EVERY == 0:
            self.Binv[i] = np.linalg.inv(self.B[i])
            self.Mu[i] = np.linalg.solve(self.B[i], self.F[i])
        else:
            self.Mu[i] = self.Binv[i] @ self.F[i]

    def belief(self, i: int) -> LinearBelief:
        out = LinearBelief(self.dim, self.v)
        out.b_matrix = self.B[i].copy()
        out.b_inv = self.Binv[i].copy()
        out.f_vec = self.F[i].copy()
        out.mu_vec = self.Mu[i].copy()
        out.n_updates = int(self.counts[i])
        return out


# ---------------------------------------------------------------------------
# Contextual environment
# ---------------------------------------------------------------------------

class ContextualInstance:
    """Linear-reward environment with clustered arm coefficients.

    Arm j responds to context x with expected reward theta_j'x; the
    realized reward is uniform on the interval between 0 and twice the
    expectation (the interval is reversed when the expectation is negative
    and collapses to a point mass at zero expectation), so its mean is
    exactly theta_j'x.
    """

    def __init__(self, theta: np.ndarray, clustering: DisjointClustering, epsilon: float = 0.0) -> None:
        theta = np.asarray(theta, dtype=np.float64)
        if theta.ndim != 2:
            raise ValueError("theta must be (n_arms, dim)")
        if clustering.n_arms != theta.shape[0]:
            raise ValueError("clustering size does not match arm count")
        if not np.all(np.isfinite(theta)):
            raise ValueError("theta has non-finite entries")
        self.theta = theta
        self.theta.setflags(write=False)
        self.clustering = clustering
        self.epsilon = float(epsilon)

    @property
    def n_arms(self) -> int:
        return int(self.theta.shape[0])

    @property
    def dim(self) -> int:
        return int(self.theta.shape[1])

    def expected_reward(self, arm: int, x: np.ndarray) -> float:
        if not 0 <= arm < self.n_arms:
            raise ValueError(f"unknown arm id {arm}")
        return float(self.theta[arm] @ x)

    def expected_rewards(self, x: np.ndarray) -> np.ndarray:
        return self.theta @ x

    def best_expected(self, x: np.ndarray) -> float:
        return float((self.theta @ x).max())

    def draw_reward(self, arm: int, x: np.ndarray, rng: np.random.Generator) -> float:
        m = self.expected_reward(arm, x)
        lo, hi = (0.0, 2.0 * m) if m >= 0.0 else (2.0 * m, 0.0)
        return float(rng.uniform(lo, hi))

    def __repr__(self) -> str:
        return (
            f"ContextualInstance(n_arms={self.n_arms}, dim={self.dim}, "
            f"n_clusters={self.clustering.n_clusters}, epsilon={self.epsilon})"
        )


# ---------------------------------------------------------------------------
# Policies
# ---------------------------------------------------------------------------

class ContextualPolicy(ABC):
    """Select/update interface for contextual policies."""

    key: str = ""
    path_depth: int = 0

    @abstractmethod
    def select(self, t: int, x: np.ndarray, rng: np.random.Generator) -> Choice:
        """Choose an arm for context ``x`` at step ``t``."""

    @abstractmethod
    def update(self, choice: Choice, x: np.ndarray, reward: float) -> None:
        """Feed back the reward observed for ``choice`` under context ``x``."""

    def get_params(self) -> dict:
        return {}


class LinThompson(ContextualPolicy):
    """Linear Thompson sampling over a flat action set."""

    key = "lints"

    def __init__(self, n_arms: int, dim: int, v: float = 1.0) -> None:
        self._arms = _LinearBank(n_arms, dim, v)
        self.dim = dim
        self.v = float(v)

    def get_params(self) -> dict:
        return {"v": self.v}

    def arm_belief(self, arm: int) -> LinearBelief:
        return self._arms.belief(arm)

    def select(self, t: int, x: np.ndarray, rng: np.random.Generator) -> Choice:
        x = _check_context(x, self.dim)
        theta = self._arms.sample(x, rng)
        return Choice(arm=random_argmax(theta, rng))

    def update(self, choice: Choice, x: np.ndarray, reward: float) -> None:
        x = _check_context(x, self.dim)
        self._arms.update(choice.arm, x, reward)


class ClusteredLinThompson(ContextualPolicy):
    """Two-level linear Thompson sampling over a disjoint clustering.

    Cluster-level posteriors pick the cluster, arm-level posteriors pick
    the arm within it; both levels are updated with the same observed
    (context, reward) pair.
    """

    key = "lintsc"
    path_depth = 1

    def __init__(self, clustering: DisjointClustering, dim: int, v: float = 1.0) -> None:
        self.clustering = clustering
        self.dim = dim
        self.v = float(v)
        self._clusters = _LinearBank(clustering.n_clusters, dim, v)
        self._arms = _LinearBank(clustering.n_arms, dim, v)

    def get_params(self) -> dict:
        return {"v": self.v}

    def cluster_belief(self, cluster: int) -> LinearBelief:
        return self._clusters.belief(cluster)

    def arm_belief(self, arm: int) -> LinearBelief:
        return self._arms.belief(arm)

    def select(self, t: int, x: np.ndarray, rng: np.random.Generator) -> Choice:
        x = _check_context(x, self.dim)
        cluster = random_argmax(self._clusters.sample(x, rng), rng)
        members = self.clustering.members(cluster)
        theta = self._arms.sample(x, rng, subset=members)
        arm = int(members[random_argmax(theta, rng)])
        return Choice(arm=arm, path=(cluster,))

    def update(self, choice: Choice, x: np.ndarray, reward: float) -> None:
        x = _check_context(x, self.dim)
        (cluster,) = choice.path
        if self.clustering.label_of(choice.arm) != cluster:
            raise ValueError(f"arm {choice.arm} is not in cluster {cluster}")
        self._clusters.update(cluster, x, reward)
        self._arms.update(choice.arm, x, reward)


class LinUcb(ContextualPolicy):
    """Linear UCB: mean score plus alpha times the posterior width."""

    key = "linucb"

    def __init__(self, n_arms: int, dim: int, alpha: float = 2.0) -> None:
        if alpha < 0:
            raise ValueError("alpha must be >= 0")
        self._arms = _LinearBank(n_arms, dim, 1.0)
        self.dim = dim
        self.alpha = float(alpha)

    def get_params(self) -> dict:
        return {"alpha": self.alpha}

    def arm_belief(self, arm: int) -> LinearBelief:
        return self._arms.belief(arm)

    def select(self, t: int, x: np.ndarray, rng: np.random.Generator) -> Choice:
        x = _check_context(x, self.dim)
        return Choice(arm=random_argmax(self._arms.ucb(x, self.alpha), rng))

    def update(self, choice: Choice, x: np.ndarray, reward: float) -> None:
        x = _check_context(x, self.dim)
        self._arms.update(choice.arm, x, reward)


class ClusteredLinUcb(ContextualPolicy):
    """Two-level linear UCB over a disjoint clustering."""

    key = "linucbc"
    path_depth = 1

    def __init__(self, clustering: DisjointClustering, dim: int, alpha: float = 2.0) -> None:
        if alpha < 0:
            raise ValueError("alpha must be >= 0")
        self.clustering = clustering
        self.dim = dim
        self.alpha = float(alpha)
        self._clusters = _LinearBank(clustering.n_clusters, dim, 1.0)
        self._arms = _LinearBank(clustering.n_arms, dim, 1.0)

    def get_params(self) -> dict:
        return {"alpha": self.alpha}

    def cluster_belief(self, cluster: int) -> LinearBelief:
        return self._clusters.belief(cluster)

    def arm_belief(self, arm: int) -> LinearBelief:
        return self._arms.belief(arm)

    def select(self, t: int, x: np.ndarray, rng: np.random.Generator) -> Choice:
        x = _check_context(x, self.dim)
        cluster = random_argmax(self._clusters.ucb(x, self.alpha), rng)
        members = self.clustering.members(cluster)
        idx = self._arms.ucb(x, self.alpha, subset=members)
        arm = int(members[random_argmax(idx, rng)])
        return Choice(arm=arm, path=(cluster,))

    def update(self, choice: Choice, x: np.ndarray, reward: float) -> None:
        x = _check_context(x, self.dim)
        (cluster,) = choice.path
        if self.clustering.label_of(choice.arm) != cluster:
            raise ValueError(f"arm {choice.arm} is not in cluster {cluster}")
        self._clusters.update(cluster, x, reward)
        self._arms.update(choice.arm, x, reward)


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

_ALLOWED_PARAMS = {
    "lints": {"v", "d"},
    "lintsc": {"v", "d"},
    "linucb": {"alpha", "d"},
    "linucbc": {"alpha", "d"},
}

CONTEXTUAL_POLICY_KEYS: tuple[str, ...] = tuple(sorted(_ALLOWED_PARAMS))


def make_contextual_policy(
    key: str, instance: ContextualInstance, params: dict | None = None
) -> ContextualPolicy:
    """Instantiate a contextual policy by string key.

    Accepted parameters: ``v`` for the Thompson variants, ``alpha`` for the
    UCB variants, and an optional ``d`` that must match the instance
    dimension when given.
    """
    if key not in _ALLOWED_PARAMS:
        raise ValueError(
            f"unknown contextual policy key '{key}'; valid keys: {sorted(_ALLOWED_PARAMS)}"
        )
    params = dict(params or {})
    unknown = set(params) - _ALLOWED_PARAMS[key]
    if unknown:
        raise ValueError(f"policy '{key}' does not accept parameters {sorted(unknown)}")
    d = params.pop("d", None)
    if d is not None and int(d) != instance.dim:
        raise ValueError(f"parameter d={d} does not match instance dimension {instance.dim}")
    dim = instance.dim
    if key == "lints":
        return LinThompson(instance.n_arms, dim, v=float(params.get("v", 1.0)))
    if key == "lintsc":
        return ClusteredLinThompson(instance.clustering, dim, v=float(params.get("v", 1.0)))
    if key == "linucb":
        return LinUcb(instance.n_arms, dim, alpha=float(params.get("alpha", 2.0)))
    return ClusteredLinUcb(instance.clustering, dim, alpha=float(params.get("alpha", 2.0)))
