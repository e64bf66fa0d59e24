"""Bandit policies for flat, clustered, and tree-structured action sets.

Every policy exposes ``select(t, rng) -> Choice`` and
``update(choice, reward)``. A ``Choice`` carries the played arm plus the
cluster path that led to it (empty for flat policies, the cluster id for
two-level policies, the root-to-leaf node path for tree policies), so the
simulator can log and replay the full decision.

Policies are addressed from configs by string key through
:func:`make_policy`; all of them are parameter-free given the instance
structure.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    BanditInstance,
    BetaBelief,
    ClusterTree,
    DisjointClustering,
    random_argmax,
)

__all__ = [
    "Choice",
    "BanditPolicy",
    "ThompsonSampling",
    "ClusteredThompsonSampling",
    "HierarchicalThompsonSampling",
    "Ucb1",
    "ClusteredUcb1",
    "TsMax",
    "TreeUcb",
    "POLICY_KEYS",
    "make_policy",
]


@dataclass(frozen=True, slots=True)
class Choice:
    """One selection: the arm played and the cluster path that chose it."""

    arm: int
    path: tuple[int, ...] = ()


def _check_reward(reward: float) -> float:
    reward = float(reward)
    if not (0.0 <= reward <= 1.0):  # NaN fails both comparisons
        raise ValueError(f"reward {reward} outside [0, 1]")
    return reward


def _check_time(t: int) -> None:
    if t < 1:
        raise ValueError(f"time step must be >= 1, got {t}")


class BanditPolicy(ABC):
    """Select/update interface shared by all non-contextual policies."""

    key: str = ""
    path_depth: int = 0

    @abstractmethod
    def select(self, t: int, rng: np.random.Generator) -> Choice:
        """Choose an arm for step ``t`` (1-based), consuming only ``rng``."""

    @abstractmethod
    def update(self, choice: Choice, reward: float) -> None:
        """Feed back the observed reward for a previous choice."""

    def get_params(self) -> dict:
        return {}


# ---------------------------------------------------------------------------
# Thompson sampling family
# ---------------------------------------------------------------------------

class ThompsonSampling(BanditPolicy):
    """Beta-Bernoulli Thompson sampling over a flat action set.

    Keeps a Beta(s, f) belief per arm starting from the uniform prior,
    samples one expected reward per arm each round, and plays the argmax.
    """

    key = "ts"

    def __init__(self, n_arms: int) -> None:
        if n_arms < 1:
            raise ValueError("need at least one arm")
        self.n_arms = n_arms
        self._s = np.ones(n_arms)
        self._f = np.ones(n_arms)

    @property
    def arm_beliefs(self) -> dict[int, BetaBelief]:
        return {a: BetaBelief(float(self._s[a]), float(self._f[a])) for a in range(self.n_arms)}

    def select(self, t: int, rng: np.random.Generator) -> Choice:
        theta = rng.beta(self._s, self._f)
        return Choice(arm=random_argmax(theta, rng))

    def update(self, choice: Choice, reward: float) -> None:
        reward = _check_reward(reward)
        self._s[choice.arm] += reward
        self._f[choice.arm] += 1.0 - reward


class ClusteredThompsonSampling(BanditPolicy):
    """Two-level Thompson sampling over a disjoint clustering.

    Each round first samples one expected reward per *cluster* from a
    cluster-level Beta belief and commits to the argmax cluster, then runs
    ordinary Thompson sampling among that cluster's arms only. Arm and
    cluster beliefs are both updated with the observed reward, so a
    cluster's pseudo-counts always equal the prior-adjusted sum of its
    member arms' counts.
    """

    key = "tsc"
    path_depth = 1

    def __init__(self, clustering: DisjointClustering) -> None:
        self.clustering = clustering
        n, k = clustering.n_arms, clustering.n_clusters
        self._s = np.ones(n)
        self._f = np.ones(n)
        self._cs = np.ones(k)
        self._cf = np.ones(k)

    @property
    def arm_beliefs(self) -> dict[int, BetaBelief]:
        return {a: BetaBelief(float(self._s[a]), float(self._f[a])) for a in range(self.clustering.n_arms)}

    @property
    def cluster_beliefs(self) -> dict[int, BetaBelief]:
        return {c: BetaBelief(float(self._cs[c]), float(self._cf[c])) for c in range(self.clustering.n_clusters)}

    def select(self, t: int, rng: np.random.Generator) -> Choice:
        theta_c = rng.beta(self._cs, self._cf)
        cluster = random_argmax(theta_c, rng)
        members = self.clustering.members(cluster)
        theta_a = rng.beta(self._s[members], self._f[members])
        arm = int(members[random_argmax(theta_a, rng)])
        return Choice(arm=arm, path=(cluster,))

    def update(self, choice: Choice, reward: float) -> None:
        reward = _check_reward(reward)
        (cluster,) = choice.path
        if self.clustering.label_of(choice.arm) != cluster:
            raise ValueError(
                f"arm {choice.arm} is not in cluster {cluster}"
            )
        self._s[choice.arm] += reward
        self._f[choice.arm] += 1.0 - reward
        self._cs[cluster] += reward
        self._cf[cluster] += 1.0 - reward


class HierarchicalThompsonSampling(BanditPolicy):
    """Tree-recursive Thompson sampling.

    Keeps a Beta belief per tree node. Each round descends from the root:
    at every internal node it samples one value per child subtree and moves
    to the argmax child, until it reaches a leaf, whose arm is played. The
    reward updates every belief on the traversed root-to-leaf path, so each
    internal node's counts stay the prior-adjusted sum of its children's.

    Works on arbitrary trees: branching may vary and leaves may sit at
    different depths.
    """

    key = "hts"

    def __init__(self, tree: ClusterTree) -> None:
        self.tree = tree
        self.path_depth = tree.depth + 1
        self._s = np.ones(tree.n_nodes)
        self._f = np.ones(tree.n_nodes)

    @property
    def node_beliefs(self) -> dict[int, BetaBelief]:
        return {v: BetaBelief(float(self._s[v]), float(self._f[v])) for v in range(self.tree.n_nodes)}

    def select(self, t: int, rng: np.random.Generator) -> Choice:
        tree = self.tree
        node = tree.root
        path = [node]
        while not tree.is_leaf(node):
            kids = tree.children(node)
            theta = rng.beta(self._s[kids], self._f[kids])
            node = int(kids[random_argmax(theta, rng)])
            path.append(node)
        return Choice(arm=tree.arm_of_leaf(node), path=tuple(path))

    def update(self, choice: Choice, reward: float) -> None:
        reward = _check_reward(reward)
        tree = self.tree
        path = choice.path
        if not path or path[0] != tree.root or not tree.is_leaf(path[-1]):
            raise ValueError(f"invalid root-to-leaf path {path}")
        for v, w in zip(path, path[1:]):
            if int(tree.parent[w]) != v:
                raise ValueError(f"invalid root-to-leaf path {path}")
        if tree.arm_of_leaf(path[-1]) != choice.arm:
            raise ValueError(f"path leaf does not map to arm {choice.arm}")
        fail = 1.0 - reward
        for v in path:
            self._s[v] += reward
            self._f[v] += fail


class TsMax(BanditPolicy):
    """Two-level Thompson sampling with best-member cluster proxies.

    No persistent cluster beliefs: each round every cluster is represented
    by the Beta belief of its member arm with the highest empirical mean
    s/(s+f) (ties going to the lowest arm index). One value is sampled from
    each representative, the argmax cluster wins, and ordinary Thompson
    sampling runs among its arms. Only the played arm's belief is updated.
    """

    key = "tsmax"
    path_depth = 1

    def __init__(self, clustering: DisjointClustering) -> None:
        self.clustering = clustering
        n = clustering.n_arms
        self._s = np.ones(n)
        self._f = np.ones(n)
        self._members = [clustering.members(c) for c in range(clustering.n_clusters)]

    @property
    def arm_beliefs(self) -> dict[int, BetaBelief]:
        return {a: BetaBelief(float(self._s[a]), float(self._f[a])) for a in range(self.clustering.n_arms)}

    def cluster_representatives(self) -> np.ndarray:
        """Per-cluster arm id with the highest empirical mean (ties: lowest id)."""
        emp = self._s / (self._s + self._f)
        reps = np.empty(len(self._members), dtype=np.int64)
        for c, members in enumerate(self._members):
            reps[c] = members[int(np.argmax(emp[members]))]
        return reps

    def select(self, t: int, rng: np.random.Generator) -> Choice:
        reps = self.cluster_representatives()
        theta_c = rng.beta(self._s[reps], self._f[reps])
        cluster = random_argmax(theta_c, rng)
        members = self._members[cluster]
        theta_a = rng.beta(self._s[members], self._f[members])
        arm = int(members[random_argmax(theta_a, rng)])
        return Choice(arm=arm, path=(cluster,))

    def update(self, choice: Choice, reward: float) -> None:
        reward = _check_reward(reward)
        (cluster,) = choice.path
        if self.clustering.label_of(choice.arm) != cluster:
            raise ValueError(f"arm {choice.arm} is not in cluster {cluster}")
        self._s[choice.arm] += reward
        self._f[choice.arm] += 1.0 - reward


# ---------------------------------------------------------------------------
# UCB family
# ---------------------------------------------------------------------------

def _ucb_index(means: np.ndarray, counts: np.ndarray, log_term: float) -> np.ndarray:
    return means + np.sqrt(2.0 * log_term / counts)


class Ucb1(BanditPolicy):
    """UCB1: empirical mean plus sqrt(2 ln t / N) exploration bonus.

    Plays each arm once first (lowest index first), then the argmax index
    with uniform tie-breaking.
    """

    key = "ucb1"

    def __init__(self, n_arms: int) -> None:
        if n_arms < 1:
            raise ValueError("need at least one arm")
        self.n_arms = n_arms
        self._n = np.zeros(n_arms)
        self._q = np.zeros(n_arms)

    @property
    def counts(self) -> np.ndarray:
        return self._n.copy()

    @property
    def empirical_means(self) -> np.ndarray:
        return self._q.copy()

    def select(self, t: int, rng: np.random.Generator) -> Choice:
        _check_time(t)
        unpulled = np.flatnonzero(self._n == 0)
        if unpulled.size:
            return Choice(arm=int(unpulled[0]))
        idx = _ucb_index(self._q, self._n, math.log(t))
        return Choice(arm=random_argmax(idx, rng))

    def update(self, choice: Choice, reward: float) -> None:
        reward = _check_reward(reward)
        a = choice.arm
        self._n[a] += 1.0
        self._q[a] += (reward - self._q[a]) / self._n[a]


class ClusteredUcb1(BanditPolicy):
    """Two-level UCB1 over a disjoint clustering.

    Cluster statistics aggregate every reward observed from the cluster;
    the UCB1 index with the global time's logarithm is applied first across
    clusters and then across the chosen cluster's arms, with the play-once
    initialization rule at each level.
    """

    key = "ucbc"
    path_depth = 1

    def __init__(self, clustering: DisjointClustering) -> None:
        self.clustering = clustering
        n, k = clustering.n_arms, clustering.n_clusters
        self._n = np.zeros(n)
        self._q = np.zeros(n)
        self._cn = np.zeros(k)
        self._cq = np.zeros(k)

    def select(self, t: int, rng: np.random.Generator) -> Choice:
        _check_time(t)
        log_t = math.log(t)
        unvisited = np.flatnonzero(self._cn == 0)
        if unvisited.size:
            cluster = int(unvisited[0])
        else:
            cluster = random_argmax(_ucb_index(self._cq, self._cn, log_t), rng)
        members = self.clustering.members(cluster)
        unpulled = members[self._n[members] == 0]
        if unpulled.size:
            arm = int(unpulled[0])
        else:
            idx = _ucb_index(self._q[members], self._n[members], log_t)
            arm = int(members[random_argmax(idx, rng)])
        return Choice(arm=arm, path=(cluster,))

    def update(self, choice: Choice, reward: float) -> None:
        reward = _check_reward(reward)
        (cluster,) = choice.path
        if self.clustering.label_of(choice.arm) != cluster:
            raise ValueError(f"arm {choice.arm} is not in cluster {cluster}")
        a = choice.arm
        self._n[a] += 1.0
        self._q[a] += (reward - self._q[a]) / self._n[a]
        self._cn[cluster] += 1.0
        self._cq[cluster] += (reward - self._cq[cluster]) / self._cn[cluster]


class TreeUcb(BanditPolicy):
    """UCB descent over a cluster tree.

    At each internal node, unvisited children are tried first (lowest index
    in child order); otherwise the child maximizing
    mean + sqrt(2 ln N_parent / N_child) is taken. The reward and one visit
    propagate to every node on the played path.
    """

    key = "uct"

    def __init__(self, tree: ClusterTree) -> None:
        self.tree = tree
        self.path_depth = tree.depth + 1
        self._n = np.zeros(tree.n_nodes)
        self._q = np.zeros(tree.n_nodes)

    def select(self, t: int, rng: np.random.Generator) -> Choice:
        _check_time(t)
        tree = self.tree
        node = tree.root
        path = [node]
        while not tree.is_leaf(node):
            kids = tree.children(node)
            counts = self._n[kids]
            fresh = np.flatnonzero(counts == 0)
            if fresh.size:
                node = int(kids[fresh[0]])
            else:
                idx = _ucb_index(self._q[kids], counts, math.log(self._n[node]))
                node = int(kids[random_argmax(idx, rng)])
            path.append(node)
        return Choice(arm=tree.arm_of_leaf(node), path=tuple(path))

    def update(self, choice: Choice, reward: float) -> None:
        reward = _check_reward(reward)
        tree = self.tree
        path = choice.path
        if not path or path[0] != tree.root or not tree.is_leaf(path[-1]):
            raise ValueError(f"invalid root-to-leaf path {path}")
        for v, w in zip(path, path[1:]):
            if int(tree.parent[w]) != v:
                raise ValueError(f"invalid root-to-leaf path {path}")
        for v in path:
            self._n[v] += 1.0
            self._q[v] += (reward - self._q[v]) / self._n[v]


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

def _need_clustering(instance: BanditInstance, key: str) -> DisjointClustering:
    if instance.clustering is None:
        raise ValueError(f"policy '{key}' needs an instance with a disjoint clustering")
    return instance.clustering


def _need_tree(instance: BanditInstance, key: str) -> ClusterTree:
    if instance.tree is None:
        raise ValueError(f"policy '{key}' needs an instance with a cluster tree")
    return instance.tree


POLICY_KEYS: dict[str, Callable[[BanditInstance], BanditPolicy]] = {
    "ts": lambda inst: ThompsonSampling(inst.n_arms),
    "tsc": lambda inst: ClusteredThompsonSampling(_need_clustering(inst, "tsc")),
    "hts": lambda inst: HierarchicalThompsonSampling(_need_tree(inst, "hts")),
    "ucb1": lambda inst: Ucb1(inst.n_arms),
    "ucbc": lambda inst: ClusteredUcb1(_need_clustering(inst, "ucbc")),
    "tsmax": lambda inst: TsMax(_need_clustering(inst, "tsmax")),
    "uct": lambda inst: TreeUcb(_need_tree(inst, "uct")),
}


def make_policy(key: str, instance: BanditInstance, params: dict | None = None) -> BanditPolicy:
    """Instantiate a policy by string key for a given instance.

    Non-contextual policies take no hyperparameters; a non-empty ``params``
    is rejected so configuration typos surface early.
    """
    if key not in POLICY_KEYS:
        raise ValueError(
            f"unknown policy key '{key}'; valid keys: {sorted(POLICY_KEYS)}"
        )
    if params:
        raise ValueError(f"policy '{key}' accepts no parameters, got {sorted(params)}")
    return POLICY_KEYS[key](instance)
