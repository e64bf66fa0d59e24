"""Selection laws, update rules, and structural invariants of MAB policies."""
import math

import numpy as np
import pytest

from clusterbandit.core import (
    BanditInstance,
    BetaBelief,
    ClusterTree,
    DisjointClustering,
    rng_streams,
)
from clusterbandit.instances import gen_sorted_binary_tree, sorted_tree_from_means
from clusterbandit.policies import (
    Choice,
    ClusteredThompsonSampling,
    ClusteredUcb1,
    HierarchicalThompsonSampling,
    ThompsonSampling,
    TreeUcb,
    TsMax,
    Ucb1,
    make_policy,
)
from clusterbandit.simulate import simulate


def _selection_freq(select, n_trials, n_entities, seed=0):
    """Empirical frequency of each entity over fresh-state selections."""
    rng = np.random.default_rng(seed)
    counts = np.zeros(n_entities)
    for _ in range(n_trials):
        counts[select(rng)] += 1
    return counts / n_trials


# ---------------------------------------------------------------------------
# Thompson sampling
# ---------------------------------------------------------------------------

class TestThompsonSampling:
    def test_single_arm(self):
        pol = ThompsonSampling(1)
        assert pol.select(1, np.random.default_rng(0)).arm == 0

    def test_concentrated_beliefs_dominate(self):
        rng = np.random.default_rng(1)
        pol = ThompsonSampling(2)
        pol._s[:] = [1e6, 1.0]
        pol._f[:] = [1.0, 1e6]
        picks = sum(pol.select(1, rng).arm == 0 for _ in range(10_000))
        assert picks / 10_000 >= 0.999

    def test_fresh_state_symmetry(self):
        freq = _selection_freq(
            lambda rng: ThompsonSampling(4).select(1, rng).arm, 10_000, 4
        )
        assert np.all(np.abs(freq - 0.25) < 0.02)

    def test_update_moves_only_chosen_arm(self):
        pol = ThompsonSampling(3)
        pol.update(Choice(arm=1), 1.0)
        beliefs = pol.arm_beliefs
        assert beliefs[1] == BetaBelief(2, 1)
        assert beliefs[0] == beliefs[2] == BetaBelief(1, 1)


def _two_cluster_policy():
    return ClusteredThompsonSampling(DisjointClustering([0, 0, 1, 1]))


class TestClusteredThompsonSampling:
    def test_singleton_clusters_symmetry(self):
        clustering = DisjointClustering([0, 1, 2, 3])
        freq = _selection_freq(
            lambda rng: ClusteredThompsonSampling(clustering).select(1, rng).arm,
            10_000,
            4,
        )
        assert np.all(np.abs(freq - 0.25) < 0.02)

    def test_trained_cluster_dominates(self):
        rng = np.random.default_rng(2)
        picks = 0
        for _ in range(2_000):
            pol = _two_cluster_policy()
            pol._cs[0] = 1e6
            picks += pol.select(1, rng).path[0] == 0
        assert picks / 2_000 >= 0.99

    def test_containment(self):
        rng = np.random.default_rng(3)
        pol = _two_cluster_policy()
        for t in range(1, 1001):
            choice = pol.select(t, rng)
            assert pol.clustering.label_of(choice.arm) == choice.path[0]
            pol.update(choice, float(rng.integers(2)))

    def test_update_touches_exactly_two_beliefs(self):
        pol = _two_cluster_policy()
        pol.update(Choice(arm=2, path=(1,)), 1.0)
        assert pol.arm_beliefs[2] == BetaBelief(2, 1)
        assert pol.cluster_beliefs[1] == BetaBelief(2, 1)
        assert pol.arm_beliefs[0] == pol.arm_beliefs[1] == pol.arm_beliefs[3] == BetaBelief(1, 1)
        assert pol.cluster_beliefs[0] == BetaBelief(1, 1)

    def test_update_failure_reward(self):
        pol = _two_cluster_policy()
        pol.update(Choice(arm=0, path=(0,)), 0.0)
        assert pol.arm_beliefs[0] == BetaBelief(1, 2)
        assert pol.cluster_beliefs[0] == BetaBelief(1, 2)

    def test_containment_violation_rejected(self):
        pol = _two_cluster_policy()
        with pytest.raises(ValueError):
            pol.update(Choice(arm=0, path=(1,)), 1.0)

    def test_count_consistency_replay(self):
        rng = np.random.default_rng(4)
        pol = _two_cluster_policy()
        arm_s = np.ones(4)
        arm_f = np.ones(4)
        cl_s = np.ones(2)
        cl_f = np.ones(2)
        for t in range(1, 1001):
            choice = pol.select(t, rng)
            r = float(rng.integers(2))
            pol.update(choice, r)
            arm_s[choice.arm] += r
            arm_f[choice.arm] += 1 - r
            cl_s[choice.path[0]] += r
            cl_f[choice.path[0]] += 1 - r
            # cluster pseudo-counts equal prior-adjusted member sums
            for c in range(2):
                members = pol.clustering.members(c)
                assert pol._cs[c] - 1 == pytest.approx((pol._s[members] - 1).sum())
                assert pol._cf[c] - 1 == pytest.approx((pol._f[members] - 1).sum())
        assert np.array_equal(pol._s, arm_s) and np.array_equal(pol._f, arm_f)
        assert np.array_equal(pol._cs, cl_s) and np.array_equal(pol._cf, cl_f)

    def test_single_cluster_reduces_to_ts_law(self):
        clustering = DisjointClustering([0, 0, 0, 0])
        freq_tsc = _selection_freq(
            lambda rng: ClusteredThompsonSampling(clustering).select(1, rng).arm,
            10_000,
            4,
            seed=5,
        )
        freq_ts = _selection_freq(
            lambda rng: ThompsonSampling(4).select(1, rng).arm, 10_000, 4, seed=6
        )
        assert np.all(np.abs(freq_tsc - freq_ts) < 0.02)


# ---------------------------------------------------------------------------
# Hierarchical Thompson sampling
# ---------------------------------------------------------------------------

def _depth2_tree():
    # root -> 2 internal -> 4 leaves
    return ClusterTree(
        [[1, 2], [3, 4], [5, 6], [], [], [], []],
        [-1, -1, -1, 0, 1, 2, 3],
    )


class TestHierarchicalThompsonSampling:
    def test_depth_zero_tree(self):
        pol = HierarchicalThompsonSampling(ClusterTree([[]], [0]))
        choice = pol.select(1, np.random.default_rng(0))
        assert choice.arm == 0
        assert choice.path == (0,)

    def test_depth_one_matches_flat_ts_law(self):
        star = ClusterTree([[1, 2, 3, 4], [], [], [], []], [-1, 0, 1, 2, 3])
        freq_hts = _selection_freq(
            lambda rng: HierarchicalThompsonSampling(star).select(1, rng).arm,
            10_000,
            4,
            seed=7,
        )
        freq_ts = _selection_freq(
            lambda rng: ThompsonSampling(4).select(1, rng).arm, 10_000, 4, seed=8
        )
        assert np.all(np.abs(freq_hts - freq_ts) < 0.02)

    def test_trained_subtree_dominates(self):
        rng = np.random.default_rng(9)
        entered = 0
        for _ in range(2_000):
            pol = HierarchicalThompsonSampling(_depth2_tree())
            pol._s[1] = 1e6
            entered += pol.select(1, rng).path[1] == 1
        assert entered / 2_000 >= 0.99

    def test_update_increments_exactly_path_nodes(self):
        pol = HierarchicalThompsonSampling(_depth2_tree())
        pol.update(Choice(arm=0, path=(0, 1, 3)), 1.0)
        beliefs = pol.node_beliefs
        assert beliefs[0] == beliefs[1] == beliefs[3] == BetaBelief(2, 1)
        for v in (2, 4, 5, 6):
            assert beliefs[v] == BetaBelief(1, 1)

    def test_update_failure_on_fresh_state(self):
        pol = HierarchicalThompsonSampling(_depth2_tree())
        pol.update(Choice(arm=3, path=(0, 2, 6)), 0.0)
        beliefs = pol.node_beliefs
        assert beliefs[0] == beliefs[2] == beliefs[6] == BetaBelief(1, 2)
        assert beliefs[1] == BetaBelief(1, 1)

    def test_invalid_path_rejected(self):
        pol = HierarchicalThompsonSampling(_depth2_tree())
        with pytest.raises(ValueError):
            pol.update(Choice(arm=0, path=(0, 2, 3)), 1.0)  # 3 is not a child of 2
        with pytest.raises(ValueError):
            pol.update(Choice(arm=0, path=(1, 3)), 1.0)  # does not start at root
        with pytest.raises(ValueError):
            pol.update(Choice(arm=1, path=(0, 1, 3)), 1.0)  # leaf maps to arm 0

    def test_parent_counts_equal_child_sums_after_run(self):
        tree_inst = gen_sorted_binary_tree(16, rng_streams(30).instance)
        pol = HierarchicalThompsonSampling(tree_inst.tree)
        rng = rng_streams(30).simulation
        simulate(tree_inst, pol, 1000, rng)
        tree = tree_inst.tree
        for v in range(tree.n_nodes):
            kids = tree.children(v)
            if kids.size == 0:
                continue
            assert pol._s[v] - 1 == pytest.approx((pol._s[kids] - 1).sum())
            assert pol._f[v] - 1 == pytest.approx((pol._f[kids] - 1).sum())

    def test_containment_along_path(self):
        rng = np.random.default_rng(10)
        tree = _depth2_tree()
        pol = HierarchicalThompsonSampling(tree)
        for t in range(1, 301):
            choice = pol.select(t, rng)
            for node in choice.path:
                assert choice.arm in tree.arms_under(node)
            pol.update(choice, float(rng.integers(2)))


# ---------------------------------------------------------------------------
# UCB1
# ---------------------------------------------------------------------------

class TestUcb1:
    def test_initialization_order(self):
        pol = Ucb1(3)
        rng = np.random.default_rng(0)
        assert pol.select(1, rng).arm == 0
        pol.update(Choice(arm=0), 1.0)
        assert pol.select(2, rng).arm == 1

    def test_index_evaluation(self):
        pol = Ucb1(2)
        pol._n[:] = [10, 10]
        pol._q[:] = [0.9, 0.1]
        # direct index oracle: 0.9 + sqrt(2 ln 100 / 10) beats 0.1 + same bonus
        bonus = math.sqrt(2 * math.log(100) / 10)
        assert 0.9 + bonus > 0.1 + bonus
        assert pol.select(100, np.random.default_rng(0)).arm == 0

    def test_uniform_tie_break(self):
        rng = np.random.default_rng(11)
        pol = Ucb1(2)
        pol._n[:] = [5, 5]
        pol._q[:] = [0.4, 0.4]
        freq = sum(pol.select(50, rng).arm == 0 for _ in range(10_000)) / 10_000
        assert abs(freq - 0.5) < 0.02

    def test_time_validation(self):
        with pytest.raises(ValueError):
            Ucb1(2).select(0, np.random.default_rng(0))


class TestClusteredUcb1:
    def test_singleton_clusters_reduce_to_ucb1(self):
        inst = BanditInstance.from_means(
            [0.8, 0.5, 0.2], clustering=DisjointClustering([0, 1, 2])
        )
        flat = Ucb1(3)
        two = ClusteredUcb1(inst.clustering)
        rng_a, rng_b = np.random.default_rng(12), np.random.default_rng(12)
        reward_rng = np.random.default_rng(13)
        for t in range(1, 201):
            a = flat.select(t, rng_a)
            b = two.select(t, rng_b)
            assert a.arm == b.arm
            r = float(reward_rng.random() < inst.means[a.arm])
            flat.update(a, r)
            two.update(b, r)

    def test_cluster_index_evaluation(self):
        clustering = DisjointClustering([0, 0, 1, 1])
        pol = ClusteredUcb1(clustering)
        pol._cn[:] = [100, 100]
        pol._cq[:] = [0.9, 0.1]
        pol._n[:] = [50, 50, 50, 50]
        pol._q[:] = [0.9, 0.8, 0.1, 0.2]
        choice = pol.select(1000, np.random.default_rng(0))
        assert choice.path == (0,)
        assert choice.arm == 0

    def test_round_robin_cluster_initialization(self):
        clustering = DisjointClustering([0, 0, 1, 1, 2, 2])
        pol = ClusteredUcb1(clustering)
        rng = np.random.default_rng(14)
        seen = []
        for t in range(1, 4):
            choice = pol.select(t, rng)
            seen.append(choice.path[0])
            pol.update(choice, 0.0)
        assert seen == [0, 1, 2]

    def test_containment_and_aggregation(self):
        rng = np.random.default_rng(15)
        clustering = DisjointClustering([0, 0, 1, 1])
        pol = ClusteredUcb1(clustering)
        total = {0: 0.0, 1: 0.0}
        count = {0: 0, 1: 0}
        for t in range(1, 501):
            choice = pol.select(t, rng)
            assert clustering.label_of(choice.arm) == choice.path[0]
            r = float(rng.integers(2))
            pol.update(choice, r)
            total[choice.path[0]] += r
            count[choice.path[0]] += 1
        for c in (0, 1):
            if count[c]:
                assert pol._cq[c] == pytest.approx(total[c] / count[c])
                assert pol._cn[c] == count[c]


# ---------------------------------------------------------------------------
# TSMax
# ---------------------------------------------------------------------------

class TestTsMax:
    def test_singleton_clusters_match_ts_law(self):
        clustering = DisjointClustering([0, 1, 2, 3])
        freq_max = _selection_freq(
            lambda rng: TsMax(clustering).select(1, rng).arm, 10_000, 4, seed=16
        )
        freq_ts = _selection_freq(
            lambda rng: ThompsonSampling(4).select(1, rng).arm, 10_000, 4, seed=17
        )
        assert np.all(np.abs(freq_max - freq_ts) < 0.02)

    def test_strong_arm_attracts_cluster_choice(self):
        rng = np.random.default_rng(18)
        clustering = DisjointClustering([0, 0, 1, 1])
        picks = 0
        for _ in range(2_000):
            pol = TsMax(clustering)
            pol._s[1] = 1e6
            picks += pol.select(1, rng).path[0] == 0
        assert picks / 2_000 >= 0.99

    def test_fresh_uniform_cluster_choice(self):
        clustering = DisjointClustering([0, 0, 1, 1, 2, 2])
        freq = _selection_freq(
            lambda rng: TsMax(clustering).select(1, rng).path[0], 10_000, 3, seed=19
        )
        assert np.all(np.abs(freq - 1 / 3) < 0.02)

    def test_representative_is_best_empirical_mean_lowest_index(self):
        clustering = DisjointClustering([0, 0, 0, 1])
        pol = TsMax(clustering)
        pol._s[:] = [3, 3, 9, 1]
        pol._f[:] = [1, 1, 3, 1]  # arms 0,1 tie at 0.75; arm 2 also at 0.75
        reps = pol.cluster_representatives()
        assert reps[0] == 0  # lowest index among the tied maxima
        pol._s[1] = 9
        pol._f[1] = 1  # arm 1 now strictly best at 0.9
        assert pol.cluster_representatives()[0] == 1

    def test_update_is_arm_only(self):
        clustering = DisjointClustering([0, 0, 1])
        pol = TsMax(clustering)
        pol.update(Choice(arm=0, path=(0,)), 1.0)
        assert pol.arm_beliefs[0] == BetaBelief(2, 1)
        assert pol.arm_beliefs[1] == pol.arm_beliefs[2] == BetaBelief(1, 1)

    def test_containment(self):
        rng = np.random.default_rng(20)
        clustering = DisjointClustering([0, 0, 1, 1])
        pol = TsMax(clustering)
        for t in range(1, 301):
            choice = pol.select(t, rng)
            assert clustering.label_of(choice.arm) == choice.path[0]
            pol.update(choice, float(rng.integers(2)))


# ---------------------------------------------------------------------------
# UCT
# ---------------------------------------------------------------------------

class TestTreeUcb:
    def test_depth_zero(self):
        pol = TreeUcb(ClusterTree([[]], [0]))
        assert pol.select(1, np.random.default_rng(0)).arm == 0

    def test_child_index_evaluation(self):
        tree = ClusterTree([[1, 2], [], []], [-1, 0, 1])
        pol = TreeUcb(tree)
        pol._n[:] = [100, 50, 50]
        pol._q[:] = [0.5, 0.8, 0.2]
        # direct oracle: equal bonuses, higher mean wins
        choice = pol.select(101, np.random.default_rng(0))
        assert choice.arm == 0

    def test_unvisited_children_first(self):
        tree = _depth2_tree()
        pol = TreeUcb(tree)
        rng = np.random.default_rng(21)
        first_nodes = []
        for t in range(1, 5):
            choice = pol.select(t, rng)
            first_nodes.append(choice.path[1])
            pol.update(choice, 0.0)
        # both root children explored before any index comparison
        assert set(first_nodes[:2]) == {1, 2}

    def test_path_statistics_propagate(self):
        tree = _depth2_tree()
        pol = TreeUcb(tree)
        pol.update(Choice(arm=0, path=(0, 1, 3)), 1.0)
        pol.update(Choice(arm=1, path=(0, 1, 4)), 0.0)
        assert pol._n[0] == 2 and pol._q[0] == pytest.approx(0.5)
        assert pol._n[1] == 2 and pol._q[1] == pytest.approx(0.5)
        assert pol._n[3] == 1 and pol._q[3] == 1.0
        assert pol._n[2] == 0

    def test_invalid_path_rejected(self):
        pol = TreeUcb(_depth2_tree())
        with pytest.raises(ValueError):
            pol.update(Choice(arm=0, path=(0, 3)), 1.0)


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

class TestMakePolicy:
    def test_all_keys(self):
        flat = BanditInstance.from_means([0.5, 0.4])
        clustered = BanditInstance.from_means(
            [0.5, 0.4], clustering=DisjointClustering([0, 1])
        )
        treed = sorted_tree_from_means([0.5, 0.4])
        assert make_policy("ts", flat).key == "ts"
        assert make_policy("ucb1", flat).key == "ucb1"
        assert make_policy("tsc", clustered).key == "tsc"
        assert make_policy("ucbc", clustered).key == "ucbc"
        assert make_policy("tsmax", clustered).key == "tsmax"
        assert make_policy("hts", treed).key == "hts"
        assert make_policy("uct", treed).key == "uct"

    def test_unknown_key(self):
        with pytest.raises(ValueError, match="unknown policy key"):
            make_policy("bogus", BanditInstance.from_means([0.5]))

    def test_structure_requirements(self):
        flat = BanditInstance.from_means([0.5, 0.4])
        with pytest.raises(ValueError, match="clustering"):
            make_policy("tsc", flat)
        with pytest.raises(ValueError, match="tree"):
            make_policy("hts", flat)

    def test_rejects_parameters(self):
        with pytest.raises(ValueError, match="parameters"):
            make_policy("ts", BanditInstance.from_means([0.5]), {"gamma": 1})

    def test_reward_validation(self):
        pol = make_policy("ts", BanditInstance.from_means([0.5]))
        with pytest.raises(ValueError):
            pol.update(Choice(arm=0), 1.5)
