from unittest import TestCase
from itertools import combinations
import numpy as np
from calibrated_validity.lib.cluster_algos import MethodId, cluster, \
    hierarchical, kmeans, pam, pam_cost
from calibrated_validity.lib.core import DataMatrix, Partition, RngSeed, \
    adjusted_rand_index, euclidean_dissimilarity
from calibrated_validity.lib.errors import ContractError
from calibrated_validity.lib.scenarios import scenario1

LINE = np.array([[0.0], [1.0], [10.0], [11.0]])


def same_partition(a: Partition, b: Partition) -> bool:
    return adjusted_rand_index(a, b) == 1.0


class TestKMeans(TestCase):

    def test_separated_line(self):
        part = kmeans(DataMatrix(LINE), 2, seed=RngSeed(1))
        self.assertTrue(same_partition(part, Partition([0, 0, 1, 1])))

    def test_k_equals_n(self):
        data = DataMatrix(np.random.default_rng(0).normal(size=(6, 2)))
        part = kmeans(data, 6, restarts=3, seed=RngSeed(2))
        self.assertEqual(sorted(part.sizes.tolist()), [1] * 6)

    def test_deterministic_under_seed(self):
        data = DataMatrix(np.random.default_rng(5).normal(size=(40, 2)))
        first = kmeans(data, 4, seed=RngSeed(9, (3,)))
        second = kmeans(data, 4, seed=RngSeed(9, (3,)))
        self.assertTrue(np.array_equal(first.labels, second.labels))

    def test_no_empty_clusters_with_duplicates(self):
        data = DataMatrix(np.array([[0.0], [0.0], [0.0], [0.0], [5.0]]))
        part = kmeans(data, 3, seed=RngSeed(4))
        self.assertEqual(part.k, 3)
        self.assertTrue(np.all(part.sizes >= 1))

    def test_scenario1_recovery(self):
        good = 0
        for replicate in range(20):
            data, truth = scenario1(RngSeed(100, (replicate,)))
            part = kmeans(data, 3, seed=RngSeed(100, (replicate, 1)))
            if adjusted_rand_index(part, truth) >= 0.9:
                good += 1
        self.assertGreaterEqual(good, 18)

    def test_contract(self):
        with self.assertRaises(ContractError):
            kmeans(DataMatrix(LINE), 5)
        with self.assertRaises(ContractError):
            kmeans(DataMatrix(LINE), 2, restarts=0)


class TestPam(TestCase):

    def test_separated_line(self):
        part = pam(euclidean_dissimilarity(LINE), 2)
        self.assertTrue(same_partition(part, Partition([0, 0, 1, 1])))

    def test_outlier_against_exhaustive_search(self):
        points = np.array([[0.0], [0.5], [1.0], [1.5], [20.0]])
        d = euclidean_dissimilarity(points)
        part = pam(d, 2)
        best = min(combinations(range(5), 2),
                   key=lambda m: pam_cost(d, np.array(m)))
        self.assertEqual(part.sizes.min(), 1)
        self.assertNotEqual(part.labels[4], part.labels[0])
        medoids = [int(np.flatnonzero(part.labels == k)[
            np.argmin(d.values[np.ix_(part.members(k), part.members(k))]
                      .sum(axis=1))]) for k in range(2)]
        self.assertAlmostEqual(pam_cost(d, np.array(medoids)),
                               pam_cost(d, np.array(best)))

    def test_local_optimality(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(5, 12))
            d = euclidean_dissimilarity(rng.normal(size=(n, 2)))
            k = int(rng.integers(2, 4))
            part = pam(d, k)
            medoids = []
            for c in range(k):
                members = part.members(c)
                inner = d.values[np.ix_(members, members)].sum(axis=1)
                medoids.append(int(members[np.argmin(inner)]))
            cost = pam_cost(d, np.array(medoids))
            for j in range(k):
                for h in set(range(n)) - set(medoids):
                    swapped = list(medoids)
                    swapped[j] = h
                    self.assertGreaterEqual(
                        pam_cost(d, np.array(swapped)), cost - 1e-9)

    def test_deterministic(self):
        d = euclidean_dissimilarity(
            np.random.default_rng(8).normal(size=(30, 3)))
        self.assertTrue(np.array_equal(pam(d, 4).labels, pam(d, 4).labels))


class TestHierarchical(TestCase):

    def test_complete_on_line(self):
        part = hierarchical(euclidean_dissimilarity(LINE), 'complete', 2)
        self.assertTrue(same_partition(part, Partition([0, 0, 1, 1])))

    def test_single_recovers_chains(self):
        chain = np.column_stack([np.arange(10.0), np.zeros(10)])
        other = chain + np.array([0.0, 5.0])
        d = euclidean_dissimilarity(np.vstack([chain, other]))
        part = hierarchical(d, MethodId.SINGLE, 2)
        truth = Partition(np.repeat([0, 1], 10))
        self.assertTrue(same_partition(part, truth))

    def test_ultrametric_agreement(self):
        points = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
        data = np.vstack([points, points + 20.0])
        d = euclidean_dissimilarity(data)
        parts = [hierarchical(d, m, 2) for m in ('single', 'complete',
                                                 'average')]
        for part in parts[1:]:
            self.assertTrue(same_partition(parts[0], part))

    def test_cuts_are_nested(self):
        d = euclidean_dissimilarity(
            np.random.default_rng(4).normal(size=(25, 2)))
        for method in ('single', 'complete', 'average', 'ward'):
            coarse = hierarchical(d, method, 3)
            fine = hierarchical(d, method, 4)
            for c in range(fine.k):
                self.assertEqual(
                    len(set(coarse.labels[fine.members(c)].tolist())), 1)

    def test_k_equals_n(self):
        d = euclidean_dissimilarity(LINE)
        self.assertEqual(hierarchical(d, 'average', 4).k, 4)

    def test_not_a_linkage(self):
        with self.assertRaises(ContractError):
            hierarchical(euclidean_dissimilarity(LINE), 'pam', 2)


class TestCluster(TestCase):

    def test_dispatch(self):
        data = DataMatrix(LINE)
        d = euclidean_dissimilarity(data)
        for method in MethodId:
            part = cluster(method, 2, d, data, RngSeed(0))
            self.assertTrue(same_partition(part, Partition([0, 0, 1, 1])))

    def test_kmeans_needs_data(self):
        with self.assertRaises(ContractError):
            cluster('kmeans', 2, euclidean_dissimilarity(LINE))
