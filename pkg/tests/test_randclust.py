from unittest import TestCase
from collections import Counter
from itertools import combinations
import numpy as np
from scipy.stats import chisquare
from calibrated_validity.lib.core import DissimilarityMatrix, RngSeed, \
    euclidean_dissimilarity
from calibrated_validity.lib.errors import ContractError
from calibrated_validity.lib.randclust import RandomMethodId, \
    random_clustering, random_k_centroids, random_k_centroids_from, \
    random_k_linkage, random_k_linkage_from, _draw_seeds

LINE = euclidean_dissimilarity(np.array([[0.0], [1.0], [10.0], [11.0]]))
VARIANTS = ('single', 'complete', 'average')


def naive_linkage(d, seeds, variant):
    """Greedy growth recomputing every object to cluster dissimilarity"""
    combine = {'single': min, 'complete': max,
               'average': lambda v: sum(v) / len(v)}[variant]
    n = len(d)
    clusters = [[s] for s in seeds]
    assigned = set(seeds)
    while len(assigned) < n:
        best = None
        for g in range(n):
            if g in assigned:
                continue
            for h, members in enumerate(clusters):
                value = combine([d[g][m] for m in members])
                if best is None or value < best[0]:
                    best = (value, g, h)
        _, g, h = best
        clusters[h].append(g)
        assigned.add(g)
    labels = [0] * n
    for h, members in enumerate(clusters):
        for m in members:
            labels[m] = h
    return labels


class TestRandomCentroids(TestCase):

    def test_forced_assignment(self):
        part = random_k_centroids_from(LINE, [0, 2])
        self.assertEqual(part.labels.tolist(), [0, 0, 1, 1])

    def test_centroid_keeps_its_cluster_on_duplicates(self):
        d = euclidean_dissimilarity(np.array([[0.0], [0.0], [5.0]]))
        part = random_k_centroids_from(d, [0, 1])
        self.assertEqual(part.labels.tolist(), [0, 1, 0])

    def test_k_equals_n(self):
        for s in range(5):
            part = random_k_centroids(LINE, 4, RngSeed(s))
            self.assertEqual(sorted(part.sizes.tolist()), [1, 1, 1, 1])

    def test_seed_sets_are_uniform(self):
        counts = Counter(tuple(sorted(_draw_seeds(5, 2, RngSeed(s))))
                         for s in range(1000))
        self.assertEqual(set(counts), set(combinations(range(5), 2)))
        self.assertGreater(chisquare(list(counts.values())).pvalue, 0.001)

    def test_contract(self):
        with self.assertRaises(ContractError):
            random_k_centroids(LINE, 5, RngSeed(0))
        with self.assertRaises(ContractError):
            random_k_centroids_from(LINE, [1, 1])


class TestRandomLinkage(TestCase):

    def test_separated_line(self):
        for variant in VARIANTS:
            part = random_k_linkage_from(LINE, [0, 2], variant)
            self.assertEqual(part.labels.tolist(), [0, 0, 1, 1])

    def test_outer_seeds_trace(self):
        part = random_k_linkage_from(LINE, [0, 3], 'single')
        self.assertEqual(part.labels.tolist(), [0, 0, 1, 1])

    def test_average_against_greedy_oracle(self):
        points = np.array([[0.0], [0.2], [3.0], [3.5], [4.0], [9.0], [9.1],
                           [6.0]])
        d = euclidean_dissimilarity(points)
        part = random_k_linkage_from(d, [0, 5], 'average')
        self.assertEqual(part.labels.tolist(),
                         naive_linkage(d.values.tolist(), [0, 5], 'average'))

    def test_random_instances_against_greedy_oracle(self):
        rng = np.random.default_rng(31)
        for _ in range(60):
            n = int(rng.integers(3, 11))
            k = int(rng.integers(1, n + 1))
            upper = np.triu(rng.uniform(0.1, 5.0, size=(n, n)), 1)
            d = DissimilarityMatrix(upper + upper.T)
            seeds = rng.choice(n, size=k, replace=False).tolist()
            for variant in VARIANTS:
                part = random_k_linkage_from(d, seeds, variant)
                self.assertEqual(part.labels.tolist(),
                                 naive_linkage(d.values.tolist(), seeds,
                                               variant))

    def test_seeds_end_in_own_clusters(self):
        d = euclidean_dissimilarity(np.random.default_rng(2).normal(
            size=(30, 2)))
        for variant in VARIANTS:
            part = random_k_linkage_from(d, [4, 17, 9], variant)
            self.assertEqual(part.labels[[4, 17, 9]].tolist(), [0, 1, 2])
            self.assertEqual(part.k, 3)

    def test_contract(self):
        with self.assertRaises(ContractError):
            random_k_linkage(LINE, 5, 'single', RngSeed(0))
        with self.assertRaises(ContractError):
            random_k_linkage_from(LINE, [0, 2], 'ward')
        with self.assertRaises(ContractError):
            random_k_linkage_from(LINE, [2, 2], 'single')


class TestRandomClustering(TestCase):

    def setUp(self):
        self.d = euclidean_dissimilarity(np.random.default_rng(6).normal(
            size=(25, 3)))

    def test_every_generator_gives_k_clusters(self):
        for generator in RandomMethodId:
            for k in (2, 5, 25):
                part = random_clustering(generator, self.d, k,
                                         RngSeed(1, (k,)))
                self.assertEqual(part.k, k)
                self.assertTrue(np.all(part.sizes >= 1))

    def test_deterministic_under_seed(self):
        for generator in RandomMethodId:
            first = random_clustering(generator, self.d, 4, RngSeed(8, (2,)))
            second = random_clustering(generator, self.d, 4,
                                       RngSeed(8, (2,)))
            self.assertTrue(np.array_equal(first.labels, second.labels))

    def test_streams_vary(self):
        parts = [random_clustering('rk_average', self.d, 4, RngSeed(8, (b,)))
                 for b in range(10)]
        distinct = {tuple(p.labels.tolist()) for p in parts}
        self.assertGreater(len(distinct), 1)

    def test_letters(self):
        self.assertEqual([g.letter for g in RandomMethodId],
                         ['c', 'n', 'f', 'a'])
        self.assertEqual(RandomMethodId('rk_complete').order, 2)
