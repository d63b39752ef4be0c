"""Random clusterings used as the reference population for calibration:
random K-centroids and random K-single/complete/average linkage.
"""
from typing import Sequence, Union
from enum import Enum
import numpy as np
from .core import DissimilarityMatrix, Partition, RngSeed
from .errors import ContractError


class RandomMethodId(str, Enum):
    """Random clustering generators. The letter marks each one in plots.
    """
    RK_CENTROID = 'rk_centroid'
    RK_SINGLE = 'rk_single'
    RK_COMPLETE = 'rk_complete'
    RK_AVERAGE = 'rk_average'

    @property
    def letter(self) -> str:
        return _LETTERS[self]

    @property
    def order(self) -> int:
        return list(RandomMethodId).index(self)


_LETTERS = {RandomMethodId.RK_CENTROID: 'c', RandomMethodId.RK_SINGLE: 'n',
            RandomMethodId.RK_COMPLETE: 'f', RandomMethodId.RK_AVERAGE: 'a'}

_VARIANTS = {'single': RandomMethodId.RK_SINGLE,
             'complete': RandomMethodId.RK_COMPLETE,
             'average': RandomMethodId.RK_AVERAGE}


def _draw_seeds(n: int, k: int, seed: RngSeed) -> np.ndarray:
    """K distinct objects, uniform over subsets of size K

    :param n: Number of objects
    :param k: Number of seeds
    :param seed: Random stream
    :return: Object indexes in draw order
    """
    if not 1 <= k <= n:
        raise ContractError(f"K={k} random seeds requested for {n} objects")
    return seed.generator().choice(n, size=k, replace=False)


def random_k_centroids_from(d: DissimilarityMatrix,
                            centroids: Sequence[int]) -> Partition:
    """Assign every object to its closest centroid, ties to the lowest
    centroid position; every centroid keeps its own cluster.

    :param d: The dissimilarities
    :param centroids: Distinct centroid object indexes
    :return: The partition, cluster k holding centroid k
    """
    centroids = np.asarray(centroids, dtype=int)
    if np.unique(centroids).size != centroids.size:
        raise ContractError('Centroids must be distinct objects')
    labels = np.argmin(d.values[:, centroids], axis=1)
    labels[centroids] = np.arange(centroids.size)
    return Partition(labels, centroids.size)


def random_k_centroids(d: DissimilarityMatrix, k: int, seed: RngSeed) \
        -> Partition:
    """Random K-centroids: one Lloyd assignment step from K random objects

    :param d: The dissimilarities
    :param k: Number of clusters
    :param seed: Random stream
    :return: The random partition
    """
    return random_k_centroids_from(d, _draw_seeds(d.n, k, seed))


def random_k_linkage_from(d: DissimilarityMatrix, seeds: Sequence[int],
                          variant: str) -> Partition:
    """Grow K clusters from the given seed objects, adding one object at a
    time to the closest cluster under the variant's object-to-cluster
    dissimilarity (min, max or mean over current members). Ties go to the
    lowest object index, then the lowest cluster.

    :param d: The dissimilarities
    :param seeds: Distinct seed object indexes; seed k starts cluster k
    :param variant: single, complete or average
    :return: The partition
    """
    if variant not in _VARIANTS:
        raise ContractError(f"Unknown random linkage variant {variant}")
    seeds = np.asarray(seeds, dtype=int)
    if np.unique(seeds).size != seeds.size:
        raise ContractError('Seed objects must be distinct')
    dist = d.values
    k = seeds.size
    labels = np.full(d.n, -1)
    labels[seeds] = np.arange(k)
    to_cluster = dist[:, seeds].copy()
    sums = to_cluster.copy()
    sizes = np.ones(k)
    to_cluster[seeds] = np.inf
    for _ in range(d.n - k):
        flat = int(np.argmin(to_cluster))
        g, h = divmod(flat, k)
        labels[g] = h
        to_cluster[g] = np.inf
        open_rows = labels < 0
        if variant == 'single':
            update = np.minimum(to_cluster[:, h], dist[:, g])
        elif variant == 'complete':
            update = np.maximum(to_cluster[:, h], dist[:, g])
        else:
            sums[:, h] += dist[:, g]
            sizes[h] += 1
            update = sums[:, h] / sizes[h]
        to_cluster[open_rows, h] = update[open_rows]
    return Partition(labels, k)


def random_k_linkage(d: DissimilarityMatrix, k: int, variant: str,
                     seed: RngSeed) -> Partition:
    """Random K-single, K-complete or K-average linkage from K random seeds

    :param d: The dissimilarities
    :param k: Number of clusters
    :param variant: single, complete or average
    :param seed: Random stream
    :return: The random partition
    """
    return random_k_linkage_from(d, _draw_seeds(d.n, k, seed), variant)


def random_clustering(generator: Union[RandomMethodId, str],
                      d: DissimilarityMatrix, k: int, seed: RngSeed) \
        -> Partition:
    """Draw one random clustering with the named generator

    :param generator: The generator id
    :param d: The dissimilarities
    :param k: Number of clusters
    :param seed: Random stream
    :return: The random partition
    """
    generator = RandomMethodId(generator)
    if generator is RandomMethodId.RK_CENTROID:
        return random_k_centroids(d, k, seed)
    variant = generator.value.split('_', 1)[1]
    return random_k_linkage(d, k, variant, seed)
